"""Function-spec files: JSON on disk ⇄ validated PiecewiseFunction.

Schema: top-level keys ``dimension``, ``domain`` (list of boxes, each a
list of [lo, hi] pairs), ``codomain`` (one box), ``pieces`` (objects
with ``subdomain``, ``forward`` expression strings, optional
``inverse``/``jacobian_inverse``/``monotone``), optional ``tail_mass``.
"""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .analytic import BUILTIN_NAMES, Reference, builtin_function
from .domain import Box, Domain, Piece, PiecewiseFunction
from .errors import InputError, SpecError
from .expressions import codomain_variables, domain_variables, parse, to_text

__all__ = [
    "BoxSpec", "PieceSpec", "FunctionSpec",
    "build_function", "to_spec", "load_function", "save_spec",
    "resolve_function",
]

BoxSpec = list[tuple[float, float]]  # [lo, hi] per axis


class PieceSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    subdomain: BoxSpec
    forward: list[str] = Field(min_length=1)
    inverse: list[str] | None = None
    jacobian_inverse: str | None = None
    monotone: bool = False


class FunctionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dimension: int = Field(ge=1)
    domain: list[BoxSpec] = Field(min_length=1)
    codomain: BoxSpec
    pieces: list[PieceSpec] = Field(min_length=1)
    tail_mass: float = 0.0


def _box(pairs: BoxSpec, what: str) -> Box:
    if not pairs:
        raise SpecError(f"{what}: a box needs at least one [lo, hi] pair")
    return Box(lows=tuple(p[0] for p in pairs), highs=tuple(p[1] for p in pairs))


def build_function(spec: FunctionSpec) -> PiecewiseFunction:
    """Materialize the spec: parse expressions, build boxes, validate shape."""
    d = spec.dimension
    xvars = domain_variables(d)
    limits = {"x": d}
    l = len(spec.pieces[0].forward)
    yvars = codomain_variables(l)
    ylimits = {"y": l}
    pieces = []
    for i, ps in enumerate(spec.pieces):
        try:
            forward = tuple(parse(text, xvars, limits) for text in ps.forward)
            inverse = (
                tuple(parse(text, yvars, ylimits) for text in ps.inverse)
                if ps.inverse is not None
                else None
            )
            jac = (
                parse(ps.jacobian_inverse, yvars, ylimits)
                if ps.jacobian_inverse is not None
                else None
            )
        except InputError as err:
            raise SpecError(f"piece {i}: {err}") from err
        pieces.append(
            Piece(
                box=_box(ps.subdomain, f"piece {i} subdomain"),
                forward=forward,
                inverse=inverse,
                jacobian_inverse=jac,
                monotone=ps.monotone,
            )
        )
    return PiecewiseFunction(
        domain=Domain(tuple(_box(b, "domain box") for b in spec.domain)),
        pieces=tuple(pieces),
        codomain=_box(spec.codomain, "codomain"),
        tail_mass=spec.tail_mass,
    )


def to_spec(f: PiecewiseFunction) -> FunctionSpec:
    """Inverse of build_function up to expression formatting."""

    def box_spec(b: Box) -> BoxSpec:
        return [(lo, hi) for lo, hi in zip(b.lows, b.highs)]

    return FunctionSpec(
        dimension=f.d,
        domain=[box_spec(b) for b in f.domain.boxes],
        codomain=box_spec(f.codomain),
        pieces=[
            PieceSpec(
                subdomain=box_spec(p.box),
                forward=[to_text(c) for c in p.forward],
                inverse=[to_text(c) for c in p.inverse] if p.inverse else None,
                jacobian_inverse=(
                    to_text(p.jacobian_inverse) if p.jacobian_inverse else None
                ),
                monotone=p.monotone,
            )
            for p in f.pieces
        ],
        tail_mass=f.tail_mass,
    )


def load_function(path: str | Path) -> PiecewiseFunction:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise err  # I/O failures keep their own exit-code path
    try:
        spec = FunctionSpec.model_validate_json(raw)
    except ValidationError as err:
        raise SpecError(f"{path}: {err}") from err
    return build_function(spec)


def save_spec(f: PiecewiseFunction, path: str | Path) -> None:
    spec = to_spec(f)
    payload = spec.model_dump(exclude_none=True)
    Path(path).write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8"
    )


def resolve_function(
    name_or_path: str, truncate: int = 64
) -> tuple[PiecewiseFunction, Reference | None]:
    """Builtin name → generated fixture with its reference; anything else
    is treated as a spec-file path (no reference available)."""
    if name_or_path in BUILTIN_NAMES:
        return builtin_function(name_or_path, truncate)
    return load_function(name_or_path), None
