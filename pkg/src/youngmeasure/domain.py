"""Box domains, partition pieces, and piecewise functions.

A function is given by a list of pieces: an open axis-aligned box plus a
vector of forward expressions, optionally with inverse and
inverse-Jacobian expressions.  Pieces are open, so evaluation on a piece
boundary (a set of measure zero) is an error, never a tie-break.
Construction performs structural checks only; semantic checks (pairwise
disjointness, coverage, image containment) live in
:func:`validate_partition`, which reports findings instead of raising.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EvaluationError, PointNotCoveredError, SpecError
from .expressions import (
    Node,
    codomain_variables,
    domain_variables,
    evaluate as eval_expr,
    free_variables,
    is_constant,
)

__all__ = [
    "Box", "Domain", "Piece", "PiecewiseFunction", "interval",
    "ValidationReport", "validate_partition",
    "evaluate", "evaluate_many",
    "domain_env", "codomain_env",
]

# Absolute tolerance for the coverage identity (sum of piece measures)
# + tail = domain measure.
COVERAGE_TOL = 1e-9

# |forward(inverse(y)) - y| allowed when checking supplied inverses.
INVERSE_CHECK_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class Box:
    """Open axis-aligned box, lows[i] < highs[i] strictly."""

    lows: tuple[float, ...]
    highs: tuple[float, ...]

    def __post_init__(self):
        if len(self.lows) != len(self.highs) or not self.lows:
            raise SpecError(f"box needs matching non-empty lows/highs, got {self.lows!r}/{self.highs!r}")
        for lo, hi in zip(self.lows, self.highs):
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise SpecError(f"box bounds must be finite, got [{lo!r}, {hi!r}]")
            if not lo < hi:
                raise SpecError(f"box side [{lo!r}, {hi!r}] has no interior")

    @property
    def d(self) -> int:
        return len(self.lows)

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in zip(self.lows, self.highs))

    @property
    def volume(self) -> float:
        out = 1.0
        for w in self.widths:
            out *= w
        return out

    def contains(self, x: Sequence[float]) -> bool:
        """Strict interior containment."""
        return all(lo < xi < hi for lo, xi, hi in zip(self.lows, x, self.highs))

    def overlaps(self, other: "Box") -> bool:
        """True when the two open boxes share interior points."""
        return all(
            max(a_lo, b_lo) < min(a_hi, b_hi)
            for a_lo, a_hi, b_lo, b_hi in zip(self.lows, self.highs, other.lows, other.highs)
        )

    def interior_grid(self, per_axis: int) -> np.ndarray:
        """(per_axis**d, d) array of cell-midpoint samples, strictly inside."""
        axes = [
            lo + (np.arange(per_axis) + 0.5) * (hi - lo) / per_axis
            for lo, hi in zip(self.lows, self.highs)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def interval(lo: float, hi: float) -> Box:
    return Box((float(lo),), (float(hi),))


def _box_inside(inner: Box, outer: Box) -> bool:
    return all(
        o_lo <= i_lo and i_hi <= o_hi
        for i_lo, i_hi, o_lo, o_hi in zip(inner.lows, inner.highs, outer.lows, outer.highs)
    )


@dataclass(frozen=True, slots=True)
class Domain:
    """Union of finitely many pairwise-disjoint open boxes; M is its measure."""

    boxes: tuple[Box, ...]

    def __post_init__(self):
        if not self.boxes:
            raise SpecError("domain needs at least one box")
        d = self.boxes[0].d
        for b in self.boxes:
            if b.d != d:
                raise SpecError(f"mixed box dimensions in domain: {b.d} vs {d}")
        for a, b in itertools.combinations(self.boxes, 2):
            if a.overlaps(b):
                raise SpecError(f"domain boxes overlap: {a} and {b}")

    @property
    def d(self) -> int:
        return self.boxes[0].d

    @property
    def measure(self) -> float:
        return sum(b.volume for b in self.boxes)

    def contains(self, x: Sequence[float]) -> bool:
        return any(b.contains(x) for b in self.boxes)


def domain_env(X, d: int) -> dict:
    """Bind domain variables for evaluation.

    X may be a scalar (d=1), a length-d point, an (n,) array of 1D
    points, or an (n, d) array of points.
    """
    if isinstance(X, np.ndarray):
        A = np.asarray(X, dtype=float)
        if A.ndim == 2:
            cols = [np.ascontiguousarray(A[:, i]) for i in range(d)]
        elif A.ndim == 1 and d == 1:
            cols = [A]
        else:  # a single length-d point passed as an array
            cols = [float(v) for v in np.atleast_1d(A)]
    elif np.isscalar(X):
        cols = [float(X)]
    else:
        cols = [float(v) for v in X]
    if len(cols) != d:
        raise SpecError(f"point has {len(cols)} coordinates, expected {d}")
    env = {f"x{i + 1}": c for i, c in enumerate(cols)}
    if d == 1:
        env["x"] = cols[0]
    return env


def codomain_env(y, l: int) -> dict:
    """Bind codomain variables.  y: scalar/tuple or array (values of one coordinate when l=1)."""
    if l == 1:
        v = y if isinstance(y, np.ndarray) else float(y)
        return {"y": v, "y1": v}
    return {f"y{i + 1}": float(v) for i, v in enumerate(y)}


@dataclass(frozen=True, slots=True)
class Piece:
    """One open box plus the expressions defined on it.

    ``inverse`` (length d, variables y/y1..yl) and ``jacobian_inverse``
    (scalar, value |det J| of the inverse at y) are optional analytic
    aids; ``monotone`` marks a 1D piece as strictly monotone so that
    numeric inversion is allowed without a supplied inverse.
    """

    box: Box
    forward: tuple[Node, ...]
    inverse: tuple[Node, ...] | None = None
    jacobian_inverse: Node | None = None
    monotone: bool = False

    def __post_init__(self):
        if not self.forward:
            raise SpecError("piece needs at least one forward expression")
        allowed_x = set(domain_variables(self.box.d))
        for expr in self.forward:
            extra = free_variables(expr) - allowed_x
            if extra:
                raise SpecError(f"forward expression uses non-domain variables {sorted(extra)}")
        allowed_y = set(codomain_variables(self.l))
        if self.inverse is not None:
            if len(self.inverse) != self.box.d:
                raise SpecError(
                    f"inverse must have {self.box.d} components, got {len(self.inverse)}"
                )
            for expr in self.inverse:
                extra = free_variables(expr) - allowed_y
                if extra:
                    raise SpecError(f"inverse expression uses non-codomain variables {sorted(extra)}")
        if self.jacobian_inverse is not None:
            extra = free_variables(self.jacobian_inverse) - allowed_y
            if extra:
                raise SpecError(
                    f"jacobian expression uses non-codomain variables {sorted(extra)}"
                )
        if self.monotone and self.box.d != 1:
            raise SpecError("monotone hint only applies to 1D pieces")

    @property
    def l(self) -> int:
        return len(self.forward)

    @property
    def measure(self) -> float:
        return self.box.volume

    @property
    def is_constant(self) -> bool:
        return all(is_constant(c) for c in self.forward)

    def __call__(self, X):
        """Evaluate forward at X (scalar/point or (n, d) array).  l=1 gives scalars/1D arrays."""
        env = domain_env(X, self.box.d)
        vector = isinstance(X, np.ndarray) and X.ndim >= 1
        n = X.shape[0] if vector else 0

        def as_output(v):
            # constant expressions come back scalar even for array input
            if vector and not isinstance(v, np.ndarray):
                return np.full(n, float(v))
            return v

        if self.l == 1:
            return as_output(eval_expr(self.forward[0], env))
        return tuple(as_output(eval_expr(c, env)) for c in self.forward)


@dataclass(frozen=True, slots=True)
class PiecewiseFunction:
    """f = Σ f_i·χ_{Ω_i} with an explicit, possibly truncated, piece list.

    ``tail_mass`` is the part of the domain's measure deliberately not
    covered by the listed pieces (truncation of a countable family).
    """

    domain: Domain
    pieces: tuple[Piece, ...]
    codomain: Box
    tail_mass: float = 0.0

    def __post_init__(self):
        if not self.pieces:
            raise SpecError("function needs at least one piece")
        d = self.domain.d
        l = self.pieces[0].l
        for p in self.pieces:
            if p.box.d != d:
                raise SpecError(f"piece dimension {p.box.d} != domain dimension {d}")
            if p.l != l:
                raise SpecError("pieces disagree on codomain dimension")
        if self.codomain.d != l:
            raise SpecError(
                f"codomain box dimension {self.codomain.d} != value dimension {l}"
            )
        if self.tail_mass < 0:
            raise SpecError(f"tail_mass must be >= 0, got {self.tail_mass!r}")

    @property
    def d(self) -> int:
        return self.domain.d

    @property
    def l(self) -> int:
        return self.pieces[0].l

    @property
    def kind(self) -> str:
        return "simple" if all(p.is_constant for p in self.pieces) else "smooth"

    @property
    def covered_mass(self) -> float:
        return sum(p.measure for p in self.pieces)


def evaluate(f: PiecewiseFunction, x) -> float | tuple[float, ...]:
    """f(x) for a single point; raises when x lies on a boundary or in the tail."""
    point = (float(x),) if np.isscalar(x) else tuple(float(v) for v in x)
    if len(point) != f.d:
        raise SpecError(f"point has dimension {len(point)}, expected {f.d}")
    for piece in f.pieces:
        if piece.box.contains(point):
            return piece(point if f.d > 1 else point[0])
    raise PointNotCoveredError(
        f"point {point if f.d > 1 else point[0]!r} is on a piece boundary or in the uncovered tail"
    )


def evaluate_many(f: PiecewiseFunction, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized evaluation over an (n, d) array of points.

    Returns ``(values, piece_index)``: values has shape (n,) when l = 1
    and (n, l) otherwise, with NaN rows for uncovered points;
    piece_index is -1 where no piece contains the point.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if X.shape[1] != f.d:
        raise SpecError(f"points have dimension {X.shape[1]}, expected {f.d}")
    index = np.full(n, -1, dtype=np.int64)
    values = np.full(n if f.l == 1 else (n, f.l), np.nan)
    remaining = np.arange(n)
    for k, piece in enumerate(f.pieces):
        if remaining.size == 0:
            break
        pts = X[remaining]
        inside = np.ones(len(remaining), dtype=bool)
        for i, (lo, hi) in enumerate(zip(piece.box.lows, piece.box.highs)):
            inside &= (pts[:, i] > lo) & (pts[:, i] < hi)
        if not inside.any():
            continue
        claimed = remaining[inside]
        out = piece(X[claimed])
        if f.l == 1:
            values[claimed] = out
        else:
            for j in range(f.l):
                values[claimed, j] = out[j]
        index[claimed] = k
        remaining = remaining[~inside]
    return values, index


@dataclass(frozen=True, slots=True)
class ValidationReport:
    """Findings from :func:`validate_partition`; empty lists mean a clean partition."""

    overlaps: tuple[tuple[int, int], ...]
    outside_domain: tuple[int, ...]  # pieces whose box is not inside the domain region
    defect: float  # M - sum(m_i) - tail_mass
    image_escapes: tuple[tuple[int, tuple[float, ...], tuple[float, ...]], ...]
    image_escape_count: int
    inverse_defects: tuple[tuple[int, float, float], ...]
    evaluation_failures: tuple[tuple[int, tuple[float, ...], str], ...]
    samples_per_piece: int

    @property
    def ok(self) -> bool:
        return (
            not self.overlaps
            and not self.outside_domain
            and abs(self.defect) <= COVERAGE_TOL
            and self.image_escape_count == 0
            and not self.inverse_defects
            and not self.evaluation_failures
        )

    def summary(self) -> str:
        if self.ok:
            return "partition valid: pieces disjoint, coverage exact, images inside codomain"
        parts = []
        if self.overlaps:
            parts.append(f"{len(self.overlaps)} overlapping piece pair(s)")
        if self.outside_domain:
            parts.append(f"{len(self.outside_domain)} piece(s) poke outside the domain")
        if abs(self.defect) > COVERAGE_TOL:
            parts.append(f"coverage defect {self.defect:.3e}")
        if self.image_escape_count:
            parts.append(f"{self.image_escape_count} sampled point(s) map outside the codomain")
        if self.inverse_defects:
            parts.append(f"{len(self.inverse_defects)} inverse mismatch(es)")
        if self.evaluation_failures:
            parts.append(f"{len(self.evaluation_failures)} evaluation failure(s)")
        return "; ".join(parts)


_ESCAPE_CAP = 100  # keep reports bounded; the count field is still exact


def _image_samples(piece: Piece, minimum: int) -> np.ndarray:
    per_axis = max(2, int(np.ceil(minimum ** (1.0 / piece.box.d))))
    return piece.box.interior_grid(per_axis)


def validate_partition(
    f: PiecewiseFunction, *, samples_per_piece: int = 1000
) -> ValidationReport:
    """Check disjointness, coverage, image containment, and supplied inverses.

    Image containment and inverse consistency are checked by sampling at
    least ``samples_per_piece`` interior points per piece (a deterministic
    midpoint grid, so reports are reproducible).
    """
    overlaps = [
        (i, j)
        for i, j in itertools.combinations(range(len(f.pieces)), 2)
        if f.pieces[i].box.overlaps(f.pieces[j].box)
    ]

    # an open box fits in the (disjoint) region iff it fits in one region box
    outside = [
        k
        for k, piece in enumerate(f.pieces)
        if not any(_box_inside(piece.box, b) for b in f.domain.boxes)
    ]

    defect = f.domain.measure - f.covered_mass - f.tail_mass

    escapes: list[tuple[int, tuple[float, ...], tuple[float, ...]]] = []
    escape_count = 0
    failures: list[tuple[int, tuple[float, ...], str]] = []
    inverse_defects: list[tuple[int, float, float]] = []
    K = f.codomain

    for k, piece in enumerate(f.pieces):
        pts = _image_samples(piece, samples_per_piece)
        try:
            out = piece(pts if f.d > 1 else pts[:, 0])
        except EvaluationError as err:
            failures.append((k, tuple(map(float, pts[0])), str(err)))
            continue
        vals = np.stack(out, axis=1) if f.l > 1 else np.asarray(out)[:, None]
        escaped = np.zeros(len(pts), dtype=bool)
        for j in range(f.l):
            escaped |= (vals[:, j] < K.lows[j]) | (vals[:, j] > K.highs[j])
        bad = np.flatnonzero(escaped)
        escape_count += len(bad)
        for idx in bad[: max(0, _ESCAPE_CAP - len(escapes))]:
            escapes.append(
                (k, tuple(map(float, pts[idx])), tuple(map(float, vals[idx])))
            )
        if piece.inverse is not None:
            inverse_defects.extend(_check_inverse(k, piece, vals))

    return ValidationReport(
        overlaps=tuple(overlaps),
        outside_domain=tuple(outside),
        defect=defect,
        image_escapes=tuple(escapes),
        image_escape_count=escape_count,
        inverse_defects=tuple(inverse_defects),
        evaluation_failures=tuple(failures),
        samples_per_piece=samples_per_piece,
    )


def _check_inverse(k: int, piece: Piece, vals: np.ndarray) -> list[tuple[int, float, float]]:
    """forward(inverse(y)) = y at sampled image values y; list mismatches."""
    defects = []
    # thin the sample to keep validation fast; 64 image points suffice
    ys = vals[:: max(1, len(vals) // 64)]
    for y in ys:
        env = codomain_env(y if piece.l > 1 else float(y[0]), piece.l)
        try:
            x = tuple(eval_expr(c, env) for c in piece.inverse)
            back = piece(x if piece.box.d > 1 else x[0])
        except EvaluationError:
            # inverse not evaluable at a sampled image point: report as a defect
            defects.append((k, float(y[0]), float("nan")))
            continue
        back_vec = back if piece.l > 1 else (back,)
        err = max(abs(b - yj) for b, yj in zip(back_vec, y))
        if err > INVERSE_CHECK_TOL:
            defects.append((k, float(y[0]), float(err)))
    return defects
