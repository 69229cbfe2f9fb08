"""Canonical simple-function ladder: range quantization to dyadic cells.

Level L splits the codomain box into 2^L half-open cells of equal width
(top cell closed) and floors f to cell lower endpoints.  The quantized
function differs from f by at most one cell width everywhere, and its
value distribution is a Dirac mixture whose weights are exact preimage
measures — so the weak* gap to the true distribution decays like
Λ·2^{−L} for probes with Lipschitz bound Λ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import (
    DiracMixture,
    _bisect_many,
    _forward_at,
    _inverse_points,
    piece_image_1d,
)
from .domain import Piece, PiecewiseFunction, evaluate, evaluate_many
from .errors import NonInvertibleError, NumericalError, SpecError
from .expressions import evaluate as eval_expr
from .measures import TestFunction, weakstar_gap
from .montecarlo import DEFAULT_SEED, sample_uniform

__all__ = [
    "SimpleFunction", "ApproximationLadder", "ReportRow",
    "simple_approximation", "build_ladder", "convergence_report",
    "MAX_LEVEL", "POINTWISE_CHECK_SAMPLES",
]

MAX_LEVEL = 26  # 2^26 cell edges ≈ 0.5 GB of float64; beyond that is out of scope
POINTWISE_CHECK_SAMPLES = 10_000


def _cell_index(edges: np.ndarray, y) -> np.ndarray:
    """Half-open cells [e_k, e_{k+1}) with the top cell closed."""
    idx = np.searchsorted(edges, y, side="right") - 1
    return np.clip(idx, 0, len(edges) - 2)


@dataclass(frozen=True, slots=True, eq=False)
class SimpleFunction:
    """f floored to the dyadic range cells of level ``level``.

    ``weights[k]`` is the exact normalized measure of the preimage of
    cell k; cells missed by the image carry weight zero.
    """

    base: PiecewiseFunction
    level: int
    edges: np.ndarray
    weights: np.ndarray
    tail_bound: float

    @property
    def cell_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def values(self) -> np.ndarray:
        """Cell representatives: the lower endpoints."""
        return self.edges[:-1]

    @property
    def atom_count(self) -> int:
        return int(np.count_nonzero(self.weights))

    def quantize(self, y):
        """Floor codomain values to their cell representative."""
        return self.values[_cell_index(self.edges, y)]

    def __call__(self, X):
        if np.isscalar(X) or (isinstance(X, np.ndarray) and X.ndim == 0):
            return float(self.quantize(evaluate(self.base, float(X))))
        vals, idx = evaluate_many(self.base, np.asarray(X, dtype=float))
        out = np.full(vals.shape, np.nan)
        covered = idx >= 0
        out[covered] = self.quantize(vals[covered])
        return out

    def young_measure(self) -> DiracMixture:
        mask = self.weights > 0
        atoms = tuple(zip(self.values[mask].tolist(), self.weights[mask].tolist()))
        return DiracMixture(atoms=atoms, tail_bound=self.tail_bound)


def _constant_value(piece: Piece) -> float:
    return float(eval_expr(piece.forward[0], {}))


def _preimages(piece: Piece, ys: np.ndarray) -> np.ndarray:
    """x with f(x) = y for cell edges strictly inside the piece image."""
    if len(ys) == 0:
        return ys
    if piece.inverse is not None:
        xs = _inverse_points(piece, ys)
        bad = ~np.isfinite(xs)
        if bad.any():
            if not piece.monotone:
                raise NonInvertibleError(
                    f"inverse expression failed at y={float(ys[int(np.argmax(bad))])!r} "
                    "and the piece is not marked monotone"
                )
            xs[bad] = _bisect_many(piece, ys[bad])
        return xs
    if piece.monotone:
        return _bisect_many(piece, ys)
    raise NonInvertibleError(
        "exact preimage measures need an inverse expression or a monotone hint "
        "on every non-constant piece"
    )


def simple_approximation(f: PiecewiseFunction, L: int) -> SimpleFunction:
    """Range-quantize f at level L; see the module docstring."""
    if f.l != 1:
        raise SpecError("simple approximation quantizes scalar codomains only")
    if not isinstance(L, (int, np.integer)) or L < 0:
        raise SpecError(f"level must be an integer >= 0, got {L!r}")
    if L > MAX_LEVEL:
        raise SpecError(f"level {L} exceeds the supported maximum {MAX_LEVEL}")
    k_lo, k_hi = f.codomain.lows[0], f.codomain.highs[0]
    m = 1 << L
    edges = np.linspace(k_lo, k_hi, m + 1)
    weights = np.zeros(m)
    for piece in f.pieces:
        if piece.is_constant:
            weights[_cell_index(edges, _constant_value(piece))] += piece.measure
            continue
        if piece.box.d != 1:
            raise NonInvertibleError(
                "non-constant pieces on domains of dimension >= 2 have no exact "
                "1D preimage decomposition"
            )
        if piece.inverse is None and not piece.monotone:
            raise NonInvertibleError(
                "exact preimage measures need an inverse expression or a "
                "monotone hint on every non-constant piece"
            )
        img_lo, img_hi = piece_image_1d(piece)
        inner = edges[(edges > img_lo) & (edges < img_hi)]
        xs = _preimages(piece, inner)
        a, b = piece.box.lows[0], piece.box.highs[0]
        increasing = _forward_at(piece, b) >= _forward_at(piece, a)
        cuts = np.concatenate([[a if increasing else b], xs, [b if increasing else a]])
        ys = np.concatenate([[img_lo], inner, [img_hi]])
        cells = _cell_index(edges, 0.5 * (ys[1:] + ys[:-1]))  # midpoints dodge edge ties
        np.add.at(weights, cells, np.abs(np.diff(cuts)))
    weights /= f.domain.measure
    tail = max(1.0 - math.fsum(weights), 0.0)
    return SimpleFunction(base=f, level=L, edges=edges, weights=weights, tail_bound=tail)


@dataclass(frozen=True, slots=True, eq=False)
class ApproximationLadder:
    """Levels of the canonical ladder with their simple Young measures."""

    base: PiecewiseFunction
    levels: tuple[tuple[int, SimpleFunction, DiracMixture], ...]

    def __post_init__(self):
        if not self.levels:
            raise SpecError("ladder needs at least one level")
        ls = [L for L, _, _ in self.levels]
        if ls != sorted(set(ls)):
            raise SpecError("ladder levels must be strictly increasing")

    def quantization_step(self, L: int) -> float:
        k = self.base.codomain
        return (k.highs[0] - k.lows[0]) * 2.0 ** (-L)


def build_ladder(
    f: PiecewiseFunction,
    levels,
    *,
    check_points: int = POINTWISE_CHECK_SAMPLES,
) -> ApproximationLadder:
    """Build each level and verify the pointwise bound
    sup |f_L − f| ≤ 2^{−L}·diam(K) on ``check_points`` sampled points."""
    wanted = sorted(set(int(L) for L in levels))
    X = sample_uniform(f.domain, check_points, DEFAULT_SEED)
    base_vals, idx = evaluate_many(f, X)
    covered = base_vals[idx >= 0]
    rungs = []
    for L in wanted:
        s = simple_approximation(f, L)
        if len(covered):
            err = float(np.max(np.abs(s.quantize(covered) - covered)))
            if err > s.cell_width * (1 + 1e-12):
                raise NumericalError(
                    f"level {L}: |f_L - f| reached {err:.3e}, above the cell "
                    f"width {s.cell_width:.3e}; codomain box does not contain "
                    "the image"
                )
        rungs.append((L, s, s.young_measure()))
    return ApproximationLadder(base=f, levels=tuple(rungs))


@dataclass(frozen=True, slots=True)
class ReportRow:
    level: int
    gap: float
    atom_count: int


def convergence_report(
    f: PiecewiseFunction,
    levels,
    suite: tuple[TestFunction, ...],
    reference,
) -> list[ReportRow]:
    """Weak* gap of each ladder level against a reference measure
    (the analytic distribution of f), ordered by level."""
    ladder = build_ladder(f, levels)
    return [
        ReportRow(level=L, gap=weakstar_gap(nu, reference, suite), atom_count=len(nu.atoms))
        for L, _, nu in ladder.levels
    ]
