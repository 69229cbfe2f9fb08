"""Exact value distributions: Dirac mixtures and inverse-Jacobian densities.

For a simple function (constant on each piece) the distribution of f(U),
U uniform on the domain, is the mixture Σ (mᵢ/M)·δ_{pᵢ}.  For pieces
with C¹ inverses it has the density

    g(y) = (1/M) · Σ over pieces whose image contains y of |J_{f_i^{-1}}(y)|

evaluated here on a grid.  Images are treated as open sets, matching the
open pieces: a point sitting exactly on an image boundary belongs to the
cell on its right, which reproduces the half-open convention of the
built-in staircase example.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DerivativeTooSmallError,
    EvaluationError,
    NonInvertibleError,
    NonzeroTailError,
    NotSimpleError,
    NumericalError,
    PointNotCoveredError,
    SpecError,
)
from .domain import Domain, Piece, PiecewiseFunction, codomain_env, interval
from .expressions import evaluate as eval_expr, parse, to_text

__all__ = [
    "DiracMixture", "DensityTable", "Reference", "ProbabilityResult",
    "make_mixture", "simple_young_measure", "invert_piece",
    "jacobian_inverse_magnitude", "pushforward_density", "density_grid",
    "pushforward_probability", "harmonic_staircase", "piece_image_1d",
    "builtin_function", "BUILTIN_NAMES",
]

WEIGHT_TOL = 1e-12          # |Σ wᵢ + tail_bound − 1| allowed in a mixture
BISECTION_TOL_SCALE = 1e-12  # |f(x) − y| ≤ scale·(1 + |y|)
DERIVATIVE_FLOOR = 1e-10     # |f′| below this is treated as a critical point
FD_STEP_SCALE = 1e-6         # finite-difference step = scale · piece width
BREAKPOINT_EPS = 1e-9        # half-width of grid pairs straddling a jump
_QTOL_FLOOR = 1e-12
_QTOL_RATIO = 100.0          # adjacent-spacing ratio beyond which cells count as jump-resolving


@dataclass(frozen=True, slots=True, eq=False)
class DiracMixture:
    """Finite mixture of point masses; weights plus tail_bound sum to one.

    ``tail_bound`` is zero for measures of fully covered simple
    functions and mass/M of the truncated part otherwise.  Validation
    and integration work on cached arrays so mixtures stay usable at
    ladder sizes (10⁶ atoms).
    """

    atoms: tuple[tuple[float, float], ...]  # (location, weight), sorted by location
    tail_bound: float = 0.0
    _locs: np.ndarray = field(init=False, repr=False, default=None)
    _ws: np.ndarray = field(init=False, repr=False, default=None)

    def __post_init__(self):
        if not self.atoms:
            raise SpecError("mixture needs at least one atom")
        arr = np.asarray(self.atoms, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise SpecError("atoms must be (location, weight) pairs")
        locs, ws = np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])
        gaps = np.diff(locs)
        if (gaps < 0).any():
            raise SpecError("atoms must be sorted by location")
        if (gaps == 0).any():
            raise SpecError("duplicate atom locations must be merged")
        if not (ws > 0).all():
            i = int(np.argmin(ws > 0))
            raise SpecError(
                f"atom weight must be positive, got {ws[i]!r} at {locs[i]!r}"
            )
        total = math.fsum(ws) + self.tail_bound
        if abs(total - 1.0) > WEIGHT_TOL:
            raise SpecError(f"mixture mass {total!r} differs from 1 by more than {WEIGHT_TOL}")
        object.__setattr__(self, "_locs", locs)
        object.__setattr__(self, "_ws", ws)

    @property
    def locations(self) -> tuple[float, ...]:
        return tuple(p for p, _ in self.atoms)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.atoms)

    @property
    def locations_array(self) -> np.ndarray:
        return self._locs

    @property
    def weights_array(self) -> np.ndarray:
        return self._ws


def make_mixture(pairs: Sequence[tuple[float, float]], tail_bound: float = 0.0) -> DiracMixture:
    """Merge duplicate locations (summing weights), sort, and build."""
    merged: dict[float, list[float]] = {}
    for p, w in pairs:
        merged.setdefault(float(p), []).append(float(w))
    atoms = tuple(
        (p, math.fsum(ws)) for p, ws in sorted(merged.items())
    )
    return DiracMixture(atoms=atoms, tail_bound=tail_bound)


@dataclass(frozen=True, slots=True, eq=False)
class DensityTable:
    """Grid of density values with an explicit mass bookkeeping.

    ``tail_bound`` is the mass missing due to piece truncation;
    ``q_tol`` is a data-driven estimate of the trapezoid quadrature
    error committed when integrating over this grid (crude second
    differences inside smooth runs, value jumps across breakpoint-
    straddling cells).
    """

    grid: np.ndarray
    values: np.ndarray
    contributing_counts: np.ndarray
    tail_bound: float
    domain_measure: float
    q_tol: float

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        counts = np.asarray(self.contributing_counts, dtype=np.int64)
        if grid.ndim != 1 or len(grid) < 2:
            raise SpecError("density grid needs at least two points")
        if not (np.diff(grid) > 0).all():
            raise SpecError("density grid must be strictly increasing")
        if values.shape != grid.shape or counts.shape != grid.shape:
            raise SpecError("values/counts must match the grid in shape")
        if not np.isfinite(values).all():
            raise NumericalError("density values must be finite")
        if (values < 0).any():
            raise NumericalError("density values must be nonnegative")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "contributing_counts", counts)

    def mass(self) -> float:
        """Trapezoid integral of the density over the grid."""
        return float(np.trapezoid(self.values, self.grid))


def _quadrature_tolerance(grid: np.ndarray, values: np.ndarray) -> float:
    if len(grid) < 3:
        return _QTOL_FLOOR
    h = np.diff(grid)
    slopes = np.diff(values) / h
    spans = grid[2:] - grid[:-2]
    dd = 2.0 * np.diff(slopes) / spans  # crude f'' at interior points
    ratio = np.maximum(h[1:], h[:-1]) / np.minimum(h[1:], h[:-1])
    comparable = ratio <= _QTOL_RATIO
    smooth = float(np.sum(np.where(comparable, np.maximum(h[1:], h[:-1]) ** 3 * np.abs(dd), 0.0)) / 12.0)
    # cells whose neighbors have wildly different spacing straddle jumps;
    # charge them the full trapezoid-of-a-jump bound h·|Δv|
    jumpy = np.zeros(len(h), dtype=bool)
    jumpy[:-1] |= ~comparable
    jumpy[1:] |= ~comparable
    jumps = float(np.sum(np.where(jumpy, h * np.abs(np.diff(values)), 0.0)))
    return smooth + jumps + _QTOL_FLOOR


def simple_young_measure(f: PiecewiseFunction) -> DiracMixture:
    """Mixture Σ (mᵢ/M)·δ_{pᵢ} for a simple function with full coverage."""
    if f.l != 1:
        raise SpecError("simple measures are built for scalar-valued functions only")
    if f.tail_mass != 0:
        raise NonzeroTailError(
            f"simple measure requires full coverage, tail_mass={f.tail_mass!r}"
        )
    M = f.domain.measure
    pairs = []
    for k, piece in enumerate(f.pieces):
        if not piece.is_constant:
            raise NotSimpleError(
                f"piece {k} ({to_text(piece.forward[0])}) is not constant"
            )
        mid = tuple((lo + hi) / 2 for lo, hi in zip(piece.box.lows, piece.box.highs))
        p = piece(mid if piece.box.d > 1 else mid[0])
        pairs.append((float(p), piece.measure / M))
    return make_mixture(pairs)


def _forward_at(piece: Piece, x: float) -> float:
    """Evaluate a 1D piece at x, nudging inward when the expression's own
    domain ends exactly at the piece boundary (e.g. log at 0)."""
    try:
        return float(piece(x))
    except EvaluationError:
        lo, hi = piece.box.lows[0], piece.box.highs[0]
        width = hi - lo
        nudged = min(max(x, lo + 1e-12 * width), hi - 1e-12 * width)
        return float(piece(nudged))


def piece_image_1d(piece: Piece) -> tuple[float, float]:
    """Endpoints (sorted) of the open image interval of a monotone 1D piece."""
    if piece.box.d != 1:
        raise SpecError("piece_image_1d needs a 1D piece")
    a, b = piece.box.lows[0], piece.box.highs[0]
    fa, fb = _forward_at(piece, a), _forward_at(piece, b)
    return (fa, fb) if fa <= fb else (fb, fa)


def _bisection_tol(y) -> np.ndarray | float:
    return BISECTION_TOL_SCALE * (1.0 + np.abs(y))


def _bisect_many(piece: Piece, ys: np.ndarray) -> np.ndarray:
    """Solve f(x) = y for each y (all strictly inside the image) on the
    closed piece interval; vectorized bisection."""
    a0, b0 = piece.box.lows[0], piece.box.highs[0]
    lo = np.full(ys.shape, a0)
    hi = np.full(ys.shape, b0)
    increasing = _forward_at(piece, b0) >= _forward_at(piece, a0)
    for _ in range(110):  # 2^-110 of the width: beyond double resolution
        mid = 0.5 * (lo + hi)
        fm = np.asarray(piece(mid), dtype=float)
        go_right = (fm < ys) if increasing else (fm > ys)
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    mid = 0.5 * (lo + hi)
    residual = np.abs(np.asarray(piece(mid), dtype=float) - ys)
    bad = residual > _bisection_tol(ys)
    if bad.any():
        i = int(np.argmax(bad))
        raise NumericalError(
            f"bisection did not reach |f(x)-y| tolerance at y={float(ys[i])!r} "
            f"(residual {float(residual[i]):.3e}); is the piece really monotone?"
        )
    return mid


def invert_piece(piece: Piece, y: float) -> float | None:
    """Preimage of y under a monotone/invertible 1D piece, None when y is
    outside the open image interval."""
    if piece.box.d != 1:
        raise SpecError("invert_piece supports 1D pieces only")
    if piece.is_constant:
        return None
    lo, hi = piece_image_1d(piece)
    if not (lo < y < hi):
        return None
    if piece.inverse is not None:
        return float(eval_expr(piece.inverse[0], codomain_env(y, 1)))
    if not piece.monotone:
        raise NonInvertibleError(
            "piece has neither an inverse expression nor a monotone hint"
        )
    return float(_bisect_many(piece, np.array([y]))[0])


def _derivative_many(piece: Piece, xs: np.ndarray) -> np.ndarray:
    """Central finite difference of the forward expression, elementwise."""
    a, b = piece.box.lows[0], piece.box.highs[0]
    h = FD_STEP_SCALE * (b - a)
    try:
        return (np.asarray(piece(xs + h), float) - np.asarray(piece(xs - h), float)) / (2 * h)
    except EvaluationError:
        pass
    # stencil fell off the expression's domain near an endpoint: shift inward pointwise
    out = np.empty_like(xs)
    for i, x in enumerate(np.atleast_1d(xs)):
        try:
            out[i] = (_forward_at(piece, x + h) - _forward_at(piece, x - h)) / (2 * h)
        except EvaluationError:
            out[i] = (_forward_at(piece, x + h) - _forward_at(piece, x)) / h
    return out


def jacobian_inverse_magnitude(piece: Piece, y: float, piece_index: int = -1) -> float:
    """|J_{f⁻¹}(y)| for one piece: supplied expression when present, else
    1/|f′| at the preimage with f′ by central difference."""
    if piece.jacobian_inverse is not None:
        return abs(float(eval_expr(piece.jacobian_inverse, codomain_env(y, piece.l))))
    if piece.box.d != 1:
        raise SpecError("pieces of dimension ≥ 2 must supply a jacobian expression")
    x = invert_piece(piece, y)
    if x is None:
        raise PointNotCoveredError(f"y={y!r} is outside the piece's image")
    deriv = float(_derivative_many(piece, np.array([x]))[0])
    if abs(deriv) <= DERIVATIVE_FLOOR:
        raise DerivativeTooSmallError(piece_index, y, deriv)
    return 1.0 / abs(deriv)


def _as_values(v, n: int) -> np.ndarray:
    out = np.asarray(v, dtype=float)
    if out.ndim == 0:
        return np.full(n, float(out))
    return out


def _inverse_points(piece: Piece, ys: np.ndarray) -> np.ndarray | None:
    """Evaluate the supplied inverse on an array of codomain points.

    Falls back to a per-point loop when the vectorized evaluation leaves
    the expression's domain; points where the inverse cannot be
    evaluated come back NaN (treated as not-in-image by callers).
    """
    try:
        return _as_values(eval_expr(piece.inverse[0], codomain_env(ys, 1)), len(ys))
    except EvaluationError:
        out = np.full(len(ys), np.nan)
        for i, y in enumerate(ys):
            try:
                out[i] = float(eval_expr(piece.inverse[0], codomain_env(float(y), 1)))
            except EvaluationError:
                pass
        return out


def pushforward_density(f: PiecewiseFunction, grid) -> DensityTable:
    """Tabulate g(y) = (1/M)·Σ_{pieces with y in the image} |J_{f⁻¹}(y)|.

    Pieces must be invertible: in 1D either monotone or carrying an
    inverse expression; in higher dimension both inverse and jacobian
    expressions are required.  Constant pieces are rejected — their mass
    is an atom, not a density.
    """
    if f.l != 1:
        raise SpecError("densities are tabulated for scalar-valued functions only")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or not (np.diff(grid) > 0).all():
        raise SpecError("grid must be a strictly increasing 1D array")
    K = f.codomain
    if grid[0] < K.lows[0] - 1e-12 or grid[-1] > K.highs[0] + 1e-12:
        raise SpecError("grid must stay inside the codomain box")
    M = f.domain.measure
    values = np.zeros(len(grid))
    counts = np.zeros(len(grid), dtype=np.int64)

    for k, piece in enumerate(f.pieces):
        if piece.is_constant:
            raise SpecError(
                f"piece {k} is constant: its mass is an atom (use the mixture "
                "computation), not part of a density"
            )
        if piece.inverse is not None:
            if piece.box.d != 1:
                raise SpecError(
                    "density tabulation for pieces of dimension >= 2 is not supported"
                )
            # y is in the image exactly when the inverse lands strictly inside the box
            xs_all = _inverse_points(piece, grid)
            a, b = piece.box.lows[0], piece.box.highs[0]
            mask = np.isfinite(xs_all) & (xs_all > a) & (xs_all < b)
            xs = xs_all[mask]
        elif piece.box.d == 1:
            # refuse before looking at the image: endpoint-based images lie
            # for non-monotone pieces, so the mask cannot be trusted first
            if not piece.monotone:
                raise NonInvertibleError(
                    f"piece {k} has neither an inverse expression nor a monotone hint"
                )
            lo, hi = piece_image_1d(piece)
            mask = (grid > lo) & (grid < hi)
            if not mask.any():
                continue
            xs = _bisect_many(piece, grid[mask])
        else:
            raise SpecError(
                f"piece {k} has dimension {piece.box.d} ≥ 2 and no inverse expression"
            )
        if not mask.any():
            continue
        if piece.jacobian_inverse is not None:
            jac = np.abs(
                _as_values(eval_expr(piece.jacobian_inverse, codomain_env(grid[mask], 1)), int(mask.sum()))
            )
        else:
            deriv = _derivative_many(piece, xs)
            small = np.abs(deriv) <= DERIVATIVE_FLOOR
            if small.any():
                i = int(np.argmax(small))
                raise DerivativeTooSmallError(k, float(grid[mask][i]), float(deriv[i]))
            jac = 1.0 / np.abs(deriv)
        values[mask] += jac / M
        counts[mask] += 1

    return DensityTable(
        grid=grid,
        values=values,
        contributing_counts=counts,
        tail_bound=f.tail_mass / M,
        domain_measure=M,
        q_tol=_quadrature_tolerance(grid, values),
    )


def density_grid(f: PiecewiseFunction, size: int = 4096) -> np.ndarray:
    """Grid over the codomain that straddles every density jump.

    ``size`` cell midpoints (these generically avoid breakpoints), the
    codomain endpoints, and an ε-pair around each piece-image endpoint so
    that jumps are resolved by a narrow cell and the trapezoid mass is
    accurate to ~Σ(jump)·ε.
    """
    if f.l != 1:
        raise SpecError("density grids are 1D")
    if size < 2:
        raise SpecError(f"grid size must be at least 2, got {size}")
    lo, hi = f.codomain.lows[0], f.codomain.highs[0]
    width = hi - lo
    eps = min(BREAKPOINT_EPS, width * 1e-6)
    points = [lo + (np.arange(size) + 0.5) * width / size, np.array([lo, hi])]
    breakpoints = set()
    for piece in f.pieces:
        if piece.box.d != 1 or piece.is_constant:
            continue
        img_lo, img_hi = piece_image_1d(piece)
        breakpoints.update((img_lo, img_hi))
    offsets = []
    for b in breakpoints:
        for candidate in (b - eps, b + eps):
            if lo < candidate < hi:
                offsets.append(candidate)
    if offsets:
        points.append(np.array(sorted(offsets)))
    return np.unique(np.concatenate(points))


@dataclass(frozen=True, slots=True)
class ProbabilityResult:
    """P(f(U) ∈ C) with the truncation allowance carried alongside."""

    value: float
    tail_bound: float


def _merge_intervals(intervals: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    spans = sorted((float(a), float(b)) for a, b in intervals)
    for a, b in spans:
        if b < a:
            raise SpecError(f"interval [{a!r}, {b!r}] is reversed")
    merged: list[tuple[float, float]] = []
    for a, b in spans:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def _preimage_point(piece: Piece, y: float, img_lo: float, img_hi: float, increasing: bool) -> float:
    """x with f(x) = clamp(y to the image); endpoints map to box ends."""
    a, b = piece.box.lows[0], piece.box.highs[0]
    if y <= img_lo:
        return a if increasing else b
    if y >= img_hi:
        return b if increasing else a
    x = invert_piece(piece, y)
    assert x is not None  # y strictly inside the image by the branches above
    return x


def pushforward_probability(
    f: PiecewiseFunction, C: Sequence[tuple[float, float]]
) -> ProbabilityResult:
    """P(f(U) ∈ C) for a union of closed intervals C, computed piecewise.

    Constant pieces contribute their full mass when their value lies in
    C; monotone/invertible pieces contribute the measure of the
    preimage, obtained by inverting at interval endpoints.
    """
    if f.d != 1:
        raise SpecError("pushforward probability is implemented for 1D domains")
    targets = _merge_intervals(C)
    M = f.domain.measure
    total = []
    for k, piece in enumerate(f.pieces):
        if piece.is_constant:
            p = float(piece((piece.box.lows[0] + piece.box.highs[0]) / 2))
            if any(a <= p <= b for a, b in targets):
                total.append(piece.measure)
            continue
        if piece.inverse is None and not piece.monotone:
            raise NonInvertibleError(
                f"piece {k} has neither an inverse expression nor a monotone hint"
            )
        img_lo, img_hi = piece_image_1d(piece)
        a, b = piece.box.lows[0], piece.box.highs[0]
        increasing = _forward_at(piece, b) >= _forward_at(piece, a)
        for ca, cb in targets:
            if cb <= img_lo or ca >= img_hi:
                continue
            xa = _preimage_point(piece, ca, img_lo, img_hi, increasing)
            xb = _preimage_point(piece, cb, img_lo, img_hi, increasing)
            total.append(abs(xb - xa))
    value = min(1.0, max(0.0, math.fsum(total) / M))
    return ProbabilityResult(value=value, tail_bound=f.tail_mass / M)


@dataclass(frozen=True, slots=True)
class Reference:
    """Closed-form reference for a built-in fixture; callable as the density."""

    density: Callable[[np.ndarray], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple[float, ...]
    tail_bound: float
    description: str

    def __call__(self, y):
        return self.density(y)


def harmonic_staircase(N: int) -> tuple[PiecewiseFunction, Reference]:
    """The staircase f(x) = n·x − 1 on (1/n, 1/(n−1)), n = 2..N, on Ω=(0,1).

    Truncation leaves tail mass 1/N below x = 1/N.  The reference
    density is H_m − 1 on [1/m, 1/(m−1)) for m ≤ N and stays at the
    truncated value H_N − 1 on (0, 1/N).
    """
    if N < 2:
        raise SpecError(f"the staircase needs N >= 2, got {N}")
    pieces = []
    for n in range(2, N + 1):
        pieces.append(
            Piece(
                box=interval(1.0 / n, 1.0 / (n - 1)),
                forward=(parse(f"{n}*x-1", ("x", "x1")),),
                inverse=(parse(f"(y+1)/{n}", ("y", "y1")),),
                jacobian_inverse=parse(f"1/{n}", ("y", "y1")),
                monotone=True,
            )
        )
    f = PiecewiseFunction(
        domain=Domain((interval(0.0, 1.0),)),
        pieces=tuple(pieces),
        codomain=interval(0.0, 1.0),
        tail_mass=1.0 / N,
    )

    # cell edges 1/m, descending m; partial harmonic sums via exact accumulation
    edges = np.array([1.0 / m for m in range(N, 0, -1)])  # 1/N, ..., 1/2, 1
    h_minus_1 = np.array(
        [math.fsum(1.0 / j for j in range(2, m + 1)) for m in range(N, 0, -1)]
    )  # aligned with edges: value on [1/m, 1/(m−1))

    def density(y):
        y = np.asarray(y, dtype=float)
        # y in [1/m, 1/(m-1)) has N-m+1 edges at or below it, so the
        # matching value index is searchsorted - 1; below 1/N the
        # truncated staircase keeps all N-1 contributions (index 0)
        idx = np.searchsorted(edges, y, side="right") - 1
        inside = (y > 0) & (y < 1)
        cell = np.clip(idx, 0, N - 1)
        out = np.where(inside, h_minus_1[cell], 0.0)
        return out if out.ndim else float(out)

    def cdf(y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape)
        for n in range(2, N + 1):
            a, b = 1.0 / n, 1.0 / (n - 1)
            out += np.clip((y + 1.0) / n, a, b) - a
        out = np.clip(out, 0.0, 1.0 - 1.0 / N)
        return out if out.ndim else float(out)

    # the truncated density is constant on (0, 1/(N-1)), so 1/N is not a jump
    reference = Reference(
        density=density,
        cdf=cdf,
        breakpoints=(0.0,) + tuple(float(1.0 / m) for m in range(N - 1, 0, -1)),
        tail_bound=1.0 / N,
        description=f"staircase density H_m - 1 on [1/m, 1/(m-1)), truncated at {N} pieces",
    )
    return f, reference


def _identity_fixture() -> tuple[PiecewiseFunction, Reference]:
    piece = Piece(
        box=interval(0.0, 1.0),
        forward=(parse("x", ("x", "x1")),),
        inverse=(parse("y", ("y", "y1")),),
        jacobian_inverse=parse("1", ("y", "y1")),
        monotone=True,
    )
    f = PiecewiseFunction(
        domain=Domain((interval(0.0, 1.0),)),
        pieces=(piece,),
        codomain=interval(0.0, 1.0),
    )

    def density(y):
        y = np.asarray(y, dtype=float)
        out = np.where((y > 0) & (y < 1), 1.0, 0.0)
        return out if out.ndim else float(out)

    def cdf(y):
        y = np.asarray(y, dtype=float)
        out = np.clip(y, 0.0, 1.0)
        return out if out.ndim else float(out)

    return f, Reference(density, cdf, (), 0.0, "uniform density 1 on (0,1)")


def _square_fixture() -> tuple[PiecewiseFunction, Reference]:
    piece = Piece(
        box=interval(0.0, 1.0),
        forward=(parse("x^2", ("x", "x1")),),
        inverse=(parse("sqrt(y)", ("y", "y1")),),
        jacobian_inverse=parse("1/(2*sqrt(y))", ("y", "y1")),
        monotone=True,
    )
    f = PiecewiseFunction(
        domain=Domain((interval(0.0, 1.0),)),
        pieces=(piece,),
        codomain=interval(0.0, 1.0),
    )

    def density(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where((y > 0) & (y < 1), 0.5 / np.sqrt(np.abs(y)), 0.0)
        return out if out.ndim else float(out)

    def cdf(y):
        y = np.asarray(y, dtype=float)
        out = np.sqrt(np.clip(y, 0.0, 1.0))
        return out if out.ndim else float(out)

    return f, Reference(density, cdf, (), 0.0, "density 1/(2·sqrt(y)) on (0,1)")


BUILTIN_NAMES = ("harmonic", "identity", "square")


def builtin_function(name: str, truncate: int = 64) -> tuple[PiecewiseFunction, Reference]:
    """Built-in fixtures addressable by name from the command line."""
    if name == "harmonic":
        return harmonic_staircase(truncate)
    if name == "identity":
        return _identity_fixture()
    if name == "square":
        return _square_fixture()
    raise SpecError(f"unknown builtin {name!r}; available: {', '.join(BUILTIN_NAMES)}")
