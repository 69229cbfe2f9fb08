"""Sampling f(U) with reproducible, chunking-invariant randomness.

The stream contract: sample index i derives its randomness from counter
blocks of a Philox 4x64 generator, one aligned group of W doubles per
index (W = 4·ceil((d+1)/4)).  Word 0 selects the box, words 1..d are the
coordinates.  Any chunked or parallel evaluation that respects the
per-index layout reproduces the exact same points, so results are
independent of chunk size and identical across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.random import Generator, Philox

from .domain import Domain, PiecewiseFunction, evaluate_many
from .errors import (
    EvaluationError,
    NoCoverageError,
    SpecError,
    TooManyFailuresError,
)
from .measures import TestFunction, beta_values, psi_values, weight_values

__all__ = [
    "DEFAULT_SEED", "GENERATOR_NAME", "EmpiricalMeasure", "FunctionalEstimate",
    "sample_uniform", "empirical_measure", "ks_statistic",
    "young_functional_mc", "young_functional_quadrature",
]

DEFAULT_SEED = 0x5EED_0000_0000_0001
GENERATOR_NAME = "philox4x64/block-per-index/v1"

_CHUNK = 1 << 18
_FAILURE_BUDGET = 1e-3  # fraction of evaluations allowed to fail before aborting


def _words_per_sample(d: int) -> int:
    return 4 * math.ceil((d + 1) / 4)


def _raw_uniforms(seed: int, start: int, count: int, words: int) -> np.ndarray:
    """(count, words) doubles in [0,1): rows are sample indices start..start+count-1."""
    bitgen = Philox(key=seed)
    bitgen.advance(start * (words // 4))  # one advance unit = 4 doubles
    return Generator(bitgen).random(size=(count, words))


def sample_uniform(domain: Domain, n: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """n uniform points on the domain as an (n, d) array.

    A box is chosen with probability proportional to its volume, then
    the coordinates are uniform within the box.  Fixed (seed, index)
    always yields the same point.
    """
    if n < 1:
        raise SpecError(f"sample count must be >= 1, got {n}")
    d = domain.d
    words = _words_per_sample(d)
    volumes = np.array([b.volume for b in domain.boxes])
    cut = np.cumsum(volumes) / volumes.sum()
    lows = np.array([b.lows for b in domain.boxes])
    widths = np.array([b.widths for b in domain.boxes])
    out = np.empty((n, d))
    for start in range(0, n, _CHUNK):
        count = min(_CHUNK, n - start)
        raw = _raw_uniforms(seed, start, count, words)
        box = np.minimum(np.searchsorted(cut, raw[:, 0], side="right"), len(cut) - 1)
        out[start : start + count] = lows[box] + raw[:, 1 : d + 1] * widths[box]
    return out


@dataclass(frozen=True, slots=True, eq=False)
class EmpiricalMeasure:
    """Sorted values of f at accepted sample points.

    ``rejected`` counts draws landing in the uncovered tail or exactly
    on a piece boundary; they are excluded, never perturbed.
    """

    samples: np.ndarray
    seed: int
    rejected: int = 0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or len(samples) == 0:
            raise SpecError("empirical measure needs a non-empty 1D sample array")
        if (np.diff(samples) < 0).any():
            raise SpecError("samples must be sorted ascending")
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        return len(self.samples)


def empirical_measure(
    f: PiecewiseFunction, n: int, seed: int = DEFAULT_SEED
) -> EmpiricalMeasure:
    """Distribution of f(U) from n draws; tail/boundary draws are rejected."""
    if f.l != 1:
        raise SpecError("empirical measures are built for scalar-valued functions")
    accepted = []
    rejected = 0
    X = sample_uniform(f.domain, n, seed)
    for start in range(0, n, _CHUNK):
        chunk = X[start : start + _CHUNK]
        values, idx = evaluate_many(f, chunk)
        keep = idx >= 0
        rejected += int((~keep).sum())
        accepted.append(values[keep])
    samples = np.concatenate(accepted)
    if len(samples) == 0:
        raise NoCoverageError(
            f"all {n} draws fell outside the listed pieces; nothing to estimate"
        )
    samples.sort(kind="stable")
    return EmpiricalMeasure(samples=samples, seed=seed, rejected=rejected)


def ks_statistic(e: EmpiricalMeasure, reference_cdf: Callable) -> float:
    """Two-sided Kolmogorov–Smirnov distance between the empirical CDF and a
    reference CDF (called vectorized on the sorted samples)."""
    F = np.asarray(reference_cdf(e.samples), dtype=float)
    if F.shape != e.samples.shape:
        raise SpecError("reference_cdf must return one value per sample")
    if (F < -1e-12).any() or (F > 1 + 1e-12).any():
        raise SpecError("reference_cdf range must lie within [0, 1]")
    if (np.diff(F) < -1e-12).any():
        raise SpecError("reference_cdf must be nondecreasing")
    n = e.n
    i = np.arange(1, n + 1)
    upper = np.max(i / n - F)
    lower = np.max(F - (i - 1) / n)
    return float(max(upper, lower, 0.0))


@dataclass(frozen=True, slots=True)
class FunctionalEstimate:
    """Value of ∫_Ω ψ(x, f(x))·w(x) dx over the listed pieces.

    Monte Carlo: mean of M·ψ·w over all draws, with tail-rejected draws
    contributing zero so the estimate is unbiased for the integral over
    the listed pieces; stderr is the sample standard deviation / √n.
    Quadrature: composite trapezoid per piece, stderr 0 with a note.
    """

    value: float
    stderr: float
    n: int
    seed: int
    method: str  # "monte-carlo" | "quadrature"
    rejected: int = 0
    failures: int = 0
    note: str = ""


def young_functional_mc(
    f: PiecewiseFunction,
    t: TestFunction,
    n: int,
    seed: int = DEFAULT_SEED,
) -> FunctionalEstimate:
    """Sample-mean estimate of the functional; see FunctionalEstimate."""
    if f.l != 1:
        raise SpecError("functionals are estimated for scalar-valued functions")
    if n < 2:
        raise SpecError(f"need at least 2 samples for a standard error, got {n}")
    M = f.domain.measure
    X = sample_uniform(f.domain, n, seed)
    contributions = np.zeros(n)
    rejected = 0
    failures = 0
    for start in range(0, n, _CHUNK):
        chunk = X[start : start + _CHUNK]
        values, idx = evaluate_many(f, chunk)
        keep = idx >= 0
        rejected += int((~keep).sum())
        if not keep.any():
            continue
        xs = chunk[keep]
        ss = values[keep]
        try:
            contrib = M * np.asarray(psi_values(t, xs, ss, f.d), dtype=float)
            w = weight_values(t, xs, f.d)
            contrib = contrib * np.asarray(w, dtype=float)
        except EvaluationError:
            contrib, chunk_failures = _contributions_pointwise(t, xs, ss, f.d, M)
            failures += chunk_failures
        out = np.zeros(len(chunk))
        out[keep] = contrib
        contributions[start : start + len(chunk)] = out
    if failures > _FAILURE_BUDGET * n:
        raise TooManyFailuresError(
            f"{failures} of {n} evaluations failed (> {_FAILURE_BUDGET:.1%})"
        )
    if rejected == n:
        raise NoCoverageError(f"all {n} draws fell outside the listed pieces")
    value = float(np.mean(contributions))
    stderr = float(np.std(contributions, ddof=1) / math.sqrt(n))
    return FunctionalEstimate(
        value=value,
        stderr=stderr,
        n=n,
        seed=seed,
        method="monte-carlo",
        rejected=rejected,
        failures=failures,
    )


def _contributions_pointwise(
    t: TestFunction, xs: np.ndarray, ss: np.ndarray, d: int, M: float
) -> tuple[np.ndarray, int]:
    """Per-point fallback when a vectorized probe evaluation fails somewhere:
    failing points contribute zero and are counted."""
    out = np.zeros(len(ss))
    failures = 0
    for i in range(len(ss)):
        x = xs[i] if d > 1 else float(xs[i, 0])
        try:
            psi = float(psi_values(t, x, float(ss[i]), d))
            w = float(weight_values(t, x, d))
            out[i] = M * psi * w
        except EvaluationError:
            failures += 1
    return out, failures


def young_functional_quadrature(
    f: PiecewiseFunction, t: TestFunction, subdivisions: int = 4096
) -> FunctionalEstimate:
    """Composite trapezoid of ψ(x, f(x))·w(x) over each piece's interval."""
    if f.d != 1:
        raise SpecError("quadrature functionals are implemented for 1D domains")
    if subdivisions < 1:
        raise SpecError(f"subdivisions must be >= 1, got {subdivisions}")
    pieces_total = []
    for k, piece in enumerate(f.pieces):
        a, b = piece.box.lows[0], piece.box.highs[0]
        xs = np.linspace(a, b, subdivisions + 1)
        fv = _forward_nodes(piece, xs, k)
        integrand = np.asarray(psi_values(t, xs, fv, 1), dtype=float)
        w = weight_values(t, xs, 1)
        integrand = integrand * np.asarray(w, dtype=float)
        if integrand.ndim == 0:
            integrand = np.full(xs.shape, float(integrand))
        pieces_total.append(float(np.trapezoid(integrand, xs)))
    return FunctionalEstimate(
        value=math.fsum(pieces_total),
        stderr=0.0,
        n=subdivisions,
        seed=0,
        method="quadrature",
        note="deterministic trapezoid; error set by the subdivision count, not sampling",
    )


def _forward_nodes(piece, xs: np.ndarray, k: int) -> np.ndarray:
    """Forward values at quadrature nodes, nudging an endpoint inward when
    the expression's domain ends exactly there."""
    from .analytic import _forward_at  # shared nudge logic

    try:
        return np.asarray(piece(xs), dtype=float)
    except EvaluationError:
        try:
            return np.array([_forward_at(piece, float(x)) for x in xs])
        except EvaluationError as err:
            raise EvaluationError(f"piece {k}: {err}") from err
