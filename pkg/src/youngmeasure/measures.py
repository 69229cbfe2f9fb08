"""Measures under one interface: integrate against probes, query CDFs.

Three representations are supported — atom mixtures, density tables,
and sorted sample sets — and every operation dispatches on which one it
receives.  Weak* closeness is probed against a finite suite of test
functions; the reported gap is the maximum integral discrepancy over the
suite, a computable lower bound on the true weak* distance.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .analytic import DensityTable, DiracMixture
from .domain import Box, domain_env
from .errors import EvaluationError, SpecError
from .expressions import Node, evaluate as eval_expr, free_variables, parse, to_text

__all__ = [
    "TestFunction", "probe", "check_probe", "integrate_test", "cdf",
    "weakstar_gap", "default_suite", "monomial_suite", "trig_suite",
    "suite_by_name", "SUITE_NAMES", "beta_values", "total_mass",
]

_CONTINUITY_SAMPLES = 10_000


@dataclass(frozen=True, slots=True)
class TestFunction:
    """A weak* probe: β(s), optionally weighted by w(x) or generalized to ψ(x,s).

    Plain integration against a measure uses β only; the x-dependent
    parts are consumed by the sampling and quadrature engines.
    ``lipschitz_bound`` is declared by the caller and feeds convergence
    bounds; it is never derived symbolically.
    """

    __test__ = False  # name collides with pytest's collection prefix

    beta: Node
    weight: Node | None = None
    psi: Node | None = None
    lipschitz_bound: float | None = None

    def __post_init__(self):
        extra = free_variables(self.beta) - {"s"}
        if extra:
            raise SpecError(f"beta may only use the variable s, found {sorted(extra)}")

    @property
    def name(self) -> str:
        return to_text(self.beta)

    @property
    def x_dependent(self) -> bool:
        return self.weight is not None or self.psi is not None


def probe(
    beta: str,
    *,
    weight: str | None = None,
    psi: str | None = None,
    lipschitz: float | None = None,
    d: int = 1,
) -> TestFunction:
    """Parse probe text into a TestFunction; ``d`` scopes the x-variables."""
    xvars = ("x", "x1") if d == 1 else tuple(f"x{i}" for i in range(1, d + 1))
    return TestFunction(
        beta=parse(beta, ("s",)),
        weight=parse(weight, xvars, {"x": d}) if weight else None,
        psi=parse(psi, xvars + ("s",), {"x": d}) if psi else None,
        lipschitz_bound=lipschitz,
    )


def beta_values(t: TestFunction, s) -> np.ndarray | float:
    out = eval_expr(t.beta, {"s": s})
    if isinstance(s, np.ndarray) and not isinstance(out, np.ndarray):
        return np.full(s.shape, float(out))
    return out


def weight_values(t: TestFunction, X, d: int):
    if t.weight is None:
        return 1.0
    return eval_expr(t.weight, domain_env(X, d))


def psi_values(t: TestFunction, X, s, d: int):
    """ψ(x, s), defaulting to β(s) when no Carathéodory part is present."""
    if t.psi is None:
        return beta_values(t, s)
    env = domain_env(X, d)
    env["s"] = s
    return eval_expr(t.psi, env)


@functools.lru_cache(maxsize=256)
def _check_continuity(beta: Node, K: Box) -> None:
    lo, hi = K.lows[0], K.highs[0]
    grid = np.linspace(lo, hi, _CONTINUITY_SAMPLES)
    try:
        eval_expr(beta, {"s": grid})
    except EvaluationError as err:
        raise SpecError(
            f"probe {to_text(beta)!r} fails on the codomain box [{lo}, {hi}]: {err}"
        ) from err


def check_probe(t: TestFunction, K: Box) -> None:
    """β must evaluate cleanly on a fine grid spanning K (1D codomain)."""
    _check_continuity(t.beta, K)


Measure = Union[DiracMixture, DensityTable, "EmpiricalMeasure"]  # noqa: F821


def integrate_test(measure, t: TestFunction) -> float:
    """∫ β dν for one measure representation.

    Atoms: Σ wᵢ·β(pᵢ).  Density: trapezoid of β·g over the grid.
    Samples: the sample mean of β.  Probes with x-dependence belong to
    the sampling/quadrature engines and are rejected here.
    """
    if t.x_dependent:
        raise SpecError(
            "x-dependent probes (weight/psi) integrate via the sampling or "
            "quadrature engines, not against a bare measure"
        )
    from .montecarlo import EmpiricalMeasure  # late import; montecarlo imports us

    if isinstance(measure, DiracMixture):
        vals = beta_values(t, measure.locations_array)
        return math.fsum(np.asarray(vals, dtype=float) * measure.weights_array)
    if isinstance(measure, DensityTable):
        vals = beta_values(t, measure.grid)
        return float(np.trapezoid(vals * measure.values, measure.grid))
    if isinstance(measure, EmpiricalMeasure):
        return float(np.mean(beta_values(t, measure.samples)))
    raise SpecError(f"not a measure representation: {type(measure).__name__}")


def total_mass(measure) -> float:
    """∫ 1 dν: exactly 1 for atoms/samples up to their own invariants,
    1 − tail ± quadrature for densities."""
    from .montecarlo import EmpiricalMeasure

    if isinstance(measure, DiracMixture):
        return math.fsum(measure.weights_array)
    if isinstance(measure, DensityTable):
        return measure.mass()
    if isinstance(measure, EmpiricalMeasure):
        return 1.0
    raise SpecError(f"not a measure representation: {type(measure).__name__}")


def cdf(measure, y) -> float | np.ndarray:
    """P(value ≤ y); vectorized over y.  Nondecreasing from 0 to the total mass."""
    from .montecarlo import EmpiricalMeasure

    scalar = np.isscalar(y)
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if isinstance(measure, DiracMixture):
        locs = measure.locations_array
        cum = np.concatenate([[0.0], np.cumsum(measure.weights_array)])
        out = cum[np.searchsorted(locs, ys, side="right")]
    elif isinstance(measure, DensityTable):
        out = _density_cdf(measure, ys)
    elif isinstance(measure, EmpiricalMeasure):
        out = np.searchsorted(measure.samples, ys, side="right") / measure.n
    else:
        raise SpecError(f"not a measure representation: {type(measure).__name__}")
    return float(out[0]) if scalar else out


def _density_cdf(table: DensityTable, ys: np.ndarray) -> np.ndarray:
    g, v = table.grid, table.values
    h = np.diff(g)
    cells = 0.5 * (v[1:] + v[:-1]) * h
    cum = np.concatenate([[0.0], np.cumsum(cells)])
    j = np.clip(np.searchsorted(g, ys, side="right") - 1, 0, len(g) - 2)
    slope = (v[j + 1] - v[j]) / h[j]
    dy = ys - g[j]
    partial = 0.5 * (v[j] + (v[j] + slope * dy)) * dy
    out = cum[j] + partial
    out = np.where(ys <= g[0], 0.0, out)
    out = np.where(ys >= g[-1], cum[-1], out)
    return out


def weakstar_gap(a, b, suite: Sequence[TestFunction]) -> float:
    """max over the suite of |∫β dνₐ − ∫β dν_b|."""
    if not suite:
        raise SpecError("weak* gap needs a non-empty probe suite")
    return max(abs(integrate_test(a, t) - integrate_test(b, t)) for t in suite)


def _monomials(K: Box, top_degree: int = 6) -> list[TestFunction]:
    reach = max(abs(K.lows[0]), abs(K.highs[0]))
    out = [probe("1", lipschitz=0.0)]
    for k in range(1, top_degree + 1):
        out.append(probe("s" if k == 1 else f"s^{k}", lipschitz=k * reach ** (k - 1)))
    return out


def _checked(probes: list[TestFunction], K: Box) -> tuple[TestFunction, ...]:
    for t in probes:
        check_probe(t, K)
    return tuple(probes)


def default_suite(K: Box) -> tuple[TestFunction, ...]:
    """Monomials s⁰..s⁶, sin(πs), cos(πs), and |s − mid(K)|, with
    Lipschitz bounds declared for the box K."""
    mid = (K.lows[0] + K.highs[0]) / 2
    out = _monomials(K)
    out.append(probe("sin(pi*s)", lipschitz=math.pi))
    out.append(probe("cos(pi*s)", lipschitz=math.pi))
    out.append(probe(f"abs(s-{mid!r})", lipschitz=1.0))
    return _checked(out, K)


def monomial_suite(K: Box) -> tuple[TestFunction, ...]:
    return _checked(_monomials(K), K)


def trig_suite(K: Box) -> tuple[TestFunction, ...]:
    out = [probe("1", lipschitz=0.0)]
    for k in (1, 2, 3):
        inner = "pi*s" if k == 1 else f"{k}*pi*s"
        out.append(probe(f"sin({inner})", lipschitz=k * math.pi))
        out.append(probe(f"cos({inner})", lipschitz=k * math.pi))
    return _checked(out, K)


SUITE_NAMES = ("default", "monomial", "trig")


def suite_by_name(name: str, K: Box) -> tuple[TestFunction, ...]:
    if name == "default":
        return default_suite(K)
    if name == "monomial":
        return monomial_suite(K)
    if name == "trig":
        return trig_suite(K)
    raise SpecError(f"unknown probe suite {name!r}; available: {', '.join(SUITE_NAMES)}")
