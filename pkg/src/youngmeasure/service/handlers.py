"""Command orchestration shared by the HTTP service and the CLI.

Each handler takes a resolved :class:`PiecewiseFunction` plus plain
parameters and returns domain objects (tables, mixtures, estimates).
Serialization — pydantic responses on the service side, CSV/JSON files
on the CLI side — happens in the callers, so there is exactly one place
that decides *what* gets computed for each command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..analytic import (
    DensityTable,
    DiracMixture,
    ProbabilityResult,
    Reference,
    density_grid,
    piece_image_1d,
    pushforward_density,
    pushforward_probability,
    simple_young_measure,
)
from ..approximation import ReportRow, convergence_report
from ..domain import PiecewiseFunction, ValidationReport, validate_partition
from ..errors import SpecError
from ..measures import check_probe, probe, suite_by_name
from ..montecarlo import (
    DEFAULT_SEED,
    EmpiricalMeasure,
    FunctionalEstimate,
    empirical_measure,
    ks_statistic,
    young_functional_mc,
    young_functional_quadrature,
)

BLESSED_GRID = 4096  # reference resolution: fine enough for 1e-5 gap work


def breakpoints_of(f: PiecewiseFunction, reference: Reference | None) -> tuple[float, ...]:
    """Candidate discontinuity locations of the pushforward density.

    A builtin's reference knows its true breakpoints; otherwise the piece
    image endpoints are the only candidates a piecewise-C¹ function has.
    """
    if reference is not None:
        return reference.breakpoints
    if f.l != 1:
        return ()
    points: set[float] = set()
    for piece in f.pieces:
        if piece.is_constant:
            mid = tuple((lo + hi) / 2 for lo, hi in zip(piece.box.lows, piece.box.highs))
            points.add(float(piece(mid if f.d > 1 else mid[0])))
        elif f.d == 1:
            lo, hi = piece_image_1d(piece)
            points.update((lo, hi))
    return tuple(sorted(points))


def density(
    f: PiecewiseFunction,
    reference: Reference | None = None,
    grid_size: int = BLESSED_GRID,
) -> tuple[DensityTable, tuple[float, ...]]:
    table = pushforward_density(f, density_grid(f, grid_size))
    return table, breakpoints_of(f, reference)


def atoms(f: PiecewiseFunction) -> DiracMixture:
    return simple_young_measure(f)


def probability(
    f: PiecewiseFunction, intervals: list[tuple[float, float]]
) -> ProbabilityResult:
    if not intervals:
        raise SpecError("probability needs at least one target interval")
    return pushforward_probability(f, intervals)


@dataclass(frozen=True, slots=True)
class KSReport:
    """Empirical-vs-reference distance with the acceptance threshold it
    is compared against (a 99.99% KS band widened by the tail allowance)."""

    statistic: float
    threshold: float
    n: int
    seed: int


def ks_threshold(n: int, tail_bound: float) -> float:
    # 1.63/sqrt(n) is the alpha=0.01 two-sided KS band; truncation shifts
    # the conditional empirical CDF by up to the tail mass fraction.
    return 1.63 / math.sqrt(n) + tail_bound


def sample(
    f: PiecewiseFunction,
    n: int,
    seed: int = DEFAULT_SEED,
    reference: Reference | None = None,
) -> tuple[EmpiricalMeasure, KSReport | None]:
    e = empirical_measure(f, n, seed)
    report = None
    if reference is not None:
        stat = ks_statistic(e, reference.cdf)
        report = KSReport(
            statistic=stat,
            threshold=ks_threshold(e.n, f.tail_mass / f.domain.measure),
            n=e.n,
            seed=seed,
        )
    return e, report


def functional(
    f: PiecewiseFunction,
    beta: str = "s",
    weight: str | None = None,
    psi: str | None = None,
    n: int = 100_000,
    seed: int = DEFAULT_SEED,
    subdivisions: int = BLESSED_GRID,
) -> tuple[FunctionalEstimate, FunctionalEstimate | None]:
    """Monte-Carlo estimate plus, on 1D domains, the quadrature cross-check."""
    t = probe(beta, weight=weight, psi=psi, d=f.d)
    if f.l == 1:
        check_probe(t, f.codomain)  # fail before sampling, with the probe named
    mc = young_functional_mc(f, t, n, seed)
    quad = None
    if f.d == 1:
        quad = young_functional_quadrature(f, t, subdivisions=subdivisions)
    return mc, quad


def approximate(
    f: PiecewiseFunction,
    levels: list[int],
    suite_name: str = "default",
    reference: Reference | None = None,
) -> tuple[list[ReportRow], str, str]:
    """Convergence report rows plus descriptions of the suite and reference.

    Simple functions are compared against their exact atomic Young
    measure; otherwise the finest available density stands in: the
    builtin closed form sampled on the blessed grid when a reference is
    given, the computed pushforward density if not.
    """
    suite = suite_by_name(suite_name, f.codomain)
    if f.kind == "simple":
        target = simple_young_measure(f)
        ref_type = "atoms (exact)"
    else:
        table, _ = density(f, reference, BLESSED_GRID)
        target = table
        ref_type = f"density ({BLESSED_GRID}-point grid)"
    rows = convergence_report(f, levels, suite, target)
    suite_desc = f"{suite_name} ({len(suite)} probes)"
    return rows, suite_desc, ref_type


def validate(f: PiecewiseFunction, samples_per_piece: int = 1000) -> ValidationReport:
    return validate_partition(f, samples_per_piece=samples_per_piece)
