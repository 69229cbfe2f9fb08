"""Probe suites and the shared measure interface (integrate, CDF, weak* gap)."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from youngmeasure.analytic import (
    builtin_function,
    density_grid,
    harmonic_staircase,
    make_mixture,
    pushforward_density,
)
from youngmeasure.domain import interval
from youngmeasure.errors import ParseError, SpecError
from youngmeasure.expressions import parse
from youngmeasure.measures import (
    SUITE_NAMES,
    TestFunction,
    beta_values,
    cdf,
    check_probe,
    default_suite,
    integrate_test,
    monomial_suite,
    probe,
    suite_by_name,
    total_mass,
    trig_suite,
    weakstar_gap,
)
from youngmeasure.montecarlo import DEFAULT_SEED, EmpiricalMeasure, empirical_measure


# --- probes ------------------------------------------------------------------

def test_probe_basics():
    t = probe("s^2", lipschitz=2.0)
    assert t.name == "s^2"
    assert not t.x_dependent
    assert t.lipschitz_bound == 2.0
    assert probe("1", weight="x").x_dependent
    assert probe("s", psi="x*s").x_dependent


def test_probe_beta_must_use_only_s():
    with pytest.raises(ParseError):
        probe("x + s")  # x is not in scope for beta
    with pytest.raises(SpecError):
        TestFunction(beta=parse("x", ("x", "x1")))  # node built out of band
    with pytest.raises(ParseError):
        probe("s +")
    with pytest.raises(ParseError):
        probe("s", psi="y*s")  # codomain variable has no place in psi


def test_beta_values_broadcasts_constants():
    t = probe("2")
    out = beta_values(t, np.linspace(0, 1, 5))
    assert isinstance(out, np.ndarray) and out.shape == (5,)
    assert (out == 2.0).all()
    assert beta_values(t, 0.3) == 2.0


def test_check_probe_flags_unevaluable_beta():
    K = interval(0.0, 1.0)
    with pytest.raises(SpecError):
        check_probe(probe("log(s)"), K)  # grid touches s = 0
    with pytest.raises(SpecError):
        check_probe(probe("1/s"), K)
    check_probe(probe("sqrt(s)"), K)  # fine: sqrt(0) = 0


# --- integrate_test ----------------------------------------------------------

def test_integrate_atoms_hand_value():
    m = make_mixture([(1.0, 0.5), (3.0, 0.5)])
    assert integrate_test(m, probe("s^2")) == pytest.approx(5.0, abs=1e-14)
    assert integrate_test(m, probe("1")) == pytest.approx(1.0, abs=1e-15)


def test_integrate_density_uniform():
    f, _ = builtin_function("identity")
    table = pushforward_density(f, density_grid(f, 512))
    assert integrate_test(table, probe("s")) == pytest.approx(0.5, abs=1e-6)


def test_integrate_empirical_is_sample_mean():
    f, _ = builtin_function("square")
    e = empirical_measure(f, 2000, DEFAULT_SEED)
    assert integrate_test(e, probe("s")) == float(np.mean(e.samples))


def test_integrate_rejects_x_dependent_probes():
    m = make_mixture([(0.0, 1.0)])
    with pytest.raises(SpecError):
        integrate_test(m, probe("s", weight="x"))
    with pytest.raises(SpecError):
        integrate_test(m, probe("s", psi="x*s"))


def test_integrate_rejects_non_measures():
    with pytest.raises(SpecError):
        integrate_test([1, 2, 3], probe("s"))
    with pytest.raises(SpecError):
        total_mass("nope")


def test_integrate_is_linear():
    m = make_mixture([(0.2, 0.3), (0.7, 0.5), (1.5, 0.2)])
    lhs = integrate_test(m, probe("s^2 + 3*s"))
    rhs = integrate_test(m, probe("s^2")) + 3 * integrate_test(m, probe("s"))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_total_mass_by_representation():
    m = make_mixture([(0.0, 0.25), (1.0, 0.75)])
    assert total_mass(m) == 1.0
    f, ref = harmonic_staircase(32)
    table = pushforward_density(f, density_grid(f, 2048))
    assert total_mass(table) == pytest.approx(1.0 - ref.tail_bound, abs=1e-6)
    e = EmpiricalMeasure(samples=np.array([0.5]), seed=0)
    assert total_mass(e) == 1.0


# --- CDFs --------------------------------------------------------------------

def test_cdf_atoms_golden():
    m = make_mixture([(0.0, 0.5), (0.5, 0.5)])
    ys = np.array([-0.1, 0.0, 0.3, 0.5, 1.0])
    assert np.allclose(cdf(m, ys), [0.0, 0.5, 0.5, 1.0, 1.0], atol=1e-15)
    assert cdf(m, 0.25) == 0.5  # scalar in, scalar out
    assert isinstance(cdf(m, 0.25), float)


def test_cdf_empirical_hand_case():
    e = EmpiricalMeasure(samples=np.array([1.0, 2.0, 3.0]), seed=0)
    ys = np.array([0.5, 1.0, 2.5, 3.0, 4.0])
    expect = np.array([0.0, 1 / 3, 2 / 3, 1.0, 1.0])
    assert np.allclose(cdf(e, ys), expect, atol=1e-15)


def test_cdf_density_tracks_reference():
    f, ref = harmonic_staircase(8)
    table = pushforward_density(f, density_grid(f, 4096))
    ys = np.array([0.15, 0.3, 0.45, 0.7, 0.95])
    assert np.allclose(cdf(table, ys), ref.cdf(ys), atol=1e-4)
    assert cdf(table, -1.0) == 0.0
    # summation order differs from mass() (cumsum vs pairwise), hence 1e-12
    assert cdf(table, 2.0) == pytest.approx(table.mass(), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6, unique=True))
def test_cdf_mixture_nondecreasing(locs):
    n = len(locs)
    # make the weights sum to one exactly
    head = [1.0 / n] * (n - 1)
    weights = head + [1.0 - math.fsum(head)]
    m = make_mixture(list(zip(sorted(locs), weights)))
    ys = np.linspace(-6.0, 6.0, 101)
    F = cdf(m, ys)
    assert (np.diff(F) >= 0).all()
    assert F[0] == 0.0 and F[-1] == pytest.approx(1.0, abs=1e-12)


# --- weak* gap ---------------------------------------------------------------

def test_gap_hand_value():
    a = make_mixture([(0.0, 1.0)])
    b = make_mixture([(1.0, 1.0)])
    K = interval(0.0, 1.0)
    assert weakstar_gap(a, b, monomial_suite(K)) == pytest.approx(1.0, abs=1e-15)
    assert weakstar_gap(a, a, monomial_suite(K)) == 0.0


def test_gap_is_symmetric_and_triangular():
    K = interval(0.0, 2.0)
    suite = default_suite(K)
    a = make_mixture([(0.1, 0.5), (1.9, 0.5)])
    b = make_mixture([(0.3, 0.25), (1.0, 0.75)])
    c = make_mixture([(0.5, 1.0)])
    assert weakstar_gap(a, b, suite) == weakstar_gap(b, a, suite)
    assert weakstar_gap(a, c, suite) <= weakstar_gap(a, b, suite) + weakstar_gap(b, c, suite) + 1e-15


def test_gap_mixed_representations():
    # same distribution through two representations: gap stays small
    f, _ = builtin_function("identity")
    table = pushforward_density(f, density_grid(f, 2048))
    e = empirical_measure(f, 200_000, DEFAULT_SEED)
    gap = weakstar_gap(table, e, default_suite(interval(0.0, 1.0)))
    assert gap < 0.01


def test_gap_needs_probes():
    a = make_mixture([(0.0, 1.0)])
    with pytest.raises(SpecError):
        weakstar_gap(a, a, ())


# --- suites ------------------------------------------------------------------

def test_default_suite_contents():
    K = interval(0.0, 1.0)
    suite = default_suite(K)
    assert len(suite) == 10
    names = [t.name for t in suite]
    assert names[0] == "1" and names[1] == "s" and names[6] == "s^6"
    assert "sin(pi*s)" in names and "cos(pi*s)" in names
    # monomial Lipschitz bounds on [0,1]: k·1^(k-1) = k
    assert [t.lipschitz_bound for t in suite[:7]] == [0.0, 1, 2, 3, 4, 5, 6]
    trig = [t for t in suite if "sin" in t.name or "cos" in t.name]
    assert all(t.lipschitz_bound == pytest.approx(math.pi) for t in trig)


def test_monomial_bounds_scale_with_reach():
    suite = monomial_suite(interval(-2.0, 1.0))  # reach = 2
    assert suite[3].lipschitz_bound == 3 * 2**2  # derivative bound of s^3


def test_trig_suite_contents():
    suite = trig_suite(interval(0.0, 1.0))
    assert len(suite) == 7
    assert {t.name for t in suite} == {
        "1", "sin(pi*s)", "cos(pi*s)", "sin(2*pi*s)", "cos(2*pi*s)",
        "sin(3*pi*s)", "cos(3*pi*s)",
    }


def test_suite_by_name():
    K = interval(0.0, 1.0)
    assert SUITE_NAMES == ("default", "monomial", "trig")
    for name in SUITE_NAMES:
        assert len(suite_by_name(name, K)) >= 7
    with pytest.raises(SpecError):
        suite_by_name("fourier", K)


def test_suites_reject_boxes_where_probes_fail():
    t = TestFunction(beta=probe("log(s)").beta)
    with pytest.raises(SpecError):
        check_probe(t, interval(-1.0, 1.0))
