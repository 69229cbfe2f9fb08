import math
from fractions import Fraction

import numpy as np
import pytest

from youngmeasure.analytic import (
    DensityTable,
    DiracMixture,
    builtin_function,
    density_grid,
    harmonic_staircase,
    invert_piece,
    jacobian_inverse_magnitude,
    make_mixture,
    piece_image_1d,
    pushforward_density,
    pushforward_probability,
    simple_young_measure,
)
from youngmeasure.domain import Box, Domain, Piece, PiecewiseFunction, interval, validate_partition
from youngmeasure.errors import (
    DerivativeTooSmallError,
    NonInvertibleError,
    NonzeroTailError,
    NotSimpleError,
    SpecError,
)
from youngmeasure.expressions import parse


def piece_1d(lo, hi, text, inverse=None, jacobian=None, monotone=False):
    return Piece(
        box=interval(lo, hi),
        forward=(parse(text, ("x", "x1")),),
        inverse=(parse(inverse, ("y", "y1")),) if inverse else None,
        jacobian_inverse=parse(jacobian, ("y", "y1")) if jacobian else None,
        monotone=monotone,
    )


def fn_1d(pieces, domain=(0.0, 1.0), codomain=(0.0, 1.0), tail=0.0):
    return PiecewiseFunction(
        domain=Domain((interval(*domain),)),
        pieces=tuple(pieces),
        codomain=interval(*codomain),
        tail_mass=tail,
    )


# -- independent oracles -----------------------------------------------------

def staircase_density_oracle(y: float, N: int) -> float:
    """Density of the truncated staircase by direct cell lookup."""
    if not 0.0 < y < 1.0:
        return 0.0
    m = 2
    while m < N and y < 1.0 / m:  # find the cell [1/m, 1/(m-1)) containing y
        m += 1
    return math.fsum(1.0 / j for j in range(2, m + 1))


def staircase_prob_oracle(a: float, b: float, N: int) -> float:
    """P(a <= f(U) <= b) for the truncated staircase, exact via Fractions."""
    a, b = Fraction(a), Fraction(b)
    total = Fraction(0)
    for n in range(2, N + 1):
        lo, hi = Fraction(1, n), Fraction(1, n - 1)
        xa = min(max((a + 1) / n, lo), hi)
        xb = min(max((b + 1) / n, lo), hi)
        total += xb - xa
    return float(total)


class TestDiracMixture:
    def test_two_constant_pieces(self):
        f = fn_1d([piece_1d(0.0, 0.5, "2"), piece_1d(0.5, 1.0, "5")], codomain=(0.0, 6.0))
        nu = simple_young_measure(f)
        assert nu.atoms == ((2.0, 0.5), (5.0, 0.5))

    def test_single_constant_is_point_mass(self):
        f = fn_1d([piece_1d(0.0, 1.0, "7")], codomain=(0.0, 10.0))
        assert simple_young_measure(f).atoms == ((7.0, 1.0),)

    def test_duplicate_locations_merge(self):
        f = fn_1d(
            [piece_1d(0.0, 1 / 3, "3"), piece_1d(1 / 3, 1.0, "3")], codomain=(0.0, 4.0)
        )
        assert simple_young_measure(f).atoms == ((3.0, 1.0),)

    def test_weights_are_normalized_piece_measures(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            cuts = np.sort(rng.uniform(0.05, 0.95, size=rng.integers(1, 8)))
            edges = np.concatenate([[0.0], cuts, [1.0]])
            vals = rng.integers(0, 5, size=len(edges) - 1)
            pieces = [
                piece_1d(a, b, str(v))
                for a, b, v in zip(edges[:-1], edges[1:], vals)
            ]
            nu = simple_young_measure(fn_1d(pieces, codomain=(-1.0, 6.0)))
            expected = {}
            for a, b, v in zip(edges[:-1], edges[1:], vals):
                expected[float(v)] = expected.get(float(v), 0.0) + (b - a)
            for p, w in nu.atoms:
                assert abs(w - expected[p]) <= 1e-12
            assert abs(math.fsum(nu.weights) - 1.0) <= 1e-12

    def test_2d_domain_weights_by_area(self):
        dom = Domain((Box((0.0, 0.0), (1.0, 1.0)),))
        left = Piece(box=Box((0.0, 0.0), (0.25, 1.0)), forward=(parse("1", ("x1", "x2")),))
        right = Piece(box=Box((0.25, 0.0), (1.0, 1.0)), forward=(parse("4", ("x1", "x2")),))
        f = PiecewiseFunction(dom, (left, right), interval(0.0, 5.0))
        nu = simple_young_measure(f)
        assert nu.atoms == ((1.0, 0.25), (4.0, 0.75))

    def test_rejects_non_constant(self):
        f = fn_1d([piece_1d(0.0, 1.0, "x")])
        with pytest.raises(NotSimpleError):
            simple_young_measure(f)

    def test_rejects_nonzero_tail(self):
        f = fn_1d([piece_1d(0.5, 1.0, "2")], codomain=(0.0, 3.0), tail=0.5)
        with pytest.raises(NonzeroTailError):
            simple_young_measure(f)

    def test_constructor_guards(self):
        with pytest.raises(SpecError):
            DiracMixture(atoms=((1.0, 0.5), (0.0, 0.5)))  # unsorted
        with pytest.raises(SpecError):
            DiracMixture(atoms=((0.0, 0.5), (0.0, 0.5)))  # duplicates unmerged
        with pytest.raises(SpecError):
            DiracMixture(atoms=((0.0, 0.3),))  # mass deficit
        assert make_mixture([(1.0, 0.25), (1.0, 0.25), (0.0, 0.5)]).atoms == (
            (0.0, 0.5),
            (1.0, 0.5),
        )


class TestInvertPiece:
    def test_supplied_inverse(self):
        p = piece_1d(0.5, 1.0, "2*x-1", inverse="(y+1)/2")
        assert invert_piece(p, 0.5) == 0.75

    def test_bisection_matches_algebra(self):
        p = piece_1d(0.5, 1.0, "2*x-1", monotone=True)
        x = invert_piece(p, 0.5)
        assert abs(x - 0.75) <= 1e-12 * 1.5

    def test_identity(self):
        p = piece_1d(0.0, 1.0, "x", monotone=True)
        assert invert_piece(p, 0.3) == pytest.approx(0.3, abs=2e-12)

    def test_outside_image_is_none(self):
        p = piece_1d(0.0, 1.0, "x^2", monotone=True)
        assert invert_piece(p, 2.0) is None

    def test_decreasing_piece(self):
        p = piece_1d(0.0, 1.0, "1-x", monotone=True)
        assert invert_piece(p, 0.25) == pytest.approx(0.75, abs=2e-12)

    def test_constant_piece_has_no_preimage_interval(self):
        assert invert_piece(piece_1d(0.0, 1.0, "2"), 2.0) is None

    def test_unmarked_piece_rejected(self):
        p = piece_1d(0.0, 1.0, "x^2")
        with pytest.raises(NonInvertibleError):
            invert_piece(p, 0.25)

    def test_image_endpoints(self):
        assert piece_image_1d(piece_1d(0.5, 1.0, "2*x-1")) == (0.0, 1.0)
        assert piece_image_1d(piece_1d(0.0, 1.0, "1-x")) == (0.0, 1.0)


class TestJacobian:
    def test_supplied_expression(self):
        p = piece_1d(1 / 3, 0.5, "3*x-1", jacobian="1/3")
        assert jacobian_inverse_magnitude(p, 0.2) == 1 / 3

    def test_finite_difference_identity(self):
        p = piece_1d(0.0, 1.0, "x", monotone=True)
        assert jacobian_inverse_magnitude(p, 0.3) == pytest.approx(1.0, rel=1e-9)

    def test_finite_difference_square(self):
        # 1/|f'(sqrt(y))| = 1/(2*sqrt(y)); central difference is exact for
        # quadratics so only roundoff remains
        p = piece_1d(0.0, 1.0, "x^2", monotone=True)
        assert jacobian_inverse_magnitude(p, 0.25) == pytest.approx(1.0, rel=1e-9)

    def test_critical_point_raises(self):
        p = piece_1d(-1.0, 1.0, "x^3", monotone=True)
        with pytest.raises(DerivativeTooSmallError):
            jacobian_inverse_magnitude(p, 0.0, piece_index=3)


class TestHarmonicStaircase:
    def test_n2_shape(self):
        f, ref = harmonic_staircase(2)
        assert len(f.pieces) == 1
        assert f.pieces[0].box == interval(0.5, 1.0)
        assert f.tail_mass == 0.5
        assert float(f.pieces[0](0.75)) == 0.5

    def test_covered_mass_telescopes(self):
        f, _ = harmonic_staircase(64)
        telescoped = math.fsum(1.0 / (n - 1) - 1.0 / n for n in range(2, 65))
        assert abs(telescoped - (1.0 - 1.0 / 64)) <= 1e-15
        assert abs(f.covered_mass - telescoped) <= 1e-12

    def test_partition_is_clean(self):
        f, _ = harmonic_staircase(64)
        assert validate_partition(f).ok

    def test_reference_density_spot_values(self):
        _, ref = harmonic_staircase(64)
        assert abs(ref(0.7) - 0.5) <= 1e-15
        assert abs(ref(0.4) - 5 / 6) <= 1e-15
        assert abs(ref(0.3) - 13 / 12) <= 1e-15
        assert ref(0.0) == 0.0
        assert ref(1.0) == 0.0

    def test_reference_matches_oracle_everywhere(self):
        _, ref = harmonic_staircase(64)
        rng = np.random.default_rng(11)
        ys = rng.uniform(0.0, 1.0, size=500)
        for y in ys:
            assert abs(ref(float(y)) - staircase_density_oracle(float(y), 64)) <= 1e-12

    def test_reference_cdf(self):
        _, ref = harmonic_staircase(64)
        assert ref.cdf(0.0) == pytest.approx(0.0, abs=1e-15)
        assert ref.cdf(1.0) == pytest.approx(1.0 - 1.0 / 64, abs=1e-12)
        ys = np.linspace(-0.1, 1.1, 400)
        F = ref.cdf(ys)
        assert (np.diff(F) >= -1e-15).all()

    def test_cdf_matches_fraction_oracle(self):
        _, ref = harmonic_staircase(64)
        for y in (0.1, 0.25, 0.4, 0.63, 0.9):
            assert ref.cdf(y) == pytest.approx(staircase_prob_oracle(0.0, y, 64), abs=1e-12)

    def test_small_n_rejected(self):
        with pytest.raises(SpecError):
            harmonic_staircase(1)


class TestPushforwardDensity:
    def test_identity_density_is_one(self):
        f, _ = builtin_function("identity")
        grid = np.linspace(0.0, 1.0, 257)
        table = pushforward_density(f, grid)
        inner = (grid > 0) & (grid < 1)
        np.testing.assert_allclose(table.values[inner], 1.0, rtol=0, atol=1e-15)
        assert table.contributing_counts[inner].max() == 1
        # a plain uniform grid misses the edge jumps; the breakpoint-aware
        # grid resolves them and restores the unit mass
        resolved = pushforward_density(f, density_grid(f, 256))
        assert abs(resolved.mass() - 1.0) <= 1e-6

    def test_harmonic_golden_values(self):
        f, _ = harmonic_staircase(64)
        grid = np.unique(np.concatenate([density_grid(f, 512), [0.7, 0.4, 0.3]]))
        table = pushforward_density(f, grid)
        lookup = dict(zip(table.grid, table.values))
        assert abs(lookup[0.7] - 0.5) <= 1e-12
        assert abs(lookup[0.4] - 5 / 6) <= 1e-12
        assert abs(lookup[0.3] - 13 / 12) <= 1e-12

    def test_harmonic_table_matches_oracle(self):
        f, _ = harmonic_staircase(64)
        table = pushforward_density(f, density_grid(f, 1024))
        expected = np.array([staircase_density_oracle(float(y), 64) for y in table.grid])
        np.testing.assert_allclose(table.values, expected, rtol=0, atol=1e-12)

    def test_harmonic_counts_nonincreasing_inside(self):
        f, _ = harmonic_staircase(64)
        table = pushforward_density(f, density_grid(f, 1024))
        inner = (table.grid > 0) & (table.grid < 1)
        assert (np.diff(table.contributing_counts[inner]) <= 0).all()

    def test_harmonic_normalization(self):
        f, _ = harmonic_staircase(64)
        table = pushforward_density(f, density_grid(f, 4096))
        mass = table.mass()
        assert 1.0 - table.tail_bound - 1e-6 <= mass <= 1.0 + 1e-6
        assert 1.0 - table.tail_bound - table.q_tol <= mass <= 1.0 + table.q_tol

    def test_square_density(self):
        f, ref = builtin_function("square")
        grid = (np.arange(1, 200) / 200.0) ** 2  # graded toward the singular end
        table = pushforward_density(f, grid)
        np.testing.assert_allclose(table.values, 0.5 / np.sqrt(grid), rtol=1e-12)

    def test_bisection_path_matches_formula_path(self):
        with_inverse, _ = harmonic_staircase(8)
        stripped = PiecewiseFunction(
            domain=with_inverse.domain,
            pieces=tuple(
                Piece(box=p.box, forward=p.forward, monotone=True)
                for p in with_inverse.pieces
            ),
            codomain=with_inverse.codomain,
            tail_mass=with_inverse.tail_mass,
        )
        grid = density_grid(with_inverse, 256)
        a = pushforward_density(with_inverse, grid)
        b = pushforward_density(stripped, grid)
        np.testing.assert_allclose(b.values, a.values, rtol=0, atol=1e-9)
        assert (a.contributing_counts == b.contributing_counts).all()

    def test_constant_piece_rejected(self):
        f = fn_1d([piece_1d(0.0, 1.0, "2")], codomain=(0.0, 3.0))
        with pytest.raises(SpecError):
            pushforward_density(f, np.linspace(0.0, 3.0, 16))

    def test_unmarked_piece_rejected(self):
        f = fn_1d([piece_1d(0.0, 1.0, "x^2")])
        with pytest.raises(NonInvertibleError):
            pushforward_density(f, np.linspace(0.0, 1.0, 16))

    def test_bad_grids_rejected(self):
        f, _ = builtin_function("identity")
        with pytest.raises(SpecError):
            pushforward_density(f, np.array([0.5, 0.5, 0.6]))
        with pytest.raises(SpecError):
            pushforward_density(f, np.array([-0.5, 0.5]))


class TestDensityGrid:
    def test_straddles_breakpoints(self):
        f, ref = harmonic_staircase(64)
        grid = density_grid(f, 4096)
        assert (np.diff(grid) > 0).all()
        assert grid[0] == 0.0 and grid[-1] == 1.0
        interior = [b for b in ref.breakpoints if 0.0 < b < 1.0]
        for b in interior:
            assert ((grid > b - 2e-9) & (grid < b)).any()
            assert ((grid < b + 2e-9) & (grid > b)).any()

    def test_avoids_breakpoints_exactly(self):
        f, ref = harmonic_staircase(64)
        grid = density_grid(f, 4096)
        interior = np.array([b for b in ref.breakpoints if 0.0 < b < 1.0])
        assert np.intersect1d(grid, interior).size == 0


class TestPushforwardProbability:
    def test_constant_all_or_nothing(self):
        f = fn_1d([piece_1d(0.0, 1.0, "2")], codomain=(0.0, 3.0))
        assert pushforward_probability(f, [(1.5, 2.5)]).value == 1.0
        assert pushforward_probability(f, [(2.5, 3.0)]).value == 0.0

    def test_identity_interval(self):
        f, _ = builtin_function("identity")
        assert pushforward_probability(f, [(0.0, 0.5)]).value == pytest.approx(0.5, abs=1e-12)

    def test_union_and_merge(self):
        f, _ = builtin_function("identity")
        r = pushforward_probability(f, [(0.0, 0.25), (0.75, 1.0)])
        assert r.value == pytest.approx(0.5, abs=1e-12)
        r = pushforward_probability(f, [(0.0, 0.5), (0.25, 0.75)])
        assert r.value == pytest.approx(0.75, abs=1e-12)

    def test_harmonic_against_fraction_oracle(self):
        f, _ = harmonic_staircase(64)
        for a, b in [(0.5, 1.0), (0.3, 0.7), (0.0, 1.0), (0.05, 0.1)]:
            r = pushforward_probability(f, [(a, b)])
            assert r.value == pytest.approx(staircase_prob_oracle(a, b, 64), abs=1e-12)
        assert pushforward_probability(f, [(0.0, 1.0)]).tail_bound == 1.0 / 64

    def test_square_uses_bisection(self):
        f = fn_1d([piece_1d(0.0, 1.0, "x^2", monotone=True)])
        # P(x^2 <= 1/4) = P(x <= 1/2) = 1/2
        assert pushforward_probability(f, [(0.0, 0.25)]).value == pytest.approx(0.5, abs=1e-10)


class TestDensityTableGuards:
    def test_negative_values_rejected(self):
        with pytest.raises(Exception):
            DensityTable(
                grid=np.array([0.0, 1.0]),
                values=np.array([-1.0, 0.0]),
                contributing_counts=np.array([1, 1]),
                tail_bound=0.0,
                domain_measure=1.0,
                q_tol=0.0,
            )

    def test_builtins(self):
        for name in ("harmonic", "identity", "square"):
            f, ref = builtin_function(name)
            assert validate_partition(f).ok
        with pytest.raises(SpecError):
            builtin_function("garbage")
