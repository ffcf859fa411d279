"""Dual-module solenoid tests: chains, windows, lifting, expansiveness."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expansive.exact import QMatrix
from expansive.orbits import EXPANSIVE, NOT_EXPANSIVE
from expansive.spectral import GROUP, SEMIGROUP
from expansive.solenoid import (
    Ball,
    DualModuleAction,
    HomVector,
    KExceededError,
    LiftOutOfRangeError,
    NotInSpanError,
    PrecisionExhaustedError,
    RhoBasisChain,
    E_window,
    character,
    circle_gap,
    d_A,
    d_star_A,
    enumerate_basis,
    lift,
    regular_chain,
    solenoid_expansive,
    span_restriction,
)


def F(x):
    return Fraction(x)


def M(rows):
    return QMatrix.from_rows([[F(x) for x in r] for r in rows])


def dyadic_module():
    return DualModuleAction.from_generators(1, [[1]], [("g", M([[2]]))], GROUP)


def sixth_module():
    return DualModuleAction.from_generators(1, [[1]], [("t", M([[2]])), ("u", M([[3]]))], GROUP)


def cat_module():
    return DualModuleAction.from_generators(
        2, [[1, 0], [0, 1]], [("a", M([[2, 1], [1, 1]]))], GROUP
    )


def fixed_module():
    return DualModuleAction.from_generators(1, [[1]], [("g", M([[1]]))], GROUP)


class TestBallArithmetic:
    def test_quantization_covers_the_input(self):
        b = Ball.quantized(F("1/10"), precision=10)
        assert abs(b.mid - F("1/10")) <= b.rad
        assert b.mid.denominator <= 2**10

    def test_unique_integer_detection(self):
        assert Ball(F("3/10"), F("2/5")).unique_integer() == 0
        assert Ball(F("3/10"), F("1/5")).unique_integer() is None
        assert Ball(F("9/10"), F("1/5")).unique_integer() == 1
        with pytest.raises(PrecisionExhaustedError):
            Ball(F("1/2"), F("1/2")).unique_integer()

    def test_centered_representative(self):
        assert Ball(F("3/4"), 0).centered().mid == F("-1/4")
        assert Ball(F("1/2"), 0).centered().mid == F("1/2")
        assert Ball(F("13/4"), 0).centered().mid == F("1/4")

    def test_circle_gap_examples(self):
        assert circle_gap(Ball(F("2/5"), 0)).mid == F("2/5")
        assert circle_gap(Ball(F("3/4"), 0)).mid == F("1/4")


class TestEnumerateBasis:
    def test_dyadic_powers(self):
        levels = enumerate_basis(dyadic_module(), 3)
        assert set(levels[0]) == {(F(1),), (F(2),), (F("1/2"),)}
        assert set(levels[2]) == {(F(2) ** j,) for j in range(-3, 4)}
        assert set(levels[0]) <= set(levels[1]) <= set(levels[2])

    def test_cat_first_level(self):
        levels = enumerate_basis(cat_module(), 1)
        expected = {
            (F(1), F(0)),
            (F(0), F(1)),
            (F(2), F(1)),
            (F(1), F(1)),
            (F(1), F(-1)),
            (F(-1), F(2)),
        }
        assert set(levels[0]) == expected

    def test_fixed_point_never_grows(self):
        levels = enumerate_basis(fixed_module(), 5)
        assert all(set(level) == {(F(1),)} for level in levels)


class TestRegularChain:
    def test_dyadic_relations_cost_three(self):
        chain = regular_chain(enumerate_basis(dyadic_module(), 3))
        assert chain.k == 3
        assert chain.verify()
        by_target = {r.target: r for r in chain.relations}
        up = by_target[(F(4),)]
        assert up.n0 == 1 and up.terms == ((2, (F(2),)),)
        down = by_target[(F("1/4"),)]
        assert down.n0 == 2 and down.terms == ((1, (F("1/2"),)),)

    def test_sixth_chain_minimal_cost_is_four(self):
        # the first character at 3-adic depth 2 (here 1/9) forces 3 | n0:
        # every previous-level character has valuation >= -1, so the
        # ultrametric bound leaves no relation cheaper than 3*(1/9) = 1*(1/3)
        chain = regular_chain(enumerate_basis(sixth_module(), 2))
        assert chain.k == 4
        assert chain.verify()
        by_target = {r.target: r for r in chain.relations}
        assert by_target[(F("1/9"),)].cost == 4

    def test_integer_lattice_unit_n0(self):
        dm = cat_module()
        levels = [dm.module_generators, enumerate_basis(dm, 1)[0]]
        chain = regular_chain(levels)
        assert all(r.n0 == 1 for r in chain.relations)
        assert chain.k == 4  # 1 + |(2, 1)|_1 at the widest image

    def test_not_in_span(self):
        levels = [
            (character([1, 0]),),
            (character([1, 0]), character([0, 1])),
        ]
        with pytest.raises(NotInSpanError):
            regular_chain(levels)

    def test_k_cap(self):
        with pytest.raises(KExceededError):
            regular_chain(enumerate_basis(dyadic_module(), 3), k_max=2)

    def test_tampered_relation_fails_verification(self):
        chain = regular_chain(enumerate_basis(dyadic_module(), 2))
        bad = tuple(
            type(r)(r.target, r.n0 + 1, r.terms, r.level) for r in chain.relations
        )
        assert not RhoBasisChain(chain.levels, chain.k, bad).verify()

    def test_json_shape(self):
        chain = regular_chain(enumerate_basis(dyadic_module(), 2))
        blob = chain.to_json()
        assert blob["k"] == 3
        assert blob["relations"][0].keys() == {"target", "n0", "terms"}


class TestWindows:
    def test_evaluation_angles(self):
        p = HomVector.from_exact([F("1/10")])
        w = E_window(p, [(F(1),), (F(2),), (F(4),)])
        assert [b.mid for _, b in w.values] == [F("1/10"), F("1/5"), F("2/5")]

    def test_zero_functional_gives_identity_window(self):
        w = E_window(HomVector.zero(1), [(F(1),), (F(8),)])
        assert all(b.mid == 0 and b.rad == 0 for _, b in w.values)

    def test_large_character_scales_the_angle(self):
        p = HomVector.from_exact([F("1/1000")])
        w = E_window(p, [(F(32),)])
        assert w.angle((F(32),)).mid == F("4/125")

    def test_window_homomorphism(self):
        chars = [(F(1),), (F(2),), (F(4),)]
        p = HomVector.from_exact([F("3/10")])
        q = HomVector.from_exact([F("9/20")])
        left = E_window(p + q, chars)
        right = E_window(p, chars).combine(E_window(q, chars))
        for chi in chars:
            assert left.angle(chi).mid == right.angle(chi).mid

    def test_equivariance_through_pullback(self):
        dm = cat_module()
        g = dm.action.mats[0]
        chars = list(enumerate_basis(dm, 1)[0])
        p = HomVector.from_exact([F("1/7"), F("2/7")])
        moved = E_window(p.pullback(g), chars)
        still = E_window(p, [tuple(g.apply(c)) for c in chars])
        for chi, (_, b) in zip(chars, still.values):
            assert moved.angle(chi).mid == b.mid


class TestMetrics:
    def test_d_star_peaks_at_the_largest_character(self):
        chars = [(F(2) ** j,) for j in range(0, 6)]
        p = HomVector.from_exact([F("1/100")])
        d = d_star_A(HomVector.zero(1), p, chars)
        assert d.mid == F("32/100") and d.rad == 0

    def test_d_A_self_distance_zero(self):
        chars = [(F(1),), (F(2),)]
        w = E_window(HomVector.from_exact([F("1/3")]), chars)
        d = d_A(w, w, chars)
        assert d.mid == 0 and d.rad == 0

    def test_d_star_rational_homogeneity(self):
        chars = [(F(1),), (F(3),)]
        p = HomVector.from_exact([F("2/7")])
        base = d_star_A(HomVector.zero(1), p, chars).mid
        for c in (F(2), F("1/3"), F(-5)):
            scaled = d_star_A(HomVector.zero(1), p.scale(c), chars).mid
            assert scaled == abs(c) * base

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.fractions(min_value=0, max_value=1), min_size=3, max_size=3),
        st.lists(st.fractions(min_value=0, max_value=1), min_size=3, max_size=3),
        st.lists(st.fractions(min_value=0, max_value=1), min_size=3, max_size=3),
    )
    def test_d_A_metric_axioms(self, xs, ys, zs):
        chars = [(F(1),), (F(2),), (F(3),)]
        wx = _window(chars, xs)
        wy = _window(chars, ys)
        wz = _window(chars, zs)
        assert d_A(wx, wy, chars).mid == d_A(wy, wx, chars).mid
        assert d_A(wx, wz, chars).mid <= d_A(wx, wy, chars).mid + d_A(wy, wz, chars).mid


def _window(chars, angles):
    from expansive.solenoid import SolenoidWindow

    return SolenoidWindow(tuple((c, Ball(F(a) % 1, F(0))) for c, a in zip(chars, angles)))


class TestLift:
    def test_exact_roundtrip(self):
        chain = regular_chain(enumerate_basis(dyadic_module(), 5))
        p = HomVector.from_exact([F("1/1000")])
        got = lift(E_window(p, chain.levels[-1]), chain, F("3/10"))
        for chi in chain.levels[-1]:
            assert got.value(chi).mid == p.pair(chi).mid
            assert abs(got.value(chi).mid) < F("3/10")

    def test_quantized_roundtrip_within_radius(self):
        chain = regular_chain(enumerate_basis(dyadic_module(), 5))
        p = HomVector.from_rationals([F("1/1000")])
        window = E_window(p, chain.levels[-1])
        got = lift(window, chain, F("3/10"))
        for chi in chain.levels[-1]:
            truth = F("1/1000") * chi[0]
            b = got.value(chi)
            assert abs(b.mid - truth) <= 4 * b.rad + b.rad

    def test_identity_window_lifts_to_zero(self):
        chain = regular_chain(enumerate_basis(dyadic_module(), 4))
        got = lift(E_window(HomVector.zero(1), chain.levels[-1]), chain, F("1/4"))
        assert all(b.mid == 0 for _, b in got.values)

    def test_out_of_range_at_the_top(self):
        chain = regular_chain(enumerate_basis(dyadic_module(), 5))
        p = HomVector.from_exact([F("1/50")])
        with pytest.raises(LiftOutOfRangeError):
            lift(E_window(p, chain.levels[-1]), chain, F("3/10"))

    def test_bound_validation(self):
        chain = regular_chain(enumerate_basis(dyadic_module(), 3))
        w = E_window(HomVector.zero(1), chain.levels[-1])
        with pytest.raises(ValueError):
            lift(w, chain, F("1/2"))
        with pytest.raises(ValueError):
            lift(w, chain, 0)

    def test_precision_exhaustion_is_reported(self):
        chain = regular_chain(enumerate_basis(dyadic_module(), 3))
        fuzzy = HomVector(coords=(Ball(F("1/10"), F("2/5")),))
        with pytest.raises((PrecisionExhaustedError, LiftOutOfRangeError)):
            lift(E_window(fuzzy, chain.levels[-1]), chain, F("3/10"))

    def test_deterministic_uniqueness(self):
        chain = regular_chain(enumerate_basis(dyadic_module(), 5))
        window = E_window(HomVector.from_rationals([F("1/2048")]), chain.levels[-1])
        a = lift(window, chain, F("3/10"))
        b = lift(window, chain, F("3/10"))
        assert a == b

    def test_two_generator_chain_lift(self):
        chain = regular_chain(enumerate_basis(sixth_module(), 2))
        p = HomVector.from_exact([F("1/2000")])
        got = lift(E_window(p, chain.levels[-1]), chain, F("1/5"))
        for chi in chain.levels[-1]:
            assert got.value(chi).mid == p.pair(chi).mid


class TestSolenoidExpansiveness:
    def test_dyadic_solenoid_expansive(self):
        v = solenoid_expansive(dyadic_module())
        assert v.status == EXPANSIVE
        assert v.evidence["span_dim"] == 1
        assert v.evidence["finitely_generated"] == "by presentation"

    def test_identity_dual_not_expansive(self):
        v = solenoid_expansive(fixed_module())
        assert v.status == NOT_EXPANSIVE
        assert v.witness is not None and any(c != 0 for c in v.witness)

    def test_cat_solenoid_expansive(self):
        assert solenoid_expansive(cat_module()).status == EXPANSIVE

    def test_restriction_to_an_embedded_line(self):
        dm = DualModuleAction.from_generators(
            2, [[1, 0]], [("g", M([[2, 0], [0, 3]]))], GROUP
        )
        basis, adjoint = span_restriction(dm)
        assert len(basis) == 1
        assert adjoint.dim == 1
        assert solenoid_expansive(dm).status == EXPANSIVE
        assert solenoid_expansive(dm).evidence["span_dim"] == 1

    def test_bounded_witness_fits_in_any_ball(self):
        dm = DualModuleAction.from_generators(
            2, [[1, 0], [0, 1]], [("r", M([[0, -1], [1, 0]]))], GROUP
        )
        v = solenoid_expansive(dm)
        assert v.status == NOT_EXPANSIVE
        chars = enumerate_basis(dm, 4)[-1]
        p = HomVector.from_exact(v.witness)
        sup = d_star_A(HomVector.zero(2), p, chars).mid
        assert sup > 0
        for C in (F("1/4"), F("1/64")):
            scaled = p.scale(C / (2 * sup))
            assert d_star_A(HomVector.zero(2), scaled, chars).mid <= C
