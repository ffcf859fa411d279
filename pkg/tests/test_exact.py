"""Tests for the exact rational linear algebra and polynomial layer."""

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from expansive.exact import (
    DimensionMismatchError,
    NotInvertibleError,
    ParseError,
    QMatrix,
    QPoly,
    Subspace,
    ZeroConstantTermError,
    ZeroPolynomialError,
    cauchy_index,
    char_poly,
    coordinates_in_span,
    intersect,
    is_invariant,
    kernel,
    mat_power,
    minimal_poly,
    poly_gcd,
    poly_of_matrix,
    rank,
    rational_roots,
    reciprocal_split,
    root_multiplicity,
    rref,
    solve_exact,
    squarefree_part,
    sturm_count_real_roots,
    sturm_root_count,
    to_fraction,
)

F = Fraction


def M(rows):
    return QMatrix.from_rows([[F(x) for x in r] for r in rows])


def P(*coeffs):
    return QPoly.from_coeffs([F(c) for c in coeffs])


# ---------------------------------------------------------------- scalars


def test_to_fraction_accepts_strings_and_ints():
    assert to_fraction("3/4") == F(3, 4)
    assert to_fraction("-7") == F(-7)
    assert to_fraction(5) == F(5)


def test_to_fraction_rejects_floats():
    with pytest.raises(ParseError):
        to_fraction(0.5)


# ---------------------------------------------------------------- matrices


def test_matrix_arithmetic_round_trip():
    a = M([[1, 2], [3, 4]])
    b = M([[0, 1], [1, 0]])
    assert (a + b) - b == a
    assert a @ b == M([[2, 1], [4, 3]])
    assert a.transpose() == M([[1, 3], [2, 4]])
    assert a.trace() == F(5)
    assert a.det() == F(-2)


def test_matrix_shape_mismatch_raises():
    with pytest.raises(DimensionMismatchError):
        M([[1, 2]]) @ M([[1, 2]])


def test_inverse_and_negative_powers():
    a = M([[2, 1], [1, 1]])
    assert a @ a.inverse() == QMatrix.identity(2)
    assert mat_power(a, -2) == (a.inverse()) @ (a.inverse())
    assert mat_power(a, 0) == QMatrix.identity(2)
    with pytest.raises(NotInvertibleError):
        M([[1, 1], [1, 1]]).inverse()


def test_matrix_json_round_trip():
    a = QMatrix.from_rows([[F(1, 3), F(-2)], [F(0), F(5, 7)]])
    assert QMatrix.from_json(a.to_json()) == a


# ------------------------------------------------------- row reduction


def test_rref_pivots_and_rank():
    a = M([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    r, pivots = rref(a)
    assert pivots == (0, 1)
    assert rank(a) == 2


def test_kernel_basis_is_exact():
    a = M([[1, 2], [2, 4]])
    k = kernel(a)
    assert k.dim == 1
    v = k.basis[0]
    assert a.apply(v) == (F(0), F(0))


def test_subspace_canonical_equality():
    s1 = Subspace.from_vectors(2, [(F(2), F(0)), (F(0), F(3))])
    s2 = Subspace.full(2)
    assert s1 == s2
    s3 = Subspace.from_vectors(2, [(F(1), F(1)), (F(2), F(2))])
    assert s3.dim == 1
    assert s3.contains((F(-3), F(-3)))
    assert not s3.contains((F(1), F(0)))


def test_intersect_subspaces():
    x_axis = Subspace.from_vectors(2, [(F(1), F(0))])
    diag = Subspace.from_vectors(2, [(F(1), F(1))])
    assert intersect(x_axis, diag) == Subspace.zero(2)
    assert intersect(x_axis, Subspace.full(2)) == x_axis


def test_invariance_checks():
    rot = M([[0, -1], [1, 0]])
    x_axis = Subspace.from_vectors(2, [(F(1), F(0))])
    assert is_invariant(Subspace.zero(2), rot)
    assert is_invariant(Subspace.full(2), rot)
    assert not is_invariant(x_axis, rot)
    shear = M([[1, 1], [0, 1]])
    assert is_invariant(x_axis, shear)


def test_solve_exact_and_coordinates():
    a = M([[1, 1], [0, 1]])
    assert solve_exact(a, (F(3), F(2))) == (F(1), F(2))
    assert solve_exact(M([[1, 0], [1, 0]]), (F(1), F(2))) is None
    basis = [(F(1), F(0), F(1)), (F(0), F(1), F(0))]
    assert coordinates_in_span(basis, (F(2), F(3), F(2))) == (F(2), F(3))
    assert coordinates_in_span(basis, (F(0), F(0), F(1))) is None


# ---------------------------------------------------------- polynomials


def test_poly_arithmetic():
    assert P(-1, 1) * P(1, 1) == P(-1, 0, 1)
    q, r = P(-1, 0, 1).divmod(P(-1, 1))
    assert q == P(1, 1) and r.is_zero
    with pytest.raises(ValueError):
        P(1, 0, 1).exact_div(P(-1, 1))
    assert P(1, 2, 3).derivative() == P(2, 6)
    assert P(1, 2, 3)(F(2)) == F(17)


def test_poly_reverse_and_compose():
    p = P(2, 0, 1)
    assert p.reverse() == P(1, 0, 2)
    assert p.reverse().reverse() == p
    assert P(0, 1, 1).compose(P(0, 2)) == P(0, 2, 4)
    assert P(1, 1, 1).shift_scale_arg(F(2)) == P(1, 2, 4)
    with pytest.raises(ZeroPolynomialError):
        QPoly.zero().reverse()


def test_char_poly_known_matrices():
    assert char_poly(M([[2, 1], [1, 1]])) == P(1, -3, 1)
    assert char_poly(QMatrix.identity(2)) == P(1, -2, 1)
    assert char_poly(M([[0, -1], [1, 0]])) == P(1, 0, 1)
    companion = M([[0, 0, 2], [1, 0, 0], [0, 1, 0]])
    assert char_poly(companion) == P(-2, 0, 0, 1)


def test_minimal_poly():
    assert minimal_poly(QMatrix.identity(3)) == P(-1, 1)
    assert minimal_poly(M([[1, 1], [0, 1]])) == P(1, -2, 1)
    assert minimal_poly(M([[2, 0], [0, 3]])) == P(6, -5, 1)


def test_cayley_hamilton_spot_check():
    a = M([[1, 2, 0], [0, 1, -1], [3, 0, 2]])
    assert poly_of_matrix(char_poly(a), a) == QMatrix.zero(3, 3)


def test_rational_roots():
    assert rational_roots(P(2, -3, 1)) == [F(1), F(2)]
    assert rational_roots(P(0, -1, 1)) == [F(0), F(1)]
    assert rational_roots(P(-2, 0, 1)) == []
    assert rational_roots(P(1, 1) * P(-1, 2) * P(1, 1)) == [F(-1), F(1, 2)]


def test_root_multiplicity_and_squarefree():
    p = P(-1, 1) * P(-1, 1) * P(2, 1)
    mult, reduced = root_multiplicity(p, F(1))
    assert mult == 2
    assert reduced == P(2, 1)
    assert squarefree_part(p) == (P(-1, 1) * P(2, 1)).monic()


def test_poly_gcd():
    a = P(-1, 1) * P(-2, 1)
    b = P(-1, 1) * P(-3, 1)
    assert poly_gcd(a, b) == P(-1, 1)
    assert poly_gcd(a, QPoly.zero()) == a.monic()


# ----------------------------------------------------------- root counts


def test_sturm_root_count_examples():
    assert sturm_root_count(P(-2, 0, 1), F(0), F(2)) == 1
    assert sturm_root_count(P(1, 0, 1), F(-5), F(5)) == 0
    assert sturm_root_count(P(1, -2, 1), F(0), F(2)) == 1


def test_sturm_interval_is_half_open_on_the_right():
    line = P(-2, 1)
    assert sturm_root_count(line, F(0), F(2)) == 1
    assert sturm_root_count(line, F(2), F(3)) == 0


def test_sturm_count_real_roots():
    assert sturm_count_real_roots(P(0, -1, 0, 1)) == 3
    assert sturm_count_real_roots(P(1, 0, 1)) == 0


def test_cauchy_index_examples():
    # 1/z jumps -inf -> +inf once
    assert cauchy_index(P(1), P(0, 1)) == 1
    assert cauchy_index(P(0, 1), P(1)) == 0
    # z / (z^2 - 1) has two positive jumps
    assert cauchy_index(P(0, 1), P(-1, 0, 1)) == 2
    # -1/z
    assert cauchy_index(P(-1), P(0, 1)) == -1


def test_reciprocal_split_examples():
    g, q = reciprocal_split(P(1, -3, 1))
    assert g == P(1, -3, 1) and q == QPoly.one()
    g, q = reciprocal_split(P(-2, 1))
    assert g == QPoly.one() and q == P(-2, 1)
    g, q = reciprocal_split(P(-1, 0, 1))
    assert g == P(-1, 0, 1) and q == QPoly.one()
    g, q = reciprocal_split(P(-2, 1, -2, 1))
    assert g == P(1, 0, 1) and q == P(-2, 1)


def test_reciprocal_split_rejects_bad_input():
    with pytest.raises(ZeroPolynomialError):
        reciprocal_split(QPoly.zero())
    with pytest.raises(ZeroConstantTermError):
        reciprocal_split(P(0, 1))


# ------------------------------------------------------------ properties

small_fracs = st.fractions(
    min_value=F(-4), max_value=F(4), max_denominator=3
)


def square_matrices(n):
    return st.lists(small_fracs, min_size=n * n, max_size=n * n).map(
        lambda xs: QMatrix(n, n, tuple(xs))
    )


int_polys = st.lists(
    st.integers(min_value=-5, max_value=5), min_size=1, max_size=7
).map(lambda cs: QPoly.from_coeffs([F(c) for c in cs]))


@given(square_matrices(3))
@settings(max_examples=60, deadline=None)
def test_cayley_hamilton_property(a):
    assert poly_of_matrix(char_poly(a), a) == QMatrix.zero(3, 3)


@given(square_matrices(3), square_matrices(3))
@settings(max_examples=60, deadline=None)
def test_det_is_multiplicative(a, b):
    assert (a @ b).det() == a.det() * b.det()


@given(square_matrices(3))
@settings(max_examples=60, deadline=None)
def test_rank_nullity_and_sympy_rank(a):
    r = rank(a)
    assert r + kernel(a).dim == 3
    assert r == sp.Matrix(3, 3, [sp.Rational(x) for x in a.entries]).rank()


@given(square_matrices(2))
@settings(max_examples=60, deadline=None)
def test_inverse_round_trip(a):
    if a.det() == 0:
        with pytest.raises(NotInvertibleError):
            a.inverse()
    else:
        assert a @ a.inverse() == QMatrix.identity(2)


@given(int_polys, int_polys)
@settings(max_examples=80, deadline=None)
def test_divmod_identity(a, b):
    if b.is_zero:
        return
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.is_zero or r.degree < b.degree


@given(int_polys, int_polys)
@settings(max_examples=80, deadline=None)
def test_gcd_divides_both_and_is_symmetric(a, b):
    g = poly_gcd(a, b)
    assert g == poly_gcd(b, a)
    if not g.is_zero:
        for p in (a, b):
            if not p.is_zero:
                assert p.divmod(g)[1].is_zero


@given(int_polys)
@settings(max_examples=80, deadline=None)
def test_sturm_counts_are_additive(p):
    if p.is_zero or p.degree == 0:
        return
    lo, mid, hi = F(-10), F(0), F(10)
    total = sturm_root_count(p, lo, hi)
    assert total == sturm_root_count(p, lo, mid) + sturm_root_count(p, mid, hi)


@given(int_polys)
@settings(max_examples=80, deadline=None)
def test_sturm_agrees_with_sympy_on_real_root_count(p):
    if p.is_zero or p.degree == 0:
        return
    z = sp.Symbol("z")
    sp_poly = sp.Poly([sp.Rational(c) for c in reversed(p.coeffs)], z)
    # both sides count distinct real roots
    assert sturm_count_real_roots(p) == sp_poly.count_roots(-sp.oo, sp.oo)


@given(int_polys)
@settings(max_examples=80, deadline=None)
def test_reverse_is_an_involution_off_the_origin(p):
    if p.is_zero or p.constant == 0:
        return
    assert p.reverse().reverse() == p
