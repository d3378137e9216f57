from fractions import Fraction
import numpy as np

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import diagonal_series, gaussians, rationals
from kernelcert.exact import Gaussian, ValidationError
from kernelcert.series import (
    BivariateSeries,
    DiagonalSeries,
    bivariate_from_diagonal,
    bivariate_mul,
    bivariate_reciprocal,
    enumerate_coinvariant,
    grlex_key,
    indices_upto,
    make_index_set,
    series_add,
    series_mul,
    series_reciprocal,
    validate_coinvariant,
)


def geo(c, n):
    return DiagonalSeries.from_list([Fraction(c) ** i for i in range(n + 1)], n)


def test_reciprocal_of_geometric_is_linear():
    assert series_reciprocal(geo(2, 8)).as_list() == [1, -2] + [0] * 7


def test_bergman_times_one_minus_2x():
    berg = DiagonalSeries.from_list(list(range(1, 7)), 5)
    p = DiagonalSeries.from_list([1, -2, 0, 0, 0, 0], 5)
    assert series_mul(p, berg).as_list() == [1, 0, -1, -2, -3, -4]


def test_cubic_reciprocal_gives_known_coefficients():
    f = DiagonalSeries.from_list([1, -2, 1, -12, 0, 0], 5)
    assert series_reciprocal(f).as_list()[:4] == [1, 2, 3, 16]


def test_product_truncates_to_smaller_degree():
    f, g = geo(1, 3), geo(2, 7)
    assert series_mul(f, g).degree == 3
    assert series_add(f, g).degree == 3


def test_zero_constant_has_no_reciprocal():
    with pytest.raises(ValidationError):
        series_reciprocal(DiagonalSeries.from_list([0, 1, 1], 2))


def test_variable_mismatch_rejected():
    with pytest.raises(ValidationError):
        series_mul(geo(1, 2), DiagonalSeries.constant(2, 2))


def test_indices_beyond_degree_are_dropped():
    f = DiagonalSeries(2, 2, {(0, 0): 1, (2, 1): 5, (1, 1): 0})
    assert [a for a, _ in f.items()] == [(0, 0)]
    assert f[(2, 1)] == 0


def test_two_variable_product_is_sparse_cauchy():
    x1 = DiagonalSeries.monomial(2, 4, (1, 0))
    x2 = DiagonalSeries.monomial(2, 4, (0, 1))
    f = (1 - x1 - x2).reciprocal()
    # 1/(1 - x1 - x2): coefficient of x1^a x2^b is C(a+b, a)
    assert f[(2, 2)] == 6
    assert f[(3, 1)] == 4


def test_grlex_order_one_variable():
    assert list(indices_upto(1, 5)) == [(i,) for i in range(6)]


def test_grlex_total_degree_nondecreasing():
    idx = indices_upto(2, 6)
    assert all(sum(a) <= sum(b) for a, b in zip(idx, idx[1:]))
    assert len(set(idx)) == len(idx) == 28


def test_grlex_key_breaks_ties_by_coordinates():
    assert sorted([(1, 0), (0, 1)], key=grlex_key) == [(0, 1), (1, 0)]


def test_coinvariant_enumeration_is_valid():
    assert validate_coinvariant(enumerate_coinvariant(3, 3)).ok


def test_coinvariant_missing_lower_index():
    v = validate_coinvariant(make_index_set(2, [(0, 0), (1, 0), (1, 1)]))
    assert not v.ok and v.witness == (0, 1)


def test_coinvariant_must_contain_origin():
    v = validate_coinvariant(make_index_set(1, [1]))
    assert not v.ok and v.witness == (0,)


def test_bivariate_reciprocal_of_one_minus_x():
    n = 5
    f = BivariateSeries.from_dict(n, {(0, 0): 1, (1, 1): -1})
    r = bivariate_reciprocal(f)
    assert all(r[i, j] == (1 if i == j else 0) for i in range(n + 1) for j in range(n + 1))


def test_bivariate_rejects_vanishing_constant():
    with pytest.raises(ValidationError):
        bivariate_reciprocal(BivariateSeries.from_dict(2, {(1, 0): 1}))


def test_bivariate_evaluation_matches_closed_form():
    n = 40
    f = bivariate_from_diagonal(DiagonalSeries.from_list([1] * (n + 1), n))
    z, w = 0.3 + 0.1j, -0.2 + 0.25j
    assert abs(f.evaluate(z, w) - 1 / (1 - z * w.conjugate())) < 1e-14


@given(diagonal_series(values=rationals(-3, 3, 5)), diagonal_series(values=rationals(-3, 3, 5)))
def test_mul_commutes(f, g):
    assert series_mul(f, g) == series_mul(g, f)


@given(
    diagonal_series(g=2, max_degree=4, values=rationals(-2, 2, 3)),
    diagonal_series(g=2, max_degree=4, values=rationals(-2, 2, 3)),
    diagonal_series(g=2, max_degree=4, values=rationals(-2, 2, 3)),
)
def test_mul_associates(f, g, h):
    assert series_mul(series_mul(f, g), h) == series_mul(f, series_mul(g, h))


@given(
    st.integers(0, 12),
    st.lists(rationals(-5, 5, 7), min_size=13, max_size=13),
    rationals(1, 5, 7),
)
def test_reciprocal_inverts(n, tail, c0):
    f = DiagonalSeries.from_list([c0] + tail[:n], n)
    one = series_mul(f, series_reciprocal(f))
    assert one == DiagonalSeries.constant(1, n)


@given(diagonal_series(max_degree=5, values=rationals(-3, 3, 4)), diagonal_series(max_degree=5, values=rationals(-3, 3, 4)))
def test_bivariate_embedding_commutes_with_products(f, g):
    lhs = bivariate_mul(bivariate_from_diagonal(f), bivariate_from_diagonal(g))
    assert lhs == bivariate_from_diagonal(series_mul(f, g))


@given(st.integers(1, 4), st.data())
def test_bivariate_reciprocal_inverts(n, data):
    entries = {(i, j): data.draw(gaussians(-2, 2, 3)) for i in range(n + 1) for j in range(n + 1)}
    entries[(0, 0)] = Gaussian(data.draw(rationals(1, 3, 3)))
    f = BivariateSeries.from_dict(n, entries)
    assert bivariate_mul(f, bivariate_reciprocal(f)) == BivariateSeries.from_dict(n, {(0, 0): 1})


def test_numpy_backed_fraction_is_normalized():
    f = DiagonalSeries.from_list([1, Fraction(3, np.int64(4))], 1)
    assert type(f[1].denominator) is int
