import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import normalized_kernels
from kernelcert import catalog
from kernelcert.certificates import (
    bergman_necessity_audit,
    certify_pair,
    ell_chain,
    greedy_v_sequence,
    master_certificate,
    necessity_set,
    omega1_radius,
    radial_section,
    shimorin_g,
    shimorin_h,
    verify_formal_certificate,
)
from kernelcert.exact import ValidationError
from kernelcert.schurtools import RegularityError
from kernelcert.series import BivariateSeries, DiagonalSeries, indices_upto


def geo(c, n):
    return DiagonalSeries.from_list([Fraction(c) ** i for i in range(n + 1)], n)


def poly(coeffs, n):
    return DiagonalSeries.from_list(list(coeffs) + [0] * (n + 1 - len(coeffs)), n)


BERG = catalog.bergman().series(12)
SZEGO = catalog.szego().series(12)
CUBIC_GAP = catalog.cubic_gap_kernel().series(10)


class TestMasterCertificate:
    def test_bergman(self):
        assert master_certificate(BERG).theta == poly([0, 2], 12)

    def test_szego(self):
        assert master_certificate(SZEGO).theta == poly([0, 1], 12)

    def test_cubic_gap_leading_terms(self):
        th = master_certificate(CUBIC_GAP).theta
        assert [th[i] for i in range(4)] == [0, 2, 0, 10]

    def test_degree_zero(self):
        assert master_certificate(BERG, 0).theta == DiagonalSeries(1, 0, {})

    def test_s_is_reciprocal(self):
        mc = master_certificate(CUBIC_GAP)
        assert mc.s() * (1 - mc.theta) == DiagonalSeries.constant(1, mc.theta.degree)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            master_certificate(poly([2, 1], 3))
        with pytest.raises(ValidationError):
            master_certificate(poly([1, -1, 1], 3))

    def test_ball_two_variables(self):
        th = master_certificate(catalog.ball_power(3, 2).series(6)).theta
        assert dict(th.items()) == {(1, 0): 3, (0, 1): 3}

    @given(normalized_kernels(g=1, max_degree=8))
    def test_bounds_and_slackness_one_variable(self, k):
        self._check(k)

    @given(normalized_kernels(g=2, max_degree=5))
    def test_bounds_and_slackness_two_variables(self, k):
        self._check(k)

    @staticmethod
    def _check(k):
        th = master_certificate(k).theta
        h = 1 - k * (1 - th)
        for a in indices_upto(k.variables, k.degree):
            assert 0 <= th[a] <= k[a]
            if sum(a) >= 2 and th[a] > 0:
                assert h[a] == 0
            assert h[a] >= 0
        for j in range(k.variables):
            e = tuple(1 if i == j else 0 for i in range(k.variables))
            if k.degree >= 1:
                assert th[e] == k[e]


class TestCertifyPair:
    def test_bergman_with_geometric_two_passes(self):
        r = certify_pair(BERG, geo(2, 12))
        assert r.verdict and r.first_failure is None

    def test_bergman_with_itself_fails_at_two(self):
        r = certify_pair(BERG, BERG)
        assert not r.verdict
        assert r.first_failure == ("g", (2,), -1)

    def test_szego_with_itself(self):
        assert certify_pair(SZEGO, SZEGO).verdict

    def test_cubic_gap_fails_at_three(self):
        r = certify_pair(CUBIC_GAP, geo(3, 10))
        assert r.first_failure == ("g", (3,), -1)

    def test_g_and_h_series(self):
        th = poly([0, 2], 6)
        assert shimorin_g(geo(2, 6), th).series == DiagonalSeries.constant(1, 6)
        assert shimorin_h(BERG.truncate(6), th).series == poly([0, 0, 1, 2, 3, 4, 5], 6)

    def test_szego_h_vanishes(self):
        assert shimorin_h(SZEGO, poly([0, 1], 12)).series == DiagonalSeries(1, 12, {})

    def test_bergman_g_with_itself(self):
        g = shimorin_g(BERG, poly([0, 2], 12))
        assert g.series.as_list() == [1 - n for n in range(13)]
        assert g.first_failure == ((2,), -1)

    def test_formal_certificate_too_large(self):
        r = verify_formal_certificate(BERG, geo(2, 12), poly([0, 3], 12))
        assert r.first_failure == ("g", (1,), -1)
        assert r.h[1] == 1

    def test_formal_certificate_trivial(self):
        one = DiagonalSeries.constant(1, 4)
        r = verify_formal_certificate(one, one, DiagonalSeries(1, 4, {}))
        assert r.verdict and r.g == one and r.h == DiagonalSeries(1, 4, {})

    def test_formal_certificate_rejects_bad_t(self):
        with pytest.raises(ValidationError):
            verify_formal_certificate(BERG, BERG, poly([0, -1], 4))
        with pytest.raises(ValidationError):
            verify_formal_certificate(BERG, BERG, poly([1, 1], 4))

    @given(normalized_kernels(max_degree=6))
    def test_pair_with_own_certificate_kernel_passes(self, k):
        s = master_certificate(k).s()
        r = certify_pair(k, s)
        assert r.verdict
        assert r.g == DiagonalSeries.constant(1, k.degree)

    @given(st.integers(1, 6), st.data())
    def test_agrees_with_formal_certificate(self, n, data):
        k = data.draw(normalized_kernels(degree=n))
        l = data.draw(normalized_kernels(degree=n))
        r = certify_pair(k, l)
        f = verify_formal_certificate(k, l, master_certificate(k).theta)
        assert r.verdict == f.verdict
        assert r.g == f.g and r.h == f.h


class TestVSequence:
    def test_cubic_gap_failure_at_three(self):
        th = master_certificate(CUBIC_GAP).theta
        S = necessity_set(th, 3)
        assert S == {(1,), (3,)}
        v = greedy_v_sequence(CUBIC_GAP, geo(3, 10), 3, S)
        assert [v.values[(i,)] for i in range(4)] == [1, 0, 6, 0]
        assert v.residuals[(3,)] == -1
        assert not v.ok

    def test_passing_pair_is_nonnegative(self):
        th = master_certificate(BERG).theta
        for d in range(1, 8):
            v = greedy_v_sequence(BERG, geo(2, 12), d, necessity_set(th, d))
            assert v.ok

    def test_full_s_gives_zero_sequence(self):
        v = greedy_v_sequence(BERG, geo(2, 12), 4, range(5))
        assert all(x == 0 for x in v.values.values())
        assert [v.residuals[(a,)] for a in range(5)] == [2**a for a in range(5)]

    def test_s_outside_box_rejected(self):
        with pytest.raises(ValidationError):
            greedy_v_sequence(BERG, geo(2, 12), 2, [(3,)])

    @given(st.integers(1, 5), st.data())
    def test_v_definition(self, d, data):
        k = data.draw(normalized_kernels(degree=d))
        l = data.draw(normalized_kernels(degree=d))
        S = data.draw(st.sets(st.integers(0, d)))
        v = greedy_v_sequence(k, l, d, S)
        for a in range(d + 1):
            if a in S:
                assert v.values[(a,)] == 0
            else:
                expect = l[a] - sum(v.values[(u,)] * k[a - u] for u in range(a))
                assert v.values[(a,)] == expect


class TestChains:
    L2 = geo(2, 10)

    def test_single_index_two(self):
        c = ell_chain(self.L2, BERG.truncate(10), [2])
        assert c.stages[0].as_list()[:4] == [1, 2, 3, 8]

    def test_initial_segment_strips_coefficients(self):
        c = ell_chain(self.L2, BERG.truncate(10), [0, 1, 2])
        assert c.stages[-1] == self.L2 - poly([1, 2, 4], 10)

    def test_non_increasing_chain_goes_negative(self):
        c = ell_chain(self.L2, BERG.truncate(10), [2, 0])
        assert c.stages[-1].as_list()[:3] == [0, 2, 3]
        assert c.quotients[-1][2] == -1
        assert c.verdict is None and not c.increasing

    def test_repeated_index_rejected(self):
        with pytest.raises(ValidationError):
            ell_chain(self.L2, BERG, [1, 1])


class TestRadius:
    def test_two_x(self):
        assert abs(omega1_radius(poly([0, 2], 3)) - 1 / math.sqrt(2)) < 1e-10

    def test_x(self):
        assert abs(omega1_radius(poly([0, 1], 3)) - 1) < 1e-10

    def test_cubic_against_polynomial_roots(self):
        r = omega1_radius(poly([0, 2, 0, 10], 3))
        # independent oracle: 10 y^3 + 2 y - 1 = 0 with y = r^2
        y = [x.real for x in np.roots([10, 0, 2, -1]) if abs(x.imag) < 1e-12 and x.real > 0]
        assert abs(r - math.sqrt(y[0])) < 1e-10
        assert abs(r - 0.5712239) < 1e-6

    def test_ball_radial_section(self):
        th = master_certificate(catalog.ball_power(3, 3).series(4)).theta
        assert abs(omega1_radius(th) - 1 / math.sqrt(3)) < 1e-10
        assert radial_section(th) == poly([0, 3], 4)

    def test_polynomial_never_reaching_one(self):
        assert omega1_radius(poly([0, Fraction(1, 10**300)], 1)) == math.inf

    def test_errors(self):
        with pytest.raises(ValidationError):
            omega1_radius(DiagonalSeries(1, 3, {}))
        with pytest.raises(ValidationError):
            omega1_radius(poly([0, 1, -1], 3))


class TestBergmanAudit:
    def test_geometric_two_is_tight(self):
        a = bergman_necessity_audit(geo(2, 8))
        assert a.passed
        assert [r.pivot for r in a.rows] == [2**n for n in range(1, 9)]

    def test_szego_fails_at_one(self):
        assert bergman_necessity_audit(geo(1, 6)).first_failure == 1

    def test_geometric_three_passes(self):
        assert bergman_necessity_audit(geo(3, 8)).passed

    def test_regularity_failure(self):
        l = BivariateSeries.from_dict(3, {(0, 0): 1, (2, 2): 1})
        with pytest.raises(RegularityError) as e:
            bergman_necessity_audit(l)
        assert e.value.stage == 1
