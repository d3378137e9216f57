import math
from fractions import Fraction

import numpy as np
import pytest

from kernelcert import catalog
from kernelcert.certificates import certify_pair, master_certificate
from kernelcert.exact import ValidationError
from kernelcert.io import series_evaluator
from kernelcert.linalg import psd_test_exact
from kernelcert.sampling import gram_psd, random_grid
from kernelcert.series import BivariateSeries, DiagonalSeries

SERIES_HANDLES = [
    (catalog.szego(), 40),
    (catalog.bergman(), 40),
    (catalog.geometric(3), 40),
    (catalog.polydisc_weights((2, 1)), 24),
    (catalog.ball_power(2, 2), 24),
    (catalog.ball_power(1, 3), 16),
    (catalog.cubic_gap_kernel(), 30),
    (catalog.offdiagonal_cp_kernel(), 12),
]


@pytest.mark.parametrize("handle,n", SERIES_HANDLES, ids=lambda x: getattr(x, "name", str(x)))
def test_evaluator_matches_series(handle, n):
    ev = series_evaluator(handle.series(n))
    grid = random_grid(20, handle.radius / 2, seed=7, g=handle.variables)
    pts = list(grid)
    for z, w in zip(pts, pts[::-1]):
        a, b = complex(handle(z, w)), complex(ev(z, w))
        assert abs(a - b) <= 1e-10 * abs(a)


def test_bergman_coefficients():
    assert catalog.bergman().series(6).as_list() == [1, 2, 3, 4, 5, 6, 7]


def test_polydisc_coefficients():
    f = catalog.polydisc_weights((2, 3)).series(4)
    # C(a1 + 1, 1) * C(a2 + 2, 2)
    assert f[(1, 2)] == 2 * 6
    assert f[(0, 0)] == 1


def test_ball_coefficients():
    f = catalog.ball_power(2, 2).series(4)
    # (1 - x1 - x2)^-2 expands with coefficient (|a| + 1) * multinomial(a)
    assert f[(1, 1)] == 3 * 2
    assert f[(2, 1)] == 4 * 3


@pytest.mark.parametrize("p", [(0,), (1, -2), ()])
def test_polydisc_rejects_bad_weights(p):
    with pytest.raises(ValidationError):
        catalog.polydisc_weights(p)


def test_ball_rejects_bad_parameters():
    with pytest.raises(ValidationError):
        catalog.ball_power(0, 2)
    with pytest.raises(ValidationError):
        catalog.ball_power(1, 0)


def test_cubic_gap_series_and_ratio():
    k = catalog.cubic_gap_kernel().series(10)
    assert k.as_list()[:4] == [1, 2, 3, 16]
    ratio = catalog.geometric(3).series(10) / k
    assert ratio.as_list() == [1, 1, 4] + [0] * 8


def test_cubic_gap_master_certificate():
    th = master_certificate(catalog.cubic_gap_kernel().series(6)).theta
    assert (th[1], th[2], th[3]) == (2, 0, 10)


def test_offdiagonal_cp_degree_three_matrix():
    s = catalog.offdiagonal_cp_kernel().series(3)
    m = (1 - BivariateSeries.from_dict(3, {(1, 1): 2})) * s
    expect = [[1, 0, 0, 0], [0, 1, -2, 0], [0, -2, 5, -8], [0, 0, -8, 33]]
    assert [[complex(x) for x in r] for r in m.rows(3)] == expect
    assert not psd_test_exact(_hermitian(m.rows(3)))


def _hermitian(rows):
    from kernelcert.linalg import HermitianExact

    return HermitianExact(tuple(tuple(r) for r in rows))


def test_offdiagonal_cp_one_minus_ratio_identity():
    n = 6
    s = catalog.offdiagonal_cp_kernel().series(n)
    berg = BivariateSeries.from_diagonal(catalog.bergman().series(n))
    lhs = 1 - berg * s.reciprocal()
    entries = {}
    for m in range(1, n + 1):
        # x (1 - 2mz)(1 - 2m conj(w)) x^(m-1)
        for di, ci in ((0, 1), (1, -2 * m)):
            for dj, cj in ((0, 1), (1, -2 * m)):
                i, j = m + di, m + dj
                if i <= n and j <= n:
                    entries[(i, j)] = entries.get((i, j), 0) + ci * cj
    assert lhs == BivariateSeries.from_dict(n, entries)


def test_offdiagonal_cp_row_zero():
    s = catalog.offdiagonal_cp_kernel().series(8)
    assert [s[i, 0] for i in range(9)] == [1] + [0] * 8
    assert abs(catalog.offdiagonal_cp_kernel()(0.2 - 0.1j, 0j) - 1) < 1e-15


def test_offdiagonal_cp_needs_degree_three():
    with pytest.raises(ValidationError):
        catalog.offdiagonal_cp_kernel().series(2)


def test_certify_fixture_pairs():
    b = catalog.bergman().series(10)
    assert certify_pair(b, catalog.geometric(2).series(10)).verdict
    assert certify_pair(b, b).first_failure[1] == (2,)


class TestGLambda:
    def test_identity_residual(self, rng):
        for _ in range(10):
            lam = complex(0.9 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()))
            if abs(lam) == 0:
                continue
            gl = catalog.g_lambda(lam)
            for _ in range(10):
                z, w = (0.99 * math.sqrt(rng.uniform()) / 3 * np.exp(2j * np.pi * rng.uniform()) for _ in range(2))
                assert gl.contains(z) and gl.contains(w)
                assert gl.residual(z, w) < 1e-12

    def test_real_lambda_half_root(self):
        for lam in np.linspace(0.05, 0.95, 10):
            assert abs(catalog.g_lambda(lam).g(1 / math.sqrt(2))) < 1

    def test_third_disc_inside_domain(self, rng):
        for _ in range(20):
            gl = catalog.g_lambda(complex(0.99 * rng.uniform() + 0.005, 0))
            z = (1 / 3 - 1e-12) * np.exp(2j * np.pi * rng.uniform())
            assert gl.contains(z)

    def test_h_lambda_gram(self):
        h = catalog.g_lambda(0.2).h_handle()
        assert gram_psd(h, random_grid(40, 1 / 3, seed=1)).ok

    @pytest.mark.parametrize("lam", [0, 1, 1.5j])
    def test_out_of_range(self, lam):
        with pytest.raises(ValidationError):
            catalog.g_lambda(lam)


def test_three_point():
    ex = catalog.three_point_kernel()
    assert psd_test_exact(ex.K)
    assert all(ex.K[i, i].re > 0 for i in range(3))
    assert ex.p(1).rows[1] == (0, 0, 0)


def test_lookup():
    assert catalog.lookup("geometric", c=3).params == {"c": "3"}
    assert catalog.lookup("h_lambda", lam=[0.1, 0.2]).name == "h_lambda"
    with pytest.raises(ValidationError):
        catalog.lookup("dirichlet")
