from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from kernelcert.exact import Gaussian
from kernelcert.linalg import HermitianExact
from kernelcert.series import DiagonalSeries, indices_upto

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def rationals(lo=-8, hi=8, max_den=12):
    return st.builds(
        lambda p, q: Fraction(p, q), st.integers(lo * max_den, hi * max_den), st.integers(1, max_den)
    )


def positive_rationals(hi=4, max_den=8):
    """Rationals in (0, hi]."""
    return st.builds(lambda p, q: Fraction(p, q), st.integers(1, hi * max_den), st.integers(1, max_den)).filter(
        lambda x: 0 < x <= hi
    )


@st.composite
def diagonal_series(draw, g=1, max_degree=6, values=None, normalized=False):
    n = draw(st.integers(0, max_degree))
    vals = values if values is not None else rationals()
    coeffs = {a: draw(vals) for a in indices_upto(g, n)}
    if normalized:
        coeffs[(0,) * g] = Fraction(1)
    return DiagonalSeries(g, n, coeffs)


@st.composite
def normalized_kernels(draw, g=1, max_degree=6, degree=None):
    n = degree if degree is not None else draw(st.integers(1, max_degree))
    coeffs = {a: draw(positive_rationals()) for a in indices_upto(g, n)}
    coeffs[(0,) * g] = Fraction(1)
    return DiagonalSeries(g, n, coeffs)


def gaussians(lo=-4, hi=4, max_den=6):
    return st.builds(Gaussian, rationals(lo, hi, max_den), rationals(lo, hi, max_den))


@st.composite
def hermitian_exact(draw, max_n=6, rank_deficient=None):
    n = draw(st.integers(1, max_n))
    if rank_deficient is None:
        rank_deficient = draw(st.booleans())
    if rank_deficient:
        r = draw(st.integers(0, n))
        V = [[draw(gaussians(-2, 2, 3)) for _ in range(n)] for _ in range(r)]
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = Gaussian(0)
                for t in range(r):
                    acc = acc + V[t][i].conj() * V[t][j]
                row.append(acc)
            rows.append(row)
        return HermitianExact(tuple(tuple(r_) for r_ in rows))
    rows = [[Gaussian(0)] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = Gaussian(draw(rationals()))
        for j in range(i + 1, n):
            v = draw(gaussians())
            rows[i][j], rows[j][i] = v, v.conj()
    return HermitianExact(tuple(tuple(r_) for r_ in rows))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
