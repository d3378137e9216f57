"""Schur-complement chains for one-variable holomorphic kernels.

Two chains are compared here.  The coefficient chain l^(n) eliminates the
pivots (0,0), (1,1), ... of the coefficient table.  The point chain
l_[1..n] subtracts rank-one kernels at points u_1, ..., u_n.  As the points
shrink to 0 (u_1 first) the point chain converges to the coefficient chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .exact import ValidationError
from .linalg import HermitianExact, PsdVerdict, psd_test_exact
from .series import BivariateSeries, DiagonalSeries, bivariate_from_diagonal, bivariate_mul

Kernel = Callable[[object, object], complex]


class RegularityError(ValidationError):
    def __init__(self, stage: int):
        super().__init__(f"zero pivot at stage {stage}: not regular to that order")
        self.stage = stage


@dataclass(frozen=True)
class SchurChain:
    stages: Tuple[BivariateSeries, ...]  # l^(0), ..., l^(n)
    pivots: Tuple[Fraction, ...]  # l^(m)_{mm} for m < n

    @property
    def regular_to(self) -> int:
        return len(self.pivots)


def coeff_schur_chain(l: BivariateSeries, n: int) -> SchurChain:
    """l^(m)_ij = l^(m-1)_ij - l^(m-1)_{i,m-1} l^(m-1)_{m-1,j} / l^(m-1)_{m-1,m-1}."""
    if n < 0 or n > l.degree:
        raise ValidationError(f"chain length {n} outside [0, {l.degree}]")
    if not l.is_hermitian():
        raise ValidationError("coefficient table is not Hermitian")
    N = l.degree
    cur = [list(r) for r in l.coeffs]
    stages = [l]
    pivots: List[Fraction] = []
    for m in range(1, n + 1):
        p = m - 1
        piv = cur[p][p]
        if not piv:
            raise RegularityError(p)
        pivots.append(piv.re)
        col = [cur[i][p] for i in range(N + 1)]
        row = list(cur[p])
        nxt = [list(r) for r in cur]
        for i in range(N + 1):
            if not col[i]:
                continue
            f = col[i] / piv
            for j in range(N + 1):
                if row[j]:
                    nxt[i][j] = nxt[i][j] - f * row[j]
        cur = nxt
        stages.append(BivariateSeries(N, tuple(tuple(r) for r in cur)))
    return SchurChain(tuple(stages), tuple(pivots))


def quotient_positivity(stage: BivariateSeries, k: DiagonalSeries, n: Optional[int] = None) -> PsdVerdict:
    """Exact PSD test of the order-n coefficient matrix of stage / k."""
    if k.variables != 1:
        raise ValidationError("quotients are one-variable")
    if k[0] != 1:
        raise ValidationError("k is not normalized")
    N = min(stage.degree, k.degree)
    n = N if n is None else n
    if n > N:
        raise ValidationError(f"order {n} exceeds truncation {N}")
    q = bivariate_mul(stage.truncate(n), bivariate_from_diagonal(k.truncate(n).reciprocal()))
    return psd_test_exact(HermitianExact(tuple(tuple(r) for r in q.rows(n))))


def point_schur_chain(l: Kernel, points: Sequence, threshold: float = 1e-14) -> Kernel:
    """Evaluator of l_[1..n] by successive rank-one subtraction at the points."""
    cur = l
    for m, u in enumerate(points):
        prev = cur
        duu = prev(u, u)
        if abs(duu) <= threshold:
            raise ValidationError(f"vanishing denominator at point {m + 1}")

        def nxt(z, w, prev=prev, u=u, duu=duu):
            return prev(z, w) - prev(z, u) * prev(u, w) / duu

        cur = nxt
    return cur


@dataclass(frozen=True)
class LimitSchedule:
    """u_m = t ** (base + gap * (n - m)) for m = 1..n, so u_1 << ... << u_n.

    The point chain approaches its limit at rate O(u_n), so the base exponent
    sets how fast deviations fall with t."""

    base: int = 3
    gap: int = 1

    def points(self, t: float, n: int) -> List[float]:
        return [t ** (self.base + self.gap * (n - m)) for m in range(1, n + 1)]


@dataclass(frozen=True)
class LimitReport:
    n: int
    ts: Tuple[float, ...]
    deviations: Tuple[float, ...]
    truncation_floor: float
    truncation: int

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.deviations, self.deviations[1:]))


def _mp_gauss(c):
    return mpmath.mpc(mpmath.mpf(c.re.numerator) / c.re.denominator, mpmath.mpf(c.im.numerator) / c.im.denominator)


def limit_identity_check(
    l: Kernel,
    series: BivariateSeries,
    n: int,
    ts: Sequence[float],
    grid: Sequence[complex],
    schedule: LimitSchedule = LimitSchedule(),
    dps: int = 60,
) -> LimitReport:
    """Sup over grid pairs of |l_[1..n](z,w) - l^(n)(z,w)| for each t.

    ``l`` must accept mpmath complex arguments.  Evaluation runs at ``dps``
    digits because the point chain cancels nearly equal quantities.  The
    truncation floor is the largest |l(z,w) - series(z,w)| on the grid.
    """
    if n < 0:
        raise ValidationError("n must be nonnegative")
    if any(not (0 < t < 1) for t in ts):
        raise ValidationError("schedule values must lie in (0, 1)")
    target = coeff_schur_chain(series, n).stages[n]
    with mpmath.workdps(dps):
        pts = [mpmath.mpc(complex(z)) for z in grid]
        limit = {(i, j): target.evaluate(z, w, _mp_gauss) for i, z in enumerate(pts) for j, w in enumerate(pts)}
        floor = max(
            float(abs(l(z, w) - series.evaluate(z, w, _mp_gauss))) for z in pts for w in pts
        )
        devs = []
        for t in ts:
            us = [mpmath.mpf(u) for u in schedule.points(t, n)]
            chain = point_schur_chain(l, us, threshold=0)
            devs.append(
                max(float(abs(chain(z, w) - limit[i, j])) for i, z in enumerate(pts) for j, w in enumerate(pts))
            )
    return LimitReport(n, tuple(ts), tuple(devs), floor, series.degree)
