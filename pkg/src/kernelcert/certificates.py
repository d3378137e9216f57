"""Master certificates, formal certificate verification and CC verdicts.

All verdicts here are exact and relative to a truncation degree N: a pass
asserts the coefficient conditions for every |a| <= N; a fail is definitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from scipy.optimize import bisect

from .exact import ValidationError
from .series import (
    BivariateSeries,
    DiagonalSeries,
    MultiIndex,
    grlex_key,
    indices_upto,
    leq,
    lower_set,
    sub_index,
    zero_index,
)


def _check_normalized(k: DiagonalSeries, name: str = "k"):
    if k[zero_index(k.variables)] != 1:
        raise ValidationError(f"{name} is not normalized: constant term {k[zero_index(k.variables)]}")
    neg = k.first_negative()
    if neg is not None:
        raise ValidationError(f"{name} has a negative coefficient {neg[1]} at {neg[0]}")


def _working_degree(n: Optional[int], *series: DiagonalSeries) -> int:
    top = min(s.degree for s in series)
    if n is None:
        return top
    if n < 0:
        raise ValidationError("degree must be nonnegative")
    if n > top:
        raise ValidationError(f"degree {n} exceeds the available truncation {top}")
    return n


# ---------------------------------------------------------------------------
# master certificate


@dataclass(frozen=True)
class MasterCertificate:
    theta: DiagonalSeries

    @property
    def degree(self) -> int:
        return self.theta.degree

    def s(self) -> DiagonalSeries:
        """The certificate kernel 1/(1 - theta)."""
        return (1 - self.theta).reciprocal()


def master_certificate(k: DiagonalSeries, n: Optional[int] = None) -> MasterCertificate:
    """theta_0 = 0, theta_{e_j} = k_{e_j}, and for |b| >= 2
    theta_b = max(0, k_b - sum_{w+u=b, w,u != 0} theta_w k_u)."""
    _check_normalized(k)
    n = _working_degree(n, k)
    g = k.variables
    z = zero_index(g)
    theta: Dict[MultiIndex, Fraction] = {}
    for b in indices_upto(g, n):
        if b == z:
            continue
        acc = k[b]
        for w, tw in theta.items():
            if w != b and leq(w, b):
                acc -= tw * k[sub_index(b, w)]
        if acc > 0:
            theta[b] = acc
    return MasterCertificate(DiagonalSeries(g, n, theta))


# ---------------------------------------------------------------------------
# factor series g and h


@dataclass(frozen=True)
class SeriesVerdict:
    series: DiagonalSeries
    ok: bool
    first_failure: Optional[Tuple[MultiIndex, Fraction]] = None


def _verdict(s: DiagonalSeries) -> SeriesVerdict:
    neg = s.first_negative()
    return SeriesVerdict(s, neg is None, neg)


def _check_t(t: DiagonalSeries):
    z = zero_index(t.variables)
    if t[z] != 0:
        raise ValidationError("certificate series must vanish at 0")


def shimorin_h(k: DiagonalSeries, t: DiagonalSeries) -> SeriesVerdict:
    """h = 1 - k(1 - t), with the first negative coefficient if any."""
    _check_normalized(k)
    _check_t(t)
    return _verdict(1 - k * (1 - t))


def shimorin_g(l: DiagonalSeries, t: DiagonalSeries) -> SeriesVerdict:
    """g = l(1 - t), with the first negative coefficient if any."""
    _check_normalized(l, "l")
    _check_t(t)
    return _verdict(l * (1 - t))


@dataclass(frozen=True)
class CertificateReport:
    degree: int
    verdict: bool
    theta: DiagonalSeries
    g: DiagonalSeries
    h: DiagonalSeries
    s: Optional[DiagonalSeries] = None
    first_failure: Optional[Tuple[str, MultiIndex, Fraction]] = None

    @property
    def passed(self) -> bool:
        return self.verdict


def certify_pair(k: DiagonalSeries, l: DiagonalSeries, n: Optional[int] = None) -> CertificateReport:
    """CC verdict for a diagonal pair at truncation n via the master certificate."""
    _check_normalized(k)
    _check_normalized(l, "l")
    if k.variables != l.variables:
        raise ValidationError("k and l have different variable counts")
    n = _working_degree(n, k, l)
    k, l = k.truncate(n), l.truncate(n)
    theta = master_certificate(k, n).theta
    gv = shimorin_g(l, theta)
    hv = shimorin_h(k, theta)
    assert hv.ok, f"h = 1 - k(1 - theta) must be nonnegative, got {hv.first_failure}"
    if not gv.ok:
        a, v = gv.first_failure
        return CertificateReport(n, False, theta, gv.series, hv.series, None, ("g", a, v))
    s = (1 - theta).reciprocal()
    assert (1 - hv.series) * s == k, "k = (1 - h) s must hold at truncation"
    assert gv.series * s == l, "l = g s must hold at truncation"
    return CertificateReport(n, True, theta, gv.series, hv.series, s, None)


def verify_formal_certificate(k: DiagonalSeries, l: DiagonalSeries, t: DiagonalSeries) -> CertificateReport:
    """Solve l_a = g_a + sum_{0<u<=a} t_u l_{a-u} and
    k_a + h_a = sum_{0<u<=a} t_u k_{a-u} (h_0 = 1 - k_0) coefficient by
    coefficient; pass iff every g_a and h_a is nonnegative."""
    if not (k.variables == l.variables == t.variables):
        raise ValidationError("variable count mismatch")
    g_ = k.variables
    z = zero_index(g_)
    if t[z] != 0:
        raise ValidationError("t_0 must be 0")
    bad = t.first_negative()
    if bad is not None:
        raise ValidationError(f"t has a negative coefficient {bad[1]} at {bad[0]}")
    n = min(k.degree, l.degree, t.degree)
    tsupp = [(u, tu) for u, tu in t.items()]
    gco: Dict[MultiIndex, Fraction] = {}
    hco: Dict[MultiIndex, Fraction] = {}
    failure = None
    for a in indices_upto(g_, n):
        sl = Fraction(0)
        sk = Fraction(0)
        for u, tu in tsupp:
            if leq(u, a):
                r = sub_index(a, u)
                sl += tu * l[r]
                sk += tu * k[r]
        ga = l[a] - sl
        ha = 1 - k[a] if a == z else sk - k[a]
        gco[a], hco[a] = ga, ha
        if failure is None:
            if ga < 0:
                failure = ("g", a, ga)
            elif ha < 0:
                failure = ("h", a, ha)
    G, H = DiagonalSeries(g_, n, gco), DiagonalSeries(g_, n, hco)
    if failure is not None:
        return CertificateReport(n, False, t.truncate(n), G, H, None, failure)
    return CertificateReport(n, True, t.truncate(n), G, H, (1 - t.truncate(n)).reciprocal(), None)


# ---------------------------------------------------------------------------
# greedy v-sequences


@dataclass(frozen=True)
class VSequence:
    d: MultiIndex
    S: FrozenSet[MultiIndex]
    values: Dict[MultiIndex, Fraction]
    residuals: Dict[MultiIndex, Fraction]  # l_a - sum_{u<=a} v_u k_{a-u}
    values_nonnegative: bool
    residuals_nonnegative: bool
    first_failure: Optional[Tuple[str, MultiIndex, Fraction]] = None

    @property
    def ok(self) -> bool:
        return self.values_nonnegative and self.residuals_nonnegative


def greedy_v_sequence(k: DiagonalSeries, l: DiagonalSeries, d, S: Iterable = ()) -> VSequence:
    """v_0 = 0 if 0 in S else 1; for a <= d, v_a = 0 on S and
    v_a = l_a - sum_{u<a} v_u k_{a-u} off S."""
    _check_normalized(k)
    _check_normalized(l, "l")
    g = k.variables
    d = tuple(d) if not isinstance(d, int) else (d,)
    if sum(d) > min(k.degree, l.degree):
        raise ValidationError(f"|d| = {sum(d)} exceeds the available truncation")
    box = lower_set(d)
    S = frozenset(tuple(a) if not isinstance(a, int) else (a,) for a in S)
    if not S <= set(box):
        raise ValidationError("S must be a subset of {a <= d}")
    v: Dict[MultiIndex, Fraction] = {}
    res: Dict[MultiIndex, Fraction] = {}
    failure = None
    for a in box:  # graded lex order, so every u < a is already set
        acc = l[a]
        for u, vu in v.items():
            if vu and u != a and leq(u, a):
                acc -= vu * k[sub_index(a, u)]
        v[a] = Fraction(0) if a in S else acc
        res[a] = acc - v[a] * k[zero_index(g)]
    vneg = [a for a in box if v[a] < 0]
    rneg = [a for a in box if res[a] < 0]
    if vneg or rneg:
        cands = [("v", a, v[a]) for a in vneg[:1]] + [("residual", a, res[a]) for a in rneg[:1]]
        failure = min(cands, key=lambda c: grlex_key(c[1]))
    return VSequence(d, S, v, res, not vneg, not rneg, failure)


def necessity_set(theta: DiagonalSeries, d) -> FrozenSet[MultiIndex]:
    """S = {a <= d : theta_{d-a} = 0}, the choice used to derive g_d >= 0."""
    d = tuple(d) if not isinstance(d, int) else (d,)
    return frozenset(a for a in lower_set(d) if theta[sub_index(d, a)] == 0)


# ---------------------------------------------------------------------------
# recursive chains (one variable)


@dataclass(frozen=True)
class ChainResult:
    indices: Tuple[int, ...]
    stages: Tuple[DiagonalSeries, ...]
    quotients: Tuple[DiagonalSeries, ...]
    increasing: bool
    verdict: Optional[bool]  # None for non-increasing chains
    first_failure: Optional[Tuple[int, int, Fraction]] = None  # (stage, degree, value)


def ell_chain(l: DiagonalSeries, k: DiagonalSeries, indices: Sequence[int]) -> ChainResult:
    """l_(m0) = l - (l/k)_{m0} x^{m0}, then repeat with each later index.

    The verdict (all coefficients of every stage / k nonnegative) is only
    reported for strictly increasing index sequences."""
    if l.variables != 1 or k.variables != 1:
        raise ValidationError("chains are defined for one-variable kernels")
    _check_normalized(k)
    idx = tuple(int(m) for m in indices)
    if len(set(idx)) != len(idx):
        raise ValidationError(f"repeated index in chain {idx}")
    n = min(l.degree, k.degree)
    if any(m < 0 or m > n for m in idx):
        raise ValidationError(f"chain indices must lie in [0, {n}]")
    kinv = k.truncate(n).reciprocal()
    cur = l.truncate(n)
    stages, quots = [], []
    for m in idx:
        c = (cur * kinv)[m]
        cur = cur - DiagonalSeries.monomial(1, n, m, c)
        stages.append(cur)
        quots.append(cur * kinv)
    increasing = all(a < b for a, b in zip(idx, idx[1:]))
    verdict, failure = None, None
    if increasing:
        verdict = True
        for s, q in enumerate(quots):
            neg = q.first_negative()
            if neg is not None:
                verdict, failure = False, (s, neg[0][0], neg[1])
                break
    return ChainResult(idx, tuple(stages), tuple(quots), increasing, verdict, failure)


# ---------------------------------------------------------------------------
# domain radius


def radial_section(theta: DiagonalSeries, weights: Optional[Sequence] = None) -> DiagonalSeries:
    """One-variable series sum_n (sum_{|a|=n} theta_a prod w_i^{a_i}) y^n.

    With w_i = |u_i|^2 for a unit direction u, y = r^2 traces the ray r*u.
    The default direction is the diagonal (w_i = 1/g).
    """
    g = theta.variables
    if weights is None:
        weights = [Fraction(1, g)] * g
    weights = [Fraction(w) for w in weights]
    if len(weights) != g or any(w < 0 for w in weights) or sum(weights) != 1:
        raise ValidationError("weights must be g nonnegative rationals summing to 1")
    out: Dict[int, Fraction] = {}
    for a, v in theta.items():
        c = v
        for wi, ai in zip(weights, a):
            c *= wi**ai
        out[sum(a)] = out.get(sum(a), Fraction(0)) + c
    return DiagonalSeries(1, theta.degree, {(m,): c for m, c in out.items()})


def omega1_radius(theta: DiagonalSeries, tol: float = 1e-12, max_doublings: int = 200) -> float:
    """The r > 0 with sum_n theta_n r^(2n) = 1 for the truncated series.

    Returns inf if the truncated sum never reaches 1 while the bracket is
    doubled ``max_doublings`` times."""
    if theta.variables != 1:
        theta = radial_section(theta)
    if theta[0] != 0:
        raise ValidationError("theta_0 must be 0")
    neg = theta.first_negative()
    if neg is not None:
        raise ValidationError(f"negative coefficient {neg[1]} at degree {neg[0][0]}")
    if not theta.coeffs:
        raise ValidationError("theta is identically zero")
    coeffs = [(a[0], float(v)) for a, v in theta.items()]

    def f(r: float) -> float:
        y = r * r
        return math.fsum(c * y**m for m, c in coeffs) - 1.0

    hi = 1.0
    for _ in range(max_doublings):
        if f(hi) >= 0:
            break
        hi *= 2
    else:
        return math.inf
    if f(hi) == 0:
        return hi
    return bisect(f, 0.0, hi, xtol=tol, rtol=4 * 2.220446049250313e-16, maxiter=2000)


# ---------------------------------------------------------------------------
# necessary diagonal growth for pairs with the Bergman kernel


@dataclass(frozen=True)
class AuditRow:
    n: int
    pivot: Fraction  # l^(n)_{nn}
    doubling_holds: bool  # l^(n)_{nn} >= 2 l^(n-1)_{(n-1)(n-1)}
    growth_holds: bool  # l_{nn} >= 2^n l_00


@dataclass(frozen=True)
class BergmanAudit:
    degree: int
    rows: Tuple[AuditRow, ...]
    regular_to: int

    @property
    def passed(self) -> bool:
        return all(r.doubling_holds and r.growth_holds for r in self.rows)

    @property
    def first_failure(self) -> Optional[int]:
        for r in self.rows:
            if not (r.doubling_holds and r.growth_holds):
                return r.n
        return None


def bergman_necessity_audit(l, n: Optional[int] = None) -> BergmanAudit:
    """Check l^(m)_{mm} >= 2 l^(m-1)_{(m-1)(m-1)} and l_mm >= 2^m l_00 for m <= n,
    both necessary for (Bergman, l) to be a CP pair."""
    from .schurtools import coeff_schur_chain

    if isinstance(l, DiagonalSeries):
        l = BivariateSeries.from_diagonal(l)
    n = l.degree if n is None else n
    chain = coeff_schur_chain(l, n)
    piv = [chain.stages[m][m, m].re for m in range(n + 1)]
    l00 = l[0, 0].re
    rows = []
    for m in range(1, n + 1):
        rows.append(AuditRow(m, piv[m], piv[m] >= 2 * piv[m - 1], l[m, m].re >= 2**m * l00))
    return BergmanAudit(n, tuple(rows), chain.regular_to)
