"""Pick matrices, one-point extensions, Caratheodory block data and finite kernels."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .exact import ONE, ZERO, Gaussian, NumericalBreakdown, ValidationError
from .linalg import (
    HermitianExact,
    ParrottConfig,
    PsdVerdict,
    contraction_test_exact,
    min_eigenvalue,
    operator_norm,
    parrott_complete,
)
from .series import (
    CoInvariantSet,
    DiagonalSeries,
    MultiIndex,
    grlex_key,
    leq,
    sub_index,
    validate_coinvariant,
    zero_index,
)

Kernel = Callable[[object, object], complex]


class InfeasibleError(ValidationError):
    def __init__(self, message: str, verdict: Optional[PsdVerdict] = None):
        super().__init__(message)
        self.verdict = verdict


class DependentKernelsError(NumericalBreakdown):
    """Kernel functions at the data points are numerically dependent."""


# ---------------------------------------------------------------------------
# Pick problems


@dataclass(frozen=True)
class PickProblem:
    points: Tuple
    targets: Tuple[np.ndarray, ...]
    k: Kernel
    l: Kernel

    def __post_init__(self):
        pts = tuple(self.points)
        tg = tuple(np.atleast_2d(np.asarray(W, dtype=complex)) for W in self.targets)
        if len(pts) != len(tg):
            raise ValidationError("one target per point is required")
        if tg and any(W.shape != tg[0].shape or W.shape[0] != W.shape[1] for W in tg):
            raise ValidationError("targets must be square and of equal size")
        for i in range(len(pts)):
            for j in range(i):
                if np.allclose(np.atleast_1d(pts[i]), np.atleast_1d(pts[j]), rtol=0, atol=0):
                    raise ValidationError(f"points {j} and {i} coincide")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "targets", tg)

    @property
    def block(self) -> int:
        return self.targets[0].shape[0] if self.targets else 1


def _pick_parts(points, targets, k: Kernel, l: Kernel, J: int) -> Tuple[np.ndarray, np.ndarray]:
    """The two terms [l(z_i, z_j) I] and [k(z_i, z_j) W_i W_j*]."""
    n = len(points)
    Lm = np.zeros((n * J, n * J), dtype=complex)
    Km = np.zeros((n * J, n * J), dtype=complex)
    I = np.eye(J)
    for i, zi in enumerate(points):
        for j, zj in enumerate(points):
            lv, kv = complex(l(zi, zj)), complex(k(zi, zj))
            if not (np.isfinite(lv) and np.isfinite(kv)):
                raise ValidationError(f"kernel evaluation failed at points {i}, {j}")
            Lm[i * J : (i + 1) * J, j * J : (j + 1) * J] = lv * I
            Km[i * J : (i + 1) * J, j * J : (j + 1) * J] = kv * targets[i] @ targets[j].conj().T
    return Lm, Km


def _pick_blocks(points, targets, k: Kernel, l: Kernel, J: int) -> np.ndarray:
    Lm, Km = _pick_parts(points, targets, k, l, J)
    return Lm - Km


def pick_matrix(p: PickProblem) -> np.ndarray:
    """Block matrix with (i, j) block l(z_i, z_j) I - k(z_i, z_j) W_i W_j*."""
    return _pick_blocks(p.points, p.targets, p.k, p.l, p.block)


def kernel_schur_point(k: Kernel, z) -> Kernel:
    """k^z(w, v) = k(w, v) - k(w, z) k(z, v) / k(z, z)."""
    kzz = k(z, z)
    if kzz == 0:
        raise ValidationError("kernel vanishes on the diagonal at the base point")

    def kz(w, v):
        return k(w, v) - k(w, z) * k(z, v) / kzz

    return kz


@dataclass(frozen=True)
class ExtensionVerdict:
    feasible: bool
    data_min_eig: float
    extension_min_eig: float
    norm: float
    tol: float


def one_point_extension_feasible(
    p: PickProblem, z_new, tol: float = 1e-9, independence_tol: float = 1e-10
) -> ExtensionVerdict:
    """Whether the data extends to z_new with some target keeping the Pick matrix PSD.

    PSD checks use tolerance tol relative to the largest operand norm.

    Feasible iff the Pick matrix of the data is PSD and so is
    [l^{z}(z_i, z_j) I - k^{z}(z_i, z_j) W_i W_j*] with z = z_new."""
    if not p.points:
        return ExtensionVerdict(True, 0.0, 0.0, 0.0, tol)
    for i, zi in enumerate(p.points):
        if np.allclose(np.atleast_1d(zi), np.atleast_1d(z_new), rtol=0, atol=0):
            raise ValidationError(f"new point coincides with point {i}")
    pts = list(p.points) + [z_new]
    G = np.array([[complex(p.l(a, b)) for b in pts] for a in pts])
    ev = np.linalg.eigvalsh((G + G.conj().T) / 2)
    if ev[0] <= independence_tol * ev[-1]:
        raise DependentKernelsError("l-kernel functions at the n+1 points are dependent")
    L0, K0 = _pick_parts(p.points, p.targets, p.k, p.l, p.block)
    L1, K1 = _pick_parts(p.points, p.targets, kernel_schur_point(p.k, z_new), kernel_schur_point(p.l, z_new), p.block)
    ok0, lo0 = _difference_check(L0, K0, tol)
    ok1, lo1 = _difference_check(L1, K1, tol)
    scale = max(operator_norm(M) for M in (L0, K0, L1, K1))
    return ExtensionVerdict(ok0 and ok1, lo0, lo1, scale, tol)


# ---------------------------------------------------------------------------
# Caratheodory data


def _gmat(M) -> Tuple[Tuple[Gaussian, ...], ...]:
    if isinstance(M, (int, Fraction, str, Gaussian, complex, float)):
        M = [[M]]
    return tuple(tuple(Gaussian.coerce(v) for v in row) for row in M)


def _mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return tuple(
        tuple(sum((A[i][t] * B[t][j] for t in range(m) if A[i][t] and B[t][j]), ZERO) for j in range(p))
        for i in range(n)
    )


def _adjoint(A):
    return tuple(tuple(A[j][i].conj() for j in range(len(A))) for i in range(len(A[0])))


@dataclass(frozen=True)
class CaratheodoryData:
    F: CoInvariantSet
    J: int
    coeffs: Mapping[MultiIndex, Tuple[Tuple[Gaussian, ...], ...]]

    def __post_init__(self):
        v = validate_coinvariant(self.F)
        if not v.ok:
            raise ValidationError(f"index set is not co-invariant; missing {v.witness}")
        c = {}
        for a in self.F.indices:
            M = _gmat(self.coeffs.get(a, [[0] * self.J for _ in range(self.J)]))
            if len(M) != self.J or any(len(r) != self.J for r in M):
                raise ValidationError(f"coefficient at {a} is not {self.J}x{self.J}")
            c[a] = M
        extra = set(self.coeffs) - set(self.F.indices)
        if extra:
            raise ValidationError(f"coefficients given outside the index set: {sorted(extra)}")
        object.__setattr__(self, "coeffs", c)

    def order(self) -> List[MultiIndex]:
        return self.F.sorted()

    def float_coeffs(self) -> Dict[MultiIndex, np.ndarray]:
        return {a: np.array([[complex(v) for v in r] for r in M]) for a, M in self.coeffs.items()}


def _gram_form(rows_idx, cols_idx, c, k: DiagonalSeries, l: DiagonalSeries, J: int, skip_zero: bool):
    """l_b delta I - sum_{u <= b, b'} k_u c*_{b-u} c_{b'-u}; u = 0 dropped when skip_zero."""
    z = zero_index(k.variables)
    n = len(rows_idx)
    G = [[ZERO] * (n * J) for _ in range(n * J)]
    adj = {a: _adjoint(M) for a, M in c.items()}
    for p, b in enumerate(rows_idx):
        for q, b2 in enumerate(rows_idx):
            acc = [[ZERO] * J for _ in range(J)]
            for u in cols_idx:
                if skip_zero and u == z:
                    continue
                if leq(u, b) and leq(u, b2) and k[u]:
                    prod_ = _mat_mul(adj[sub_index(b, u)], c[sub_index(b2, u)])
                    for i in range(J):
                        for j in range(J):
                            if prod_[i][j]:
                                acc[i][j] = acc[i][j] + prod_[i][j] * k[u]
            for i in range(J):
                for j in range(J):
                    val = -acc[i][j]
                    if p == q and i == j:
                        val = val + l[b]
                    G[p * J + i][q * J + j] = val
    return HermitianExact(tuple(tuple(r) for r in G))


def _check_degrees(F_sorted, k, l, extra: int = 0):
    top = max(sum(a) for a in F_sorted) + extra
    if top > min(k.degree, l.degree):
        raise ValidationError(f"kernels truncated below degree {top}")


def caratheodory_gram(data: CaratheodoryData, k: DiagonalSeries, l: DiagonalSeries) -> HermitianExact:
    """Exact Gram form whose PSD-ness is equivalent to the block matrix
    C_{a,b} = c_{b-a} sqrt(k_a / l_b) (a <= b) being a contraction."""
    order = data.order()
    _check_degrees(order, k, l)
    return _gram_form(order, order, data.coeffs, k, l, data.J, skip_zero=False)


def caratheodory_gram_plus(data: CaratheodoryData, k, l, d) -> HermitianExact:
    """The same form over (F + {d}) minus 0 with the u = 0 term dropped; it
    does not involve c_d."""
    d = (d,) if isinstance(d, int) else tuple(d)
    order = [a for a in data.order() if a != zero_index(data.F.variables)] + [d]
    c = dict(data.coeffs)
    c[d] = tuple(tuple(ZERO for _ in range(data.J)) for _ in range(data.J))
    _check_degrees(order, k, l)
    return _gram_form(order, order, c, k, l, data.J, skip_zero=True)


def caratheodory_matrix(data: CaratheodoryData, k, l, extra: Optional[Tuple[MultiIndex, np.ndarray]] = None):
    """Float block matrix C over F (or F + {d} when ``extra`` = (d, c_d))."""
    order = data.order()
    c = data.float_coeffs()
    if extra is not None:
        order = order + [tuple(extra[0])]
        c[tuple(extra[0])] = np.atleast_2d(np.asarray(extra[1], dtype=complex))
    J = data.J
    n = len(order)
    C = np.zeros((n * J, n * J), dtype=complex)
    for p, a in enumerate(order):
        for q, b in enumerate(order):
            if leq(a, b):
                C[p * J : (p + 1) * J, q * J : (q + 1) * J] = c[sub_index(b, a)] * np.sqrt(float(k[a]) / float(l[b]))
    return C, order


@dataclass(frozen=True)
class ExtensionConfig:
    rounding: float = 1e-12  # c_d is rounded to this rational grid
    slack: float = 1e-8  # allowed norm excess of float-checked stages
    parrott: ParrottConfig = ParrottConfig()


@dataclass(frozen=True)
class CaratheodoryExtension:
    data: CaratheodoryData
    d: MultiIndex
    c_d: np.ndarray
    slack: float  # max(0, ||C_extended|| - 1), with c_d rounded
    exact_psd: bool  # exact verdict for the rounded extension
    exact_inputs: bool  # whether both preconditions held exactly


def _round_gauss(x: complex, step: float) -> Gaussian:
    inv = round(1 / step)
    return Gaussian(Fraction(round(x.real * inv), inv), Fraction(round(x.imag * inv), inv))


def _contraction_or_raise(G: HermitianExact, C: np.ndarray, slack: float, what: str) -> bool:
    verdict = contraction_test_exact(G)
    if verdict.is_psd:
        return True
    excess = operator_norm(C) - 1
    if excess > slack:
        raise InfeasibleError(f"{what} is not a contraction (norm excess {excess:.3e})", verdict)
    return False


def caratheodory_extend(
    data: CaratheodoryData,
    k: DiagonalSeries,
    l: DiagonalSeries,
    d,
    config: ExtensionConfig = ExtensionConfig(),
) -> CaratheodoryExtension:
    """Add the coefficient c_d keeping the block matrix contractive.

    Only the (0, d) entry c_d / sqrt(l_d) of the extended matrix is unknown.
    Row 0 over F is A, rows F+ over F are C, rows F+ at column d are D;
    [A; C] is C over F padded with a zero row and [C D] is C over F+ padded
    with a zero column, so Parrott's central completion B gives c_d = sqrt(l_d) B.
    """
    g = data.F.variables
    d = tuple(d) if not isinstance(d, int) else (d,)
    if len(d) != g:
        raise ValidationError("d has the wrong number of variables")
    if d in data.F.indices:
        raise ValidationError(f"{d} already belongs to the index set")
    missing = [a for a in _indices_below(g, sum(d)) if a not in data.F.indices]
    if missing:
        raise ValidationError(f"index {missing[0]} of lower degree than d is missing")
    _check_degrees([d], k, l)
    J = data.J
    C_F, order = caratheodory_matrix(data, k, l)
    exact_in = _contraction_or_raise(caratheodory_gram(data, k, l), C_F, config.slack, "data matrix")

    # C over F+ (rows and columns F+, the last one being d with c_d absent)
    z = zero_index(g)
    plus = [a for a in order if a != z] + [d]
    cf = data.float_coeffs()
    cf[d] = np.zeros((J, J), dtype=complex)
    C_plus = np.zeros((len(plus) * J, len(plus) * J), dtype=complex)
    for p, a in enumerate(plus):
        for q, b in enumerate(plus):
            if leq(a, b):
                C_plus[p * J : (p + 1) * J, q * J : (q + 1) * J] = cf[sub_index(b, a)] * np.sqrt(float(k[a]) / float(l[b]))
    exact_in &= _contraction_or_raise(caratheodory_gram_plus(data, k, l, d), C_plus, config.slack, "shifted matrix")

    # Parrott blocks; column 0 of [C D] is zero, so C and D come from C_plus
    nF = len(order)
    A = C_F[0:J, :]
    Cb = np.zeros((len(plus) * J, nF * J), dtype=complex)
    for p, a in enumerate(plus):
        for q, b in enumerate(order):
            if b != z and leq(a, b):
                Cb[p * J : (p + 1) * J, q * J : (q + 1) * J] = cf[sub_index(b, a)] * np.sqrt(float(k[a]) / float(l[b]))
    D = C_plus[:, -J:]
    cfg = config.parrott
    mu = max(operator_norm(np.vstack([A, Cb])), operator_norm(np.hstack([Cb, D])))
    if mu > 1:
        # inputs certified up to slack; complete the normalized problem
        A, Cb, D = A / mu, Cb / mu, D / mu
    B = parrott_complete(A, Cb, D, cfg)
    cd = np.sqrt(float(l[d])) * B
    cd_exact = tuple(tuple(_round_gauss(complex(v), config.rounding) for v in row) for row in cd)
    coeffs = dict(data.coeffs)
    coeffs[d] = cd_exact
    new = CaratheodoryData(CoInvariantSet(g, data.F.indices | {d}), J, coeffs)
    C_new, _ = caratheodory_matrix(new, k, l)
    slack = max(0.0, operator_norm(C_new) - 1)
    exact = contraction_test_exact(caratheodory_gram(new, k, l)).is_psd
    return CaratheodoryExtension(new, d, np.array([[complex(v) for v in r] for r in cd_exact]), slack, exact, exact_in)


def _indices_below(g: int, n: int):
    from .series import indices_upto

    return indices_upto(g, n - 1) if n > 0 else ()


# ---------------------------------------------------------------------------
# pointwise certificate checks and finite kernels


@dataclass(frozen=True)
class PointwiseVerdict:
    l_condition: bool  # l^z - p l is PSD
    k_condition: bool  # p k - k^z is PSD
    l_min_eig: float
    k_min_eig: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.l_condition and self.k_condition


def _difference_check(P: np.ndarray, Q: np.ndarray, tol: float) -> Tuple[bool, float]:
    """P - Q >= -tol * scale, where scale is the largest of ||P||, ||Q||, ||P - Q||.

    Measuring against the operands keeps an exact identity P = Q from
    failing on rounding noise."""
    lo, nrm = min_eigenvalue(P - Q)
    scale = max(nrm, operator_norm(P), operator_norm(Q))
    return lo >= -tol * scale, lo


def shimorin_pointwise_check(k: Kernel, l: Kernel, p: Kernel, z, grid: Sequence, tol: float = 1e-9) -> PointwiseVerdict:
    """Float PSD checks of l^z - p l and p k - k^z as Gram matrices on the grid."""
    kz, lz = kernel_schur_point(k, z), kernel_schur_point(l, z)
    g = list(grid)
    LZ = np.array([[complex(lz(a, b)) for b in g] for a in g])
    PL = np.array([[complex(p(a, b) * l(a, b)) for b in g] for a in g])
    PK = np.array([[complex(p(a, b) * k(a, b)) for b in g] for a in g])
    KZ = np.array([[complex(kz(a, b)) for b in g] for a in g])
    ok1, lo1 = _difference_check(LZ, PL, tol)
    ok2, lo2 = _difference_check(PK, KZ, tol)
    return PointwiseVerdict(ok1, ok2, lo1, lo2, tol)


def finite_kernel(K: HermitianExact) -> Kernel:
    """Evaluator (i, j) -> K[i, j] for a kernel on {0, ..., n-1}."""
    return lambda i, j: K[i, j]


def finite_schur_point(K: HermitianExact, t: int) -> HermitianExact:
    """Exact K^t for a kernel on a finite set."""
    ktt = K[t, t]
    if not ktt:
        raise ValidationError("kernel vanishes on the diagonal at the base point")
    n = K.n
    return HermitianExact(tuple(tuple(K[i, j] - K[i, t] * K[t, j] / ktt for j in range(n)) for i in range(n)))


def irreducible_components(K: HermitianExact) -> List[Tuple[int, ...]]:
    """Connected components of the nonzero pattern of K."""
    n = K.n
    adj = csr_matrix(np.array([[1 if K[i, j] else 0 for j in range(n)] for i in range(n)], dtype=int))
    count, labels = connected_components(adj, directed=False)
    comps: Dict[int, List[int]] = {}
    for i, lab in enumerate(labels):
        comps.setdefault(lab, []).append(i)
    return sorted((tuple(c) for c in comps.values()), key=lambda c: c[0])


@dataclass(frozen=True)
class PatternViolation:
    kind: str  # "l_nonzero" or "third_point"
    z: int
    w: int
    v: Optional[int] = None


def zero_pattern_audit(K: HermitianExact, L: HermitianExact) -> List[PatternViolation]:
    """Necessary conditions on zeros of a CP pair: K[z,w] = 0 forces L[z,w] = 0,
    and for every third point v either L[z,v] = L[w,v] = 0 or K[z,v] = 0 or
    K[w,v] = 0.  Any violation shows (K, L) is not a CP pair."""
    if K.n != L.n:
        raise ValidationError("kernels live on sets of different size")
    n = K.n
    out: List[PatternViolation] = []
    for z in range(n):
        for w in range(z + 1, n):
            if K[z, w]:
                continue
            if L[z, w]:
                out.append(PatternViolation("l_nonzero", z, w))
            for v in range(n):
                if v in (z, w):
                    continue
                if not (L[z, v] == 0 and L[w, v] == 0) and K[z, v] and K[w, v]:
                    out.append(PatternViolation("third_point", z, w, v))
    return out
