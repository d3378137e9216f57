"""Exact PSD decisions over Gaussian rationals, float norms and Parrott completions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exact import ONE, ZERO, Gaussian, NumericalBreakdown, ValidationError


@dataclass(frozen=True, eq=False)
class HermitianExact:
    """Hermitian matrix with Gaussian-rational entries (checked on construction)."""

    rows: Tuple[Tuple[Gaussian, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Gaussian.coerce(v) for v in r) for r in self.rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValidationError("matrix must be square")
        for i in range(n):
            for j in range(i, n):
                if rows[j][i] != rows[i][j].conj():
                    raise ValidationError(f"not Hermitian at ({i}, {j})")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij) -> Gaussian:
        i, j = ij
        return self.rows[i][j]

    def principal(self, idx: Sequence[int]) -> "HermitianExact":
        return HermitianExact(tuple(tuple(self.rows[i][j] for j in idx) for i in idx))

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(v) for v in r] for r in self.rows], dtype=complex).reshape(self.n, self.n)

    def quadratic_form(self, v: Sequence[Gaussian]) -> Fraction:
        """v* H v, exactly (real for Hermitian H)."""
        total = ZERO
        for i, vi in enumerate(v):
            if not vi:
                continue
            row = self.rows[i]
            acc = ZERO
            for j, vj in enumerate(v):
                if vj and row[j]:
                    acc = acc + row[j] * vj
            total = total + vi.conj() * acc
        assert total.im == 0
        return total.re

    @classmethod
    def identity(cls, n: int) -> "HermitianExact":
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))


@dataclass(frozen=True)
class PsdWitness:
    kind: str  # "negative_diagonal" | "zero_diagonal_row", seen in the Schur complement at failure
    position: Tuple[int, ...]
    vector: Tuple[Gaussian, ...]
    value: Fraction  # v* H v < 0
    minor_indices: Tuple[int, ...]
    minor_det: Fraction


@dataclass(frozen=True)
class PsdVerdict:
    is_psd: bool
    witness: Optional[PsdWitness] = None
    pivots: Tuple[int, ...] = ()

    def __bool__(self):
        return self.is_psd


def _solve(A: List[List[Gaussian]], b: List[Gaussian]) -> List[Gaussian]:
    """Exact Gaussian elimination with nonzero pivoting."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c])
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c] / piv
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _lift(H: HermitianExact, pivots: List[int], tail: Dict[int, Gaussian]) -> List[Gaussian]:
    # v_P = -H_PP^{-1} H_{P,R} v_R, so that v*Hv equals the Schur-complement form
    v = [ZERO] * H.n
    for i, x in tail.items():
        v[i] = x
    if pivots:
        A = [[H[p, q] for q in pivots] for p in pivots]
        rhs = []
        for p in pivots:
            acc = ZERO
            for i, x in tail.items():
                acc = acc + H[p, i] * x
            rhs.append(acc)
        sol = _solve(A, rhs)
        for p, x in zip(pivots, sol):
            v[p] = -x
    return v


def psd_test_exact(H: HermitianExact) -> PsdVerdict:
    """Exact PSD decision by pivoted LDL*.

    Each stage rejects on a negative diagonal entry, rejects a zero diagonal
    entry whose row is not zero, and otherwise pivots on the largest positive
    diagonal entry (lowest index on ties) and forms the Schur complement.
    A rejection carries a vector v with v*Hv < 0 and the negative principal
    minor it certifies.
    """
    n = H.n
    S = [list(r) for r in H.rows]
    active = list(range(n))
    pivots: List[int] = []
    pivot_vals: List[Fraction] = []

    def reject(kind, position, tail, local_det, extra):
        v = _lift(H, pivots, tail)
        value = H.quadratic_form(v)
        assert value < 0, "witness must have a negative quadratic form"
        det = local_det
        for d in pivot_vals:
            det *= d
        return PsdVerdict(
            False,
            PsdWitness(kind, position, tuple(v), value, tuple(sorted(pivots + extra)), det),
            tuple(pivots),
        )

    while active:
        for i in active:
            d = S[i][i].re
            if d < 0:
                return reject("negative_diagonal", (i,), {i: ONE}, d, [i])
        for i in active:
            if S[i][i].re == 0:
                for j in active:
                    if j != i and S[i][j]:
                        sij, sjj = S[i][j], S[j][j].re
                        t = (abs(sjj) + 1) / (2 * sij.abs2())
                        # v = alpha e_i + e_j gives 2Re(conj(alpha) S_ij) + S_jj < 0
                        alpha = -(sij * t)
                        return reject(
                            "zero_diagonal_row", (i, j), {i: alpha, j: ONE}, -sij.abs2(), [i, j]
                        )
        active = [i for i in active if S[i][i].re != 0]
        if not active:
            break
        p = max(active, key=lambda i: (S[i][i].re, -i))
        d = S[p][p].re
        pivots.append(p)
        pivot_vals.append(d)
        active.remove(p)
        prow = S[p]
        for i in active:
            sip = S[i][p]
            if sip:
                f = sip / d
                row = S[i]
                for j in active:
                    if prow[j]:
                        row[j] = row[j] - f * prow[j]
    return PsdVerdict(True, None, tuple(pivots))


def contraction_test_exact(G: HermitianExact) -> PsdVerdict:
    """PSD test of a congruent Gram form I - C*C (scaled); PSD iff ||C|| <= 1."""
    return psd_test_exact(G)


# ---------------------------------------------------------------------------
# float paths


def _as_float_matrix(M) -> np.ndarray:
    if isinstance(M, HermitianExact):
        M = M.to_numpy()
    A = np.atleast_2d(np.asarray(M, dtype=complex))
    if not np.all(np.isfinite(A)):
        raise ValidationError("matrix has non-finite entries")
    return A


def operator_norm(M) -> float:
    """Largest singular value."""
    A = _as_float_matrix(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def min_eigenvalue(H) -> Tuple[float, float]:
    """(smallest eigenvalue, spectral norm) of a Hermitian matrix, in floats."""
    A = _as_float_matrix(H)
    if A.size == 0:
        return 0.0, 0.0
    A = (A + A.conj().T) / 2
    ev = np.linalg.eigvalsh(A)
    return float(ev[0]), float(max(abs(ev[0]), abs(ev[-1])))


def psd_float(H, tol: float = 1e-9) -> bool:
    lo, nrm = min_eigenvalue(H)
    return lo >= -tol * nrm


def _psd_sqrt_pinv(M: np.ndarray, cutoff: float) -> np.ndarray:
    """Pseudoinverse of the PSD square root of Hermitian M."""
    w, V = np.linalg.eigh((M + M.conj().T) / 2)
    root = np.sqrt(np.clip(w, 0.0, None))
    inv = np.where(root > cutoff, 1.0 / np.where(root > cutoff, root, 1.0), 0.0)
    return (V * inv) @ V.conj().T


@dataclass(frozen=True)
class ParrottConfig:
    slack: float = 1e-9
    cutoff: float = 1e-12
    guarantee: float = 1e-8


def parrott_complete(A, C, D, config: ParrottConfig = ParrottConfig()) -> np.ndarray:
    """Central completion B of [[A, B], [C, D]].

    With mu = max(||[A; C]||, ||[C D]||) the blocks are scaled to contractions,
    B = -X C* Y with A = X (I - C*C)^(1/2) and D = (I - CC*)^(1/2) Y, then
    rescaled, so the completed norm is at most mu.
    """
    A, C, D = (_as_float_matrix(x) for x in (A, C, D))
    if A.shape[1] != C.shape[1] or C.shape[0] != D.shape[0]:
        raise ValidationError(f"incompatible blocks A{A.shape} C{C.shape} D{D.shape}")
    col = operator_norm(np.vstack([A, C]))
    row = operator_norm(np.hstack([C, D]))
    mu = max(col, row)
    if mu > 1 + config.slack:
        raise ValidationError(f"constraint norm {mu:.3e} exceeds 1 beyond slack")
    B = np.zeros((A.shape[0], D.shape[1]), dtype=complex)
    if mu == 0:
        return B
    a, c, d = A / mu, C / mu, D / mu
    q, r = c.shape[1], c.shape[0]
    X = a @ _psd_sqrt_pinv(np.eye(q) - c.conj().T @ c, config.cutoff)
    Y = _psd_sqrt_pinv(np.eye(r) - c @ c.conj().T, config.cutoff) @ d
    B = -(X @ c.conj().T @ Y) * mu
    full = np.block([[A, B], [C, D]])
    if operator_norm(full) > mu + config.guarantee:
        raise NumericalBreakdown("Parrott completion lost accuracy near the norm boundary")
    return B
