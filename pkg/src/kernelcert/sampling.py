"""Random grids, float Gram checks and projections onto kernel spans."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .exact import NumericalBreakdown, ValidationError
from .linalg import min_eigenvalue
from .series import DiagonalSeries

Kernel = Callable[[object, object], complex]


@dataclass(frozen=True)
class Grid:
    points: Tuple
    seed: Optional[int]
    radius: float

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def random_grid(count: int, radius: float, seed: int, g: int = 1, separation: float = 1e-8) -> Grid:
    """``count`` points drawn uniformly from the ball of the given radius in C^g.

    Points are scalars for g = 1 and tuples otherwise.  Draws closer than
    ``separation`` to an earlier point are rejected."""
    if count < 0 or not (0 < radius) or g < 1:
        raise ValidationError("need count >= 0, radius > 0 and g >= 1")
    rng = np.random.default_rng(seed)
    pts: List[np.ndarray] = []
    tries = 0
    while len(pts) < count:
        tries += 1
        if tries > 100 * (count + 1):
            raise ValidationError("could not draw separated points")
        v = rng.normal(size=g) + 1j * rng.normal(size=g)
        v *= radius * rng.uniform() ** (1 / (2 * g)) / np.linalg.norm(v)
        if all(np.linalg.norm(v - p) >= separation for p in pts):
            pts.append(v)
    out = tuple(complex(p[0]) for p in pts) if g == 1 else tuple(tuple(complex(x) for x in p) for p in pts)
    return Grid(out, seed, radius)


def gram_matrix(k: Kernel, points: Sequence) -> np.ndarray:
    G = np.array([[complex(k(a, b)) for b in points] for a in points], dtype=complex).reshape(len(points), len(points))
    if not np.all(np.isfinite(G)):
        raise ValidationError("kernel evaluation is not finite on the grid")
    return G


@dataclass(frozen=True)
class GramCheck:
    ok: bool
    min_eig: float
    norm: float
    tol: float
    seed: Optional[int]
    points: int


def gram_psd(k: Kernel, grid, tol: float = 1e-9) -> GramCheck:
    """lambda_min >= -tol * ||G|| for the Gram matrix on the grid."""
    pts = tuple(grid)
    lo, nrm = min_eigenvalue(gram_matrix(k, pts))
    return GramCheck(lo >= -tol * nrm, lo, nrm, tol, getattr(grid, "seed", None), len(pts))


# ---------------------------------------------------------------------------
# projections in a one-variable diagonal space


@dataclass(frozen=True)
class Projection:
    """Orthogonal projection in H(l) truncated at degree N, one variable.

    The range is span({z^j : j < m} U {l(., u) : u in span_points}).  The
    matrix acts on coordinates in the orthonormal basis e_a = sqrt(l_a) z^a."""

    l: DiagonalSeries
    monomials: int
    span_points: Tuple[complex, ...]
    matrix: np.ndarray
    condition: float

    @property
    def degree(self) -> int:
        return self.l.degree

    def _weights(self) -> np.ndarray:
        return np.array([float(self.l[a]) for a in range(self.l.degree + 1)])

    def coords(self, f_coeffs: Sequence[complex]) -> np.ndarray:
        """Orthonormal coordinates of f = sum_a f_a z^a."""
        n = self.l.degree
        fc = np.asarray(f_coeffs, dtype=complex).ravel()
        if len(fc) > n + 1:
            raise ValidationError("f has degree above the truncation")
        f = np.zeros(n + 1, dtype=complex)
        f[: len(fc)] = fc
        return f / np.sqrt(self._weights())

    def section(self, w: complex) -> np.ndarray:
        """Coordinates of l(., w)."""
        return np.sqrt(self._weights()) * np.conj(complex(w)) ** np.arange(self.l.degree + 1)

    def apply(self, f_coeffs: Sequence[complex]) -> np.ndarray:
        """Coefficients of P f."""
        return (self.matrix @ self.coords(f_coeffs)) * np.sqrt(self._weights())

    def evaluate(self, coords: np.ndarray, z: complex) -> complex:
        """Value at z of the function with the given orthonormal coordinates."""
        return complex(np.sum(coords * np.sqrt(self._weights()) * complex(z) ** np.arange(self.l.degree + 1)))

    def kernel(self, z: complex, w: complex) -> complex:
        """(P l(., w))(z), the reproducing kernel of the range."""
        return self.evaluate(self.matrix @ self.section(w), z)

    def complement_kernel(self, z: complex, w: complex) -> complex:
        """((I - P) l(., w))(z)."""
        sec = self.section(w)
        return self.evaluate(sec - self.matrix @ sec, z)

    def distance(self, f_coeffs: Sequence[complex]) -> float:
        """||f - P f|| in H(l)."""
        return projection_distance(self, f_coeffs)


def span_projection(
    l: DiagonalSeries, points: Sequence[complex], monomials: int = 0, max_condition: float = 1e10
) -> Projection:
    """Projection onto the first ``monomials`` powers of z together with the
    kernel sections at ``points``.  Spans whose Gram matrix has condition
    number above ``max_condition`` are rejected, never regularized."""
    if l.variables != 1:
        raise ValidationError("projections are implemented for one variable")
    n = l.degree
    if any(not l[a] for a in range(n + 1)):
        raise ValidationError("kernel has a vanishing coefficient; the truncated space is degenerate")
    if not 0 <= monomials <= n + 1:
        raise ValidationError(f"monomial count must lie in [0, {n + 1}]")
    pts = tuple(complex(p) for p in points)
    w = np.sqrt(np.array([float(l[a]) for a in range(n + 1)]))
    cols = [np.eye(n + 1, dtype=complex)[:, j] / w[j] for j in range(monomials)]
    cols += [w * np.conj(u) ** np.arange(n + 1) for u in pts]
    if not cols:
        return Projection(l, monomials, pts, np.zeros((n + 1, n + 1), dtype=complex), 1.0)
    V = np.column_stack(cols)
    # cond(V* V) = cond(V)^2; the SVD keeps Q orthonormal without forming V* V
    Q, sv, _ = np.linalg.svd(V, full_matrices=False)
    ratio = sv[0] / sv[-1] if sv[-1] > 0 else np.inf
    cond = float(ratio * ratio) if ratio < 1e150 else np.inf
    if not np.isfinite(cond) or cond > max_condition:
        raise NumericalBreakdown(f"span Gram matrix has condition number {cond:.3e}")
    return Projection(l, monomials, pts, Q @ Q.conj().T, cond)


def projection_distance(P: Projection, f_coeffs: Sequence[complex]) -> float:
    """||f - P f||_{H(l)} for a polynomial f given by its coefficients."""
    x = P.coords(f_coeffs)
    return float(np.linalg.norm(x - P.matrix @ x))


def projection_gap(P: Projection, Q: Projection) -> float:
    """Operator norm ||P - Q|| on the truncated space."""
    if P.degree != Q.degree:
        raise ValidationError("projections live on different truncations")
    return float(np.linalg.norm(P.matrix - Q.matrix, 2))
