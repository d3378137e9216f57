"""Fixture kernels with pointwise evaluators and exact truncated series."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, prod
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .exact import ValidationError
from .linalg import HermitianExact
from .series import BivariateSeries, DiagonalSeries, indices_upto


def _pts(z):
    """Points are scalars in one variable or tuples in several."""
    if isinstance(z, (tuple, list, np.ndarray)):
        return tuple(z)
    return (z,)


def _inner(z, w):
    return sum(a * b.conjugate() for a, b in zip(_pts(z), _pts(w)))


@dataclass(frozen=True)
class KernelHandle:
    name: str
    params: Dict[str, object]
    variables: int
    evaluator: Callable
    series_fn: Optional[Callable[[int], object]] = None
    radius: float = 1.0  # points with norm below this are inside the domain

    def __call__(self, z, w):
        return self.evaluator(z, w)

    def series(self, n: int):
        if self.series_fn is None:
            raise ValidationError(f"{self.name} has no exact series form")
        return self.series_fn(n)


def _diag(g: int, n: int, coef: Callable) -> DiagonalSeries:
    return DiagonalSeries(g, n, {a: coef(a) for a in indices_upto(g, n)})


def szego() -> KernelHandle:
    return KernelHandle("szego", {}, 1, lambda z, w: 1 / (1 - _inner(z, w)), lambda n: _diag(1, n, lambda a: 1))


def bergman() -> KernelHandle:
    return KernelHandle(
        "bergman", {}, 1, lambda z, w: 1 / (1 - _inner(z, w)) ** 2, lambda n: _diag(1, n, lambda a: a[0] + 1)
    )


def geometric(c) -> KernelHandle:
    """1/(1 - c z conj(w)), on the disc of radius 1/sqrt(c)."""
    c = Fraction(c)
    if c <= 0:
        raise ValidationError("geometric ratio must be positive")
    cf = float(c)
    return KernelHandle(
        "geometric",
        {"c": str(c)},
        1,
        lambda z, w: 1 / (1 - cf * _inner(z, w)),
        lambda n: _diag(1, n, lambda a: c ** a[0]),
        radius=1 / math.sqrt(cf),
    )


def polydisc_weights(p) -> KernelHandle:
    """prod_i (1 - z_i conj(w_i))^(-p_i); coefficients prod_i C(a_i + p_i - 1, p_i - 1)."""
    p = tuple(int(x) for x in p)
    if not p or any(x < 1 for x in p):
        raise ValidationError("polydisc weights must be positive integers")
    g = len(p)

    def ev(z, w):
        zs, ws = _pts(z), _pts(w)
        return prod((1 - a * b.conjugate()) ** (-q) for a, b, q in zip(zs, ws, p))

    return KernelHandle(
        "polydisc",
        {"p": list(p)},
        g,
        ev,
        lambda n: _diag(g, n, lambda a: prod(comb(ai + pi - 1, pi - 1) for ai, pi in zip(a, p))),
    )


def _multinomial(a) -> int:
    return factorial(sum(a)) // prod(factorial(x) for x in a)


def ball_power(alpha: int, g: int) -> KernelHandle:
    """(1 - <z, w>)^(-alpha); coefficients C(|a| + alpha - 1, alpha - 1) * multinomial(a)."""
    alpha, g = int(alpha), int(g)
    if alpha < 1 or g < 1:
        raise ValidationError("alpha and g must be positive integers")
    return KernelHandle(
        "ball",
        {"alpha": alpha, "g": g},
        g,
        lambda z, w: (1 - _inner(z, w)) ** (-alpha),
        lambda n: _diag(g, n, lambda a: comb(sum(a) + alpha - 1, alpha - 1) * _multinomial(a)),
    )


def cubic_gap_kernel() -> KernelHandle:
    """1/((1 + x + 4x^2)(1 - 3x)) = 1/(1 - 2x + x^2 - 12x^3): diagonal with positive
    coefficients 1, 2, 3, 16, ... whose master certificate is not a formal
    certificate for the pair with 1/(1 - 3x)."""
    denom = [1, -2, 1, -12]

    def ev(z, w):
        x = _inner(z, w)
        return 1 / ((1 + x + 4 * x * x) * (1 - 3 * x))

    def ser(n):
        return DiagonalSeries.from_list(denom[: n + 1] + [0] * max(0, n - 3), n).reciprocal()

    # smallest pole of the denominator in x is 1/3
    return KernelHandle("cubic_gap", {}, 1, ev, ser, radius=1 / math.sqrt(3))


def offdiagonal_cp_P(n: int) -> BivariateSeries:
    """P = x(3 - 2z - 2 conj(w) + 2x) + 8 x^3/(1 - x), with x = z conj(w)."""
    entries = {(1, 1): 3, (2, 1): -2, (1, 2): -2, (2, 2): 2}
    for m in range(3, n + 1):
        entries[(m, m)] = entries.get((m, m), 0) + 8
    return BivariateSeries.from_dict(n, entries)


def offdiagonal_cp_kernel() -> KernelHandle:
    """s = 1/(1 - P) for the P of ``offdiagonal_cp_P``, a non-diagonal CP kernel."""

    def ev(z, w):
        x = z * w.conjugate()
        P = x * (3 - 2 * z - 2 * w.conjugate() + 2 * x) + 8 * x**3 / (1 - x)
        return 1 / (1 - P)

    def ser(n):
        if n < 3:
            raise ValidationError("truncation must be at least 3")
        return (1 - offdiagonal_cp_P(n)).reciprocal()

    return KernelHandle("offdiagonal_cp", {}, 1, ev, ser, radius=0.25)


@dataclass(frozen=True)
class GLambda:
    """g(z) = (conj(lam) z / |lam|) (2 - z conj(lam)) / sqrt(2 - |lam|^2) and its kernels.

    g(z) conj(g(w)) = z conj(w) (2 - z conj(lam)) (2 - lam conj(w)) / (2 - |lam|^2).
    """

    lam: complex

    def g(self, z):
        lam = self.lam
        return (lam.conjugate() * z / abs(lam)) * (2 - z * lam.conjugate()) / math.sqrt(2 - abs(lam) ** 2)

    def s(self, z, w):
        return 1 / (1 - self.g(z) * self.g(w).conjugate())

    def h(self, z, w):
        """2 z conj(w) (z - lam) conj(w - lam) / ((1 - z conj(w))^2 (2 - |lam|^2))."""
        lam = self.lam
        x = z * w.conjugate()
        return 2 * x * (z - lam) * (w - lam).conjugate() / ((1 - x) ** 2 * (2 - abs(lam) ** 2))

    def residual(self, z, w) -> float:
        """|(g(z) conj(g(w)) - 1) b(z,w) + 1 - h(z,w)| with b the Bergman kernel."""
        b = 1 / (1 - z * w.conjugate()) ** 2
        return abs((self.g(z) * self.g(w).conjugate() - 1) * b + 1 - self.h(z, w))

    def contains(self, z) -> bool:
        return abs(self.g(z)) < 1

    def s_handle(self) -> KernelHandle:
        return KernelHandle("s_lambda", {"lambda": [self.lam.real, self.lam.imag]}, 1, self.s, radius=1 / 3)

    def h_handle(self) -> KernelHandle:
        return KernelHandle("h_lambda", {"lambda": [self.lam.real, self.lam.imag]}, 1, self.h, radius=1 / 3)


def g_lambda(lam) -> GLambda:
    lam = complex(lam)
    if not 0 < abs(lam) < 1:
        raise ValidationError("need 0 < |lambda| < 1")
    return GLambda(lam)


@dataclass(frozen=True)
class FinitePair:
    K: HermitianExact
    L: HermitianExact

    def p(self, t: int) -> HermitianExact:
        """0/1 pattern: 0 on row and column t, 1 elsewhere."""
        n = self.K.n
        return HermitianExact(tuple(tuple(0 if t in (i, j) else 1 for j in range(n)) for i in range(n)))


def three_point_kernel() -> FinitePair:
    """A positive definite 3-point kernel paired with a diagonal-only kernel."""
    K = HermitianExact(((1, 1, 0), (1, 2, 1), (0, 1, 2)))
    L = HermitianExact.identity(3)
    return FinitePair(K, L)


CATALOG = {
    "szego": lambda **kw: szego(),
    "bergman": lambda **kw: bergman(),
    "geometric": lambda c=2, **kw: geometric(c),
    "polydisc": lambda p=(1,), **kw: polydisc_weights(p),
    "ball": lambda alpha=1, g=1, **kw: ball_power(alpha, g),
    "cubic_gap": lambda **kw: cubic_gap_kernel(),
    "offdiagonal_cp": lambda **kw: offdiagonal_cp_kernel(),
}


def lookup(name: str, **params) -> KernelHandle:
    if name in ("h_lambda", "s_lambda"):
        lam = params.get("lam", params.get("lambda", 0.2))
        if isinstance(lam, (list, tuple)):
            lam = complex(lam[0], lam[1])
        gl = g_lambda(lam)
        return gl.h_handle() if name == "h_lambda" else gl.s_handle()
    if name not in CATALOG:
        raise ValidationError(f"unknown kernel {name!r}; known: {sorted(CATALOG) + ['h_lambda', 's_lambda']}")
    return CATALOG[name](**params)
