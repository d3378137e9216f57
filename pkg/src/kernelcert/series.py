"""Multi-indices and truncated formal power series with exact coefficients.

A diagonal series  f = sum_a f_a x^a  (x^a standing for z^a conj(w)^a) is stored
sparsely as a map from exponent tuples to Fractions.  A bivariate series
sum_{i,j} f_ij z^i conj(w)^j in one variable is a dense (N+1) x (N+1) table of
Gaussian rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .exact import ONE, ZERO, Gaussian, ValidationError, to_fraction

MultiIndex = Tuple[int, ...]

# ---------------------------------------------------------------------------
# multi-index bookkeeping


def degree(a: MultiIndex) -> int:
    return sum(a)


def leq(a: MultiIndex, b: MultiIndex) -> bool:
    """Coordinatewise partial order a <= b."""
    return all(x <= y for x, y in zip(a, b))


def grlex_key(a: MultiIndex):
    """Sort key for the graded lexicographic order: total degree first, then
    the leftmost differing coordinate (smaller first)."""
    return (sum(a), a)


def add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def sub_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x - y for x, y in zip(a, b))


def zero_index(g: int) -> MultiIndex:
    return (0,) * g


def unit_index(g: int, j: int) -> MultiIndex:
    return tuple(1 if i == j else 0 for i in range(g))


def _compositions(n: int, g: int) -> Iterator[MultiIndex]:
    # lexicographically increasing tuples of length g summing to n
    if g == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, g - 1):
            yield (first,) + rest


@lru_cache(maxsize=256)
def indices_upto(g: int, n: int) -> Tuple[MultiIndex, ...]:
    """All a in N^g with |a| <= n, in graded lexicographic order."""
    if g < 1:
        raise ValidationError("variable count must be at least 1")
    out: List[MultiIndex] = []
    for d in range(n + 1):
        out.extend(_compositions(d, g))
    return tuple(out)


def lower_set(a: MultiIndex) -> List[MultiIndex]:
    """All u <= a, in graded lexicographic order."""
    return sorted(product(*(range(x + 1) for x in a)), key=grlex_key)


def _as_index(a, g: int) -> MultiIndex:
    if isinstance(a, int):
        a = (a,)
    a = tuple(int(x) for x in a)
    if len(a) != g:
        raise ValidationError(f"index {a} has length {len(a)}, expected {g}")
    if any(x < 0 for x in a):
        raise ValidationError(f"negative exponent in {a}")
    return a


# ---------------------------------------------------------------------------
# diagonal series


@dataclass(frozen=True, eq=False)
class DiagonalSeries:
    variables: int
    degree: int
    coeffs: Mapping[MultiIndex, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        g, n = self.variables, self.degree
        if g < 1:
            raise ValidationError("variable count must be at least 1")
        if n < 0:
            raise ValidationError("truncation degree must be nonnegative")
        clean: Dict[MultiIndex, Fraction] = {}
        for a, v in self.coeffs.items():
            a = _as_index(a, g)
            v = to_fraction(v)
            if v and sum(a) <= n:
                clean[a] = clean.get(a, Fraction(0)) + v
        clean = {a: v for a, v in clean.items() if v}
        object.__setattr__(self, "coeffs", MappingProxyType(clean))

    # constructors
    @classmethod
    def constant(cls, g: int, n: int, c=1) -> "DiagonalSeries":
        return cls(g, n, {zero_index(g): c})

    @classmethod
    def monomial(cls, g: int, n: int, a, c=1) -> "DiagonalSeries":
        return cls(g, n, {_as_index(a, g): c})

    @classmethod
    def from_list(cls, values: Sequence, n: Optional[int] = None) -> "DiagonalSeries":
        """One-variable series from its coefficient list."""
        n = len(values) - 1 if n is None else n
        return cls(1, n, {(i,): v for i, v in enumerate(values)})

    # access
    def __getitem__(self, a) -> Fraction:
        return self.coeffs.get(_as_index(a, self.variables), Fraction(0))

    def items(self):
        return self.coeffs.items()

    def indices(self) -> Tuple[MultiIndex, ...]:
        return indices_upto(self.variables, self.degree)

    def as_list(self) -> List[Fraction]:
        if self.variables != 1:
            raise ValidationError("as_list needs a one-variable series")
        return [self.coeffs.get((i,), Fraction(0)) for i in range(self.degree + 1)]

    def truncate(self, n: int) -> "DiagonalSeries":
        return DiagonalSeries(self.variables, min(n, self.degree), self.coeffs)

    def first_negative(self) -> Optional[Tuple[MultiIndex, Fraction]]:
        """Lowest index (graded lex) carrying a negative coefficient."""
        neg = [a for a, v in self.coeffs.items() if v < 0]
        if not neg:
            return None
        a = min(neg, key=grlex_key)
        return a, self.coeffs[a]

    def is_normalized(self) -> bool:
        return self[zero_index(self.variables)] == 1 and all(v > 0 for v in self.coeffs.values())

    # arithmetic
    def __add__(self, other):
        return series_add(self, _lift(other, self))

    __radd__ = __add__

    def __sub__(self, other):
        return series_add(self, -_lift(other, self))

    def __rsub__(self, other):
        return series_add(_lift(other, self), -self)

    def __neg__(self):
        return DiagonalSeries(self.variables, self.degree, {a: -v for a, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, DiagonalSeries):
            return series_mul(self, other)
        c = to_fraction(other)
        return DiagonalSeries(self.variables, self.degree, {a: c * v for a, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DiagonalSeries):
            return series_mul(self, series_reciprocal(other))
        return self * (1 / to_fraction(other))

    def reciprocal(self) -> "DiagonalSeries":
        return series_reciprocal(self)

    def __eq__(self, other):
        if not isinstance(other, DiagonalSeries):
            return NotImplemented
        return (self.variables, self.degree) == (other.variables, other.degree) and dict(
            self.coeffs
        ) == dict(other.coeffs)

    __hash__ = None

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(
                f"{v}*x^{a if self.variables > 1 else a[0]}"
                for a, v in sorted(self.coeffs.items(), key=lambda kv: grlex_key(kv[0]))
            )
        return f"DiagonalSeries(g={self.variables}, N={self.degree}: {body})"


def _lift(x, like: DiagonalSeries) -> DiagonalSeries:
    if isinstance(x, DiagonalSeries):
        return x
    return DiagonalSeries.constant(like.variables, like.degree, x)


def _check_vars(f: DiagonalSeries, g: DiagonalSeries):
    if f.variables != g.variables:
        raise ValidationError(f"variable count mismatch: {f.variables} vs {g.variables}")


def series_add(f: DiagonalSeries, g: DiagonalSeries) -> DiagonalSeries:
    _check_vars(f, g)
    n = min(f.degree, g.degree)
    out: Dict[MultiIndex, Fraction] = dict(f.coeffs)
    for a, v in g.coeffs.items():
        out[a] = out.get(a, Fraction(0)) + v
    return DiagonalSeries(f.variables, n, out)


def series_mul(f: DiagonalSeries, g: DiagonalSeries) -> DiagonalSeries:
    """Truncated Cauchy product; the result keeps the smaller truncation."""
    _check_vars(f, g)
    n = min(f.degree, g.degree)
    out: Dict[MultiIndex, Fraction] = {}
    gitems = [(b, sum(b), v) for b, v in g.coeffs.items()]
    for a, fa in f.coeffs.items():
        da = sum(a)
        if da > n:
            continue
        for b, db, gb in gitems:
            if da + db <= n:
                c = add_index(a, b)
                out[c] = out.get(c, 0) + fa * gb
    return DiagonalSeries(f.variables, n, out)


def series_reciprocal(f: DiagonalSeries) -> DiagonalSeries:
    """r with f*r = 1 up to the truncation degree, by triangular recursion."""
    g = f.variables
    z = zero_index(g)
    f0 = f[z]
    if f0 == 0:
        raise ValidationError("reciprocal needs a nonzero constant term")
    rest = [(u, fu) for u, fu in f.coeffs.items() if u != z]
    r: Dict[MultiIndex, Fraction] = {}
    for a in indices_upto(g, f.degree):
        acc = Fraction(1) if a == z else Fraction(0)
        for u, fu in rest:
            if leq(u, a):
                ra = r.get(sub_index(a, u))
                if ra:
                    acc -= fu * ra
        if acc:
            r[a] = acc / f0
    return DiagonalSeries(g, f.degree, r)


# ---------------------------------------------------------------------------
# bivariate series (one variable, non-diagonal)


def _gauss_table(n: int, entries) -> Tuple[Tuple[Gaussian, ...], ...]:
    rows = [[ZERO] * (n + 1) for _ in range(n + 1)]
    for (i, j), v in entries:
        if 0 <= i <= n and 0 <= j <= n:
            rows[i][j] = rows[i][j] + Gaussian.coerce(v)
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True, eq=False)
class BivariateSeries:
    """Coefficient table (f_ij), entry (i, j) multiplying z^i conj(w)^j."""

    degree: int
    coeffs: Tuple[Tuple[Gaussian, ...], ...]

    def __post_init__(self):
        n = self.degree
        if n < 0:
            raise ValidationError("truncation degree must be nonnegative")
        rows = self.coeffs
        if len(rows) != n + 1 or any(len(r) != n + 1 for r in rows):
            raise ValidationError("coefficient table must be (N+1) x (N+1)")
        object.__setattr__(
            self, "coeffs", tuple(tuple(Gaussian.coerce(v) for v in r) for r in rows)
        )

    @classmethod
    def from_dict(cls, n: int, entries: Mapping[Tuple[int, int], object]) -> "BivariateSeries":
        return cls(n, _gauss_table(n, entries.items()))

    @classmethod
    def zero(cls, n: int) -> "BivariateSeries":
        return cls(n, _gauss_table(n, []))

    @classmethod
    def from_diagonal(cls, d: DiagonalSeries) -> "BivariateSeries":
        return bivariate_from_diagonal(d)

    def __getitem__(self, ij) -> Gaussian:
        i, j = ij
        if 0 <= i <= self.degree and 0 <= j <= self.degree:
            return self.coeffs[i][j]
        return ZERO

    def rows(self, n: Optional[int] = None) -> List[List[Gaussian]]:
        """The top-left (n+1) x (n+1) block of the coefficient table."""
        n = self.degree if n is None else n
        if n > self.degree:
            raise ValidationError(f"requested order {n} beyond truncation {self.degree}")
        return [list(self.coeffs[i][: n + 1]) for i in range(n + 1)]

    def is_hermitian(self) -> bool:
        n = self.degree
        return all(self.coeffs[j][i] == self.coeffs[i][j].conj() for i in range(n + 1) for j in range(i, n + 1))

    def is_zero(self) -> bool:
        return not any(v for r in self.coeffs for v in r)

    def truncate(self, n: int) -> "BivariateSeries":
        n = min(n, self.degree)
        return BivariateSeries(n, tuple(r[: n + 1] for r in self.coeffs[: n + 1]))

    def evaluate(self, z, w, convert=complex):
        """sum f_ij z^i conj(w)^j by nested Horner.

        ``convert`` maps an exact coefficient into the working number type
        (complex by default; pass an mpmath converter for extended precision).
        """
        wc = w.conjugate()
        total = 0
        for i in range(self.degree, -1, -1):
            inner = 0
            for j in range(self.degree, -1, -1):
                c = self.coeffs[i][j]
                inner = inner * wc + (convert(c) if c else 0)
            total = total * z + inner
        return total

    def __add__(self, other):
        if not isinstance(other, BivariateSeries):
            other = BivariateSeries.from_dict(self.degree, {(0, 0): other})
        n = min(self.degree, other.degree)
        return BivariateSeries(
            n, tuple(tuple(self.coeffs[i][j] + other.coeffs[i][j] for j in range(n + 1)) for i in range(n + 1))
        )

    def __neg__(self):
        return BivariateSeries(self.degree, tuple(tuple(-v for v in r) for r in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, BivariateSeries):
            other = BivariateSeries.from_dict(self.degree, {(0, 0): other})
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BivariateSeries):
            return bivariate_mul(self, other)
        if isinstance(other, DiagonalSeries):
            return bivariate_mul(self, bivariate_from_diagonal(other))
        c = Gaussian.coerce(other)
        return BivariateSeries(self.degree, tuple(tuple(c * v for v in r) for r in self.coeffs))

    __rmul__ = __mul__

    def reciprocal(self) -> "BivariateSeries":
        return bivariate_reciprocal(self)

    def __eq__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs

    __hash__ = None


def bivariate_from_diagonal(d: DiagonalSeries) -> BivariateSeries:
    if d.variables != 1:
        raise ValidationError("bivariate embedding needs a one-variable series")
    return BivariateSeries.from_dict(d.degree, {(i, i): d[i] for i in range(d.degree + 1)})


def bivariate_mul(f: BivariateSeries, g: BivariateSeries) -> BivariateSeries:
    """2-D convolution truncated at degree N in each variable."""
    n = min(f.degree, g.degree)
    out = [[ZERO] * (n + 1) for _ in range(n + 1)]
    gnz = [(p, q, g.coeffs[p][q]) for p in range(n + 1) for q in range(n + 1) if g.coeffs[p][q]]
    for i in range(n + 1):
        for j in range(n + 1):
            a = f.coeffs[i][j]
            if not a:
                continue
            for p, q, b in gnz:
                if i + p <= n and j + q <= n:
                    out[i + p][j + q] = out[i + p][j + q] + a * b
    return BivariateSeries(n, tuple(tuple(r) for r in out))


def bivariate_reciprocal(f: BivariateSeries) -> BivariateSeries:
    n = f.degree
    f00 = f.coeffs[0][0]
    if not f00:
        raise ValidationError("reciprocal needs a nonzero constant term")
    fnz = [(p, q, f.coeffs[p][q]) for p in range(n + 1) for q in range(n + 1) if f.coeffs[p][q] and (p, q) != (0, 0)]
    r = [[ZERO] * (n + 1) for _ in range(n + 1)]
    for s in range(2 * n + 1):
        for i in range(max(0, s - n), min(s, n) + 1):
            j = s - i
            acc = ONE if (i, j) == (0, 0) else ZERO
            for p, q, c in fnz:
                if p <= i and q <= j:
                    rv = r[i - p][j - q]
                    if rv:
                        acc = acc - c * rv
            r[i][j] = acc / f00 if acc else ZERO
    return BivariateSeries(n, tuple(tuple(row) for row in r))


# ---------------------------------------------------------------------------
# co-invariant index sets


@dataclass(frozen=True)
class CoInvariantSet:
    variables: int
    indices: frozenset

    def sorted(self) -> List[MultiIndex]:
        return sorted(self.indices, key=grlex_key)

    def __contains__(self, a) -> bool:
        return _as_index(a, self.variables) in self.indices

    def __len__(self):
        return len(self.indices)


@dataclass(frozen=True)
class CoInvarianceVerdict:
    ok: bool
    witness: Optional[MultiIndex] = None


def make_index_set(g: int, indices: Iterable) -> CoInvariantSet:
    return CoInvariantSet(g, frozenset(_as_index(a, g) for a in indices))


def enumerate_coinvariant(g: int, d: int) -> CoInvariantSet:
    """The full downward-closed set {|a| <= d}."""
    if d < 0:
        raise ValidationError("degree must be nonnegative")
    return CoInvariantSet(g, frozenset(indices_upto(g, d)))


def validate_coinvariant(F: CoInvariantSet) -> CoInvarianceVerdict:
    """Check nonempty, contains 0 and downward closed; report the first missing index."""
    z = zero_index(F.variables)
    if z not in F.indices:
        return CoInvarianceVerdict(False, z)
    for b in F.sorted():
        for a in lower_set(b):
            if a not in F.indices:
                return CoInvarianceVerdict(False, a)
    return CoInvarianceVerdict(True)
