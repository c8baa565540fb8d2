"""Exact scalar arithmetic for the chain calculus.

All geometry in this package is carried out over the rationals.  Masses of
simplices are square roots of rational Gram determinants, so chain masses are
finite sums  sum_i  c_i * sqrt(f_i)  with rational c_i and positive integer
radicands.  ``RadicalSum`` represents such sums exactly and decides order
predicates by combining symbolic cancellation (square-free radicands combine
by linearity) with certified rational enclosures of increasing precision.

No floats enter any decision; ``float()`` conversions exist only for
human-facing reports and lossy mesh export.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction, "RadicalSum"]

# Trial-division bound for square extraction.  Radicands whose leftover part
# exceeds the square of this bound may keep a hidden square factor; they are
# still handled soundly (grouped by literal radicand, compared numerically).
_TRIAL_LIMIT = 10_000

# Default enclosure precision: 2^-40 < 1e-12.
DEFAULT_BITS = 40
_MAX_BITS = 320


class UndecidableComparison(ArithmeticError):
    """Raised when a sign query survives the maximum refinement precision."""


def parse_fraction(text: str) -> Fraction:
    """Parse 'p/q' or 'p' into an exact Fraction."""
    return Fraction(text)


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@lru_cache(maxsize=None)
def _split_square(n: int) -> tuple[int, int]:
    """Return (s, f) with n = s*s*f and f square-free up to _TRIAL_LIMIT."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, f = 1, 1
    m = n
    p = 2
    while p <= _TRIAL_LIMIT and p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                f *= p
        p += 1 if p == 2 else 2
    # Leftover m has no prime factor <= _TRIAL_LIMIT; it may itself be square.
    r = isqrt(m)
    if r * r == m:
        s *= r
    else:
        f *= m
    return s, f


@lru_cache(maxsize=None)
def _sqrt_bounds(core: int, bits: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of sqrt(core) with width <= 2^-bits."""
    scale = 1 << bits
    lo = isqrt(core * scale * scale)
    return Fraction(lo, scale), Fraction(lo + 1, scale)


def sqrt_enclosure(value: Fraction, bits: int = DEFAULT_BITS) -> tuple[Fraction, Fraction]:
    """Certified enclosure of sqrt(value) for a nonnegative rational."""
    value = Fraction(value)
    if value < 0:
        raise ValueError("negative radicand")
    if value == 0:
        return Fraction(0), Fraction(0)
    # sqrt(p/q) = sqrt(p*q)/q
    pq = value.numerator * value.denominator
    lo, hi = _sqrt_bounds(pq, bits)
    return lo / value.denominator, hi / value.denominator


class RadicalSum:
    """An exact number of the form  sum_i coeff_i * sqrt(core_i).

    Cores are positive square-free integers (best effort; see _split_square)
    and coefficients are nonzero rationals.  The representation is canonical
    up to complete square extraction, so ``==`` on fully split inputs is a
    tuple comparison; order predicates fall back to certified enclosures.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[int, Fraction]] = ()):  # internal
        merged: dict[int, Fraction] = {}
        for core, coeff in terms:
            if coeff == 0:
                continue
            merged[core] = merged.get(core, Fraction(0)) + coeff
        self._terms = tuple(sorted((c, q) for c, q in merged.items() if q != 0))

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "RadicalSum":
        return _ZERO

    @staticmethod
    def from_fraction(q) -> "RadicalSum":
        q = Fraction(q)
        if q == 0:
            return _ZERO
        return RadicalSum([(1, q)])

    @staticmethod
    def sqrt(value) -> "RadicalSum":
        """Exact sqrt of a nonnegative rational, as a RadicalSum."""
        value = Fraction(value)
        if value < 0:
            raise ValueError("negative radicand")
        if value == 0:
            return _ZERO
        # sqrt(p/q) = sqrt(p*q)/q with p*q = s^2 * core
        s, core = _split_square(value.numerator * value.denominator)
        return RadicalSum([(core, Fraction(s, value.denominator))])

    # -- coercion -----------------------------------------------------------

    @staticmethod
    def _coerce(x: Scalar) -> "RadicalSum":
        if isinstance(x, RadicalSum):
            return x
        if isinstance(x, (int, Fraction)):
            return RadicalSum.from_fraction(Fraction(x))
        return NotImplemented  # type: ignore[return-value]

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: Scalar) -> "RadicalSum":
        o = RadicalSum._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RadicalSum(self._terms + o._terms)

    __radd__ = __add__

    def __neg__(self) -> "RadicalSum":
        return RadicalSum([(c, -q) for c, q in self._terms])

    def __sub__(self, other: Scalar) -> "RadicalSum":
        o = RadicalSum._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Scalar) -> "RadicalSum":
        return -(self - other)

    def __mul__(self, other: Scalar) -> "RadicalSum":
        o = RadicalSum._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out: list[tuple[int, Fraction]] = []
        for c1, q1 in self._terms:
            for c2, q2 in o._terms:
                if c1 == c2:
                    out.append((1, q1 * q2 * c1))
                else:
                    s, core = _split_square(c1 * c2)
                    out.append((core, q1 * q2 * s))
        return RadicalSum(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RadicalSum":
        # Division only by nonzero rationals; general radical division is not
        # needed anywhere in the package.
        q = Fraction(other)
        if q == 0:
            raise ZeroDivisionError
        return RadicalSum([(c, coeff / q) for c, coeff in self._terms])

    # -- sign and order -----------------------------------------------------

    def sign(self) -> int:
        """Exact sign: -1, 0 or +1."""
        if not self._terms:
            return 0
        signs = {1 if q > 0 else -1 for _, q in self._terms}
        if signs == {1}:
            return 1
        if signs == {-1}:
            return -1
        bits = DEFAULT_BITS
        while bits <= _MAX_BITS:
            lo, hi = self.enclosure(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
        raise UndecidableComparison(f"sign undecided at 2^-{_MAX_BITS}: {self}")

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0] == 1)

    def as_fraction(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if self.is_rational():
            return self._terms[0][1]
        raise ValueError(f"not rational: {self}")

    def terms(self) -> tuple[tuple[int, Fraction], ...]:
        """(core, coefficient) pairs of the sum of coeff * sqrt(core)."""
        return self._terms

    def enclosure(self, bits: int = DEFAULT_BITS) -> tuple[Fraction, Fraction]:
        """Certified rational enclosure [lo, hi] of the value."""
        lo = Fraction(0)
        hi = Fraction(0)
        for core, coeff in self._terms:
            if core == 1:
                lo += coeff
                hi += coeff
                continue
            slo, shi = _sqrt_bounds(core, bits)
            if coeff >= 0:
                lo += coeff * slo
                hi += coeff * shi
            else:
                lo += coeff * shi
                hi += coeff * slo
        return lo, hi

    def _cmp(self, other: Scalar) -> int:
        o = RadicalSum._coerce(other)
        if o is NotImplemented:
            return NotImplemented  # type: ignore[return-value]
        return (self - o).sign()

    def __eq__(self, other) -> bool:
        c = self._cmp(other)
        return False if c is NotImplemented else c == 0

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash(self._terms)

    def __float__(self) -> float:
        lo, hi = self.enclosure()
        return float((lo + hi) / 2)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for core, coeff in self._terms:
            if core == 1:
                parts.append(format_fraction(coeff))
            else:
                parts.append(f"{format_fraction(coeff)}*sqrt({core})")
        return " + ".join(parts)

    def to_json(self, bits: int = DEFAULT_BITS):
        """Exact rational string, or a certified enclosure pair."""
        if self.is_rational():
            return format_fraction(self.as_fraction())
        lo, hi = self.enclosure(bits)
        return {"lo": format_fraction(lo), "hi": format_fraction(hi)}


_ZERO = RadicalSum.__new__(RadicalSum)
_ZERO._terms = ()


def radical_zero() -> RadicalSum:
    return _ZERO


def radical_sum(values: Iterable[RadicalSum]) -> RadicalSum:
    terms: list[tuple[int, Fraction]] = []
    for v in values:
        terms.extend(v._terms)
    return RadicalSum(terms)


SQRT3 = RadicalSum.sqrt(3)


# -- exact linear algebra ---------------------------------------------------

Matrix = Sequence[Sequence[Fraction]]


def mat_transpose(m: Matrix) -> list[list[Fraction]]:
    return [list(row) for row in zip(*m)]


def mat_mul(a: Matrix, b: Matrix) -> list[list[Fraction]]:
    bt = mat_transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: Matrix, v: Sequence[Fraction]) -> list[Fraction]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def det3(m: Matrix) -> Fraction:
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def is_psd(matrix: Matrix) -> bool:
    """Exact positive-semidefiniteness test for a rational symmetric matrix.

    Pivoted Schur-complement recursion: a zero diagonal entry forces its row
    and column to vanish, a negative one refutes, and a positive pivot
    reduces the dimension.
    """
    m = [list(map(Fraction, row)) for row in matrix]
    n = len(m)
    idx = list(range(n))
    while idx:
        pivot = None
        for i in idx:
            d = m[i][i]
            if d < 0:
                return False
            if d > 0 and pivot is None:
                pivot = i
        if pivot is None:
            # all remaining diagonal entries are zero
            return all(m[i][j] == 0 for i in idx for j in idx)
        idx.remove(pivot)
        d = m[pivot][pivot]
        for i in idx:
            for j in idx:
                m[i][j] -= m[i][pivot] * m[pivot][j] / d
    return True


def operator_norm_enclosure(matrix: Matrix, bits: int = DEFAULT_BITS) -> tuple[Fraction, Fraction]:
    """Certified enclosure of the spectral norm of a rational matrix.

    Bisects on t in [0, sqrt(trace(M^T M))] using the exact predicate
    "t^2 I - M^T M is PSD".
    """
    mt = mat_transpose(matrix)
    g = mat_mul(mt, matrix)
    n = len(g)
    trace = sum(g[i][i] for i in range(n))
    if trace == 0:
        return Fraction(0), Fraction(0)

    def norm_le(t: Fraction) -> bool:
        t2 = t * t
        shifted = [[t2 - g[i][j] if i == j else -g[i][j] for j in range(n)] for i in range(n)]
        return is_psd(shifted)

    lo = Fraction(0)
    hi = Fraction(1)
    while not norm_le(hi):
        hi *= 2
    target = Fraction(1, 1 << bits)
    while hi - lo > target:
        mid = (lo + hi) / 2
        if norm_le(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi
