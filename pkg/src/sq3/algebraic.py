"""Exact arithmetic in the real field Q(sqrt2, sqrt5).

Elements are stored as ``(a + b*sqrt2 + c*sqrt5 + d*sqrt10)`` with the four
coefficients kept over a single positive common denominator, reduced so the
gcd of all five integers is 1.  That makes the representation unique, so
equality and hashing are componentwise.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

__all__ = [
    "FieldElement",
    "SQRT2",
    "SQRT5",
    "SQRT10",
    "TAU",
    "sign",
    "sqrt_in_field",
]

_RADICANDS = (1, 2, 5, 10)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def _isqrt_scaled(n: int, bits: int) -> int:
    # floor(sqrt(n) * 2**bits)
    return math.isqrt(n << (2 * bits))


@total_ordering
class FieldElement:
    """An element of Q(sqrt2, sqrt5) over the basis {1, sqrt2, sqrt5, sqrt10}."""

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, a=0, b=0, c=0, d=0):
        fracs = [_as_fraction(v) for v in (a, b, c, d)]
        den = math.lcm(*(f.denominator for f in fracs))
        nums = tuple(f.numerator * (den // f.denominator) for f in fracs)
        self._set(nums, den)

    def _set(self, nums, den):
        g = math.gcd(den, *nums)
        if g != 1:
            nums = tuple(n // g for n in nums)
            den //= g
        self._num = nums
        self._den = den
        self._hash = None

    @classmethod
    def _raw(cls, nums, den) -> FieldElement:
        obj = object.__new__(cls)
        if den < 0:
            nums = tuple(-n for n in nums)
            den = -den
        obj._set(nums, den)
        return obj

    @classmethod
    def coerce(cls, value) -> FieldElement:
        if isinstance(value, FieldElement):
            return value
        f = _as_fraction(value)
        return cls._raw((f.numerator, 0, 0, 0), f.denominator)

    # -- coefficient access ---------------------------------------------------

    @property
    def a(self) -> Fraction:
        return Fraction(self._num[0], self._den)

    @property
    def b(self) -> Fraction:
        return Fraction(self._num[1], self._den)

    @property
    def c(self) -> Fraction:
        return Fraction(self._num[2], self._den)

    @property
    def d(self) -> Fraction:
        return Fraction(self._num[3], self._den)

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def key(self) -> tuple[int, int, int, int, int]:
        """Hashable canonical form (the four numerators and the denominator)."""
        return (*self._num, self._den)

    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return not (self._num[1] or self._num[2] or self._num[3])

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, FieldElement):
            try:
                other = FieldElement.coerce(other)
            except TypeError:
                return NotImplemented
        d1, d2 = self._den, other._den
        if d1 == d2:
            nums = tuple(x + y for x, y in zip(self._num, other._num))
            return FieldElement._raw(nums, d1)
        nums = tuple(x * d2 + y * d1 for x, y in zip(self._num, other._num))
        return FieldElement._raw(nums, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement._raw(tuple(-n for n in self._num), self._den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, FieldElement):
            try:
                other = FieldElement.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return FieldElement._raw(tuple(n * other for n in self._num), self._den)
        if not isinstance(other, FieldElement):
            try:
                other = FieldElement.coerce(other)
            except TypeError:
                return NotImplemented
        a1, b1, c1, d1 = self._num
        a2, b2, c2, d2 = other._num
        nums = (
            a1 * a2 + 2 * b1 * b2 + 5 * c1 * c2 + 10 * d1 * d2,
            a1 * b2 + b1 * a2 + 5 * (c1 * d2 + d1 * c2),
            a1 * c2 + c1 * a2 + 2 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )
        return FieldElement._raw(nums, self._den * other._den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt2, sqrt5)")
            return FieldElement._raw(self._num, self._den * other)
        if not isinstance(other, FieldElement):
            try:
                other = FieldElement.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return FieldElement.coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = FieldElement.coerce(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # -- Galois structure -----------------------------------------------------

    def conjugate(self, flip_sqrt2: bool = False, flip_sqrt5: bool = False) -> FieldElement:
        """Apply the field automorphism negating sqrt2 and/or sqrt5."""
        a, b, c, d = self._num
        if flip_sqrt2:
            b, d = -b, -d
        if flip_sqrt5:
            c, d = -c, -d
        return FieldElement._raw((a, b, c, d), self._den)

    def norm(self) -> Fraction:
        """Product of the four Galois conjugates; a rational number."""
        n = self * self.conjugate(True, False) * self.conjugate(False, True) * self.conjugate(True, True)
        assert n.is_rational()
        return n.a

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(sqrt2, sqrt5)")
        if self.is_rational():
            return FieldElement._raw((self._den, 0, 0, 0), self._num[0])
        partial = self.conjugate(True, False) * self.conjugate(False, True) * self.conjugate(True, True)
        n = (self * partial).a
        return FieldElement._raw(
            tuple(x * n.denominator for x in partial._num), partial._den * n.numerator
        )

    # -- ordering -------------------------------------------------------------

    def sign(self) -> int:
        return sign(self)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self._num == other._num and self._den == other._den
        try:
            other = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self._num[0], self._den))
            else:
                self._hash = hash((self._num, self._den))
        return self._hash

    def __lt__(self, other):
        try:
            return sign(self - other) < 0
        except TypeError:
            return NotImplemented

    def __abs__(self):
        return -self if sign(self) < 0 else self

    def __bool__(self):
        return not self.is_zero()

    # -- conversion -----------------------------------------------------------

    def __float__(self):
        return self.to_float()

    def to_float(self) -> float:
        if self.is_rational():
            return self._num[0] / self._den
        bits = 80
        total = sum(n * _isqrt_scaled(r, bits) for n, r in zip(self._num, _RADICANDS))
        return float(Fraction(total, self._den << bits))

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rigorous enclosure using ``bits`` fractional bits for each square root."""
        lo = hi = 0
        for n, r in zip(self._num, _RADICANDS):
            if r == 1:
                lo += n << bits
                hi += n << bits
                continue
            s = _isqrt_scaled(r, bits)  # s <= sqrt(r)*2^bits < s + 1
            if n >= 0:
                lo += n * s
                hi += n * (s + 1)
            else:
                lo += n * (s + 1)
                hi += n * s
        scale = self._den << bits
        return Fraction(lo, scale), Fraction(hi, scale)

    def __repr__(self):
        return f"FieldElement({', '.join(str(f) for f in self.coefficients)})"

    def __str__(self):
        parts = []
        for coeff, label in zip(self.coefficients, ("", "√2", "√5", "√10")):
            if coeff == 0:
                continue
            if label and abs(coeff) == 1:
                text = label
            elif label:
                text = f"{abs(coeff)}{label}" if coeff.denominator == 1 else f"({abs(coeff)}){label}"
            else:
                text = str(abs(coeff))
            parts.append(("-" if coeff < 0 else "+", text))
        if not parts:
            return "0"
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for s, t in parts[1:]:
            out += f" {s} {t}"
        return out

    def to_json(self) -> list[str]:
        return [str(f) for f in self.coefficients]

    @classmethod
    def from_json(cls, data) -> FieldElement:
        return cls(*(Fraction(x) for x in data))


def sign(x: FieldElement) -> int:
    """Exact sign of ``x``.

    Zero is read off the representation.  Otherwise a double-precision
    estimate with a conservative error bound is tried first, then integer
    interval enclosures with 64, 128, 256, ... bits until 0 is excluded.
    """
    if not isinstance(x, FieldElement):
        x = FieldElement.coerce(x)
    if x.is_zero():
        return 0
    nums, den = x._num, x._den
    if x.is_rational():
        return 1 if nums[0] > 0 else -1
    try:
        terms = [n * math.sqrt(r) for n, r in zip(nums, _RADICANDS)]
        approx = math.fsum(terms)
        bound = 1e-12 * sum(abs(t) for t in terms)
        if abs(approx) > bound:
            return 1 if approx > 0 else -1
    except OverflowError:
        pass
    bits = 64
    while True:
        lo, hi = x.interval(bits)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2


def sqrt_in_field(x: FieldElement) -> FieldElement | None:
    """Return the square root of ``x`` if it lies in the field, else ``None``.

    Only rational squares times 1, 2, 5 or 10 and a few simple radicands are
    recognised; this is used for pretty-printing, never for geometry.
    """
    if sign(x) < 0:
        return None
    if x.is_rational():
        q = x.a
        for r, unit in ((1, 1), (2, SQRT2), (5, SQRT5), (10, SQRT10)):
            t = q / r
            n, d = math.isqrt(t.numerator), math.isqrt(t.denominator)
            if n * n == t.numerator and d * d == t.denominator:
                return FieldElement.coerce(Fraction(n, d)) * unit
    return None


SQRT2 = FieldElement(0, 1, 0, 0)
SQRT5 = FieldElement(0, 0, 1, 0)
SQRT10 = FieldElement(0, 0, 0, 1)
TAU = FieldElement(Fraction(1, 2), 0, Fraction(1, 2), 0)
