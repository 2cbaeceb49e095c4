"""Quaternions over a pluggable scalar backend.

Two backends exist: :data:`EXACT` works in ``Q(sqrt2, sqrt5)`` via
:class:`~sq3.algebraic.FieldElement`, :class:`FloatBackend` uses Python floats
with an absolute tolerance.  Geometry code is written once and asks the
backend for signs, hash keys and constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebraic import SQRT2, SQRT5, SQRT10, FieldElement, sign as exact_sign

__all__ = [
    "Backend",
    "ExactBackend",
    "FloatBackend",
    "EXACT",
    "FLOAT",
    "Quaternion",
    "UnsupportedExact",
    "get_backend",
    "qmul",
    "conj",
    "dot",
    "geodesic_cos",
    "canonical_sign",
]


class UnsupportedExact(ValueError):
    """Raised when a value needed for an exact build leaves Q(sqrt2, sqrt5)."""


class Backend:
    name: str
    exact: bool

    def const(self, value):
        raise NotImplementedError

    def sqrt(self, n: int):
        raise NotImplementedError

    def sign(self, x) -> int:
        raise NotImplementedError

    def key(self, x):
        raise NotImplementedError

    def to_float(self, x) -> float:
        return float(x)

    def cos_sin_pi(self, num: int, den: int):
        """(cos, sin) of ``num/den * pi``."""
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        return self.sign(x) == 0


class ExactBackend(Backend):
    name = "exact"
    exact = True

    _sqrt = {1: FieldElement(1), 2: SQRT2, 5: SQRT5, 10: SQRT10}

    def const(self, value):
        return FieldElement.coerce(value)

    def sqrt(self, n: int):
        try:
            return self._sqrt[n]
        except KeyError:
            raise UnsupportedExact(f"sqrt({n}) is not in Q(sqrt2, sqrt5)") from None

    def sign(self, x) -> int:
        return exact_sign(x)

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def key(self, x):
        return x.key()

    def to_float(self, x) -> float:
        return x.to_float()

    def cos_sin_pi(self, num: int, den: int):
        # exact only on the multiples of pi/4
        t = Fraction(num, den) % 2
        if (t * 4).denominator != 1:
            raise UnsupportedExact(f"cos/sin of {num}/{den}*pi is not in Q(sqrt2, sqrt5)")
        octant = int(t * 4)
        h = SQRT2 / 2
        zero, one = FieldElement(0), FieldElement(1)
        table = [
            (one, zero), (h, h), (zero, one), (-h, h),
            (-one, zero), (-h, -h), (zero, -one), (h, -h),
        ]
        return table[octant]


class FloatBackend(Backend):
    name = "float"
    exact = False

    def __init__(self, eps: float = 1e-9, digits: int = 9):
        self.eps = eps
        self.digits = digits

    def const(self, value):
        return float(value)

    def sqrt(self, n: int):
        return math.sqrt(n)

    def sign(self, x) -> int:
        if x > self.eps:
            return 1
        if x < -self.eps:
            return -1
        return 0

    def key(self, x):
        # + 0.0 folds -0.0 into 0.0
        return round(x, self.digits) + 0.0

    def cos_sin_pi(self, num: int, den: int):
        t = math.pi * num / den
        return math.cos(t), math.sin(t)

    def __repr__(self):
        return f"FloatBackend(eps={self.eps})"


EXACT = ExactBackend()
FLOAT = FloatBackend()


def get_backend(name: str | Backend, eps: float | None = None) -> Backend:
    if isinstance(name, Backend):
        return name
    if name == "exact":
        return EXACT
    if name == "float":
        return FLOAT if eps is None else FloatBackend(eps)
    raise ValueError(f"unknown backend {name!r}")


@dataclass(frozen=True, slots=True)
class Quaternion:
    """``w + x i + y j + z k`` with coordinates from one scalar backend."""

    w: object
    x: object
    y: object
    z: object

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return qmul(self, other)
        return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)

    def __rmul__(self, scalar):
        return Quaternion(scalar * self.w, scalar * self.x, scalar * self.y, scalar * self.z)

    def __add__(self, other):
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other):
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def conj(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self):
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def key(self, backend: Backend):
        k = backend.key
        return (k(self.w), k(self.x), k(self.y), k(self.z))

    def to_floats(self) -> tuple[float, float, float, float]:
        return tuple(float(c) for c in self)

    def map(self, fn) -> Quaternion:
        return Quaternion(fn(self.w), fn(self.x), fn(self.y), fn(self.z))

    @classmethod
    def one(cls, backend: Backend) -> Quaternion:
        z = backend.const(0)
        return cls(backend.const(1), z, z, z)

    @classmethod
    def basis(cls, backend: Backend, index: int) -> Quaternion:
        c = [backend.const(0)] * 4
        c[index] = backend.const(1)
        return cls(*c)


def qmul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product."""
    a1, b1, c1, d1 = p.w, p.x, p.y, p.z
    a2, b2, c2, d2 = q.w, q.x, q.y, q.z
    return Quaternion(
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


def conj(q: Quaternion) -> Quaternion:
    return q.conj()


def dot(p: Quaternion, q: Quaternion):
    """Euclidean inner product in R^4."""
    return p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z


def geodesic_cos(q: Quaternion):
    """Cosine of the spherical distance from 1 to the unit quaternion ``q``."""
    return q.w


def canonical_sign(coords, backend: Backend) -> int:
    """+1 if the first nonzero coordinate is positive, else -1 (0 for all-zero)."""
    for c in coords:
        s = backend.sign(c)
        if s:
            return s
    return 0


def canonical(q: Quaternion, backend: Backend) -> Quaternion:
    """Representative of the sign class {q, -q}."""
    return -q if canonical_sign(q, backend) < 0 else q
