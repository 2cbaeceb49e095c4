"""Quotients of the 2-sphere: finite O(3) diameters and the reductions used
for groups whose quotient fibers over, or is, a 2-orbifold."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "InvalidTriangle",
    "SphericalTriangle",
    "sides_from_angles",
    "O3GroupEntry",
    "O3_REGISTRY",
    "o3_diameter",
    "cohom2_diameter",
    "fibering_diameter",
    "ALPHA",
    "BETA",
]


class InvalidTriangle(ValueError):
    pass


@dataclass(frozen=True)
class SphericalTriangle:
    A: float
    B: float
    C: float
    a: float
    b: float
    c: float


def _side(A: float, B: float, C: float) -> float:
    # dual law of cosines for the side opposite A
    cos_a = (math.cos(A) + math.cos(B) * math.cos(C)) / (math.sin(B) * math.sin(C))
    return math.acos(max(-1.0, min(1.0, cos_a)))


def sides_from_angles(A: float, B: float, C: float) -> SphericalTriangle:
    """Solve a spherical triangle on the unit sphere from its three angles."""
    for x in (A, B, C):
        if not 0 < x < math.pi:
            raise InvalidTriangle(f"angle {x} is not in (0, pi)")
    if A + B + C <= math.pi:
        raise InvalidTriangle("angle sum must exceed pi")
    return SphericalTriangle(A, B, C, _side(A, B, C), _side(B, C, A), _side(C, A, B))


_T_DIAM = math.acos(1 / 3)
_O_DIAM = math.acos(1 / math.sqrt(3))
_I_DIAM = math.acos(math.tan(3 * math.pi / 10) / math.sqrt(3))


@dataclass(frozen=True)
class O3GroupEntry:
    label: str
    parity: str | None  # "odd", "even" or None
    diameter: float
    expression: str
    triangle: tuple[float, float, float] | None = None  # angles whose side opposite the first is the diameter


_HALF = math.pi / 2
O3_REGISTRY: tuple[O3GroupEntry, ...] = (
    O3GroupEntry("Cn", None, math.pi, "pi"),
    O3GroupEntry("SN", "odd", _HALF, "pi/2"),
    O3GroupEntry("Cni", "odd", _HALF, "pi/2"),
    O3GroupEntry("SN", "even", _HALF, "pi/2"),
    O3GroupEntry("Cnh", "odd", _HALF, "pi/2"),
    O3GroupEntry("Cnh", "even", _HALF, "pi/2"),
    O3GroupEntry("Cnv", "odd", math.pi, "pi"),
    O3GroupEntry("Cnv", "even", math.pi, "pi"),
    O3GroupEntry("Dn", "odd", _HALF, "pi/2"),
    O3GroupEntry("Dn", "even", _HALF, "pi/2"),
    O3GroupEntry("Dnh", "odd", _HALF, "pi/2"),
    O3GroupEntry("Dnh", "even", _HALF, "pi/2"),
    O3GroupEntry("Dnd", "odd", _HALF, "pi/2"),
    O3GroupEntry("Dnd", "even", _HALF, "pi/2"),
    O3GroupEntry("T", None, _T_DIAM, "arccos(1/3)", (math.pi / 2, math.pi / 3, math.pi / 3)),
    O3GroupEntry("Td", None, _T_DIAM, "arccos(1/3)", (math.pi / 2, math.pi / 3, math.pi / 3)),
    O3GroupEntry("Th", None, _O_DIAM, "arccos(1/sqrt(3))", (math.pi / 2, math.pi / 3, math.pi / 4)),
    O3GroupEntry("O", None, _O_DIAM, "arccos(1/sqrt(3))", (math.pi / 2, math.pi / 3, math.pi / 4)),
    O3GroupEntry("Oh", None, _O_DIAM, "arccos(1/sqrt(3))", (math.pi / 2, math.pi / 3, math.pi / 4)),
    O3GroupEntry("I", None, _I_DIAM, "arccos(tan(3pi/10)/sqrt(3))", (math.pi / 2, math.pi / 3, math.pi / 5)),
    O3GroupEntry("Ih", None, _I_DIAM, "arccos(tan(3pi/10)/sqrt(3))", (math.pi / 2, math.pi / 3, math.pi / 5)),
)

_ALIASES = {"C1": ("Cn", 1)}


def _lookup(label: str, n: int | None) -> O3GroupEntry:
    if label in _ALIASES:
        label, n = _ALIASES[label]
    rows = [e for e in O3_REGISTRY if e.label == label]
    if not rows:
        raise KeyError(f"unknown O(3) group label {label!r}")
    if all(e.parity is None for e in rows):
        return rows[0]
    if n is None:
        raise ValueError(f"{label} needs n")
    parity = "odd" if n % 2 else "even"
    match = [e for e in rows if e.parity == parity]
    if not match:
        raise ValueError(f"{label} requires n {rows[0].parity}")
    return match[0]


def o3_diameter(label: str, n: int | None = None, check: bool = True) -> float:
    """Diameter of S^2 / G for a finite G in O(3), from the registry.

    Rows with a stored triangle are re-derived with :func:`sides_from_angles`
    and compared with the stored value.
    """
    entry = _lookup(label, n)
    if check and entry.triangle is not None:
        side = sides_from_angles(*entry.triangle).a
        if abs(side - entry.diameter) > 1e-12:
            raise AssertionError(f"{label}: triangle gives {side}, table {entry.diameter}")
    return entry.diameter


def cohom2_diameter(k: int, m: int, finite_part: str | None = None, n: int | None = None) -> float:
    """Diameter of S^3 / G when the identity component is the circle acting
    with weights (k, m) on C^2."""
    if math.gcd(k, m) != 1:
        raise ValueError(f"weights {k}, {m} are not coprime")
    if k == m == 1:
        if finite_part is None:
            finite_part = "C1"
        return o3_diameter(finite_part, n) / 2
    return math.pi / 2


def fibering_diameter(family: int | str, L: int | None = None) -> float:
    """Closed-form lower bound for the fibering families 10, 15, 19, 34."""
    fam = str(family)
    if fam in ("10", "34"):
        if L is None or L < 1:
            raise ValueError("families 10 and 34 need L >= 1")
        return math.acos(math.cos(math.pi / (2 * L)) / math.sqrt(2))
    if fam == "15":
        return 0.5 * _O_DIAM
    if fam == "19":
        return 0.5 * _I_DIAM
    raise ValueError(f"family {family} has no fibering formula here")


ALPHA = _I_DIAM
# the smallest nonfibering bound, from group 29
BETA = math.acos(1 / math.sqrt(40 + 12 * math.sqrt(2) - 8 * math.sqrt(5) - 12 * math.sqrt(10)))
