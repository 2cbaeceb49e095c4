"""Finite subgroups of the unit quaternions: C_k, D_n, T, O, I and I-dagger."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .quaternion import EXACT, Backend, Quaternion, UnsupportedExact, get_backend, qmul

__all__ = [
    "BinaryGroup",
    "NotASubgroup",
    "build",
    "build_Idagger",
    "sqrt5_flip",
    "normal_in",
    "cosets",
    "sort_key",
    "I_COSET_REPS",
]

LABELS = ("C", "D", "T", "O", "I", "Idagger")


class NotASubgroup(ValueError):
    pass


def sort_key(q: Quaternion, backend: Backend):
    """Lexicographic (w, x, y, z) order; floats first, exact key breaks ties."""
    return (tuple(round(backend.to_float(c), 12) for c in q), q.key(backend) if backend.exact else ())


@dataclass(frozen=True, eq=False)
class BinaryGroup:
    label: str
    n: int | None
    backend: Backend
    elements: tuple[Quaternion, ...]
    _index: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        index = {q.key(self.backend): q for q in self.elements}
        object.__setattr__(self, "_index", index)

    @property
    def name(self) -> str:
        return f"{self.label}{self.n}" if self.n is not None else self.label

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, q: Quaternion) -> bool:
        return q.key(self.backend) in self._index

    def lookup(self, q: Quaternion) -> Quaternion | None:
        return self._index.get(q.key(self.backend))

    def keys(self) -> frozenset:
        return frozenset(self._index)

    def issubset(self, other: BinaryGroup) -> bool:
        return all(q in other for q in self.elements)

    def check_axioms(self) -> bool:
        """Brute-force closure, identity and inverses."""
        one = Quaternion.one(self.backend)
        if one not in self:
            return False
        for p in self.elements:
            if p.conj() not in self:
                return False
            for q in self.elements:
                if qmul(p, q) not in self:
                    return False
        return True

    def __repr__(self):
        return f"BinaryGroup({self.name}, order={len(self)}, backend={self.backend.name})"


def _finish(label, n, backend, elems) -> BinaryGroup:
    uniq = {}
    for q in elems:
        uniq.setdefault(q.key(backend), q)
    ordered = tuple(sorted(uniq.values(), key=lambda q: sort_key(q, backend)))
    return BinaryGroup(label, n, backend, ordered)


def _cyclic(k: int, backend: Backend) -> list[Quaternion]:
    zero = backend.const(0)
    out = []
    for m in range(k):
        c, s = backend.cos_sin_pi(2 * m, k)
        out.append(Quaternion(c, zero, zero, s))
    return out


def _dihedral(n: int, backend: Backend) -> list[Quaternion]:
    zero = backend.const(0)
    out = _cyclic(2 * n, backend)
    for m in range(2 * n):
        c, s = backend.cos_sin_pi(m, n)
        out.append(Quaternion(zero, c, s, zero))
    return out


def _tetrahedral(backend: Backend) -> list[Quaternion]:
    out = _dihedral(2, backend)
    h = backend.const(1) / 2
    for signs in itertools.product((1, -1), repeat=4):
        out.append(Quaternion(*(s * h for s in signs)))
    return out


def _octahedral(backend: Backend) -> list[Quaternion]:
    out = _tetrahedral(backend)
    r = backend.sqrt(2) / 2
    zero = backend.const(0)
    for i, j in itertools.combinations(range(4), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            c = [zero] * 4
            c[i] = si * r
            c[j] = sj * r
            out.append(Quaternion(*c))
    return out


def I_COSET_REPS(backend: Backend, sqrt5_sign: int = 1) -> list[Quaternion]:
    """The five listed coset representatives of T in I (or I-dagger)."""
    tau = (1 + sqrt5_sign * backend.sqrt(5)) / 2
    one, zero = backend.const(1), backend.const(0)
    h = one / 2
    return [
        Quaternion(one, zero, zero, zero),
        Quaternion(h * (tau - 1), h * tau, h, zero),
        Quaternion(h * (-tau), h, h * (tau - 1), zero),
        Quaternion(h * (-tau), -h, h * (1 - tau), zero),
        Quaternion(h * (tau - 1), -h * tau, -h, zero),
    ]


def _icosahedral(backend: Backend, sqrt5_sign: int) -> list[Quaternion]:
    t = _tetrahedral(backend)
    return [qmul(g, x) for g in I_COSET_REPS(backend, sqrt5_sign) for x in t]


def sqrt5_flip(q: Quaternion) -> Quaternion:
    """Reverse the sign of every sqrt5 coefficient (the map taking I to I-dagger)."""
    return q.map(lambda c: c.conjugate(flip_sqrt5=True))


@lru_cache(maxsize=None)
def _build_cached(label: str, n: int | None, backend: Backend) -> BinaryGroup:
    if label == "C":
        if n is None or n < 1:
            raise ValueError("C(k) needs k >= 1")
        if backend.exact and n not in (1, 2, 4, 8):
            raise UnsupportedExact(f"C({n}) is only available in the float backend")
        elems = _cyclic(n, backend)
    elif label == "D":
        if n is None or n < 1:
            raise ValueError("D(n) needs n >= 1")
        if backend.exact and n not in (1, 2, 4):
            raise UnsupportedExact(f"D({n}) is only available in the float backend")
        elems = _dihedral(n, backend)
    elif label == "T":
        elems = _tetrahedral(backend)
    elif label == "O":
        elems = _octahedral(backend)
    elif label == "I":
        elems = _icosahedral(backend, 1)
    elif label == "Idagger":
        if backend.exact:
            elems = [sqrt5_flip(q) for q in _build_cached("I", None, backend).elements]
        else:
            elems = _icosahedral(backend, -1)
    else:
        raise ValueError(f"unknown binary group label {label!r}")
    return _finish(label, n if label in ("C", "D") else None, backend, elems)


def build(label: str, n: int | None = None, backend: Backend | str = EXACT) -> BinaryGroup:
    """Build a binary group; ``n`` is the order for C and the index for D (|D_n| = 4n)."""
    backend = get_backend(backend)
    if label not in LABELS:
        raise ValueError(f"unknown binary group label {label!r}")
    return _build_cached(label, n if label in ("C", "D") else None, backend)


def build_Idagger() -> BinaryGroup:
    return build("Idagger", backend=EXACT)


def normal_in(h: BinaryGroup, g: BinaryGroup) -> bool:
    if not h.issubset(g):
        raise NotASubgroup(f"{h.name} is not contained in {g.name}")
    for x in g.elements:
        xc = x.conj()
        for y in h.elements:
            if qmul(qmul(x, y), xc) not in h:
                return False
    return True


def cosets(g: BinaryGroup, h: BinaryGroup) -> list[tuple[Quaternion, ...]]:
    """Left cosets x*h partitioning g, in canonical order of their first element."""
    if not h.issubset(g):
        raise NotASubgroup(f"{h.name} is not contained in {g.name}")
    b = g.backend
    seen = set()
    out = []
    for x in g.elements:
        if x.key(b) in seen:
            continue
        coset = tuple(sorted((qmul(x, y) for y in h.elements), key=lambda q: sort_key(q, b)))
        seen.update(q.key(b) for q in coset)
        out.append(coset)
    return out


def coset_labels(g: BinaryGroup, h: BinaryGroup) -> dict:
    """Map key(x) -> index of the left coset x*h containing x."""
    b = g.backend
    labels = {}
    idx = 0
    for x in g.elements:
        kx = x.key(b)
        if kx in labels:
            continue
        for y in h.elements:
            labels[qmul(x, y).key(b)] = idx
        idx += 1
    return labels
