"""Finite subgroups of O(4) from Du Val family identifiers.

A group is described by a Goursat datum ``(L/l; R/r; phi)`` for its
orientation-preserving part plus, for the families with a ``*``, a set of
pairs ``(a, b)`` acting by ``q -> a conj(q) b``.  Preserving elements ``(a, b)``
act by ``q -> a q b^-1``.  Both kinds are stored modulo ``(a, b) ~ (-a, -b)``.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from . import binary_groups as bg
from .binary_groups import BinaryGroup, I_COSET_REPS, coset_labels
from .quaternion import (
    EXACT,
    Backend,
    Quaternion,
    UnsupportedExact,
    canonical_sign,
    get_backend,
    qmul,
)

__all__ = [
    "Isometry",
    "GoursatDatum",
    "IsometryGroup",
    "InvalidParameters",
    "SpecParseError",
    "FAMILIES",
    "instantiate",
    "parse_spec",
    "format_spec",
    "validate",
    "is_subgroup",
    "is_normal_subgroup",
    "fixes_a_point",
]


class InvalidParameters(ValueError):
    """A table condition on the family parameters is violated."""


class SpecParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# --------------------------------------------------------------------------
# isometries


@dataclass(frozen=True, slots=True)
class Isometry:
    """``q -> a q conj(b)`` if preserving, ``q -> a conj(q) b`` if reversing."""

    reversing: bool
    a: Quaternion
    b: Quaternion

    def apply(self, q: Quaternion) -> Quaternion:
        if self.reversing:
            return qmul(qmul(self.a, q.conj()), self.b)
        return qmul(qmul(self.a, q), self.b.conj())

    def image_of_one(self) -> Quaternion:
        if self.reversing:
            return qmul(self.a, self.b)
        return qmul(self.a, self.b.conj())

    def compose(self, other: Isometry) -> Isometry:
        """``self`` after ``other``."""
        a, b, c, d = self.a, self.b, other.a, other.b
        if not self.reversing and not other.reversing:
            return Isometry(False, qmul(a, c), qmul(b, d))
        if not self.reversing:
            return Isometry(True, qmul(a, c), qmul(d, b.conj()))
        if not other.reversing:
            return Isometry(True, qmul(a, d), qmul(c.conj(), b))
        return Isometry(False, qmul(a, d.conj()), qmul(b.conj(), c))

    def inverse(self) -> Isometry:
        if self.reversing:
            return Isometry(True, self.b, self.a)
        return Isometry(False, self.a.conj(), self.b.conj())

    def canonical(self, backend: Backend) -> Isometry:
        if canonical_sign(self.a, backend) < 0:
            return Isometry(self.reversing, -self.a, -self.b)
        return self

    def key(self, backend: Backend):
        c = self.canonical(backend)
        return (c.reversing, c.a.key(backend), c.b.key(backend))

    def matrix(self) -> list[list]:
        """4x4 matrix (rows) in the basis 1, i, j, k."""
        one = self.a.w * 0 + 1
        zero = one * 0
        cols = []
        for idx in range(4):
            e = [zero] * 4
            e[idx] = one
            cols.append(list(self.apply(Quaternion(*e))))
        return [[cols[c][r] for c in range(4)] for r in range(4)]

    def trace(self):
        m = self.matrix()
        return m[0][0] + m[1][1] + m[2][2] + m[3][3]


# --------------------------------------------------------------------------
# Goursat data


@dataclass(frozen=True, eq=False)
class GoursatDatum:
    """``(L/l; R/r; phi)`` with ``phi`` given on generators of ``L/l``."""

    L: BinaryGroup
    l: BinaryGroup
    R: BinaryGroup
    r: BinaryGroup
    phi_gens: tuple[tuple[Quaternion, Quaternion], ...] = ()
    phi_name: str = ""

    @property
    def backend(self) -> Backend:
        return self.L.backend

    def describe(self) -> str:
        tail = f";{self.phi_name}" if self.phi_name else ""
        return f"({self.L.name}/{self.l.name};{self.R.name}/{self.r.name}{tail})"


@dataclass
class QuotientMap:
    labels_L: dict
    labels_R: dict
    mapping: dict
    problems: list[str]


def quotient_map(datum: GoursatDatum) -> QuotientMap:
    """Extend ``phi`` from generator images to all of L/l and check it."""
    b = datum.backend
    problems: list[str] = []
    if not datum.l.issubset(datum.L):
        problems.append(f"{datum.l.name} is not a subgroup of {datum.L.name}")
    if not datum.r.issubset(datum.R):
        problems.append(f"{datum.r.name} is not a subgroup of {datum.R.name}")
    if problems:
        return QuotientMap({}, {}, {}, problems)
    labels_L = _labels(datum.L, datum.l)
    labels_R = _labels(datum.R, datum.r)
    nL = len(set(labels_L.values()))
    nR = len(set(labels_R.values()))
    if nL * len(datum.l) != len(datum.L):
        problems.append(f"{datum.l.name} is not normal in {datum.L.name}")
    if nR * len(datum.r) != len(datum.R):
        problems.append(f"{datum.r.name} is not normal in {datum.R.name}")
    if nL != nR:
        problems.append(f"|L/l| = {nL} differs from |R/r| = {nR}")
    for g, rho in datum.phi_gens:
        if g not in datum.L or rho not in datum.R:
            problems.append("phi generator pair is not in L x R")
            return QuotientMap(labels_L, labels_R, {}, problems)

    reps_L = {}
    for q in datum.L.elements:
        reps_L.setdefault(labels_L[q.key(b)], q)
    reps_R = {}
    for q in datum.R.elements:
        reps_R.setdefault(labels_R[q.key(b)], q)

    one = Quaternion.one(b)
    start_L, start_R = labels_L[one.key(b)], labels_R[one.key(b)]
    mapping = {start_L: start_R}
    queue = deque([start_L])
    ok = True
    while queue and ok:
        cl = queue.popleft()
        cr = mapping[cl]
        for g, rho in datum.phi_gens:
            nl = labels_L[qmul(reps_L[cl], g).key(b)]
            nr = labels_R[qmul(reps_R[cr], rho).key(b)]
            if nl in mapping:
                if mapping[nl] != nr:
                    problems.append("phi is not a homomorphism on L/l (a coset is sent to two cosets)")
                    ok = False
                    break
            else:
                mapping[nl] = nr
                queue.append(nl)
    if ok:
        if len(mapping) != nL:
            problems.append("phi generators do not generate L/l")
        elif len(set(mapping.values())) != len(mapping):
            problems.append("phi is not injective on L/l")
        elif len(set(mapping.values())) != nR:
            problems.append("phi is not surjective onto R/r")
    return QuotientMap(labels_L, labels_R, mapping, problems)


def _labels(G: BinaryGroup, H: BinaryGroup) -> dict:
    # a non-normal H is caught by the caller through the coset count
    if len(G) == len(H):
        return {q.key(G.backend): 0 for q in G.elements}
    return coset_labels(G, H)


def fibered_pairs(datum: GoursatDatum, qm: QuotientMap) -> list[tuple[Quaternion, Quaternion]]:
    """All (l, r) in L x R with phi(l l) = r r."""
    b = datum.backend
    by_coset: dict[int, list[Quaternion]] = {}
    for q in datum.R.elements:
        by_coset.setdefault(qm.labels_R[q.key(b)], []).append(q)
    out = []
    for ell in datum.L.elements:
        target = qm.mapping[qm.labels_L[ell.key(b)]]
        for rho in by_coset[target]:
            out.append((ell, rho))
    return out


# --------------------------------------------------------------------------
# groups


@dataclass(eq=False)
class IsometryGroup:
    family_id: str
    params: dict
    backend: Backend
    datum: GoursatDatum
    preserving: tuple[Isometry, ...]
    reversing: tuple[Isometry, ...]
    generators: tuple[Isometry, ...]
    _index: dict = field(default=None, repr=False)

    def __post_init__(self):
        b = self.backend
        self._index = {g.key(b): g for g in self.elements}

    @property
    def elements(self) -> tuple[Isometry, ...]:
        return self.preserving + self.reversing

    @property
    def order(self) -> int:
        return len(self.preserving) + len(self.reversing)

    def __len__(self):
        return self.order

    def __contains__(self, g: Isometry) -> bool:
        return g.key(self.backend) in self._index

    def keys(self) -> frozenset:
        return frozenset(self._index)

    @property
    def spec(self) -> str:
        return format_spec(self.family_id, self.params)

    def expected_order(self) -> int:
        """|R| |l| / 2, doubled when reversing elements are present."""
        n = len(self.datum.R) * len(self.datum.l) // 2
        return 2 * n if self.reversing else n

    def contains_central(self) -> bool:
        b = self.backend
        minus = -Quaternion.one(b)
        return Isometry(False, minus, Quaternion.one(b)) in self

    def verify_closure(self, brute: bool = False) -> bool:
        """Check the element set is a group.

        The default proof uses structure: the preserving part is a fibered
        product over a verified quotient isomorphism, and the reversing part
        must be one coset ``G+ s`` with ``s*s`` in G+ and ``s`` normalising G+.
        ``brute=True`` composes every pair instead.
        """
        b = self.backend
        if brute:
            one = Isometry(False, Quaternion.one(b), Quaternion.one(b))
            if one not in self:
                return False
            elems = self.elements
            return all(g.inverse() in self for g in elems) and all(
                g.compose(h) in self for g in elems for h in elems
            )
        qm = quotient_map(self.datum)
        if qm.problems:
            return False
        if 2 * len(self.preserving) != len(fibered_pairs(self.datum, qm)):
            return False
        if not self.reversing:
            return True
        sigma = self.reversing[0]
        if len(self.reversing) != len(self.preserving):
            return False
        if sigma.compose(sigma) not in self:
            return False
        coset = {g.compose(sigma).key(b) for g in self.preserving}
        if coset != {g.key(b) for g in self.reversing}:
            return False
        sinv = sigma.inverse()
        for g in self.generators:
            if not g.reversing and sigma.compose(g).compose(sinv) not in self:
                return False
        return True

    def __repr__(self):
        return f"IsometryGroup({self.spec}, order={self.order}, backend={self.backend.name})"


def _make_group(family_id, params, datum, reversing_pairs=None, extender=None) -> IsometryGroup:
    """Assemble the group; ``reversing_pairs`` lists (a, b) for q -> a conj(q) b,
    ``extender`` gives one such pair whose coset G+ * s is the reversing part."""
    b = datum.backend
    qm = quotient_map(datum)
    if qm.problems:
        raise InvalidParameters(f"{family_id}: " + "; ".join(qm.problems))
    pairs = fibered_pairs(datum, qm)
    one = Quaternion.one(b)
    minus = -one
    pair_keys = {(p.key(b), q.key(b)) for p, q in pairs}
    if (minus.key(b), minus.key(b)) not in pair_keys:
        raise InvalidParameters(f"{family_id}: the datum does not contain (-1,-1)")
    preserving = _canonical_set([Isometry(False, p, q) for p, q in pairs], b)

    gens = [Isometry(False, g, rho) for g, rho in datum.phi_gens]
    gens += [Isometry(False, x, one) for x in _generators(datum.l)]
    gens += [Isometry(False, one, x) for x in _generators(datum.r)]

    reversing: tuple[Isometry, ...] = ()
    if extender is not None:
        sigma = Isometry(True, *extender)
        reversing = _canonical_set([g.compose(sigma) for g in preserving], b)
    elif reversing_pairs is not None:
        reversing = _canonical_set([Isometry(True, p, q) for p, q in reversing_pairs], b)
    if reversing:
        gens.append(reversing[0])
    gens = [g.canonical(b) for g in gens]
    return IsometryGroup(family_id, dict(params), b, datum, preserving, reversing, tuple(gens))


def _canonical_set(isos, b: Backend) -> tuple[Isometry, ...]:
    out = {}
    for g in isos:
        c = g.canonical(b)
        out.setdefault(c.key(b), c)
    return tuple(sorted(out.values(), key=lambda g: (bg.sort_key(g.a, b), bg.sort_key(g.b, b))))


@lru_cache(maxsize=None)
def _generators_cached(group: BinaryGroup) -> tuple[Quaternion, ...]:
    b = group.backend
    one = Quaternion.one(b)
    span = {one.key(b)}
    gens: list[Quaternion] = []
    for x in group.elements:
        if x.key(b) in span:
            continue
        gens.append(x)
        frontier = [q for q in _closure(gens, b)]
        span = {q.key(b) for q in frontier}
        if len(span) == len(group):
            break
    return tuple(gens)


def _generators(group: BinaryGroup) -> tuple[Quaternion, ...]:
    return _generators_cached(group)


def _closure(gens, b: Backend) -> list[Quaternion]:
    one = Quaternion.one(b)
    seen = {one.key(b): one}
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = qmul(x, g)
            k = y.key(b)
            if k not in seen:
                seen[k] = y
                queue.append(y)
    return list(seen.values())


# --------------------------------------------------------------------------
# family catalogue


def _kq(b: Backend, num: int, den: int) -> Quaternion:
    """cos(num/den pi) + sin(num/den pi) k."""
    c, s = b.cos_sin_pi(num, den)
    z = b.const(0)
    return Quaternion(c, z, z, s)


def _unit(b: Backend, idx: int) -> Quaternion:
    return Quaternion.basis(b, idx)


def _omega(b: Backend) -> Quaternion:
    h = b.const(1) / 2
    return Quaternion(h, h, h, h)


def _s_oct(b: Backend) -> Quaternion:
    r = b.sqrt(2) / 2
    z = b.const(0)
    return Quaternion(r, r, z, z)


def _t_prime(b: Backend) -> Quaternion:
    r = b.sqrt(2) / 2
    z = b.const(0)
    return Quaternion(z, r, r, z)


def I_pairs(b: Backend) -> list[tuple[Quaternion, Quaternion]]:
    """(p, p-dagger) for every p in I, matched through the sqrt5 sign flip."""
    T = bg.build("T", backend=b)
    reps = I_COSET_REPS(b, 1)
    reps_d = I_COSET_REPS(b, -1)
    return [(qmul(g, t), qmul(gd, t)) for g, gd in zip(reps, reps_d) for t in T.elements]


def _I_gens(b: Backend) -> list[tuple[Quaternion, Quaternion]]:
    """Generators i, omega, g1 of I together with their sqrt5-flipped images."""
    i = _unit(b, 1)
    om = _omega(b)
    g1 = I_COSET_REPS(b, 1)[1]
    g1d = I_COSET_REPS(b, -1)[1]
    return [(i, i), (om, om), (g1, g1d)]


def _grp(label, n=None, b=EXACT):
    return bg.build(label, n, backend=b)


def _identity_gens(label: str, b: Backend) -> list[tuple[Quaternion, Quaternion]]:
    i, om = _unit(b, 1), _omega(b)
    if label == "T":
        gens = [i, om]
    elif label == "O":
        gens = [_s_oct(b), om]
    elif label == "I":
        gens = [i, om, I_COSET_REPS(b, 1)[1]]
    else:
        raise ValueError(label)
    return [(g, g) for g in gens]


def _odd(*vals):
    return all(v % 2 == 1 for v in vals)


def _require(cond: bool, message: str):
    if not cond:
        raise InvalidParameters(message)


def _check_mnrs(p, odd=False):
    m, n, r, s = p["m"], p["n"], p["r"], p["s"]
    _require(min(m, n, r) >= 1, "m, n, r must be >= 1")
    if odd:
        _require(_odd(m, n), "m and n must be odd")
        _require(math.gcd(s, 2 * r) == 1, "gcd(s, 2r) = 1 is needed for phi_s to be an isomorphism")
        _require(0 <= s <= r, "0 <= s <= r")
    else:
        _require(math.gcd(s, r) == 1, "gcd(s, r) = 1")
        _require(0 <= s <= r / 2, "0 <= s <= r/2")


def _check_pos(p, *names):
    for name in names:
        _require(p[name] >= 1, f"{name} must be >= 1")


# Each builder takes (params, backend) and returns an IsometryGroup.


def _fam1(p, b, odd=False):
    _check_mnrs(p, odd)
    m, n, r, s = p["m"], p["n"], p["r"], p["s"]
    small = (lambda k: _grp("C", k, b)) if odd else (lambda k: _grp("C", 2 * k, b))
    datum = GoursatDatum(
        _grp("C", 2 * m * r, b), small(m), _grp("C", 2 * n * r, b), small(n),
        ((_kq(b, 1, m * r), _kq(b, s, n * r)),), f"phi_{s}",
    )
    return datum


def _fam11(p, b, odd=False):
    _check_mnrs(p, odd)
    m, n, r, s = p["m"], p["n"], p["r"], p["s"]
    small = (lambda k: _grp("C", k, b)) if odd else (lambda k: _grp("C", 2 * k, b))
    i = _unit(b, 1)
    return GoursatDatum(
        _grp("D", m * r, b), small(m), _grp("D", n * r, b), small(n),
        ((_kq(b, 1, m * r), _kq(b, s, n * r)), (i, i)), f"psi_{s}",
    )


def _fam11a(p, b, odd=False):
    m, n = p["m"], p["n"]
    _check_pos(p, "m", "n")
    if odd:
        _require(_odd(m, n), "m and n must be odd")
    else:
        _require(m >= 2 and n >= 2, "m, n >= 2")
    small = (lambda k: _grp("C", k, b)) if odd else (lambda k: _grp("C", 2 * k, b))
    i = _unit(b, 1)
    if odd:
        # quotient is the quaternion group on the images of i, j, k; the
        # signs matter and must match the reversing cosets of 35ap/35am
        k = _unit(b, 3)
        gens = ((k, i), (i, k))
    else:
        gens = ((_kq(b, 1, 2 * m), i), (i, _kq(b, 1, 2 * n)))
    return GoursatDatum(
        _grp("D", 2 * m, b), small(m), _grp("D", 2 * n, b), small(n), gens, "psi_#",
    )


def _simple(Lspec, lspec, Rspec, rspec, gens_fn=None, name=""):
    """Builder for data whose groups depend on at most m and n."""

    def datum(p, b):
        def g(spec):
            label, fn = spec
            return _grp(label, fn(p) if fn else None, b)

        gens = tuple(gens_fn(p, b)) if gens_fn else ()
        return GoursatDatum(g(Lspec), g(lspec), g(Rspec), g(rspec), gens, name)

    return datum


def _C(fn):
    return ("C", fn)


def _D(fn):
    return ("D", fn)


T_, O_, I_, Id_ = ("T", None), ("O", None), ("I", None), ("Idagger", None)


def _m(p):
    return p["m"]


def _n(p):
    return p["n"]


_PRESERVING: dict[str, tuple[tuple[str, ...], object]] = {}


def _reg(fid, params, fn):
    _PRESERVING[fid] = (params, fn)


_reg("1", ("m", "n", "r", "s"), lambda p, b: _fam1(p, b))
_reg("2", ("m", "n"), _simple(_C(lambda p: 2 * p["m"]), _C(lambda p: 2 * p["m"]), _D(_n), _D(_n)))
_reg("3", ("m", "n"), _simple(
    _C(lambda p: 4 * p["m"]), _C(lambda p: 2 * p["m"]), _D(_n), _C(lambda p: 2 * p["n"]),
    lambda p, b: [(_kq(b, 1, 2 * p["m"]), _unit(b, 1))]))
_reg("4", ("m", "n"), _simple(
    _C(lambda p: 4 * p["m"]), _C(lambda p: 2 * p["m"]), _D(lambda p: 2 * p["n"]), _D(_n),
    lambda p, b: [(_kq(b, 1, 2 * p["m"]), _kq(b, 1, 2 * p["n"]))]))
_reg("5", ("m",), _simple(_C(lambda p: 2 * p["m"]), _C(lambda p: 2 * p["m"]), T_, T_))
_reg("6", ("m",), _simple(
    _C(lambda p: 6 * p["m"]), _C(lambda p: 2 * p["m"]), T_, ("D", lambda p: 2),
    lambda p, b: [(_kq(b, 1, 3 * p["m"]), _omega(b))]))
_reg("7", ("m",), _simple(_C(lambda p: 2 * p["m"]), _C(lambda p: 2 * p["m"]), O_, O_))
_reg("8", ("m",), _simple(
    _C(lambda p: 4 * p["m"]), _C(lambda p: 2 * p["m"]), O_, T_,
    lambda p, b: [(_kq(b, 1, 2 * p["m"]), _s_oct(b))]))
_reg("9", ("m",), _simple(_C(lambda p: 2 * p["m"]), _C(lambda p: 2 * p["m"]), I_, I_))
_reg("10", ("m", "n"), _simple(_D(_m), _D(_m), _D(_n), _D(_n)))
_reg("11", ("m", "n", "r", "s"), lambda p, b: _fam11(p, b))
_reg("11a", ("m", "n"), lambda p, b: _fam11a(p, b))
_reg("12", ("m", "n"), _simple(
    _D(lambda p: 2 * p["m"]), _D(_m), _D(lambda p: 2 * p["n"]), _D(_n),
    lambda p, b: [(_kq(b, 1, 2 * p["m"]), _kq(b, 1, 2 * p["n"]))]))
_reg("13", ("m", "n"), _simple(
    _D(lambda p: 2 * p["m"]), _D(_m), _D(_n), _C(lambda p: 2 * p["n"]),
    lambda p, b: [(_kq(b, 1, 2 * p["m"]), _unit(b, 1))]))
_reg("14", ("m",), _simple(_D(_m), _D(_m), T_, T_))
_reg("15", ("m",), _simple(_D(_m), _D(_m), O_, O_))
_reg("16", ("m",), _simple(
    _D(_m), _C(lambda p: 2 * p["m"]), O_, T_, lambda p, b: [(_unit(b, 1), _s_oct(b))]))
_reg("17", ("m",), _simple(
    _D(lambda p: 2 * p["m"]), _D(_m), O_, T_, lambda p, b: [(_kq(b, 1, 2 * p["m"]), _s_oct(b))]))
_reg("18", ("m",), _simple(
    _D(lambda p: 3 * p["m"]), _C(lambda p: 2 * p["m"]), O_, ("D", lambda p: 2),
    lambda p, b: [(_kq(b, 1, 3 * p["m"]), _omega(b)), (_unit(b, 1), _s_oct(b))]))
_reg("19", ("m",), _simple(_D(_m), _D(_m), I_, I_))
_reg("20", (), _simple(T_, T_, T_, T_))
_reg("21", (), _simple(T_, _C(lambda p: 2), T_, _C(lambda p: 2), lambda p, b: _identity_gens("T", b)))
_reg("22", (), _simple(
    T_, ("D", lambda p: 2), T_, ("D", lambda p: 2), lambda p, b: [(_omega(b), _omega(b))]))
_reg("23", (), _simple(T_, T_, O_, O_))
_reg("24", (), _simple(T_, T_, I_, I_))
_reg("25", (), _simple(O_, O_, O_, O_))
_reg("26", (), _simple(O_, _C(lambda p: 2), O_, _C(lambda p: 2), lambda p, b: _identity_gens("O", b)))
_reg("27", (), _simple(
    O_, ("D", lambda p: 2), O_, ("D", lambda p: 2),
    lambda p, b: [(_omega(b), _omega(b)), (_s_oct(b), _s_oct(b))]))
_reg("28", (), _simple(O_, T_, O_, T_, lambda p, b: [(_s_oct(b), _s_oct(b))]))
_reg("29", (), _simple(O_, O_, I_, I_))
_reg("30", (), _simple(I_, I_, I_, I_))
_reg("31", (), _simple(I_, _C(lambda p: 2), I_, _C(lambda p: 2), lambda p, b: _identity_gens("I", b)))
_reg("32", (), _simple(
    Id_, _C(lambda p: 2), I_, _C(lambda p: 2),
    lambda p, b: [(d, x) for x, d in _I_gens(b)], "phi_dagger^-1"))
# Table II: no central element in l, r
_reg("1'", ("m", "n", "r", "s"), lambda p, b: _fam1(p, b, odd=True))
_reg("11'", ("m", "n", "r", "s"), lambda p, b: _fam11(p, b, odd=True))
_reg("11a'", ("m", "n"), lambda p, b: _fam11a(p, b, odd=True))
_reg("21'", (), _simple(T_, _C(lambda p: 1), T_, _C(lambda p: 1), lambda p, b: _identity_gens("T", b)))
_reg("26'", (), _simple(O_, _C(lambda p: 1), O_, _C(lambda p: 1), lambda p, b: _identity_gens("O", b), "id"))
_reg("26''", (), _simple(
    O_, _C(lambda p: 1), O_, _C(lambda p: 1),
    lambda p, b: [(_s_oct(b), -_s_oct(b)), (_omega(b), _omega(b))], "xi"))
_reg("31'", (), _simple(I_, _C(lambda p: 1), I_, _C(lambda p: 1), lambda p, b: _identity_gens("I", b)))
_reg("32'", (), _simple(
    Id_, _C(lambda p: 1), I_, _C(lambda p: 1),
    lambda p, b: [(d, x) for x, d in _I_gens(b)], "phi_dagger^-1"))


# -- reversing extensions ---------------------------------------------------


def _pre(fid, p, b):
    params, fn = _PRESERVING[fid]
    return fn({k: p[k] for k in params}, b)


def _members(G: BinaryGroup, H: BinaryGroup):
    return [x for x in G.elements if x not in H]


def _pm_inverse(xs, signs=(1, -1)):
    return [(x, s * x.conj()) for x in xs for s in signs]


def _check_basic_III(p):
    n, r = p["n"], p["r"]
    _require(n >= 1 and r >= 1, "n, r >= 1")
    _require((r * n) % 2 == 0, "rn must be even")
    for name in ("s", "h", "k"):
        if name in p:
            _require(0 <= p[name] < r, f"0 <= {name} < r")
    _require(math.gcd(p["s"], r) == 1, "gcd(s, r) = 1")


def _datum_33(p, b):
    n, r, s = p["n"], p["r"], p["s"]
    return GoursatDatum(
        _grp("C", n * r, b), _grp("C", n, b), _grp("C", n * r, b), _grp("C", n, b),
        ((_kq(b, 2, n * r), _kq(b, 2 * s, n * r)),), f"phi_{s}",
    )


def _datum_35(p, b):
    n, r, s = p["n"], p["r"], p["s"]
    i = _unit(b, 1)
    half = n * r // 2
    return GoursatDatum(
        _grp("D", half, b), _grp("C", n, b), _grp("D", half, b), _grp("C", n, b),
        ((_kq(b, 2, n * r), _kq(b, 2 * s, n * r)), (i, i)), f"phi_{s}",
    )


def _build_33(p, b):
    _check_basic_III(p)
    n, r, s, h = p["n"], p["r"], p["s"], p["h"]
    _require((s * s - 1) % r == 0, "[1] s^2 = 1 (mod r)")
    _require((h * (s - 1)) % r == 0, "[1] h(s-1) = 0 (mod r)")
    one = Quaternion.one(b)
    return _make_group("33", p, _datum_33(p, b), extender=(_kq(b, 2 * h, n * r), one))


def _build_35(p, b):
    _check_basic_III(p)
    n, r, s, h, k = p["n"], p["r"], p["s"], p["h"], p["k"]
    _require((s * s - 1) % r == 0, "[2] s^2 = 1 (mod r)")
    _require((h - k) % 2 == 0, "[2] h = k (mod 2)")
    _require(((h - k) * (s - 1)) % (2 * r) == 0, "[2] (h-k)(s-1) = 0 (mod 2r)")
    _require(((h + k) * (s + 1)) % (2 * r) == 0, "[2] (h+k)(s+1) = 0 (mod 2r)")
    return _make_group("35", p, _datum_35(p, b), extender=(_kq(b, h, n * r), _kq(b, k, n * r)))


def _build_36(p, b):
    _check_basic_III(p)
    n, r, s, h, k = p["n"], p["r"], p["s"], p["h"], p["k"]
    _require((s * s + 1) % r == 0, "[3] s^2 + 1 = 0 (mod r)")
    _require((h - k) % 2 == 0, "[3] h = k (mod 2)")
    _require((h + k - s * (h - k)) % (2 * r) == 0, "[3] h + k = s(h - k) (mod 2r)")
    _require((k - h - s * (k + h)) % (2 * r) == 0, "[3] k - h = s(k + h) (mod 2r)")
    i = _unit(b, 1)
    return _make_group("36", p, _datum_35(p, b), extender=(qmul(i, _kq(b, h, n * r)), _kq(b, k, n * r)))


def _build_34(p, b):
    n = p["n"]
    _require(n >= 1, "n >= 1")
    D = _grp("D", n, b)
    datum = _PRESERVING["10"][1]({"m": n, "n": n}, b)
    return _make_group("34", p, datum, reversing_pairs=[(x, y) for x in D for y in D])


def _same_as_preserving(fid_pre, params_pre, complement=False):
    """Reversing pairs (a, b) = the preserving fibered pairs (or their complement in L x R)."""

    def builder(p, b, fid):
        datum = _PRESERVING[fid_pre][1](params_pre(p), b)
        qm = quotient_map(datum)
        if qm.problems:
            raise InvalidParameters(f"{fid}: " + "; ".join(qm.problems))
        pairs = fibered_pairs(datum, qm)
        if complement:
            inside = {(x.key(b), y.key(b)) for x, y in pairs}
            pairs = [(x, y) for x in datum.L for y in datum.R if (x.key(b), y.key(b)) not in inside]
        return _make_group(fid, p, datum, reversing_pairs=pairs)

    return builder


def _ext(fid_pre, pairs_fn):
    def builder(p, b, fid):
        datum = _pre(fid_pre, {}, b)
        return _make_group(fid, p, datum, reversing_pairs=pairs_fn(b))

    return builder


def _T(b):
    return _grp("T", b=b)


def _O(b):
    return _grp("O", b=b)


def _I(b):
    return _grp("I", b=b)


def _D2(b):
    return _grp("D", 2, b)


def _OminusT(b):
    return _members(_O(b), _T(b))


def _product_pairs(A, B, pred):
    return [(x, y) for x in A for y in B if pred(x, y)]


def _same_coset(H, b):
    def pred(x, y):
        return qmul(x.conj(), y) in H

    return pred


def _pairs_51(b, sign_choices):
    tp = _t_prime(b)
    out = []
    for p, pd in I_pairs(b):
        a = qmul(pd, tp)
        inv = qmul(p, tp).conj()
        out.extend((a, s * inv) for s in sign_choices)
    return out


def _pairs_35ap(n, b, minus: bool):
    Cn = _grp("C", n, b)
    i, j, k = _unit(b, 1), _unit(b, 2), _unit(b, 3)
    cs = list(Cn.elements)

    def coset(g):
        return [qmul(g, c) for c in cs]

    if not minus:
        # [5]
        blocks = [(cs, cs), (coset(-k), coset(i)), (coset(i), coset(-k)), (coset(j), coset(j))]
    else:
        # [6]
        blocks = [(cs, [-c for c in cs]), (coset(k), coset(i)), (coset(i), coset(k)),
                  (coset(j), [-c for c in coset(j)])]
    return [(x, y) for A, B in blocks for x in A for y in B]


def _build_35a(p, b):
    n = p["n"]
    _require(n >= 1, "n >= 1")
    return _same_as_preserving("11a", lambda q: {"m": q["n"], "n": q["n"]})(p, b, "35a")


def _build_35ap(p, b, minus=False):
    n = p["n"]
    _require(n >= 1 and n % 2 == 1, "n must be odd")
    datum = _PRESERVING["11a'"][1]({"m": n, "n": n}, b)
    fid = "35am" if minus else "35ap"
    return _make_group(fid, p, datum, reversing_pairs=_pairs_35ap(n, b, minus))


def _build_37(p, b, minus=False):
    n = p["n"]
    _require(n >= 1, "n >= 1")
    fid = "38" if minus else "37"
    return _same_as_preserving("12", lambda q: {"m": q["n"], "n": q["n"]}, complement=minus)(p, b, fid)


_EXTENDED: dict[str, tuple[tuple[str, ...], object]] = {
    "33": (("n", "r", "s", "h"), _build_33),
    "34": (("n",), _build_34),
    "35": (("n", "r", "s", "h", "k"), _build_35),
    "35a": (("n",), _build_35a),
    "36": (("n", "r", "s", "h", "k"), _build_36),
    "37": (("n",), lambda p, b: _build_37(p, b)),
    "38": (("n",), lambda p, b: _build_37(p, b, minus=True)),
    "35ap": (("n",), lambda p, b: _build_35ap(p, b)),
    "35am": (("n",), lambda p, b: _build_35ap(p, b, minus=True)),
}


def _reg_ext(fid, pre, pairs_fn):
    builder = _ext(pre, pairs_fn)
    _EXTENDED[fid] = ((), lambda p, b, _f=fid: builder(p, b, _f))


_reg_ext("39", "21", lambda b: _pm_inverse(_T(b).elements))
_reg_ext("40", "21", lambda b: _pm_inverse(_OminusT(b)))
_reg_ext("41", "22", lambda b: _product_pairs(_T(b), _T(b), lambda x, y: qmul(x, y) in _D2(b)))
_reg_ext("42", "22", lambda b: _product_pairs(
    _OminusT(b), _OminusT(b), lambda x, y: qmul(x, y.conj()) in _D2(b)))
_reg_ext("43", "20", lambda b: [(x, y) for x in _T(b) for y in _T(b)])
_reg_ext("44", "26", lambda b: _pm_inverse(_O(b).elements))
_reg_ext("45", "28", lambda b: _product_pairs(_O(b), _O(b), _same_coset(_T(b), b)))
_reg_ext("46", "28", lambda b: _product_pairs(
    _O(b), _O(b), lambda x, y: not _same_coset(_T(b), b)(x, y)))
_reg_ext("47", "27", lambda b: _product_pairs(_O(b), _O(b), lambda x, y: qmul(x, y) in _D2(b)))
_reg_ext("48", "25", lambda b: [(x, y) for x in _O(b) for y in _O(b)])
_reg_ext("49", "31", lambda b: _pm_inverse(_I(b).elements))
_reg_ext("50", "30", lambda b: [(x, y) for x in _I(b) for y in _I(b)])
_reg_ext("51", "32", lambda b: _pairs_51(b, (1, -1)))
_reg_ext("39p", "21'", lambda b: _pm_inverse(_T(b).elements, (1,)))
_reg_ext("39m", "21'", lambda b: _pm_inverse(_T(b).elements, (-1,)))
_reg_ext("40p", "21'", lambda b: _pm_inverse(_OminusT(b), (1,)))
_reg_ext("40m", "21'", lambda b: _pm_inverse(_OminusT(b), (-1,)))
_reg_ext("44p", "26'", lambda b: _pm_inverse(_O(b).elements, (1,)))
_reg_ext("44m", "26'", lambda b: _pm_inverse(_O(b).elements, (-1,)))
_reg_ext("44pm", "26''", lambda b: _pm_inverse(_T(b).elements, (1,)) + _pm_inverse(_OminusT(b), (-1,)))
_reg_ext("44mp", "26''", lambda b: _pm_inverse(_T(b).elements, (-1,)) + _pm_inverse(_OminusT(b), (1,)))
_reg_ext("49p", "31'", lambda b: _pm_inverse(_I(b).elements, (1,)))
_reg_ext("49m", "31'", lambda b: _pm_inverse(_I(b).elements, (-1,)))
_reg_ext("51p", "32'", lambda b: _pairs_51(b, (1,)))
_reg_ext("51m", "32'", lambda b: _pairs_51(b, (-1,)))


FAMILIES: dict[str, tuple[str, ...]] = {fid: params for fid, (params, _) in _PRESERVING.items()}
FAMILIES.update({fid: params for fid, (params, _) in _EXTENDED.items()})


# --------------------------------------------------------------------------
# identifiers


_PRIMES = {"′": "'", "″": "''", "’": "'"}
_FID_RE = re.compile(r"\d+[a-z]*'*")
_PARAM_RE = re.compile(r"\s*([a-z])\s*=\s*(-?\d+)\s*")


def normalize_family(fid: str) -> str:
    for k, v in _PRIMES.items():
        fid = fid.replace(k, v)
    return fid.strip()


def parse_spec(text: str, require_all: bool = True) -> tuple[str, dict]:
    """Parse ``duval:11a(m=2,n=3)`` into ``("11a", {"m": 2, "n": 3})``."""
    raw = text
    text = normalize_family(text)
    pos = 0
    if text.startswith("duval:"):
        pos = len("duval:")
    m = _FID_RE.match(text, pos)
    if not m:
        raise SpecParseError(f"expected a Du Val family number in {raw!r}", pos)
    fid = m.group(0)
    if fid not in FAMILIES:
        raise SpecParseError(f"unknown Du Val family {fid!r}", pos)
    pos = m.end()
    params: dict[str, int] = {}
    if pos < len(text):
        if text[pos] != "(":
            raise SpecParseError(f"unexpected character {text[pos]!r}", pos)
        close = text.find(")", pos)
        if close < 0:
            raise SpecParseError("missing ')'", len(text))
        if close != len(text) - 1:
            raise SpecParseError("trailing characters after ')'", close + 1)
        body_start = pos + 1
        body = text[body_start:close]
        offset = body_start
        for chunk in body.split(",") if body.strip() else []:
            pm = _PARAM_RE.fullmatch(chunk)
            if not pm:
                raise SpecParseError(f"bad parameter {chunk.strip()!r}", offset)
            name, value = pm.group(1), int(pm.group(2))
            if name in params:
                raise SpecParseError(f"parameter {name!r} given twice", offset)
            params[name] = value
            offset += len(chunk) + 1
    expected = FAMILIES[fid]
    unknown = set(params) - set(expected)
    if unknown:
        raise SpecParseError(
            f"family {fid} takes parameters {', '.join(expected) or 'none'}; got {', '.join(sorted(unknown))}",
            pos,
        )
    missing = [p for p in expected if p not in params]
    if missing and require_all:
        raise SpecParseError(f"family {fid} needs parameters {', '.join(missing)}", len(text))
    return fid, {k: params[k] for k in expected if k in params}


def format_spec(fid: str, params: dict) -> str:
    if not params:
        return f"duval:{fid}"
    inner = ",".join(f"{k}={v}" for k, v in params.items())
    return f"duval:{fid}({inner})"


# --------------------------------------------------------------------------
# public operations


def instantiate(family_id: str, params: dict | None = None, backend: Backend | str = EXACT) -> IsometryGroup:
    """Build the group of a Du Val family; raises InvalidParameters or UnsupportedExact."""
    fid = normalize_family(family_id)
    if fid.startswith("duval:"):
        fid, parsed = parse_spec(fid, require_all=params is None)
        params = {**parsed, **(params or {})}
    b = get_backend(backend)
    if fid not in FAMILIES:
        raise InvalidParameters(f"unknown Du Val family {fid!r}")
    params = dict(params or {})
    missing = [p for p in FAMILIES[fid] if p not in params]
    if missing:
        raise InvalidParameters(f"family {fid} needs parameters {', '.join(missing)}")
    key = tuple((k, params[k]) for k in FAMILIES[fid])
    return _instantiate_cached(fid, key, b)


@lru_cache(maxsize=256)
def _instantiate_cached(fid: str, key: tuple, b: Backend) -> IsometryGroup:
    params = dict(key)
    if fid in _PRESERVING:
        datum = _PRESERVING[fid][1](params, b)
        return _make_group(fid, params, datum)
    return _EXTENDED[fid][1](params, b)


@dataclass
class ValidationReport:
    checks: list[tuple[str, bool, str]]

    @property
    def valid(self) -> bool:
        return all(ok for _, ok, _ in self.checks)


def validate(datum: GoursatDatum, expected: IsometryGroup | None = None) -> ValidationReport:
    """Check normality, the quotient isomorphism and (optionally) agreement with ``expected``."""
    b = datum.backend
    checks: list[tuple[str, bool, str]] = []
    sub_l = datum.l.issubset(datum.L)
    sub_r = datum.r.issubset(datum.R)
    checks.append(("l subgroup of L", sub_l, ""))
    checks.append(("r subgroup of R", sub_r, ""))
    if sub_l:
        ok = bg.normal_in(datum.l, datum.L)
        checks.append(("l normal in L", ok, "" if ok else f"{datum.l.name} not normal in {datum.L.name}"))
    if sub_r:
        ok = bg.normal_in(datum.r, datum.R)
        checks.append(("r normal in R", ok, "" if ok else f"{datum.r.name} not normal in {datum.R.name}"))
    if not (sub_l and sub_r):
        return ValidationReport(checks)
    nL, nR = len(datum.L) // len(datum.l), len(datum.R) // len(datum.r)
    checks.append(("|L/l| = |R/r|", nL == nR, f"{nL} vs {nR}"))
    qm = quotient_map(datum)
    checks.append(("phi is an isomorphism", not qm.problems, "; ".join(qm.problems)))
    if qm.problems or expected is None:
        return ValidationReport(checks)
    pairs = fibered_pairs(datum, qm)
    keys = {Isometry(False, p, q).key(b) for p, q in pairs}
    expected_keys = {g.key(b) for g in expected.preserving}
    checks.append(("fibered product matches group", keys == expected_keys,
                   f"{len(keys)} vs {len(expected_keys)} elements"))
    return ValidationReport(checks)


def is_subgroup(G1: IsometryGroup, G2: IsometryGroup) -> bool:
    if G1.backend is not G2.backend:
        raise ValueError("groups must share a backend")
    return G1.keys() <= G2.keys()


def is_normal_subgroup(G1: IsometryGroup, G2: IsometryGroup) -> bool:
    if not is_subgroup(G1, G2):
        return False
    for g in G2.generators:
        ginv = g.inverse()
        for h in G1.generators:
            if g.compose(h).compose(ginv) not in G1:
                return False
    return True


def fixes_a_point(G: IsometryGroup) -> bool:
    """Whether a unit vector is fixed by every element (common eigenvector, eigenvalue 1)."""
    from .linalg import nullspace

    b = G.backend
    basis = [list(Quaternion.basis(b, i)) for i in range(4)]
    for g in G.generators:
        # columns: g(v) - v for each current basis vector
        diffs = [[x - y for x, y in zip(g.apply(Quaternion(*v)), v)] for v in basis]
        rows = [[diffs[c][r] for c in range(len(basis))] for r in range(4)]
        coeffs = nullspace(rows, b)
        if not coeffs:
            return False
        basis = [
            [sum((c[i] * basis[i][r] for i in range(len(basis))), b.const(0)) for r in range(4)]
            for c in coeffs
        ]
    return True
