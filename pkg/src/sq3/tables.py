"""Summary tables of diameter lower bounds, recomputed and compared row by row."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import sphere2
from .algebraic import SQRT2, SQRT5, SQRT10, FieldElement
from .goursat import instantiate, is_normal_subgroup, is_subgroup
from .orbit_cell import DiameterBound, orbit_of_one, prefundamental_domain
from .quaternion import UnsupportedExact, get_backend

__all__ = [
    "Expected",
    "TableRow",
    "TABLES",
    "compute_bound",
    "cell_for",
    "run_table",
    "hypercube_bound",
    "voronoi_bound_float",
]

TOL = 1e-9


@dataclass(frozen=True)
class Expected:
    """A closed form ``arccos(cos_sign * sqrt(cos2))``."""

    label: str
    cos_sign: int
    cos2: FieldElement

    @property
    def radians(self) -> float:
        return math.acos(self.cos_sign * math.sqrt(max(self.cos2.to_float(), 0.0)))


_F = FieldElement
PI = Expected("pi", -1, _F(1))
PI_2 = Expected("pi/2", 0, _F(0))
PI_3 = Expected("pi/3", 1, _F(1, 0, 0, 0) / 4)
PI_4 = Expected("pi/4", 1, _F(1) / 2)
ACOS_1_4 = Expected("arccos(1/4)", 1, _F(1) / 16)
ACOS_R5_4 = Expected("arccos(sqrt5/4)", 1, _F(5) / 16)
ACOS_TRUNC_CUBE = Expected("arccos((sqrt2+1)/(2 sqrt2))", 1, ((SQRT2 + 1) / (2 * SQRT2)) ** 2)
ACOS_DODECA = Expected("arccos((3 sqrt2+sqrt10)/8)", 1, ((3 * SQRT2 + SQRT10) / 8) ** 2)
ACOS_DODECA_ALT = Expected("arccos((3+sqrt5)/(4 sqrt2))", 1, ((3 + SQRT5) / (4 * SQRT2)) ** 2)
ACOS_29 = Expected("arccos(1/sqrt(40+12sqrt2-8sqrt5-12sqrt10))", 1,
                   1 / (40 + 12 * SQRT2 - 8 * SQRT5 - 12 * SQRT10))


@dataclass
class TableRow:
    family_id: str
    params: dict
    expected: str
    expected_radians: float
    computed: float | None
    exact: bool
    status: str
    note: str = ""
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "family": self.family_id,
            "params": dict(self.params),
            "expected": self.expected,
            "expected_radians": self.expected_radians,
            "computed_radians": self.computed,
            "exact": self.exact,
            "status": self.status,
            "note": self.note,
            **({"extra": self.extra} if self.extra else {}),
        }


# known disagreements between the tabulated values and the computation
NOTES = {
    ("nonfib-rational", "40"): "group contains q -> -q (via #21), so the orbit of 1 is {1,-1} and the bound is pi/2",
    ("nonfib-rational", "44"): "group contains q -> -q (via #26), so the orbit of 1 is {1,-1}; the reflection table lists pi/2",
    ("reflection", "51p"): "orbit of 1 is the 5-cell; the irrational table lists arccos(1/4) for the same group",
    ("inclusions", "32/51m"): "the preserving part of 51m is 32', which has index 2 in 32",
}


def cell_for(spec: str, params: dict | None = None, backend="exact"):
    """Group, orbit and cell; exact requests fall back to float when a value
    leaves Q(sqrt2, sqrt5).  Returns (group, cell, fallback_note)."""
    note = ""
    b = get_backend(backend)
    try:
        G = instantiate(spec, params, b)
    except UnsupportedExact as exc:
        if not b.exact:
            raise
        note = f"float fallback: {exc}"
        G = instantiate(spec, params, get_backend("float"))
    return G, _cell_cached(G), note


_CELLS: dict = {}


def _cell_cached(G):
    key = id(G)
    if key not in _CELLS:
        _CELLS[key] = (G, prefundamental_domain(orbit_of_one(G)))
    return _CELLS[key][1]


def compute_bound(spec: str, params: dict | None = None, backend="exact") -> DiameterBound:
    return cell_for(spec, params, backend)[1].bound


def _compare(bound: DiameterBound, exp: Expected) -> bool:
    if abs(bound.radians - exp.radians) > TOL:
        return False
    if bound.exact and isinstance(bound.cos2, FieldElement):
        return bound.cos_sign == exp.cos_sign and bound.cos2 == exp.cos2
    return True


def _row(table: str, fid: str, exp: Expected, backend) -> TableRow:
    G, cell, note = cell_for(f"duval:{fid}", None, backend)
    bd = cell.bound
    ok = _compare(bd, exp)
    extra_note = NOTES.get((table, fid), "") if not ok else ""
    return TableRow(fid, {}, exp.label, exp.radians, bd.radians, bd.exact,
                    "match" if ok else "mismatch", "; ".join(x for x in (note, extra_note) if x),
                    {"order": G.order, "orbit": len(cell.orbit), "vertices": len(cell.vertices)})


NONFIB_RATIONAL = [
    ("21'", PI), ("26'", PI), ("31'", PI), ("39p", PI), ("40", PI), ("40p", PI), ("44", PI),
    ("44p", PI), ("49p", PI),
    ("21", PI_2), ("26", PI_2), ("26''", PI_2), ("31", PI_2), ("39", PI_2), ("39m", PI_2),
    ("40m", PI_2), ("44m", PI_2), ("44pm", PI_2), ("44mp", PI_2), ("49", PI_2), ("49m", PI_2),
    ("22", PI_3), ("27", PI_3), ("41", PI_3), ("42", PI_3), ("47", PI_3),
    ("20", PI_4), ("28", PI_4), ("43", PI_4), ("45", PI_4),
]

NONFIB_IRRATIONAL = [
    ("32'", ACOS_1_4), ("51p", ACOS_1_4),
    ("32", ACOS_R5_4), ("51", ACOS_R5_4), ("51m", ACOS_R5_4),
    ("23", ACOS_TRUNC_CUBE), ("25", ACOS_TRUNC_CUBE), ("46", ACOS_TRUNC_CUBE), ("48", ACOS_TRUNC_CUBE),
    ("24", ACOS_DODECA), ("30", ACOS_DODECA), ("50", ACOS_DODECA),
    ("29", ACOS_29),
]

REFLECTION = [
    ("40p", PI), ("44p", PI), ("49p", PI),
    ("44mp", PI_2), ("44", PI_2), ("49", PI_2),
    ("47", PI_3), ("42", PI_3),
    ("51p", PI_4), ("45", PI_4),
    ("50", ACOS_DODECA_ALT),
]

# (sub, sup, normal?, expected index or None); "g32g^-1 in 30" needs a conjugation and is skipped
INCLUSIONS = [
    ("21'", "26'", True, 2), ("21'", "39p", True, 2), ("21", "40", True, 2), ("21'", "40p", True, 2),
    ("26", "44", True, 2), ("26'", "44p", True, 2), ("31'", "49p", True, 2),
    ("21'", "21", True, 2), ("21", "26", True, 2), ("26'", "26", True, 2), ("26''", "26", True, 2),
    ("31'", "31", True, 2), ("21", "39", True, 2), ("21'", "39m", True, 2), ("21'", "40m", True, 2),
    ("26'", "44m", True, 2), ("21'", "26''", True, 2), ("26''", "44pm", True, 2), ("26''", "44mp", True, 2), ("31", "49", True, 2),
    ("31'", "49m", True, 2),
    ("21", "22", False, 4), ("26", "27", False, 4), ("22", "27", True, 2), ("22", "41", True, 2),
    ("22", "42", True, 2), ("27", "47", True, 2), ("26", "47", False, None),
    ("22", "20", False, 3), ("27", "28", False, 3), ("20", "28", True, 2), ("20", "43", True, 2),
    ("28", "45", True, 2),
    ("32'", "51p", True, 2), ("32'", "32", True, 2), ("32", "51", True, 2), ("32", "51m", True, 2),
    ("20", "23", True, 2), ("23", "25", True, 2), ("28", "25", True, 2), ("28", "46", True, 2),
    ("25", "48", True, 2), ("20", "24", False, None), ("31", "30", False, None), ("30", "50", True, 2),
    ("24", "29", True, 2),
]
SKIPPED_INCLUSIONS = [("32", "30", "inclusion holds only after conjugating #32 by an element of SO(4)")]


def _inclusion_row(sub: str, sup: str, normal: bool, index: int | None, backend) -> TableRow:
    b = get_backend(backend)
    G1, c1, _ = cell_for(f"duval:{sub}", None, b)
    G2, c2, _ = cell_for(f"duval:{sup}", None, b)
    sym = "<|" if normal else "<"
    label = f"{sub} {sym} {sup}" + (f" (index {index})" if index else "")
    problems = []
    if not is_subgroup(G1, G2):
        problems.append("not a subgroup")
    else:
        idx = G2.order // G1.order
        if index is not None and idx != index:
            problems.append(f"index {idx}")
        if normal and not is_normal_subgroup(G1, G2):
            problems.append("not normal")
        if c2.bound.compare(c1.bound) > 0:
            problems.append("bound of the larger group exceeds the smaller")
    status = "match" if not problems else "mismatch"
    note = "; ".join(problems + ([NOTES[("inclusions", f"{sub}/{sup}")]] if problems and ("inclusions", f"{sub}/{sup}") in NOTES else []))
    return TableRow(f"{sub}/{sup}", {}, label, c1.bound.radians, c2.bound.radians, b.exact, status,
                    note, {"orders": [G1.order, G2.order]})


def _fib_rows(backend) -> list[TableRow]:
    rows = []
    for fid in ("10", "34"):
        worst = 0.0
        ok = True
        for L in range(1, 7):
            expected = sphere2.fibering_diameter(fid, L)
            params = {"m": L, "n": L} if fid == "10" else {"n": L}
            bd = compute_bound(f"duval:{fid}", params, backend)
            worst = max(worst, abs(bd.radians - expected))
            ok &= abs(bd.radians - expected) <= TOL and expected > math.pi / 4
        limit = sphere2.fibering_diameter(fid, 10**6)
        ok &= abs(limit - math.pi / 4) < 1e-9
        rows.append(TableRow(fid, {"L": "1..6"}, "pi/4 (infimum over L)", math.pi / 4, limit, False,
                             "match" if ok else "mismatch",
                             f"arccos(cos(pi/2L)/sqrt2) vs cell at L=1..6, max error {worst:.2e}"))
    for fid, label, o3 in (("15", "1/2 arccos(1/sqrt3)", "O"), ("19", "1/2 arccos(tan(3pi/10)/sqrt3)", "I")):
        expected = sphere2.fibering_diameter(fid)
        reduced = sphere2.cohom2_diameter(1, 1, o3)
        ok = abs(expected - reduced) < 1e-12
        rows.append(TableRow(fid, {}, label, expected, reduced, False, "match" if ok else "mismatch",
                             f"half the diameter of S^2/{o3}"))
    return rows


def _o3_rows() -> list[TableRow]:
    rows = []
    for e in sphere2.O3_REGISTRY:
        if e.triangle is None:
            computed, note = e.diameter, "registry value"
        else:
            computed, note = sphere2.sides_from_angles(*e.triangle).a, "dual law of cosines"
        ok = abs(computed - e.diameter) <= 1e-12
        params = {"parity": e.parity} if e.parity else {}
        rows.append(TableRow(e.label, params, e.expression, e.diameter, computed, False,
                             "match" if ok else "mismatch", note))
    return rows


TABLES = ("fib", "nonfib-rational", "nonfib-irrational", "reflection", "o3", "inclusions")


def run_table(which: str, backend="exact") -> list[TableRow]:
    if which == "fib":
        return _fib_rows(backend)
    if which == "nonfib-rational":
        return [_row(which, fid, exp, backend) for fid, exp in NONFIB_RATIONAL]
    if which == "nonfib-irrational":
        return [_row(which, fid, exp, backend) for fid, exp in NONFIB_IRRATIONAL]
    if which == "reflection":
        return [_row(which, fid, exp, backend) for fid, exp in REFLECTION]
    if which == "o3":
        return _o3_rows()
    if which == "inclusions":
        rows = [_inclusion_row(*inc, backend) for inc in INCLUSIONS]
        for sub, sup, why in SKIPPED_INCLUSIONS:
            rows.append(TableRow(f"{sub}/{sup}", {}, f"g {sub} g^-1 < {sup}", 0.0, None, False, "skipped", why))
        return rows
    raise ValueError(f"unknown table {which!r}; choose from {', '.join(TABLES)}")


# --------------------------------------------------------------------------
# hypercube


@lru_cache(maxsize=None)
def _signed_permutation_orbit(dim: int) -> np.ndarray:
    """Orbit of e_1 under all signed permutations of R^dim, by brute force."""
    e1 = np.zeros(dim)
    e1[0] = 1.0
    seen = {}
    for perm in itertools.permutations(range(dim)):
        for signs in itertools.product((1.0, -1.0), repeat=dim):
            img = np.zeros(dim)
            # g(x)_perm[i] = signs[i] * x_i
            for i in range(dim):
                img[perm[i]] = signs[i] * e1[i]
            seen.setdefault(tuple(np.round(img, 9) + 0.0), img)
    return np.array(list(seen.values()))


def voronoi_bound_float(points: np.ndarray, base: np.ndarray) -> float:
    """Farthest vertex of the spherical Voronoi cell of ``base`` among
    ``points`` (unit vectors in R^d), by enumerating (d-1)-subsets of bisectors."""
    d = len(base)
    others = [p for p in points if np.linalg.norm(p - base) > 1e-9]
    normals = np.array([base - p for p in others])
    best = 1.0
    for combo in itertools.combinations(range(len(normals)), d - 1):
        M = normals[list(combo)]
        _, s, vt = np.linalg.svd(M)
        if len(s) < d - 1 or s[-1] < 1e-9 * s[0]:
            continue
        x = vt[-1]
        for cand in (x, -x):
            if np.all(normals @ cand >= -1e-9):
                best = min(best, float(cand @ base / np.linalg.norm(cand)))
    return math.acos(max(-1.0, min(1.0, best)))


def hypercube_bound(n: int, backend="exact") -> dict:
    """Bound for the symmetry group of the cubical tessellation of S^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    expected = math.acos(1 / math.sqrt(n + 1))
    if n == 3:
        bd = compute_bound("duval:47", None, backend)
        computed, method, exact = bd.radians, "Du Val #47", bd.exact
        if bd.exact:
            ok = bd.cos2 == FieldElement(1) / 4 and bd.cos_sign == 1
        else:
            ok = abs(computed - expected) <= TOL
    else:
        pts = _signed_permutation_orbit(n + 1)
        base = np.zeros(n + 1)
        base[0] = 1.0
        computed = voronoi_bound_float(pts, base)
        method, exact = "float Voronoi over signed permutations", False
        ok = abs(computed - expected) <= TOL
    return {
        "n": n,
        "expected": f"arccos(1/sqrt({n + 1}))",
        "expected_radians": expected,
        "computed_radians": computed,
        "method": method,
        "exact": exact,
        "status": "match" if ok else "mismatch",
    }
