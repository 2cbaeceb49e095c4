"""Orbit of 1, its Voronoi cell on S^3 and the diameter lower bound.

The cell is ``{x : <x, 1 - g> >= 0 for every orbit point g}``.  When it sits
inside the open hemisphere around 1 it is a convex polytope in the gnomonic
chart ``w = 1``; vertices are stored there as ``(1, y1, y2, y3)`` so that no
square root is ever taken.  The squared cosine of the distance from 1 to a
vertex is ``1 / (1 + |y|^2)``.

Vertex search runs in floats over triples of nearby orbit points, then every
candidate is re-solved with the group's own backend and the resulting
polytope is checked combinatorially (closed facet cycles, two facets per
edge, Euler characteristic 2) before any value is reported.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls
from scipy.spatial import ConvexHull, QhullError

from .algebraic import FieldElement
from .binary_groups import sort_key
from .goursat import IsometryGroup
from .linalg import cross4, rank
from .quaternion import Backend, Quaternion

__all__ = [
    "Orbit",
    "SphericalCell",
    "DiameterBound",
    "orbit_of_one",
    "prefundamental_domain",
    "diameter_lower_bound",
    "cell_statistics",
    "cell_to_json",
    "CellError",
]

FLOAT_TOL = 1e-9
CLUSTER_DIGITS = 6
CHUNK = 20000


class CellError(RuntimeError):
    """The vertex set failed its combinatorial certificate."""


# --------------------------------------------------------------------------
# orbit


@dataclass
class Orbit:
    points: list[Quaternion]
    layers: list[list[int]]
    backend: Backend
    group_order: int

    def __len__(self):
        return len(self.points)

    @property
    def stabilizer_order(self) -> int:
        return self.group_order // len(self.points)

    def layer_cosines(self) -> list[float]:
        return [self.backend.to_float(self.points[layer[0]].w) + 0.0 for layer in self.layers]

    def contains_minus_one(self) -> bool:
        b = self.backend
        return (-Quaternion.one(b)).key(b) in {p.key(b) for p in self.points}


def orbit_of_one(G: IsometryGroup) -> Orbit:
    b = G.backend
    seen: dict = {}
    for g in G.elements:
        q = g.image_of_one()
        seen.setdefault(q.key(b), q)
    pts = sorted(seen.values(), key=lambda q: (-round(b.to_float(q.w), 12), sort_key(q, b)))
    layers: list[list[int]] = []
    last = None
    for idx, q in enumerate(pts):
        k = b.key(q.w)
        if k != last:
            layers.append([])
            last = k
        layers[-1].append(idx)
    return Orbit(pts, layers, b, G.order)


# --------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class DiameterBound:
    """Farthest point of the cell: ``cos d = cos_sign * sqrt(cos2)``."""

    cos_sign: int
    cos2: object
    radians: float
    exact: bool

    @classmethod
    def make(cls, cos_sign: int, cos2, exact: bool) -> DiameterBound:
        c = math.sqrt(max(float(cos2), 0.0)) * cos_sign
        return cls(cos_sign, cos2, math.acos(max(-1.0, min(1.0, c))), exact)

    def compare(self, other: DiameterBound) -> int:
        """-1, 0, 1 as self is shorter, equal, longer (exact when both are)."""
        def signed(x):
            return x.cos_sign * x.cos2

        if self.exact and other.exact and isinstance(self.cos2, FieldElement) and isinstance(other.cos2, FieldElement):
            # larger signed cos2 means a shorter distance
            return -(signed(self) - signed(other)).sign()
        d = self.radians - other.radians
        return 0 if abs(d) <= 1e-12 else (1 if d > 0 else -1)

    def cos2_str(self) -> str:
        return str(self.cos2)


@dataclass
class SphericalCell:
    orbit: Orbit
    support: list[int]
    vertices: list[tuple]
    active_sets: list[frozenset]
    faces: dict[int, list[int]]
    degeneracy: str | None
    bound: DiameterBound
    backend: Backend
    notes: list[str] = field(default_factory=list)

    @property
    def halfspaces(self) -> list[tuple]:
        """Normals 1 - g for the orbit points that carry a facet."""
        return [_normal(self.orbit.points[i]) for i in sorted(self.faces)]

    def vertex_floats(self) -> list[tuple[float, ...]]:
        """Vertices normalised to unit length."""
        out = []
        for v in self.vertices:
            f = [self.backend.to_float(c) for c in v]
            n = math.sqrt(sum(c * c for c in f))
            out.append(tuple(c / n for c in f))
        return out

    def edges(self) -> list[tuple[int, int]]:
        out = set()
        for cyc in self.faces.values():
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                out.add((min(a, b), max(a, b)))
        return sorted(out)


def _normal(g: Quaternion) -> tuple:
    return (1 - g.w, -g.x, -g.y, -g.z)


# --------------------------------------------------------------------------
# float stage


def _float_points(orbit: Orbit) -> np.ndarray:
    b = orbit.backend
    return np.array([[b.to_float(c) for c in p] for p in orbit.points], dtype=float)


def _beyond_hemisphere(normals: np.ndarray) -> float:
    """Length of the projection of -1 onto the cone {x : N x >= 0}."""
    v = np.array([-1.0, 0.0, 0.0, 0.0])
    lam, _ = nnls(normals.T, -v)
    p = v + normals.T @ lam
    return float(np.linalg.norm(p))


def _chart_bounded(points: np.ndarray) -> bool:
    """Whether the imaginary parts of the orbit points have 0 in the interior
    of their convex hull (no cell direction orthogonal to 1)."""
    vecs = points[:, 1:]
    if np.linalg.matrix_rank(vecs, tol=1e-9) < 3:
        return False
    try:
        hull = ConvexHull(vecs)
    except QhullError:
        return False
    return bool(np.all(hull.equations[:, 3] < -1e-9))


def _float_vertices(normals: np.ndarray):
    """Rays of the cone ``N x >= 0`` from all rank-3 triples of rows.

    Returns (rays, triples, conditioning, unbounded) where each ray is a unit
    4-vector and ``unbounded`` flags a feasible ray with w <= 0.
    """
    k = len(normals)
    if k < 3:
        return [], [], [], True
    norms = np.linalg.norm(normals, axis=1)
    rays, triples, cond = [], [], []
    unbounded = False
    combos = itertools.combinations(range(k), 3)
    while True:
        chunk = np.array(list(itertools.islice(combos, CHUNK)), dtype=np.int64)
        if len(chunk) == 0:
            break
        M = normals[chunk]  # T x 3 x 4
        x = np.empty((len(chunk), 4))
        for c in range(4):
            cols = [j for j in range(4) if j != c]
            d = np.linalg.det(M[:, :, cols])
            x[:, c] = d if c % 2 == 0 else -d
        scale = np.prod(norms[chunk], axis=1)
        xn = np.linalg.norm(x, axis=1)
        rel = xn / scale
        ok = rel > 1e-8
        if not ok.any():
            continue
        x, chunk, rel, xn = x[ok], chunk[ok], rel[ok], xn[ok]
        x = x / xn[:, None]
        vals = normals @ x.T  # k x T
        pos = (vals >= -1e-8).all(axis=0)
        neg = (vals <= 1e-8).all(axis=0)
        for sign, mask in ((1.0, pos), (-1.0, neg)):
            if not mask.any():
                continue
            r = sign * x[mask]
            if (r[:, 0] <= 1e-9).any():
                unbounded = True
            good = r[:, 0] > 1e-9
            rays.extend(r[good])
            triples.extend(chunk[mask][good])
            cond.extend(rel[mask][good])
    return rays, triples, cond, unbounded


def _cluster(rays, triples, cond) -> list[tuple[int, int, int]]:
    """One best-conditioned triple per distinct float vertex."""
    best: dict = {}
    for r, t, c in zip(rays, triples, cond):
        y = tuple(round(float(v), CLUSTER_DIGITS) + 0.0 for v in r[1:] / r[0])
        if y not in best or c > best[y][1]:
            best[y] = (tuple(int(i) for i in t), c)
    return [t for t, _ in best.values()]


def _float_support(orbit: Orbit, pts: np.ndarray):
    """Grow the set of orbit points used until their cell is bounded and no
    excluded point is closer than twice the farthest vertex."""
    n_layers = len(orbit.layers)
    # skip the layer holding 1 itself
    used = 1
    support = []
    while True:
        used += 1
        support = [i for layer in orbit.layers[1:used] for i in layer]
        if len(support) >= 4 and np.linalg.matrix_rank(_normals_np(pts, support), tol=1e-9) == 4:
            break
        if used >= n_layers:
            break
    while True:
        N = _normals_np(pts, support)
        rays, triples, cond, unbounded = _float_vertices(N)
        if rays and not unbounded:
            r = np.array(rays)
            cos_far = float(np.min(r[:, 0]))
            cos2d = 2 * cos_far * cos_far - 1
            inside = set(support)
            extra = [i for i in range(1, len(orbit)) if i not in inside and pts[i, 0] > cos2d - 1e-9]
            if not extra:
                triples = [tuple(support[j] for j in t) for t in _cluster(rays, triples, cond)]
                return support, triples
            support = sorted(inside.union(extra), key=lambda i: i)
            continue
        if len(support) == len(orbit) - 1:
            return support, None
        used += 1
        support = [i for layer in orbit.layers[1:used] for i in layer]


def _normals_np(pts: np.ndarray, idx) -> np.ndarray:
    sub = pts[list(idx)]
    out = -sub
    out[:, 0] += 1.0
    return out


# --------------------------------------------------------------------------
# refinement with the group's backend


def _solve_vertex(normals, triple, b: Backend):
    x = cross4(*(normals[i] for i in triple))
    s = b.sign(x[0])
    if s == 0:
        return None
    inv = 1 / x[0]
    return (b.const(1), x[1] * inv, x[2] * inv, x[3] * inv)


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3]


def _refine(orbit: Orbit, support: list[int], triples):
    b = orbit.backend
    normals = {i: _normal(orbit.points[i]) for i in support}
    verts: dict = {}
    for t in triples:
        v = _solve_vertex(normals, t, b)
        if v is None:
            continue
        key = tuple(b.key(c) for c in v)
        if key in verts:
            continue
        active = set()
        feasible = True
        for i in support:
            s = b.sign(_dot(v, normals[i]))
            if s < 0:
                feasible = False
                break
            if s == 0:
                active.add(i)
        if feasible and len(active) >= 3:
            verts[key] = (v, frozenset(active))
    items = sorted(verts.values(), key=lambda va: tuple(round(b.to_float(c), 12) for c in va[0]))
    return [v for v, _ in items], [a for _, a in items]


def _certify(vertices, active_sets, b: Backend) -> dict[int, list[int]]:
    """Facets as cyclic vertex lists; raises CellError if the vertex set is
    not the full boundary of a bounded 3-polytope."""
    by_plane: dict[int, list[int]] = {}
    for vi, act in enumerate(active_sets):
        for c in act:
            by_plane.setdefault(c, []).append(vi)
    facets: dict[int, list[int]] = {}
    for c, vs in by_plane.items():
        if len(vs) < 3:
            continue
        base = vertices[vs[0]]
        diffs = [[x - y for x, y in zip(vertices[v][1:], base[1:])] for v in vs[1:]]
        if rank(diffs, b) >= 2:
            facets[c] = vs
    incident: dict[int, set[int]] = {}
    for c, vs in facets.items():
        for v in vs:
            incident.setdefault(v, set()).add(c)
    if len(incident) != len(vertices):
        raise CellError("a vertex lies on fewer than one facet")
    edges: dict[tuple[int, int], list[int]] = {}
    for c, vs in facets.items():
        for u, v in itertools.combinations(sorted(vs), 2):
            if len(incident[u] & incident[v]) >= 2:
                edges.setdefault((u, v), []).append(c)
    for e, fs in edges.items():
        if len(fs) != 2:
            raise CellError(f"edge {e} lies on {len(fs)} facets")
    cycles: dict[int, list[int]] = {}
    for c, vs in facets.items():
        adj = {v: [] for v in vs}
        for (u, v), fs in edges.items():
            if c in fs:
                adj[u].append(v)
                adj[v].append(u)
        if any(len(n) != 2 for n in adj.values()):
            raise CellError(f"facet {c} is not a closed polygon")
        start = min(vs)
        cyc = [start]
        prev, cur = None, start
        while True:
            nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
            if nxt == start:
                break
            cyc.append(nxt)
            prev, cur = cur, nxt
        if len(cyc) != len(vs):
            raise CellError(f"facet {c} splits into several polygons")
        cycles[c] = cyc
    V, E, F = len(vertices), len(edges), len(facets)
    if V - E + F != 2:
        raise CellError(f"Euler characteristic {V - E + F} != 2")
    return cycles


def _cos2(v):
    y2 = v[1] * v[1] + v[2] * v[2] + v[3] * v[3]
    return 1 / (1 + y2)


# --------------------------------------------------------------------------
# public


def prefundamental_domain(orbit: Orbit) -> SphericalCell:
    b = orbit.backend
    one = b.const(1)
    zero = b.const(0)
    if len(orbit) == 1:
        bound = DiameterBound.make(-1, one, True)
        return SphericalCell(orbit, [], [], [], {}, "sphere", bound, b)

    pts = _float_points(orbit)
    all_idx = list(range(1, len(orbit)))
    N = _normals_np(pts, all_idx)
    minus_one = orbit.contains_minus_one()

    beyond = _beyond_hemisphere(N)
    if beyond > 1e-9:
        bound = DiameterBound.make(-1, beyond * beyond, False)
        return SphericalCell(orbit, all_idx, [], [], {}, "beyond-hemisphere", bound, b,
                             ["cell reaches past the hemisphere; bound from a cone projection"])

    if not _chart_bounded(pts):
        exact = minus_one and b.exact and rank([list(_normal(orbit.points[i])) for i in all_idx], b) < 4
        if minus_one and not b.exact:
            exact = True
        bound = DiameterBound.make(0, zero, exact)
        tag = "hemisphere" if minus_one else "hemisphere-boundary"
        return SphericalCell(orbit, all_idx, [], [], {}, tag, bound, b)

    support, triples = _float_support(orbit, pts)
    if triples is None:
        raise CellError("float vertex search found no bounded cell")
    for _ in range(len(orbit)):
        vertices, active = _refine(orbit, support, triples)
        faces = _certify(vertices, active, b)
        far = min((_cos2(v) for v in vertices), key=lambda c: b.to_float(c))
        for v in vertices:
            c = _cos2(v)
            if b.sign(c - far) < 0:
                far = c
        cos2d = 2 * far - 1
        inside = set(support)
        late = [i for i in all_idx if i not in inside and b.sign(orbit.points[i].w - cos2d) > 0]
        if not late:
            break
        # the float stage was too optimistic; take the points and redo
        support = sorted(inside.union(late))
        support_f, triples = support, None
        rays, tr, cond, _ = _float_vertices(_normals_np(pts, support_f))
        triples = [tuple(support_f[j] for j in t) for t in _cluster(rays, tr, cond)]
    bound = DiameterBound.make(1, far, b.exact)
    return SphericalCell(orbit, support, vertices, active, faces, None, bound, b)


def diameter_lower_bound(cell: SphericalCell) -> DiameterBound:
    return cell.bound


def cell_statistics(cell: SphericalCell) -> dict:
    """Vertex/edge/face totals and the number of faces with each side count."""
    sides: dict[int, int] = {}
    for cyc in cell.faces.values():
        sides[len(cyc)] = sides.get(len(cyc), 0) + 1
    return {
        "vertices": len(cell.vertices),
        "edges": len(cell.edges()),
        "faces": len(cell.faces),
        "face_sides": dict(sorted(sides.items())),
        "faces_by_support": {
            _point_label(cell.orbit.points[c], cell.backend): len(cyc) for c, cyc in sorted(cell.faces.items())
        },
    }


def _point_label(q: Quaternion, b: Backend) -> str:
    return "(" + ", ".join(_scalar_str(c, b) for c in q) + ")"


def _scalar_str(x, b: Backend) -> str:
    if b.exact:
        return str(x)
    return repr(round(float(x), 12) + 0.0)


def _scalar_json(x, b: Backend):
    if b.exact:
        return {"basis": x.to_json(), "float": x.to_float()}
    return {"float": float(x)}


def cell_to_json(cell: SphericalCell) -> dict:
    b = cell.backend
    bd = cell.bound
    return {
        "backend": b.name,
        "orbit": {
            "size": len(cell.orbit),
            "stabilizer_order": cell.orbit.stabilizer_order,
            "layers": [len(layer) for layer in cell.orbit.layers],
            "layer_cosines": cell.orbit.layer_cosines(),
            "points": [[_scalar_json(c, b) for c in p] for p in cell.orbit.points],
        },
        "halfspaces": [[_scalar_json(c, b) for c in n] for n in cell.halfspaces],
        "vertices": [
            {"chart": [_scalar_json(c, b) for c in v], "unit": list(u)}
            for v, u in zip(cell.vertices, cell.vertex_floats())
        ],
        "statistics": cell_statistics(cell) if cell.vertices else None,
        "degeneracy": cell.degeneracy,
        "bound": {
            "cos_sign": bd.cos_sign,
            "cos2": _scalar_json(bd.cos2, b) if (b.exact and isinstance(bd.cos2, FieldElement)) else {"float": float(bd.cos2)},
            "radians": bd.radians,
            "exact": bd.exact,
        },
        "notes": list(cell.notes),
    }
