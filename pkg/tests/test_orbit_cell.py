import math

import numpy as np
import pytest
from scipy.spatial import HalfspaceIntersection

from sq3 import goursat as gs
from sq3.algebraic import FieldElement
from sq3.orbit_cell import (
    DiameterBound,
    cell_statistics,
    cell_to_json,
    diameter_lower_bound,
    orbit_of_one,
    prefundamental_domain,
)
from sq3.quaternion import FLOAT
from sq3.tables import INCLUSIONS, cell_for


def qhull_chart_vertices(orbit) -> np.ndarray:
    """Cell vertices in the chart w = 1, computed independently with qhull."""
    pts = np.array([p.to_floats() for p in orbit.points])
    others = pts[1:]
    # <(1, y), 1 - g> >= 0  <=>  g_v . y - (1 - g_w) <= 0
    hs = np.hstack([others[:, 1:], -(1 - others[:, :1])])
    hi = HalfspaceIntersection(hs, np.zeros(3))
    return np.unique(np.round(hi.intersections, 7), axis=0)


def chart(cell) -> np.ndarray:
    v = np.array(cell.vertex_floats())
    return np.unique(np.round(v[:, 1:] / v[:, :1], 7), axis=0)


BOUNDED = ["22", "20", "23", "24", "29", "30", "32", "32'", "41", "47", "51p"]


@pytest.mark.parametrize("fid", BOUNDED)
def test_vertices_match_qhull(fid):
    G, cell, _ = cell_for(f"duval:{fid}")
    ref = qhull_chart_vertices(cell.orbit)
    ours = chart(cell)
    assert ours.shape == ref.shape
    assert np.allclose(ours, ref, atol=1e-6)


@pytest.mark.parametrize("spec,params", [("10", {"m": 3, "n": 3}), ("2", {"m": 2, "n": 3}), ("11a", {"m": 2, "n": 3})])
def test_float_cells_match_qhull(spec, params):
    G, cell, _ = cell_for(f"duval:{spec}", params, "float")
    assert cell.degeneracy is None
    assert np.allclose(chart(cell), qhull_chart_vertices(cell.orbit), atol=1e-6)


@pytest.mark.parametrize("fid", ["22", "20", "32", "23", "24", "29", "51p"])
def test_exact_and_float_vertices_agree(fid):
    ex = cell_for(f"duval:{fid}", None, "exact")[1]
    fl = cell_for(f"duval:{fid}", None, "float")[1]
    a = np.array(ex.vertex_floats())
    b = np.array(fl.vertex_floats())
    assert a.shape == b.shape
    gaps = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    assert gaps.min(axis=1).max() <= 1e-9
    assert gaps.min(axis=0).max() <= 1e-9
    assert abs(ex.bound.radians - fl.bound.radians) <= 1e-9


@pytest.mark.parametrize("fid", ["22", "29", "30", "40", "21'", "47"])
def test_orbit_stabilizer(fid):
    G = gs.instantiate(fid)
    orb = orbit_of_one(G)
    assert len(orb) * orb.stabilizer_order == G.order
    assert orb.points[0].key(G.backend) == orb.points[0].one(G.backend).key(G.backend)
    cos = orb.layer_cosines()
    assert cos == sorted(cos, reverse=True)
    assert sum(len(layer) for layer in orb.layers) == len(orb)


def test_certificate_statistics():
    for fid in ("22", "20", "32", "23", "24", "29"):
        cell = cell_for(f"duval:{fid}")[1]
        st = cell_statistics(cell)
        assert st["vertices"] - st["edges"] + st["faces"] == 2
        assert sum(k * v for k, v in st["face_sides"].items()) == 2 * st["edges"]
    assert cell_statistics(cell_for("duval:22")[1])["face_sides"] == {4: 6}
    assert cell_statistics(cell_for("duval:20")[1])["face_sides"] == {3: 8}
    assert cell_statistics(cell_for("duval:32")[1])["face_sides"] == {3: 4, 6: 4}
    assert cell_statistics(cell_for("duval:23")[1])["face_sides"] == {3: 8, 8: 6}
    assert cell_statistics(cell_for("duval:24")[1])["face_sides"] == {5: 12}


def test_vertices_equidistant_from_facet_pairs():
    # every vertex is as close to each of its active orbit points as to 1
    cell = cell_for("duval:29")[1]
    b = cell.backend
    for v, active in zip(cell.vertices, cell.active_sets):
        for i in active:
            g = cell.orbit.points[i]
            assert v[0] == sum((x * y for x, y in zip(v, g)), b.const(0))


def test_degenerate_sphere():
    cell = cell_for("duval:21'")[1]
    assert cell.degeneracy == "sphere"
    assert cell.bound.cos_sign == -1 and cell.bound.radians == pytest.approx(math.pi)


def test_degenerate_hemisphere():
    cell = cell_for("duval:21")[1]
    assert cell.degeneracy == "hemisphere"
    assert cell.bound.exact and cell.bound.cos_sign == 0
    assert cell.bound.radians == pytest.approx(math.pi / 2)


def test_beyond_hemisphere():
    G, cell, _ = cell_for("duval:36", {"n": 1, "r": 2, "s": 1, "h": 0, "k": 0}, "float")
    assert cell.degeneracy == "beyond-hemisphere"
    assert cell.bound.radians == pytest.approx(3 * math.pi / 4, abs=1e-9)
    assert gs.fixes_a_point(G)


def test_family_10_closed_form():
    for L in range(1, 7):
        bd = cell_for("duval:10", {"m": L, "n": L}, "float")[1].bound
        assert bd.radians == pytest.approx(math.acos(math.cos(math.pi / (2 * L)) / math.sqrt(2)), abs=1e-9)


def test_monotone_on_inclusions():
    for sub, sup, _normal, _index in INCLUSIONS:
        G1, c1, _ = cell_for(f"duval:{sub}")
        G2, c2, _ = cell_for(f"duval:{sup}")
        if gs.is_subgroup(G1, G2):
            assert c2.bound.compare(c1.bound) <= 0, (sub, sup)


def test_bound_compare_exact():
    a = DiameterBound.make(1, FieldElement(1) / 4, True)
    b = DiameterBound.make(1, FieldElement(1) / 2, True)
    half = DiameterBound.make(0, FieldElement(0), True)
    assert a.compare(b) == 1
    assert b.compare(a) == -1
    assert half.compare(a) == 1
    assert a.compare(a) == 0


def test_cell_json():
    cell = cell_for("duval:32")[1]
    data = cell_to_json(cell)
    assert data["backend"] == "exact"
    assert len(data["vertices"]) == 12
    v = data["vertices"][0]
    y = v["chart"][1]
    assert FieldElement.from_json(y["basis"]).to_float() == pytest.approx(y["float"])
    assert sum(c * c for c in v["unit"]) == pytest.approx(1.0)
    assert diameter_lower_bound(cell) is cell.bound


def test_float_pipeline_direct():
    G = gs.instantiate("22", backend=FLOAT)
    cell = prefundamental_domain(orbit_of_one(G))
    assert len(cell.vertices) == 8
    assert cell.bound.radians == pytest.approx(math.pi / 3)
