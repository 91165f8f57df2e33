import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.distance import pdist

from fuzzyfem.mesh import (
    Mesh,
    NonConformingSplit,
    base_fan6,
    build_family,
    refine2,
    refine4,
    total_area,
)

AREA_SIDE4 = 4.0 * math.sqrt(3.0)

COUNTS = [
    ("fan", 0, 7, 6), ("fan", 1, 19, 24), ("fan", 2, 61, 96), ("fan", 3, 217, 384),
    ("fan", 4, 817, 1536), ("bisected", 0, 10, 12), ("bisected", 1, 31, 48),
    ("bisected", 2, 109, 192),
]


@pytest.mark.parametrize("family, level, n_nodes, n_elements", COUNTS)
def test_counts(family, level, n_nodes, n_elements):
    m = build_family(family, level)
    assert (m.n_nodes, m.n_elements) == (n_nodes, n_elements)


@pytest.mark.parametrize("family, level", [(f, k) for f, k, _, _ in COUNTS])
def test_geometry_invariants(family, level):
    m = build_family(family, level)
    assert total_area(m) == pytest.approx(AREA_SIDE4, rel=1e-12)
    assert np.all(m.signed_areas > 0)
    # no coincident nodes
    assert pdist(m.nodes).min() > 1e-9
    np.testing.assert_allclose(m.nodes[m.centroid_node], [2.0, 2.0 / math.sqrt(3.0)], atol=1e-14)
    assert m.centroid_node == 6
    assert m.centroid_node not in m.boundary_nodes


def _on_outer_edge(p, side=4.0):
    h = side * math.sqrt(3) / 2
    x, y = p
    return (abs(y) < 1e-9 or abs(math.sqrt(3) * x - y) < 1e-9
            or abs(math.sqrt(3) * (side - x) - y) < 1e-9) and -1e-9 <= y <= h + 1e-9


@pytest.mark.parametrize("family, level", [("fan", 0), ("fan", 2), ("bisected", 0), ("bisected", 2)])
def test_boundary_nodes_lie_on_outline(family, level):
    m = build_family(family, level)
    on_edge = {i for i, p in enumerate(m.nodes) if _on_outer_edge(p)}
    assert set(m.boundary_nodes) == on_edge


def test_fan_boundary_count_doubles():
    assert [len(build_family("fan", k).boundary_nodes) for k in range(4)] == [6, 12, 24, 48]


def test_base_fan_layout():
    m = base_fan6()
    assert m.elements.tolist() == [[0, 3, 6], [3, 1, 6], [1, 4, 6], [4, 2, 6], [2, 5, 6], [5, 0, 6]]
    np.testing.assert_allclose(m.signed_areas, AREA_SIDE4 / 6)


def test_refinement_keeps_parent_nodes():
    m0 = base_fan6()
    m1 = refine4(m0)
    np.testing.assert_array_equal(m1.nodes[: m0.n_nodes], m0.nodes)
    m2 = refine2(m0)
    np.testing.assert_array_equal(m2.nodes[: m0.n_nodes], m0.nodes)


def test_bisection_splits_corner_centroid_edges():
    m = build_family("bisected", 0)
    new = m.nodes[7:]
    corners = base_fan6().nodes[:3]
    c = base_fan6().nodes[6]
    expected = sorted(map(tuple, np.round((corners + c) / 2, 12)))
    assert sorted(map(tuple, np.round(new, 12))) == expected


def test_refine2_detects_nonconforming_split():
    nodes = [(0.0, 0.0), (2.0, 0.0), (1.0, 0.2), (1.0, -5.0)]
    m = Mesh(np.array(nodes), np.array([(0, 1, 2), (0, 3, 1)]), boundary_nodes=range(4))
    with pytest.raises(NonConformingSplit):
        refine2(m)


def test_bad_inputs():
    with pytest.raises(ValueError):
        build_family("square", 0)
    with pytest.raises(ValueError):
        build_family("fan", -1)
    with pytest.raises(ValueError):
        base_fan6(0.0)
    with pytest.raises(ValueError):
        Mesh(np.zeros((3, 2)), np.array([(0, 1, 2)]), boundary_nodes=())
    # clockwise element
    with pytest.raises(ValueError):
        Mesh(np.array([(0, 0), (0, 1), (1, 0)]), np.array([(0, 1, 2)]), boundary_nodes=())


def test_arrays_read_only():
    m = base_fan6()
    with pytest.raises(ValueError):
        m.nodes[0, 0] = 1.0


def test_json_schema():
    m = build_family("bisected", 0)
    d = json.loads(m.to_json())
    assert set(d) == {"nodes", "elements", "boundary_nodes", "centroid_node"}
    assert len(d["nodes"]) == 10 and all(len(p) == 2 for p in d["nodes"])
    assert len(d["elements"]) == 12
    assert d["centroid_node"] == 6
    again = Mesh(np.array(d["nodes"]), np.array(d["elements"]), d["boundary_nodes"], d["centroid_node"])
    np.testing.assert_array_equal(again.nodes, m.nodes)


@settings(deadline=None, max_examples=25)
@given(st.floats(min_value=1e-3, max_value=1e3), st.sampled_from(["fan", "bisected"]),
       st.integers(0, 2))
def test_area_scales_with_side(side, family, level):
    m = build_family(family, level, side)
    assert total_area(m) == pytest.approx(math.sqrt(3) / 4 * side**2, rel=1e-10)
    np.testing.assert_allclose(m.nodes, build_family(family, level).nodes * side / 4, atol=1e-12 * side)
