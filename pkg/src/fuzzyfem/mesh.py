"""Triangulations of the equilateral triangle and their refinement.

Two refinement families are generated from the six-triangle median fan
(three corners, three edge midpoints and the centroid):

* ``fan``      -- fan, then uniform 4-way splits: 6, 24, 96, 384, 1536, ...
* ``bisected`` -- fan bisected along longest edges, then 4-way splits:
  12, 48, 192, ...

New nodes are always appended, so node indices of a parent mesh (and in
particular the centroid) survive refinement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "FAMILIES",
    "Mesh",
    "NonConformingSplit",
    "base_fan6",
    "build_family",
    "refine2",
    "refine4",
    "total_area",
]

FAMILIES = ("fan", "bisected")

# relative tolerance used to call two edge lengths equal
_LENGTH_TIE = 1e-12


class NonConformingSplit(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Mesh:
    nodes: np.ndarray
    elements: np.ndarray
    boundary_nodes: tuple[int, ...]
    centroid_node: int | None = None

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        elements = np.array(self.elements, dtype=np.int64).reshape(-1, 3)
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise ValueError(f"nodes must have shape (n, 2), got {nodes.shape}")
        if elements.size and (elements.min() < 0 or elements.max() >= len(nodes)):
            raise ValueError("element references a node index out of range")
        e = elements
        if np.any((e[:, 0] == e[:, 1]) | (e[:, 1] == e[:, 2]) | (e[:, 0] == e[:, 2])):
            raise ValueError("element with repeated node")
        nodes.setflags(write=False)
        elements.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "boundary_nodes", tuple(sorted(int(i) for i in self.boundary_nodes)))
        if np.any(self.signed_areas <= 0):
            raise ValueError("elements must be counterclockwise with positive area")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @cached_property
    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.elements]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def key(self) -> bytes:
        """Content fingerprint, usable as a cache key."""
        return self.nodes.tobytes() + b"|" + self.elements.tobytes()

    def scaled(self, factor: float) -> "Mesh":
        if not factor > 0:
            raise ValueError(f"scale factor must be positive, got {factor}")
        return Mesh(self.nodes * factor, self.elements, self.boundary_nodes, self.centroid_node)

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes.tolist(),
            "elements": self.elements.tolist(),
            "boundary_nodes": list(self.boundary_nodes),
            "centroid_node": self.centroid_node,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _edges(elements):
    for tri in elements:
        i, j, k = (int(v) for v in tri)
        yield (i, j), (j, k), (k, i)


def _boundary_from_elements(elements) -> tuple[int, ...]:
    count: dict[tuple[int, int], int] = {}
    for tri_edges in _edges(elements):
        for a, b in tri_edges:
            key = (a, b) if a < b else (b, a)
            count[key] = count.get(key, 0) + 1
    nodes = set()
    for (a, b), c in count.items():
        if c == 1:
            nodes.update((a, b))
    return tuple(sorted(nodes))


def base_fan6(side: float = 4.0) -> Mesh:
    """Median fan of the equilateral triangle with corners (0,0), (side,0), (side/2, side*sqrt(3)/2)."""
    if not (math.isfinite(side) and side > 0):
        raise ValueError(f"side must be positive, got {side}")
    h = side * math.sqrt(3.0) / 2.0
    corners = [(0.0, 0.0), (side, 0.0), (side / 2.0, h)]
    mids = [
        ((corners[0][0] + corners[1][0]) / 2, (corners[0][1] + corners[1][1]) / 2),
        ((corners[1][0] + corners[2][0]) / 2, (corners[1][1] + corners[2][1]) / 2),
        ((corners[2][0] + corners[0][0]) / 2, (corners[2][1] + corners[0][1]) / 2),
    ]
    centroid = (side / 2.0, h / 3.0)
    nodes = corners + mids + [centroid]
    elements = [(0, 3, 6), (3, 1, 6), (1, 4, 6), (4, 2, 6), (2, 5, 6), (5, 0, 6)]
    return Mesh(np.array(nodes), np.array(elements), boundary_nodes=range(6), centroid_node=6)


class _Midpoints:
    """Edge-keyed midpoint registry; one new node per distinct edge."""

    def __init__(self, nodes):
        self.nodes = [tuple(p) for p in nodes]
        self.index: dict[tuple[int, int], int] = {}

    def __call__(self, a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        idx = self.index.get(key)
        if idx is None:
            pa, pb = self.nodes[a], self.nodes[b]
            self.nodes.append(((pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0))
            idx = self.index[key] = len(self.nodes) - 1
        return idx


def refine4(m: Mesh) -> Mesh:
    """Split every triangle into four through its edge midpoints."""
    mid = _Midpoints(m.nodes)
    children = []
    for tri in m.elements:
        i, j, k = (int(v) for v in tri)
        a, b, c = mid(i, j), mid(j, k), mid(k, i)
        children += [(i, a, c), (a, j, b), (c, b, k), (a, b, c)]
    return Mesh(np.array(mid.nodes), np.array(children),
                boundary_nodes=_boundary_from_elements(children),
                centroid_node=m.centroid_node)


def _longest_edge(nodes, tri):
    """Return (opposite vertex, edge) for the longest edge; ties go to the lowest node pair."""
    i, j, k = tri
    cand = [(k, (i, j)), (i, (j, k)), (j, (k, i))]
    lengths = [float(np.sum((nodes[e[0]] - nodes[e[1]]) ** 2)) for _, e in cand]
    top = max(lengths)
    tied = [c for c, L in zip(cand, lengths) if L >= top * (1.0 - _LENGTH_TIE)]
    return min(tied, key=lambda c: tuple(sorted(c[1])))


def refine2(m: Mesh) -> Mesh:
    """Bisect every triangle from its longest edge's midpoint to the opposite vertex."""
    mid = _Midpoints(m.nodes)
    split: dict[tuple[int, int], int] = {}
    children = []
    for tri in m.elements:
        tri = tuple(int(v) for v in tri)
        opp, (a, b) = _longest_edge(m.nodes, tri)
        key = (a, b) if a < b else (b, a)
        split[key] = split.get(key, 0) + 1
        # (opp, a, b) is a rotation of tri, hence counterclockwise
        p = mid(a, b)
        children += [(opp, a, p), (opp, p, b)]

    owners: dict[tuple[int, int], int] = {}
    for tri_edges in _edges(m.elements):
        for a, b in tri_edges:
            key = (a, b) if a < b else (b, a)
            owners[key] = owners.get(key, 0) + 1
    for edge, n_split in split.items():
        if n_split != owners[edge]:
            raise NonConformingSplit(f"edge {edge} bisected from one side only")
    return Mesh(np.array(mid.nodes), np.array(children),
                boundary_nodes=_boundary_from_elements(children),
                centroid_node=m.centroid_node)


def total_area(m: Mesh) -> float:
    return float(np.sum(m.signed_areas))


def build_family(family: str, level: int, side: float = 4.0) -> Mesh:
    """Mesh ``level`` of a refinement family (level 0 is the coarsest)."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if level < 0:
        raise ValueError(f"level must be >= 0, got {level}")
    m = base_fan6(side)
    if family == "bisected":
        m = refine2(m)
    for _ in range(level):
        m = refine4(m)
    return m
