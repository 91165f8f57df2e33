"""Linear triangular elements for the one-group diffusion functional.

For an element with nodes (x_i, y_i) the geometric coefficients are

    a1 = x3 - x2,   a2 = x1 - x3,   a3 = x2 - x1
    b1 = y2 - y3,   b2 = y3 - y1,   b3 = y1 - y2
    c1 = x2 y3 - x3 y2, ...                      (cyclic)

so that the area coordinates are L_i = (c_i + b_i x + a_i y) / (2 area).
The element matrices are

    K1 = D / (4 area) * (a a^T + b b^T)            leakage
    K2 = sigma area / 12 * [[2,1,1],[1,2,1],[1,1,2]]   absorption
    M  = K2 with sigma = 1                           consistent mass
    f  = S area / 3 * (1, 1, 1)                      source
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import Mesh

__all__ = [
    "AllNodesConstrained",
    "Coefficients",
    "DegenerateElement",
    "ElementGeometry",
    "SingularSystem",
    "SymmetricSystem",
    "apply_dirichlet",
    "assemble",
    "element_geometry",
    "element_matrices",
    "solve_fixed_source",
    "tri_integral",
]

MASS_KINDS = ("consistent", "lumped")

_PATTERN = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])


class DegenerateElement(ValueError):
    pass


class AllNodesConstrained(ValueError):
    pass


class SingularSystem(ArithmeticError):
    pass


@dataclass(frozen=True)
class Coefficients:
    D: float = 1.0
    sigma: float = 1.0
    S: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.D) and self.D > 0):
            raise ValueError(f"diffusion coefficient must be positive, got {self.D}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"absorption coefficient must be positive, got {self.sigma}")
        if not (math.isfinite(self.S) and self.S >= 0):
            raise ValueError(f"source must be non-negative, got {self.S}")


@dataclass(frozen=True)
class ElementGeometry:
    a: tuple[float, float, float]
    b: tuple[float, float, float]
    c: tuple[float, float, float]
    area: float


def element_geometry(p1, p2, p3) -> ElementGeometry:
    (x1, y1), (x2, y2), (x3, y3) = p1, p2, p3
    a = (x3 - x2, x1 - x3, x2 - x1)
    b = (y2 - y3, y3 - y1, y1 - y2)
    c = (x2 * y3 - x3 * y2, x3 * y1 - x1 * y3, x1 * y2 - x2 * y1)
    area = 0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1))
    scale = max(max(x1, x2, x3) - min(x1, x2, x3), max(y1, y2, y3) - min(y1, y2, y3))
    if not area > 1e-14 * scale * scale:
        raise DegenerateElement(f"element {p1}, {p2}, {p3} has area {area}")
    return ElementGeometry(a, b, c, area)


def tri_integral(p: int, q: int, r: int, area: float) -> float:
    """Integral of L1^p L2^q L3^r over a triangle of the given area."""
    if min(p, q, r) < 0:
        raise ValueError("exponents must be non-negative")
    if p + q + r + 2 > 20:
        raise OverflowError("exponent sum too large for the factorial formula")
    if not area > 0:
        raise ValueError(f"area must be positive, got {area}")
    num = math.factorial(p) * math.factorial(q) * math.factorial(r)
    return num / math.factorial(p + q + r + 2) * 2.0 * area


def element_matrices(g: ElementGeometry, c: Coefficients, mass: str = "consistent"):
    """Return ``(K1, K2, M, f)`` for one element."""
    a = np.asarray(g.a)
    b = np.asarray(g.b)
    K1 = c.D / (4.0 * g.area) * (np.outer(a, a) + np.outer(b, b))
    K2 = c.sigma * g.area / 12.0 * _PATTERN
    if mass == "consistent":
        M = g.area / 12.0 * _PATTERN
    elif mass == "lumped":
        M = g.area / 3.0 * np.eye(3)
    else:
        raise ValueError(f"unknown mass kind {mass!r}; expected one of {MASS_KINDS}")
    f = np.full(3, c.S * g.area / 3.0)
    return K1, K2, M, f


@dataclass(frozen=True, eq=False)
class SymmetricSystem:
    """Assembled operators, possibly reduced to a subset of free nodes.

    ``free_nodes[i]`` is the mesh node carried by row/column ``i``.
    """

    K1g: sp.csr_matrix
    K2g: sp.csr_matrix
    Mg: sp.csr_matrix
    fg: np.ndarray
    free_nodes: tuple[int, ...]
    n_total: int = field(default=-1)

    def __post_init__(self):
        if self.n_total < 0:
            object.__setattr__(self, "n_total", len(self.free_nodes))

    @property
    def size(self) -> int:
        return len(self.free_nodes)


def assemble(m: Mesh, c: Coefficients, mass: str = "consistent") -> SymmetricSystem:
    n = m.n_nodes
    rows, cols = [], []
    k1v, k2v, mv = [], [], []
    fg = np.zeros(n)
    for tri in m.elements:
        g = element_geometry(*m.nodes[tri])
        K1, K2, M, f = element_matrices(g, c, mass)
        idx = np.asarray(tri)
        rows.append(np.repeat(idx, 3))
        cols.append(np.tile(idx, 3))
        k1v.append(K1.ravel())
        k2v.append(K2.ravel())
        mv.append(M.ravel())
        np.add.at(fg, idx, f)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)

    def build(vals):
        return sp.coo_matrix((np.concatenate(vals), (rows, cols)), shape=(n, n)).tocsr()

    return SymmetricSystem(build(k1v), build(k2v), build(mv), fg, tuple(range(n)), n)


def apply_dirichlet(s: SymmetricSystem, constrained) -> SymmetricSystem:
    """Eliminate homogeneous-Dirichlet nodes (mesh indices) from ``s``."""
    constrained = {int(i) for i in constrained}
    bad = [i for i in constrained if not 0 <= i < s.n_total]
    if bad:
        raise IndexError(f"constrained nodes out of range: {sorted(bad)}")
    keep = [pos for pos, node in enumerate(s.free_nodes) if node not in constrained]
    if not keep:
        raise AllNodesConstrained("every node is constrained; nothing left to solve")
    keep = np.asarray(keep)

    def reduce(A):
        return A[keep][:, keep].tocsr()

    return SymmetricSystem(
        reduce(s.K1g), reduce(s.K2g), reduce(s.Mg), s.fg[keep],
        tuple(s.free_nodes[i] for i in keep), s.n_total,
    )


def solve_fixed_source(m: Mesh, c: Coefficients, constrained=()) -> np.ndarray:
    """Solve (K1 + K2) phi = f with zero flux on ``constrained``; returns a full nodal vector."""
    s = apply_dirichlet(assemble(m, c), constrained)
    K = (s.K1g + s.K2g).tocsc()
    try:
        phi_free = spla.splu(K).solve(s.fg)
    except RuntimeError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(phi_free)):
        raise SingularSystem("non-finite flux from the linear solve")
    norm_f = np.linalg.norm(s.fg)
    if norm_f > 0 and np.linalg.norm(K @ phi_free - s.fg) > 1e-10 * norm_f:
        raise SingularSystem("linear solve residual above 1e-10")
    phi = np.zeros(m.n_nodes)
    phi[list(s.free_nodes)] = phi_free
    return phi
