"""Crisp and fuzzy eigenvalue studies on the triangle mesh families.

The eigenvalue equation is selected by ``formulation``:

* ``A``: (K1 + K2) x = lam M x      fission-normalized criticality
* ``B``: K1 x = lam K2 x            leakage against absorption
* ``C``: K2 x = lam (K1 + K2) x     absorption fraction

and zero flux is imposed on the node set chosen by ``bc_mode``
(``centroid``, ``boundary`` or ``both``).

Uncertain coefficients are propagated by evaluating crisp eigenvalues at
points of the alpha-cut parameter box:

* ``matched`` -- all parameters at their lower limits, then all at their
  upper limits (the paired-limit reading of the two-limit arithmetic);
* ``corners`` -- every corner of the box;
* ``box``     -- a uniform grid over the box, corners included.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from .eig import DEFAULT_MAX_ITER, DEFAULT_TOL, smallest_eig
from .fem import Coefficients, apply_dirichlet, assemble
from .fuzzy import (
    DEFAULT_ALPHA_LEVELS,
    FuzzyResult,
    TriangularFuzzyNumber,
    validate_levels,
    alpha_cut,
    from_samples,
)
from .interval import Interval, param_point
from .mesh import FAMILIES, Mesh, build_family

__all__ = [
    "BC_MODES",
    "DEFAULT_FAMILIES",
    "FORMULATIONS",
    "FuzzyEigenStudy",
    "LevelFailure",
    "LevelResult",
    "MissingCentroid",
    "STRATEGIES",
    "StudyConfig",
    "UncertainCoefficients",
    "constrained_nodes",
    "convergence_study",
    "crisp_lambda",
    "evaluation_points",
    "fuzzy_lambda",
    "interval_lambda",
    "pencil",
    "reduced_unit_system",
]

FORMULATIONS = ("A", "B", "C")
BC_MODES = ("centroid", "boundary", "both")
STRATEGIES = ("matched", "corners", "box")

_BC_ALIASES = {"boundary_and_centroid": "both"}
_STRATEGY_ALIASES = {"matched_corners": "matched", "all_corners": "corners", "box_sampling": "box"}

DEFAULT_FAMILIES = (("fan", (0, 1, 2, 3, 4)), ("bisected", (0, 1, 2)))

_NOMINAL = TriangularFuzzyNumber(0.5, 1.0, 1.5)


class MissingCentroid(ValueError):
    pass


class LevelFailure(RuntimeError):
    """A study level failed; the original error is ``__cause__``."""

    def __init__(self, family, level, cause):
        super().__init__(f"{family} level {level}: {type(cause).__name__}: {cause}")
        self.family = family
        self.level = level


def _norm_choice(value, choices, aliases, what):
    value = aliases.get(value, value)
    if value not in choices:
        raise ValueError(f"unknown {what} {value!r}; expected one of {choices}")
    return value


@dataclass(frozen=True)
class UncertainCoefficients:
    D: TriangularFuzzyNumber = _NOMINAL
    sigma: TriangularFuzzyNumber = _NOMINAL
    S: TriangularFuzzyNumber = TriangularFuzzyNumber.crisp(0.0)
    geometry_scale: TriangularFuzzyNumber = TriangularFuzzyNumber.crisp(1.0)

    def __post_init__(self):
        for name in ("D", "sigma", "geometry_scale"):
            if not getattr(self, name).left > 0:
                raise ValueError(f"support of {name} must be strictly positive")
        if self.S.left < 0:
            raise ValueError("support of S must be non-negative")

    @classmethod
    def crisp(cls, D=1.0, sigma=1.0, S=0.0, scale=1.0) -> "UncertainCoefficients":
        c = TriangularFuzzyNumber.crisp
        return cls(c(D), c(sigma), c(S), c(scale))

    def peak(self) -> Coefficients:
        return Coefficients(self.D.peak, self.sigma.peak, self.S.peak)


@dataclass(frozen=True)
class StudyConfig:
    formulation: str = "A"
    bc_mode: str = "boundary"
    strategy: str = "matched"
    grid_size: int = 9
    alpha_levels: tuple[float, ...] = DEFAULT_ALPHA_LEVELS
    side: float = 4.0
    families: tuple[tuple[str, tuple[int, ...]], ...] = DEFAULT_FAMILIES
    mass: str = "consistent"
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("formulation", _norm_choice(self.formulation, FORMULATIONS, {}, "formulation"))
        set_("bc_mode", _norm_choice(self.bc_mode, BC_MODES, _BC_ALIASES, "bc_mode"))
        set_("strategy", _norm_choice(self.strategy, STRATEGIES, _STRATEGY_ALIASES, "strategy"))
        set_("alpha_levels", validate_levels(self.alpha_levels))
        if self.strategy == "box" and self.grid_size < 3:
            raise ValueError("box sampling needs grid_size >= 3")
        if not (math.isfinite(self.side) and self.side > 0):
            raise ValueError(f"side must be positive, got {self.side}")
        fams = self.families.items() if isinstance(self.families, Mapping) else self.families
        fams = tuple((str(f), tuple(int(k) for k in lv)) for f, lv in fams)
        if not fams:
            raise ValueError("at least one mesh family is required")
        for f, lv in fams:
            if f not in FAMILIES:
                raise ValueError(f"unknown family {f!r}; expected one of {FAMILIES}")
            if any(k < 0 for k in lv):
                raise ValueError(f"negative refinement level in family {f!r}")
        set_("families", fams)


def constrained_nodes(m: Mesh, bc_mode: str) -> tuple[int, ...]:
    bc_mode = _norm_choice(bc_mode, BC_MODES, _BC_ALIASES, "bc_mode")
    nodes = set()
    if bc_mode in ("centroid", "both"):
        if m.centroid_node is None:
            raise MissingCentroid("mesh has no centroid node")
        nodes.add(m.centroid_node)
    if bc_mode in ("boundary", "both"):
        nodes.update(m.boundary_nodes)
    return tuple(sorted(nodes))


@lru_cache(maxsize=64)
def reduced_unit_system(m: Mesh, bc_mode: str, mass: str = "consistent"):
    """Unit-coefficient system with the ``bc_mode`` nodes eliminated (cached per mesh object)."""
    s = assemble(m, Coefficients(1.0, 1.0, 0.0), mass=mass)
    return apply_dirichlet(s, constrained_nodes(m, bc_mode))


@lru_cache(maxsize=256)
def _scaled(m: Mesh, factor: float) -> Mesh:
    return m if factor == 1.0 else m.scaled(factor)


def pencil(system, formulation: str, D: float = 1.0, sigma: float = 1.0):
    """Matrix pair for ``formulation`` from a unit-coefficient system."""
    K1 = D * system.K1g
    K2 = sigma * system.K2g
    if formulation == "A":
        return K1 + K2, system.Mg
    if formulation == "B":
        return K1, K2
    if formulation == "C":
        return K2, K1 + K2
    raise ValueError(f"unknown formulation {formulation!r}; expected one of {FORMULATIONS}")


@lru_cache(maxsize=64)
def _dense_unit(m: Mesh, bc_mode: str, mass: str):
    s = reduced_unit_system(m, bc_mode, mass)
    return DenseUnit(s.K1g.toarray(), s.K2g.toarray(), s.Mg.toarray())


@dataclass(frozen=True, eq=False)
class DenseUnit:
    K1g: np.ndarray
    K2g: np.ndarray
    Mg: np.ndarray


def crisp_lambda(m: Mesh, c: Coefficients, formulation: str = "A", bc_mode: str = "boundary",
                 mass: str = "consistent", tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> float:
    formulation = _norm_choice(formulation, FORMULATIONS, {}, "formulation")
    bc_mode = _norm_choice(bc_mode, BC_MODES, _BC_ALIASES, "bc_mode")
    # K1, K2 are linear in D, sigma: assemble once at unit values and scale
    A, B = pencil(_dense_unit(m, bc_mode, mass), formulation, c.D, c.sigma)
    return smallest_eig(A, B, tol=tol, max_iter=max_iter).lam


def evaluation_points(u: UncertainCoefficients, alpha: float, strategy: str,
                      grid_size: int = 9) -> list[tuple[float, float, float]]:
    """(D, sigma, scale) triples evaluated at ``alpha`` by ``strategy``."""
    strategy = _norm_choice(strategy, STRATEGIES, _STRATEGY_ALIASES, "strategy")
    cuts = [alpha_cut(t, alpha) for t in (u.D, u.sigma, u.geometry_scale)]
    if strategy == "matched":
        lower = tuple(param_point(c, math.inf) for c in cuts)
        upper = tuple(param_point(c, 1) for c in cuts)
        return [lower] if lower == upper else [lower, upper]
    if strategy == "corners":
        axes = [sorted({c.lo, c.hi}) for c in cuts]
    else:
        axes = [sorted(set(np.linspace(c.lo, c.hi, grid_size).tolist()) | {c.lo, c.hi}) for c in cuts]
    return list(itertools.product(*axes))


def interval_lambda(m: Mesh, u: UncertainCoefficients, alpha: float, strategy: str = "matched",
                    formulation: str = "A", bc_mode: str = "boundary", grid_size: int = 9,
                    mass: str = "consistent", tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> Interval:
    values = [
        crisp_lambda(_scaled(m, g), Coefficients(D, s, 0.0), formulation, bc_mode,
                     mass, tol, max_iter)
        for D, s, g in evaluation_points(u, alpha, strategy, grid_size)
    ]
    return Interval(min(values), max(values))


def fuzzy_lambda(m: Mesh, u: UncertainCoefficients, cfg: StudyConfig) -> FuzzyResult:
    cuts = [
        interval_lambda(m, u, a, cfg.strategy, cfg.formulation, cfg.bc_mode, cfg.grid_size,
                        cfg.mass, cfg.tol, cfg.max_iter)
        for a in cfg.alpha_levels
    ]
    return from_samples(cfg.alpha_levels, cuts)


@dataclass(frozen=True)
class LevelResult:
    family: str
    level: int
    n_elements: int
    n_nodes: int
    crisp: float
    fuzzy: FuzzyResult

    @property
    def width(self) -> float:
        """Width of the alpha = 0 cut."""
        return self.fuzzy.cuts[0].width


@dataclass(frozen=True)
class FuzzyEigenStudy:
    config: StudyConfig
    levels: tuple[LevelResult, ...] = field(default=())

    def family(self, name: str) -> list[LevelResult]:
        return sorted((r for r in self.levels if r.family == name), key=lambda r: r.level)

    def by_elements(self) -> list[LevelResult]:
        return sorted(self.levels, key=lambda r: (r.n_elements, r.family))


def _run_level(cfg: StudyConfig, u: UncertainCoefficients, family: str, level: int) -> LevelResult:
    try:
        m = build_family(family, level, cfg.side)
        scale = u.geometry_scale.peak
        crisp = crisp_lambda(_scaled(m, scale), u.peak(), cfg.formulation, cfg.bc_mode,
                             cfg.mass, cfg.tol, cfg.max_iter)
        fuzzy = fuzzy_lambda(m, u, cfg)
    except Exception as exc:
        raise LevelFailure(family, level, exc) from exc
    return LevelResult(family, level, m.n_elements, m.n_nodes, crisp, fuzzy)


def convergence_study(cfg: StudyConfig, u: UncertainCoefficients | None = None,
                      workers: int = 1) -> FuzzyEigenStudy:
    """Crisp and fuzzy eigenvalues on every configured family level.

    With ``workers > 1`` levels run on a thread pool; results are collected
    in configuration order, so output does not depend on scheduling.
    """
    u = UncertainCoefficients() if u is None else u
    jobs = [(f, k) for f, levels in cfg.families for k in levels]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _run_level(cfg, u, *job), jobs))
    else:
        results = [_run_level(cfg, u, f, k) for f, k in jobs]
    return FuzzyEigenStudy(cfg, tuple(results))
