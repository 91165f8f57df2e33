"""Command-line interface.

    fuzzyfem mesh --side 4 --family fan --level 2 --out mesh.json
    fuzzyfem converge --config run.json --out table.csv
    fuzzyfem membership --config run.json --out membership.json
    fuzzyfem solve --config run.json [--fixed-source] --out flux.json
    fuzzyfem dump-config [--config run.json] --out run.json
    fuzzyfem report --out benchmark.md

Exit codes: 0 success, 1 internal error, 2 usage or configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import benchmark
from .eig import NotConverged, smallest_eig
from .fem import AllNodesConstrained, SingularSystem, solve_fixed_source
from .fuzzy import DEFAULT_ALPHA_LEVELS, TriangularFuzzyNumber, to_polyline
from .mesh import FAMILIES, build_family
from .uq import (
    BC_MODES,
    DEFAULT_FAMILIES,
    FORMULATIONS,
    LevelFailure,
    StudyConfig,
    UncertainCoefficients,
    STRATEGIES,
    constrained_nodes,
    convergence_study,
    pencil,
    reduced_unit_system,
)

CSV_HEADER = ["family", "level", "n_elements", "n_nodes", "alpha",
              "lambda_lo", "lambda_hi", "lambda_crisp"]

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

_NUMERIC_ERRORS = (NotConverged, SingularSystem, np.linalg.LinAlgError, ArithmeticError)


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _tfn(value, name) -> TriangularFuzzyNumber:
    try:
        left, peak, right = (float(v) for v in value)
        return TriangularFuzzyNumber(left, peak, right)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: expected [left, peak, right], got {value!r}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs; serialized as flat JSON with explicit keys."""

    formulation: str = "A"
    bc_mode: str = "centroid"
    strategy: str = "matched"
    grid_size: int = 9
    alpha_levels: tuple[float, ...] = DEFAULT_ALPHA_LEVELS
    side: float = 4.0
    families: tuple[tuple[str, tuple[int, ...]], ...] = DEFAULT_FAMILIES
    mass: str = "consistent"
    tol: float = 1e-10
    max_iter: int = 500
    D: TriangularFuzzyNumber = TriangularFuzzyNumber(0.5, 1.0, 1.5)
    sigma: TriangularFuzzyNumber = TriangularFuzzyNumber(0.5, 1.0, 1.5)
    S: TriangularFuzzyNumber = TriangularFuzzyNumber.crisp(0.0)
    geometry_scale: TriangularFuzzyNumber = TriangularFuzzyNumber.crisp(1.0)
    family: str = "fan"
    level: int = 0

    def __post_init__(self):
        # validation is delegated to the study types
        try:
            self.study()
            self.uncertain()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if int(self.level) < 0:
            raise ConfigError("level must be >= 0")

    def study(self) -> StudyConfig:
        return StudyConfig(self.formulation, self.bc_mode, self.strategy, self.grid_size,
                           tuple(self.alpha_levels), self.side, self.families, self.mass,
                           self.tol, self.max_iter)

    def uncertain(self) -> UncertainCoefficients:
        return UncertainCoefficients(self.D, self.sigma, self.S, self.geometry_scale)

    def to_dict(self) -> dict:
        study = self.study()
        return {
            "formulation": study.formulation,
            "bc_mode": study.bc_mode,
            "strategy": study.strategy,
            "grid_size": self.grid_size,
            "alpha_levels": list(study.alpha_levels),
            "side": self.side,
            "families": {f: list(lv) for f, lv in study.families},
            "mass": self.mass,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "D": self.D.as_list(),
            "sigma": self.sigma.as_list(),
            "S": self.S.as_list(),
            "geometry_scale": self.geometry_scale.as_list(),
            "family": self.family,
            "level": self.level,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        kw = dict(data)
        for key in ("D", "sigma", "S", "geometry_scale"):
            if key in kw:
                kw[key] = _tfn(kw[key], key)
        if "alpha_levels" in kw:
            kw["alpha_levels"] = tuple(kw["alpha_levels"])
        if "families" in kw:
            fams = kw["families"]
            if not isinstance(fams, dict):
                raise ConfigError("families must map family name to a list of levels")
            kw["families"] = tuple((f, tuple(lv)) for f, lv in fams.items())
        try:
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def canonical(self) -> "RunConfig":
        return RunConfig.from_dict(self.to_dict())


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return RunConfig.from_dict(data)


def _parse_levels(text: str) -> tuple[int, ...]:
    try:
        levels = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be comma-separated integers, got {text!r}")
    if not levels:
        raise argparse.ArgumentTypeError("empty level list")
    return levels


def apply_overrides(cfg: RunConfig, args) -> RunConfig:
    changes = {}
    if getattr(args, "formulation", None):
        changes["formulation"] = args.formulation
    if getattr(args, "bc", None):
        changes["bc_mode"] = args.bc
    if getattr(args, "strategy", None):
        changes["strategy"] = args.strategy
    if getattr(args, "side", None) is not None:
        changes["side"] = args.side
    if getattr(args, "family", None):
        changes["family"] = args.family
    if getattr(args, "level", None) is not None:
        changes["level"] = args.level
    if getattr(args, "levels", None):
        changes["families"] = ((args.family or "fan", args.levels),)
    if not changes:
        return cfg
    try:
        return dataclasses.replace(cfg, **changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def write_atomic(path: str | None, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename; stdout when path is None."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def converge_csv(cfg: RunConfig, workers: int = 1) -> str:
    study = convergence_study(cfg.study(), cfg.uncertain(), workers=workers)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER)
    for r in study.by_elements():
        for alpha, cut in zip(r.fuzzy.levels, r.fuzzy.cuts):
            writer.writerow([r.family, r.level, r.n_elements, r.n_nodes, _fmt(alpha),
                             _fmt(cut.lo), _fmt(cut.hi), _fmt(r.crisp)])
    return buf.getvalue()


def membership_json(cfg: RunConfig, workers: int = 1) -> str:
    study = convergence_study(cfg.study(), cfg.uncertain(), workers=workers)
    doc = [
        {
            "family": r.family,
            "level": r.level,
            "n_elements": r.n_elements,
            "crisp": r.crisp,
            "polyline": [[v, a] for v, a in to_polyline(r.fuzzy)],
        }
        for r in study.by_elements()
    ]
    return json.dumps(doc, indent=2) + "\n"


def solve_json(cfg: RunConfig, fixed_source: bool) -> str:
    study = cfg.study()
    u = cfg.uncertain()
    m = build_family(cfg.family, cfg.level, cfg.side).scaled(u.geometry_scale.peak)
    coeffs = u.peak()
    constrained = constrained_nodes(m, study.bc_mode)
    doc = {"family": cfg.family, "level": cfg.level, "n_elements": m.n_elements,
           "bc_mode": study.bc_mode, "nodes": m.nodes.tolist()}
    if fixed_source:
        doc["mode"] = "fixed_source"
        doc["flux"] = solve_fixed_source(m, coeffs, constrained).tolist()
    else:
        system = reduced_unit_system(m, study.bc_mode, study.mass)
        A, B = pencil(system, study.formulation, coeffs.D, coeffs.sigma)
        res = smallest_eig(A, B, tol=study.tol, max_iter=study.max_iter)
        flux = np.zeros(m.n_nodes)
        flux[list(system.free_nodes)] = res.vector
        doc.update(mode="eigen", formulation=study.formulation, eigenvalue=res.lam,
                   residual=res.residual, flux=flux.tolist())
    return json.dumps(doc, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzyfem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, study=True):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--side", type=float)
        p.add_argument("--family", choices=FAMILIES)
        if study:
            p.add_argument("--formulation", choices=FORMULATIONS)
            p.add_argument("--bc", choices=BC_MODES)
            p.add_argument("--strategy", choices=STRATEGIES)

    p = sub.add_parser("mesh", help="write a mesh as JSON")
    common(p, study=False)
    p.add_argument("--level", type=int)

    for name, text in (("converge", "crisp/fuzzy eigenvalue table as CSV"),
                       ("membership", "membership polylines as JSON")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--levels", type=_parse_levels, help="comma-separated refinement levels")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("solve", help="nodal flux for one mesh")
    common(p)
    p.add_argument("--level", type=int)
    p.add_argument("--fixed-source", action="store_true",
                   help="solve (K1 + K2) phi = f instead of the eigenproblem")

    p = sub.add_parser("dump-config", help="write the effective configuration")
    common(p)
    p.add_argument("--level", type=int)
    p.add_argument("--levels", type=_parse_levels)

    p = sub.add_parser("report", help="crisp benchmark comparison (markdown)")
    p.add_argument("--out")
    p.add_argument("--side", type=float, default=4.0)
    p.add_argument("--mass", choices=("consistent", "lumped"), default="consistent")
    return parser


def _run(args) -> int:
    if args.command == "report":
        write_atomic(args.out, benchmark.format_report(benchmark.compare(args.side, args.mass)))
        return EXIT_OK

    cfg = apply_overrides(load_config(args.config), args)
    if args.command == "mesh":
        m = build_family(cfg.family, cfg.level, cfg.side)
        write_atomic(args.out, m.to_json() + "\n")
        print(f"nodes={m.n_nodes} elements={m.n_elements}",
              file=sys.stdout if args.out else sys.stderr)
    elif args.command == "converge":
        write_atomic(args.out, converge_csv(cfg, args.workers))
    elif args.command == "membership":
        write_atomic(args.out, membership_json(cfg, args.workers))
    elif args.command == "solve":
        write_atomic(args.out, solve_json(cfg, args.fixed_source))
    elif args.command == "dump-config":
        write_atomic(args.out, json.dumps(cfg.to_dict(), indent=2) + "\n")
    return EXIT_OK


def _numeric(exc: BaseException) -> bool:
    while exc is not None:
        if isinstance(exc, _NUMERIC_ERRORS):
            return True
        exc = exc.__cause__
    return False


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LevelFailure, AllNodesConstrained) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if _numeric(exc) else EXIT_USAGE
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
