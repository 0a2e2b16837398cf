"""Experiment runner: one subcommand per module, configured by TOML file
and/or flags (flags win), emitting a deterministic record stream.

Every run writes three files into the output directory: records.jsonl (one
schema-validated JSON record per line), summary.csv (plot-ready rows), and
manifest.json (config echo, library versions, wall time).  With a fixed
seed and worker count, records.jsonl and summary.csv are byte-identical
across reruns; the manifest is not, since it carries the wall time.

Exit codes: 0 success, 1 module error or failed certificate, 2 invalid
config.  Worker threads only ever run pure module calls; all file output
goes through the single writer at the end of the run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata, resources
from pathlib import Path

import jsonschema
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import curvature as curv
from .energy import RadialPotential, SurfaceTension, free_energy, surface_energy, wulff_shape
from .mass import critical_mass, energy_curve, regime_split
from .shapes import Ball, GridShape, PolygonShape, Shape, load_shape, mass, rasterize, save_shape
from .stability import family_shape, modulus_sweep, stability_certificate, transport_bound
from .symmetrize import default_plan, symmetrization_descent

__all__ = ["ExperimentConfig", "main", "run"]


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    subcommand: str
    seed: int
    output: Path
    workers: int
    params: dict


@dataclass
class RunResult:
    records: list
    summary_header: list
    summary_rows: list
    printed: list = field(default_factory=list)
    status: str = "ok"
    extra_files: dict = field(default_factory=dict)
    shapes: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# parameter tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Param:
    kind: object  # int, float, str, bool, "float-list", "matrix"
    default: object
    help: str
    choices: tuple | None = None
    toml_only: bool = False


_SHAPE_PARAMS = {
    "shape": Param(str, "ball", "shape family", ("ball", "square", "rectangle", "ellipse", "file")),
    "n": Param(int, 2, "ambient dimension"),
    "radius": Param(float, 1.0, "ball/ellipse radius"),
    "width": Param(float, 1.0, "rectangle width"),
    "height": Param(float, 1.0, "rectangle height"),
    "eps": Param(float, 0.0, "ellipse log-elongation"),
    "path": Param(str, None, "shape file for shape=file"),
    "rays": Param(int, 512, "radial encoding resolution"),
}

_POTENTIAL_PARAMS = {
    "potential": Param(str, "quadratic", "radial potential", ("zero", "linear", "quadratic", "power")),
    "alpha": Param(float, None, "exponent for potential=power"),
}

PARAM_TABLES: dict[str, dict[str, Param]] = {
    "energy": {
        **_SHAPE_PARAMS,
        **_POTENTIAL_PARAMS,
        "delta": Param(float, None, "rasterize to a grid of this cell size"),
        "tension": Param(str, "isotropic", "surface tension", ("isotropic", "p-norm")),
        "p": Param(float, 2.0, "exponent for tension=p-norm"),
    },
    "wulff": {
        "n": Param(int, 2, "ambient dimension"),
        "directions": Param(int, 256, "support directions"),
        "delta": Param(float, None, "grid cell size for the 3D construction"),
        "tension": Param(str, "p-norm", "surface tension", ("isotropic", "p-norm", "crystalline")),
        "p": Param(float, 1.0, "exponent for tension=p-norm"),
        "crystal_normals": Param("matrix", None, "facet normals (config file only)", toml_only=True),
        "crystal_values": Param("float-list", None, "facet tensions (config file only)", toml_only=True),
    },
    "symmetrize": {
        **{k: v for k, v in _SHAPE_PARAMS.items() if k != "shape"},
        "shape": Param(str, "rectangle", "starting shape", ("ball", "square", "rectangle", "ellipse", "file")),
        "height": Param(float, 4.0, "rectangle height"),
        **_POTENTIAL_PARAMS,
        "delta": Param(float, 1 / 256, "grid cell size (<= 0 keeps the exact encoding)"),
        "steps": Param(int, 200, "maximum descent steps"),
        "stop": Param(float, 1e-3, "stop once asymmetry drops below this"),
        "randomized": Param(int, 0, "extra random directions in the plan"),
    },
    "stability": {
        "family": Param(str, "translated-ball", "generated family",
                        ("translated-ball", "ellipse", "perturbed-radial")),
        "n": Param(int, 2, "ambient dimension"),
        "radius": Param(float, 1.0, "family radius a"),
        "x": Param(float, 0.1, "family parameter (offset / log-elongation / amplitude)"),
        "count": Param(int, 1, "number of instances"),
        "rays": Param(int, 512, "radial encoding resolution"),
        **_POTENTIAL_PARAMS,
    },
    "transport": {
        "family": Param(str, "translated-ball", "generated family",
                        ("translated-ball", "ellipse", "perturbed-radial")),
        "n": Param(int, 2, "ambient dimension"),
        "radius": Param(float, 1.0, "family radius a"),
        "x": Param(float, 0.1, "family parameter"),
        "count": Param(int, 1, "number of instances"),
        "rays": Param(int, 512, "radial encoding resolution"),
        "samples": Param(int, 200, "transport samples per side"),
        **_POTENTIAL_PARAMS,
    },
    "modulus": {
        "family": Param(str, "translated-ball", "sweep family", ("translated-ball", "ellipse")),
        "n": Param(int, 2, "ambient dimension"),
        "rays": Param(int, 512, "radial encoding resolution"),
        "mass_lo": Param(float, 1.0, "smallest mass"),
        "mass_hi": Param(float, 4.0, "largest mass"),
        "mass_count": Param(int, 8, "mass grid size"),
        "eps_lo": Param(float, 0.02, "smallest asymmetry"),
        "eps_hi": Param(float, 0.3, "largest asymmetry"),
        "eps_count": Param(int, 8, "asymmetry grid size"),
        "masses": Param("float-list", None, "explicit mass grid (config file only)", toml_only=True),
        "eps": Param("float-list", None, "explicit asymmetry grid (config file only)", toml_only=True),
        **_POTENTIAL_PARAMS,
    },
    "critical-mass": {
        "n": Param(int, 2, "ambient dimension (>= 2)"),
        "points": Param(int, 200, "mass grid size"),
        "span": Param(float, 4.0, "grid spans m_alpha/span .. m_alpha*span"),
        "potential": Param(str, "quadratic", "radial potential", ("linear", "quadratic", "power")),
        "alpha": Param(float, None, "exponent for potential=power"),
    },
    "curvature": {
        "mesh": Param(str, "icosphere", "mesh source", ("icosphere", "torus", "ellipsoid", "file")),
        "path": Param(str, None, "mesh file (.off or .stl) for mesh=file"),
        "radius": Param(float, 1.0, "icosphere radius"),
        "subdivisions": Param(int, 4, "icosphere subdivisions"),
        "big_radius": Param(float, 2.0, "torus ring radius"),
        "small_radius": Param(float, 0.5, "torus tube radius"),
        "major": Param(int, 64, "torus major segments"),
        "minor": Param(int, 32, "torus minor segments"),
        "ax": Param(float, 2.0, "ellipsoid semi-axis x"),
        "ay": Param(float, 1.0, "ellipsoid semi-axis y"),
        "az": Param(float, 1.0, "ellipsoid semi-axis z"),
        "rings": Param(int, 48, "ellipsoid latitude bands"),
        "segments": Param(int, 64, "ellipsoid longitude segments"),
        "alpha": Param(float, -1.0, "test-field exponent (negative)"),
        "tension": Param(str, "isotropic", "surface tension", ("isotropic", "p-norm")),
        "p": Param(float, 2.0, "exponent for tension=p-norm"),
        "potential": Param(str, "quadratic", "radial potential", ("zero", "linear", "quadratic", "power")),
        "per_vertex": Param(bool, False, "also dump per-vertex fields as CSV"),
    },
}


def _validate_params(sub: str, params: dict) -> None:
    if params.get("potential") == "power" and params.get("alpha") is None:
        raise ConfigError("potential=power needs alpha")
    if params.get("shape") == "file" and not params.get("path"):
        raise ConfigError("shape=file needs path")
    if params.get("mesh") == "file" and not params.get("path"):
        raise ConfigError("mesh=file needs path")
    if sub == "wulff" and params["tension"] == "crystalline":
        if params.get("crystal_normals") is None or params.get("crystal_values") is None:
            raise ConfigError("tension=crystalline needs crystal_normals and crystal_values in the config file")
    for key in ("count", "points", "steps", "rays", "mass_count", "eps_count"):
        if key in params and params[key] is not None and params[key] < 1:
            raise ConfigError(f"{key} must be at least 1")
    if "n" in params and params["n"] not in (1, 2, 3):
        raise ConfigError("n must be 1, 2, or 3")


# ---------------------------------------------------------------------------
# config resolution
# ---------------------------------------------------------------------------

def _coerce(sub: str, key: str, spec: Param, value):
    if spec.kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if spec.kind in (int, float, str, bool):
        if not isinstance(value, spec.kind) or (spec.kind is int and isinstance(value, bool)):
            raise ConfigError(
                f"key '{key}' of [{sub}] expects {spec.kind.__name__}, got {value!r}"
            )
        return value
    if spec.kind == "float-list":
        if not isinstance(value, list) or not all(isinstance(v, (int, float)) for v in value):
            raise ConfigError(f"key '{key}' of [{sub}] expects a list of numbers")
        return [float(v) for v in value]
    if spec.kind == "matrix":
        ok = isinstance(value, list) and all(
            isinstance(row, list) and all(isinstance(v, (int, float)) for v in row) for row in value
        )
        if not ok:
            raise ConfigError(f"key '{key}' of [{sub}] expects a list of number lists")
        return [[float(v) for v in row] for row in value]
    raise AssertionError(spec.kind)


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config file {path}: {e}") from e


def _split_subcommand(argv: list) -> tuple:
    """The subcommand is the leading bare token; with none, it must come
    from the config file."""
    if argv and not argv[0].startswith("-"):
        return argv[0], argv[1:]
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    ns, _ = pre.parse_known_args(argv)
    if ns.config:
        sub = _load_toml(ns.config).get("subcommand")
        if sub:
            return sub, argv
    raise ConfigError("missing subcommand")


def _build_parser(sub: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=f"wulfflab {sub}",
        description=f"run the {sub} experiment",
    )
    parser.add_argument("--config", help="TOML config file; flags override it")
    parser.add_argument("--seed", type=int, help="RNG seed (default 0)")
    parser.add_argument("--output", help=f"output directory (default runs/{sub})")
    parser.add_argument("--workers", type=int, help="worker threads (default 1)")
    for name, spec in PARAM_TABLES[sub].items():
        if spec.toml_only:
            continue
        flag = "--" + name.replace("_", "-")
        if spec.kind is bool:
            parser.add_argument(flag, dest=name, action=argparse.BooleanOptionalAction,
                                default=None, help=spec.help)
        else:
            parser.add_argument(flag, dest=name, type=spec.kind, default=None,
                                choices=spec.choices, help=spec.help)
    return parser


def resolve_config(argv: list) -> ExperimentConfig:
    sub, rest = _split_subcommand(argv)
    if sub not in PARAM_TABLES:
        raise ConfigError(f"unknown subcommand '{sub}' (choose from {', '.join(sorted(PARAM_TABLES))})")
    ns = _build_parser(sub).parse_args(rest)

    table = PARAM_TABLES[sub]
    params = {name: spec.default for name, spec in table.items()}
    seed, output, workers = 0, None, 1

    if ns.config:
        doc = _load_toml(ns.config)
        allowed = {"subcommand", "seed", "output", "workers", "params"}
        for key in doc:
            if key not in allowed:
                raise ConfigError(f"unknown top-level key '{key}' in {ns.config}")
        if "seed" in doc:
            if not isinstance(doc["seed"], int) or isinstance(doc["seed"], bool):
                raise ConfigError("seed must be an integer")
            seed = doc["seed"]
        if "output" in doc:
            if not isinstance(doc["output"], str):
                raise ConfigError("output must be a string")
            output = doc["output"]
        if "workers" in doc:
            if not isinstance(doc["workers"], int) or isinstance(doc["workers"], bool):
                raise ConfigError("workers must be an integer")
            workers = doc["workers"]
        for key, value in doc.get("params", {}).items():
            if key not in table:
                raise ConfigError(f"unknown key '{key}' in [params] for subcommand '{sub}' in {ns.config}")
            params[key] = _coerce(sub, key, table[key], value)

    if ns.seed is not None:
        seed = ns.seed
    if ns.output is not None:
        output = ns.output
    if ns.workers is not None:
        workers = ns.workers
    for name, spec in table.items():
        if not spec.toml_only and getattr(ns, name) is not None:
            params[name] = getattr(ns, name)

    if workers < 1:
        raise ConfigError("workers must be at least 1")
    _validate_params(sub, params)
    return ExperimentConfig(sub, seed, Path(output or f"runs/{sub}"), workers, params)


# ---------------------------------------------------------------------------
# shared builders
# ---------------------------------------------------------------------------

def _tension_from(params: dict) -> SurfaceTension:
    name = params["tension"]
    if name == "isotropic":
        return SurfaceTension.isotropic_tension()
    if name == "p-norm":
        return SurfaceTension.p_norm(params["p"])
    return SurfaceTension.crystalline(params["crystal_normals"], params["crystal_values"])


def _potential_from(params: dict) -> RadialPotential:
    name = params["potential"]
    if name == "zero":
        return RadialPotential.zero()
    if name == "linear":
        return RadialPotential.linear()
    if name == "quadratic":
        return RadialPotential.quadratic()
    return RadialPotential.power(params["alpha"])


def _build_shape(params: dict, seed: int) -> Shape:
    kind = params["shape"]
    n = params["n"]
    if kind == "ball":
        return Ball((0.0,) * n, params["radius"]).to_radial(params["rays"])
    if kind == "square":
        w = params["width"] / 2
        return PolygonShape([[(-w, -w), (w, -w), (w, w), (-w, w)]])
    if kind == "rectangle":
        w, h = params["width"] / 2, params["height"] / 2
        return PolygonShape([[(-w, -h), (w, -h), (w, h), (-w, h)]])
    if kind == "ellipse":
        return family_shape("ellipse", 2, params["radius"], params["eps"], params["rays"], seed)
    return load_shape(params["path"])


def _stats(values: np.ndarray) -> dict:
    return {
        "min": float(np.min(values)),
        "max": float(np.max(values)),
        "mean": float(np.mean(values)),
    }


def _pool_map(fn, items, workers: int) -> list:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _instance_parameters(params: dict, seed: int) -> list:
    """(parameter, seed) per instance: deterministic families ramp the
    parameter, the random family varies the seed."""
    count = params["count"]
    x = params["x"]
    if params["family"] == "perturbed-radial":
        return [(x, seed + i) for i in range(count)]
    return [(x * (i + 1) / count, seed + i) for i in range(count)]


# ---------------------------------------------------------------------------
# subcommand runners
# ---------------------------------------------------------------------------

def _run_energy(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    shape = _build_shape(p, cfg.seed)
    if p["delta"] is not None and p["delta"] > 0:
        shape = rasterize(shape, p["delta"])
    breakdown = free_energy(shape, _tension_from(p), _potential_from(p))
    m = mass(shape)
    record = {
        "kind": "energy",
        "dimension": shape.dimension,
        "shape": p["shape"],
        "mass": m,
        "surface": breakdown.surface,
        "potential": breakdown.potential,
        "total": breakdown.total,
    }
    return RunResult(
        [record],
        ["mass", "surface", "potential", "total"],
        [[m, breakdown.surface, breakdown.potential, breakdown.total]],
        [f"surface {breakdown.surface!r}  potential {breakdown.potential!r}  total {breakdown.total!r}"],
    )


def _run_wulff(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    tension = _tension_from(p)
    shape = wulff_shape(tension, dimension=p["n"], directions=p["directions"], resolution=p["delta"])
    m = mass(shape)
    surf = surface_energy(shape, tension)
    record = {
        "kind": "wulff",
        "dimension": p["n"],
        "directions": p["directions"],
        "mass": m,
        "surface_energy": surf,
        "bounding_radius": float(shape.bounding_radius()),
        "shape_file": "wulff.json",
    }
    return RunResult(
        [record],
        ["directions", "mass", "surface_energy", "bounding_radius"],
        [[p["directions"], m, surf, float(shape.bounding_radius())]],
        [f"wulff shape: mass {m!r}, surface energy {surf!r}"],
        shapes={"wulff.json": shape},
    )


def _run_symmetrize(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    shape = _build_shape(p, cfg.seed)
    if p["delta"] is not None and p["delta"] > 0 and not isinstance(shape, GridShape):
        shape = rasterize(shape, p["delta"])
    plan = default_plan(
        shape.dimension,
        max_iterations=p["steps"],
        stop_asymmetry=p["stop"],
        randomized=p["randomized"],
        seed=cfg.seed,
    )
    trail = symmetrization_descent(shape, plan, SurfaceTension.isotropic_tension(), _potential_from(p))
    records = [
        {
            "kind": "descent-step",
            "iteration": rec.iteration,
            "surface": rec.energy.surface,
            "potential": rec.energy.potential,
            "total": rec.energy.total,
            "asymmetry": rec.asymmetry,
        }
        for rec in trail
    ]
    rows = [[r["iteration"], r["surface"], r["potential"], r["total"], r["asymmetry"]] for r in records]
    first, last = trail[0], trail[-1]
    return RunResult(
        records,
        ["iteration", "surface", "potential", "total", "asymmetry"],
        rows,
        [
            f"{last.iteration} steps: surface {first.energy.surface!r} -> {last.energy.surface!r}, "
            f"potential {first.energy.potential!r} -> {last.energy.potential!r}",
            f"final asymmetry {last.asymmetry!r}",
        ],
    )


_SLACK_ORDER = (
    "deficit_ge_potential_gap",
    "potential_gap_ge_quadratic",
    "radius_bound",
    "deficit_ge_first_moment",
)


def _run_stability(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    g = _potential_from(p)
    iso = SurfaceTension.isotropic_tension()

    def one(item):
        parameter, inst_seed = item
        shape = family_shape(p["family"], p["n"], p["radius"], parameter, p["rays"], inst_seed)
        return parameter, stability_certificate(shape, iso, g)

    results = _pool_map(one, _instance_parameters(p, cfg.seed), cfg.workers)
    records, rows, printed = [], [], []
    for parameter, report in results:
        slacks = {name: cert.slack for name, cert in report.certificates.items()}
        records.append(
            {
                "kind": "stability",
                "family": p["family"],
                "dimension": p["n"],
                "parameter": parameter,
                "mass": report.mass,
                "radius": report.radius,
                "asymmetry": report.asymmetry,
                "deficit": report.deficit,
                "potential_gap": report.potential_gap,
                "first_moment_term": report.first_moment_term,
                "a_star": report.a_star,
                "r_a": report.r_a,
                "slacks": slacks,
                "all_passed": report.all_passed,
            }
        )
        rows.append(
            [report.mass, parameter, report.asymmetry, report.deficit, report.potential_gap,
             report.first_moment_term if report.first_moment_term is not None else ""]
            + [slacks.get(name, "") for name in _SLACK_ORDER]
            + [report.all_passed]
        )
    failed = [r for r in records if not r["all_passed"]]
    if len(records) <= 10:
        for r in records:
            printed.append(
                f"{r['family']} x={r['parameter']:.6g}: deficit {r['deficit']!r}, "
                f"asymmetry {r['asymmetry']:.6g}, "
                f"{'all certificates passed' if r['all_passed'] else 'CERTIFICATE FAILED'}"
            )
    printed.append(f"{len(records) - len(failed)}/{len(records)} instances passed every certificate")
    return RunResult(
        records,
        ["mass", "parameter", "asymmetry", "deficit", "potential_gap", "first_moment_term"]
        + [f"slack_{name}" for name in _SLACK_ORDER] + ["all_passed"],
        rows,
        printed,
        status="ok" if not failed else "certificate-failed",
    )


def _run_transport(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    g = _potential_from(p)

    def one(item):
        parameter, inst_seed = item
        shape = family_shape(p["family"], p["n"], p["radius"], parameter, p["rays"], inst_seed)
        return parameter, mass(shape), transport_bound(shape, g, p["samples"], inst_seed)

    results = _pool_map(one, _instance_parameters(p, cfg.seed), cfg.workers)
    records, rows = [], []
    for parameter, m, cert in results:
        k = cert.sample_count
        error_bound = 3 / math.sqrt(k) if k else float("inf")
        radius_bound = cert.radius + 2 * cert.cell_volume ** (1 / p["n"]) if k else cert.radius
        passed = cert.trivial or (
            cert.pushforward_error <= error_bound and cert.max_target_radius <= radius_bound
        )
        records.append(
            {
                "kind": "transport",
                "family": p["family"],
                "dimension": p["n"],
                "parameter": parameter,
                "mass": m,
                "radius": cert.radius,
                "samples": k,
                "trivial": cert.trivial,
                "cell_volume": cert.cell_volume,
                "region_volume": cert.region_volume,
                "pushforward_error": cert.pushforward_error,
                "error_bound": error_bound,
                "max_target_radius": cert.max_target_radius,
                "radius_bound": radius_bound,
                "sample_gap_slack": cert.sample_gap_slack,
                "passed": passed,
            }
        )
        rows.append([m, parameter, k, cert.pushforward_error, error_bound,
                     cert.max_target_radius, radius_bound, cert.sample_gap_slack, passed])
    failed = [r for r in records if not r["passed"]]
    printed = [
        f"{r['family']} x={r['parameter']:.6g}: pushforward error {r['pushforward_error']:.6g} "
        f"(bound {r['error_bound']:.6g}), max |T(x)| {r['max_target_radius']:.6g} "
        f"(bound {r['radius_bound']:.6g})"
        for r in records[:10]
    ]
    printed.append(f"{len(records) - len(failed)}/{len(records)} transport certificates passed")
    return RunResult(
        records,
        ["mass", "parameter", "samples", "pushforward_error", "error_bound",
         "max_target_radius", "radius_bound", "sample_gap_slack", "passed"],
        rows,
        printed,
        status="ok" if not failed else "certificate-failed",
    )


def _run_modulus(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    masses = p["masses"] or np.geomspace(p["mass_lo"], p["mass_hi"], p["mass_count"]).tolist()
    eps_grid = p["eps"] or np.geomspace(p["eps_lo"], p["eps_hi"], p["eps_count"]).tolist()
    fit = modulus_sweep(
        SurfaceTension.isotropic_tension(), _potential_from(p),
        masses, eps_grid, family=p["family"], dimension=p["n"], rays=p["rays"],
    )
    records = [
        {"kind": "modulus-point", "mass": m, "eps": eps, "deficit": deficit}
        for m, eps, deficit in fit.records
    ]
    records.append(
        {
            "kind": "modulus-fit",
            "family": p["family"],
            "p_eps": fit.p_eps,
            "p_mass": fit.p_mass,
            "prefactor": fit.prefactor,
            "max_residual": fit.max_residual,
            "note": fit.note,
        }
    )
    return RunResult(
        records,
        ["mass", "eps", "deficit"],
        [[m, eps, deficit] for m, eps, deficit in fit.records],
        [
            f"fitted exponents: p_eps {fit.p_eps!r}, p_mass {fit.p_mass!r} "
            f"(max log residual {fit.max_residual:.3g})",
            fit.note,
        ],
    )


def _run_critical_mass(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    g = _potential_from(p)
    m_alpha = critical_mass(p["n"], g)
    masses = np.geomspace(m_alpha / p["span"], m_alpha * p["span"], p["points"])
    curve = energy_curve(p["n"], g, masses)
    split = regime_split(curve, require_crossover=True)
    gap = abs(split.crossover - m_alpha) / m_alpha
    records = [
        {"kind": "mass-curve-point", "mass": float(m), "energy": float(e)}
        for m, e in zip(curve.masses, curve.energies)
    ]
    records.append(
        {
            "kind": "critical-mass",
            "dimension": p["n"],
            "alpha": curve.alpha,
            "m_alpha": m_alpha,
            "crossover": split.crossover,
            "relative_gap": gap,
        }
    )
    return RunResult(
        records,
        ["mass", "energy"],
        [[float(m), float(e)] for m, e in zip(curve.masses, curve.energies)],
        [
            f"m_alpha = {m_alpha!r}",
            f"second-difference crossover = {split.crossover!r} (relative gap {gap:.3g})",
        ],
    )


def _build_mesh(p: dict) -> curv.SurfaceMesh:
    kind = p["mesh"]
    if kind == "icosphere":
        return curv.icosphere(p["subdivisions"], p["radius"])
    if kind == "torus":
        return curv.torus_mesh(p["big_radius"], p["small_radius"], p["major"], p["minor"])
    if kind == "ellipsoid":
        return curv.ellipsoid_mesh((p["ax"], p["ay"], p["az"]), p["rings"], p["segments"], p["subdivisions"])
    return curv.read_mesh(p["path"])


def _run_curvature(cfg: ExperimentConfig) -> RunResult:
    p = cfg.params
    mesh = _build_mesh(p)
    tension = _tension_from(p)
    g = _potential_from(p)
    fields = curv.curvature_fields(mesh)
    hf = curv.anisotropic_mean_curvature(mesh, tension, fields)
    mu = curv.multiplier_mu(mesh, tension, g)
    cert = curv.certificate(mesh, g, p["alpha"])
    per_field = {
        "H": _stats(fields.H),
        "A2": _stats(fields.A2),
        "K": _stats(fields.K),
        "Hf": _stats(hf),
        "kappa1": _stats(fields.kappa1),
        "kappa2": _stats(fields.kappa2),
        "omega": _stats(cert.omega),
        "epsilon": _stats(cert.epsilon),
        "v": _stats(cert.v_field),
        "gradient_norm": _stats(cert.gradient_norm),
    }
    record = {
        "kind": "curvature-summary",
        "mesh": p["mesh"],
        "vertex_count": len(mesh.vertices),
        "triangle_count": len(mesh.triangles),
        "euler_characteristic": mesh.euler_characteristic(),
        "mu": mu,
        "q_value": cert.q_value,
        "tolerance": cert.tolerance,
        "verdict": cert.verdict,
        "fields": per_field,
        "sigma": cert.sigma_diagnostics,
    }
    rows = [[name, s["min"], s["max"], s["mean"]] for name, s in per_field.items()]
    extra = {}
    if p["per_vertex"]:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "x", "y", "z", "H", "A2", "K", "Hf", "kappa1", "kappa2"])
        for i, v in enumerate(mesh.vertices):
            writer.writerow([i, v[0], v[1], v[2], fields.H[i], fields.A2[i],
                             fields.K[i], hf[i], fields.kappa1[i], fields.kappa2[i]])
        extra["fields.csv"] = buf.getvalue()
    return RunResult(
        [record],
        ["field", "min", "max", "mean"],
        rows,
        [
            f"mesh: {len(mesh.vertices)} vertices, {len(mesh.triangles)} triangles, "
            f"euler characteristic {mesh.euler_characteristic()}",
            f"mu = {mu!r}, q = {cert.q_value!r}",
            f"verdict: {'convex (min v >= -tolerance)' if cert.verdict else 'not convex'} "
            f"(min v {float(cert.v_field.min())!r}, tolerance {float(cert.tolerance)!r})",
        ],
        status="ok" if cert.verdict else "certificate-failed",
        extra_files=extra,
    )


_DISPATCH = {
    "energy": _run_energy,
    "wulff": _run_wulff,
    "symmetrize": _run_symmetrize,
    "stability": _run_stability,
    "transport": _run_transport,
    "modulus": _run_modulus,
    "critical-mass": _run_critical_mass,
    "curvature": _run_curvature,
}


# ---------------------------------------------------------------------------
# output writing
# ---------------------------------------------------------------------------

def _py(value):
    """JSON-safe plain-Python view: numpy scalars unwrapped, non-finite
    floats mapped to null so the record stream stays strict JSON."""
    if isinstance(value, dict):
        return {k: _py(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_py(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.ndarray):
        return _py(value.tolist())
    return value


_validator = None


def _record_validator() -> jsonschema.protocols.Validator:
    global _validator
    if _validator is None:
        text = resources.files("wulfflab.schemas").joinpath("record.schema.json").read_text()
        _validator = jsonschema.Draft202012Validator(json.loads(text))
    return _validator


def _csv_cell(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _write_outputs(cfg: ExperimentConfig, result: RunResult, wall: float) -> None:
    validator = _record_validator()
    records = [_py(r) for r in result.records]
    for record in records:
        errors = sorted(validator.iter_errors(record), key=str)
        if errors:
            raise RuntimeError(f"internal: record failed its schema: {errors[0].message}")

    cfg.output.mkdir(parents=True, exist_ok=True)
    with open(cfg.output / "records.jsonl", "w") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.summary_header)
    for row in result.summary_rows:
        writer.writerow([_csv_cell(_py(v)) for v in row])
    (cfg.output / "summary.csv").write_text(buf.getvalue())

    for name, content in result.extra_files.items():
        (cfg.output / name).write_text(content)
    for name, shape in result.shapes.items():
        save_shape(shape, cfg.output / name)

    def version_of(dist: str) -> str:
        try:
            return metadata.version(dist)
        except metadata.PackageNotFoundError:
            return "unknown"

    manifest = {
        "config": {
            "subcommand": cfg.subcommand,
            "seed": cfg.seed,
            "output": str(cfg.output),
            "workers": cfg.workers,
            "params": _py(cfg.params),
        },
        "status": result.status,
        "versions": {
            "python": sys.version.split()[0],
            "numpy": version_of("numpy"),
            "scipy": version_of("scipy"),
            "shapely": version_of("shapely"),
            "scikit-image": version_of("scikit-image"),
            "jsonschema": version_of("jsonschema"),
            "artifact": version_of("artifact"),
        },
        "wall_time_seconds": wall,
    }
    (cfg.output / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def run(cfg: ExperimentConfig) -> int:
    """Execute a resolved config: dispatch, then write records, summary,
    and manifest.  Returns the process exit code."""
    start = time.perf_counter()
    result = _DISPATCH[cfg.subcommand](cfg)
    wall = time.perf_counter() - start
    _write_outputs(cfg, result, wall)
    for line in result.printed:
        print(line)
    print(f"wrote {cfg.output / 'records.jsonl'}, {cfg.output / 'summary.csv'}, {cfg.output / 'manifest.json'}")
    return 0 if result.status == "ok" else 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        cfg = resolve_config(argv)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except Exception as e:  # module errors surface verbatim as exit 1
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
