"""Command-line front end: scenario reports, the summary table and figure data.

Exit status: 0 success, 1 bad configuration, 2 I/O failure, 3 numerical
failure (non-convergence, non-finite values, degenerate geometry).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import numerics
from .complexity import VolumeRoute, complexity, complexity_closed_form, complexity_limit
from .curvature import CurvatureRoute, curvature_samples, curvature_scenario
from .efficiency import efficiency_report, geodesic_efficiency, path_length
from .errors import (
    BlochGeoError,
    ConvergenceError,
    DegenerateFieldError,
    DegenerateTrajectoryError,
    DomainError,
    EvaluationError,
    StationaryPointError,
    UnsupportedScenarioError,
)
from .model import PhaseKind, ScenarioParams, field_at
from .report import Table, write_table

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3
THREADS_ENV = "BLOCHGEO_THREADS"

# scenarios with a time-dependent phase, in the order used by the figures
MOVING = (PhaseKind.LINEAR, PhaseKind.QUADRATIC, PhaseKind.EXP_GROWTH, PhaseKind.EXP_DECAY)


class ConfigError(BlochGeoError, ValueError):
    pass


def _suffix(kind) -> str:
    return kind.value.replace("-", "_")


def _scenario(text: str) -> PhaseKind:
    try:
        return PhaseKind.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc))


# option name -> (converter, built-in default); None marks "no default"
OPTIONS: Dict[str, tuple] = {
    "scenario": (_scenario, None),
    "omega0": (float, 1.0),
    "nu0": (float, 1.0),
    "beta0": (float, 0.0),
    "samples": (int, 1001),
    "format": (str, "csv"),
    "out": (str, "-"),
    "abs_tol": (float, None),
    "rel_tol": (float, None),
    "max_subdivisions": (int, None),
    "volume_route": (str, "angles"),
    "id": (int, None),
    "points": (int, 201),
    "xi_min": (float, 1e-2),
    "xi_max": (float, 1e2),
    "spacing": (str, "log"),
}


@dataclass(frozen=True)
class RunConfig:
    scenario: PhaseKind
    omega0: float
    nu0: float
    beta0: float = 0.0
    samples: int = 1001
    output_format: str = "csv"
    output_path: str = "-"
    quadrature: Optional[numerics.QuadratureSpec] = None
    volume_route: VolumeRoute = VolumeRoute.ANGLES

    def params(self) -> ScenarioParams:
        return ScenarioParams(self.omega0, self.nu0, self.scenario, beta0=self.beta0)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def read_config_file(path: str) -> Dict[str, object]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values: Dict[str, object] = {}
    bad = []
    with open(path, encoding="utf-8") as fh:
        for number, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, raw = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in OPTIONS:
                bad.append(f"line {number}: {line!r}")
                continue
            convert = OPTIONS[key][0]
            try:
                values[key] = convert(raw.strip())
            except (ValueError, argparse.ArgumentTypeError) as exc:
                bad.append(f"line {number}: {key}: {exc}")
    if bad:
        raise ConfigError(f"invalid config file {path}: " + "; ".join(bad))
    return values


def _merge(args: argparse.Namespace) -> Dict[str, object]:
    """Flags beat the config file, which beats the built-in defaults."""
    merged = {key: default for key, (_, default) in OPTIONS.items()}
    if args.config:
        try:
            merged.update(read_config_file(args.config))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
    for key in OPTIONS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _quadrature(opts) -> Optional[numerics.QuadratureSpec]:
    overrides = {k: opts[k] for k in ("abs_tol", "rel_tol", "max_subdivisions") if opts[k] is not None}
    if not overrides:
        return None
    try:
        return numerics.QuadratureSpec(**overrides)
    except DomainError as exc:
        raise ConfigError(str(exc))


def run_config(opts) -> RunConfig:
    bad = []
    if opts["scenario"] is None:
        bad.append("scenario (required)")
    for key in ("omega0", "nu0"):
        if not (math.isfinite(opts[key]) and opts[key] > 0):
            bad.append(f"{key}={opts[key]!r} (must be > 0)")
    if not math.isfinite(opts["beta0"]):
        bad.append(f"beta0={opts['beta0']!r} (must be finite)")
    if opts["samples"] < 2:
        bad.append(f"samples={opts['samples']!r} (must be >= 2)")
    if opts["format"] not in ("csv", "json"):
        bad.append(f"format={opts['format']!r} (csv or json)")
    if opts["volume_route"] not in ("angles", "analytic"):
        bad.append(f"volume_route={opts['volume_route']!r} (angles or analytic)")
    if bad:
        raise ConfigError("invalid configuration: " + "; ".join(bad))
    return RunConfig(
        scenario=opts["scenario"],
        omega0=opts["omega0"],
        nu0=opts["nu0"],
        beta0=opts["beta0"],
        samples=opts["samples"],
        output_format=opts["format"],
        output_path=opts["out"],
        quadrature=_quadrature(opts),
        volume_route=VolumeRoute(opts["volume_route"]),
    )


def run_scenario(config: RunConfig) -> Table:
    params = config.params()
    times = params.times(config.samples)
    eff = efficiency_report(params, config.samples, config.quadrature)
    columns: Dict[str, List] = {
        "t": [float(t) for t in times],
        "delta_e": [v for _, v in eff.delta_e_samples],
        "eta_se": [v for _, v in eff.eta_se_samples],
        "spectral_norm": [v for _, v in eff.spectral_norm_samples],
    }
    for route in CurvatureRoute:
        samples = curvature_samples(params, times, (route,))
        columns["kappa2_" + _suffix(route)] = [s.kappa2 for s in samples]
    vol = complexity(params, config.samples, config.volume_route, config.quadrature)
    columns["volume"] = [v for _, v in vol.v_samples]
    meta = {
        "command": "run",
        "scenario": params.phase.value,
        "omega0": params.omega0,
        "nu0": params.nu0,
        "beta0": params.beta0,
        "samples": config.samples,
        "volume_route": config.volume_route.value,
        "t_final": params.t_final,
        "s0": eff.s0,
        "s": eff.s,
        "eta_ge": eff.eta_ge,
        "v_bar": vol.v_bar,
        "v_max": vol.v_max,
        "complexity": vol.complexity,
        "bounds": list(vol.bounds),
        "degenerate_azimuth": vol.degenerate_azimuth,
    }
    return Table(columns, meta, monotone=True)


def table1(omega0: float = 1.0, nu0: float = 1.0, samples: int = 1001) -> Table:
    rows = {
        "scenario": [],
        "eta_ge": [],
        "eta_se_is_one": [],
        "kappa2": [],
        "complexity": [],
        "complexity_dependence": [],
    }
    for kind in PhaseKind:
        params = ScenarioParams(omega0, nu0, kind)
        eff = efficiency_report(params, samples)
        unit_speed = max(abs(v - 1.0) for _, v in eff.eta_se_samples) <= 1e-12
        kappa = max(curvature_scenario(params, float(t)) for t in params.times(samples))
        c = complexity(params, samples).complexity
        # the complexity counts as constant if it survives rescaling nu0 by 2 either way
        others = [complexity(ScenarioParams(omega0, nu0 * f, kind), samples).complexity for f in (0.5, 2.0)]
        constant = all(abs(o - c) <= 1e-8 for o in others)
        rows["scenario"].append(kind.value)
        rows["eta_ge"].append(eff.eta_ge)
        rows["eta_se_is_one"].append(unit_speed)
        rows["kappa2"].append("zero" if kappa <= 1e-10 else "positive")
        rows["complexity"].append(c)
        rows["complexity_dependence"].append("constant" if constant else "non-constant")
    meta = {"command": "table1", "omega0": omega0, "nu0": nu0, "samples": samples}
    return Table(rows, meta)


def figure(fig_id: int, omega0: float = 1.0, nu0: float = 1.0, samples: int = 1001,
           points: int = 201, xi_min: float = 1e-2, xi_max: float = 1e2) -> Table:
    meta = {"command": "figure", "id": fig_id}
    if fig_id in (1, 3):
        grid = ScenarioParams(omega0, nu0, PhaseKind.LINEAR).times(samples)
        columns = {"t": [float(t) for t in grid]}
        for kind in MOVING:
            params = ScenarioParams(omega0, nu0, kind)
            if fig_id == 1:
                columns["hz_" + _suffix(kind)] = [field_at(params, float(t)).hz for t in grid]
            else:
                columns["kappa2_" + _suffix(kind)] = [curvature_scenario(params, float(t)) for t in grid]
        meta.update(omega0=omega0, nu0=nu0, samples=samples)
    elif fig_id == 4:
        xis = _grid(xi_min, xi_max, points, "log")
        columns = {
            "xi": xis,
            "c_exp_growth": [complexity_limit(PhaseKind.EXP_GROWTH, x) for x in xis],
            "c_exp_decay": [complexity_limit(PhaseKind.EXP_DECAY, x) for x in xis],
        }
        meta.update(xi_min=xi_min, xi_max=xi_max, points=points)
    else:
        raise ConfigError(f"unknown figure id {fig_id!r}; expected 1, 3 or 4")
    return Table(columns, meta, monotone=True)


def _grid(lo: float, hi: float, points: int, spacing: str) -> List[float]:
    bad = []
    if not (math.isfinite(lo) and lo > 0):
        bad.append(f"xi_min={lo!r} (must be > 0)")
    if not (math.isfinite(hi) and hi > 0):
        bad.append(f"xi_max={hi!r} (must be > 0)")
    if points < 1:
        bad.append(f"points={points!r} (must be >= 1)")
    if spacing not in ("log", "linear"):
        bad.append(f"spacing={spacing!r} (log or linear)")
    if not bad and (hi < lo or (points > 1 and hi == lo)):
        bad.append(f"xi range [{lo}, {hi}] is empty")
    if bad:
        raise ConfigError("invalid configuration: " + "; ".join(bad))
    if points == 1:
        return [float(lo)]
    if spacing == "log":
        values = np.logspace(math.log10(lo), math.log10(hi), points)
    else:
        values = np.linspace(lo, hi, points)
    values[0], values[-1] = lo, hi
    return [float(v) for v in values]


def _sweep_point(task):
    kind, omega0, xi = task
    params = ScenarioParams(omega0, xi * omega0, kind)
    vol = complexity(params, 2, VolumeRoute.ANALYTIC)
    return (
        xi,
        params.nu0,
        path_length(params),
        geodesic_efficiency(params),
        vol.v_bar,
        vol.v_max,
        vol.complexity,
        complexity_closed_form(params),
    )


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise ConfigError(f"{THREADS_ENV}={raw!r} must be a positive integer")
    return value


def sweep(kind: PhaseKind, xi_min: float, xi_max: float, points: int,
          omega0: float = 1.0, spacing: str = "log", workers: Optional[int] = None) -> Table:
    if not (math.isfinite(omega0) and omega0 > 0):
        raise ConfigError(f"invalid configuration: omega0={omega0!r} (must be > 0)")
    xis = _grid(xi_min, xi_max, points, spacing)
    tasks = [(kind, omega0, x) for x in xis]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        results = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            # map keeps the grid order regardless of completion order
            results = list(pool.map(_sweep_point, tasks))
    names = ["xi", "nu0", "s", "eta_ge", "v_bar", "v_max", "complexity", "complexity_closed_form"]
    columns = {name: [r[i] for r in results] for i, name in enumerate(names)}
    meta = {"command": "sweep", "scenario": kind.value, "omega0": omega0,
            "xi_min": xi_min, "xi_max": xi_max, "points": points, "spacing": spacing}
    return Table(columns, meta, monotone=True)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; explicit flags take precedence")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output path, '-' for stdout (default)")

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--omega0", type=float)
    params.add_argument("--nu0", type=float)

    parser = _Parser(prog="blochgeo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", parents=[common, params], help="full report for one scenario")
    run.add_argument("--scenario", type=_scenario)
    run.add_argument("--beta0", type=float)
    run.add_argument("--samples", type=int)
    run.add_argument("--abs-tol", dest="abs_tol", type=float)
    run.add_argument("--rel-tol", dest="rel_tol", type=float)
    run.add_argument("--max-subdivisions", dest="max_subdivisions", type=int)
    run.add_argument("--volume-route", dest="volume_route", choices=("angles", "analytic"))

    t1 = sub.add_parser("table1", parents=[common, params], help="summary table of all scenarios")
    t1.add_argument("--samples", type=int)

    fig = sub.add_parser("figure", parents=[common, params], help="figure data series")
    fig.add_argument("--id", type=int, choices=(1, 3, 4))
    fig.add_argument("--samples", type=int)
    fig.add_argument("--points", type=int)
    fig.add_argument("--xi-min", dest="xi_min", type=float)
    fig.add_argument("--xi-max", dest="xi_max", type=float)

    sw = sub.add_parser("sweep", parents=[common], help="efficiency and complexity over a xi grid")
    sw.add_argument("--scenario", type=_scenario)
    sw.add_argument("--omega0", type=float)
    sw.add_argument("--xi-min", dest="xi_min", type=float)
    sw.add_argument("--xi-max", dest="xi_max", type=float)
    sw.add_argument("--points", type=int)
    sw.add_argument("--spacing", choices=("log", "linear"))
    return parser


def _emit(table: Table, opts) -> None:
    fmt = opts["format"]
    if fmt not in ("csv", "json"):
        raise ConfigError(f"invalid configuration: format={fmt!r} (csv or json)")
    if opts["out"] == "-":
        write_table(table, sys.stdout, fmt)
        return
    with open(opts["out"], "w", encoding="utf-8", newline="") as fh:
        write_table(table, fh, fmt)


def _positive_params(opts) -> None:
    bad = [f"{k}={opts[k]!r} (must be > 0)" for k in ("omega0", "nu0")
           if not (math.isfinite(opts[k]) and opts[k] > 0)]
    if opts["samples"] < 2:
        bad.append(f"samples={opts['samples']!r} (must be >= 2)")
    if bad:
        raise ConfigError("invalid configuration: " + "; ".join(bad))


def dispatch(args: argparse.Namespace) -> None:
    if args.command is None:
        raise ConfigError("missing command (run, table1, figure or sweep)")
    opts = _merge(args)
    if args.command == "run":
        config = run_config(opts)
        table = run_scenario(config)
    elif args.command == "table1":
        _positive_params(opts)
        table = table1(opts["omega0"], opts["nu0"], opts["samples"])
    elif args.command == "figure":
        if opts["id"] is None:
            raise ConfigError("figure needs --id (1, 3 or 4)")
        _positive_params(opts)
        table = figure(opts["id"], opts["omega0"], opts["nu0"], opts["samples"],
                       opts["points"], opts["xi_min"], opts["xi_max"])
    elif args.command == "sweep":
        if opts["scenario"] is None:
            raise ConfigError("sweep needs --scenario")
        table = sweep(opts["scenario"], opts["xi_min"], opts["xi_max"], opts["points"],
                      opts["omega0"], opts["spacing"])
    else:
        raise ConfigError("missing command (run, table1, figure or sweep)")
    _emit(table, opts)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        dispatch(args)
    except (ConfigError, DomainError, UnsupportedScenarioError) as exc:
        print(f"blochgeo: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"blochgeo: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConvergenceError, EvaluationError, StationaryPointError,
            DegenerateFieldError, DegenerateTrajectoryError) as exc:
        print(f"blochgeo: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
