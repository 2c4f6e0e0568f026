"""Command-line front end: ``dk-green <command> [options]``.

Commands: spectrum, green, map, effpot, oracle-compare, verify-all.
CSV output starts with the line ``# dk-green schema v1``.  Errors go to
stderr as one JSON object; the exit status is 0 on success, 1 for domain
errors, 2 for bad configuration and 3 when ``verify-all`` finds a violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import __version__
from .config import GridSpec, RunConfig, Tolerances
from .coulomb_chain import CoulombSystem, parameter_map
from .dk_transform import MAPS, effective_potential
from .errors import ConfigError, DKGreenError
from .green_amplitude import (
    bound_spectrum,
    closed_form_level,
    coulomb_kernel,
    dk_identity_check,
    solve_level,
)
from .kg_oracle import GreenOracle, RadialProblem, oracle_level

SCHEMA_LINE = "# dk-green schema v1"
COMMANDS = ("spectrum", "green", "map", "effpot", "oracle-compare", "verify-all")
HBAR_C_EV_FM = 197.3269804e6
ELECTRON_MASS_EV = 510998.95
FINE_STRUCTURE = 7.2973525693e-3
PARALLEL_THRESHOLD = 64


@dataclass
class ExitReport:
    status: int
    text: str = ""
    error: dict | None = None


# ---------------------------------------------------------------- formatting


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _render(columns: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(columns, r)) for r in rows], indent=2) + "\n"
    if fmt == "table":
        cells = [columns] + [[_fmt(v) for v in r] for r in rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
        return "".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) + "\n" for row in cells)
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".dk-green-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- system input


def _energy_ratio(sysargs: dict) -> float | None:
    if sysargs.get("epsilon") is not None:
        if sysargs.get("energy") is not None:
            raise ConfigError("give either --epsilon or --energy, not both", "energy")
        return float(sysargs["epsilon"])
    if sysargs.get("energy") is None:
        return None
    unit = sysargs.get("energy_unit") or "mc2"
    energy = float(sysargs["energy"])
    scale = {"mc2": 1.0, "eV": 1.0, "keV": 1e3, "MeV": 1e6}
    if unit not in scale:
        raise ConfigError(f"unknown energy unit {unit!r}", "energy-unit")
    if unit == "mc2":
        return energy
    return energy * scale[unit] / float(sysargs.get("mass_ev") or ELECTRON_MASS_EV)


def build_system(sysargs: dict, need_energy: bool = True, default_epsilon=None) -> CoulombSystem:
    eps = _energy_ratio(sysargs)
    if eps is None:
        if need_energy and default_epsilon is None:
            raise ConfigError("this command needs --epsilon or --energy", "epsilon")
        eps = default_epsilon if default_epsilon is not None else 0.0
    return CoulombSystem(
        energy_ratio=eps,
        coupling=float(sysargs.get("alpha", FINE_STRUCTURE)),
        l=int(sysargs.get("l", 0)),
        dim=int(sysargs.get("dim", 3)),
    )


def _length_scale(sysargs: dict) -> float:
    """Factor converting user radii to natural units."""
    unit = sysargs.get("length_unit") or "natural"
    if unit == "natural":
        return 1.0
    if unit == "fm":
        return float(sysargs.get("mass_ev") or ELECTRON_MASS_EV) / HBAR_C_EV_FM
    raise ConfigError(f"unknown length unit {unit!r}", "length-unit")


def _radii(cfg: RunConfig, default: GridSpec) -> list[float]:
    if "rb" in cfg.options and cfg.options["rb"] is not None:
        if cfg.options.get("ra") is None:
            raise ConfigError("--rb needs --ra", "ra")
        return [float(cfg.options["rb"]), float(cfg.options["ra"])]
    return (cfg.grid or default).points()


def _pairs(cfg: RunConfig, default: GridSpec) -> list[tuple[float, float]]:
    if cfg.options.get("rb") is not None:
        rb, ra = _radii(cfg, default)
        return [(rb, ra)]
    pts = _radii(cfg, default)
    return [(pts[i], pts[j]) for i in range(len(pts)) for j in range(i + 1)]


# ---------------------------------------------------------------- fan-out workers


def _green_task(args):
    system, rb, ra = args
    return coulomb_kernel(system, rb, ra)


def _dk_task(args):
    system, rb, ra = args
    return dk_identity_check(system, max(rb, ra), min(rb, ra)).rel_deviation


def _fan_out(fn, tasks: list, jobs: int) -> list:
    if jobs == 0:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(tasks) < PARALLEL_THRESHOLD:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order
        return list(pool.map(fn, tasks, chunksize=chunk))


# ---------------------------------------------------------------- commands


DEFAULT_R_GRID = GridSpec(0.05, 50.0, 10, "log")


def cmd_spectrum(cfg: RunConfig) -> str:
    c = build_system(cfg.system, need_energy=False)
    nmax = int(cfg.options.get("nmax", 3))
    rows = [[e.n_r, e.principal_combination, e.energy_ratio, e.binding] for e in bound_spectrum(c, nmax)]
    return _render(["n_r", "N", "epsilon_n", "binding"], rows, cfg.output_format)


def cmd_green(cfg: RunConfig) -> str:
    c = build_system(cfg.system)
    scale = _length_scale(cfg.system)
    pairs = _pairs(cfg, DEFAULT_R_GRID)
    tasks = [(c, rb * scale, ra * scale) for rb, ra in pairs]
    values = _fan_out(_green_task, tasks, cfg.options.get("jobs", 1))
    rows = [[rb, ra, g] for (rb, ra), g in zip(pairs, values)]
    return _render(["r_b", "r_a", "green"], rows, cfg.output_format)


def cmd_map(cfg: RunConfig) -> str:
    c = build_system(cfg.system)
    data = {"schema": "dk-green map v1", **parameter_map(c)}
    if cfg.output_format == "json":
        return json.dumps(data, indent=2) + "\n"
    rows = [
        [f"{section}.{key}", value]
        for section in ("coulomb", "morse", "oscillator")
        for key, value in data[section].items()
    ]
    return _render(["parameter", "value"], rows, cfg.output_format)


def _effpot_analytic(name: str, q: float, rho: float, mass: float) -> float:
    if name == "identity":
        return 0.0
    if name == "exp":
        return rho / (8.0 * mass)
    return -rho / (8.0 * mass * q * q)


def _effpot_rows(name: str, qs, rho: float, mass: float) -> list[list]:
    t = MAPS[name]()
    rows = []
    for q in qs:
        v = effective_potential(t, q, rho=rho, mass=mass)
        ref = _effpot_analytic(name, q, rho, mass)
        dev = abs(v - ref) / abs(ref) if ref else abs(v)
        rows.append([q, v, ref, dev])
    return rows


def cmd_effpot(cfg: RunConfig) -> str:
    name = cfg.options.get("map") or "exp"
    if name not in MAPS:
        raise ConfigError(f"unknown map {name!r}; choose from {sorted(MAPS)}", "map")
    if cfg.options.get("q_points") is not None:
        qs = list(cfg.options["q_points"])
    elif cfg.grid is not None:
        qs = cfg.grid.points()
    elif name == "log":
        qs = GridSpec(0.1, 10.0, 100, "log").points()
    else:
        qs = _linspace(-3.0, 3.0, 100)
    rows = _effpot_rows(name, qs, float(cfg.options.get("rho", 1.0)), float(cfg.options.get("mass", 1.0)))
    return _render(["q", "v_eff", "v_analytic", "rel_dev"], rows, cfg.output_format)


def _linspace(a, b, n):
    return [a + (b - a) * i / (n - 1) for i in range(n)]


def _oracle_rows(c: CoulombSystem, pairs, scale: float = 1.0) -> list[list]:
    rs = [r * scale for pair in pairs for r in pair]
    oracle = GreenOracle(RadialProblem(c), min(rs), max(rs))
    rows = []
    for rb, ra in pairs:
        closed = coulomb_kernel(c, rb * scale, ra * scale)
        orc = oracle(rb * scale, ra * scale)
        ratio = orc / closed
        rows.append([rb, ra, closed, orc, ratio, abs(ratio - 1.0)])
    return rows


def cmd_oracle_compare(cfg: RunConfig) -> str:
    c = build_system(cfg.system)
    rows = _oracle_rows(c, _pairs(cfg, DEFAULT_R_GRID), _length_scale(cfg.system))
    return _render(["r_b", "r_a", "closed_form", "oracle", "ratio", "rel_dev"], rows, cfg.output_format)


def verify_all(cfg: RunConfig) -> tuple[list[list], bool]:
    tol = cfg.tolerances
    c = build_system(cfg.system, default_epsilon=0.9)
    rows = []

    dk_pts = GridSpec(0.05, 50.0, 20, "log").points()
    dk_tasks = [(c, rb, ra) for rb in dk_pts for ra in dk_pts]
    dk_dev = max(_fan_out(_dk_task, dk_tasks, cfg.options.get("jobs", 1)))
    rows.append(["dk_identity", dk_dev, tol.dk_identity, dk_dev <= tol.dk_identity])

    or_pts = GridSpec(0.05, 50.0, 10, "log").points()
    pairs = [(max(a, b), min(a, b)) for a in or_pts for b in or_pts]
    or_dev = max(r[5] for r in _oracle_rows(c, pairs))
    rows.append(["oracle_green", or_dev, tol.oracle, or_dev <= tol.oracle])

    nmax = int(cfg.options.get("nmax", 3))
    spec_dev = max(
        abs(solve_level(c, n) - closed_form_level(c, n).energy_ratio) for n in range(nmax + 1)
    )
    rows.append(["spectrum_bisection", spec_dev, tol.spectrum, spec_dev <= tol.spectrum])

    lvl_dev = 0.0
    for n in range(min(nmax, 2) + 1):
        e = closed_form_level(c, n).energy_ratio
        lo = 0.5 * (e + (closed_form_level(c, n - 1).energy_ratio if n else 0.0))
        hi = 0.5 * (e + closed_form_level(c, n + 1).energy_ratio)
        lvl_dev = max(lvl_dev, abs(oracle_level(c, lo, hi, xtol=1e-13, rtol=1e-10) - e))
    rows.append(["spectrum_oracle", lvl_dev, tol.oracle_level, lvl_dev <= tol.oracle_level])

    eff_dev = max(
        max(r[3] for r in _effpot_rows("exp", _linspace(-3.0, 3.0, 100), 1.0, 1.0)),
        max(r[3] for r in _effpot_rows("log", GridSpec(0.1, 10.0, 100).points(), 1.0, 1.0)),
    )
    rows.append(["effective_potential", eff_dev, tol.effpot, eff_dev <= tol.effpot])
    return rows, all(r[3] for r in rows)


def cmd_verify_all(cfg: RunConfig) -> tuple[str, bool]:
    rows, ok = verify_all(cfg)
    return _render(["check", "max_deviation", "tolerance", "passed"], rows, cfg.output_format), ok


HANDLERS = {
    "spectrum": cmd_spectrum,
    "green": cmd_green,
    "map": cmd_map,
    "effpot": cmd_effpot,
    "oracle-compare": cmd_oracle_compare,
}


def run(config: RunConfig) -> ExitReport:
    """Execute one command; never raises for domain or configuration errors."""
    try:
        if config.command not in COMMANDS:
            raise ConfigError(f"unknown command {config.command!r}", "command")
        if config.output_format not in ("csv", "json", "table"):
            raise ConfigError(f"unknown format {config.output_format!r}", "format")
        ok = True
        if config.command == "verify-all":
            text, ok = cmd_verify_all(config)
        else:
            text = HANDLERS[config.command](config)
        if config.output_path:
            write_atomic(config.output_path, text)
        return ExitReport(0 if ok else 3, text)
    except ConfigError as exc:
        return ExitReport(2, error=exc.to_dict())
    except DKGreenError as exc:
        return ExitReport(1, error=exc.to_dict())
    except (ValueError, ArithmeticError, OSError) as exc:
        return ExitReport(1, error={"error": type(exc).__name__, "message": str(exc)})


# ---------------------------------------------------------------- argv parsing


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("system")
    g.add_argument("--alpha", type=float, default=None, help="fine-structure coupling (default 7.2973525693e-3)")
    g.add_argument("--l", type=int, default=None, help="angular momentum (default 0)")
    g.add_argument("--dim", type=int, default=None, help="spatial dimension D_C (default 3)")
    g.add_argument("--epsilon", type=float, default=None, help="energy ratio E/(m c^2)")
    g.add_argument("--energy", type=float, default=None, help="energy, with --energy-unit")
    g.add_argument("--energy-unit", choices=["mc2", "eV", "keV", "MeV"], default=None)
    g.add_argument("--mass-ev", type=float, default=None, help="rest energy m c^2 in eV (default electron)")
    g.add_argument("--length-unit", choices=["natural", "fm"], default=None)
    g.add_argument("--from-json", default=None, help="read the system from `map --format json` output")
    r = common.add_argument_group("grid")
    r.add_argument("--rb", type=float, default=None)
    r.add_argument("--ra", type=float, default=None)
    r.add_argument("--rmin", type=float, default=None)
    r.add_argument("--rmax", type=float, default=None)
    r.add_argument("--count", type=int, default=None)
    r.add_argument("--scale", choices=["log", "linear"], default=None)
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=["csv", "json", "table"], default=None)
    o.add_argument("--output", "-o", default=None, help="write here (atomically) instead of stdout")
    o.add_argument("--jobs", type=int, default=1, help="worker processes for grids (0 = all cores)")
    t = common.add_argument_group("tolerances (also DKGREEN_TOL_<NAME> env vars)")
    for name in ("dk_identity", "oracle", "spectrum", "oracle_level", "effpot"):
        t.add_argument(f"--tol-{name.replace('_', '-')}", dest=f"tol_{name}", type=float, default=None)

    p = argparse.ArgumentParser(prog="dk-green", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"dk-green {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("spectrum", parents=[common], help="bound levels from the Gamma poles")
    s.add_argument("--nmax", type=int, default=3)
    sub.add_parser("green", parents=[common], help="closed-form radial amplitude on a grid")
    sub.add_parser("map", parents=[common], help="Coulomb -> Morse -> oscillator parameters")
    e = sub.add_parser("effpot", parents=[common], help="effective potential of a transformation")
    e.add_argument("--map", dest="map_name", choices=sorted(MAPS), default="exp")
    e.add_argument("--rho", type=float, default=1.0)
    e.add_argument("--mass", type=float, default=1.0)
    e.add_argument("--qmin", type=float, default=None)
    e.add_argument("--qmax", type=float, default=None)
    sub.add_parser("oracle-compare", parents=[common], help="closed form vs ODE resolvent")
    v = sub.add_parser("verify-all", parents=[common], help="run every identity check")
    v.add_argument("--nmax", type=int, default=3)
    return p


def _system_from_json(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
        coul = data["coulomb"]
        return {"epsilon": coul["epsilon"], "alpha": coul["alpha"], "l": coul["l"], "dim": coul["dim"]}
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read system from {path}: {exc}", "from-json")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    system = {}
    if ns.from_json:
        system.update(_system_from_json(ns.from_json))
    for key in ("alpha", "l", "dim", "epsilon", "energy", "energy_unit", "mass_ev", "length_unit"):
        val = getattr(ns, key)
        if val is not None:
            system[key] = val
    system.setdefault("alpha", FINE_STRUCTURE)
    options = {"jobs": ns.jobs, "rb": ns.rb, "ra": ns.ra}
    for key in ("nmax", "rho", "mass"):
        if hasattr(ns, key):
            options[key] = getattr(ns, key)
    if hasattr(ns, "map_name"):
        options["map"] = ns.map_name

    grid = None
    lo = ns.rmin if ns.rmin is not None else getattr(ns, "qmin", None)
    hi = ns.rmax if ns.rmax is not None else getattr(ns, "qmax", None)
    if lo is not None or hi is not None or ns.count is not None:
        if ns.command == "effpot" and options.get("map") != "log" and lo is not None and lo <= 0:
            # linear q grids may cross zero for the identity / exponential maps
            count = ns.count or 100
            options["q_points"] = _linspace(lo, hi if hi is not None else 3.0, count)
        else:
            grid = GridSpec(
                lo if lo is not None else 0.05,
                hi if hi is not None else 50.0,
                ns.count or 10,
                ns.scale or "log",
            )
    tolerances = Tolerances.from_env(
        **{name: getattr(ns, f"tol_{name}") for name in ("dk_identity", "oracle", "spectrum", "oracle_level", "effpot")}
    )
    return RunConfig(ns.command, system, grid, ns.format or "csv", ns.output, tolerances, options)


def main(argv=None) -> int:
    parser = _parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except DKGreenError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return 2
    report = run(cfg)
    if report.error is not None:
        sys.stderr.write(json.dumps(report.error, sort_keys=True) + "\n")
    elif not cfg.output_path:
        sys.stdout.write(report.text)
    return report.status


if __name__ == "__main__":
    sys.exit(main())
