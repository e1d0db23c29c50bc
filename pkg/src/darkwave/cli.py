"""Config-driven command line: solves, sweeps, dispersion scans, validation.

Subcommands
-----------
solve         one profile at a given speed
branch        independent solves over a list of speeds (an E-P branch)
lambda-sweep  solves at fixed speed over a list of lambda values
dispersion    dispersion curve scan and Landau-speed report
validate      built-in oracle suite (pass/fail table)

Every run resolves its parameters from, in increasing precedence: built-in
defaults, an INI config file (``--config`` or a named ``--preset``), and
command-line flags.  Bundled presets reproduce the catalog experiments by
name (see ``darkwave/presets``); the ``DARKWAVE_PRESETS`` environment
variable points the preset lookup at a different directory.

Artifacts are data-only and byte-deterministic for a fixed config and
platform: per-solve profile CSVs (k,x,eta,theta,u_re,u_im), a branch CSV
(param,P,E,min_u,width,l2,h1,converged,is_trivial,iterations,final_F), a
dispersion CSV (xi,omega,omega_over_xi,what), and a run-summary JSON that
embeds the fully resolved configuration.

Exit codes: 0 all solves converged (or all checks passed), 2 otherwise,
1 on configuration errors (reported to stderr, no files written).
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .dispersion import SearchConfig, landau_speed, omega
from .grid_ops import Grid, build_convolution, build_grid
from .observables import (
    BranchEntry,
    BranchRecord,
    InsufficientBranch,
    branch_diagnostics,
    compute_observables,
)
from .potentials import Family, PotentialSpec, evaluate_fourier
from .solver import SolverOptions, SweepEntry, sweep_lambda, sweep_speeds
from .validation import run_all_checks

__all__ = ["main", "run", "ExperimentConfig", "ConfigError", "load_config"]

DEFAULT_SPEEDS = (0.1, 0.25, 0.5, 0.75, 1.0, 1.25)


class ConfigError(ValueError):
    """Unusable configuration; reported with section/field identification."""


@dataclass
class ExperimentConfig:
    """Fully resolved inputs of one run."""

    mode: str
    spec: PotentialSpec
    grid: Grid | None
    solver: SolverOptions | None
    speeds: list[float] = field(default_factory=list)
    lambdas: list[float] = field(default_factory=list)
    continuation: bool = False
    xi_max: float = 20.0
    scan_points: int = 10_000
    out_dir: Path | None = None
    formats: tuple[str, ...] = ("csv", "json")
    jobs: int = 0  # 0 -> number of available processors
    preset: str | None = None

    def resolved_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# config resolution


def preset_dir() -> Path:
    env = os.environ.get("DARKWAVE_PRESETS")
    if env:
        return Path(env)
    return Path(str(resources.files("darkwave") / "presets"))


def _parse_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None


def _parse_list(section: str, key: str, raw: str) -> list[float]:
    out = []
    for tok in raw.replace(",", " ").split():
        out.append(_parse_float(section, key, tok))
    if not out:
        raise ConfigError(f"[{section}] {key}: empty list")
    return out


def _read_ini(path: Path) -> dict:
    """Flatten an INI file into the raw-settings dictionary."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None

    raw: dict = {}
    known = {
        ("potential", "family"): str,
        ("potential", "beta"): float,
        ("potential", "lambda"): float,
        ("potential", "a"): float,
        ("potential", "b"): float,
        ("potential", "cgauss"): float,
        ("grid", "l"): float,
        ("grid", "n"): int,
        ("solver", "eps2"): "eps2",
        ("solver", "h0"): float,
        ("solver", "h_min"): float,
        ("solver", "n_max"): int,
        ("solver", "grow"): float,
        ("run", "mode"): str,
        ("run", "speed"): float,
        ("run", "speeds"): "list",
        ("run", "lambdas"): "list",
        ("run", "continuation"): "bool",
        ("run", "xi_max"): float,
        ("run", "scan_points"): int,
        ("run", "jobs"): int,
        ("output", "formats"): str,
    }
    for section in cp.sections():
        for key, value in cp.items(section):
            kind = known.get((section.lower(), key.lower()))
            if kind is None:
                raise ConfigError(f"[{section}] {key}: unknown setting")
            name = f"{section.lower()}.{key.lower()}"
            if kind is float:
                raw[name] = _parse_float(section, key, value)
            elif kind is int:
                try:
                    raw[name] = int(value)
                except ValueError:
                    raise ConfigError(
                        f"[{section}] {key}: expected an integer, got {value!r}"
                    ) from None
            elif kind == "list":
                raw[name] = _parse_list(section, key, value)
            elif kind == "bool":
                raw[name] = value.strip().lower() in ("1", "true", "yes", "on")
            elif kind == "eps2":
                raw[name] = value.strip()
            else:
                raw[name] = value.strip()
    return raw


def _resolve_eps2(raw_value, dx: float) -> float:
    """eps2 is a number or the literal 'dx/4' (resolved after the grid)."""
    if raw_value is None:
        return dx / 4.0
    if isinstance(raw_value, (int, float)):
        return float(raw_value)
    text = str(raw_value).strip().lower().replace(" ", "")
    if text == "dx/4":
        return dx / 4.0
    try:
        return float(text)
    except ValueError:
        raise ConfigError(
            f"[solver] eps2: expected a number or 'dx/4', got {raw_value!r}"
        ) from None


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge defaults, config file / preset, and flag overrides."""
    raw: dict = {}
    preset_name = getattr(args, "preset", None)
    if preset_name:
        path = preset_dir() / f"{preset_name}.ini"
        if not path.exists():
            raise ConfigError(f"preset {preset_name!r} not found under {preset_dir()}")
        raw.update(_read_ini(path))
    if getattr(args, "config", None):
        raw.update(_read_ini(Path(args.config)))

    def override(name: str, value) -> None:
        if value is not None:
            raw[name] = value

    override("potential.family", getattr(args, "potential", None))
    override("potential.beta", getattr(args, "beta", None))
    override("potential.lambda", getattr(args, "lam", None))
    override("potential.a", getattr(args, "pot_a", None))
    override("potential.b", getattr(args, "pot_b", None))
    override("potential.cgauss", getattr(args, "pot_c", None))
    override("grid.l", getattr(args, "L", None))
    override("grid.n", getattr(args, "N", None))
    override("solver.eps2", getattr(args, "eps2", None))
    override("solver.h0", getattr(args, "h0", None))
    override("solver.h_min", getattr(args, "hmin", None))
    override("solver.n_max", getattr(args, "nmax", None))
    override("solver.grow", getattr(args, "grow", None))
    override("run.jobs", getattr(args, "jobs", None))
    if getattr(args, "speed", None):
        raw["run.speeds"] = list(args.speed)
    if getattr(args, "lambdas", None):
        raw["run.lambdas"] = _parse_list("run", "lambdas", args.lambdas)
    if getattr(args, "continuation", False):
        raw["run.continuation"] = True
    override("run.xi_max", getattr(args, "xi_max", None))
    override("run.scan_points", getattr(args, "scan_points", None))
    if getattr(args, "format", None):
        raw["output.formats"] = args.format

    mode = getattr(args, "mode", None) or raw.get("run.mode")
    if mode is None:
        raise ConfigError("[run] mode: missing (or use a subcommand)")
    mode = mode.replace("_", "-")
    if mode not in ("solve", "branch", "lambda-sweep", "dispersion"):
        raise ConfigError(f"[run] mode: unknown mode {mode!r}")

    lambdas = raw.get("run.lambdas", [])
    fam_name = raw.get("potential.family")
    if fam_name is None:
        raise ConfigError("[potential] family: missing")
    try:
        family = Family(str(fam_name).lower())
    except ValueError:
        raise ConfigError(f"[potential] family: unknown family {fam_name!r}") from None
    params = {}
    if raw.get("potential.beta") is not None:
        params["beta"] = raw["potential.beta"]
    if raw.get("potential.lambda") is not None:
        params["lam"] = raw["potential.lambda"]
    elif mode == "lambda-sweep" and lambdas:
        params["lam"] = lambdas[0]  # placeholder; the sweep supplies each lambda
    if raw.get("potential.a") is not None:
        params["a"] = raw["potential.a"]
    if raw.get("potential.b") is not None:
        params["b"] = raw["potential.b"]
    if raw.get("potential.cgauss") is not None:
        params["cgauss"] = raw["potential.cgauss"]
    try:
        spec = PotentialSpec(family, **params)
    except ValueError as exc:
        raise ConfigError(f"[potential] {exc}") from None

    grid = None
    solver = None
    if mode != "dispersion":
        if raw.get("grid.l") is None or raw.get("grid.n") is None:
            raise ConfigError("[grid] L and N are required")
        try:
            grid = build_grid(float(raw["grid.l"]), int(raw["grid.n"]))
        except ValueError as exc:
            raise ConfigError(f"[grid] {exc}") from None
        try:
            solver = SolverOptions(
                eps2=_resolve_eps2(raw.get("solver.eps2"), grid.dx),
                h0=float(raw.get("solver.h0", 0.1)),
                h_min=float(raw.get("solver.h_min", 1e-13)),
                n_max=int(raw.get("solver.n_max", 2_000_000_000)),
                grow_factor=float(raw.get("solver.grow", 1.0)),
            )
        except ValueError as exc:
            raise ConfigError(f"[solver] {exc}") from None

    speeds = raw.get("run.speeds")
    if speeds is None:
        speeds = [raw["run.speed"]] if raw.get("run.speed") is not None else []
    if mode == "solve" and len(speeds) != 1:
        raise ConfigError("[run] solve mode needs exactly one --speed")
    if mode == "branch" and not speeds:
        speeds = list(DEFAULT_SPEEDS)
    if mode == "lambda-sweep":
        if not lambdas:
            raise ConfigError("[run] lambdas: required for lambda-sweep")
        if len(speeds) != 1:
            raise ConfigError("[run] lambda-sweep needs exactly one speed")

    formats = tuple(
        t.strip() for t in str(raw.get("output.formats", "csv,json")).split(",") if t.strip()
    )
    for t in formats:
        if t not in ("csv", "json"):
            raise ConfigError(f"[output] formats: unknown format {t!r}")

    out_dir = getattr(args, "out", None)
    return ExperimentConfig(
        mode=mode,
        spec=spec,
        grid=grid,
        solver=solver,
        speeds=[float(s) for s in speeds],
        lambdas=[float(v) for v in lambdas],
        continuation=bool(raw.get("run.continuation", False)),
        xi_max=float(raw.get("run.xi_max", 20.0)),
        scan_points=int(raw.get("run.scan_points", 10_000)),
        out_dir=Path(out_dir) if out_dir else None,
        formats=formats,
        jobs=int(raw.get("run.jobs", 0)),
        preset=preset_name,
    )


# ---------------------------------------------------------------------------
# artifact writers


def _fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _write_profile(path: Path, grid: Grid, eta: np.ndarray, obs) -> None:
    lines = ["k,x,eta,theta,u_re,u_im"]
    for i in range(grid.N):
        lines.append(
            f"{i + 1},{_fmt(grid.nodes[i])},{_fmt(eta[i])},{_fmt(obs.theta[i])},"
            f"{_fmt(obs.u_re[i])},{_fmt(obs.u_im[i])}"
        )
    path.write_text("\n".join(lines) + "\n")


def _write_branch_csv(path: Path, rows: list[dict]) -> None:
    header = "param,P,E,min_u,width,l2,h1,converged,is_trivial,iterations,final_F"
    lines = [header]
    for r in rows:
        lines.append(
            ",".join(
                [
                    _fmt(r["param"]),
                    _fmt(r.get("P", float("nan"))),
                    _fmt(r.get("E", float("nan"))),
                    _fmt(r.get("min_u", float("nan"))),
                    _fmt(r.get("width", float("nan"))),
                    _fmt(r.get("l2", float("nan"))),
                    _fmt(r.get("h1", float("nan"))),
                    str(bool(r.get("converged", False))).lower(),
                    str(bool(r.get("is_trivial", False))).lower(),
                    str(int(r.get("iterations", 0))),
                    _fmt(r.get("final_F", float("nan"))),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n")


def _spec_dict(spec: PotentialSpec) -> dict:
    d = {"family": spec.family.value}
    for name in ("beta", "lam", "a", "b", "cgauss"):
        value = getattr(spec, name)
        if value is not None:
            d[name] = value
    return d


def _config_dict(cfg: ExperimentConfig) -> dict:
    out = {
        "version": __version__,
        "mode": cfg.mode,
        "preset": cfg.preset,
        "potential": _spec_dict(cfg.spec),
        "speeds": cfg.speeds,
        "lambdas": cfg.lambdas,
        "continuation": cfg.continuation,
        "formats": list(cfg.formats),
    }
    if cfg.grid is not None:
        out["grid"] = {"L": cfg.grid.L, "N": cfg.grid.N, "dx": cfg.grid.dx}
    if cfg.solver is not None:
        out["solver"] = {
            "eps2": cfg.solver.eps2,
            "h0": cfg.solver.h0,
            "h_min": cfg.solver.h_min,
            "n_max": cfg.solver.n_max,
            "grow_factor": cfg.solver.grow_factor,
        }
    return out


def _json_default(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    )


# ---------------------------------------------------------------------------
# run modes


def _sweep_artifacts(cfg: ExperimentConfig, entries: list[SweepEntry],
                     param_name: str) -> int:
    conv = None
    if param_name == "c":
        conv = build_convolution(cfg.spec, cfg.grid)
    rows: list[dict] = []
    summaries: list[dict] = []
    branch_entries: list[BranchEntry] = []
    any_bad = False
    for e in entries:
        info: dict = {"param": e.param}
        if not e.ok:
            any_bad = True
            info.update({"error": e.error, "converged": False})
            rows.append({"param": e.param, "converged": False})
            summaries.append(info)
            continue
        r = e.result
        if param_name == "lambda":
            # the interaction energy needs this entry's own operator
            fixed = {"beta": cfg.spec.beta} if cfg.spec.beta is not None else {}
            entry_spec = PotentialSpec(cfg.spec.family, lam=e.param, **fixed)
            entry_conv = build_convolution(entry_spec, cfg.grid)
            speed = cfg.speeds[0]
        else:
            entry_conv = conv
            speed = e.param
        obs = compute_observables(cfg.grid, entry_conv, r.eta, speed)
        branch_entries.append(
            BranchEntry(
                parameter=e.param,
                observables=obs,
                converged=r.converged,
                is_trivial=r.is_trivial,
                iterations=r.iterations,
                final_objective=r.final_objective,
            )
        )
        if not r.converged:
            any_bad = True
        row = {
            "param": e.param,
            "P": obs.momentum,
            "E": obs.energy,
            "min_u": obs.min_modulus,
            "width": obs.width,
            "l2": obs.l2_norm,
            "h1": obs.h1_norm,
            "converged": r.converged,
            "is_trivial": r.is_trivial,
            "iterations": r.iterations,
            "final_F": r.final_objective,
        }
        rows.append(row)
        info.update(row)
        info["termination"] = r.termination.value
        summaries.append(info)
        if cfg.out_dir and "csv" in cfg.formats:
            name = f"profile_{param_name}{e.param:g}.csv"
            _write_profile(cfg.out_dir / name, cfg.grid, r.eta, obs)

    diagnostics = None
    if param_name == "c":
        try:
            d = branch_diagnostics(BranchRecord(branch_entries))
            diagnostics = {
                "p_strictly_decreasing": d.p_strictly_decreasing,
                "e_concave_in_p": d.e_concave_in_p,
                "slopes": [
                    {"mid_speed": m, "dE_dP": s, "rel_err": r}
                    for (m, s, r) in d.slopes
                ],
            }
        except InsufficientBranch:
            diagnostics = None

    if cfg.out_dir:
        if "csv" in cfg.formats and cfg.mode != "solve":
            _write_branch_csv(cfg.out_dir / "branch.csv", rows)
        if "json" in cfg.formats:
            _write_json(
                cfg.out_dir / "summary.json",
                {
                    "config": _config_dict(cfg),
                    "results": summaries,
                    "diagnostics": diagnostics,
                },
            )
    return 2 if any_bad else 0


def _run_solve_modes(cfg: ExperimentConfig) -> int:
    if cfg.mode in ("solve", "branch"):
        entries = sweep_speeds(cfg.spec, cfg.grid, cfg.solver, cfg.speeds,
                               jobs=cfg.resolved_jobs())
        return _sweep_artifacts(cfg, entries, "c")
    # lambda-sweep
    fixed = {}
    if cfg.spec.beta is not None:
        fixed["beta"] = cfg.spec.beta
    entries = sweep_lambda(
        cfg.spec.family, fixed, cfg.speeds[0], cfg.grid, cfg.solver,
        cfg.lambdas, continuation=cfg.continuation, jobs=cfg.resolved_jobs(),
    )
    return _sweep_artifacts(cfg, entries, "lambda")


def _run_dispersion(cfg: ExperimentConfig) -> int:
    search = SearchConfig(xi_max=cfg.xi_max, num_points=cfg.scan_points)
    report = landau_speed(cfg.spec, search)
    xi = np.linspace(search.xi_min, search.xi_max, search.num_points)
    w = np.asarray(evaluate_fourier(cfg.spec, xi))
    om = omega(cfg.spec, xi)
    if cfg.out_dir and "csv" in cfg.formats:
        lines = ["xi,omega,omega_over_xi,what"]
        for i in range(xi.size):
            lines.append(
                f"{_fmt(xi[i])},{_fmt(om[i])},{_fmt(om[i] / xi[i])},{_fmt(w[i])}"
            )
        (cfg.out_dir / "dispersion.csv").write_text("\n".join(lines) + "\n")
    payload = {
        "config": _config_dict(cfg),
        "report": {
            "sonic_speed": report.sonic_speed,
            "landau_speed": report.landau_speed,
            "sigma": report.sigma,
            "roton_xi": report.roton_xi,
            "has_roton": report.has_roton,
        },
    }
    if cfg.out_dir and "json" in cfg.formats:
        _write_json(cfg.out_dir / "summary.json", payload)
    print(json.dumps(payload["report"], indent=2, sort_keys=True))
    return 0


def run(cfg: ExperimentConfig) -> int:
    """Execute a resolved configuration; returns the process exit code."""
    if cfg.out_dir:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.mode == "dispersion":
        return _run_dispersion(cfg)
    return _run_solve_modes(cfg)


def run_validate() -> int:
    results = run_all_checks()
    for r in results:
        print(r.line())
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return 0 if n_fail == 0 else 2


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--preset", help="named preset config (see darkwave/presets)")
    sp.add_argument("--config", help="path to an INI config file")
    sp.add_argument("--potential", choices=[f.value for f in Family], help="potential family")
    sp.add_argument("--beta", type=float, help="E1 decay rate beta")
    sp.add_argument("--lambda", dest="lam", type=float, help="family parameter lambda")
    sp.add_argument("--pot-a", dest="pot_a", type=float, help="E6 parameter a")
    sp.add_argument("--pot-b", dest="pot_b", type=float, help="E6 parameter b")
    sp.add_argument("--pot-c", dest="pot_c", type=float,
                    help="E6 Gaussian exponent (named cgauss internally)")
    sp.add_argument("--L", type=float, help="domain length")
    sp.add_argument("--N", type=int, help="number of interior nodes (odd)")
    sp.add_argument("--eps2", help="descent tolerance on F: a number or 'dx/4'")
    sp.add_argument("--h0", type=float, help="initial step size")
    sp.add_argument("--hmin", type=float, help="step underflow threshold")
    sp.add_argument("--nmax", type=int, help="iteration cap")
    sp.add_argument("--grow", type=float, help="step growth factor on acceptance (>= 1)")
    sp.add_argument("--out", help="output directory for artifacts")
    sp.add_argument("--format", help="comma-separated output formats (csv,json)")
    sp.add_argument("--jobs", type=int, help="worker processes for sweeps (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="darkwave",
        description="dark solitons of the 1D nonlocal Gross-Pitaevskii equation",
    )
    ap.add_argument("--version", action="version", version=f"darkwave {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="compute one profile at a given speed")
    _add_common(sp)
    sp.add_argument("--speed", type=float, action="append", help="wave speed c")
    sp.set_defaults(mode="solve")

    sp = sub.add_parser("branch", help="sweep speeds and emit E-P branch data")
    _add_common(sp)
    sp.add_argument("--speed", type=float, action="append",
                    help="wave speed (repeatable)")
    sp.set_defaults(mode="branch")

    sp = sub.add_parser("lambda-sweep", help="sweep the potential parameter at fixed speed")
    _add_common(sp)
    sp.add_argument("--speed", type=float, action="append", help="wave speed c")
    sp.add_argument("--lambdas", help="comma-separated lambda values")
    sp.add_argument("--continuation", action="store_true",
                    help="warm-start each solve from the previous lambda")
    sp.set_defaults(mode="lambda-sweep")

    sp = sub.add_parser("dispersion", help="dispersion curve and Landau speed")
    _add_common(sp)
    sp.add_argument("--xi-max", dest="xi_max", type=float, help="scan upper bound")
    sp.add_argument("--points", dest="scan_points", type=int, help="scan resolution")
    sp.set_defaults(mode="dispersion")

    sp = sub.add_parser("validate", help="run the built-in oracle suite")
    sp.set_defaults(mode="validate")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.mode == "validate":
        return run_validate()
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
