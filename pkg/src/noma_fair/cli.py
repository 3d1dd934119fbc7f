"""Command-line interface: single-pair analysis, sweeps, and campaigns.

SINRs cross this boundary in dB and are converted to linear ratios
immediately; every file the tool writes carries dB only in the dedicated
gamma columns.  All randomness flows from --seed; no wall clock or other
ambient entropy enters any code path, so identical invocations produce
byte-identical artifacts and --threads never changes output content.

Exit codes: 0 success, 2 usage or config error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .allocator import DecisionMode, solve_optimal, solve_suboptimal
from .bounds import allocation_bounds, pairing_criterion
from .fairness import FairnessConfig, alpha_throughput, utility
from .netsim import NetworkConfig, PathlossModel, Strategy, run_campaign
from .rates import AllocationSource, PairLink, db_to_linear, noma_rates, oma_rate
from .report import (
    BETA_STAR_TOKEN,
    emit_campaign_csv,
    emit_campaign_json,
    emit_delta_sweep,
)

__all__ = ["main", "build_parser", "parse_config_file", "ConfigError"]

THREADS_ENV_VAR = "NOMA_FAIR_THREADS"


class ConfigError(ValueError):
    """Malformed or unknown content in a config file."""


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _beta_list(text: str) -> list:
    """Comma list of betas; entries may be the beta_star token."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        out.append(part if part == BETA_STAR_TOKEN else float(part))
    return out


def _strategy_list(text: str) -> list[Strategy]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(Strategy(part))
        except ValueError:
            valid = ", ".join(s.value for s in Strategy)
            raise ValueError(f"unknown strategy {part!r}; valid: {valid}") from None
    return out


# Config file schema: flat `key = value` lines, `#` comments.  Values are
# scalars or comma-separated lists as noted.  README documents the schema.
_CONFIG_SCHEMA = {
    "bs_density": float,
    "user_density": float,
    "area_km2": float,
    "tx_power_dbm": float,
    "noise_power_dbm": float,
    "pathloss_model": str,
    "pathloss_intercept_db": float,
    "pathloss_slope_db": float,
    "pathloss_min_distance_km": float,
    "fading_scale": float,
    "trials": int,
    "seed": int,
    "alphas": _float_list,
    "betas": _float_list,
    "strategies": _strategy_list,
    "tau": float,
    "solver_tol": float,
    "threads": int,
    "version": str,  # informational, accepted on re-parse of a manifest
}

_DEFAULT_STRATEGIES = tuple(Strategy)


def parse_config_file(path) -> dict:
    """Parse a flat key-value config file against the documented schema.

    Raises :class:`ConfigError` naming the offending key and line for any
    unknown key, malformed line, or unconvertible value.
    """
    resolved = {}
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_SCHEMA:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            resolved[key] = _CONFIG_SCHEMA[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    return resolved


def _resolve_threads(flag_value: Optional[int]) -> int:
    if flag_value is not None:
        return max(1, flag_value)
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValueError(f"bad {THREADS_ENV_VAR} value {env!r}") from exc
    return os.cpu_count() or 1


def _format_config_value(value) -> str:
    if isinstance(value, (list, tuple)):
        return ",".join(_format_config_value(v) for v in value)
    if isinstance(value, Strategy):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_manifest(path, settings: dict, artifacts: Sequence[str], command: str) -> None:
    """Key-value manifest; re-running the recorded command from it reproduces
    the artifacts byte-exactly."""
    lines = [
        "# noma-fair run manifest",
        f"# reproduce: {command}",
        f"# artifacts: {' '.join(artifacts)}",
        f"version = {__version__}",
    ]
    for key in sorted(settings):
        lines.append(f"{key} = {_format_config_value(settings[key])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noma-fair",
        description=(
            "Alpha-fair power allocation for 2-user downlink NOMA pairs under "
            "imperfect SIC, with a Monte Carlo cellular campaign runner."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pair = sub.add_parser("pair", help="analyze a single strong/weak pair")
    pair.add_argument("--gamma-s-db", type=float, required=True, help="strong user SINR in dB")
    pair.add_argument("--gamma-w-db", type=float, required=True, help="weak user SINR in dB")
    pair.add_argument("--beta", type=float, required=True, help="SIC imperfection in [0, 1]")
    pair.add_argument("--alpha", type=float, required=True, help="fairness exponent >= 0")
    pair.add_argument("--tau", type=float, default=0.5, help="sub-optimal ratio threshold")
    pair.add_argument("--solver", choices=["optimal", "suboptimal"], default="optimal")
    pair.add_argument("--solver-tol", type=float, default=1e-9)
    pair.add_argument("--json", type=Path, default=None, help="also write the report as JSON")

    sweep = sub.add_parser("sweep", help="sweep one axis and emit power-split rows")
    sweep.add_argument("--axis", choices=["alpha", "beta", "gamma-s", "gamma-w"], required=True)
    sweep.add_argument(
        "--values",
        required=True,
        help="comma list of axis values; beta axis accepts the literal beta_star",
    )
    sweep.add_argument("--alphas", default="1", help="fixed alpha grid when axis != alpha")
    sweep.add_argument(
        "--betas",
        default="0",
        help="fixed beta grid when axis != beta (beta_star accepted)",
    )
    sweep.add_argument("--gamma-s-db", type=float, default=None)
    sweep.add_argument("--gamma-w-db", type=float, default=None)
    sweep.add_argument("--tau", type=float, default=0.5)
    sweep.add_argument("--solver", choices=["optimal", "suboptimal"], default="optimal")
    sweep.add_argument("--solver-tol", type=float, default=1e-9)
    sweep.add_argument("--out", type=Path, required=True, help="output base path (writes .csv/.json)")

    sim = sub.add_parser("simulate", help="run a Monte Carlo network campaign")
    sim.add_argument("--config", type=Path, default=None, help="key-value config file")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--trials", type=int, default=None)
    sim.add_argument("--strategies", type=str, default=None, help="comma list of strategies")
    sim.add_argument("--alphas", type=str, default=None, help="comma list of alpha sweep values")
    sim.add_argument("--betas", type=str, default=None, help="comma list of beta sweep values")
    sim.add_argument("--threads", type=int, default=None, help=f"default: {THREADS_ENV_VAR} or machine parallelism")
    sim.add_argument("--out-dir", type=Path, required=True)
    return parser


def _pair_report(args) -> dict:
    gamma_s = db_to_linear(args.gamma_s_db)
    gamma_w = db_to_linear(args.gamma_w_db)
    if gamma_s < gamma_w:
        raise ValueError("--gamma-s-db must be at least --gamma-w-db")
    link = PairLink(gamma_s=gamma_s, gamma_w=gamma_w, beta=args.beta)
    cfg = FairnessConfig(alpha=args.alpha, tau=args.tau, solver_tol=args.solver_tol)
    solve = solve_optimal if args.solver == "optimal" else solve_suboptimal
    decision = solve(link, cfg)
    crit = pairing_criterion(gamma_s, gamma_w)
    bounds = allocation_bounds(link)
    r_s_oma, r_w_oma = oma_rate(gamma_s), oma_rate(gamma_w)
    report = {
        "gamma_s_db": args.gamma_s_db,
        "gamma_w_db": args.gamma_w_db,
        "beta": args.beta,
        "alpha": args.alpha,
        "tau": args.tau,
        "solver": args.solver,
        "delta_lb": bounds.delta_lb,
        "delta_ub": bounds.delta_ub,
        "msd_threshold": crit.msd_threshold,
        "msd_satisfied": crit.satisfied,
        "beta_star": crit.beta_star,
        "mode": decision.mode.value,
        "rate_strong_oma": r_s_oma,
        "rate_weak_oma": r_w_oma,
    }
    if decision.mode is DecisionMode.NOMA_PAIRED:
        r_s, r_w = noma_rates(link, decision.allocation)
        report.update(
            delta_s=decision.allocation.delta_s,
            rate_strong_noma=r_s,
            rate_weak_noma=r_w,
            utility_sum=decision.objective,
            t_alpha=alpha_throughput(r_s, r_w, args.alpha),
        )
    else:
        # Both users are served OMA; report the fairness metric they achieve.
        report.update(
            utility_sum=float(utility(r_s_oma, args.alpha) + utility(r_w_oma, args.alpha)),
            t_alpha=alpha_throughput(r_s_oma, r_w_oma, args.alpha),
        )
    return report


def _cmd_pair(args) -> int:
    report = _pair_report(args)
    for key, value in report.items():
        if isinstance(value, float):
            print(f"{key:>18}: {value:.9g}")
        else:
            print(f"{key:>18}: {value}")
    if args.json is not None:
        args.json.parent.mkdir(parents=True, exist_ok=True)
        args.json.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_sweep(args) -> int:
    if args.axis == "beta":
        axis_values = _beta_list(args.values)
    else:
        axis_values = _float_list(args.values)
    if not axis_values:
        raise ValueError("--values produced an empty sweep")

    alphas = _float_list(args.alphas)
    betas = _beta_list(args.betas)
    if args.axis == "alpha":
        alphas = axis_values
    elif args.axis == "beta":
        betas = axis_values

    def _require(name, value):
        if value is None:
            raise ValueError(f"--{name} is required for axis {args.axis}")
        return value

    if args.axis == "gamma-s":
        links = [(v, _require("gamma-w-db", args.gamma_w_db)) for v in axis_values]
    elif args.axis == "gamma-w":
        links = [(_require("gamma-s-db", args.gamma_s_db), v) for v in axis_values]
    else:
        links = [(_require("gamma-s-db", args.gamma_s_db), _require("gamma-w-db", args.gamma_w_db))]

    solver = AllocationSource(args.solver)
    rows = emit_delta_sweep(
        links, betas, alphas, tau=args.tau, solver_tol=args.solver_tol, solver=solver
    )
    if not rows:
        raise ValueError("sweep produced no rows (all links infeasible at beta_star)")
    base = args.out
    base.parent.mkdir(parents=True, exist_ok=True)
    if base.suffix == ".csv":
        base = base.with_suffix("")
    csv_path = base.with_suffix(".csv")
    json_path = base.with_suffix(".json")
    emit_campaign_csv(rows, csv_path)
    emit_campaign_json(rows, json_path)
    settings = {
        "axis": args.axis,
        "values": args.values,
        "alphas": alphas,
        "betas": betas,
        "gamma_s_db": args.gamma_s_db,
        "gamma_w_db": args.gamma_w_db,
        "tau": args.tau,
        "solver": args.solver,
        "solver_tol": args.solver_tol,
    }
    command = "noma-fair sweep " + " ".join(
        f"--{k.replace('_', '-')} {v}" for k, v in (
            ("axis", args.axis),
            ("values", args.values),
            ("alphas", args.alphas),
            ("betas", args.betas),
            ("gamma-s-db", args.gamma_s_db),
            ("gamma-w-db", args.gamma_w_db),
            ("tau", args.tau),
            ("solver", args.solver),
            ("solver-tol", args.solver_tol),
            ("out", args.out),
        ) if v is not None
    )
    manifest_path = base.parent / (base.name + ".manifest.txt")
    write_manifest(manifest_path, settings, [csv_path.name, json_path.name], command)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    print(f"wrote {manifest_path}")
    return 0


# Defaults for the simulate sweep grid when neither config nor flags set them.
_DEFAULT_ALPHAS = (1.0,)
_DEFAULT_BETAS = (0.01, 0.06)


def _cmd_simulate(args) -> int:
    settings = {}
    if args.config is not None:
        settings = parse_config_file(args.config)
    settings.pop("version", None)
    if args.seed is not None:
        settings["seed"] = args.seed
    if args.trials is not None:
        settings["trials"] = args.trials
    if args.strategies is not None:
        settings["strategies"] = _strategy_list(args.strategies)
    if args.alphas is not None:
        settings["alphas"] = _float_list(args.alphas)
    if args.betas is not None:
        settings["betas"] = _float_list(args.betas)
    if args.threads is not None:
        settings["threads"] = args.threads

    pathloss = PathlossModel(
        name=settings.get("pathloss_model", PathlossModel.name),
        intercept_db=settings.get("pathloss_intercept_db", PathlossModel.intercept_db),
        slope_db=settings.get("pathloss_slope_db", PathlossModel.slope_db),
        min_distance_km=settings.get("pathloss_min_distance_km", PathlossModel.min_distance_km),
    )
    cfg = NetworkConfig(
        bs_density=settings.get("bs_density", 25.0),
        user_density=settings.get("user_density", 120.0),
        area_km2=settings.get("area_km2", 1.0),
        tx_power_dbm=settings.get("tx_power_dbm", 46.0),
        noise_power_dbm=settings.get("noise_power_dbm", -95.0),
        pathloss=pathloss,
        fading_scale=settings.get("fading_scale", 1.0),
        trials=settings.get("trials", 100),
        seed=settings.get("seed", 1),
    )
    alphas = settings.get("alphas", list(_DEFAULT_ALPHAS))
    betas = settings.get("betas", list(_DEFAULT_BETAS))
    strategies = settings.get("strategies", list(_DEFAULT_STRATEGIES))
    tau = settings.get("tau", 0.5)
    solver_tol = settings.get("solver_tol", 1e-9)
    threads = _resolve_threads(settings.get("threads"))

    sweep = [(a, b) for a in alphas for b in betas]
    rows = run_campaign(
        cfg, sweep, strategies, tau=tau, solver_tol=solver_tol, threads=threads
    )

    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "campaign.csv"
    json_path = out_dir / "campaign.json"
    manifest_path = out_dir / "manifest.txt"
    emit_campaign_csv(rows, csv_path)
    emit_campaign_json(rows, json_path)
    resolved = {
        "bs_density": cfg.bs_density,
        "user_density": cfg.user_density,
        "area_km2": cfg.area_km2,
        "tx_power_dbm": cfg.tx_power_dbm,
        "noise_power_dbm": cfg.noise_power_dbm,
        "pathloss_model": cfg.pathloss.name,
        "pathloss_intercept_db": cfg.pathloss.intercept_db,
        "pathloss_slope_db": cfg.pathloss.slope_db,
        "pathloss_min_distance_km": cfg.pathloss.min_distance_km,
        "fading_scale": cfg.fading_scale,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "alphas": alphas,
        "betas": betas,
        "strategies": strategies,
        "tau": tau,
        "solver_tol": solver_tol,
        "threads": threads,
    }
    command = f"noma-fair simulate --config {manifest_path} --out-dir {out_dir}"
    write_manifest(manifest_path, resolved, [csv_path.name, json_path.name], command)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    print(f"wrote {manifest_path}")
    return 0


_COMMANDS = {"pair": _cmd_pair, "sweep": _cmd_sweep, "simulate": _cmd_simulate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure, not a usage problem
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
