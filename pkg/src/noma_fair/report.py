"""Result aggregation and CSV/JSON artifact emission.

The CSV contract is the deliverable; plotting is left to external tools.
Every CSV has the exact header

    alpha,beta,gamma_s_db,gamma_w_db,strategy,metric,value,trials,stderr

rows sorted by (alpha, beta, strategy, metric) with the link SINRs as final
tie-breakers, and all floats printed with 9 significant digits, which makes
output byte-stable and round-trippable.  A JSON mirror (array of objects,
same rows and precision) accompanies every CSV for programmatic consumers.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .allocator import DecisionMode, solve_optimal, solve_suboptimal
from .bounds import allocation_bounds, pairing_criterion
from .fairness import FairnessConfig
from .rates import AllocationSource, PairLink, db_to_linear

__all__ = [
    "METRIC_NAMES",
    "CSV_HEADER",
    "BETA_STAR_TOKEN",
    "ResultRow",
    "format_value",
    "sort_rows",
    "emit_delta_sweep",
    "emit_campaign_csv",
    "emit_campaign_json",
    "parse_campaign_csv",
]

# The full metric vocabulary appearing in artifacts.
METRIC_NAMES = (
    "t_alpha",
    "mur_strong",
    "mur_weak",
    "mur_oma",
    "mean_asr",
    "delta_s",
    "delta_lb",
    "delta_ub",
    "msd_satisfied",
)

CSV_HEADER = ("alpha", "beta", "gamma_s_db", "gamma_w_db", "strategy", "metric", "value", "trials", "stderr")

# Sweep beta entries may use this token; it resolves per link to a value
# just inside the admissible imperfection range, beta_star * (1 - 1e-9),
# since the feasible interval is empty at beta_star exactly.
BETA_STAR_TOKEN = "beta_star"
_BETA_STAR_MARGIN = 1e-9


@dataclass(frozen=True)
class ResultRow:
    """One (sweep point, strategy, metric) aggregate."""

    alpha: float
    beta: float
    gamma_s_db: Optional[float]
    gamma_w_db: Optional[float]
    strategy: str
    metric: str
    value: float
    trials: int
    stderr: float


def format_value(value: float) -> str:
    """Canonical 9-significant-digit float rendering."""
    return format(float(value), ".9g")


def _sort_key(row: ResultRow):
    return (
        row.alpha,
        row.beta,
        row.strategy,
        row.metric,
        row.gamma_s_db if row.gamma_s_db is not None else -math.inf,
        row.gamma_w_db if row.gamma_w_db is not None else -math.inf,
    )


def sort_rows(rows: Sequence[ResultRow]) -> list[ResultRow]:
    return sorted(rows, key=_sort_key)


def emit_delta_sweep(
    links_db: Sequence[tuple[float, float]],
    betas: Sequence[Union[float, str]],
    alphas: Sequence[float],
    tau: float = 0.5,
    solver_tol: float = 1e-9,
    solver: AllocationSource = AllocationSource.OPTIMAL,
) -> list[ResultRow]:
    """Per-(alpha, beta, link) power-split rows.

    ``links_db`` holds (gamma_s_db, gamma_w_db) pairs.  Each point gets
    delta_lb, delta_ub and msd_satisfied rows, plus a delta_s row whenever
    the solver admits the pair.  ``betas`` entries may be numeric or the
    :data:`BETA_STAR_TOKEN` string.
    """
    links_db, betas, alphas = list(links_db), list(betas), list(alphas)
    if not links_db or not betas or not alphas:
        raise ValueError("links, betas and alphas must all be non-empty")
    solve = {
        AllocationSource.OPTIMAL: solve_optimal,
        AllocationSource.SUBOPTIMAL: solve_suboptimal,
    }[solver]
    rows: list[ResultRow] = []
    for gs_db, gw_db in links_db:
        gamma_s = db_to_linear(gs_db)
        gamma_w = db_to_linear(gw_db)
        crit = pairing_criterion(gamma_s, gamma_w)
        for entry in betas:
            if isinstance(entry, str):
                if entry != BETA_STAR_TOKEN:
                    raise ValueError(f"unknown beta token {entry!r}")
                if crit.beta_star <= 0:
                    continue  # no admissible imperfection for this link
                beta = crit.beta_star * (1.0 - _BETA_STAR_MARGIN)
            else:
                beta = float(entry)
            link = PairLink(gamma_s=gamma_s, gamma_w=gamma_w, beta=beta)
            bounds = allocation_bounds(link)
            for alpha in alphas:
                cfg = FairnessConfig(alpha=alpha, tau=tau, solver_tol=solver_tol)
                decision = solve(link, cfg)
                values = {
                    "delta_lb": bounds.delta_lb,
                    "delta_ub": bounds.delta_ub,
                    "msd_satisfied": 1.0 if crit.satisfied else 0.0,
                }
                if decision.mode is DecisionMode.NOMA_PAIRED:
                    values["delta_s"] = decision.allocation.delta_s
                for metric, value in values.items():
                    rows.append(
                        ResultRow(
                            alpha=float(alpha),
                            beta=beta,
                            gamma_s_db=float(gs_db),
                            gamma_w_db=float(gw_db),
                            strategy=solver.value,
                            metric=metric,
                            value=value,
                            trials=1,
                            stderr=0.0,
                        )
                    )
    return rows


def _row_strings(row: ResultRow) -> list[str]:
    return [
        format_value(row.alpha),
        format_value(row.beta),
        format_value(row.gamma_s_db) if row.gamma_s_db is not None else "",
        format_value(row.gamma_w_db) if row.gamma_w_db is not None else "",
        row.strategy,
        row.metric,
        format_value(row.value),
        str(int(row.trials)),
        format_value(row.stderr),
    ]


def emit_campaign_csv(rows: Sequence[ResultRow], path) -> Path:
    """Write sorted rows as UTF-8 CSV.  Refuses empty input before touching disk."""
    if not rows:
        raise ValueError("no rows to emit")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in sort_rows(rows):
            writer.writerow(_row_strings(row))
    return path


def emit_campaign_json(rows: Sequence[ResultRow], path) -> Path:
    """JSON mirror of the CSV: same rows, same order, same 9-digit precision."""
    if not rows:
        raise ValueError("no rows to emit")
    path = Path(path)
    payload = []
    for row in sort_rows(rows):
        payload.append(
            {
                "alpha": float(format_value(row.alpha)),
                "beta": float(format_value(row.beta)),
                "gamma_s_db": float(format_value(row.gamma_s_db)) if row.gamma_s_db is not None else None,
                "gamma_w_db": float(format_value(row.gamma_w_db)) if row.gamma_w_db is not None else None,
                "strategy": row.strategy,
                "metric": row.metric,
                "value": float(format_value(row.value)),
                "trials": int(row.trials),
                "stderr": float(format_value(row.stderr)),
            }
        )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return path


def parse_campaign_csv(path) -> list[ResultRow]:
    """Read back an emitted CSV; inverse of :func:`emit_campaign_csv`."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r} in {path}")
        rows = []
        for rec in reader:
            rows.append(
                ResultRow(
                    alpha=float(rec[0]),
                    beta=float(rec[1]),
                    gamma_s_db=float(rec[2]) if rec[2] else None,
                    gamma_w_db=float(rec[3]) if rec[3] else None,
                    strategy=rec[4],
                    metric=rec[5],
                    value=float(rec[6]),
                    trials=int(rec[7]),
                    stderr=float(rec[8]),
                )
            )
    return rows
