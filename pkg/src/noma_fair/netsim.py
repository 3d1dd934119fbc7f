"""Stochastic-geometry Monte Carlo harness.

Base stations and users are dropped as independent Poisson point processes
on a square window with toroidal wrap-around (standard practice to avoid
boundary bias).  Channel gain to every station is log-distance pathloss
times unit-mean exponential (Rayleigh power) fading; users associate with
the station offering the maximum SINR, and every non-serving station
interferes at full power on the shared subchannel.

Within a trial every strategy consumes the identical channel realization
and the identical per-cell candidate pairs, so strategy comparisons are
paired-sample: candidates rejected by a gated strategy contribute their
members' OMA rates, the pure-OMA strategy rejects everything.  Per-pair
metrics (strong/weak rate, pair throughput, pair sum rate) are therefore
directly comparable across strategies row by row.

All randomness is derived from (master seed, trial index) substreams;
trials are independent and may run in separate processes without changing
any output.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .allocator import (
    AllocationDecision,
    DecisionMode,
    allocate_fixed_bound,
    solve_optimal,
    solve_suboptimal,
)
from .fairness import FairnessConfig, alpha_throughput
from .pairing import UserChannel, candidate_pairs, near_far_decision
from .rates import AllocationSource, PairLink, noma_rates, oma_rate
from .report import ResultRow

__all__ = [
    "PathlossModel",
    "NetworkConfig",
    "NetworkRealization",
    "Strategy",
    "StrategyMetrics",
    "TrialMetrics",
    "drop_network",
    "compute_sinrs",
    "run_trial",
    "run_campaign",
]

# Substream tags under (seed, trial_index, tag).
_GEOMETRY_STREAM = 0
_FADING_STREAM = 1


class Strategy(str, enum.Enum):
    OPTIMAL = "optimal"
    SUBOPTIMAL = "suboptimal"
    UPPER_BOUND = "upper_bound"
    LOWER_BOUND = "lower_bound"
    NEAR_FAR = "near_far"
    OMA = "oma"


@dataclass(frozen=True)
class PathlossModel:
    """Log-distance pathloss PL(dB) = intercept + slope * log10(d_km).

    Distances below ``min_distance_km`` are clamped to it and the clamp is
    counted on the realization.
    """

    name: str = "urban_macro"
    intercept_db: float = 128.1
    slope_db: float = 37.6
    min_distance_km: float = 1e-3

    def loss_db(self, distance_km):
        d = np.maximum(distance_km, self.min_distance_km)
        return self.intercept_db + self.slope_db * np.log10(d)


@dataclass(frozen=True)
class NetworkConfig:
    bs_density: float = 25.0  # stations per km^2
    user_density: float = 120.0  # users per km^2
    area_km2: float = 1.0
    tx_power_dbm: float = 46.0
    noise_power_dbm: float = -95.0  # -174 dBm/Hz over 10 MHz + 9 dB noise figure
    pathloss: PathlossModel = field(default_factory=PathlossModel)
    fading_scale: float = 1.0  # mean of the exponential power fading
    trials: int = 100
    seed: int = 1

    def __post_init__(self) -> None:
        if self.bs_density <= 0 or self.user_density <= 0:
            raise ValueError("densities must be positive")
        if self.area_km2 <= 0:
            raise ValueError("area must be positive")
        if self.fading_scale <= 0:
            raise ValueError("fading_scale must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class NetworkRealization:
    """One trial's station and user positions (km) on the toroidal window."""

    bs_xy: np.ndarray
    user_xy: np.ndarray
    side_km: float
    seed: int
    trial_index: int
    resamples: int = 0
    clamped_links: int = 0


@dataclass(frozen=True)
class StrategyMetrics:
    """Per-trial, per-strategy aggregates over the shared candidate pairs.

    Rate means are over candidate pairs with each member's *achieved* rate
    (NOMA when the strategy admitted the candidate, OMA otherwise), so the
    same field compares like-for-like across strategies.  ``mean_oma_rate``
    averages the OMA rate of the users this strategy serves as OMA; it is
    None when the strategy paired everyone.
    """

    mean_strong_rate: Optional[float]
    mean_weak_rate: Optional[float]
    mean_oma_rate: Optional[float]
    mean_t_alpha: Optional[float]
    mean_asr: Optional[float]
    pair_count: int
    oma_count: int


@dataclass(frozen=True)
class TrialMetrics:
    population: int
    per_strategy: dict[Strategy, StrategyMetrics]

    def __post_init__(self) -> None:
        for strat, m in self.per_strategy.items():
            if 2 * m.pair_count + m.oma_count != self.population:
                raise ValueError(
                    f"{strat.value}: pair/oma counts do not cover the population"
                )


def drop_network(cfg: NetworkConfig, trial_index: int) -> NetworkRealization:
    """Realize Poisson station and user counts with uniform positions.

    Deterministic given (cfg.seed, trial_index).  A draw with zero stations
    is resampled from a fresh substream and counted in ``resamples``.
    """
    side = math.sqrt(cfg.area_km2)
    attempt = 0
    while True:
        rng = np.random.default_rng([cfg.seed, trial_index, _GEOMETRY_STREAM, attempt])
        n_bs = int(rng.poisson(cfg.bs_density * cfg.area_km2))
        if n_bs > 0:
            break
        attempt += 1
    n_users = int(rng.poisson(cfg.user_density * cfg.area_km2))
    bs_xy = rng.uniform(0.0, side, size=(n_bs, 2))
    user_xy = rng.uniform(0.0, side, size=(n_users, 2))
    return NetworkRealization(
        bs_xy=bs_xy,
        user_xy=user_xy,
        side_km=side,
        seed=cfg.seed,
        trial_index=trial_index,
        resamples=attempt,
    )


def toroidal_distances(a_xy: np.ndarray, b_xy: np.ndarray, side: float) -> np.ndarray:
    """Pairwise wrap-around distances, shape (len(a), len(b))."""
    delta = np.abs(a_xy[:, None, :] - b_xy[None, :, :])
    delta = np.minimum(delta, side - delta)
    return np.hypot(delta[..., 0], delta[..., 1])


def received_power_mw(network: NetworkRealization, cfg: NetworkConfig) -> np.ndarray:
    """Per-(user, station) received power in mW, fading included.

    Draws the fading matrix from the trial's dedicated substream, so the
    realization is reproducible independently of how it is consumed.
    """
    dist = toroidal_distances(network.user_xy, network.bs_xy, network.side_km)
    network.clamped_links = int(np.sum(dist < cfg.pathloss.min_distance_km))
    rng = np.random.default_rng([network.seed, network.trial_index, _FADING_STREAM])
    fading = rng.exponential(cfg.fading_scale, size=dist.shape)
    gains = 10.0 ** (-cfg.pathloss.loss_db(dist) / 10.0) * fading
    return 10.0 ** (cfg.tx_power_dbm / 10.0) * gains


def sinr_matrix(prx_mw: np.ndarray, noise_mw: float) -> np.ndarray:
    """Candidate SINR toward every station: signal over noise plus the rest.

    The subtraction form is fine for ranking candidates; the final SINR of
    the chosen station is recomputed with a masked sum in
    :func:`compute_sinrs` because total - prx cancels catastrophically when
    one station dominates the row.
    """
    total = prx_mw.sum(axis=1, keepdims=True)
    return prx_mw / (noise_mw + (total - prx_mw))


def compute_sinrs(network: NetworkRealization, cfg: NetworkConfig) -> list[UserChannel]:
    """Associate users by maximum SINR and report their link state.

    Association ties go to the lowest station id.  The reported channel gain
    is pathloss times fading toward the serving station (transmit power
    excluded).
    """
    n_users = len(network.user_xy)
    if n_users == 0:
        return []
    prx = received_power_mw(network, cfg)
    noise_mw = 10.0 ** (cfg.noise_power_dbm / 10.0)
    serving = np.argmax(sinr_matrix(prx, noise_mw), axis=1)
    rows = np.arange(n_users)
    # Sum the non-serving columns directly; the error stays relative to the
    # interference instead of to the (possibly dominant) serving power.
    masked = prx.copy()
    masked[rows, serving] = 0.0
    interference = masked.sum(axis=1)
    gamma = prx[rows, serving] / (noise_mw + interference)
    tx_mw = 10.0 ** (cfg.tx_power_dbm / 10.0)
    gains = prx[rows, serving] / tx_mw
    return [
        UserChannel(
            user_id=int(u),
            serving_bs_id=int(serving[u]),
            gamma=float(gamma[u]),
            channel_gain=float(gains[u]),
        )
        for u in rows
    ]


def _decide(
    strategy: Strategy, link: PairLink, fairness: FairnessConfig
) -> Optional[AllocationDecision]:
    """Strategy decision for one candidate; None means serve both as OMA."""
    if strategy is Strategy.OMA:
        return None
    if strategy is Strategy.NEAR_FAR:
        return near_far_decision(link)
    if strategy is Strategy.OPTIMAL:
        return solve_optimal(link, fairness)
    if strategy is Strategy.SUBOPTIMAL:
        return solve_suboptimal(link, fairness)
    if strategy is Strategy.UPPER_BOUND:
        return allocate_fixed_bound(link, AllocationSource.UPPER_BOUND)
    if strategy is Strategy.LOWER_BOUND:
        return allocate_fixed_bound(link, AllocationSource.LOWER_BOUND)
    raise ValueError(f"unknown strategy {strategy!r}")


def _mean(values: list[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def evaluate_strategies(
    users: Sequence[UserChannel],
    strategies: Sequence[Strategy],
    fairness: FairnessConfig,
    beta: float,
) -> TrialMetrics:
    """Run every strategy on one channel realization and aggregate metrics."""
    cells: dict[int, list[UserChannel]] = {}
    for u in users:
        cells.setdefault(u.serving_bs_id, []).append(u)

    acc = {
        s: {"strong": [], "weak": [], "oma": [], "t": [], "asr": [], "pairs": 0}
        for s in strategies
    }
    for bs_id in sorted(cells):
        cands, singles = candidate_pairs(cells[bs_id])
        links = [
            PairLink(gamma_s=s.gamma, gamma_w=w.gamma, beta=beta) for s, w in cands
        ]
        oma_pairs = [(oma_rate(s.gamma), oma_rate(w.gamma)) for s, w in cands]
        single_rates = [oma_rate(u.gamma) for u in singles]
        for strat in strategies:
            a = acc[strat]
            for link, (ros, row) in zip(links, oma_pairs):
                decision = _decide(strat, link, fairness)
                if decision is not None and decision.mode is DecisionMode.NOMA_PAIRED:
                    r_s, r_w = noma_rates(link, decision.allocation)
                    a["pairs"] += 1
                else:
                    r_s, r_w = ros, row
                    a["oma"].extend((ros, row))
                a["strong"].append(r_s)
                a["weak"].append(r_w)
                a["t"].append(alpha_throughput(r_s, r_w, fairness.alpha))
                a["asr"].append(r_s + r_w)
            for r in single_rates:
                a["oma"].append(r)
                a["t"].append(r)  # power mean of a single rate is the rate
                a["asr"].append(r)

    population = len(users)
    per_strategy = {}
    for strat in strategies:
        a = acc[strat]
        per_strategy[strat] = StrategyMetrics(
            mean_strong_rate=_mean(a["strong"]),
            mean_weak_rate=_mean(a["weak"]),
            mean_oma_rate=_mean(a["oma"]),
            mean_t_alpha=_mean(a["t"]),
            mean_asr=_mean(a["asr"]),
            pair_count=a["pairs"],
            oma_count=population - 2 * a["pairs"],
        )
    return TrialMetrics(population=population, per_strategy=per_strategy)


def run_trial(
    cfg: NetworkConfig,
    trial_index: int,
    strategies: Sequence[Strategy],
    fairness: FairnessConfig,
    beta: float,
) -> TrialMetrics:
    """Drop one network, compute SINRs, and evaluate every strategy on it."""
    network = drop_network(cfg, trial_index)
    users = compute_sinrs(network, cfg)
    return evaluate_strategies(users, strategies, fairness, beta)


_METRIC_FIELDS = (
    ("t_alpha", "mean_t_alpha"),
    ("mur_strong", "mean_strong_rate"),
    ("mur_weak", "mean_weak_rate"),
    ("mur_oma", "mean_oma_rate"),
    ("mean_asr", "mean_asr"),
)


def _trial_chunk(args) -> list[tuple[int, dict]]:
    """Worker: evaluate all sweep points for a chunk of trial indices."""
    cfg, sweep, strategies, tau, solver_tol, indices = args
    out = []
    for t in indices:
        network = drop_network(cfg, t)
        users = compute_sinrs(network, cfg)
        point_metrics = {}
        for alpha, beta in sweep:
            fairness = FairnessConfig(alpha=alpha, tau=tau, solver_tol=solver_tol)
            point_metrics[(alpha, beta)] = evaluate_strategies(
                users, strategies, fairness, beta
            )
        out.append((t, point_metrics))
    return out


def run_campaign(
    cfg: NetworkConfig,
    sweep: Sequence[tuple[float, float]],
    strategies: Sequence[Strategy],
    tau: float = 0.5,
    solver_tol: float = 1e-9,
    threads: int = 1,
) -> list[ResultRow]:
    """Average per-trial metrics over cfg.trials for every (alpha, beta) point.

    The channel realization of trial t is shared by all sweep points, and
    aggregation runs in trial order, so the result is bit-identical for any
    ``threads`` setting.
    """
    if not sweep:
        raise ValueError("sweep must be non-empty")
    strategies = list(strategies)
    indices = list(range(cfg.trials))
    workers = max(1, min(int(threads), len(indices)))
    if workers == 1:
        chunks = [_trial_chunk((cfg, sweep, strategies, tau, solver_tol, indices))]
    else:
        splits = [
            [int(t) for t in part] for part in np.array_split(indices, workers) if len(part)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(
                pool.map(
                    _trial_chunk,
                    [(cfg, sweep, strategies, tau, solver_tol, part) for part in splits],
                )
            )
    by_trial = dict(item for chunk in chunks for item in chunk)
    ordered = [by_trial[t] for t in indices]

    rows = []
    for alpha, beta in sweep:
        for strat in strategies:
            for metric, attr in _METRIC_FIELDS:
                values = [
                    getattr(m[(alpha, beta)].per_strategy[strat], attr)
                    for m in ordered
                    if getattr(m[(alpha, beta)].per_strategy[strat], attr) is not None
                ]
                if not values:
                    continue
                arr = np.asarray(values)
                stderr = (
                    float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
                )
                rows.append(
                    ResultRow(
                        alpha=alpha,
                        beta=beta,
                        gamma_s_db=None,
                        gamma_w_db=None,
                        strategy=strat.value,
                        metric=metric,
                        value=float(arr.mean()),
                        trials=len(arr),
                        stderr=stderr,
                    )
                )
    return rows
