import numpy as np
import pytest

from noma_fair.allocator import (
    AllocationDecision,
    DecisionMode,
    allocate_fixed_bound,
    solve_optimal,
    solve_suboptimal,
)
from noma_fair.bounds import beta_star, delta_lower_bound, delta_upper_bound, msd_threshold
from noma_fair.fairness import FairnessConfig, alpha_throughput, utility
from noma_fair.rates import (
    AllocationSource,
    PairLink,
    db_to_linear,
    noma_rates,
    oma_rate,
)

from _oracles import noma_rate_strong_ref, noma_rate_weak_ref, sample_ordered_pairs

GS = db_to_linear(9.0)
GW = db_to_linear(2.0)
BETA_STAR = beta_star(GS, GW)


def feasible_link(rng, alpha_range=(0.3, 35.0)):
    """A random pair admitted by the criterion, with beta inside the bound."""
    while True:
        gs, gw = sample_ordered_pairs(rng, 1)
        gs, gw = float(gs[0]), float(gw[0])
        if (gs - gw) > msd_threshold(gs, gw):
            break
    beta = rng.uniform(0.0, 0.999) * min(beta_star(gs, gw), 1.0)
    alpha = float(np.exp(rng.uniform(np.log(alpha_range[0]), np.log(alpha_range[1]))))
    return PairLink(gamma_s=gs, gamma_w=gw, beta=beta), alpha


def objective_of(link, alpha, delta):
    r_s = noma_rate_strong_ref(link.gamma_s, link.beta, delta)
    r_w = noma_rate_weak_ref(link.gamma_w, delta)
    return utility(r_s, alpha) + utility(r_w, alpha)


class TestSolveOptimal:
    def test_high_alpha_perfect_sic_sits_at_lower_bound(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.0)
        d = solve_optimal(link, FairnessConfig(alpha=3.0))
        assert d.mode is DecisionMode.NOMA_PAIRED
        assert abs(d.allocation.delta_s - delta_lower_bound(GS, 0.0)) < 1e-3

    def test_near_beta_star_sits_at_upper_bound_any_alpha(self):
        beta = BETA_STAR * (1 - 1e-6)
        for alpha in [0.5, 1.0, 3.0, 25.0]:
            link = PairLink(gamma_s=GS, gamma_w=GW, beta=beta)
            d = solve_optimal(link, FairnessConfig(alpha=alpha))
            assert d.mode is DecisionMode.NOMA_PAIRED
            assert abs(d.allocation.delta_s - delta_upper_bound(GW)) < 1e-3

    def test_small_alpha_sits_at_upper_bound(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.01)
        d = solve_optimal(link, FairnessConfig(alpha=0.5))
        assert abs(d.allocation.delta_s - delta_upper_bound(GW)) < 1e-3

    def test_criterion_failure_falls_back_to_oma(self):
        link = PairLink(gamma_s=3.0, gamma_w=3.0, beta=0.0)
        d = solve_optimal(link, FairnessConfig(alpha=1.0))
        assert d.mode is DecisionMode.OMA_FALLBACK
        assert d.allocation is None
        assert d.objective is None

    def test_beta_at_bound_falls_back_to_oma(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=BETA_STAR)
        d = solve_optimal(link, FairnessConfig(alpha=1.0))
        assert d.mode is DecisionMode.OMA_FALLBACK

    def test_diagnostics_populated(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.05)
        d = solve_optimal(link, FairnessConfig(alpha=1.0))
        assert d.diagnostics.criterion.satisfied
        assert d.diagnostics.beta_ratio == pytest.approx(0.05 / BETA_STAR)
        assert d.diagnostics.bounds.feasible

    def test_matches_dense_grid_oracle(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            link, alpha = feasible_link(rng)
            cfg = FairnessConfig(alpha=alpha)
            d = solve_optimal(link, cfg)
            lb = delta_lower_bound(link.gamma_s, link.beta)
            ub = delta_upper_bound(link.gamma_w)
            grid_best = float(np.max(objective_of(link, alpha, np.linspace(lb, ub, 100000))))
            assert d.objective >= grid_best - 1e-6

    def test_constraints_hold_for_random_decisions(self):
        rng = np.random.default_rng(32)
        for _ in range(200):
            link, alpha = feasible_link(rng)
            d = solve_optimal(link, FairnessConfig(alpha=alpha))
            assert d.mode is DecisionMode.NOMA_PAIRED
            r_s, r_w = noma_rates(link, d.allocation)
            assert r_s >= oma_rate(link.gamma_s) - 1e-9
            assert r_w >= oma_rate(link.gamma_w) - 1e-9
            b = d.diagnostics.bounds
            assert b.delta_lb - 1e-12 <= d.allocation.delta_s <= b.delta_ub + 1e-12

    def test_split_moves_from_lower_to_upper_bound_with_beta(self):
        # At alpha > 2 the optimum starts at delta_lb and converges to
        # delta_ub as the imperfection approaches its admissible limit.
        cfg = FairnessConfig(alpha=3.0)
        betas = np.linspace(0.0, BETA_STAR * (1 - 1e-9), 25)
        deltas = []
        for beta in betas:
            d = solve_optimal(PairLink(gamma_s=GS, gamma_w=GW, beta=beta), cfg)
            deltas.append(d.allocation.delta_s)
        deltas = np.array(deltas)
        assert abs(deltas[0] - delta_lower_bound(GS, 0.0)) < 1e-6
        assert abs(deltas[-1] - delta_upper_bound(GW)) < 1e-6
        assert np.all(np.diff(deltas) >= -1e-7)


class TestSolveSuboptimal:
    def test_small_ratio_high_alpha_takes_lower_bound(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.0)
        d = solve_suboptimal(link, FairnessConfig(alpha=3.0, tau=0.5))
        assert d.allocation.delta_s == delta_lower_bound(GS, 0.0)
        assert d.allocation.source is AllocationSource.SUBOPTIMAL

    def test_small_ratio_low_alpha_takes_upper_bound(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.0)
        d = solve_suboptimal(link, FairnessConfig(alpha=0.5, tau=0.5))
        assert d.allocation.delta_s == delta_upper_bound(GW)

    def test_large_ratio_takes_upper_bound_for_any_alpha(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.9 * BETA_STAR)
        for alpha in [0.5, 3.0]:
            d = solve_suboptimal(link, FairnessConfig(alpha=alpha, tau=0.5))
            assert d.allocation.delta_s == delta_upper_bound(GW)

    def test_alpha_one_counts_as_low(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.0)
        d = solve_suboptimal(link, FairnessConfig(alpha=1.0, tau=0.5))
        assert d.allocation.delta_s == delta_upper_bound(GW)

    def test_gates_match_optimal(self):
        for beta in [BETA_STAR, min(1.0, BETA_STAR * 1.5)]:
            link = PairLink(gamma_s=GS, gamma_w=GW, beta=beta)
            d = solve_suboptimal(link, FairnessConfig(alpha=3.0))
            assert d.mode is DecisionMode.OMA_FALLBACK
        d = solve_suboptimal(PairLink(gamma_s=3.0, gamma_w=3.0, beta=0.0), FairnessConfig(alpha=3.0))
        assert d.mode is DecisionMode.OMA_FALLBACK

    def test_near_optimality_median_gap(self):
        rng = np.random.default_rng(33)
        gaps = []
        for _ in range(300):
            link, alpha = feasible_link(rng)
            cfg = FairnessConfig(alpha=alpha, tau=0.5)
            d_opt = solve_optimal(link, cfg)
            d_sub = solve_suboptimal(link, cfg)
            t_opt = alpha_throughput(*noma_rates(link, d_opt.allocation), alpha)
            t_sub = alpha_throughput(*noma_rates(link, d_sub.allocation), alpha)
            gaps.append((t_opt - t_sub) / t_opt)
        assert float(np.median(gaps)) < 0.05


class TestAllocateFixedBound:
    def test_upper(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.02)
        d = allocate_fixed_bound(link, AllocationSource.UPPER_BOUND)
        assert d.allocation.delta_s == delta_upper_bound(GW)
        assert d.allocation.source is AllocationSource.UPPER_BOUND
        assert d.objective is None

    def test_lower(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.02)
        d = allocate_fixed_bound(link, AllocationSource.LOWER_BOUND)
        assert d.allocation.delta_s == delta_lower_bound(GS, 0.02)

    def test_gate(self):
        link = PairLink(gamma_s=3.0, gamma_w=3.0, beta=0.0)
        d = allocate_fixed_bound(link, AllocationSource.UPPER_BOUND)
        assert d.mode is DecisionMode.OMA_FALLBACK

    def test_rejects_non_bound_source(self):
        link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.0)
        with pytest.raises(ValueError):
            allocate_fixed_bound(link, AllocationSource.OPTIMAL)


def test_decision_consistency_enforced():
    link = PairLink(gamma_s=GS, gamma_w=GW, beta=0.0)
    diag = solve_optimal(link, FairnessConfig(alpha=1.0)).diagnostics
    with pytest.raises(ValueError):
        AllocationDecision(DecisionMode.NOMA_PAIRED, None, None, diag)
