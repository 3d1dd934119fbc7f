import math

import mpmath
import numpy as np
import pytest

from noma_fair.bounds import beta_star, delta_lower_bound, delta_upper_bound
from noma_fair.rates import (
    AllocationSource,
    PairLink,
    PowerAllocation,
    db_to_linear,
    noma_rates,
    noma_sinrs,
    oma_rate,
)

from _oracles import sample_ordered_pairs


def alloc(delta_s):
    return PowerAllocation.split(delta_s, AllocationSource.OPTIMAL)


class TestOmaRate:
    def test_exact_value(self):
        # (1/2) * log2(4)
        assert oma_rate(3.0) == 1.0

    def test_zero_limit(self):
        r = oma_rate(1e-12)
        assert 0.0 < r < 1e-11

    def test_nine_db_against_high_precision(self):
        gamma = db_to_linear(9.0)
        with mpmath.workdps(50):
            expected = float(mpmath.log(1 + mpmath.mpf(gamma), 2) / 2)
        assert oma_rate(gamma) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_domain_errors(self, bad):
        with pytest.raises(ValueError):
            oma_rate(bad)

    def test_vectorized(self):
        out = oma_rate(np.array([3.0, 15.0]))
        assert out.tolist() == [1.0, 2.0]


class TestNomaSinrs:
    def test_perfect_sic_strong(self):
        link = PairLink(gamma_s=3.0, gamma_w=3.0, beta=0.0)
        s, _ = noma_sinrs(link, alloc(1.0 / 3.0))
        assert s == pytest.approx(1.0, rel=1e-15)

    def test_weak(self):
        link = PairLink(gamma_s=3.0, gamma_w=3.0, beta=0.0)
        _, w = noma_sinrs(link, alloc(1.0 / 3.0))
        assert w == pytest.approx(1.0, rel=1e-15)

    def test_full_imperfection_strong(self):
        link = PairLink(gamma_s=3.0, gamma_w=3.0, beta=1.0)
        s, _ = noma_sinrs(link, alloc(1.0 / 3.0))
        assert s == pytest.approx(1.0 / 3.0, rel=1e-14)


class TestNomaRates:
    def test_strong_boundary_equals_oma(self):
        link = PairLink(gamma_s=3.0, gamma_w=3.0, beta=0.0)
        r_s, _ = noma_rates(link, alloc(1.0 / 3.0))
        assert r_s == pytest.approx(oma_rate(3.0), rel=1e-15)

    def test_weak_boundary_equals_oma(self):
        link = PairLink(gamma_s=3.0, gamma_w=3.0, beta=0.0)
        _, r_w = noma_rates(link, alloc(1.0 / 3.0))
        assert r_w == pytest.approx(oma_rate(3.0), rel=1e-15)

    def test_against_high_precision(self):
        gamma_s, gamma_w, beta, delta = 7.943, 1.585, 0.03, 0.3
        link = PairLink(gamma_s=gamma_s, gamma_w=gamma_w, beta=beta)
        r_s, r_w = noma_rates(link, alloc(delta))
        with mpmath.workdps(50):
            gs, gw, b, d = map(mpmath.mpf, (gamma_s, gamma_w, beta, delta))
            sinr_s = d * gs / (1 + b * (1 - d) * gs)
            sinr_w = (1 - d) * gw / (1 + d * gw)
            exp_s = float(mpmath.log(1 + sinr_s, 2))
            exp_w = float(mpmath.log(1 + sinr_w, 2))
        assert r_s == pytest.approx(exp_s, rel=1e-13)
        assert r_w == pytest.approx(exp_w, rel=1e-13)


class TestValidation:
    def test_pair_link_ordering(self):
        with pytest.raises(ValueError):
            PairLink(gamma_s=1.0, gamma_w=2.0, beta=0.0)

    def test_pair_link_equal_sinrs_accepted(self):
        PairLink(gamma_s=2.0, gamma_w=2.0, beta=0.5)

    @pytest.mark.parametrize("beta", [-0.1, 1.1])
    def test_pair_link_beta_range(self, beta):
        with pytest.raises(ValueError):
            PairLink(gamma_s=2.0, gamma_w=1.0, beta=beta)

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.2, 1.5])
    def test_power_allocation_range(self, delta):
        with pytest.raises(ValueError):
            PowerAllocation.split(delta, AllocationSource.OPTIMAL)

    def test_power_split_sums_to_one(self):
        a = PowerAllocation.split(0.3, AllocationSource.NEAR_FAR)
        assert a.delta_w == 1.0 - 0.3
        with pytest.raises(ValueError):
            PowerAllocation(delta_s=0.3, delta_w=0.6, source=AllocationSource.NEAR_FAR)


class TestProperties:
    """Randomized checks of the rate functions' shape."""

    def test_strong_increasing_weak_decreasing_in_delta(self):
        rng = np.random.default_rng(101)
        gs, gw = sample_ordered_pairs(rng, 50)
        deltas = np.sort(rng.uniform(0.01, 0.99, 40))
        for i in range(len(gs)):
            link = PairLink(gamma_s=gs[i], gamma_w=gw[i], beta=rng.uniform(0, 1))
            rates = [noma_rates(link, alloc(d)) for d in deltas]
            r_s = np.array([r[0] for r in rates])
            r_w = np.array([r[1] for r in rates])
            assert np.all(np.diff(r_s) > 0)
            assert np.all(np.diff(r_w) < 0)

    def test_strong_rate_degrades_with_beta_weak_unaffected(self):
        rng = np.random.default_rng(202)
        gs, gw = sample_ordered_pairs(rng, 50)
        betas = np.sort(rng.uniform(0, 1, 20))
        for i in range(len(gs)):
            delta = rng.uniform(0.05, 0.95)
            rates = [
                noma_rates(PairLink(gamma_s=gs[i], gamma_w=gw[i], beta=b), alloc(delta))
                for b in betas
            ]
            r_s = np.array([r[0] for r in rates])
            r_w = np.array([r[1] for r in rates])
            assert np.all(np.diff(r_s) <= 0)
            assert np.unique(r_w).size == 1

    def test_perfect_sic_ceiling(self):
        rng = np.random.default_rng(303)
        gs, gw = sample_ordered_pairs(rng, 100)
        for i in range(len(gs)):
            delta = rng.uniform(0.01, 0.99)
            link = PairLink(gamma_s=gs[i], gamma_w=gw[i], beta=0.0)
            r_s, _ = noma_rates(link, alloc(delta))
            assert r_s == pytest.approx(math.log2(1 + delta * gs[i]), rel=1e-14)

    def test_boundary_equalities_at_bounds(self):
        # Allocating exactly at a bound reproduces that user's OMA rate.
        rng = np.random.default_rng(404)
        gs, gw = sample_ordered_pairs(rng, 200)
        checked = 0
        for i in range(len(gs)):
            bs = beta_star(gs[i], gw[i])
            if bs <= 0:
                continue
            beta = rng.uniform(0, min(bs, 1.0)) * 0.999
            link = PairLink(gamma_s=gs[i], gamma_w=gw[i], beta=beta)
            r_s, _ = noma_rates(link, alloc(delta_lower_bound(gs[i], beta)))
            _, r_w = noma_rates(link, alloc(delta_upper_bound(gw[i])))
            assert r_s == pytest.approx(oma_rate(gs[i]), rel=1e-12)
            assert r_w == pytest.approx(oma_rate(gw[i]), rel=1e-12)
            checked += 1
        assert checked > 100
