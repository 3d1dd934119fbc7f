"""Independent numerical oracles shared by the test modules.

Everything here recomputes expected values from the rate definitions by
bisection or exhaustive scanning, never from the closed forms under test.
"""

from __future__ import annotations

import numpy as np

from noma_fair.rates import noma_sinr_strong, noma_sinr_weak


def oma_rate_ref(gamma):
    return 0.5 * np.log2(1.0 + gamma)


def noma_rate_strong_ref(gamma_s, beta, delta_s):
    return np.log2(1.0 + noma_sinr_strong(gamma_s, beta, delta_s))


def noma_rate_weak_ref(gamma_w, delta_s):
    return np.log2(1.0 + noma_sinr_weak(gamma_w, delta_s))


def bisect_delta_weak(gamma_w, iters: int = 80) -> float:
    """Root of R_w_noma(delta) = R_w_oma; R_w_noma is decreasing in delta."""
    target = oma_rate_ref(gamma_w)
    lo, hi = 1e-12, 1.0 - 1e-12
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if noma_rate_weak_ref(gamma_w, mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_delta_strong(gamma_s, beta, iters: int = 80) -> float:
    """Root of R_s_noma(delta) = R_s_oma; R_s_noma is increasing in delta."""
    target = oma_rate_ref(gamma_s)
    lo, hi = 1e-12, 1.0 - 1e-12
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if noma_rate_strong_ref(gamma_s, beta, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def grid_feasible(gamma_s, gamma_w, beta: float = 0.0, points: int = 10000) -> bool:
    """True when some split gives both users strictly more than their OMA rates."""
    deltas = np.linspace(1e-6, 1.0 - 1e-6, points)
    strong_ok = noma_rate_strong_ref(gamma_s, beta, deltas) > oma_rate_ref(gamma_s)
    weak_ok = noma_rate_weak_ref(gamma_w, deltas) > oma_rate_ref(gamma_w)
    return bool(np.any(strong_ok & weak_ok))


def sample_ordered_pairs(rng, n: int, low_db: float = 0.0, high_db: float = 30.0):
    """Random linear SINR pairs with gamma_s >= gamma_w, uniform in dB."""
    g1 = 10.0 ** rng.uniform(low_db / 10.0, high_db / 10.0, n)
    g2 = 10.0 ** rng.uniform(low_db / 10.0, high_db / 10.0, n)
    return np.maximum(g1, g2), np.minimum(g1, g2)
