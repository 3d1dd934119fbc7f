"""Feasibility machinery for the power split of a NOMA pair.

Three closed forms govern whether and how a pair can be served:

* ``delta_upper_bound``: largest split for which the weak user's NOMA rate
  still matches its OMA rate (independent of the SIC imperfection).
* ``delta_lower_bound``: smallest split for which the strong user's NOMA
  rate matches its OMA rate at a given imperfection ``beta``.
* ``msd_threshold`` / ``beta_star``: the minimum-SINR-difference pairing
  criterion and the largest imperfection for which the feasible interval
  ``(delta_lb, delta_ub)`` is nonempty.

Each bound is the exact root of the corresponding rate equality, so a pair
allocated exactly at a bound earns rate equality rather than a violation;
endpoint splits are therefore admissible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rates import PairLink

__all__ = [
    "FEASIBILITY_TOL",
    "AllocationBounds",
    "PairingCriterion",
    "delta_upper_bound",
    "delta_lower_bound",
    "msd_threshold",
    "beta_star",
    "pairing_criterion",
    "allocation_bounds",
]

# Interval widths below this are treated as empty to absorb floating-point
# noise when beta sits essentially at beta_star.
FEASIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class AllocationBounds:
    """Feasible interval for the strong user's power fraction."""

    delta_lb: float
    delta_ub: float
    feasible: bool


@dataclass(frozen=True)
class PairingCriterion:
    """Pairing admissibility summary for a (gamma_s, gamma_w) pair.

    ``satisfied`` reflects only the SINR-difference test; callers must gate
    on ``beta < beta_star`` separately.  ``beta_star`` may be negative when
    no imperfection level admits the pair; it is reported as-is.
    """

    msd_threshold: float
    beta_star: float
    satisfied: bool


def _check_sinr(name, value) -> None:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


def delta_upper_bound(gamma_w):
    """Split above which the weak user's NOMA rate drops below its OMA rate.

    Equals (sqrt(1+g) - 1)/g, evaluated as 1/(1 + sqrt(1+g)) which is the
    same quantity without cancellation for small g.  Always in (0, 1/2].
    """
    _check_sinr("gamma_w", gamma_w)
    out = 1.0 / (1.0 + np.sqrt(1.0 + np.asarray(gamma_w, dtype=float)))
    return float(out) if out.ndim == 0 else out


def delta_lower_bound(gamma_s, beta):
    """Split below which the strong user's NOMA rate drops below its OMA rate.

    Equals (1 + beta*g)(sqrt(1+g) - 1) / (g*(1 + beta*(sqrt(1+g) - 1))),
    evaluated with (sqrt(1+g)-1)/g rewritten as 1/(1+sqrt(1+g)) for
    stability.  Strictly increasing in beta.
    """
    _check_sinr("gamma_s", gamma_s)
    b = np.asarray(beta, dtype=float)
    if np.any(b < 0) or np.any(b > 1):
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    g = np.asarray(gamma_s, dtype=float)
    a = np.sqrt(1.0 + g)
    out = (1.0 + b * g) / ((1.0 + a) * (1.0 + b * (a - 1.0)))
    return float(out) if out.ndim == 0 else out


def msd_threshold(gamma_s, gamma_w):
    """Minimum SINR difference for two users to be NOMA-pairable.

    The pair qualifies when ``gamma_s - gamma_w`` exceeds the returned
    threshold.  Computed as

        gamma_s - (sqrt(1+gw) - 1)(sqrt(1+gs)sqrt(1+gw) + 1)/sqrt(1+gw)

    with (sqrt(1+gw) - 1) expanded to gw/(sqrt(1+gw)+1) for stability at
    small gamma_w.
    """
    _check_sinr("gamma_s", gamma_s)
    _check_sinr("gamma_w", gamma_w)
    gs = np.asarray(gamma_s, dtype=float)
    gw = np.asarray(gamma_w, dtype=float)
    a = np.sqrt(1.0 + gs)
    b = np.sqrt(1.0 + gw)
    out = gs - gw * (a * b + 1.0) / (b * (b + 1.0))
    return float(out) if out.ndim == 0 else out


def beta_star(gamma_s, gamma_w):
    """Largest SIC imperfection at which the split interval is still nonempty.

    The raw closed form

        (gw - gs + gs*sqrt(1+gw) - gw*sqrt(1+gs))
        / (gs*(sqrt(1+gs) - 1)(gw - sqrt(1+gw) + 1))

    factors exactly to (gs - gw) / (gs * sqrt(1+gw) * (sqrt(1+gs) + sqrt(1+gw))),
    which is implemented here because it avoids catastrophic cancellation for
    near-equal SINRs.  Negative for gamma_s < gamma_w (pair infeasible for
    any imperfection); zero for equal SINRs.
    """
    _check_sinr("gamma_s", gamma_s)
    _check_sinr("gamma_w", gamma_w)
    gs = np.asarray(gamma_s, dtype=float)
    gw = np.asarray(gamma_w, dtype=float)
    a = np.sqrt(1.0 + gs)
    b = np.sqrt(1.0 + gw)
    denom = gs * b * (a + b)
    if np.any(denom == 0):
        raise ValueError("singular input: beta_star denominator vanished")
    out = (gs - gw) / denom
    return float(out) if out.ndim == 0 else out


def pairing_criterion(gamma_s: float, gamma_w: float) -> PairingCriterion:
    """Evaluate the SINR-difference pairing test and the imperfection bound."""
    threshold = msd_threshold(gamma_s, gamma_w)
    return PairingCriterion(
        msd_threshold=threshold,
        beta_star=beta_star(gamma_s, gamma_w),
        satisfied=bool((gamma_s - gamma_w) > threshold),
    )


def allocation_bounds(link: PairLink) -> AllocationBounds:
    """Combine both bounds at the link's imperfection level.

    The interval is flagged infeasible when its width falls below
    :data:`FEASIBILITY_TOL`.
    """
    lb = delta_lower_bound(link.gamma_s, link.beta)
    ub = delta_upper_bound(link.gamma_w)
    return AllocationBounds(delta_lb=lb, delta_ub=ub, feasible=bool(ub - lb >= FEASIBILITY_TOL))
