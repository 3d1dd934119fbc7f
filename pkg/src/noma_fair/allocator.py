"""Power-split decisions for a candidate NOMA pair.

Three entry points, all gated on the pairing criterion and on the SIC
imperfection staying below its admissible bound:

* :func:`solve_optimal` maximizes the summed alpha-fair utility of the two
  NOMA rates over the feasible interval [delta_lb, delta_ub].
* :func:`solve_suboptimal` is the low-complexity endpoint rule: below the
  imperfection-ratio threshold ``tau`` it picks delta_lb for alpha > 1 and
  delta_ub for alpha <= 1; at or above tau it picks delta_ub regardless of
  alpha.
* :func:`allocate_fixed_bound` pins the split to one bound (the baseline
  strategies evaluated against the solvers).

The 1-D objective is continuous on a compact interval but need not be
concave, so the optimal solver runs a coarse grid scan followed by
golden-section refinement of every near-best bracket; this is robust to
multimodality without derivative machinery.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .bounds import (
    AllocationBounds,
    PairingCriterion,
    allocation_bounds,
    pairing_criterion,
)
from .fairness import FairnessConfig, utility
from .rates import (
    AllocationSource,
    PairLink,
    PowerAllocation,
    noma_sinr_strong,
    noma_sinr_weak,
)

__all__ = [
    "DecisionMode",
    "DecisionDiagnostics",
    "AllocationDecision",
    "solve_optimal",
    "solve_suboptimal",
    "allocate_fixed_bound",
]

_GRID_POINTS = 1000
# Grid maxima within this slack of the best are all refined (multimodal guard).
_BRACKET_SLACK = 1e-9

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


class DecisionMode(str, enum.Enum):
    NOMA_PAIRED = "noma_paired"
    OMA_FALLBACK = "oma_fallback"


@dataclass(frozen=True)
class DecisionDiagnostics:
    """Why a pair was admitted or rejected."""

    bounds: AllocationBounds
    criterion: PairingCriterion
    beta_ratio: float


@dataclass(frozen=True)
class AllocationDecision:
    """Outcome of a pairing decision.

    ``allocation`` is present exactly when ``mode`` is NOMA_PAIRED.
    ``objective`` is the achieved summed utility; it is filled by the
    fairness-driven solvers and left None by the fixed-bound and near-far
    paths, which carry no fairness exponent.
    """

    mode: DecisionMode
    allocation: Optional[PowerAllocation]
    objective: Optional[float]
    diagnostics: DecisionDiagnostics

    def __post_init__(self) -> None:
        if (self.mode is DecisionMode.NOMA_PAIRED) != (self.allocation is not None):
            raise ValueError("allocation must be present iff the pair was admitted")


def _diagnostics(link: PairLink) -> DecisionDiagnostics:
    crit = pairing_criterion(link.gamma_s, link.gamma_w)
    ratio = link.beta / crit.beta_star if crit.beta_star > 0 else math.inf
    return DecisionDiagnostics(
        bounds=allocation_bounds(link), criterion=crit, beta_ratio=ratio
    )


def _admissible(link: PairLink, diag: DecisionDiagnostics) -> bool:
    return diag.criterion.satisfied and link.beta < diag.criterion.beta_star


def _objective_fn(link: PairLink, alpha: float) -> Callable:
    """Summed alpha-fair utility of the two NOMA rates, as a function of delta_s.

    Vectorized over delta_s.  Positive rates are guaranteed on
    [delta_lb, delta_ub] because the endpoints already achieve the (positive)
    OMA rates.
    """

    def obj(delta_s):
        r_s = np.log2(1.0 + noma_sinr_strong(link.gamma_s, link.beta, delta_s))
        r_w = np.log2(1.0 + noma_sinr_weak(link.gamma_w, delta_s))
        return utility(r_s, alpha) + utility(r_w, alpha)

    return obj


def _golden_max(fn: Callable, lo: float, hi: float, tol: float) -> float:
    """Golden-section search for the maximizer of fn on [lo, hi]."""
    dist = hi - lo
    if dist <= tol:
        return 0.5 * (lo + hi)
    n = int(math.ceil(math.log(tol / dist) / math.log(_INV_PHI)))
    c = lo + _INV_PHI_SQ * dist
    d = lo + _INV_PHI * dist
    yc = fn(c)
    yd = fn(d)
    for _ in range(max(n - 1, 0)):
        if yc > yd:
            hi, d, yd = d, c, yc
            dist *= _INV_PHI
            c = lo + _INV_PHI_SQ * dist
            yc = fn(c)
        else:
            lo, c, yc = c, d, yd
            dist *= _INV_PHI
            d = lo + _INV_PHI * dist
            yd = fn(d)
    return 0.5 * (lo + d) if yc > yd else 0.5 * (c + hi)


def _maximize_on_interval(fn: Callable, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Grid scan plus golden-section refinement; returns (delta_s, objective).

    Every grid bracket within _BRACKET_SLACK of the best value is refined and
    the global best kept; exact ties go to the smaller delta_s, which favors
    the weak user.
    """
    xs = np.linspace(lo, hi, _GRID_POINTS)
    ys = fn(xs)
    best = float(np.max(ys))
    last = len(xs) - 1
    # The endpoints enter as exact candidates: golden section only ever
    # returns interior points, which loses real objective on boundary maxima
    # where the slope does not vanish.
    refined = [(float(ys[0]), float(xs[0])), (float(ys[last]), float(xs[last]))]
    for i in np.flatnonzero(ys >= best - _BRACKET_SLACK):
        if 0 < i < last and (ys[i] < ys[i - 1] or ys[i] < ys[i + 1]):
            continue  # not a local peak, its bracket is covered by a neighbor
        x = _golden_max(fn, xs[max(i - 1, 0)], xs[min(i + 1, last)], tol)
        refined.append((float(fn(x)), float(x)))
    top = max(v for v, _ in refined)
    delta = min(x for v, x in refined if v >= top - 1e-12)
    return delta, top


def solve_optimal(link: PairLink, cfg: FairnessConfig) -> AllocationDecision:
    """Maximize the pair's summed alpha-fair utility over the feasible splits.

    Returns an OMA fallback when the pairing criterion fails or the link's
    imperfection reaches beta_star.  Otherwise the returned split lies in
    [delta_lb, delta_ub], located to within ``cfg.solver_tol``, which keeps
    both NOMA rates at or above their OMA counterparts by construction.
    """
    diag = _diagnostics(link)
    if not _admissible(link, diag):
        return AllocationDecision(DecisionMode.OMA_FALLBACK, None, None, diag)
    if not diag.bounds.feasible:
        # The admission gate guarantees a nonempty interval; reaching this
        # branch indicates a numerical fault, not a rejectable pair.
        raise RuntimeError(
            f"inconsistent state: pairing admitted but interval empty for {link!r}"
        )
    fn = _objective_fn(link, cfg.alpha)
    delta, value = _maximize_on_interval(
        fn, diag.bounds.delta_lb, diag.bounds.delta_ub, cfg.solver_tol
    )
    return AllocationDecision(
        DecisionMode.NOMA_PAIRED,
        PowerAllocation.split(delta, AllocationSource.OPTIMAL),
        value,
        diag,
    )


def solve_suboptimal(link: PairLink, cfg: FairnessConfig) -> AllocationDecision:
    """Endpoint rule approximating :func:`solve_optimal` at negligible cost.

    With the imperfection ratio beta/beta_star below ``cfg.tau`` the split is
    delta_lb for alpha > 1 (weak-user-favoring) and delta_ub for alpha <= 1;
    otherwise delta_ub for any alpha, since a large residual imperfection
    forces the most protective split for the strong user.
    """
    diag = _diagnostics(link)
    if not _admissible(link, diag):
        return AllocationDecision(DecisionMode.OMA_FALLBACK, None, None, diag)
    if diag.beta_ratio < cfg.tau and cfg.alpha > 1:
        delta = diag.bounds.delta_lb
    else:
        delta = diag.bounds.delta_ub
    value = float(_objective_fn(link, cfg.alpha)(delta))
    return AllocationDecision(
        DecisionMode.NOMA_PAIRED,
        PowerAllocation.split(delta, AllocationSource.SUBOPTIMAL),
        value,
        diag,
    )


def allocate_fixed_bound(link: PairLink, which: AllocationSource) -> AllocationDecision:
    """Pin the split to delta_ub or delta_lb, with the same admission gate.

    ``which`` must be AllocationSource.UPPER_BOUND or LOWER_BOUND.
    """
    if which not in (AllocationSource.UPPER_BOUND, AllocationSource.LOWER_BOUND):
        raise ValueError(f"which must select a bound, got {which!r}")
    diag = _diagnostics(link)
    if not _admissible(link, diag):
        return AllocationDecision(DecisionMode.OMA_FALLBACK, None, None, diag)
    delta = (
        diag.bounds.delta_ub
        if which is AllocationSource.UPPER_BOUND
        else diag.bounds.delta_lb
    )
    return AllocationDecision(
        DecisionMode.NOMA_PAIRED,
        PowerAllocation.split(delta, which),
        None,
        diag,
    )
