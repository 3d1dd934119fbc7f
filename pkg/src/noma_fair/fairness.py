"""Alpha-fair utility and the alpha-fair throughput metric.

The utility family  U(x) = x^(1-alpha)/(1-alpha)  (log x at alpha = 1)
trades aggregate throughput against equality between users: alpha = 0 is
throughput maximization, alpha = 1 proportional fairness, alpha -> inf
max-min fairness.

The pair-level performance metric T_alpha is the generalized (power) mean
of the two rates with exponent (1 - alpha); at alpha = 1 it is their
geometric mean.  It always lies between min and max of the rates and is
non-increasing in alpha for unequal rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["FairnessConfig", "utility", "alpha_throughput"]


@dataclass(frozen=True)
class FairnessConfig:
    """Scheduler parameters shared by the allocators.

    alpha:      fairness exponent, >= 0 (alpha = 1 uses the log branch).
    tau:        imperfection-ratio threshold of the sub-optimal rule, in (0, 1).
    solver_tol: absolute tolerance on the optimal power fraction.
    """

    alpha: float
    tau: float = 0.5
    solver_tol: float = 1e-9

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be >= 0, got {self.alpha!r}")
        if not (0.0 < self.tau < 1.0):
            raise ValueError(f"tau must lie in (0, 1), got {self.tau!r}")
        if not (math.isfinite(self.solver_tol) and self.solver_tol > 0):
            raise ValueError(f"solver_tol must be positive, got {self.solver_tol!r}")


def utility(x, alpha: float):
    """Alpha-fair utility of a positive rate.

    Returns x^(1-alpha)/(1-alpha) for alpha > 0, alpha != 1; ln(x) at
    alpha = 1; and x itself at alpha = 0 (the throughput-maximizing limit,
    accepted as an extension to simplify sweeps).  Scalar/ndarray
    transparent.  Raises ValueError for non-positive rates, where the
    utility is unbounded below.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha!r}")
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError(f"utility requires positive finite rates, got {x!r}")
    if alpha == 0:
        out = arr
    elif alpha == 1:
        out = np.log(arr)
    else:
        out = arr ** (1.0 - alpha) / (1.0 - alpha)
    return float(out) if out.ndim == 0 else out


def alpha_throughput(r_s, r_w, alpha: float):
    """Alpha-fair throughput of a rate pair: the (1-alpha)-power mean.

    ((r_s^(1-alpha) + r_w^(1-alpha)) / 2)^(1/(1-alpha)) for alpha != 1 and
    sqrt(r_s * r_w) at alpha = 1.  The 1/2 applies to the whole sum so that
    the metric is symmetric in the users and continuous through alpha = 1.
    Evaluated in log space so large exponents neither overflow nor lose the
    ordering.  Scalar/ndarray transparent.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha!r}")
    rs = np.asarray(r_s, dtype=float)
    rw = np.asarray(r_w, dtype=float)
    for name, arr in (("r_s", rs), ("r_w", rw)):
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ValueError(f"{name} must be positive and finite, got {arr!r}")
    if alpha == 1:
        out = np.sqrt(rs * rw)
    else:
        p = 1.0 - alpha
        out = np.exp((np.logaddexp(p * np.log(rs), p * np.log(rw)) - math.log(2.0)) / p)
    return float(out) if out.ndim == 0 else out
