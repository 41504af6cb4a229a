"""
Union bounds.

This module contains the large-deviations (network calculus) bound on the
end-to-end waiting time of a two-queue tandem with exponential services:

    P(W > x) <= inf_theta (q (2 mu - theta) / (2 (mu - theta))
                           + q^2 mu^2 / ((mu - theta) (mu + theta))) exp(-theta x),

where beta = E[exp(theta (Y - X))] < 1 and q = beta / (1 - beta). The
infimum is searched per x.

"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from tandemtail.ccdf_curve import CcdfCurve, CurveKind
from tandemtail.distributions import Distribution, Exponential
from tandemtail.exceptions.bound_exceptions import NoFeasibleThetaException
from tandemtail.rates import mgf_increment, solve_theta
from tandemtail.utils import golden_section_min

logger = logging.getLogger(__name__)

THETA_GRID_POINTS = 400


@dataclass(frozen=True)
class LdBoundResult:
    """
    Attributes:
        theta_star (float): The optimizing exponent.
        beta_star (float): E[exp(theta_star (Y - X))], below 1.
        value (float): The bound, clamped to at most 1.
        log_value (float): Natural log of the unclamped bound.
    """

    theta_star: float
    beta_star: float
    value: float
    log_value: float

    def to_dict(self) -> dict:
        return {
            "theta_star": self.theta_star,
            "beta_star": self.beta_star,
            "value": self.value,
            "log_value": self.log_value,
        }


def _log_prefactor(beta: float, mu: float, theta: float) -> float:
    if not beta < 1.0:
        return math.inf
    q = beta / (1.0 - beta)
    prefactor = q * (2.0 * mu - theta) / (2.0 * (mu - theta)) + q * q * mu * mu / (
        (mu - theta) * (mu + theta)
    )
    return math.log(prefactor)


def ld_bound(X: Distribution, mu: float, x: float) -> LdBoundResult:
    """
    Computes the union bound at level x.

    The exponent is optimized over (0, theta_root), theta_root being the
    decay rate, where beta < 1: a 400-point grid followed by a
    golden-section refinement around the best grid point.

    Args:
        X (Distribution): Inter-arrival law.
        mu (float): Service rate at both queues.
        x (float): A non-negative level.

    Returns:
        LdBoundResult: The optimizer and the bound.

    Raises:
        UnstableModelException: If E[X] <= 1 / mu.
        NoFeasibleThetaException: If beta >= 1 on the whole grid.
    """
    if x < 0:
        raise ValueError("ld_bound needs x >= 0")
    service = Exponential(mu)
    theta_root = min(solve_theta(X, service).theta, mu)

    def objective(theta: float) -> float:
        beta = mgf_increment(X, service, theta)
        return _log_prefactor(beta, mu, theta) - theta * x

    grid = theta_root * np.arange(1, THETA_GRID_POINTS + 1) / (THETA_GRID_POINTS + 1)
    values = np.array([objective(float(t)) for t in grid])
    if not np.any(np.isfinite(values)):
        raise NoFeasibleThetaException(theta_root)
    best = int(np.argmin(values))
    left = float(grid[best - 1]) if best > 0 else theta_root * 1e-9
    right = float(grid[best + 1]) if best + 1 < grid.size else theta_root * (1.0 - 1e-12)
    theta_star, log_value = golden_section_min(objective, left, right, tol=1e-12)
    if not log_value <= values[best]:
        theta_star, log_value = float(grid[best]), float(values[best])

    beta_star = mgf_increment(X, service, theta_star)
    logger.debug("LD bound at x=%g: theta*=%g beta*=%g", x, theta_star, beta_star)
    return LdBoundResult(
        theta_star=float(theta_star),
        beta_star=float(beta_star),
        value=min(math.exp(min(log_value, 0.0)), 1.0),
        log_value=float(log_value),
    )


def ld_curve(X: Distribution, mu: float, xs: Sequence[float]) -> CcdfCurve:
    return CcdfCurve.analytic(CurveKind.LD, xs, [ld_bound(X, mu, float(x)).value for x in xs])
