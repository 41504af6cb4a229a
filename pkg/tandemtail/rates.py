"""
Decay rates.

This module solves for the exponential decay rate theta of single-queue
waiting times (the positive root of E[exp(theta (Y - X))] = 1), the abscissa
theta_plus beyond which that expectation diverges, and the cascade of rates
along a tandem together with the predicted polynomial degree of the tail
bound at every queue.

"""

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from scipy.optimize import bisect

from tandemtail.config_json_encoder import json_float
from tandemtail.distributions import Distribution
from tandemtail.exceptions.bound_exceptions import UnboundedDecayRateException
from tandemtail.exceptions.common import UnstableModelException

logger = logging.getLogger(__name__)

ROOT_TOLERANCE = 1e-12
EQUALITY_TOLERANCE = 1e-8
_MAX_HALVINGS = 60


def mgf_increment(X: Distribution, Y: Distribution, t: float) -> float:
    """
    E[exp(t (Y - X))] for independent X and Y.

    Args:
        X (Distribution): Inter-arrival law.
        Y (Distribution): Service law.
        t (float): The argument.

    Returns:
        float: The expectation, +inf outside the convergence region.
    """
    if t == 0:
        return 1.0
    upper = Y.mgf(t)
    if math.isinf(upper):
        return math.inf
    return upper * X.mgf(-t)


def check_stability(X: Distribution, services: Sequence[Distribution]) -> None:
    """
    Raises UnstableModelException unless E[X] > E[Y] for every service law.
    """
    arrival_mean = X.mean()
    service_mean = max(Y.mean() for Y in services)
    if not arrival_mean > service_mean:
        raise UnstableModelException(arrival_mean, service_mean)


@dataclass(frozen=True)
class DecayReport:
    theta_plus: float
    theta: float
    subunit_at_theta_plus: bool

    def to_dict(self) -> dict:
        return {
            "theta_plus": json_float(self.theta_plus),
            "theta": self.theta,
            "subunit_at_theta_plus": self.subunit_at_theta_plus,
        }


@dataclass(frozen=True)
class CascadeReport:
    thetas: list[float]
    indicators: list[int]
    degrees: list[int]
    per_queue_thetas: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "thetas": list(self.thetas),
            "indicators": list(self.indicators),
            "degrees": list(self.degrees),
            "per_queue_thetas": list(self.per_queue_thetas),
        }


def _upper_bracket(excess, theta_plus: float) -> float:
    if math.isfinite(theta_plus):
        for k in range(1, _MAX_HALVINGS + 1):
            hi = theta_plus * (1.0 - 2.0**-k)
            if excess(hi) > 0:
                return hi
        # the expectation only crosses 1 in the last ulp before theta_plus
        return theta_plus * (1.0 - 2.0**-_MAX_HALVINGS)
    hi = 1e-3
    for _ in range(2 * _MAX_HALVINGS):
        if excess(hi) > 0:
            return hi
        hi *= 2.0
    raise UnboundedDecayRateException(hi)


def _lower_bracket(excess, hi: float) -> float:
    lo = hi / 2.0
    for _ in range(4 * _MAX_HALVINGS):
        if excess(lo) < 0:
            return lo
        lo /= 2.0
    raise UnboundedDecayRateException(hi)


def solve_theta(X: Distribution, Y: Distribution) -> DecayReport:
    """
    Computes the decay rate of the waiting time of a GI/GI/1 queue.

    theta_plus is the analytic MGF abscissa of Y. When E[exp(theta_plus U)]
    is below 1 (a "very light" service law) the rate is theta_plus itself;
    otherwise it is the unique root of E[exp(theta U)] = 1 on (0, theta_plus),
    bracketed and refined by bisection.

    Args:
        X (Distribution): Inter-arrival law.
        Y (Distribution): Service law.

    Returns:
        DecayReport: theta_plus, theta and the subunit flag.

    Raises:
        UnstableModelException: If E[X] <= E[Y].
        UnboundedDecayRateException: If U <= 0 almost surely.
    """
    check_stability(X, [Y])
    theta_plus = Y.mgf_abscissa

    def excess(t: float) -> float:
        return mgf_increment(X, Y, t) - 1.0

    if math.isfinite(theta_plus) and excess(theta_plus) < 0:
        logger.debug("E[exp(theta_plus U)] < 1, theta = theta_plus = %g", theta_plus)
        return DecayReport(theta_plus, theta_plus, True)

    hi = _upper_bracket(excess, theta_plus)
    lo = _lower_bracket(excess, hi)
    logger.debug("Bracketing decay rate in [%g, %g]", lo, hi)
    theta = bisect(excess, lo, hi, xtol=ROOT_TOLERANCE, maxiter=500)
    logger.info("Decay rate theta = %.12g (theta_plus = %g)", theta, theta_plus)
    return DecayReport(theta_plus, float(theta), False)


def theta_cascade(X: Distribution, services: Sequence[Distribution]) -> CascadeReport:
    """
    Computes the decay-rate cascade of an M-queue tandem.

    theta_i is the running minimum of the single-queue rates of queues
    1..i. The indicator of queue i is 1 when E[exp(theta_i V_i)] equals 1
    up to EQUALITY_TOLERANCE, with V_i = Y_i - X, and the predicted degree
    grows by that indicator at every queue after the first.

    Args:
        X (Distribution): Inter-arrival law.
        services (Sequence[Distribution]): Service laws, queue by queue.

    Returns:
        CascadeReport: Rates, indicators and degrees, one entry per queue.
    """
    if len(services) == 0:
        raise ValueError("theta_cascade needs at least one queue")
    check_stability(X, services)

    per_queue = [solve_theta(X, Y).theta for Y in services]
    thetas: list[float] = []
    running = math.inf
    for theta in per_queue:
        running = min(running, theta)
        thetas.append(running)

    indicators = [
        int(abs(mgf_increment(X, Y, theta) - 1.0) < EQUALITY_TOLERANCE)
        for Y, theta in zip(services, thetas)
    ]
    degrees = [0]
    for indicator in indicators[1:]:
        degrees.append(degrees[-1] + indicator)

    logger.info("Cascade thetas=%s degrees=%s", thetas, degrees)
    return CascadeReport(thetas, indicators, degrees, per_queue)
