"""
Distributions module.

This module contains the probability laws used for inter-arrival and service
times (deterministic, exponential, gamma and the "very light" law with density
proportional to exp(-mu x) / (1 + x^2)), together with the quantities the
bounds need from them: moments, moment generating functions, Laplace
transforms, tails, conditional exponential moments and samples.

Every law is an immutable value. Module-level functions (``mean``, ``mgf``,
``laplace``, ``tail``, ``cond_exp_moment``, ``sample``) delegate to the
methods of the law so that callers can use either style.

"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, ClassVar, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from tandemtail.exceptions.common import UnsupportedDistributionException
from tandemtail.exceptions.distribution_exceptions import (
    ConditioningOnNullException,
    InvalidParameterException,
)

# log of the largest finite double, used to turn overflowing exponentials into +inf
_LOG_MAX = 709.0
_QUAD_EPSREL = 1e-10
_QUAD_EPSABS = 1e-14
_QUAD_LIMIT = 200


class DistributionKind(Enum):
    """
    An enumeration of the supported probability laws.

    The values are the "kind" tags used in the JSON representation.
    """

    DETERMINISTIC = "deterministic"
    EXPONENTIAL = "exponential"
    GAMMA = "gamma"
    VERYLIGHT = "verylight"


def _check_positive(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating)):
        raise TypeError(f"{name} must be a real number")
    if not math.isfinite(value) or value <= 0:
        raise InvalidParameterException(name, value)
    return float(value)


def _safe_exp(x: float) -> float:
    return math.inf if x > _LOG_MAX else math.exp(x)


def _quad(func: Callable[[float], float], lower: float, upper: float, points=()) -> float:
    """
    Adaptive Gauss-Kronrod quadrature of func over [lower, upper].

    Finite breakpoints strictly inside the range split the integral so that
    integrands with jumps (indicators) are integrated piecewise.
    """
    cuts = sorted(p for p in points if lower < p < upper and math.isfinite(p))
    edges = [lower, *cuts, upper]
    total = 0.0
    for left, right in zip(edges[:-1], edges[1:]):
        value, _ = quad(
            func,
            left,
            right,
            epsabs=_QUAD_EPSABS,
            epsrel=_QUAD_EPSREL,
            limit=_QUAD_LIMIT,
        )
        total += value
    return total


def _regularized_gamma_series(a: float, z: float, accuracy: float, max_iteration: int) -> float:
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(max_iteration):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < abs(total) * accuracy:
            break
    return total * math.exp(-z + a * math.log(z) - math.lgamma(a))


def _regularized_gamma_continued_fraction(
    a: float, z: float, accuracy: float, max_iteration: int
) -> float:
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iteration + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < accuracy:
            break
    return math.exp(-z + a * math.log(z) - math.lgamma(a)) * h


def regularized_gamma_pair(
    x: float, alpha: float, beta: float, accuracy: float = 1e-15, max_iteration: int = 1000
) -> tuple[float, float]:
    """
    Returns (P, Q) = (P(Gamma(alpha, beta) <= x), P(Gamma(alpha, beta) > x)).

    The smaller of the two is computed directly (series when beta x < alpha + 1,
    continued fraction otherwise) and the other one as its complement, so
    that tails far out keep their relative precision.
    """
    if x <= 0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    z = beta * x
    if z < alpha + 1.0:
        lower = _regularized_gamma_series(alpha, z, accuracy, max_iteration)
        return lower, 1.0 - lower
    upper = _regularized_gamma_continued_fraction(alpha, z, accuracy, max_iteration)
    return 1.0 - upper, upper


def reg_incomplete_gamma(x: float, alpha: float, beta: float) -> float:
    """
    Regularized lower incomplete gamma function G(x, alpha, beta).

    G(x, alpha, beta) is the distribution function at x of a Gamma law with
    shape alpha and rate beta. It is 0 for x <= 0 and 1 for x = +inf.

    Args:
        x (float): The evaluation point.
        alpha (float): Shape, strictly positive.
        beta (float): Rate, strictly positive.

    Returns:
        float: G(x, alpha, beta) in [0, 1].
    """
    _check_positive("alpha", alpha)
    _check_positive("beta", beta)
    return regularized_gamma_pair(x, alpha, beta)[0]


@dataclass(frozen=True)
class Distribution:
    """
    Base class of all probability laws.

    Subclasses are frozen dataclasses; they implement the analytic pieces and
    inherit generic quadrature fallbacks for the rest.
    """

    kind: ClassVar[DistributionKind]

    @property
    def essinf(self) -> float:
        """Essential infimum of the law."""
        return 0.0

    @property
    def mgf_abscissa(self) -> float:
        """sup{t : E[exp(t R)] < inf}, known analytically per kind."""
        raise NotImplementedError("mgf_abscissa must be implemented in subclasses")

    def mean(self) -> float:
        raise NotImplementedError("mean() must be implemented in subclasses")

    def mgf(self, t: float) -> float:
        raise NotImplementedError("mgf() must be implemented in subclasses")

    def tail(self, r: float) -> float:
        raise NotImplementedError("tail() must be implemented in subclasses")

    def pdf(self, r: float) -> float:
        raise UnsupportedDistributionException(self.kind.value, "pdf")

    def laplace(self, theta: float) -> float:
        """
        Laplace transform E[exp(-theta R)].

        Args:
            theta (float): A non-negative argument.

        Raises:
            ValueError: If theta is negative.
        """
        if theta < 0:
            raise ValueError("laplace() needs theta >= 0")
        if theta == 0:
            return 1.0
        return self.mgf(-theta)

    def expect(self, g: Callable[[float], float], breakpoints: Sequence[float] = ()) -> float:
        """
        Computes E[g(R)] by quadrature against the density.

        Args:
            g (Callable[[float], float]): The integrand.
            breakpoints (Sequence[float]): Points where g may jump.
        """
        return _quad(lambda r: g(r) * self.pdf(r), 0.0, math.inf, breakpoints)

    def x_laplace(self, theta: float) -> float:
        """E[R exp(-theta R)]."""
        return self.expect(lambda r: r * math.exp(-theta * r))

    def cond_exp_moment(self, theta: float, i: int, r: float) -> float:
        """
        Conditional exponential moment E[(R - r)^i exp(theta (R - r)) | R > r].

        Args:
            theta (float): Exponent, below the MGF abscissa.
            i (int): Non-negative polynomial order.
            r (float): Conditioning threshold.

        Returns:
            float: The conditional moment, +inf if theta is at or beyond the
            MGF abscissa.

        Raises:
            ConditioningOnNullException: If P(R > r) = 0.
        """
        _check_order(i)
        survival = self.tail(r)
        if survival <= 0.0:
            raise ConditioningOnNullException(self.kind.value, r)
        if i == 0 and theta == 0.0:
            return 1.0
        if theta >= self.mgf_abscissa:
            return math.inf

        def integrand(x: float) -> float:
            return (x - r) ** i * math.exp(theta * (x - r)) * self.pdf(x)

        return _quad(integrand, max(r, 0.0), math.inf) / survival

    def sample(self, rng: np.random.Generator, size=None):
        raise UnsupportedDistributionException(self.kind.value, "sample")

    def to_dict(self) -> dict:
        raise NotImplementedError("to_dict() must be implemented in subclasses")

    @classmethod
    def from_dict(cls, data: dict) -> "Distribution":
        """
        Builds a law from its JSON representation.

        Raises:
            ValueError: If the kind is unknown.
        """
        kind = data.get("kind")
        for subclass in (Deterministic, Exponential, Gamma, VeryLight):
            if subclass.kind.value == kind:
                return subclass._from_fields(data)
        raise ValueError(f"Unknown distribution kind {kind!r}")


def _check_order(i: int) -> None:
    if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or i < 0:
        raise ValueError("moment order i must be a non-negative integer")


@dataclass(frozen=True)
class Deterministic(Distribution):
    value: float
    kind: ClassVar[DistributionKind] = DistributionKind.DETERMINISTIC

    def __post_init__(self):
        object.__setattr__(self, "value", _check_positive("value", self.value))

    @property
    def essinf(self) -> float:
        return self.value

    @property
    def mgf_abscissa(self) -> float:
        return math.inf

    def mean(self) -> float:
        return self.value

    def mgf(self, t: float) -> float:
        return _safe_exp(t * self.value)

    def tail(self, r: float) -> float:
        return 1.0 if r < self.value else 0.0

    def expect(self, g, breakpoints=()) -> float:
        return float(g(self.value))

    def x_laplace(self, theta: float) -> float:
        return self.value * math.exp(-theta * self.value)

    def cond_exp_moment(self, theta: float, i: int, r: float) -> float:
        _check_order(i)
        if self.value <= r:
            raise ConditioningOnNullException(self.kind.value, r)
        gap = self.value - r
        return gap**i * _safe_exp(theta * gap)

    def sample(self, rng: np.random.Generator, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "value": self.value}

    @classmethod
    def _from_fields(cls, data: dict) -> "Deterministic":
        return cls(data["value"])


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float
    kind: ClassVar[DistributionKind] = DistributionKind.EXPONENTIAL

    def __post_init__(self):
        object.__setattr__(self, "rate", _check_positive("rate", self.rate))

    @property
    def mgf_abscissa(self) -> float:
        return self.rate

    def mean(self) -> float:
        return 1.0 / self.rate

    def mgf(self, t: float) -> float:
        if t >= self.rate:
            return math.inf
        return self.rate / (self.rate - t)

    def tail(self, r: float) -> float:
        if r <= 0:
            return 1.0
        return math.exp(-self.rate * r)

    def pdf(self, r: float) -> float:
        if r < 0:
            return 0.0
        return self.rate * math.exp(-self.rate * r)

    def x_laplace(self, theta: float) -> float:
        return self.rate / (self.rate + theta) ** 2

    def cond_exp_moment(self, theta: float, i: int, r: float) -> float:
        """
        Closed form of the conditional exponential moment.

        For r >= 0 memorylessness gives rate i! / (rate - theta)^(i + 1) for
        every r. For r < 0 the condition is void and the binomial expansion of
        (R + |r|)^i is used.
        """
        _check_order(i)
        if theta >= self.rate:
            return math.inf
        gap = self.rate - theta
        if r >= 0:
            return self.rate * math.factorial(i) / gap ** (i + 1)
        shift = -r
        total = sum(
            math.comb(i, k) * shift ** (i - k) * self.rate * math.factorial(k) / gap ** (k + 1)
            for k in range(i + 1)
        )
        return _safe_exp(theta * shift) * total

    def sample(self, rng: np.random.Generator, size=None):
        # inverse CDF keeps one uniform per draw
        return -np.log1p(-rng.random(size)) / self.rate

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "rate": self.rate}

    @classmethod
    def _from_fields(cls, data: dict) -> "Exponential":
        return cls(data["rate"])


@dataclass(frozen=True)
class Gamma(Distribution):
    shape: float
    rate: float
    kind: ClassVar[DistributionKind] = DistributionKind.GAMMA

    def __post_init__(self):
        object.__setattr__(self, "shape", _check_positive("shape", self.shape))
        object.__setattr__(self, "rate", _check_positive("rate", self.rate))

    @property
    def mgf_abscissa(self) -> float:
        return self.rate

    def mean(self) -> float:
        return self.shape / self.rate

    def mgf(self, t: float) -> float:
        if t >= self.rate:
            return math.inf
        return _safe_exp(self.shape * math.log(self.rate / (self.rate - t)))

    def tail(self, r: float) -> float:
        return regularized_gamma_pair(r, self.shape, self.rate)[1]

    def pdf(self, r: float) -> float:
        if r <= 0:
            if r == 0 and self.shape == 1:
                return self.rate
            return 0.0
        return math.exp(
            self.shape * math.log(self.rate)
            + (self.shape - 1) * math.log(r)
            - self.rate * r
            - gammaln(self.shape)
        )

    def x_laplace(self, theta: float) -> float:
        return self.shape * self.rate**self.shape / (self.rate + theta) ** (self.shape + 1)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.gamma(self.shape, 1.0 / self.rate, size)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "shape": self.shape, "rate": self.rate}

    @classmethod
    def _from_fields(cls, data: dict) -> "Gamma":
        return cls(data["shape"], data["rate"])


def _very_light_normalizer(rate: float) -> float:
    mass = _quad(lambda x: math.exp(-rate * x) / (1.0 + x * x), 0.0, math.inf)
    return 1.0 / mass


@dataclass(frozen=True)
class VeryLight(Distribution):
    """
    Law with density normalizer * exp(-rate x) / (1 + x^2) on x >= 0.

    Its MGF is finite at the abscissa itself, E[exp(rate R)] =
    normalizer * pi / 2, which makes the decay rate of a queue fed by it equal
    to the abscissa whenever the arrivals are slow enough. The normalizer is
    computed once by quadrature at construction.
    """

    rate: float
    normalizer: float = field(default=0.0, compare=False)
    kind: ClassVar[DistributionKind] = DistributionKind.VERYLIGHT

    def __post_init__(self):
        rate = _check_positive("rate", self.rate)
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "normalizer", _very_light_normalizer(rate))

    @property
    def mgf_abscissa(self) -> float:
        return self.rate

    def pdf(self, r: float) -> float:
        if r < 0:
            return 0.0
        return self.normalizer * math.exp(-self.rate * r) / (1.0 + r * r)

    def mean(self) -> float:
        return self.expect(lambda r: r)

    def mgf(self, t: float) -> float:
        if t > self.rate:
            return math.inf
        if t == self.rate:
            return self.normalizer * math.pi / 2.0
        return self.normalizer * _quad(
            lambda x: math.exp((t - self.rate) * x) / (1.0 + x * x), 0.0, math.inf
        )

    def tail(self, r: float) -> float:
        if r <= 0:
            return 1.0
        return _quad(self.pdf, r, math.inf)

    def cond_exp_moment(self, theta: float, i: int, r: float) -> float:
        if theta > self.rate:
            return math.inf
        _check_order(i)
        survival = self.tail(r)
        if survival <= 0.0:
            raise ConditioningOnNullException(self.kind.value, r)
        if i == 0 and theta == 0.0:
            return 1.0

        def integrand(x: float) -> float:
            return (x - r) ** i * math.exp(theta * (x - r)) * self.pdf(x)

        return _quad(integrand, max(r, 0.0), math.inf) / survival

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "rate": self.rate}

    @classmethod
    def _from_fields(cls, data: dict) -> "VeryLight":
        return cls(data["rate"])


def very_light_arrival_floor(service: VeryLight) -> float:
    """
    Smallest constant inter-arrival time for which a VeryLight service law
    keeps E[exp(rate (Y - X))] below 1: max(E[Y], ln(normalizer pi / 2) / rate).
    """
    return max(service.mean(), math.log(service.normalizer * math.pi / 2.0) / service.rate)


def mean(d: Distribution) -> float:
    return d.mean()


def mgf(d: Distribution, t: float) -> float:
    return d.mgf(t)


def laplace(d: Distribution, theta: float) -> float:
    return d.laplace(theta)


def tail(d: Distribution, r: float) -> float:
    return d.tail(r)


def cond_exp_moment(d: Distribution, theta: float, i: int, r: float) -> float:
    return d.cond_exp_moment(theta, i, r)


def sample(d: Distribution, rng: np.random.Generator, size=None):
    return d.sample(rng, size)


def rescaled(d: Distribution, factor: float) -> Distribution:
    """
    The law of factor * R.

    Raises:
        UnsupportedDistributionException: For VeryLight, which is not closed
            under scaling.
    """
    factor = _check_positive("factor", factor)
    if isinstance(d, Deterministic):
        return Deterministic(d.value * factor)
    if isinstance(d, Exponential):
        return Exponential(d.rate / factor)
    if isinstance(d, Gamma):
        return Gamma(d.shape, d.rate / factor)
    raise UnsupportedDistributionException(d.kind.value, "rescaled")
