"""
Poly-exp bounds for the GI/M/1 -> ./M/1 tandem.

This module fits the parameters (a, A, B, C, D) of the function

    gamma(u, v) = 1{(u, v) in D_a} [1 - (A + B v + C u) exp(-theta v) - D exp(-theta u)]

on D_a = {u >= -a_+, v >= max(-a, u)}, which lower-bounds the joint law of
the two random-walk maxima of a two-queue tandem with exponential services of
rate mu at both queues. From gamma follow upper bounds on the tail of the
end-to-end waiting time (closed form, two cases) and of the sojourn time
(Monte Carlo over the services). Kingman's and Ross' single-queue bounds are
provided for comparison.

"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import bisect

from tandemtail.ccdf_curve import CcdfCurve, CurveKind
from tandemtail.distributions import (
    Deterministic,
    Distribution,
    Exponential,
    Gamma,
    regularized_gamma_pair,
)
from tandemtail.exceptions.common import UnsupportedDistributionException
from tandemtail.rates import solve_theta
from tandemtail.utils import grid_then_golden, grid_then_golden_max

logger = logging.getLogger(__name__)

SUP_GRID_STEP = 0.05
A_MIN_SCALE = 20.0
A_GRID_POINTS = 200
R_GRID_POINTS = 200
MIN_SOJOURN_SAMPLES = 1000
CASE_GAP_TOLERANCE = 1e-9


class SojournParse(Enum):
    """
    How x - (Z1 + Z2 v Y) is read in the sojourn bound.

    NESTED reads it as x - (Z1 + max(Z2, Y)), which follows from the sojourn
    time being the waiting time plus both services of the job. OUTER reads
    it as x - max(Z1 + Z2, Y).
    """

    NESTED = "nested"
    OUTER = "outer"


@dataclass(frozen=True)
class PolyExpParams:
    """
    Fitted parameters of the poly-exp function gamma.

    Attributes:
        mu (float): Service rate at both queues.
        theta (float): Decay rate.
        a (float): The shift of the domain D_a.
        A, B, C (float): Polynomial coefficients.
        D_coef (float): Coefficient of exp(-theta u).
        a1 (float): Minimizer of A2 over a >= 0.
        A_nonneg (float): min over a >= 0 of max(A1, A2).
        A_nonpos (float): min over a <= 0 of max(A1, A2, A3).
        branch (str): "nonneg" or "nonpos", whichever minimum was kept.
    """

    mu: float
    theta: float
    a: float
    A: float
    B: float
    C: float
    D_coef: float
    a1: float = 0.0
    A_nonneg: float = math.nan
    A_nonpos: float = math.nan
    branch: str = "nonneg"

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "theta": self.theta,
            "a": self.a,
            "A": self.A,
            "B": self.B,
            "C": self.C,
            "D_coef": self.D_coef,
            "a1": self.a1,
            "A_nonneg": self.A_nonneg,
            "A_nonpos": self.A_nonpos,
            "branch": self.branch,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PolyExpParams":
        return cls(**{key: data[key] for key in cls.__dataclass_fields__ if key in data})


@dataclass(frozen=True)
class SojournEstimate:
    value: float
    stderr: float


def _check_arrival(X: Distribution) -> None:
    if not isinstance(X, (Deterministic, Exponential, Gamma)):
        raise UnsupportedDistributionException(X.kind.value, "fit_gim_mm")


def base_coefficients(X: Distribution, mu: float, theta: float) -> tuple[float, float, float]:
    """
    Returns (D, C, B), the coefficients fixed by the decay rate alone.

    D = (mu - theta) / mu and C = theta (mu - theta) D / mu. B is
    C (mu E[X exp(-theta X)] - D)_+ / (1 - mu E[X exp(-theta X)]).
    """
    D = (mu - theta) / mu
    C = theta * (mu - theta) * D / mu
    m = mu * X.x_laplace(theta)
    B = C * max(m - D, 0.0) / (1.0 - m)
    return D, C, B


class _AuxiliaryFunctions:
    """
    The functions A1, A2 and A3 of the shift a whose maxima lower-bound A.
    """

    def __init__(self, X: Distribution, mu: float, theta: float, B: float, C: float, D: float):
        self.X = X
        self.mu = mu
        self.theta = theta
        self.B = B
        self.C = C
        self.D = D
        if isinstance(X, Exponential):
            self._gamma_view = Gamma(1.0, X.rate)
        elif isinstance(X, Gamma):
            self._gamma_view = X
        else:
            self._gamma_view = None

    def ratio(self, x: float) -> float:
        """The quotient whose supremum over x >= -a_+ enters A1."""
        if isinstance(self.X, Deterministic):
            return self._ratio_deterministic(x)
        if self._gamma_view is not None:
            return self._ratio_gamma(x)
        return self.ratio_quadrature(x)

    def _ratio_deterministic(self, x: float) -> float:
        c = self.X.value
        head = self.B * (1.0 / (self.mu - self.theta) - c)
        if c + x >= 0:
            return head + self.C / self.mu
        return head + self.C * (1.0 / self.mu - c - x)

    def _ratio_gamma(self, x: float) -> float:
        mu, theta, B, C = self.mu, self.theta, self.B, self.C
        alpha, beta = self._gamma_view.shape, self._gamma_view.rate
        fast, slow = beta + theta + mu, beta + theta
        k_fast = (beta / fast) ** alpha
        k_slow = (beta / slow) ** alpha
        m_fast = alpha * beta**alpha / fast ** (alpha + 1)
        m_slow = alpha * beta**alpha / slow ** (alpha + 1)
        q_fast = regularized_gamma_pair(-x, alpha, fast)[1]
        p_slow = regularized_gamma_pair(-x, alpha, slow)[0]
        p_slow_next = regularized_gamma_pair(-x, alpha + 1, slow)[0]
        q_fast_next = regularized_gamma_pair(-x, alpha + 1, fast)[1]
        decay = math.exp(-mu * x)
        lead = B / (mu - theta) + C / mu
        numerator = (
            lead * k_fast * decay * q_fast
            + (lead - C * x) * k_slow * p_slow
            - (B + C) * m_slow * p_slow_next
            - B * m_fast * decay * q_fast_next
        )
        denominator = k_fast * decay * q_fast + k_slow * p_slow
        return numerator / denominator

    def ratio_quadrature(self, x: float) -> float:
        """The A1 quotient by direct quadrature over the law of X."""
        mu, theta, B, C = self.mu, self.theta, self.B, self.C

        def served(s: float) -> float:
            return math.exp(-mu * (s + x)) if s + x >= 0 else 1.0

        def numerator(s: float) -> float:
            tilt = math.exp(-theta * s)
            if s + x >= 0:
                carry = math.exp(-mu * (s + x)) / mu
            else:
                carry = 1.0 / mu - s - x
            return B * (1.0 / (mu - theta) - s) * tilt * served(s) + C * tilt * carry

        breakpoints = [-x]
        top = self.X.expect(numerator, breakpoints)
        bottom = self.X.expect(lambda s: math.exp(-theta * s) * served(s), breakpoints)
        return top / bottom

    def a1(self, a: float) -> float:
        shift = max(a, 0.0)
        if shift == 0.0:
            return a * self.B + self.ratio(0.0)
        # the quotient is constant for x >= 0, so only [-a_+, 0] matters
        n_grid = max(3, int(math.ceil(shift / SUP_GRID_STEP)) + 1)
        _, best = grid_then_golden_max(self.ratio, -shift, 0.0, n_grid=n_grid)
        return a * self.B + best

    def a2(self, a: float) -> float:
        B, C, D = self.B, self.C, self.D
        return a * (B + C) + math.exp(-self.theta * a) * D + (B + C) / (self.mu - self.theta) - D

    def _a3_objective(self, a: float, r: float) -> float:
        mu, theta, C, D = self.mu, self.theta, self.C, self.D
        scale = D * math.exp(-theta * a)
        if r < 1e-12:
            return (scale * (mu - theta) + C) / mu
        return (-scale * math.expm1((theta - mu) * r) + C * r) / -math.expm1(-mu * r)

    def a3(self, a: float) -> float:
        """Only defined for a <= 0."""
        mu, theta, B, C, D = self.mu, self.theta, self.B, self.C, self.D
        top = -a
        bottom = min(self.X.essinf, top)
        if top - bottom <= 0:
            smallest = self._a3_objective(a, top)
        else:
            _, smallest = grid_then_golden(
                lambda r: self._a3_objective(a, r), bottom, top, n_grid=R_GRID_POINTS
            )
        arrival_rate = 1.0 / self.X.mean()
        return (
            B * (a + 1.0 / (mu - theta))
            - smallest
            + C / arrival_rate
            + math.exp(-theta * a) * D
        )

    def a1_minimizer(self) -> float:
        """argmin over a >= 0 of A2."""
        argument = self.theta * (self.mu - self.theta) / (self.mu * (self.B + self.C))
        return max(math.log(argument) / self.theta, 0.0)

    def positivity_floor(self, a: float) -> float:
        """Smallest A keeping A + B v + C u >= 0 on D_a."""
        if a >= 0:
            return (self.B + self.C) * a
        return self.B * a


def fit_gim_mm(X: Distribution, mu: float) -> PolyExpParams:
    """
    Fits the poly-exp parameters of a GI/M/1 -> ./M/1 tandem.

    theta solves E[exp(theta (Y - X))] = 1 with Y ~ Exp(mu). D, C and B
    follow directly from theta. A is the smaller of min over a >= 0 of
    max(A1, A2), attained at the last a in [0, a1] with A1 <= A2, and
    min over a <= 0 of max(A1, A2, A3), found by a grid on [-20 / theta, 0]
    refined by golden-section search. A is finally raised, if needed, so
    that A + B v + C u stays non-negative on D_a.

    Args:
        X (Distribution): Inter-arrival law, Deterministic, Exponential or Gamma.
        mu (float): Service rate at both queues.

    Returns:
        PolyExpParams: The fitted parameters.

    Raises:
        UnsupportedDistributionException: For other inter-arrival laws.
        UnstableModelException: If E[X] <= 1 / mu.
    """
    _check_arrival(X)
    theta = solve_theta(X, Exponential(mu)).theta
    D, C, B = base_coefficients(X, mu, theta)
    aux = _AuxiliaryFunctions(X, mu, theta, B, C, D)

    a1 = aux.a1_minimizer()
    if aux.a1(0.0) > aux.a2(0.0):
        a_nonneg = 0.0
    elif aux.a1(a1) <= aux.a2(a1):
        a_nonneg = a1
    else:
        a_nonneg = bisect(lambda a: aux.a1(a) - aux.a2(a), 0.0, a1, xtol=1e-10)
    A_nonneg = max(aux.a1(a_nonneg), aux.a2(a_nonneg))
    logger.debug("a >= 0 branch: a=%g A=%g (a1=%g)", a_nonneg, A_nonneg, a1)

    def nonpos_objective(a: float) -> float:
        return max(aux.a1(a), aux.a2(a), aux.a3(a))

    a_nonpos, A_nonpos = grid_then_golden(
        nonpos_objective, -A_MIN_SCALE / theta, 0.0, n_grid=A_GRID_POINTS
    )
    logger.debug("a <= 0 branch: a=%g A=%g", a_nonpos, A_nonpos)

    if A_nonpos < A_nonneg:
        a, A, branch = a_nonpos, A_nonpos, "nonpos"
    else:
        a, A, branch = a_nonneg, A_nonneg, "nonneg"
    A = max(A, aux.positivity_floor(a))

    params = PolyExpParams(
        mu=mu,
        theta=theta,
        a=float(a),
        A=float(A),
        B=B,
        C=C,
        D_coef=D,
        a1=a1,
        A_nonneg=float(A_nonneg),
        A_nonpos=float(A_nonpos),
        branch=branch,
    )
    logger.info(
        "Fitted theta=%.6g a=%.6g A=%.6g B=%.6g C=%.6g D=%.6g (%s branch)",
        theta, params.a, params.A, B, C, D, branch,
    )
    gap = case_boundary_gap(params)
    if gap > CASE_GAP_TOLERANCE:
        logger.warning("Bound jumps by %.3g across x = -a = %.6g", gap, -params.a)
    return params


def gamma_function(p: PolyExpParams, u, v):
    """
    Evaluates the fitted gamma on D_a; 0 outside of it.

    Works on scalars and numpy arrays alike, and returns 1 at u = v = +inf.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    inside = (u >= -max(p.a, 0.0)) & (v >= np.maximum(-p.a, u))
    with np.errstate(over="ignore", invalid="ignore"):
        v_finite = np.where(np.isinf(v), 0.0, v)
        u_finite = np.where(np.isinf(u), 0.0, u)
        polynomial = (p.A + p.B * v_finite + p.C * u_finite) * np.exp(-p.theta * v_finite)
        polynomial = np.where(np.isinf(v), 0.0, polynomial)
        exponential = np.where(np.isinf(u), 0.0, p.D_coef * np.exp(-p.theta * u_finite))
        value = np.where(inside, 1.0 - polynomial - exponential, 0.0)
    if value.ndim == 0:
        return float(value)
    return value


def _case_large_x(p: PolyExpParams, x: float) -> float:
    mu, theta, a = p.mu, p.theta, p.a
    A, B, C, D = p.A, p.B, p.C, p.D_coef
    slow = math.exp(-theta * x)
    fast = math.exp(-mu * x + (theta - mu) * a)
    square = mu * mu - theta * theta
    shifted = mu * (1.0 + (mu - theta) * a) / (2.0 * (mu - theta) ** 2)
    return (
        0.5 * math.exp(-mu * (x + a))
        + D * ((2.0 * mu - theta) * slow - mu * fast) / (2.0 * (mu - theta))
        + C * (x * mu * mu / square * slow + shifted * fast - mu / (2.0 * (mu - theta) ** 2) * slow)
        + A * (slow * mu * mu / square - fast * mu / (2.0 * (mu - theta)))
        + B
        * (
            mu * mu / square * x * slow
            - 2.0 * mu * mu * theta / square**2 * slow
            + shifted * fast
        )
    )


def _case_small_x(p: PolyExpParams, x: float) -> float:
    mu, theta, a = p.mu, p.theta, p.a
    A, B, C, D = p.A, p.B, p.C, p.D_coef
    return (
        1.0
        - 0.5 * math.exp(mu * (x + a))
        + 0.5 * D * math.exp((mu - theta) * x + mu * a)
        + mu
        / (2.0 * (mu + theta))
        * math.exp((mu + theta) * a + mu * x)
        * (A + B * (1.0 / (mu + theta) - a) + C * x)
    )


def eval_bound(p: PolyExpParams, x: float) -> float:
    """
    Upper bound on P(W > x) for the end-to-end waiting time.

    The closed form differs on x >= (-a)_+ and on 0 <= x < -a; the result is
    clamped to [0, 1].

    Args:
        p (PolyExpParams): Fitted parameters.
        x (float): A non-negative level.

    Returns:
        float: The bound.
    """
    if x < 0:
        raise ValueError("eval_bound needs x >= 0")
    if x >= max(-p.a, 0.0):
        value = _case_large_x(p, x)
    else:
        value = _case_small_x(p, x)
    return min(max(value, 0.0), 1.0)


def case_boundary_gap(p: PolyExpParams) -> float:
    """
    |bound just right of x = -a minus bound just left of it| when a < 0,
    0 otherwise. The two closed forms agree at x = -a up to rounding.
    """
    if p.a >= 0:
        return 0.0
    return abs(_case_large_x(p, -p.a) - _case_small_x(p, -p.a))


def waiting_bound_quadrature(p: PolyExpParams, x: float) -> float:
    """
    The waiting-time bound 1 - E[gamma(x - (Z - Y)_+, x - (Z - Y))] computed
    by quadrature against the Laplace density (mu / 2) exp(-mu |s|) of Z - Y.

    Equals eval_bound up to quadrature error; clamped to [0, 1].
    """
    if x < 0:
        raise ValueError("waiting_bound_quadrature needs x >= 0")
    mu = p.mu

    def integrand(s: float) -> float:
        return gamma_function(p, x - max(s, 0.0), x - s) * 0.5 * mu * math.exp(-mu * abs(s))

    # gamma vanishes for s > x + a
    top = x + p.a
    total = 0.0
    pieces = [(-math.inf, min(0.0, top))]
    if top > 0:
        pieces.append((0.0, top))
    for left, right in pieces:
        value, _ = quad(integrand, left, right, epsabs=1e-13, epsrel=1e-11, limit=200)
        total += value
    return min(max(1.0 - total, 0.0), 1.0)


def sojourn_bound(
    p: PolyExpParams,
    mu: float,
    x: float,
    n_mc: int,
    rng: np.random.Generator,
    parse: SojournParse = SojournParse.NESTED,
) -> SojournEstimate:
    """
    Upper bound on P(D > x) for the end-to-end sojourn time.

    Computes 1 - E[1{Z1 + Y < x} gamma(x - (Z1 + max(Z2, Y)), x - (Z1 + Z2))]
    by Monte Carlo over i.i.d. Exp(mu) services Z1, Z2 and Y.

    Args:
        p (PolyExpParams): Fitted parameters.
        mu (float): Service rate.
        x (float): A non-negative level.
        n_mc (int): Number of samples, at least 1000.
        rng (np.random.Generator): The random stream.
        parse (SojournParse): Reading of the first argument of gamma.

    Returns:
        SojournEstimate: The clamped estimate and its standard error.
    """
    if x < 0:
        raise ValueError("sojourn_bound needs x >= 0")
    if n_mc < MIN_SOJOURN_SAMPLES:
        raise ValueError(f"sojourn_bound needs n_mc >= {MIN_SOJOURN_SAMPLES}")
    service = Exponential(mu)
    z1 = service.sample(rng, n_mc)
    z2 = service.sample(rng, n_mc)
    y = service.sample(rng, n_mc)
    if parse is SojournParse.NESTED:
        u = x - (z1 + np.maximum(z2, y))
    else:
        u = x - np.maximum(z1 + z2, y)
    v = x - (z1 + z2)
    terms = np.where(z1 + y < x, gamma_function(p, u, v), 0.0)
    value = 1.0 - float(np.mean(terms))
    stderr = float(np.std(terms, ddof=1) / math.sqrt(n_mc))
    return SojournEstimate(min(max(value, 0.0), 1.0), stderr)


def kingman_bound(X: Distribution, Y: Distribution, x: float) -> float:
    """Kingman's bound exp(-theta x) on the waiting-time tail of a GI/GI/1 queue."""
    if x < 0:
        raise ValueError("kingman_bound needs x >= 0")
    return math.exp(-solve_theta(X, Y).theta * x)


def _conditional_overshoot(X: Distribution, Y: Distribution, theta: float, u: float) -> float:
    """E[exp(theta (U - u)) | U > u] with U = Y - X, by quadrature over X."""

    def joint(s: float) -> float:
        survival = Y.tail(u + s)
        if survival <= 0.0:
            return 0.0
        return survival * Y.cond_exp_moment(theta, 0, u + s)

    mass = X.expect(lambda s: Y.tail(u + s))
    if mass <= 0.0:
        return math.inf
    return X.expect(joint) / mass


def ross_prefactor(X: Distribution, Y: Distribution, closed_form: bool = True) -> float:
    """
    Ross' prefactor 1 / inf_{u >= 0} E[exp(theta (U - u)) | U > u].

    For exponential services the conditional expectation equals
    mu / (mu - theta) for every u and the prefactor is (mu - theta) / mu.
    Otherwise the infimum is searched on a grid over [0, u_max], with
    P(Y > u_max) < 1e-10, refined by golden-section search.

    Args:
        X (Distribution): Inter-arrival law.
        Y (Distribution): Service law.
        closed_form (bool): Use the exponential shortcut when available.
    """
    theta = solve_theta(X, Y).theta
    if closed_form and isinstance(Y, Exponential):
        return (Y.rate - theta) / Y.rate
    u_max = 1.0
    while Y.tail(u_max) >= 1e-10:
        u_max *= 2.0
    _, smallest = grid_then_golden(
        lambda u: _conditional_overshoot(X, Y, theta, u), 0.0, u_max, n_grid=100
    )
    return min(1.0 / smallest, 1.0)


def ross_bound(X: Distribution, Y: Distribution, x: float) -> float:
    """Ross' bound prefactor * exp(-theta x), exact for GI/M/1 queues."""
    if x < 0:
        raise ValueError("ross_bound needs x >= 0")
    theta = solve_theta(X, Y).theta
    return min(ross_prefactor(X, Y) * math.exp(-theta * x), 1.0)


def bound_curve(p: PolyExpParams, xs: Sequence[float]) -> CcdfCurve:
    return CcdfCurve.analytic(CurveKind.POLYEXP, xs, [eval_bound(p, float(x)) for x in xs])


def sojourn_curve(
    p: PolyExpParams,
    xs: Sequence[float],
    n_mc: int,
    rng: np.random.Generator,
    parse: SojournParse = SojournParse.NESTED,
) -> CcdfCurve:
    estimates = [sojourn_bound(p, p.mu, float(x), n_mc, rng, parse) for x in xs]
    return CcdfCurve(
        CurveKind.SOJOURN,
        np.asarray(xs, dtype=float),
        np.array([e.value for e in estimates]),
        np.array([e.stderr for e in estimates]),
    )


def kingman_curve(X: Distribution, Y: Distribution, xs: Sequence[float]) -> CcdfCurve:
    theta = solve_theta(X, Y).theta
    return CcdfCurve.analytic(CurveKind.KINGMAN, xs, np.exp(-theta * np.asarray(xs, dtype=float)))


def ross_curve(X: Distribution, Y: Distribution, xs: Sequence[float]) -> CcdfCurve:
    theta = solve_theta(X, Y).theta
    prefactor = ross_prefactor(X, Y)
    return CcdfCurve.analytic(
        CurveKind.ROSS, xs, prefactor * np.exp(-theta * np.asarray(xs, dtype=float))
    )
