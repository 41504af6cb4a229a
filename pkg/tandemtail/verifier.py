"""
Verifier.

This module certifies numerically the conditions the bounds rest on:

- the integral equation of the joint law psi(u, v) = P(T1 <= u, T2 <= v) of
  the two random-walk maxima,

      psi(u, v) = E[1{u >= U} psi((u - U) ^ (v - V), v - V)],

  with U = Y - X and V = Z - X;
- the sub-solution inequality of a fitted poly-exp gamma (and of Kingman's
  single-queue gamma), by Monte Carlo;
- the eight sufficient inequalities behind the fit, by quadrature;
- the dominance of a bound curve over a simulated one.

Every check returns a VerificationReport. Stochastic checks compare the two
sides in units of their standard errors and are reproducible given the
random stream they are handed.

"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from tandemtail.ccdf_curve import CcdfCurve
from tandemtail.config_json_encoder import json_float
from tandemtail.distributions import Distribution, Exponential
from tandemtail.exceptions.verifier_exceptions import GridMismatchException
from tandemtail.kernels import advance_walks, joint_cdf_counts
from tandemtail.polyexp_bounds import PolyExpParams, gamma_function
from tandemtail.rates import check_stability, solve_theta

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 2000
MIN_HORIZON = 100
WALK_BLOCK = 100
WALK_CHUNK = 4096
EARLY_EXIT_PROBABILITY = 1e-9
MAX_OUTER_DRAWS = 4000

FIXED_POINT_SIGMA = 4.0
INEQUALITY_SIGMA = 4.0
DOMINANCE_SIGMA = 3.0
FIXED_POINT_PASS_FRACTION = 0.95
QUADRATURE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class VerificationRecord:
    """
    Result of a check at one grid point.

    Attributes:
        point (tuple): The evaluation point, (u, v) or (x,).
        lhs (float): Left side of the checked relation.
        rhs (float): Right side of the checked relation.
        stderr (float): Standard error of lhs - rhs, 0 for deterministic checks.
        passed (bool): Whether the relation holds within tolerance.
        violation (float): How far the point is past its tolerance, <= 0 when
            it passes.
        margins (list[float] | None): Per-inequality relative margins of
            the eight-inequality check, nan where vacuous.
        vacuous (bool): Whether the relation holds trivially at the point.
    """

    point: tuple
    lhs: float
    rhs: float
    stderr: float
    passed: bool
    violation: float
    margins: Optional[list] = None
    vacuous: bool = False

    def to_dict(self) -> dict:
        data = {
            "point": [json_float(c) for c in self.point],
            "lhs": json_float(self.lhs),
            "rhs": json_float(self.rhs),
            "stderr": json_float(self.stderr),
            "passed": self.passed,
            "violation": json_float(self.violation),
            "vacuous": self.vacuous,
        }
        if self.margins is not None:
            data["margins"] = [json_float(m) for m in self.margins]
        return data


@dataclass(frozen=True)
class VerificationReport:
    """
    Per-grid-point results of one check.

    Attributes:
        check_name (str): Name of the check.
        grid (list[tuple]): The evaluation points.
        pass_count (int): Number of passing points.
        fail_count (int): Number of failing points.
        worst_violation (float): Largest violation over the grid; <= 0 iff
            every point passes.
        tolerance (float): The k-sigma factor or the absolute tolerance used.
        details (list[VerificationRecord]): One record per grid point.
        required_fraction (float): Share of passing points the check needs.
    """

    check_name: str
    grid: list
    pass_count: int
    fail_count: int
    worst_violation: float
    tolerance: float
    details: list = field(default_factory=list)
    required_fraction: float = 1.0

    @classmethod
    def from_records(
        cls,
        check_name: str,
        records: Sequence[VerificationRecord],
        tolerance: float,
        required_fraction: float = 1.0,
    ) -> "VerificationReport":
        passes = sum(1 for r in records if r.passed)
        worst = max((r.violation for r in records), default=-math.inf)
        report = cls(
            check_name=check_name,
            grid=[r.point for r in records],
            pass_count=passes,
            fail_count=len(records) - passes,
            worst_violation=float(worst),
            tolerance=tolerance,
            details=list(records),
            required_fraction=required_fraction,
        )
        logger.info(
            "%s: %d/%d points pass (worst violation %.3g)",
            check_name,
            passes,
            len(records),
            report.worst_violation,
        )
        return report

    @property
    def passed(self) -> bool:
        total = self.pass_count + self.fail_count
        return self.pass_count >= self.required_fraction * total

    def summary(self) -> str:
        """Fixed-width text rendering, one line per grid point."""
        lines = [
            f"{self.check_name}: {'PASS' if self.passed else 'FAIL'} "
            f"({self.pass_count}/{self.pass_count + self.fail_count}, "
            f"tolerance {self.tolerance:g}, worst violation {self.worst_violation:.3e})",
            f"{'point':>28} {'lhs':>14} {'rhs':>14} {'stderr':>11}  status",
        ]
        for r in self.details:
            point = ", ".join(f"{c:g}" for c in r.point)
            status = "vacuous" if r.vacuous else ("ok" if r.passed else "FAIL")
            lines.append(
                f"{'(' + point + ')':>28} {r.lhs:>14.6e} {r.rhs:>14.6e} {r.stderr:>11.3e}  {status}"
            )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "passed": self.passed,
            "pass_count": self.pass_count,
            "fail_count": self.fail_count,
            "worst_violation": json_float(self.worst_violation),
            "tolerance": self.tolerance,
            "required_fraction": self.required_fraction,
            "grid": [[json_float(c) for c in point] for point in self.grid],
            "details": [r.to_dict() for r in self.details],
        }


@dataclass(frozen=True)
class PsiEstimate:
    value: float
    stderr: float
    truncation_bias: float


@dataclass(frozen=True)
class WalkMaxima:
    """
    Samples of the two maxima of a finite-horizon walk.

    Attributes:
        t1 (np.ndarray): max over i >= 1 of U_1 + ... + U_i.
        t2 (np.ndarray): max over 1 <= i < j of V_1 + ... + V_i + U_{i+1} + ... + U_j.
        truncation_bias (float): Upper bound on the probability that steps
            beyond the simulated ones would change (t1, t2).
    """

    t1: np.ndarray
    t2: np.ndarray
    truncation_bias: float

    @property
    def size(self) -> int:
        return int(self.t1.size)

    def joint_cdf(self, u: float, v: float) -> tuple[float, float]:
        """Empirical P(T1 <= u, T2 <= v) and its binomial standard error."""
        p = float(np.mean((self.t1 <= u) & (self.t2 <= v)))
        return p, math.sqrt(p * (1.0 - p) / self.size)


def _draw_increments(X: Distribution, Y: Distribution, Z, rng: np.random.Generator, size):
    x = np.asarray(X.sample(rng, size), dtype=float)
    u = np.asarray(Y.sample(rng, size), dtype=float) - x
    if Z is None:
        return u, -x
    return u, np.asarray(Z.sample(rng, size), dtype=float) - x


def _improvement_probability(pu, pv, head, t1, t2, theta_u: float, theta_m: float) -> np.ndarray:
    # Kingman tails of the walk continuations beyond the last simulated step
    with np.errstate(over="ignore", invalid="ignore"):
        p1 = np.exp(-theta_u * np.maximum(t1 - pu, 0.0))
        p2 = np.exp(-theta_u * np.maximum(t2 - head - pu, 0.0))
        s = np.maximum(t2 - pv, 0.0)
        p3 = (1.0 + theta_m * s) * np.exp(-theta_m * s)
    return np.minimum(np.nan_to_num(p1 + p2 + p3, nan=1.0), 1.0)


def sample_walk_maxima(
    X: Distribution,
    Y: Distribution,
    Z: Optional[Distribution],
    horizon: int,
    n_mc: int,
    rng: np.random.Generator,
) -> WalkMaxima:
    """
    Simulates n_mc walks of (U, V) = (Y - X, Z - X) for at most horizon
    steps and records their maxima T1 and T2.

    A batch stops early once the Kingman bound on the probability that later
    steps improve either maximum falls below 1e-9 on average. Z = None stands
    for Z = 0, the single-queue case.

    Raises:
        UnstableModelException: If E[X] does not exceed E[Y] (and E[Z]).
    """
    if horizon < MIN_HORIZON:
        raise ValueError(f"horizon must be at least {MIN_HORIZON}")
    if n_mc < 1:
        raise ValueError("n_mc must be positive")
    check_stability(X, [Y] if Z is None else [Y, Z])
    theta_u = solve_theta(X, Y).theta
    theta_v = math.inf if Z is None else solve_theta(X, Z).theta
    theta_m = min(theta_u, theta_v)

    t1_all = np.empty(n_mc)
    t2_all = np.empty(n_mc)
    bias_sum = 0.0
    for start in range(0, n_mc, WALK_CHUNK):
        rows = min(WALK_CHUNK, n_mc - start)
        pu = np.zeros(rows)
        pv = np.zeros(rows)
        head = np.full(rows, -np.inf)
        t1 = np.full(rows, -np.inf)
        t2 = np.full(rows, -np.inf)
        steps = 0
        while steps < horizon:
            block = min(WALK_BLOCK, horizon - steps)
            u_inc, v_inc = _draw_increments(X, Y, Z, rng, (rows, block))
            advance_walks(
                np.ascontiguousarray(u_inc), np.ascontiguousarray(v_inc), pu, pv, head, t1, t2
            )
            steps += block
            improve = _improvement_probability(pu, pv, head, t1, t2, theta_u, theta_m)
            if improve.mean() < EARLY_EXIT_PROBABILITY:
                break
        bias_sum += float(improve.sum())
        t1_all[start : start + rows] = t1
        t2_all[start : start + rows] = t2
        logger.debug("Walk batch at %d: %d steps", start, steps)
    return WalkMaxima(t1_all, t2_all, bias_sum / n_mc)


def estimate_psi(
    X: Distribution,
    Y: Distribution,
    Z: Optional[Distribution],
    u: float,
    v: float,
    horizon: int,
    n_mc: int,
    rng: np.random.Generator,
) -> PsiEstimate:
    """
    Monte Carlo estimate of psi(u, v) = P(T1 <= u, T2 <= v).

    Args:
        X (Distribution): Inter-arrival law.
        Y (Distribution): Service law at the first queue.
        Z (Distribution | None): Service law at the second queue; None for 0.
        u (float): Level of T1, may be +inf.
        v (float): Level of T2, may be +inf.
        horizon (int): Maximal number of walk steps, at least 100.
        n_mc (int): Number of walks.
        rng (np.random.Generator): The random stream.

    Returns:
        PsiEstimate: The estimate, its standard error and the bound on the
        horizon truncation bias.
    """
    walks = sample_walk_maxima(X, Y, Z, horizon, n_mc, rng)
    value, stderr = walks.joint_cdf(u, v)
    return PsiEstimate(value, stderr, walks.truncation_bias)


def check_fixed_point(
    X: Distribution,
    Y: Distribution,
    Z: Optional[Distribution],
    grid: Sequence[tuple[float, float]],
    n_mc: int,
    rng: np.random.Generator,
    horizon: int = DEFAULT_HORIZON,
    n_outer: Optional[int] = None,
    k_sigma: float = FIXED_POINT_SIGMA,
) -> VerificationReport:
    """
    Estimates both sides of the integral equation of psi on a grid.

    One set of walks serves both sides: the right side is their empirical
    joint CDF at (u, v), the left side averages that same empirical CDF at
    ((u - U) ^ (v - V), v - V) over fresh first steps (U, V). A point fails
    when the sides differ by more than k_sigma combined standard errors plus
    the truncation bias. At least 95% of the points must pass.
    """
    walks = sample_walk_maxima(X, Y, Z, horizon, n_mc, rng)
    n_outer = min(n_mc, MAX_OUTER_DRAWS) if n_outer is None else n_outer
    first_u, first_v = _draw_increments(X, Y, Z, rng, n_outer)

    records = []
    for u, v in grid:
        rhs, rhs_err = walks.joint_cdf(u, v)
        inside = first_u <= u
        shifted = np.zeros(n_outer)
        if np.any(inside):
            qa = np.minimum(u - first_u[inside], v - first_v[inside])
            qb = v - first_v[inside]
            counts = joint_cdf_counts(walks.t1, walks.t2, qa, qb)
            shifted[inside] = counts / walks.size
        lhs = float(shifted.mean())
        lhs_err = float(shifted.std(ddof=1)) / math.sqrt(n_outer) if n_outer > 1 else 0.0
        # the inner empirical CDF carries noise of the size of rhs_err
        stderr = math.sqrt(lhs_err**2 + 2.0 * rhs_err**2)
        violation = abs(lhs - rhs) - k_sigma * stderr - walks.truncation_bias
        records.append(
            VerificationRecord((float(u), float(v)), lhs, rhs, stderr, violation <= 0, violation)
        )
    return VerificationReport.from_records(
        "fixed-point", records, k_sigma, required_fraction=FIXED_POINT_PASS_FRACTION
    )


def _one_sided_record(point, values: np.ndarray, rhs: float, k_sigma: float) -> VerificationRecord:
    lhs = float(values.mean())
    stderr = float(values.std(ddof=1)) / math.sqrt(values.size)
    violation = (rhs - lhs) - k_sigma * stderr - 1e-12
    return VerificationRecord(point, lhs, rhs, stderr, violation <= 0, violation)


def _vacuous_record(point, rhs: float) -> VerificationRecord:
    return VerificationRecord(point, rhs, rhs, 0.0, True, -math.inf, vacuous=True)


def _check_sub_solution(name, gamma, U, V, grid, k_sigma) -> VerificationReport:
    records = []
    for u, v in grid:
        point = (float(u), float(v))
        rhs = float(gamma(u, v))
        # the inequality is only required where gamma is positive
        if not rhs > 0:
            records.append(_vacuous_record(point, rhs))
            continue
        with np.errstate(invalid="ignore"):
            values = np.where(U <= u, gamma(np.minimum(u - U, v - V), v - V), 0.0)
        records.append(_one_sided_record(point, values, rhs, k_sigma))
    return VerificationReport.from_records(name, records, k_sigma)


def check_gamma_inequality(
    params: PolyExpParams,
    X: Distribution,
    mu: float,
    grid: Sequence[tuple[float, float]],
    n_mc: int,
    rng: np.random.Generator,
    k_sigma: float = INEQUALITY_SIGMA,
) -> VerificationReport:
    """
    Checks E[1{u >= U} gamma((u - U) ^ (v - V), v - V)] >= gamma(u, v) by
    Monte Carlo, with exponential services of rate mu at both queues.

    The draws are shared by all grid points. Points where gamma <= 0 pass
    vacuously.
    """
    service = Exponential(mu)
    U, V = _draw_increments(X, service, service, rng, n_mc)
    return _check_sub_solution(
        "gamma-inequality", lambda u, v: gamma_function(params, u, v), U, V, grid, k_sigma
    )


def check_kingman_gamma(
    X: Distribution,
    Y: Distribution,
    grid: Sequence[tuple[float, float]],
    n_mc: int,
    rng: np.random.Generator,
    k_sigma: float = INEQUALITY_SIGMA,
) -> VerificationReport:
    """
    Checks the sub-solution inequality of the single queue (Z = 0) for
    gamma(u, v) = 1 - exp(-theta u) on 0 <= u <= v, whose consequence is
    Kingman's bound P(W > x) <= exp(-theta x).
    """
    theta = solve_theta(X, Y).theta

    def gamma(u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        with np.errstate(over="ignore"):
            value = np.where((u >= 0) & (v >= u), 1.0 - np.exp(-theta * u), 0.0)
        return float(value) if value.ndim == 0 else value

    U, V = _draw_increments(X, Y, None, rng, n_mc)
    return _check_sub_solution("kingman-gamma", gamma, U, V, grid, k_sigma)


class _EightInequalities:
    """
    Left and right sides of the eight sufficient inequalities for
    exponential services of rate mu at both queues; expectations over X by
    quadrature.
    """

    def __init__(self, p: PolyExpParams, X: Distribution):
        self.p = p
        self.X = X
        self.mu = mu = p.mu
        self.theta = theta = p.theta
        service = Exponential(mu)
        self.service = service
        self.k0 = service.cond_exp_moment(theta, 0, 0.0)
        self.k1 = service.cond_exp_moment(theta, 1, 0.0)
        self.L = X.laplace(theta)
        self.xL = X.x_laplace(theta)

    def _expect(self, g, breakpoints) -> float:
        return self.X.expect(g, [b for b in breakpoints if b > 0])

    def blue(self, u: float, v: float):
        p, mu, theta, k0, k1 = self.p, self.mu, self.theta, self.k0, self.k1

        def survival(s):
            return math.exp(-mu * max(u + s, 0.0))

        def overshoot(s):
            r = u + s
            return math.exp(-mu * r) / mu if r >= 0 else 1.0 / mu - r

        bp = [-u]
        tail_u = self._expect(survival, bp)
        if tail_u <= 0:
            return 0.0, 0.0, True
        a_term = k0 * self._expect(lambda s: math.exp(-theta * s) * survival(s), bp)
        b_term = self._expect(
            lambda s: math.exp(-theta * s) * survival(s) * (k0 * (v + s) - k1), bp
        )
        c_term = -k0 * self._expect(lambda s: math.exp(-theta * s) * overshoot(s), bp)
        return (p.A * a_term + p.B * b_term + p.C * c_term) / tail_u, 0.0, False

    def orange(self, u: float, v: float):
        p, mu, k0, k1 = self.p, self.mu, self.k0, self.k1
        v_moment = k1 * self.L - k0 * self.xL
        u_moment = k0 * (self.L / mu - self.xL)
        return p.B * v_moment + p.C * u_moment, 0.0, False

    def green(self, u: float, v: float):
        p, theta = self.p, self.theta
        r = v + p.a + self.X.essinf
        k0 = self.service.cond_exp_moment(theta, 0, r)
        k1 = self.service.cond_exp_moment(theta, 1, r)
        shift = math.exp(theta * p.a)
        lhs = (p.A + p.D_coef) * shift * k0 - (p.B + p.C) * shift * (p.a * k0 + k1)
        return lhs, 1.0, False

    def purple(self, u: float, v: float):
        p = self.p
        return p.C * self.k1 + p.D_coef * (1.0 - self.k0), 0.0, False

    def violet(self, u: float, v: float):
        mu = self.mu

        def weight(s):
            r = u + s
            return math.exp(-mu * r) if r >= 0 else 0.0

        rhs = self._expect(weight, [-u])
        if rhs <= 0:
            return 0.0, 0.0, True
        return self.p.D_coef * self.k0 * rhs, rhs, False

    def brown(self, u: float, v: float):
        # P(Y = 0) = 0 for exponential services
        return 0.0, 0.0, True

    def pink(self, u: float, v: float):
        theta = self.theta
        below = self._expect(lambda s: 1.0 if s < -u else 0.0, [-u])
        if below <= 0:
            return 0.0, 0.0, True
        moment = self._expect(lambda s: math.exp(-theta * (u + s)) if s < -u else 0.0, [-u])
        return self.p.D_coef * self.k0 * moment / below, 1.0, False

    def red(self, u: float, v: float):
        p, mu, theta, k0, k1 = self.p, self.mu, self.theta, self.k0, self.k1
        if p.a >= 0:
            return 0.0, 0.0, True
        shift = math.exp(theta * p.a)

        def pieces(s):
            lo = max(u + s + p.a, 0.0)
            hi = u + s
            if hi <= lo:
                return 0.0, 0.0, 0.0, 0.0
            z_tail = math.exp(-mu * (v + p.a + s))
            e_lo, e_hi = math.exp(-mu * lo), math.exp(-mu * hi)
            prob = e_lo - e_hi
            gap = (hi - lo) * e_lo - prob / mu
            growth = mu / (mu - theta) * (math.exp(-(mu - theta) * lo) - math.exp(-(mu - theta) * hi))
            return z_tail, prob, gap, growth

        def lhs_integrand(s):
            z_tail, prob, gap, growth = pieces(s)
            return z_tail * (
                p.A * shift * k0 * prob
                - p.B * shift * (k1 + p.a * k0) * prob
                + p.C * shift * k0 * gap
                + p.D_coef * math.exp(-theta * (u + s)) * growth
            )

        def rhs_integrand(s):
            z_tail, prob, _, _ = pieces(s)
            return z_tail * prob

        bp = [-u, -u - p.a]
        rhs = self._expect(rhs_integrand, bp)
        if rhs <= 0:
            return 0.0, 0.0, True
        return self._expect(lhs_integrand, bp), rhs, False

    def all(self, u: float, v: float):
        return [
            self.blue(u, v),
            self.orange(u, v),
            self.green(u, v),
            self.purple(u, v),
            self.violet(u, v),
            self.brown(u, v),
            self.pink(u, v),
            self.red(u, v),
        ]


@dataclass(frozen=True)
class InequalityTally:
    index: int
    failures: int
    worst_margin: float
    vacuous_everywhere: bool

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "failures": self.failures,
            "worst_margin": json_float(self.worst_margin),
            "vacuous_everywhere": self.vacuous_everywhere,
        }


def check_eight_inequalities(
    params: PolyExpParams,
    X: Distribution,
    mu: float,
    grid: Sequence[tuple[float, float]],
    tolerance: float = QUADRATURE_TOLERANCE,
) -> VerificationReport:
    """
    Evaluates the eight sufficient inequalities at every grid point.

    Inequality k has the relative margin (lhs_k - rhs_k) / max(1, |rhs_k|)
    and passes when it is at least -tolerance. The recorded lhs and rhs are
    those of the inequality with the smallest margin; margins holds all
    eight, nan for vacuous ones (zero-probability events, a >= 0 for the
    eighth), which pass.

    Args:
        params (PolyExpParams): Fitted parameters.
        X (Distribution): Inter-arrival law.
        mu (float): Service rate at both queues; must equal params.mu.
        grid (Sequence[tuple[float, float]]): Points with u >= -a_+,
            v >= -a and v >= u.
        tolerance (float): Relative tolerance of the quadrature.

    Raises:
        ValueError: If a grid point lies outside the domain of gamma.
    """
    if not math.isclose(mu, params.mu):
        raise ValueError(f"mu={mu} does not match the fitted rate {params.mu}")
    system = _EightInequalities(params, X)
    records = []
    for u, v in grid:
        u, v = float(u), float(v)
        if not (u >= -max(params.a, 0.0) and v >= -params.a and v >= u):
            raise ValueError(f"({u}, {v}) lies outside the domain of gamma")
        sides = system.all(u, v)
        margins = [
            math.nan if vac else (lhs - rhs) / max(1.0, abs(rhs)) for lhs, rhs, vac in sides
        ]
        worst = int(np.argmin([math.inf if math.isnan(m) else m for m in margins]))
        lhs, rhs, vacuous = sides[worst]
        violation = -math.inf if vacuous else -margins[worst] - tolerance
        records.append(
            VerificationRecord(
                (u, v),
                lhs,
                rhs,
                0.0,
                violation <= 0,
                violation,
                margins=margins,
                vacuous=vacuous,
            )
        )
    report = VerificationReport.from_records("eight-inequalities", records, tolerance)
    for tally in inequality_tallies(report):
        if tally.failures:
            logger.warning(
                "Inequality %d fails at %d points (worst margin %.3e)",
                tally.index,
                tally.failures,
                tally.worst_margin,
            )
    return report


def inequality_tallies(report: VerificationReport) -> list[InequalityTally]:
    """Per-inequality failure counts and worst margins of an eight-inequality report."""
    tallies = []
    for k in range(8):
        margins = [r.margins[k] for r in report.details if not math.isnan(r.margins[k])]
        if not margins:
            tallies.append(InequalityTally(k + 1, 0, 0.0, True))
            continue
        failures = sum(1 for m in margins if m < -report.tolerance)
        tallies.append(InequalityTally(k + 1, failures, min(margins), False))
    return tallies


def check_dominance(
    bound: CcdfCurve, sim: CcdfCurve, k_sigma: float = DOMINANCE_SIGMA
) -> VerificationReport:
    """
    Checks bound.value >= sim.value - k_sigma * sim.stderr at every point.

    Raises:
        GridMismatchException: If the two curves have different x grids.
    """
    if len(bound) != len(sim) or not np.array_equal(bound.xs, sim.xs):
        raise GridMismatchException(len(bound), len(sim))
    records = []
    for x, upper, value, stderr in zip(bound.xs, bound.values, sim.values, sim.stderrs):
        rhs = float(value - k_sigma * stderr)
        violation = rhs - float(upper)
        records.append(
            VerificationRecord((float(x),), float(upper), float(value), float(stderr), violation <= 0, violation)
        )
    return VerificationReport.from_records(
        f"dominance[{bound.kind.value} vs {sim.kind.value}]", records, k_sigma
    )
