import json
import math
from dataclasses import replace

import numpy as np
import pytest

from tandemtail.ccdf_curve import CcdfCurve, CurveKind
from tandemtail.commands import domain_grid, kingman_grid, psi_grid
from tandemtail.config_json_encoder import ConfigJSONEncoder
from tandemtail.distributions import Deterministic, Exponential
from tandemtail.exceptions.common import UnstableModelException
from tandemtail.exceptions.verifier_exceptions import GridMismatchException
from tandemtail.kernels import joint_cdf_counts
from tandemtail.polyexp_bounds import bound_curve, fit_gim_mm
from tandemtail.simulator import simulate
from tandemtail.tandem_spec import SimConfig, gim_mm_tandem
from tandemtail.union_bounds import ld_curve
from tandemtail.verifier import (
    check_dominance,
    check_eight_inequalities,
    check_fixed_point,
    check_gamma_inequality,
    check_kingman_gamma,
    estimate_psi,
    inequality_tallies,
    sample_walk_maxima,
)

X = Deterministic(2.0)
Y = Exponential(1.0)


def test_psi_at_infinity_is_one(rng):
    estimate = estimate_psi(X, Y, Y, math.inf, math.inf, 200, 2000, rng)
    assert estimate.value == 1.0


def test_psi_below_essential_infimum_is_zero(rng):
    # U = Y - 2 >= -2
    estimate = estimate_psi(X, Y, Y, -3.0, 10.0, 200, 2000, rng)
    assert estimate.value == 0.0
    assert estimate.stderr == 0.0


def test_walk_maxima_are_ordered_by_definition(rng):
    walks = sample_walk_maxima(X, Y, None, 500, 1000, rng)
    assert walks.size == 1000
    assert np.all(walks.t1 >= -2.0)
    assert walks.truncation_bias < 1e-6


def test_psi_horizon_doubling_is_within_noise():
    short = estimate_psi(X, Y, Y, 1.0, 3.0, 100, 20_000, np.random.default_rng(1))
    long = estimate_psi(X, Y, Y, 1.0, 3.0, 200, 20_000, np.random.default_rng(2))
    spread = math.hypot(short.stderr, long.stderr)
    assert abs(short.value - long.value) <= 4.0 * spread


def test_walks_need_a_horizon(rng):
    with pytest.raises(ValueError):
        sample_walk_maxima(X, Y, Y, 10, 100, rng)
    with pytest.raises(UnstableModelException):
        sample_walk_maxima(Deterministic(0.5), Y, Y, 200, 100, rng)


def test_joint_cdf_counts_matches_direct_count():
    rng = np.random.default_rng(3)
    t1 = rng.normal(size=500)
    t2 = rng.normal(size=500)
    qa = rng.normal(size=50)
    qb = rng.normal(size=50)
    direct = [int(np.sum((t1 <= a) & (t2 <= b))) for a, b in zip(qa, qb)]
    assert joint_cdf_counts(t1, t2, qa, qb).tolist() == direct


def test_fixed_point_two_queues(rng):
    report = check_fixed_point(X, Y, Y, psi_grid(), 20_000, rng)
    assert report.passed
    assert report.required_fraction == 0.95
    assert len(report.details) == 25


def test_fixed_point_single_queue(rng):
    report = check_fixed_point(X, Y, None, psi_grid(), 20_000, rng)
    assert report.passed


def test_fixed_point_at_infinity(rng):
    report = check_fixed_point(X, Y, Y, [(math.inf, math.inf)], 2000, rng)
    record = report.details[0]
    assert record.lhs == pytest.approx(1.0)
    assert record.rhs == 1.0


@pytest.mark.slow
def test_fixed_point_at_full_scale():
    report = check_fixed_point(X, Y, Y, psi_grid(), 100_000, np.random.default_rng(4))
    assert report.passed


@pytest.mark.parametrize("rho", [0.5, 0.75])
def test_gamma_inequality_holds(rho, dm_arrivals, rng):
    arrivals = dm_arrivals(rho)
    params = fit_gim_mm(arrivals, 1.0)
    report = check_gamma_inequality(params, arrivals, 1.0, domain_grid(params.a, 5), 20_000, rng)
    assert report.passed


def test_gamma_inequality_outside_domain_is_vacuous(dm_params, rng):
    point = (-dm_params.a - 1.0, 0.0)
    report = check_gamma_inequality(dm_params, X, 1.0, [point], 1000, rng)
    assert report.passed
    assert report.details[0].vacuous


def test_gamma_inequality_detects_halved_constant(dm_params, rng):
    weakened = replace(dm_params, A=dm_params.A / 2.0)
    corner = -dm_params.a
    grid = [(corner + 0.1 * i, corner + 0.1 * (i + j)) for i in range(3) for j in range(3)]
    report = check_gamma_inequality(weakened, X, 1.0, grid, 50_000, rng)
    assert not report.passed
    assert report.worst_violation > 0


def test_kingman_gamma_is_a_sub_solution(rng):
    report = check_kingman_gamma(X, Y, kingman_grid(), 20_000, rng)
    assert report.passed


@pytest.mark.parametrize("rho", [0.5, 0.75])
def test_eight_inequalities_hold(rho, dm_arrivals):
    arrivals = dm_arrivals(rho)
    params = fit_gim_mm(arrivals, 1.0)
    grid = domain_grid(params.a, 10)
    assert len(grid) == 100
    report = check_eight_inequalities(params, arrivals, 1.0, grid)
    assert report.passed
    tallies = inequality_tallies(report)
    assert [t.index for t in tallies] == list(range(1, 9))
    # P(Y = 0) = 0 for exponential services
    assert tallies[5].vacuous_everywhere
    if params.a >= 0:
        assert tallies[7].vacuous_everywhere


def test_fourth_inequality_is_tight(dm_params):
    report = check_eight_inequalities(dm_params, X, 1.0, [(0.0, 1.0)])
    assert report.details[0].margins[3] == pytest.approx(0.0, abs=1e-12)


def test_eight_inequalities_reject_bad_inputs(dm_params):
    with pytest.raises(ValueError):
        check_eight_inequalities(dm_params, X, 2.0, [(0.0, 1.0)])
    with pytest.raises(ValueError):
        check_eight_inequalities(dm_params, X, 1.0, [(1.0, 0.5)])


def test_dominance_of_a_curve_over_itself():
    curve = CcdfCurve(CurveKind.SIMULATION, [0.0, 1.0], [0.9, 0.4], [0.01, 0.02])
    report = check_dominance(curve, curve, k_sigma=0.0)
    assert report.passed
    assert report.check_name == "dominance[simulation vs simulation]"


def test_dominance_failure_and_grid_mismatch():
    sim = CcdfCurve(CurveKind.SIMULATION, [0.0, 1.0], [0.9, 0.4], [0.01, 0.01])
    low = CcdfCurve.analytic(CurveKind.POLYEXP, [0.0, 1.0], [0.95, 0.3])
    report = check_dominance(low, sim)
    assert not report.passed
    assert report.fail_count == 1
    assert report.worst_violation == pytest.approx(0.4 - 0.03 - 0.3)
    with pytest.raises(GridMismatchException):
        check_dominance(CcdfCurve.analytic(CurveKind.POLYEXP, [0.0, 2.0], [1.0, 0.1]), sim)


def test_bounds_dominate_simulation():
    arrivals = Deterministic(4.0 / 3.0)
    xs = tuple(float(x) for x in np.linspace(0.0, 12.0, 13))
    sim = simulate(
        gim_mm_tandem(arrivals, [Y, Y]), SimConfig(runs=2000, path_len=2000, seed=8, x_grid=xs)
    )
    params = fit_gim_mm(arrivals, 1.0)
    assert check_dominance(bound_curve(params, xs), sim).passed
    assert check_dominance(ld_curve(arrivals, 1.0, xs), sim).passed


def test_report_rendering():
    sim = CcdfCurve(CurveKind.SIMULATION, [0.0, 1.0], [0.9, 0.4], [0.01, 0.01])
    report = check_dominance(CcdfCurve.analytic(CurveKind.LD, [0.0, 1.0], [1.0, 0.5]), sim)
    text = report.summary()
    assert text.splitlines()[0].startswith("dominance[ld-bound vs simulation]: PASS (2/2")
    data = json.loads(json.dumps(report, cls=ConfigJSONEncoder))
    assert data["passed"] is True
    assert data["grid"] == [[0.0], [1.0]]
    assert len(data["details"]) == 2
