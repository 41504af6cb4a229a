import math
from dataclasses import replace

import numpy as np
import pytest

from tandemtail.distributions import Deterministic, Exponential, Gamma
from tandemtail.exceptions.common import UnstableModelException
from tandemtail.exceptions.config_exceptions import InvalidConfigException
from tandemtail.exceptions.simulator_exceptions import (
    DimensionMismatchException,
    TooLargeException,
)
from tandemtail.kernels import last_job_delays
from tandemtail.simulator import (
    ar_stream,
    brute_force_exit_time,
    convergence_diagnostic,
    empirical_ccdf,
    lindley_exit_time,
    packet_waiting_representation,
    simulate,
    simulate_paths,
    two_queue_waiting_representation,
)
from tandemtail.tandem_spec import (
    Alternating,
    Metric,
    Renewal,
    ServiceMode,
    SimConfig,
    TandemSpec,
    gim_mm_tandem,
    with_load,
)

GRID = (0.5, 1.0, 2.0, 5.0)


def random_instance(rng, n_queues, n_jobs, integer=True):
    if integer:
        inter_arrivals = rng.integers(0, 5, n_jobs - 1).astype(float)
        services = rng.integers(0, 5, (n_queues, n_jobs)).astype(float)
    else:
        inter_arrivals = rng.exponential(1.0, n_jobs - 1)
        services = rng.exponential(0.8, (n_queues, n_jobs))
    return inter_arrivals, services


def test_lindley_single_job():
    assert lindley_exit_time([], [[3.0]]).tolist() == [3.0]


def test_lindley_two_jobs():
    assert lindley_exit_time([2.0], [[3.0, 1.0]]).tolist() == [3.0, 4.0]
    assert brute_force_exit_time([2.0], [[3.0, 1.0]]) == 4.0


def test_lindley_matches_brute_force_independent_services():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n_queues = int(rng.integers(1, 4))
        n_jobs = int(rng.integers(1, 9))
        inter_arrivals, services = random_instance(rng, n_queues, n_jobs)
        exits = lindley_exit_time(inter_arrivals, services)
        assert exits[-1] == pytest.approx(
            brute_force_exit_time(inter_arrivals, services), abs=1e-9
        )


def test_lindley_matches_brute_force_shared_services():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        n_queues = int(rng.integers(1, 4))
        n_jobs = int(rng.integers(1, 9))
        inter_arrivals, row = random_instance(rng, 1, n_jobs)
        services = np.tile(row, (n_queues, 1))
        exits = lindley_exit_time(inter_arrivals, services)
        assert exits[-1] == pytest.approx(
            brute_force_exit_time(inter_arrivals, services), abs=1e-9
        )


def test_two_queue_representation_matches_recursion():
    rng = np.random.default_rng(13)
    for _ in range(300):
        n_jobs = int(rng.integers(1, 30))
        inter_arrivals, services = random_instance(rng, 2, n_jobs, integer=False)
        waiting, _ = last_job_delays(inter_arrivals, np.ascontiguousarray(services))
        assert two_queue_waiting_representation(inter_arrivals, services) == pytest.approx(
            waiting, abs=1e-9
        )


@pytest.mark.parametrize("n_queues", [1, 2, 3, 4])
def test_packet_representation_matches_recursion(n_queues):
    rng = np.random.default_rng(14 + n_queues)
    for _ in range(300):
        n_jobs = int(rng.integers(1, 30))
        inter_arrivals, row = random_instance(rng, 1, n_jobs, integer=False)
        services = np.ascontiguousarray(np.tile(row, (n_queues, 1)))
        waiting, _ = last_job_delays(inter_arrivals, services)
        assert packet_waiting_representation(inter_arrivals, row, n_queues) == pytest.approx(
            waiting, abs=1e-9
        )


def test_sojourn_is_waiting_plus_own_services():
    rng = np.random.default_rng(15)
    for _ in range(100):
        inter_arrivals, services = random_instance(rng, 3, 20, integer=False)
        waiting, sojourn = last_job_delays(inter_arrivals, np.ascontiguousarray(services))
        assert waiting >= 0.0
        assert sojourn - waiting == pytest.approx(services[:, -1].sum(), abs=1e-9)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchException):
        lindley_exit_time([1.0, 2.0], [[1.0, 1.0]])
    with pytest.raises(DimensionMismatchException):
        brute_force_exit_time([1.0], [[1.0, 1.0, 1.0]])


def test_brute_force_guard():
    with pytest.raises(TooLargeException):
        brute_force_exit_time(np.ones(12), np.ones((1, 13)))
    with pytest.raises(TooLargeException):
        brute_force_exit_time(np.ones(2), np.ones((5, 3)))


def test_ar_stream_alternates():
    seen = set()
    for seed in range(40):
        draws = ar_stream(Deterministic(1.0), Deterministic(2.0), np.random.default_rng(seed), 7)
        assert draws.tolist() in ([1, 2, 1, 2, 1, 2, 1], [2, 1, 2, 1, 2, 1, 2])
        seen.add(draws[0])
    assert seen == {1.0, 2.0}


def test_ar_stream_is_reproducible():
    first = ar_stream(Exponential(1.0), Exponential(2.0), np.random.default_rng(3), 100)
    second = ar_stream(Exponential(1.0), Exponential(2.0), np.random.default_rng(3), 100)
    assert np.array_equal(first, second)


def test_ar_stream_mean():
    draws = ar_stream(Exponential(1.0), Exponential(0.5), np.random.default_rng(4), 1_000_000)
    # half the terms have variance 1, half variance 4
    stderr = math.sqrt(2.5 / draws.size)
    assert abs(draws.mean() - 1.5) < 4.0 * stderr


def test_ar_stream_needs_a_term():
    with pytest.raises(ValueError):
        ar_stream(Exponential(1.0), Exponential(1.0), np.random.default_rng(0), 0)


def test_mm1_waiting_tail_matches_exact_law():
    spec = gim_mm_tandem(Exponential(0.5), [Exponential(1.0)])
    curve = simulate(spec, SimConfig(runs=4000, path_len=2000, seed=5, x_grid=GRID))
    exact = 0.5 * np.exp(-0.5 * np.array(GRID))
    assert np.all(np.abs(curve.values - exact) <= 3.0 * np.sqrt(exact * (1 - exact) / 4000))


@pytest.mark.slow
def test_mm1_waiting_tail_at_full_scale():
    spec = gim_mm_tandem(Exponential(0.5), [Exponential(1.0)])
    curve = simulate(spec, SimConfig(runs=10_000, path_len=10_000, seed=6, x_grid=GRID))
    exact = 0.5 * np.exp(-0.5 * np.array(GRID))
    assert np.all(np.abs(curve.values - exact) <= 3.0 * curve.stderrs + 1e-12)


def test_packet_single_queue_equals_independent_single_queue():
    cfg = SimConfig(runs=200, path_len=300, seed=9, x_grid=GRID)
    independent = TandemSpec(Renewal(Gamma(2.0, 1.5)), (Exponential(1.0),), ServiceMode.INDEPENDENT)
    packet = TandemSpec(Renewal(Gamma(2.0, 1.5)), (Exponential(1.0),), ServiceMode.PACKET)
    assert np.array_equal(simulate_paths(independent, cfg), simulate_paths(packet, cfg))


def test_alternating_with_equal_laws_matches_renewal():
    cfg = SimConfig(runs=4000, path_len=1000, seed=10, x_grid=GRID)
    services = (Exponential(1.0), Exponential(1.0))
    renewal = simulate(TandemSpec(Renewal(Exponential(0.5)), services), cfg)
    alternating = simulate(
        TandemSpec(Alternating(Exponential(0.5), Exponential(0.5)), services), cfg
    )
    spread = np.sqrt(renewal.stderrs**2 + alternating.stderrs**2)
    assert np.all(np.abs(renewal.values - alternating.values) <= 4.0 * spread + 1e-12)


def test_simulation_is_deterministic_and_thread_count_independent():
    spec = gim_mm_tandem(Deterministic(2.0), [Exponential(1.0), Exponential(1.0)])
    cfg = SimConfig(runs=300, path_len=200, seed=21, x_grid=GRID)
    first = simulate_paths(spec, cfg)
    assert np.array_equal(first, simulate_paths(spec, cfg))
    assert np.array_equal(first, simulate_paths(spec, replace(cfg, workers=3)))
    assert not np.array_equal(first, simulate_paths(spec, replace(cfg, seed=22)))


def test_sojourn_metric_dominates_waiting():
    spec = gim_mm_tandem(Deterministic(2.0), [Exponential(1.0), Exponential(1.0)])
    cfg = SimConfig(runs=300, path_len=200, seed=23, x_grid=GRID)
    waiting = simulate_paths(spec, cfg)
    sojourn = simulate_paths(spec, replace(cfg, metric=Metric.SOJOURN))
    assert np.all(sojourn > waiting)


def test_empirical_ccdf():
    curve = empirical_ccdf(np.array([0.0, 1.0, 2.0, 3.0]), [0.5, 1.5, 2.5, 3.5])
    assert curve.values.tolist() == [0.75, 0.5, 0.25, 0.0]
    assert curve.stderrs[-1] == 0.0
    assert curve.kind.value == "simulation"


def test_ccdf_is_non_increasing():
    spec = gim_mm_tandem(Gamma(2.0, 1.5), [Exponential(1.0), Exponential(1.0)])
    cfg = SimConfig(runs=500, path_len=200, seed=2, x_grid=tuple(np.linspace(0, 10, 21)))
    assert np.all(np.diff(simulate(spec, cfg).values) <= 0.0)


def test_convergence_diagnostic_on_light_load():
    spec = gim_mm_tandem(Exponential(0.5), [Exponential(1.0)])
    report = convergence_diagnostic(
        spec, SimConfig(runs=2000, path_len=500, seed=3, x_grid=GRID), k_sigma=4.0
    )
    assert report.doubled_path_len == 1000
    assert report.stable
    assert report.to_dict()["stable"] is True


def test_path_len_must_cover_the_queues():
    spec = gim_mm_tandem(Deterministic(2.0), [Exponential(1.0)] * 3)
    with pytest.raises(InvalidConfigException):
        simulate_paths(spec, SimConfig(runs=100, path_len=2, x_grid=GRID))


def test_sim_config_validation():
    with pytest.raises(InvalidConfigException):
        SimConfig(runs=99)
    with pytest.raises(InvalidConfigException):
        SimConfig(x_grid=(1.0, 0.5))
    with pytest.raises(TypeError):
        SimConfig(runs=1000.0)


def test_unstable_model_is_rejected():
    with pytest.raises(UnstableModelException):
        gim_mm_tandem(Exponential(1.0), [Exponential(2.0), Exponential(0.9)])


def test_with_load_rescales_arrivals():
    spec = with_load(gim_mm_tandem(Deterministic(2.0), [Exponential(1.0), Exponential(1.0)]), 0.8)
    assert spec.arrivals.mean() == pytest.approx(1.25)
    spec = with_load(TandemSpec(Alternating(Exponential(1.0), Exponential(0.5)), (Exponential(4.0),)), 0.5)
    assert spec.arrivals.mean() == pytest.approx(0.5)
    with pytest.raises(InvalidConfigException):
        with_load(spec, 1.0)


def test_spec_round_trip():
    spec = TandemSpec(Renewal(Gamma(2.0, 1.5)), (Exponential(1.0), Exponential(1.0)), ServiceMode.PACKET)
    assert TandemSpec.from_dict(spec.to_dict()) == spec


def test_waiting_is_exactly_zero_when_no_queue_is_busy():
    spec = gim_mm_tandem(Deterministic(2.0), [Exponential(1.0), Exponential(1.0)])
    samples = simulate_paths(spec, SimConfig(runs=2000, path_len=2000, seed=31, x_grid=GRID))
    assert np.all((samples == 0.0) | (samples >= 1e-9))
    # P(W > 0) is about 0.43 at this load
    assert 0.3 < np.mean(samples > 0.0) < 0.55


def test_last_job_waits_nothing_after_a_long_gap():
    inter_arrivals = np.full(999, 0.1 + 1e-3)
    inter_arrivals[-1] = 50.0
    services = np.full((3, 1000), 0.1)
    waiting, sojourn = last_job_delays(inter_arrivals, services)
    assert waiting == 0.0
    assert sojourn == pytest.approx(0.3, abs=1e-9)
