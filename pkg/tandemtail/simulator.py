"""
Tandem simulator.

This module estimates tails of the end-to-end waiting and sojourn times of
the last job of long sample paths of a tandem, and provides the exact
oracles used to validate the recursion: a brute-force maximum over all
index chains and the pathwise two-queue and packet representations of the
waiting time.

Every run draws from its own counter-based streams (see
tandemtail.utils.stream_generator), so results do not depend on the number
of worker threads.

"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from tandemtail.ccdf_curve import CcdfCurve, CurveKind
from tandemtail.distributions import Distribution
from tandemtail.exceptions.config_exceptions import InvalidConfigException
from tandemtail.exceptions.simulator_exceptions import (
    DimensionMismatchException,
    TooLargeException,
)
from tandemtail.kernels import departure_epochs, last_job_delays
from tandemtail.tandem_spec import (
    Alternating,
    Metric,
    ServiceMode,
    SimConfig,
    TandemSpec,
)
from tandemtail.utils import ARRIVAL_STREAM, stream_generator

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_JOBS = 12
BRUTE_FORCE_MAX_QUEUES = 4


def ar_stream(
    dist1: Distribution, dist2: Distribution, rng: np.random.Generator, n: int
) -> np.ndarray:
    """
    Draws n inter-arrival times of an alternating renewal process.

    A phase B in {1, 2} is drawn with probability 1/2 each; the times then
    alternate between the law of phase B and the other one.

    Args:
        dist1 (Distribution): Law of the first phase.
        dist2 (Distribution): Law of the second phase.
        rng (np.random.Generator): The random stream.
        n (int): Number of inter-arrival times.

    Returns:
        np.ndarray: The inter-arrival times.
    """
    if n < 1:
        raise ValueError("ar_stream needs n >= 1")
    first, second = (dist1, dist2) if rng.random() < 0.5 else (dist2, dist1)
    out = np.empty(n)
    out[0::2] = first.sample(rng, (n + 1) // 2)
    out[1::2] = second.sample(rng, n // 2)
    return out


def _as_services(services) -> np.ndarray:
    matrix = np.atleast_2d(np.asarray(services, dtype=float))
    if matrix.ndim != 2:
        raise ValueError("services must be an M x n_jobs matrix")
    return matrix


def _check_dimensions(inter_arrivals: np.ndarray, services: np.ndarray) -> None:
    n_jobs = services.shape[1]
    if n_jobs < 1 or inter_arrivals.shape != (n_jobs - 1,):
        raise DimensionMismatchException(int(inter_arrivals.size), int(n_jobs))


def lindley_exit_time(inter_arrivals, services) -> np.ndarray:
    """
    Exit epochs of every job from the last queue of the tandem.

    Job 0 arrives at time 0 and inter_arrivals[k] separates jobs k and k + 1.

    Args:
        inter_arrivals: n_jobs - 1 inter-arrival times.
        services: M x n_jobs matrix of service times.

    Returns:
        np.ndarray: The exit epoch of every job.

    Raises:
        DimensionMismatchException: If the lengths do not match.
    """
    inter_arrivals = np.asarray(inter_arrivals, dtype=float).reshape(-1)
    services = _as_services(services)
    _check_dimensions(inter_arrivals, services)
    arrivals = np.concatenate(([0.0], np.cumsum(inter_arrivals)))
    return departure_epochs(arrivals, np.ascontiguousarray(services))


def brute_force_exit_time(inter_arrivals, services) -> float:
    """
    Exit epoch of the last job as a maximum over index chains.

    A chain k_0 <= k_1 <= ... <= k_{M-1} <= n enters the first queue with
    job k_0 and serves jobs k_j..k_{j+1} at queue j (k_M = n); its length is
    the arrival epoch of job k_0 plus those service times.

    Raises:
        DimensionMismatchException: If the lengths do not match.
        TooLargeException: Beyond 12 jobs or 4 queues.
    """
    inter_arrivals = np.asarray(inter_arrivals, dtype=float).reshape(-1)
    services = _as_services(services)
    _check_dimensions(inter_arrivals, services)
    n_queues, n_jobs = services.shape
    if n_jobs > BRUTE_FORCE_MAX_JOBS or n_queues > BRUTE_FORCE_MAX_QUEUES:
        raise TooLargeException(n_jobs, n_queues, BRUTE_FORCE_MAX_JOBS, BRUTE_FORCE_MAX_QUEUES)

    arrivals = [0.0, *itertools.accumulate(inter_arrivals.tolist())]
    last = n_jobs - 1
    best = -math.inf
    for chain in itertools.combinations_with_replacement(range(n_jobs), n_queues):
        bounds = (*chain, last)
        total = arrivals[chain[0]]
        for j in range(n_queues):
            total += sum(services[j, bounds[j] : bounds[j + 1] + 1].tolist())
        best = max(best, total)
    return best


def two_queue_waiting_representation(inter_arrivals, services) -> float:
    """
    Waiting time of the last job of a two-queue path computed as
    max{0, T1 + (Z - Y)_+, T2 + Z - Y}.

    With the jobs read backwards from the last one, T1 is the maximum of the
    partial sums of U = Y - X and T2 the maximum of a sum of V = Z - X
    increments followed by U increments; Y is the first-queue service of the
    last job and Z the second-queue service of the job before it.
    """
    inter_arrivals = np.asarray(inter_arrivals, dtype=float).reshape(-1)
    services = _as_services(services)
    _check_dimensions(inter_arrivals, services)
    if services.shape[0] != 2:
        raise ValueError("the two-queue representation needs exactly two queues")
    n = services.shape[1] - 1
    if n == 0:
        return 0.0
    first, second = services
    backward = np.arange(n - 1, -1, -1)
    u = first[backward] - inter_arrivals[backward]
    partial_u = np.cumsum(u)
    t1 = float(np.max(partial_u))
    z, y = second[n - 1], first[n]
    candidates = [0.0, t1 + max(z - y, 0.0)]
    if n >= 2:
        v = second[backward[: n - 1] - 1] - inter_arrivals[backward[: n - 1]]
        partial_v = np.cumsum(v)
        # T2 = max over i < j of (PV_i - PU_i) + PU_j
        head = np.maximum.accumulate(partial_v - partial_u[: n - 1])
        t2 = float(np.max(head + partial_u[1:]))
        candidates.append(t2 + z - y)
    return max(candidates)


def packet_waiting_representation(inter_arrivals, services, n_queues: int) -> float:
    """
    Waiting time of the last job of a packet tandem computed as
    max{T1, T2 - (M - 1) Y} v 0.

    services holds one service time per job, shared by the M queues; Y is the
    service time of the last job.
    """
    inter_arrivals = np.asarray(inter_arrivals, dtype=float).reshape(-1)
    row = np.asarray(services, dtype=float).reshape(-1)
    _check_dimensions(inter_arrivals, row.reshape(1, -1))
    n = row.size - 1
    if n == 0:
        return 0.0
    backward = np.arange(n - 1, -1, -1)
    partial = np.cumsum(row[backward] - inter_arrivals[backward])
    running_max = np.maximum.accumulate(row[backward])
    t1 = float(np.max(partial))
    t2 = float(np.max(partial + (n_queues - 1) * running_max))
    return max(t1, t2 - (n_queues - 1) * row[n], 0.0)


def _draw_path(spec: TandemSpec, seed: int, run: int, path_len: int):
    arrival_rng = stream_generator(seed, run, ARRIVAL_STREAM)
    if isinstance(spec.arrivals, Alternating):
        inter_arrivals = ar_stream(spec.arrivals.dist1, spec.arrivals.dist2, arrival_rng, path_len)
    else:
        inter_arrivals = np.asarray(spec.arrivals.dist.sample(arrival_rng, path_len), dtype=float)

    n_jobs = path_len + 1
    if spec.mode is ServiceMode.PACKET:
        row = spec.services[0].sample(stream_generator(seed, run, 1), n_jobs)
        services = np.tile(np.asarray(row, dtype=float), (spec.n_queues, 1))
    else:
        services = np.empty((spec.n_queues, n_jobs))
        for j, law in enumerate(spec.services):
            services[j] = law.sample(stream_generator(seed, run, j + 1), n_jobs)
    return inter_arrivals, services


def _run_block(spec: TandemSpec, cfg: SimConfig, first: int, last: int, out: np.ndarray) -> None:
    index = 0 if cfg.metric is Metric.WAITING else 1
    for run in range(first, last):
        inter_arrivals, services = _draw_path(spec, cfg.seed, run, cfg.path_len)
        out[run] = last_job_delays(inter_arrivals, services)[index]
    logger.debug("Simulated runs %d..%d", first, last - 1)


def simulate_paths(spec: TandemSpec, cfg: SimConfig) -> np.ndarray:
    """
    Simulates cfg.runs independent paths and returns the waiting (or
    sojourn) time of the last job of every path, in run order.

    Raises:
        InvalidConfigException: If path_len is smaller than the number of queues.
    """
    cfg.check_against(spec)
    out = np.empty(cfg.runs)
    blocks = np.linspace(0, cfg.runs, cfg.workers + 1).astype(int)
    if cfg.workers == 1:
        _run_block(spec, cfg, 0, cfg.runs, out)
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [
                pool.submit(_run_block, spec, cfg, int(first), int(last), out)
                for first, last in zip(blocks[:-1], blocks[1:])
            ]
            for future in futures:
                future.result()
    logger.info(
        "Simulated %d paths of %d inter-arrivals (%s)", cfg.runs, cfg.path_len, cfg.metric.value
    )
    return out


def empirical_ccdf(samples: np.ndarray, x_grid) -> CcdfCurve:
    """Empirical tail with binomial standard errors sqrt(p (1 - p) / n)."""
    xs = np.asarray(x_grid, dtype=float)
    if xs.size == 0:
        raise InvalidConfigException("x_grid", "must not be empty")
    p = np.mean(samples[:, None] > xs[None, :], axis=0)
    stderr = np.sqrt(p * (1.0 - p) / samples.size)
    return CcdfCurve(CurveKind.SIMULATION, xs, p, stderr)


def simulate(spec: TandemSpec, cfg: SimConfig) -> CcdfCurve:
    """
    Estimates the tail of the last job's waiting (or sojourn) time on
    cfg.x_grid. Fully reproducible given cfg.seed.
    """
    if not cfg.x_grid:
        raise InvalidConfigException("x_grid", "must not be empty")
    return empirical_ccdf(simulate_paths(spec, cfg), cfg.x_grid)


@dataclass(frozen=True)
class ConvergenceReport:
    path_len: int
    doubled_path_len: int
    z_scores: list[float]
    max_z: float
    k_sigma: float

    @property
    def stable(self) -> bool:
        return self.max_z < self.k_sigma

    def to_dict(self) -> dict:
        return {
            "path_len": self.path_len,
            "doubled_path_len": self.doubled_path_len,
            "z_scores": self.z_scores,
            "max_z": self.max_z,
            "k_sigma": self.k_sigma,
            "stable": self.stable,
        }


def convergence_diagnostic(spec: TandemSpec, cfg: SimConfig, k_sigma: float = 3.0) -> ConvergenceReport:
    """
    Compares the tail estimate at cfg.path_len with the one at twice the
    path length, point by point, in units of the combined standard error.
    """
    base = simulate(spec, cfg)
    doubled = simulate(spec, replace(cfg, path_len=2 * cfg.path_len))
    spread = np.sqrt(base.stderrs**2 + doubled.stderrs**2)
    gap = np.abs(base.values - doubled.values)
    z = np.where(spread > 0, gap / np.where(spread > 0, spread, 1.0), 0.0)
    report = ConvergenceReport(
        cfg.path_len, 2 * cfg.path_len, z.tolist(), float(np.max(z)), k_sigma
    )
    logger.info("Path-length doubling: max shift %.2f sigma", report.max_z)
    return report
