"""
Tandem models.

This module contains the description of a tandem of FIFO queues (arrival
process, per-queue service laws, independent or packet services) and of a
Monte Carlo experiment on it.

"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from tandemtail.distributions import Distribution, rescaled
from tandemtail.exceptions.common import UnstableModelException
from tandemtail.exceptions.config_exceptions import InvalidConfigException

MIN_RUNS = 100


class ServiceMode(Enum):
    """
    INDEPENDENT regenerates the service time of a job at every queue.
    PACKET keeps the first queue's service time of a job at all queues.
    """

    INDEPENDENT = "independent"
    PACKET = "packet"


class Metric(Enum):
    WAITING = "waiting"
    SOJOURN = "sojourn"


@dataclass(frozen=True)
class Renewal:
    dist: Distribution

    def mean(self) -> float:
        return self.dist.mean()

    def to_dict(self) -> dict:
        return {"kind": "renewal", "dist": self.dist.to_dict()}


@dataclass(frozen=True)
class Alternating:
    """
    Inter-arrival times alternating between two laws, starting with either
    one with probability 1/2.
    """

    dist1: Distribution
    dist2: Distribution

    def mean(self) -> float:
        return (self.dist1.mean() + self.dist2.mean()) / 2.0

    def to_dict(self) -> dict:
        return {
            "kind": "alternating",
            "dist1": self.dist1.to_dict(),
            "dist2": self.dist2.to_dict(),
        }


Arrivals = Renewal | Alternating


def arrivals_from_dict(data: dict) -> Arrivals:
    """
    Builds an arrival process from its JSON representation.

    A bare distribution object is read as a renewal process.
    """
    kind = data.get("kind")
    if kind == "renewal":
        return Renewal(Distribution.from_dict(data["dist"]))
    if kind == "alternating":
        return Alternating(
            Distribution.from_dict(data["dist1"]), Distribution.from_dict(data["dist2"])
        )
    return Renewal(Distribution.from_dict(data))


@dataclass(frozen=True)
class TandemSpec:
    """
    A tandem of M FIFO queues.

    Attributes:
        arrivals (Arrivals): Renewal or alternating-renewal inter-arrivals.
        services (tuple[Distribution, ...]): Service law of every queue.
        mode (ServiceMode): Independent or packet services.

    Raises:
        InvalidConfigException: On an empty tandem or unequal packet laws.
        UnstableModelException: If the mean inter-arrival time does not
            exceed every mean service time.
    """

    arrivals: Arrivals
    services: tuple
    mode: ServiceMode = ServiceMode.INDEPENDENT

    def __post_init__(self):
        if not isinstance(self.arrivals, (Renewal, Alternating)):
            raise TypeError("arrivals must be Renewal or Alternating")
        if not isinstance(self.mode, ServiceMode):
            raise TypeError("mode must be a ServiceMode")
        services = tuple(self.services)
        if len(services) == 0:
            raise InvalidConfigException("services", "at least one queue is required")
        if not all(isinstance(s, Distribution) for s in services):
            raise TypeError("services must be Distribution values")
        if self.mode is ServiceMode.PACKET and any(s != services[0] for s in services):
            raise InvalidConfigException(
                "services", "packet mode shares one service law across all queues"
            )
        object.__setattr__(self, "services", services)
        arrival_mean = self.arrivals.mean()
        service_mean = max(s.mean() for s in services)
        if not arrival_mean > service_mean:
            raise UnstableModelException(arrival_mean, service_mean)

    @property
    def n_queues(self) -> int:
        return len(self.services)

    def to_dict(self) -> dict:
        return {
            "arrivals": self.arrivals.to_dict(),
            "services": [s.to_dict() for s in self.services],
            "mode": self.mode.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TandemSpec":
        return cls(
            arrivals_from_dict(data["arrivals"]),
            tuple(Distribution.from_dict(s) for s in data["services"]),
            ServiceMode(data.get("mode", ServiceMode.INDEPENDENT.value)),
        )


@dataclass(frozen=True)
class SimConfig:
    """
    A Monte Carlo experiment.

    Attributes:
        runs (int): Number of independent paths, at least 100.
        path_len (int): Number of inter-arrival times per path; the path
            holds path_len + 1 jobs and the last one is measured.
        seed (int): The experiment seed.
        x_grid (tuple[float, ...]): Levels at which the tail is estimated.
        metric (Metric): Waiting or sojourn time.
        workers (int): Number of threads running paths.
    """

    runs: int = 10_000
    path_len: int = 10_000
    seed: int = 1
    x_grid: tuple = field(default_factory=tuple)
    metric: Metric = Metric.WAITING
    workers: int = 1

    def __post_init__(self):
        for name in ("runs", "path_len", "seed", "workers"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"{name} must be an integer")
        if self.runs < MIN_RUNS:
            raise InvalidConfigException("runs", f"must be at least {MIN_RUNS}")
        if self.path_len < 1:
            raise InvalidConfigException("path_len", "must be positive")
        if self.workers < 1:
            raise InvalidConfigException("workers", "must be positive")
        if not isinstance(self.metric, Metric):
            raise TypeError("metric must be a Metric")
        grid = tuple(float(x) for x in self.x_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])) or (grid and grid[0] < 0):
            raise InvalidConfigException("x_grid", "must be non-negative and strictly increasing")
        object.__setattr__(self, "x_grid", grid)

    def check_against(self, spec: TandemSpec) -> None:
        """Raises InvalidConfigException if path_len < M."""
        if self.path_len < spec.n_queues:
            raise InvalidConfigException(
                "path_len", f"must be at least the number of queues ({spec.n_queues})"
            )

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "path_len": self.path_len,
            "seed": self.seed,
            "x_grid": list(self.x_grid),
            "metric": self.metric.value,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        defaults = cls.__dataclass_fields__
        return cls(
            runs=data.get("runs", defaults["runs"].default),
            path_len=data.get("path_len", defaults["path_len"].default),
            seed=data.get("seed", defaults["seed"].default),
            x_grid=tuple(data.get("x_grid", ())),
            metric=Metric(data.get("metric", Metric.WAITING.value)),
            workers=data.get("workers", defaults["workers"].default),
        )


def gim_mm_tandem(X: Distribution, services: Sequence[Distribution]) -> TandemSpec:
    """Shorthand for a renewal tandem with independent services."""
    return TandemSpec(Renewal(X), tuple(services), ServiceMode.INDEPENDENT)


def with_load(spec: TandemSpec, rho: float) -> TandemSpec:
    """
    Rescales the arrival process so that the largest mean service time over
    the mean inter-arrival time equals rho.

    Raises:
        InvalidConfigException: If rho is not in (0, 1).
    """
    if not 0.0 < rho < 1.0:
        raise InvalidConfigException("rho", "must lie in (0, 1)")
    factor = max(s.mean() for s in spec.services) / (rho * spec.arrivals.mean())
    if isinstance(spec.arrivals, Alternating):
        arrivals = Alternating(
            rescaled(spec.arrivals.dist1, factor), rescaled(spec.arrivals.dist2, factor)
        )
    else:
        arrivals = Renewal(rescaled(spec.arrivals.dist, factor))
    return TandemSpec(arrivals, spec.services, spec.mode)
