"""
Commands of the command-line interface.

Every command takes a validated RunConfig, writes its output (CSV curves,
JSON documents or text summaries) and returns the process exit status.

"""

import logging
import os
import sys
from contextlib import contextmanager
from dataclasses import replace

import numpy as np

from tandemtail.ccdf_curve import CcdfCurve, write_csv
from tandemtail.config_controller import RunConfig
from tandemtail.config_json_encoder import dump_document
from tandemtail.distributions import Deterministic, Distribution, Exponential, Gamma
from tandemtail.exceptions.config_exceptions import InvalidConfigException
from tandemtail.polyexp_bounds import (
    bound_curve,
    fit_gim_mm,
    kingman_curve,
    ross_curve,
    sojourn_curve,
)
from tandemtail.simulator import simulate
from tandemtail.tandem_spec import Metric, Renewal, ServiceMode, TandemSpec, gim_mm_tandem
from tandemtail.union_bounds import ld_curve
from tandemtail.utils import stream_generator
from tandemtail.verifier import (
    VerificationReport,
    check_dominance,
    check_eight_inequalities,
    check_fixed_point,
    check_gamma_inequality,
    check_kingman_gamma,
    inequality_tallies,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID_CONFIG = 1
EXIT_UNSTABLE = 2
EXIT_VERIFICATION_FAILED = 3

SOJOURN_SAMPLES = 20_000
FIGURE_STEPS = np.arange(61) * 0.5

# stream indices of the draws made outside the simulator, run index 0
SOJOURN_STREAM = 1000
CHECK_STREAMS = {"fixed-point": 1001, "gamma-inequality": 1002, "kingman-gamma": 1003}


@contextmanager
def _open_output(path):
    if path is None:
        yield sys.stdout
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as file:
        yield file


def _seed(cfg: RunConfig) -> int:
    return cfg.sim.seed if cfg.sim is not None else 1


def _renewal_law(spec: TandemSpec) -> Distribution:
    if not isinstance(spec.arrivals, Renewal):
        raise InvalidConfigException("model", "bounds need renewal arrivals")
    return spec.arrivals.dist


def _exponential_pair(spec: TandemSpec) -> tuple[Distribution, float]:
    """
    The inter-arrival law and service rate of a GI/M/1 -> ./M/1 tandem.

    Raises:
        InvalidConfigException: For other tandems.
    """
    X = _renewal_law(spec)
    services = spec.services
    if (
        spec.mode is not ServiceMode.INDEPENDENT
        or len(services) != 2
        or not all(isinstance(s, Exponential) for s in services)
        or services[0] != services[1]
    ):
        raise InvalidConfigException(
            "model", "poly-exp and LD bounds need two independent Exp(mu) queues"
        )
    return X, services[0].rate


def bound_curves(cfg: RunConfig, spec: TandemSpec, xs) -> tuple[list[CcdfCurve], dict]:
    """Analytic curves of the requested kinds, plus the fitted parameters."""
    curves = []
    extra = {}
    params = None
    for kind in cfg.bound_kinds:
        if kind in ("polyexp", "sojourn", "ld"):
            X, mu = _exponential_pair(spec)
            if kind != "ld" and params is None:
                params = fit_gim_mm(X, mu)
                extra["params"] = params
            if kind == "polyexp":
                curves.append(bound_curve(params, xs))
            elif kind == "sojourn":
                rng = stream_generator(_seed(cfg), 0, SOJOURN_STREAM)
                curves.append(sojourn_curve(params, xs, SOJOURN_SAMPLES, rng))
            else:
                curves.append(ld_curve(X, mu, xs))
        elif kind == "kingman":
            curves.append(kingman_curve(_renewal_law(spec), spec.services[0], xs))
        elif kind == "ross":
            curves.append(ross_curve(_renewal_law(spec), spec.services[0], xs))
    return curves, extra


def _write_curves(cfg: RunConfig, curves: list[CcdfCurve], extra: dict) -> None:
    with _open_output(cfg.output_path) as file:
        if cfg.format == "csv":
            write_csv(curves, file)
        else:
            dump_document({"config": cfg.to_dict(), "curves": curves, **extra}, file)


def _comparable(metric: Metric) -> tuple:
    if metric is Metric.SOJOURN:
        return ("sojourn-bound",)
    return ("polyexp-bound", "ld-bound")


def run_bound(cfg: RunConfig) -> int:
    curves, extra = bound_curves(cfg, cfg.model, cfg.x_grid)
    _write_curves(cfg, curves, extra)
    return EXIT_OK


def run_simulate(cfg: RunConfig) -> int:
    _write_curves(cfg, [simulate(cfg.model, cfg.sim)], {})
    return EXIT_OK


def run_compare(cfg: RunConfig) -> int:
    """
    Writes the requested bounds and the simulated curve on one grid, and a
    dominance report for every bound of the simulated metric.
    """
    curves, extra = bound_curves(cfg, cfg.model, cfg.x_grid)
    sim_curve = simulate(cfg.model, cfg.sim)
    targets = _comparable(cfg.sim.metric)
    reports = [check_dominance(c, sim_curve) for c in curves if c.kind.value in targets]
    curves.append(sim_curve)
    if cfg.format == "json":
        _write_curves(cfg, curves, {**extra, "dominance": reports})
        return EXIT_OK
    _write_curves(cfg, curves, extra)
    if cfg.output_path is not None:
        with open(cfg.output_path + ".dominance.json", "w", encoding="utf-8") as file:
            dump_document({"dominance": reports}, file)
    for report in reports:
        logger.info("\n%s", report.summary())
    return EXIT_OK


def psi_grid(n: int = 5) -> list[tuple[float, float]]:
    """n x n points with u in [-1, 8] and v in [u, u + 4]."""
    return [(float(u), float(u + dv)) for u in np.linspace(-1.0, 8.0, n) for dv in np.linspace(0.0, 4.0, n)]


def domain_grid(a: float, n: int) -> list[tuple[float, float]]:
    """n x n points of D_a: u in [-a_+, -a_+ + 8] and v in [max(-a, u), max(-a, u) + 8]."""
    start = -max(a, 0.0)
    grid = []
    for u in start + np.linspace(0.0, 8.0, n):
        low = max(-a, u)
        grid.extend((float(u), float(low + dv)) for dv in np.linspace(0.0, 8.0, n))
    return grid


def kingman_grid(n: int = 5) -> list[tuple[float, float]]:
    return [(float(u), float(u + dv)) for u in np.linspace(0.0, 8.0, n) for dv in np.linspace(0.0, 4.0, n)]


def verification_reports(cfg: RunConfig) -> list[VerificationReport]:
    """Runs the configured checks on the configured model."""
    spec = cfg.model
    settings = cfg.verify
    seed = _seed(cfg)
    reports = []
    params = None
    for check in cfg.checks:
        rng = stream_generator(seed, 0, CHECK_STREAMS.get(check, 0))
        if check == "fixed-point":
            if len(spec.services) > 2:
                raise InvalidConfigException("model", "the fixed-point check needs one or two queues")
            X = _renewal_law(spec)
            Z = spec.services[1] if len(spec.services) == 2 else None
            grid = list(settings.grid) or psi_grid()
            reports.append(
                check_fixed_point(X, spec.services[0], Z, grid, settings.n_mc, rng, settings.horizon)
            )
        elif check == "kingman-gamma":
            grid = list(settings.grid) or kingman_grid()
            reports.append(
                check_kingman_gamma(_renewal_law(spec), spec.services[0], grid, settings.n_mc, rng)
            )
        elif check in ("gamma-inequality", "eight-inequalities"):
            X, mu = _exponential_pair(spec)
            params = params or fit_gim_mm(X, mu)
            if check == "gamma-inequality":
                grid = list(settings.grid) or domain_grid(params.a, 5)
                reports.append(check_gamma_inequality(params, X, mu, grid, settings.n_mc, rng))
            else:
                grid = list(settings.grid) or domain_grid(params.a, 10)
                report = check_eight_inequalities(params, X, mu, grid)
                for tally in inequality_tallies(report):
                    logger.info("Inequality %s", tally.to_dict())
                reports.append(report)
        elif check == "dominance":
            if cfg.sim is None:
                raise InvalidConfigException("sim", "the dominance check needs an experiment")
            sim = replace(cfg.sim, x_grid=cfg.x_grid)
            curves, _ = bound_curves(cfg, spec, cfg.x_grid)
            sim_curve = simulate(spec, sim)
            targets = _comparable(sim.metric)
            reports.extend(check_dominance(c, sim_curve) for c in curves if c.kind.value in targets)
    return reports


def run_verify(cfg: RunConfig) -> int:
    """Prints one summary per check; exit status 3 if any check fails."""
    reports = verification_reports(cfg)
    if cfg.output_path is not None:
        with _open_output(cfg.output_path) as file:
            dump_document({"config": cfg.to_dict(), "reports": reports}, file)
    print("\n\n".join(report.summary() for report in reports))
    failed = [r.check_name for r in reports if not r.passed]
    if failed:
        logger.error("Verification failed: %s", ", ".join(failed))
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def figure_arrivals(figure: str, rho: float, mu: float) -> Distribution:
    """D/M: constant inter-arrivals 1 / (rho mu). E2/M: Erlang-2 of the same mean."""
    if figure == "dm2":
        return Deterministic(1.0 / (rho * mu))
    return Gamma(2.0, 2.0 * rho * mu)


def run_figure(cfg: RunConfig) -> int:
    """
    Sweeps the loads of a figure: per load, one CSV with the poly-exp bound,
    the LD bound and the simulated tail on x = k / (2 theta), k = 0..60, and
    a JSON manifest with the fitted parameters and dominance reports.
    Every file is written; exit status 3 if any bound fails to dominate.
    """
    out_dir = cfg.output_path or "."
    os.makedirs(out_dir, exist_ok=True)
    panels = []
    failed = []
    for rho in cfg.rhos:
        X = figure_arrivals(cfg.figure, rho, cfg.mu)
        spec = gim_mm_tandem(X, [Exponential(cfg.mu), Exponential(cfg.mu)])
        params = fit_gim_mm(X, cfg.mu)
        xs = FIGURE_STEPS / params.theta
        sim = replace(cfg.sim, x_grid=tuple(xs.tolist()), metric=Metric.WAITING)
        bounds = [bound_curve(params, xs), ld_curve(X, cfg.mu, xs)]
        sim_curve = simulate(spec, sim)
        reports = [check_dominance(c, sim_curve) for c in bounds]
        for report in reports:
            if not report.passed:
                failed.append(f"rho={rho:g} {report.check_name}")
        filename = f"{cfg.figure}_rho{rho:g}.csv"
        with _open_output(os.path.join(out_dir, filename)) as file:
            write_csv([*bounds, sim_curve], file)
        panels.append(
            {
                "rho": rho,
                "theta": params.theta,
                "csv": filename,
                "params": params,
                "dominance": reports,
            }
        )
        logger.info("Wrote %s", filename)
    with _open_output(os.path.join(out_dir, f"{cfg.figure}.json")) as file:
        dump_document(
            {"figure": cfg.figure, "mu": cfg.mu, "sim": cfg.sim, "panels": panels}, file
        )
    if failed:
        logger.error("Dominance failed: %s", ", ".join(failed))
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


COMMAND_RUNNERS = {
    "bound": run_bound,
    "simulate": run_simulate,
    "compare": run_compare,
    "verify": run_verify,
    "figure": run_figure,
}


def run_command(cfg: RunConfig) -> int:
    logger.debug("Running %s", cfg.command)
    return COMMAND_RUNNERS[cfg.command](cfg)
