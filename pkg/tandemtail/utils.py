"""
Utilities.

This module contains the one-dimensional optimizers shared by the bound
modules and the construction of reproducible random streams.

"""

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

ARRIVAL_STREAM = 0


def golden_section_min(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    tol: float = 1e-10,
    max_iterations: int = 200,
) -> tuple[float, float]:
    """
    Minimizes a unimodal function on [lower, upper] by golden-section search.

    The end points are compared with the interior result so that a monotone
    objective returns the better boundary.

    Args:
        f (Callable[[float], float]): The objective.
        lower (float): Left end of the bracket.
        upper (float): Right end of the bracket.
        tol (float): Width of the final bracket.
        max_iterations (int): Hard cap on the number of shrink steps.

    Returns:
        tuple[float, float]: The minimizer and the objective value there.
    """
    if upper < lower:
        raise ValueError("golden_section_min needs lower <= upper")
    a, b = lower, upper
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iterations):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    best_x, best_f = (c, fc) if fc < fd else (d, fd)
    for edge in (lower, upper):
        f_edge = f(edge)
        if f_edge < best_f:
            best_x, best_f = edge, f_edge
    return best_x, best_f


def grid_then_golden(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    n_grid: int = 200,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """
    Minimizes f on [lower, upper] with a coarse grid followed by a
    golden-section refinement around the best grid point.

    Non-finite objective values are treated as +inf.

    Returns:
        tuple[float, float]: The minimizer and the objective value there.
    """
    if upper <= lower:
        return lower, f(lower)
    grid = np.linspace(lower, upper, n_grid)
    values = np.array([f(float(x)) for x in grid])
    values[~np.isfinite(values)] = np.inf
    best = int(np.argmin(values))
    left = float(grid[max(best - 1, 0)])
    right = float(grid[min(best + 1, n_grid - 1)])
    x, fx = golden_section_min(f, left, right, tol=tol)
    if not fx <= values[best]:
        return float(grid[best]), float(values[best])
    return x, fx


def grid_then_golden_max(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    n_grid: int = 200,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """Maximizing counterpart of grid_then_golden."""
    x, fx = grid_then_golden(lambda t: -f(t), lower, upper, n_grid=n_grid, tol=tol)
    return x, -fx


def stream_generator(seed: int, run: int, stream: int) -> np.random.Generator:
    """
    Returns the random stream of one (run, stream) pair.

    Streams come from the counter-based Philox generator keyed by the seed
    and by (run, stream), so every run can be regenerated on its own and in
    any order. Stream 0 feeds the arrivals and stream j + 1 the services of
    queue j.

    Args:
        seed (int): The experiment seed, a 64-bit integer.
        run (int): The run index.
        stream (int): The stream index inside the run.

    Returns:
        np.random.Generator: An independent generator.
    """
    key = np.array(
        [seed & 0xFFFFFFFFFFFFFFFF, ((run << 16) | stream) & 0xFFFFFFFFFFFFFFFF],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))
