"""
Compiled kernels of the tandem recursion.

The departure epoch of job k from queue j obeys

    dep[j][k] = max(dep[j - 1][k], dep[j][k - 1]) + s[j][k],

with dep[-1][k] the arrival epoch of job k. The kernels below run it in
O(M n) time and O(M) memory. They release the GIL so that runs can be
spread over threads.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def departure_epochs(arrivals, services):
    """
    Departure epochs of every job from the last queue.

    Args:
        arrivals (np.ndarray): Arrival epochs, length n_jobs.
        services (np.ndarray): Service times, shape (M, n_jobs).

    Returns:
        np.ndarray: Exit epochs, length n_jobs.
    """
    n_queues, n_jobs = services.shape
    last = np.full(n_queues, -np.inf)
    exits = np.empty(n_jobs)
    for k in range(n_jobs):
        t = arrivals[k]
        for j in range(n_queues):
            start = t if t > last[j] else last[j]
            last[j] = start + services[j, k]
            t = last[j]
        exits[k] = t
    return exits


@njit(cache=True, nogil=True)
def last_job_delays(inter_arrivals, services):
    """
    End-to-end waiting and sojourn time of the last job of one path.

    The first job arrives at time 0 and inter_arrivals[k] separates jobs k
    and k + 1. The waiting time adds up the per-queue waits of the last job,
    each exactly 0 when that server is idle on arrival.

    Returns:
        tuple[float, float]: (waiting, sojourn).
    """
    n_queues, n_jobs = services.shape
    last = np.full(n_queues, -np.inf)
    arrival = 0.0
    t = 0.0
    waiting = 0.0
    for k in range(n_jobs):
        if k > 0:
            arrival += inter_arrivals[k - 1]
        t = arrival
        waiting = 0.0
        for j in range(n_queues):
            start = t if t > last[j] else last[j]
            waiting += start - t
            last[j] = start + services[j, k]
            t = last[j]
    return waiting, t - arrival


@njit(cache=True, nogil=True)
def advance_walks(u_inc, v_inc, pu, pv, head, t1, t2):
    """
    Extends a batch of walks by one block of increments, in place.

    For every row, t1 tracks the running maximum of the U partial sums and
    t2 the running maximum over i < j of PV_i + (PU_j - PU_i); head holds
    max over i of PV_i - PU_i.
    """
    rows, steps = u_inc.shape
    for r in range(rows):
        a, b, h, m1, m2 = pu[r], pv[r], head[r], t1[r], t2[r]
        for k in range(steps):
            a += u_inc[r, k]
            if a > m1:
                m1 = a
            if h + a > m2:
                m2 = h + a
            b += v_inc[r, k]
            if b - a > h:
                h = b - a
        pu[r], pv[r], head[r], t1[r], t2[r] = a, b, h, m1, m2


@njit(cache=True)
def joint_cdf_counts(t1, t2, qa, qb):
    """
    For every query (qa[q], qb[q]) counts the samples with t1 <= qa[q] and
    t2 <= qb[q], sweeping the queries by qa over a Fenwick tree on t2 ranks.
    """
    n = t1.size
    order = np.argsort(t1)
    t1_sorted = t1[order]
    t2_by_t1 = t2[order]
    t2_levels = np.sort(t2)
    ranks = np.searchsorted(t2_levels, t2_by_t1) + 1
    tree = np.zeros(n + 1, dtype=np.int64)
    counts = np.zeros(qa.size, dtype=np.int64)
    added = 0
    for q in np.argsort(qa):
        while added < n and t1_sorted[added] <= qa[q]:
            i = ranks[added]
            while i <= n:
                tree[i] += 1
                i += i & (-i)
            added += 1
        i = np.searchsorted(t2_levels, qb[q], side="right")
        total = 0
        while i > 0:
            total += tree[i]
            i -= i & (-i)
        counts[q] = total
    return counts
