"""Reference algorithms used for normalization: standard greedy and stochastic greedy."""

from __future__ import annotations

import heapq
import math
import time

import numpy as np

from .oracle import CountingOracle, QueryLedger, RunMetrics, ValueOracle


def greedy(counted: CountingOracle, k: int, lazy: bool = False) -> tuple[list[int], float]:
    """Argmax-marginal selection, ties to the smallest index, stopping at zero gain."""
    if lazy:
        return _lazy_greedy(counted, k)
    n = counted.n
    tracker = counted.tracker()
    S: list[int] = []
    chosen = np.zeros(n, dtype=bool)
    f_S = 0.0
    for _ in range(min(k, n)):
        counted.ledger.passes += 1
        best, best_gain, best_value = -1, 0.0, f_S
        for u in range(n):
            if chosen[u]:
                continue
            value = tracker.query((u,))
            if value - f_S > best_gain:
                best, best_gain, best_value = u, value - f_S, value
        if best < 0:
            break
        tracker.add((best,))
        S.append(best)
        chosen[best] = True
        f_S = best_value
    return S, f_S


def _lazy_greedy(counted: CountingOracle, k: int) -> tuple[list[int], float]:
    n = counted.n
    tracker = counted.tracker()
    S: list[int] = []
    f_S = 0.0
    # (-upper bound on gain, index, iteration the bound is from, value of S + index then)
    heap = []
    counted.ledger.passes += 1
    for u in range(n):
        value = tracker.query((u,))
        heap.append((-value, u, 0, value))
    heapq.heapify(heap)
    it = 0
    while heap and len(S) < k:
        neg, u, stamp, value = heap[0]
        if stamp == it:
            if -neg <= 0:
                break
            heapq.heappop(heap)
            tracker.add((u,))
            S.append(u)
            f_S = value
            it += 1
            if len(S) < k:
                counted.ledger.passes += 1
            continue
        value = tracker.query((u,))
        heapq.heapreplace(heap, (f_S - value, u, it, value))
    return S, f_S


def sample_size(n: int, k: int, eps: float) -> int:
    return max(1, math.ceil(n / k * math.log(1.0 / eps)))


def stochastic_greedy(counted: CountingOracle, k: int, eps: float, seed: int) -> tuple[list[int], float]:
    """k rounds, each adding the best of a uniform sample of unselected elements.

    A round whose sample has no positive gain adds nothing.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    n = counted.n
    rng = np.random.default_rng(seed)
    s = sample_size(n, k, eps)
    tracker = counted.tracker()
    chosen = np.zeros(n, dtype=bool)
    S: list[int] = []
    f_S = 0.0
    for _ in range(min(k, n)):
        counted.ledger.passes += 1
        pool = np.flatnonzero(~chosen)
        if pool.size == 0:
            break
        sample = np.sort(rng.choice(pool, size=min(s, pool.size), replace=False))
        best, best_gain, best_value = -1, 0.0, f_S
        for u in sample.tolist():
            value = tracker.query((u,))
            if value - f_S > best_gain:
                best, best_gain, best_value = u, value - f_S, value
        if best >= 0:
            tracker.add((best,))
            S.append(best)
            chosen[best] = True
            f_S = best_value
    return S, f_S


def run_greedy(oracle: ValueOracle, k: int, lazy: bool = False):
    ledger = QueryLedger()
    started = time.perf_counter()
    solution, value = greedy(CountingOracle(oracle, ledger), k, lazy)
    # holds the whole ground set
    ledger.observe_stored(oracle.n)
    wall_ms = (time.perf_counter() - started) * 1e3
    name = "greedy-lazy" if lazy else "greedy"
    return solution, RunMetrics.from_ledger(name, oracle.n, k, 1, 0.0, value, ledger, wall_ms)


def run_stochastic_greedy(oracle: ValueOracle, k: int, eps: float = 0.1, seed: int = 0):
    ledger = QueryLedger()
    started = time.perf_counter()
    solution, value = stochastic_greedy(CountingOracle(oracle, ledger), k, eps, seed)
    ledger.observe_stored(oracle.n)
    wall_ms = (time.perf_counter() - started) * 1e3
    return solution, RunMetrics.from_ledger("ltl", oracle.n, k, 1, eps, value, ledger, wall_ms)
