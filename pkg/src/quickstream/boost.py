"""Multi-pass threshold boosting and its compositions with the single-pass algorithms."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

from .oracle import CountingOracle, QueryLedger, RunMetrics, ValueOracle
from .streaming import delta_ratio, dispatch, dispatch_counted, dispatched_ratio, quickstream


@dataclass(frozen=True)
class BoostParams:
    """Gamma must satisfy gamma <= OPT <= gamma / alpha for the guarantee to hold."""

    gamma: float
    alpha: float
    eps: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")


def pass_bound(alpha: float, eps: float) -> int:
    return math.ceil(math.log(4.0 / alpha) / eps) + 1


def _tau_floor(gamma: float, k: int, eps: float) -> float:
    return (1.0 - eps) * gamma / (4.0 * k)


def threshold_schedule(gamma: float, alpha: float, k: int, eps: float) -> list[float]:
    """Thresholds used by successive passes, in order."""
    taus = []
    tau = gamma / (alpha * k)
    floor = _tau_floor(gamma, k, eps)
    while tau >= floor:
        tau *= 1.0 - eps
        taus.append(tau)
    return taus


def boost_ratio(counted: CountingOracle, k: int, params: BoostParams, ground: Sequence[int],
                trace: list | None = None) -> tuple[list[int], float, int]:
    """Threshold passes over ``ground``; returns (A, f(A), passes made).

    Elements already in A are skipped without a query: their gain is zero.
    ``trace``, when given, receives ``(tau, f_before, f_after)`` per addition.
    """
    if params.gamma == 0 or k < 1:
        return [], 0.0, 0
    tracker = counted.tracker()
    A: list[int] = []
    members: set[int] = set()
    f_A = 0.0
    passes = 0
    tau = params.gamma / (params.alpha * k)
    floor = _tau_floor(params.gamma, k, params.eps)
    while tau >= floor:
        tau *= 1.0 - params.eps
        passes += 1
        for x in ground:
            if x in members:
                continue
            counted.ledger.observe_stored(len(A) + 1)
            value = tracker.query((x,))
            if value - f_A >= tau:
                tracker.add((x,))
                if trace is not None:
                    trace.append((tau, f_A, value))
                A.append(x)
                members.add(x)
                f_A = value
                if len(A) == k:
                    return A, f_A, passes
    return A, f_A, passes


def run_boostratio(oracle: ValueOracle, k: int, params: BoostParams, ground: Sequence[int] | None = None):
    ledger = QueryLedger()
    started = time.perf_counter()
    ground = range(oracle.n) if ground is None else ground
    solution, value, passes = boost_ratio(CountingOracle(oracle, ledger), k, params, ground)
    ledger.passes += passes
    wall_ms = (time.perf_counter() - started) * 1e3
    return solution, RunMetrics.from_ledger("br", oracle.n, k, 1, params.eps, value, ledger, wall_ms)


def run_qs_br(oracle: ValueOracle, k: int, eps: float = 0.1, order=None, refresh: str = "query",
              strict: bool = True):
    """Single-pass feed with c = 1, then boosting over the full ground set."""
    ledger = QueryLedger()
    counted = CountingOracle(oracle, ledger)
    started = time.perf_counter()
    _, feed, gamma = dispatch_counted(counted, k, 1, eps, order, refresh, strict)
    if gamma is None:
        gamma = counted(feed)
    solution, value = feed, gamma
    if gamma > 0:
        ground = range(oracle.n) if order is None else order
        params = BoostParams(gamma=gamma, alpha=dispatched_ratio(k, 1, eps), eps=eps)
        boosted, boosted_value, passes = boost_ratio(counted, k, params, ground)
        ledger.passes += passes
        if boosted_value > value:
            solution, value = boosted, boosted_value
    wall_ms = (time.perf_counter() - started) * 1e3
    return solution, RunMetrics.from_ledger("qs-br", oracle.n, k, 1, eps, value, ledger, wall_ms)


def run_qs_plus_plus(oracle: ValueOracle, k: int, c: int = 1, eps: float = 0.1, delta: float | None = None,
                     order=None, refresh: str = "query"):
    """QuickStream_c with a relaxed threshold, then boosting over the retained buffer.

    Still one pass over the stream; the boosting passes read only the buffer.
    """
    if k < 2:
        solution, metrics = dispatch(oracle, k, c, eps, order, refresh)
        metrics.algorithm = "qs++"
        return solution, metrics
    delta = c / 10 if delta is None else delta
    ledger = QueryLedger()
    counted = CountingOracle(oracle, ledger)
    started = time.perf_counter()
    # progress is only guaranteed for delta >= 1; with smaller delta violations are counted, not raised
    qs, feed, gamma = quickstream(counted, k, c, eps, delta, order, refresh, strict=delta >= 1)
    solution, value = feed, gamma
    if gamma > 0:
        buffer = list(qs.A)
        params = BoostParams(gamma=gamma, alpha=min(1.0, delta_ratio(c, delta)), eps=eps)
        boosted, boosted_value, _ = boost_ratio(counted, k, params, buffer)
        ledger.observe_stored(len(buffer) + len(boosted))
        if boosted_value > value:
            solution, value = boosted, boosted_value
    wall_ms = (time.perf_counter() - started) * 1e3
    return solution, RunMetrics.from_ledger("qs++", oracle.n, k, c, eps, value, ledger, wall_ms)
