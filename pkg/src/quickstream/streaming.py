"""Single-pass block-buffered streaming algorithms.

``QuickStream`` keeps an insertion-ordered buffer A and makes one query per
block of ``c`` stream elements; ``QuickSingleton`` covers k = 1 and
``QuickStreamLargeK`` trades the final partition for a better ratio once
k >= 8c/e.  :func:`dispatch` picks among the three.
"""

from __future__ import annotations

import math
import time
from typing import Iterable, Sequence

from .oracle import CountingOracle, QueryLedger, RunMetrics, ValueOracle

REFRESH_MODES = ("query", "stale")


class ProgressViolation(AssertionError):
    """The cached buffer value decreased across a block step."""


def buffer_depth(eps: float) -> int:
    """ceil(log2(1 / (4 eps))) + 3, floored at 3 (the value the progress argument needs)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return max(3, math.ceil(math.log2(1.0 / (4.0 * eps))) + 3)


def retained_size(c: int, k: int, eps: float) -> float:
    """c * ell * (k + 1) * log2(k): buffer size kept after a deletion."""
    return c * buffer_depth(eps) * (k + 1) * math.log2(k)


def memory_bound(c: int, k: int, eps: float) -> float:
    return 2 * retained_size(c, k, eps) + c


def query_bound(n: int, c: int) -> int:
    return -(-n // c) + c


def quickstream_ratio(c: int, k: int, eps: float) -> float:
    """Worst-case ratio of QuickStream_c, 1 / (c (4 + 2 / (k**ell - 1))) >= 1/(4c) - eps."""
    ell = buffer_depth(eps)
    return 1.0 / (c * (4.0 + 2.0 / (float(k) ** ell - 1.0)))


def delta_ratio(c: int, delta: float) -> float:
    """Ratio of QuickStream_c when blocks are accepted at gain >= delta f(A) / k."""
    return 1.0 / (c * (1.0 + delta) * (1.0 + 1.0 / delta))


def largek_ratio(c: int, k: int) -> float:
    e = math.e
    return (1.0 / (1 + c + 1.0 / (k**3 - 1))) * (1 - 1 / e - 2 * c / (k * e) - c * c / (k * k * e))


def largek_applies(k: int, c: int) -> bool:
    return k >= 8 * c / math.e


def _accepts(gain: float, threshold: float) -> bool:
    return gain >= threshold


def _blocks(order: Iterable[int], c: int):
    block = []
    for e in order:
        block.append(e)
        if len(block) == c:
            yield block
            block = []
    if block:
        yield block


class QuickStream:
    """Buffered single-pass state for k >= 2.

    Feed blocks with :meth:`process_block`, then call :meth:`finalize`.
    ``delta`` scales the acceptance threshold; ``refresh`` picks how the cached
    f(A) is restored after a deletion: ``"query"`` re-reads it with a counted
    refresh query, ``"stale"`` keeps the pre-deletion value until the next
    accepted block.
    """

    def __init__(self, counted: CountingOracle, k: int, c: int = 1, eps: float = 0.1,
                 delta: float = 1.0, refresh: str = "query", strict: bool = True):
        if k < 2:
            raise ValueError("QuickStream needs k >= 2; k = 1 is handled by QuickSingleton")
        if c < 1:
            raise ValueError("block size c must be at least 1")
        if delta <= 0:
            raise ValueError("delta must be positive")
        if refresh not in REFRESH_MODES:
            raise ValueError(f"refresh must be one of {REFRESH_MODES}")
        self.counted = counted
        self.ledger = counted.ledger
        self.k, self.c, self.eps, self.delta = k, c, eps, delta
        self.refresh, self.strict = refresh, strict
        self.ell = buffer_depth(eps)
        self.retain = retained_size(c, k, eps)
        self.A: list[int] = []
        self.f_A = 0.0
        self.deletions = 0
        self.violations = 0
        self._tracker = counted.tracker()

    def process_block(self, block: Sequence[int]) -> bool:
        """One query of f(A | block); returns whether the block was added."""
        if len(block) > self.c:
            raise ValueError("block larger than c")
        before = self.f_A
        self.ledger.observe_stored(len(self.A) + len(block))
        value = self._tracker.query(block)
        added = _accepts(value - self.f_A, self.delta * self.f_A / self.k)
        if added:
            self._tracker.add(block)
            self.A.extend(block)
            self.f_A = value
        if len(self.A) > 2 * self.retain:
            keep = math.ceil(self.retain)
            self._tracker.remove(self.A[:-keep])
            self.A = self.A[-keep:]
            self.deletions += 1
            if self.refresh == "query":
                self.f_A = self._tracker.refresh()
        if self.f_A < before:
            self.violations += 1
            if self.strict:
                raise ProgressViolation(f"f(A) fell from {before} to {self.f_A}")
        return added

    def tail(self) -> list[int]:
        """The min(ck, |A|) most recently added elements."""
        return self.A[-self.c * self.k:]

    def partition(self) -> list[list[int]]:
        """Chunks of the tail of size at most k, most recent first, aligned to the end."""
        tail = self.tail()
        return [tail[max(0, end - self.k):end] for end in range(len(tail), 0, -self.k)]

    def finalize(self) -> tuple[list[int], float]:
        best, best_value = [], 0.0
        for chunk in self.partition():
            value = self.counted(chunk)
            if not best or value > best_value:
                best, best_value = chunk, value
        return list(best), best_value


class QuickStreamLargeK:
    """Block-granular variant for k >= 8c/e; returns the last k elements without a final query."""

    def __init__(self, counted: CountingOracle, k: int, c: int = 1, refresh: str = "query",
                 strict: bool = True):
        if c < 1:
            raise ValueError("block size c must be at least 1")
        if k < 2 or not largek_applies(k, c):
            raise ValueError(f"QuickStreamLargeK needs k >= 8c/e = {8 * c / math.e:.3f} (and k >= 2)")
        if refresh not in REFRESH_MODES:
            raise ValueError(f"refresh must be one of {REFRESH_MODES}")
        self.counted, self.ledger = counted, counted.ledger
        self.k, self.c = k, c
        self.refresh, self.strict = refresh, strict
        self.max_blocks = 6 * (k + 1) * math.log2(k)
        self.keep_blocks = math.ceil(3 * (k + 1) * math.log2(k))
        self.blocks: list[list[int]] = []
        self.size = 0
        self.f_A = 0.0
        self.deletions = 0
        self.violations = 0
        self._tracker = counted.tracker()

    @property
    def j(self) -> int:
        return len(self.blocks)

    def process_block(self, block: Sequence[int]) -> bool:
        before = self.f_A
        self.ledger.observe_stored(self.size + len(block))
        value = self._tracker.query(block)
        added = _accepts(value - self.f_A, self.c * self.f_A / self.k)
        if added:
            self._tracker.add(block)
            self.blocks.append(list(block))
            self.size += len(block)
            self.f_A = value
        if self.j > self.max_blocks:
            dropped = self.blocks[:-self.keep_blocks]
            self.blocks = self.blocks[-self.keep_blocks:]
            gone = [e for b in dropped for e in b]
            self.size -= len(gone)
            self._tracker.remove(gone)
            self.deletions += 1
            if self.refresh == "query":
                self.f_A = self._tracker.refresh()
        if self.f_A < before:
            self.violations += 1
            if self.strict:
                raise ProgressViolation(f"f(A) fell from {before} to {self.f_A}")
        return added

    def solution(self) -> tuple[list[int], float | None]:
        """A' and its value when it is known without a query (A' == A), else None."""
        if self.size <= self.k:
            return [e for b in self.blocks for e in b], self.f_A
        out: list[int] = []
        for b in reversed(self.blocks):
            out[:0] = b
            if len(out) >= self.k:
                break
        return out[-self.k:], None


def _default_order(n, order):
    return range(n) if order is None else order


def quickstream(counted: CountingOracle, k: int, c: int = 1, eps: float = 0.1, delta: float = 1.0,
                order=None, refresh: str = "query", strict: bool = True) -> tuple[QuickStream, list[int], float]:
    qs = QuickStream(counted, k, c, eps, delta=delta, refresh=refresh, strict=strict)
    for block in _blocks(_default_order(counted.n, order), c):
        qs.process_block(block)
    counted.ledger.passes += 1
    solution, value = qs.finalize()
    return qs, solution, value


def quicksingleton(counted: CountingOracle, c: int = 1, order=None) -> tuple[list[int], float]:
    if c < 1:
        raise ValueError("block size c must be at least 1")
    A: list[int] = []
    f_A = 0.0
    for block in _blocks(_default_order(counted.n, order), c):
        counted.ledger.observe_stored(len(A) + len(block))
        value = counted(block)
        if value > f_A:
            A, f_A = block, value
    counted.ledger.passes += 1
    if len(A) <= 1:
        return A, f_A
    best, best_value = [], 0.0
    for a in A:
        value = counted([a])
        if not best or value > best_value:
            best, best_value = [a], value
    return best, best_value


def quickstream_largek(counted: CountingOracle, k: int, c: int = 1, order=None, refresh: str = "query",
                       strict: bool = True) -> tuple[QuickStreamLargeK, list[int], float | None]:
    qs = QuickStreamLargeK(counted, k, c, refresh=refresh, strict=strict)
    for block in _blocks(_default_order(counted.n, order), c):
        qs.process_block(block)
    counted.ledger.passes += 1
    solution, value = qs.solution()
    return qs, solution, value


def _finish(name, oracle, k, c, eps, solution, value, ledger, started):
    wall_ms = (time.perf_counter() - started) * 1e3
    if value is None:
        # reporting only: the algorithm itself never needs this value
        value = oracle.evaluate(solution)
    return solution, RunMetrics.from_ledger(name, oracle.n, k, c, eps, value, ledger, wall_ms)


def run_quickstream(oracle: ValueOracle, k: int, c: int = 1, eps: float = 0.1, delta: float = 1.0,
                    order=None, refresh: str = "query", strict: bool = True):
    ledger = QueryLedger()
    started = time.perf_counter()
    _, solution, value = quickstream(CountingOracle(oracle, ledger), k, c, eps, delta, order, refresh, strict)
    return _finish("qs", oracle, k, c, eps, solution, value, ledger, started)


def run_quicksingleton(oracle: ValueOracle, c: int = 1, order=None):
    ledger = QueryLedger()
    started = time.perf_counter()
    solution, value = quicksingleton(CountingOracle(oracle, ledger), c, order)
    return _finish("qsingleton", oracle, 1, c, 0.0, solution, value, ledger, started)


def run_quickstream_largek(oracle: ValueOracle, k: int, c: int = 1, order=None, refresh: str = "query",
                           strict: bool = True):
    ledger = QueryLedger()
    started = time.perf_counter()
    _, solution, value = quickstream_largek(CountingOracle(oracle, ledger), k, c, order, refresh, strict)
    return _finish("qslargek", oracle, k, c, 0.0, solution, value, ledger, started)


def dispatch_variant(k: int, c: int) -> str:
    if k < 1 or c < 1:
        raise ValueError("k and c must be at least 1")
    if k == 1:
        return "qsingleton"
    if largek_applies(k, c):
        return "qslargek"
    return "qs"


def dispatched_ratio(k: int, c: int, eps: float) -> float:
    variant = dispatch_variant(k, c)
    if variant == "qsingleton":
        return 1.0 / c
    if variant == "qslargek":
        return largek_ratio(c, k)
    return quickstream_ratio(c, k, eps)


def dispatch_counted(counted: CountingOracle, k: int, c: int = 1, eps: float = 0.1, order=None,
                     refresh: str = "query", strict: bool = True) -> tuple[str, list[int], float | None]:
    variant = dispatch_variant(k, c)
    if variant == "qsingleton":
        solution, value = quicksingleton(counted, c, order)
    elif variant == "qslargek":
        _, solution, value = quickstream_largek(counted, k, c, order, refresh, strict)
    else:
        _, solution, value = quickstream(counted, k, c, eps, 1.0, order, refresh, strict)
    return variant, solution, value


def dispatch(oracle: ValueOracle, k: int, c: int = 1, eps: float = 0.1, order=None,
             refresh: str = "query", strict: bool = True):
    """Run the single-pass variant whose guarantee covers (k, c)."""
    ledger = QueryLedger()
    started = time.perf_counter()
    variant, solution, value = dispatch_counted(CountingOracle(oracle, ledger), k, c, eps, order, refresh, strict)
    return _finish(variant, oracle, k, c, eps, solution, value, ledger, started)
