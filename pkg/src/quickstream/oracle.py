"""Value-oracle plumbing: counted evaluation, query ledgers and a brute-force optimum.

Every algorithm in this package reaches the objective through a
:class:`CountingOracle`.  Full-set queries go through :func:`counted_eval`;
incremental queries of ``base | block`` go through :class:`Tracker`.  Both
charge the same :class:`QueryLedger`, one unit per query.  Calling
``oracle.evaluate`` directly is reserved for setup checks, brute-force test
oracles and post-run reporting.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields
from typing import Iterable, Sequence


class EnumerationCapError(RuntimeError):
    """Raised when a brute-force search would exceed the configured size cap."""


@dataclass
class QueryLedger:
    """Per-run accounting of oracle queries, stored elements and passes."""

    queries: int = 0
    refresh_queries: int = 0
    peak_stored: int = 0
    passes: int = 0

    @property
    def total_queries(self) -> int:
        return self.queries + self.refresh_queries

    def observe_stored(self, count: int) -> None:
        if count > self.peak_stored:
            self.peak_stored = count


@dataclass
class RunMetrics:
    """One experiment row.  Field order is the CSV column order."""

    algorithm: str
    n: int
    k: int
    c: int
    eps: float
    objective_value: float
    queries: int
    refresh_queries: int
    peak_stored: int
    passes: int
    wall_ms: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_ledger(cls, algorithm, n, k, c, eps, value, ledger: QueryLedger, wall_ms: float):
        return cls(
            algorithm=algorithm,
            n=n,
            k=k,
            c=c,
            eps=float(eps),
            objective_value=float(value),
            queries=ledger.queries,
            refresh_queries=ledger.refresh_queries,
            peak_stored=ledger.peak_stored,
            passes=ledger.passes,
            wall_ms=wall_ms,
        )


class ValueOracle:
    """A monotone, submodular, normalized set function over ``range(n)``.

    Subclasses implement :meth:`evaluate`.  Objectives with cheap incremental
    updates also override :meth:`session`; the default session recomputes from
    scratch, which is correct but slow.
    """

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("ground-set size must be non-negative")
        self.n = int(n)

    def evaluate(self, elements: Iterable[int]) -> float:
        raise NotImplementedError

    def session(self) -> "Session":
        return RecomputeSession(self)

    def check_elements(self, elements: Iterable[int]) -> None:
        for e in elements:
            if not 0 <= e < self.n:
                raise ValueError(f"element {e} outside ground set of size {self.n}")

    def _assert_normalized(self) -> None:
        # uncounted setup evaluation; algorithms rely on f(empty) == 0 without querying it
        value = self.evaluate(())
        if value != 0:
            raise ValueError(f"oracle is not normalized: f(empty) = {value}")


class Session:
    """Incremental view of ``f`` around a mutable base set.

    ``value`` is the oracle value of the base set.  Blocks passed to
    :meth:`value_with` and :meth:`add` may overlap the base; overlapping and
    repeated elements are ignored, so the result is always ``f(base | block)``.
    """

    def __init__(self, oracle: ValueOracle):
        self.oracle = oracle
        self.members: set[int] = set()
        self.value = 0.0

    def _fresh(self, block: Iterable[int]) -> list[int]:
        seen = set()
        out = []
        for e in block:
            if e not in self.members and e not in seen:
                seen.add(e)
                out.append(e)
        return out

    def value_with(self, block: Iterable[int]) -> float:
        new = self._fresh(block)
        if not new:
            return self.value
        return self._value_with(new)

    def add(self, block: Iterable[int]) -> None:
        new = self._fresh(block)
        if new:
            self._add(new)
            self.members.update(new)

    def remove(self, block: Iterable[int]) -> None:
        gone = [e for e in set(block) if e in self.members]
        if gone:
            self.members.difference_update(gone)
            self._remove(gone)

    def _value_with(self, new: list[int]) -> float:
        raise NotImplementedError

    def _add(self, new: list[int]) -> None:
        raise NotImplementedError

    def _remove(self, gone: list[int]) -> None:
        raise NotImplementedError


class RecomputeSession(Session):
    def _value_with(self, new):
        return self.oracle.evaluate(itertools.chain(self.members, new))

    def _add(self, new):
        self.value = self.oracle.evaluate(itertools.chain(self.members, new))

    def _remove(self, gone):
        self.value = self.oracle.evaluate(self.members)


def counted_eval(oracle: ValueOracle, ledger: QueryLedger, elements: Sequence[int]) -> float:
    """Evaluate ``oracle`` on ``elements``, charging exactly one query to ``ledger``."""
    oracle.check_elements(elements)
    ledger.queries += 1
    return oracle.evaluate(elements)


def cached_marginal(oracle: ValueOracle, ledger: QueryLedger, base_value: float,
                    union: Sequence[int]) -> float:
    """Marginal gain of ``union`` over a base set whose value is already cached."""
    return counted_eval(oracle, ledger, union) - base_value


class Tracker:
    """Counted incremental access to ``f(base | block)``.

    Bookkeeping (:meth:`add`, :meth:`remove`) is free; every value read is a
    charged query.  :meth:`refresh` re-reads the base value and is charged to
    ``ledger.refresh_queries`` so it stays visible next to the main count.
    """

    def __init__(self, oracle: ValueOracle, ledger: QueryLedger):
        self._oracle = oracle
        self._session = oracle.session()
        self.ledger = ledger

    def query(self, block: Sequence[int]) -> float:
        self._oracle.check_elements(block)
        self.ledger.queries += 1
        return self._session.value_with(block)

    def add(self, block: Sequence[int]) -> None:
        self._session.add(block)

    def remove(self, block: Sequence[int]) -> None:
        self._session.remove(block)

    def refresh(self) -> float:
        self.ledger.refresh_queries += 1
        return self._session.value


class CountingOracle:
    """Pairs an oracle with the ledger of one run."""

    def __init__(self, oracle: ValueOracle, ledger: QueryLedger | None = None):
        self.oracle = oracle
        self.ledger = ledger if ledger is not None else QueryLedger()

    @property
    def n(self) -> int:
        return self.oracle.n

    def __call__(self, elements: Sequence[int]) -> float:
        return counted_eval(self.oracle, self.ledger, elements)

    def tracker(self) -> Tracker:
        return Tracker(self.oracle, self.ledger)


def brute_force_opt(oracle: ValueOracle, k: int, max_n: int = 20) -> tuple[list[int], float]:
    """Exhaustive optimum over all subsets of size at most ``k``.

    Uses uncounted evaluations; this is a test oracle, not an algorithm.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if oracle.n > max_n:
        raise EnumerationCapError(f"n={oracle.n} exceeds brute-force cap {max_n}")
    best: list[int] = []
    best_value = 0.0
    for size in range(1, min(k, oracle.n) + 1):
        for subset in itertools.combinations(range(oracle.n), size):
            value = oracle.evaluate(subset)
            if value > best_value:
                best, best_value = list(subset), value
    return best, best_value
