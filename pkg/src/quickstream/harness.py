"""Experiment runner: config validation, per-trial runs, CSV rows, and the distinguishing experiment."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, fields
from typing import Callable, Sequence

import numpy as np

from .baselines import run_greedy, run_stochastic_greedy
from .boost import run_qs_br, run_qs_plus_plus
from .objectives import (
    AdversarialOracle,
    MaxCoverOracle,
    RevenueOracle,
    load_edge_list,
    make_revenue_instance,
    random_graph,
)
from .oracle import CountingOracle, RunMetrics, ValueOracle
from .streaming import (
    largek_applies,
    run_quicksingleton,
    run_quickstream,
    run_quickstream_largek,
)

ALGORITHMS = ("qs", "qs++", "qs-br", "qsingleton", "qslargek", "greedy", "greedy-lazy", "ltl")
OBJECTIVES = ("maxcover", "revmax", "adversarial")
RANDOMIZED = frozenset({"ltl"})

SMALL_K = (10, 50, 100, 500, 1000)
LARGE_K_FRACTIONS = (0.01, 0.05, 0.1)


class ConfigError(ValueError):
    """Invalid parameter combination, detected before any oracle is built."""


@dataclass
class ExperimentConfig:
    algorithm: str
    objective: str = "maxcover"
    graph: str | None = None
    k: int = 10
    c: int = 1
    eps: float = 0.1
    delta: float | None = None
    seed: int = 0
    trials: int | None = None
    out: str | None = None
    shuffle: int | None = None
    n: int | None = None
    random_n: int | None = None
    avg_degree: float = 10.0
    refresh: str = "query"

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}; choose from {', '.join(OBJECTIVES)}")
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.c < 1:
            raise ConfigError("c must be at least 1")
        if not 0 < self.eps < 1:
            raise ConfigError("eps must lie in (0, 1)")
        if self.delta is not None and self.delta <= 0:
            raise ConfigError("delta must be positive")
        if self.trials is not None and self.trials < 0:
            raise ConfigError("trials must be non-negative")
        if self.refresh not in ("query", "stale"):
            raise ConfigError("refresh must be 'query' or 'stale'")
        if self.algorithm == "qs" and self.k < 2:
            raise ConfigError("qs needs k >= 2 (use qsingleton for k = 1)")
        if self.algorithm == "qsingleton" and self.k != 1:
            raise ConfigError("qsingleton is the k = 1 algorithm")
        if self.algorithm == "qslargek" and (self.k < 2 or not largek_applies(self.k, self.c)):
            raise ConfigError(f"qslargek needs k >= 8c/e = {8 * self.c / math.e:.3f}")
        if self.objective == "adversarial":
            if self.n is None or self.n < 1:
                raise ConfigError("the adversarial objective needs --n")
        elif (self.graph is None) == (self.random_n is None):
            raise ConfigError("give exactly one of --graph or --random")

    @property
    def trial_count(self) -> int:
        if self.trials is not None:
            return self.trials
        return 10 if self.algorithm in RANDOMIZED else 1


def build_oracle(config: ExperimentConfig) -> ValueOracle:
    if config.objective == "adversarial":
        return AdversarialOracle(config.n, config.c, config.k)
    if config.graph is not None:
        graph = load_edge_list(config.graph)
    else:
        graph = random_graph(config.random_n, config.avg_degree, config.seed)
    if config.objective == "maxcover":
        return MaxCoverOracle(graph)
    return RevenueOracle(make_revenue_instance(graph, config.seed))


def stream_order(n: int, shuffle: int | None):
    if shuffle is None:
        return None
    return np.random.default_rng(shuffle).permutation(n).tolist()


def run_algorithm(name: str, oracle: ValueOracle, k: int, c: int = 1, eps: float = 0.1,
                  delta: float | None = None, seed: int = 0, order=None, refresh: str = "query"):
    """Run one named algorithm; returns (solution, RunMetrics)."""
    if name == "qs":
        return run_quickstream(oracle, k, c, eps, order=order, refresh=refresh)
    if name == "qs++":
        return run_qs_plus_plus(oracle, k, c, eps, delta, order=order, refresh=refresh)
    if name == "qs-br":
        return run_qs_br(oracle, k, eps, order=order, refresh=refresh)
    if name == "qsingleton":
        return run_quicksingleton(oracle, c, order=order)
    if name == "qslargek":
        return run_quickstream_largek(oracle, k, c, order=order, refresh=refresh)
    if name == "greedy":
        return run_greedy(oracle, k, lazy=False)
    if name == "greedy-lazy":
        return run_greedy(oracle, k, lazy=True)
    if name == "ltl":
        return run_stochastic_greedy(oracle, k, eps, seed)
    raise ConfigError(f"unknown algorithm {name!r}")


def run_experiment(config: ExperimentConfig, oracle: ValueOracle | None = None) -> list[RunMetrics]:
    """One row per trial.  Randomized algorithms get seed + trial index."""
    config.validate()
    if oracle is None:
        oracle = build_oracle(config)
    if config.algorithm not in ("qsingleton", "greedy", "greedy-lazy", "ltl") and config.k > oracle.n:
        raise ConfigError(f"k={config.k} exceeds n={oracle.n}")
    order = stream_order(oracle.n, config.shuffle)
    rows = []
    for trial in range(config.trial_count):
        _, metrics = run_algorithm(config.algorithm, oracle, config.k, config.c, config.eps,
                                   config.delta, config.seed + trial, order, config.refresh)
        rows.append(metrics)
    return rows


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def emit_csv(rows: Sequence[RunMetrics], path: str | os.PathLike) -> None:
    """Append rows to ``path``, writing the header only if the file is new or empty."""
    header = RunMetrics.columns()
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    if not fresh:
        with open(path, newline="") as fh:
            first = fh.readline().strip()
        if first.split(",") != header:
            raise ValueError(f"{path} has a different header: {first!r}")
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if fresh:
            writer.writerow(header)
        for row in rows:
            writer.writerow([_format(getattr(row, name)) for name in header])


def read_csv(path: str | os.PathLike) -> list[RunMetrics]:
    types = {f.name: f.type for f in fields(RunMetrics)}
    casts = {"str": str, "int": int, "float": float}
    with open(path, newline="") as fh:
        return [RunMetrics(**{key: casts[types[key]](val) for key, val in rec.items()})
                for rec in csv.DictReader(fh)]


def normalize_rows(rows: Sequence[RunMetrics], baseline: Sequence[str] = ("greedy", "greedy-lazy")):
    """Objective value divided by the greedy value for the same (n, k), from rows only.

    Returns ``(row, normalized)`` pairs for every non-baseline row that has a
    baseline; greedy variants are interchangeable since they return the same set.
    """
    reference = {}
    for row in rows:
        if row.algorithm in baseline:
            reference.setdefault((row.n, row.k), row.objective_value)
    out = []
    for row in rows:
        if row.algorithm in baseline:
            continue
        ref = reference.get((row.n, row.k))
        if ref is None:
            continue
        out.append((row, row.objective_value / ref if ref > 0 else 1.0))
    return out


def k_grid(name: str, n: int) -> list[int]:
    if name == "small":
        return [k for k in SMALL_K if k <= n]
    if name == "large":
        return sorted({max(1, int(f * n)) for f in LARGE_K_FRACTIONS})
    return [int(x) for x in name.split(",")]


# --- distinguishing experiment ---------------------------------------------------------


@dataclass
class DistinguishReport:
    algorithm: str
    trials: int
    rate: float
    mean_queries: float
    bound: float
    stderr: float

    @property
    def passed(self) -> bool:
        return self.rate <= self.bound + 3 * self.stderr


def probe(m: int, size: int = 1) -> Callable:
    """A stand-in algorithm issuing ``m`` queries of random ``size``-sets."""
    def run(oracle: ValueOracle, seed: int):
        counted = CountingOracle(oracle)
        rng = np.random.default_rng(seed)
        for _ in range(m):
            counted(rng.choice(oracle.n, size=size, replace=False).tolist())
        return None, counted.ledger
    return run


def _algorithm_block(name: str, c: int, k: int) -> int:
    if name == "qslargek":
        # largest block size for which the large-k variant applies
        return max(1, min(c, int(k * math.e / 8)))
    return c


def _run_on(algorithm, oracle: ValueOracle, k: int, c: int, eps: float, seed: int) -> int:
    if callable(algorithm):
        _, ledger = algorithm(oracle, seed)
        return ledger.total_queries
    k_alg = 1 if algorithm == "qsingleton" else k
    _, metrics = run_algorithm(algorithm, oracle, k_alg, _algorithm_block(algorithm, c, k), eps, seed=seed)
    return metrics.queries + metrics.refresh_queries


def adversarial_trials(algorithm: str | Callable, n: int, c: int, k: int, trials: int, seed: int = 0,
                       eps: float = 0.1, mode: str = "replay") -> DistinguishReport:
    """Fraction of trials in which the algorithm queried a set of size <= ck - 1 holding the hidden element.

    ``mode="direct"`` runs the algorithm against g with a fresh hidden element
    per trial.  ``mode="replay"`` runs it against f and tests whether the
    trial's hidden element lies in the union of small queried sets.  Until the
    first such query f and g answer identically, so for a fixed seed the g run
    reproduces the f transcript up to that query and both modes decide every
    trial the same way; replay only needs one f run per distinct seed.  In
    replay mode the query count is that of the undistinguished transcript.
    """
    if c < 2:
        raise ValueError("the hard instance needs c >= 2")
    if mode not in ("replay", "direct"):
        raise ValueError("mode must be 'replay' or 'direct'")
    name = algorithm if isinstance(algorithm, str) else getattr(algorithm, "__name__", "probe")
    if trials == 0:
        return DistinguishReport(name, 0, 0.0, 0.0, 0.0, 0.0)
    randomized = callable(algorithm) or algorithm in RANDOMIZED
    rng = np.random.default_rng(seed)
    hidden = rng.integers(0, n, size=trials)
    hits = 0
    queries = []
    cache = {}
    for t in range(trials):
        run_seed = seed + t if randomized else seed
        if mode == "direct":
            oracle = AdversarialOracle(n, c, k, hidden=int(hidden[t]), record=True)
            queries.append(_run_on(algorithm, oracle, k, c, eps, run_seed))
            hits += oracle.distinguished
            continue
        if run_seed not in cache:
            oracle = AdversarialOracle(n, c, k, record=True)
            m = _run_on(algorithm, oracle, k, c, eps, run_seed)
            cache = {run_seed: (m, oracle.small_union)}
        m, union = cache[run_seed]
        queries.append(m)
        hits += int(hidden[t]) in union
    mean_m = float(np.mean(queries))
    bound = mean_m * (c * k - 1) / n
    p = min(bound, 1.0)
    stderr = math.sqrt(p * (1 - p) / trials)
    return DistinguishReport(name, trials, hits / trials, mean_m, bound, stderr)
