"""Self-checks: objective laws, small-instance ratios against brute force, and the complexity bounds.

Each ``check_*`` returns a :class:`Check`; :func:`verify_suite` runs them all.
The ratio checks compare against :func:`~quickstream.oracle.brute_force_opt`,
which shares no code with the algorithms under test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .baselines import greedy, run_greedy
from .boost import BoostParams, boost_ratio, pass_bound, run_qs_br
from .objectives import (
    AdversarialOracle,
    GraphInstance,
    MaxCoverOracle,
    ModularOracle,
    RevenueOracle,
    make_revenue_instance,
    random_graph,
    random_small_graph,
)
from .oracle import CountingOracle, brute_force_opt
from .streaming import (
    QuickStream,
    dispatch_counted,
    dispatched_ratio,
    largek_applies,
    largek_ratio,
    memory_bound,
    query_bound,
    run_quicksingleton,
    run_quickstream,
    run_quickstream_largek,
)

EPS = 0.1


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    failures: list = field(default_factory=list, repr=False)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def _check(name, failures, detail=""):
    return Check(name, not failures, detail if not failures else f"{len(failures)} violations; first: {failures[0]}",
                 failures)


def small_family(count: int, seed: int = 0, n_max: int = 10):
    """Random max-cover instances with 3 <= n <= n_max, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(3, n_max + 1))
        p = float(rng.uniform(0.15, 0.6))
        yield MaxCoverOracle(random_small_graph(n, p, rng))


def _permutations(n, count, rng):
    yield list(range(n))
    for _ in range(count - 1):
        yield rng.permutation(n).tolist()


# --- objective laws -------------------------------------------------------------------


def _random_chain(rng, n):
    """A subset B of range(n), a subset A of B, and u outside B (None if B is everything)."""
    b_mask = rng.random(n) < rng.uniform(0, 1)
    a_mask = b_mask & (rng.random(n) < rng.uniform(0, 1))
    outside = np.flatnonzero(~b_mask)
    u = int(rng.choice(outside)) if outside.size else None
    return np.flatnonzero(a_mask).tolist(), np.flatnonzero(b_mask).tolist(), u


def check_objective_laws(oracle, name: str, samples: int = 1000, seed: int = 0, tol: float = 0.0) -> Check:
    rng = np.random.default_rng(seed)
    failures = []
    for _ in range(samples):
        A, B, u = _random_chain(rng, oracle.n)
        fa, fb = oracle.evaluate(A), oracle.evaluate(B)
        if fa > fb + tol:
            failures.append(("monotone", A, B, fa, fb))
        if u is None:
            continue
        gain_a = oracle.evaluate(A + [u]) - fa
        gain_b = oracle.evaluate(B + [u]) - fb
        if gain_b > gain_a + tol:
            failures.append(("submodular", A, B, u, gain_a, gain_b))
    return _check(f"laws[{name}]", failures, f"{samples} samples")


def objective_zoo(seed: int = 0, n: int = 300):
    graph = random_graph(n, 6, seed)
    return {
        "maxcover": (MaxCoverOracle(graph), 0.0),
        "revmax": (RevenueOracle(make_revenue_instance(graph, seed)), 1e-9),
        # small ground set so that sets of size <= ck - 1 are sampled often
        "adversarial-f": (AdversarialOracle(30, 2, 5), 0.0),
        "adversarial-g": (AdversarialOracle(30, 2, 5, hidden=seed % 30), 0.0),
    }


def check_session_consistency(oracle, name: str, steps: int = 300, seed: int = 0, tol: float = 1e-9) -> Check:
    """Incremental sessions agree with from-scratch evaluation through adds and removes."""
    rng = np.random.default_rng(seed)
    session = oracle.session()
    failures = []
    for _ in range(steps):
        block = rng.choice(oracle.n, size=int(rng.integers(1, 5)), replace=False).tolist()
        peek = session.value_with(block)
        want = oracle.evaluate(list(session.members) + block)
        if abs(peek - want) > tol:
            failures.append(("peek", block, peek, want))
        if rng.random() < 0.7:
            session.add(block)
        elif session.members:
            gone = rng.choice(sorted(session.members), size=min(3, len(session.members)), replace=False).tolist()
            session.remove(gone)
        if abs(session.value - oracle.evaluate(session.members)) > tol:
            failures.append(("value", sorted(session.members)))
    return _check(f"session[{name}]", failures, f"{steps} steps")


# --- small-instance ratios ----------------------------------------------------------


def check_quickstream_ratio(instances: int = 200, perms: int = 5, ks=(2, 3), cs=(1, 2, 4), seed: int = 0) -> Check:
    rng = np.random.default_rng(seed + 1)
    failures = []
    runs = 0
    for oracle in small_family(instances, seed):
        for k in ks:
            _, opt = brute_force_opt(oracle, k)
            for order in _permutations(oracle.n, perms, rng):
                for c in cs:
                    solution, m = run_quickstream(oracle, k, c, EPS, order=order)
                    runs += 1
                    target = (1 / (4 * c) - EPS) * opt
                    if m.objective_value < target or len(solution) > k:
                        failures.append((oracle.graph.adjacency(), k, c, order, m.objective_value, opt))
    return _check("ratio[qs] >= (1/(4c) - eps) OPT", failures, f"{runs} runs")


def check_singleton_ratio(instances: int = 200, perms: int = 5, cs=(1, 2, 3), seed: int = 0) -> Check:
    rng = np.random.default_rng(seed + 2)
    failures = []
    runs = 0
    for oracle in small_family(instances, seed):
        _, opt = brute_force_opt(oracle, 1)
        for order in _permutations(oracle.n, perms, rng):
            for c in cs:
                solution, m = run_quicksingleton(oracle, c, order=order)
                runs += 1
                if m.objective_value < opt / c or len(solution) > 1:
                    failures.append((oracle.graph.adjacency(), c, order, m.objective_value, opt))
    return _check("ratio[qsingleton] >= OPT/c", failures, f"{runs} runs")


def check_largek_ratio(instances: int = 200, perms: int = 5, ks=(3,), seed: int = 0) -> Check:
    rng = np.random.default_rng(seed + 3)
    failures = []
    runs = 0
    for oracle in small_family(instances, seed):
        for k in ks:
            cs = [c for c in (1, 2) if largek_applies(k, c)]
            if not cs:
                continue
            _, opt = brute_force_opt(oracle, k)
            for order in _permutations(oracle.n, perms, rng):
                for c in cs:
                    solution, m = run_quickstream_largek(oracle, k, c, order=order)
                    runs += 1
                    if m.objective_value < largek_ratio(c, k) * opt or len(solution) > k:
                        failures.append((oracle.graph.adjacency(), k, c, order, m.objective_value, opt))
    return _check("ratio[qslargek] >= large-k formula * OPT", failures, f"{runs} runs")


def check_qs_br(instances: int = 200, perms: int = 5, ks=(1, 2, 3, 4), seed: int = 0) -> Check:
    """Ratio 1 - e^(-1+eps) and the pass bound, over the small family."""
    rng = np.random.default_rng(seed + 4)
    target = 1 - math.exp(-1 + EPS)
    failures = []
    runs = 0
    for oracle in small_family(instances, seed):
        for k in ks:
            _, opt = brute_force_opt(oracle, k)
            bound = 1 + pass_bound(dispatched_ratio(k, 1, EPS), EPS)
            for order in _permutations(oracle.n, perms, rng):
                solution, m = run_qs_br(oracle, k, EPS, order=order)
                runs += 1
                if m.objective_value < target * opt or len(solution) > k:
                    failures.append(("ratio", oracle.graph.adjacency(), k, order, m.objective_value, opt))
                if m.passes > bound:
                    failures.append(("passes", oracle.graph.adjacency(), k, order, m.passes, bound))
    return _check("qs-br ratio >= 1 - e^(-1+eps) and passes <= bound", failures, f"{runs} runs")


def check_boost_pass_bound(instances: int = 200, ks=(2, 3, 4), alphas=(1.0, 0.25, 0.1), seed: int = 0) -> Check:
    """Passes <= ceil(ln(4/alpha)/eps) + 1 for boosting fed with a valid gamma."""
    failures = []
    runs = 0
    for oracle in small_family(instances, seed):
        for k in ks:
            _, opt = brute_force_opt(oracle, k)
            for alpha in alphas:
                # any gamma in [alpha OPT, OPT] is valid; take the low end to stress the schedule
                gamma = alpha * opt
                if gamma == 0:
                    continue
                counted = CountingOracle(oracle)
                _, _, passes = boost_ratio(counted, k, BoostParams(gamma, alpha, EPS), range(oracle.n))
                runs += 1
                if passes > pass_bound(alpha, EPS) or counted.ledger.queries > oracle.n * pass_bound(alpha, EPS):
                    failures.append((oracle.graph.adjacency(), k, alpha, passes, pass_bound(alpha, EPS)))
    star = MaxCoverOracle(GraphInstance.from_edges(4, [(0, 1), (0, 2), (0, 3)]))
    _, _, passes = boost_ratio(CountingOracle(star), 2, BoostParams(3.0, 0.25, EPS), [1, 2, 3, 0])
    if passes > pass_bound(0.25, EPS):
        failures.append(("star", passes, pass_bound(0.25, EPS)))
    return _check("boost passes <= ceil(ln(4/alpha)/eps) + 1", failures, f"{runs + 1} runs")


def check_boost_gain_per_addition(instances: int = 200, ks=(2, 3, 4), seed: int = 0) -> Check:
    """Each addition of a run that fills k slots gains >= (1 - eps)/k (OPT - f(A_i))."""
    failures = []
    filled = 0
    for oracle in small_family(instances, seed):
        for k in ks:
            _, opt = brute_force_opt(oracle, k)
            counted = CountingOracle(oracle)
            _, _, gamma = _feed(counted, k)
            if gamma == 0:
                continue
            trace = []
            A, _, _ = boost_ratio(counted, k, BoostParams(gamma, dispatched_ratio(k, 1, EPS), EPS),
                                  range(oracle.n), trace=trace)
            if len(A) < k:
                continue
            filled += 1
            for tau, before, after in trace:
                if after - before < (1 - EPS) / k * (opt - before) - 1e-12:
                    failures.append((oracle.graph.adjacency(), k, tau, before, after, opt))
    return _check("boost gain per addition", failures, f"{filled} filled runs")


def _feed(counted, k):
    variant, solution, value = dispatch_counted(counted, k, 1, EPS)
    if value is None:
        value = counted(solution)
    return variant, solution, value


def check_greedy_ratio(instances: int = 200, ks=(1, 2, 3), seed: int = 0) -> Check:
    failures = []
    runs = 0
    for oracle in small_family(instances, seed):
        for k in ks:
            _, opt = brute_force_opt(oracle, k)
            _, m = run_greedy(oracle, k)
            runs += 1
            if m.objective_value < (1 - 1 / math.e) * opt:
                failures.append((oracle.graph.adjacency(), k, m.objective_value, opt))
    return _check("greedy >= (1 - 1/e) OPT", failures, f"{runs} runs")


def check_lazy_matches_eager(instances: int = 50, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed + 5)
    failures = []
    for oracle in small_family(instances, seed + 7, n_max=14):
        k = int(rng.integers(1, oracle.n + 1))
        eager, lazy = CountingOracle(oracle), CountingOracle(oracle)
        s1, v1 = greedy(eager, k, lazy=False)
        s2, v2 = greedy(lazy, k, lazy=True)
        if s1 != s2 or v1 != v2 or lazy.ledger.queries > eager.ledger.queries:
            failures.append((oracle.graph.adjacency(), k, s1, s2, eager.ledger.queries, lazy.ledger.queries))
    return _check("lazy greedy == eager greedy", failures, f"{instances} instances")


# --- bounds and behaviours ------------------------------------------------------------


def check_stream_bounds(ns=(1000, 10000), cs=(1, 4, 16), ks=(2, 10, 100), seed: int = 0) -> Check:
    """Queries <= ceil(n/c) + c (also with refresh queries added) and peak memory bound."""
    failures = []
    runs = 0
    for n in ns:
        oracle = MaxCoverOracle(random_graph(n, 8, seed + n))
        for c in cs:
            for k in ks:
                solution, m = run_quickstream(oracle, k, c, EPS)
                runs += 1
                qb = query_bound(n, c)
                if m.queries > qb or m.queries + m.refresh_queries > qb:
                    failures.append(("queries", n, c, k, m.queries, m.refresh_queries, qb))
                if m.peak_stored > memory_bound(c, k, EPS):
                    failures.append(("memory", n, c, k, m.peak_stored, memory_bound(c, k, EPS)))
                if len(solution) > k:
                    failures.append(("feasible", n, c, k, len(solution)))
    return _check("stream query and memory bounds", failures, f"{runs} runs")


def check_zero_gain_at_empty() -> Check:
    """With A empty the threshold is 0, so a zero-gain block is still accepted."""
    graph = GraphInstance.from_edges(3, [(1, 2)])  # vertex 0 is isolated: f({0}) = 0
    qs = QuickStream(CountingOracle(MaxCoverOracle(graph)), k=2, c=1, eps=EPS)
    added = qs.process_block([0])
    failures = [] if added and qs.A == [0] else [("rejected", qs.A)]
    return _check("zero-gain block accepted while A is empty", failures)


def check_growth_grid(ks=range(2, 65)) -> Check:
    """(1 + 1/k)^i >= y once i >= (k + 1) ln y."""
    failures = []
    for k in ks:
        for y in (2, 10, k, k * k):
            i = math.ceil((k + 1) * math.log(y))
            if (1 + 1 / k) ** i < y:
                failures.append((k, y, i))
    return _check("(1 + 1/k)^i >= y for i >= (k+1) ln y", failures)


def check_modular_opt(samples: int = 50, seed: int = 0) -> Check:
    """On additive objectives brute force equals the sum of the k largest weights."""
    rng = np.random.default_rng(seed)
    failures = []
    for _ in range(samples):
        n = int(rng.integers(1, 11))
        w = rng.integers(0, 20, size=n).astype(float)
        k = int(rng.integers(0, n + 1))
        _, opt = brute_force_opt(ModularOracle(w), k)
        want = float(np.sort(w)[::-1][:k].sum())
        if opt != want:
            failures.append((w.tolist(), k, opt, want))
    return _check("brute force == top-k on modular objectives", failures, f"{samples} samples")


def verify_suite(instances: int = 200, perms: int = 5, seed: int = 0, quick: bool = False) -> list[Check]:
    """Run every check.  ``quick`` shrinks the instance counts for smoke runs."""
    if quick:
        instances, perms = 30, 2
    checks = []
    for name, (oracle, tol) in objective_zoo(seed).items():
        checks.append(check_objective_laws(oracle, name, 200 if quick else 1000, seed, tol))
        checks.append(check_session_consistency(oracle, name, seed=seed))
    checks += [
        check_modular_opt(seed=seed),
        check_zero_gain_at_empty(),
        check_growth_grid(),
        check_quickstream_ratio(instances, perms, seed=seed),
        check_singleton_ratio(instances, perms, seed=seed),
        check_largek_ratio(instances, perms, seed=seed),
        check_qs_br(instances, perms, seed=seed),
        check_boost_pass_bound(instances, seed=seed),
        check_boost_gain_per_addition(instances, seed=seed),
        check_greedy_ratio(instances, seed=seed),
        check_lazy_matches_eager(seed=seed),
        check_stream_bounds(ns=(1000,) if quick else (1000, 10000), seed=seed),
    ]
    return checks
