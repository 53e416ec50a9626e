import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

import quickstream.oracle as oracle_mod
from quickstream.objectives import AdversarialOracle, MaxCoverOracle, ModularOracle, random_graph
from quickstream.oracle import (
    CountingOracle,
    EnumerationCapError,
    QueryLedger,
    RunMetrics,
    ValueOracle,
    brute_force_opt,
    cached_marginal,
    counted_eval,
)
from quickstream.streaming import run_quickstream
from quickstream.baselines import run_greedy, run_stochastic_greedy
from quickstream.boost import run_qs_br


def test_counted_eval_on_path_charges_one_query(path3):
    ledger = QueryLedger()
    assert counted_eval(path3, ledger, [1]) == 3
    assert ledger.queries == 1


@pytest.mark.parametrize("make", [
    lambda: MaxCoverOracle(random_graph(30, 3, 0)),
    lambda: AdversarialOracle(20, 2, 3),
    lambda: AdversarialOracle(20, 2, 3, hidden=4),
    lambda: ModularOracle([1.0, 2.0]),
])
def test_empty_set_is_zero(make):
    assert make().evaluate([]) == 0


def test_adversarial_caps_at_ck():
    assert counted_eval(AdversarialOracle(20, 2, 3), QueryLedger(), range(10)) == 6


def test_cached_marginal_arithmetic(star):
    modular = ModularOracle([2.0, 1.0, 4.0])
    ledger = QueryLedger()
    assert cached_marginal(modular, ledger, 2.0, [0, 1]) == 1
    assert cached_marginal(modular, ledger, 0.0, [2]) == 4
    # star: leaf a covers {a, center}; adding leaf b covers one more vertex
    base = star.evaluate([1])
    assert base == 2
    assert cached_marginal(star, ledger, base, [1, 2]) == 1
    assert ledger.queries == 3


def test_brute_force_examples(star):
    assert brute_force_opt(star, 2)[1] == 4
    adv = AdversarialOracle(8, 2, 3)
    assert brute_force_opt(adv, 3)[1] == 3
    assert brute_force_opt(star, 0) == ([], 0.0)


def test_brute_force_cap():
    with pytest.raises(EnumerationCapError):
        brute_force_opt(ModularOracle(np.ones(21)), 2)


def test_brute_force_is_exhaustive(star):
    # independent enumeration straight from the definition
    best = max(star.evaluate(s) for r in range(3) for s in itertools.combinations(range(4), r))
    assert brute_force_opt(star, 2)[1] == best


@given(st.lists(st.integers(0, 50), min_size=1, max_size=10), st.data())
def test_brute_force_matches_top_k_on_modular(weights, data):
    k = data.draw(st.integers(0, len(weights)))
    _, opt = brute_force_opt(ModularOracle(weights), k)
    assert opt == sum(sorted(weights, reverse=True)[:k])


def test_unnormalized_oracle_rejected():
    class Shifted(ValueOracle):
        def __init__(self):
            super().__init__(3)
            self._assert_normalized()

        def evaluate(self, elements):
            return 1.0 + len(set(elements))

    with pytest.raises(ValueError, match="not normalized"):
        Shifted()


def test_out_of_range_element_rejected(path3):
    with pytest.raises(ValueError):
        counted_eval(path3, QueryLedger(), [3])
    with pytest.raises(ValueError):
        CountingOracle(path3).tracker().query([-1])


def test_tracker_bookkeeping_is_free_and_refresh_is_separate(star):
    counted = CountingOracle(star)
    tracker = counted.tracker()
    assert tracker.query([1]) == 2
    tracker.add([1])
    tracker.add([2])
    tracker.remove([2])
    assert tracker.refresh() == 2
    assert counted.ledger.queries == 1
    assert counted.ledger.refresh_queries == 1
    assert counted.ledger.total_queries == 2


def test_observe_stored_keeps_maximum():
    ledger = QueryLedger()
    for count in (3, 9, 2):
        ledger.observe_stored(count)
    assert ledger.peak_stored == 9


def test_run_metrics_column_order():
    assert RunMetrics.columns() == ["algorithm", "n", "k", "c", "eps", "objective_value", "queries",
                                    "refresh_queries", "peak_stored", "passes", "wall_ms"]


@pytest.mark.parametrize("run", [
    lambda o: run_quickstream(o, 5, 2),
    lambda o: run_qs_br(o, 4),
    lambda o: run_greedy(o, 4, lazy=True),
    lambda o: run_stochastic_greedy(o, 4, 0.2, 1),
])
def test_every_value_read_is_charged(monkeypatch, run):
    """ledger totals equal the number of calls on the two charged paths."""
    calls = {"n": 0}
    real_eval, real_query = oracle_mod.counted_eval, oracle_mod.Tracker.query

    def spy_eval(*a, **kw):
        calls["n"] += 1
        return real_eval(*a, **kw)

    def spy_query(self, block):
        calls["n"] += 1
        return real_query(self, block)

    monkeypatch.setattr(oracle_mod, "counted_eval", spy_eval)
    monkeypatch.setattr(oracle_mod.Tracker, "query", spy_query)
    _, metrics = run(MaxCoverOracle(random_graph(200, 4, 3)))
    assert metrics.queries == calls["n"]
