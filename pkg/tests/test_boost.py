import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import quickstream.boost as boost
from quickstream.boost import (
    BoostParams,
    boost_ratio,
    pass_bound,
    run_boostratio,
    run_qs_br,
    run_qs_plus_plus,
    threshold_schedule,
)
from quickstream.objectives import MaxCoverOracle, ModularOracle, random_graph
from quickstream.oracle import CountingOracle
from quickstream.streaming import delta_ratio, dispatch, dispatched_ratio, query_bound, quickstream
from quickstream.verify import check_boost_gain_per_addition, check_boost_pass_bound, check_qs_br

CENTER = 0


def test_star_schedule_trace(star):
    taus = threshold_schedule(3.0, 0.25, 2, 0.1)
    assert taus[:4] == pytest.approx([5.4, 4.86, 4.374, 3.9366])
    trace = []
    A, value, passes = boost_ratio(CountingOracle(star), 2, BoostParams(3.0, 0.25, 0.1), [1, 2, 3, 0], trace)
    assert (A, value) == ([CENTER], 4)
    # the center (gain 4) goes in during the pass with tau = 3.9366
    assert trace == [(pytest.approx(3.9366), 0.0, 4.0)]
    assert passes == len(taus) <= pass_bound(0.25, 0.1)


def test_pass_bound_arithmetic():
    assert pass_bound(0.25, 0.1) == 29


@given(st.floats(0.01, 1.0), st.floats(0.01, 0.5), st.integers(1, 50), st.floats(0.1, 1e6))
def test_schedule_is_strictly_decreasing_and_within_bound(alpha, eps, k, gamma):
    taus = threshold_schedule(gamma, alpha, k, eps)
    assert all(b < a for a, b in zip(taus, taus[1:]))
    assert len(taus) <= pass_bound(alpha, eps)


def test_zero_gamma_is_a_no_op(star):
    counted = CountingOracle(star)
    assert boost_ratio(counted, 2, BoostParams(0.0, 0.5, 0.1), range(4)) == ([], 0.0, 0)
    assert counted.ledger.queries == 0


@pytest.mark.parametrize("kwargs", [dict(gamma=1, alpha=0, eps=0.1), dict(gamma=1, alpha=1.5, eps=0.1),
                                    dict(gamma=1, alpha=0.5, eps=1.0), dict(gamma=-1, alpha=0.5, eps=0.1)])
def test_params_validated(kwargs):
    with pytest.raises(ValueError):
        BoostParams(**kwargs)


def test_early_exit_when_full():
    counted = CountingOracle(ModularOracle(np.full(50, 3.0)))
    A, value, passes = boost_ratio(counted, 4, BoostParams(12.0, 1.0, 0.1), range(50))
    assert len(A) == 4 and value == 12.0
    # every element clears the first threshold: the run stops after the fourth query
    assert passes == 1 and counted.ledger.queries == 4


@given(st.integers(1, 8), st.integers(0, 10**6))
def test_solution_never_exceeds_k(k, seed):
    oracle = MaxCoverOracle(random_graph(60, 3, seed))
    solution, m = run_boostratio(oracle, k, BoostParams(float(k), 0.5, 0.2))
    assert len(solution) <= k
    assert m.passes <= pass_bound(0.5, 0.2)
    assert m.objective_value == oracle.evaluate(solution)


def test_members_are_not_requeried():
    counted = CountingOracle(ModularOracle([5.0, 0.0, 0.0]))
    _, _, passes = boost_ratio(counted, 3, BoostParams(5.0, 1.0, 0.5), range(3))
    # first pass queries all 3, later passes skip element 0
    assert counted.ledger.queries == 3 + 2 * (passes - 1)


# --- compositions ----------------------------------------------------------------------


def test_qs_br_pass_total():
    assert 1 + pass_bound(0.25, 0.1) == 30
    for seed in range(10):
        oracle = MaxCoverOracle(random_graph(200, 4, seed))
        for k in (1, 2, 3, 10):
            _, m = run_qs_br(oracle, k)
            assert m.passes <= 1 + pass_bound(dispatched_ratio(k, 1, 0.1), 0.1)


def test_qs_br_never_below_its_feed():
    for seed in range(15):
        oracle = MaxCoverOracle(random_graph(300, 5, seed))
        for k in (1, 2, 5, 20):
            _, feed = dispatch(oracle, k, 1)
            _, m = run_qs_br(oracle, k)
            assert m.objective_value >= feed.objective_value


def test_qs_br_ratio_target():
    assert 1 - math.exp(-0.9) == pytest.approx(0.5934, abs=1e-4)
    check = check_qs_br(instances=40, perms=3, seed=21)
    assert check.passed, check.detail


def test_boost_pass_bound_family():
    check = check_boost_pass_bound(instances=40, seed=21)
    assert check.passed, check.detail


def test_gain_per_addition():
    check = check_boost_gain_per_addition(instances=80, seed=21)
    assert check.passed, check.detail
    assert "0 filled" not in check.detail


def test_lower_tau_floor_breaks_the_pass_bound(monkeypatch):
    monkeypatch.setattr(boost, "_tau_floor", lambda gamma, k, eps: (1 - eps) * gamma / (400 * k))
    assert not check_boost_pass_bound(instances=40, seed=21).passed


def test_qs_plus_plus_is_single_pass_and_never_below_feed():
    for seed in range(10):
        oracle = MaxCoverOracle(random_graph(500, 6, seed))
        for c in (1, 4):
            for k in (2, 10, 40):
                _, m = run_qs_plus_plus(oracle, k, c)
                qs, _, feed_value = quickstream(CountingOracle(oracle), k, c, delta=c / 10, strict=c >= 10)
                assert m.passes == 1
                assert m.objective_value >= feed_value
                pb = pass_bound(min(1.0, delta_ratio(c, c / 10)), 0.1)
                assert m.queries <= query_bound(500, c) + len(qs.A) * pb


def test_qs_plus_plus_k1_falls_back(star):
    solution, m = run_qs_plus_plus(star, 1, 2)
    assert m.algorithm == "qs++"
    assert m.objective_value >= 4 / 2


def test_qs_plus_plus_alpha_for_default_delta():
    assert delta_ratio(1, 1 / 10) == pytest.approx(0.0826, abs=1e-4)
