import numpy as np
import pytest

from sgpn.game import StrategyPair
from sgpn.montecarlo import (
    BLOCK,
    CONVERGENCE_COLUMNS,
    SimConfig,
    convergence_report,
    simulate,
    token_game_run,
)
from sgpn.net import NetDefinition, Place, Transition

NE = StrategyPair(0.25, 2 / 3)


def test_deterministic(reduced_replay):
    cfg = SimConfig(runs=20_000, seed=3, strategy=NE)
    assert simulate(reduced_replay, cfg) == simulate(reduced_replay, cfg)


def test_seed_changes_result(reduced_replay):
    a = simulate(reduced_replay, SimConfig(runs=20_000, seed=1, strategy=NE))
    b = simulate(reduced_replay, SimConfig(runs=20_000, seed=2, strategy=NE))
    assert a.counts != b.counts


def test_never_attack(reduced_replay):
    res = simulate(reduced_replay, SimConfig(runs=5000, strategy=StrategyPair(0.0, 0.5)))
    assert res.frequencies["no_attack"] == 1.0
    assert res.truncated == 0


def test_single_run(reduced_replay):
    res = simulate(reduced_replay, SimConfig(runs=1, strategy=NE))
    assert sum(res.counts.values()) == 1


def test_prefix_and_worker_independence(reduced_replay):
    n = BLOCK + 1000
    a = simulate(reduced_replay, SimConfig(runs=n, seed=9, strategy=NE))
    b = simulate(reduced_replay, SimConfig(runs=n, seed=9, strategy=NE, workers=2))
    assert a == b
    rows = convergence_report(reduced_replay, NE, [1000, n], seed=9)
    small = simulate(reduced_replay, SimConfig(runs=1000, seed=9, strategy=NE))
    assert rows[0].empirical_success == small.frequencies["attack_success"]
    assert rows[1].empirical_success == a.frequencies["attack_success"]


def test_frequency_near_analytic(reduced_replay):
    res = simulate(reduced_replay, SimConfig(runs=200_000, seed=42, strategy=NE))
    # 4 binomial standard deviations at n = 2e5
    assert res.frequencies["attack_success"] == pytest.approx(1 / 12, abs=0.0025)


def test_attacker_reward_expectation(replay):
    # the attacker is indifferent at equilibrium: expected round payoff is Dn1 = 0
    res = simulate(replay.net, SimConfig(runs=200_000, seed=5, strategy=NE))
    assert res.mean_reward[0] == pytest.approx(0.0, abs=0.003)


def test_full_net_agrees_with_token_game(replay):
    rng = np.random.default_rng(11)
    n = 3000
    tags = [token_game_run(replay.net, NE, rng)[0] for _ in range(n)]
    slow = tags.count("attack_success") / n
    fast = simulate(replay.net, SimConfig(runs=n, seed=11, strategy=NE)).frequencies["attack_success"]
    sd = np.sqrt((1 / 12) * (11 / 12) / n)
    assert abs(slow - 1 / 12) < 4 * sd
    assert abs(fast - 1 / 12) < 4 * sd


def test_token_game_fired_path(replay):
    tag, marking, fired = token_game_run(replay.net, StrategyPair(1.0, 1.0), np.random.default_rng(0))
    assert tag == "attack_defended"
    assert fired[:2] == ["Obtain new IP", "Send Previously Saved BU"]
    assert fired[-2:] == ["Attacker req to update BU", "Authenticate BU"]


def test_truncation_counted():
    places = (Place("a"), Place("b"), Place("done", tag="no_attack"))
    trans = (
        Transition("loop", "environment", routing_prob=0.999),
        Transition("exit", "environment", routing_prob=0.001),
        Transition("back", "environment"),
    )
    arcs = (("a", "loop"), ("loop", "b"), ("b", "back"), ("back", "a"), ("a", "exit"), ("exit", "done"))
    net = NetDefinition(places, trans, arcs, (("a", 1),))
    res = simulate(net, SimConfig(runs=1000, max_steps=3))
    assert res.truncated + sum(res.counts.values()) == 1000
    assert res.truncated > 990


def test_timed_mean(reduced_replay):
    # two rate-1 transitions race in ready and in contested: each sojourn is Exp(2)
    res = simulate(reduced_replay, SimConfig(runs=100_000, seed=1, strategy=NE, timed=True))
    assert res.mean_time == pytest.approx(0.5 + 0.25 * 0.5, abs=0.01)


def test_convergence_table(reduced_replay):
    rows = convergence_report(reduced_replay, NE, [10, 100, 1000], seed=4)
    assert len(rows) == 3
    assert all(r.analytic_success == pytest.approx(1 / 12, abs=1e-12) for r in rows)
    assert rows == convergence_report(reduced_replay, NE, [10, 100, 1000], seed=4)
    assert CONVERGENCE_COLUMNS == ("runs", "empirical_success", "analytic_success", "abs_error")


def test_single_checkpoint_bound(reduced_replay):
    (row,) = convergence_report(reduced_replay, NE, [1])
    assert row.abs_error <= max(1 / 12, 11 / 12)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(runs=0)
    with pytest.raises(ValueError):
        SimConfig(runs=1, seed=-1)
