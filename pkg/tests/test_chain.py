import numpy as np
import pytest

from oracles import cesaro_limit, random_stochastic
from sgpn import catalog
from sgpn.chain import (
    build_tpm,
    direct_stationary,
    fold_states,
    outcome_report,
    power_iteration,
    stationary_distribution,
    stationary_residual,
)
from sgpn.errors import DegenerateModelError, NumericalError
from sgpn.game import StrategyPair
from sgpn.net import NetDefinition, Place, Transition
from sgpn.reachability import Edge, ReachabilityGraph, build_reachability, reduce_to_attack_defend

NE = StrategyPair(0.25, 2 / 3)


def graph_of(n, edges):
    places = tuple(Place(f"p{i}") for i in range(n))
    net = NetDefinition(places, (), (), (("p0", 1),))
    nodes = [net.marking({f"p{i}": 1}) for i in range(n)]
    return ReachabilityGraph(net, nodes, [Edge(a, b, "t", p) for a, b, p in edges])


def test_single_edge_gets_terminal_self_loop():
    m = build_tpm(graph_of(2, [(0, 1, 1.0)]))
    assert m.tolist() == [[0, 1], [0, 1]]


def test_parallel_edges_add():
    m = build_tpm(graph_of(2, [(0, 1, 0.3), (0, 1, 0.2), (0, 0, 0.5)]))
    assert m[0, 1] == 0.5


def test_folded_replay_ready_row(reduced_replay):
    g = build_reachability(reduced_replay, NE)
    m = build_tpm(g)
    net = g.net
    order = ["ready", "no_attack", "success", "defended"]
    tag_of = {"ready": "ready", "no_attack": "no_attack", "success": "attack_success", "defended": "attack_defended"}
    keep = [g.nodes_tagged(tag_of[k])[0] for k in order]
    folded = fold_states(m, keep)
    assert folded[0] == pytest.approx([0.0, 0.75, 0.25 / 3, 0.25 * 2 / 3], abs=1e-15)
    assert np.allclose(folded.sum(axis=1), 1.0)
    assert net.places[0].tag == "ready"


def test_identity_start_absorbing():
    v = stationary_distribution(np.eye(3), start=0)
    assert v.tolist() == [1.0, 0.0, 0.0]


def test_symmetric_two_state():
    assert stationary_distribution(np.full((2, 2), 0.5)) == pytest.approx([0.5, 0.5], abs=1e-15)


def test_periodic_chain_converges():
    m = np.array([[0, 1], [1, 0.0]])
    assert stationary_distribution(m) == pytest.approx([0.5, 0.5], abs=1e-12)


def test_reducible_chain_mixture():
    # from 0 go to absorbing 1 or 2 with probability 0.3 / 0.7
    m = np.array([[0, 0.3, 0.7], [0, 1, 0], [0, 0, 1.0]])
    assert stationary_distribution(m) == pytest.approx([0, 0.3, 0.7], abs=1e-12)


def test_not_stochastic():
    with pytest.raises(NumericalError):
        direct_stationary(np.array([[0.5, 0.4], [0, 1.0]]))


@pytest.mark.parametrize("seed", range(20))
def test_matches_cesaro_oracle(seed):
    rng = np.random.default_rng(seed)
    m = random_stochastic(rng, int(rng.integers(2, 9)), density=0.5)
    start = int(rng.integers(len(m)))
    v = stationary_distribution(m, start)
    assert v == pytest.approx(cesaro_limit(m, start), abs=1e-9)
    assert stationary_residual(m, v) <= 1e-10
    assert power_iteration(m, start) == pytest.approx(v, abs=1e-9)


def test_replay_outcomes(reduced_replay):
    g = build_reachability(reduced_replay, NE)
    m = build_tpm(g)
    v = stationary_distribution(m)
    assert stationary_residual(m, v) <= 1e-10
    o = outcome_report(g, v)
    assert o.as_tuple() == pytest.approx((0.75, 1 / 12, 1 / 6), abs=1e-12)


def test_never_attacked(reduced_replay):
    g = build_reachability(reduced_replay, StrategyPair(0.0, 0.5))
    o = outcome_report(g, stationary_distribution(build_tpm(g)))
    assert o.as_tuple() == pytest.approx((1.0, 0.0, 0.0), abs=1e-15)


def test_dos_operating_point():
    net = reduce_to_attack_defend(catalog.load("dos-defense").net)
    pa = 0.0857412 / (1 - 0.724)
    g = build_reachability(net, StrategyPair(pa, 0.724))
    o = outcome_report(g, stationary_distribution(build_tpm(g)))
    assert o.attack_success == pytest.approx(0.0857412, abs=1e-6)


def test_no_outcome_mass():
    g = graph_of(2, [(0, 1, 1.0)])
    with pytest.raises(DegenerateModelError):
        outcome_report(g, [0.0, 1.0])
