import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgpn import catalog
from sgpn.errors import NetValidationError, TransitionNotEnabled
from sgpn.game import StrategyPair
from sgpn.net import (
    NetDefinition,
    Place,
    Transition,
    choice_distribution,
    enabled_transitions,
    fire,
    validate_net,
)


def chain_net(n=3, rewards=(0.0, 0.0, 0.0)):
    places = tuple(Place(f"p{i}") for i in range(n))
    trans = tuple(Transition(f"t{i}", "environment", rewards=rewards) for i in range(n - 1))
    arcs = []
    for i in range(n - 1):
        arcs += [(f"p{i}", f"t{i}"), (f"t{i}", f"p{i + 1}")]
    return NetDefinition(places, trans, tuple(arcs), (("p0", 1),))


def test_place_to_place_arc_reported():
    net = chain_net()
    bad = net.replace(arcs=net.arcs + (("p0", "p1"),))
    report = validate_net(bad)
    assert any("'p0'->'p1'" in v and "place to place" in v for v in report)


def test_transition_to_transition_arc_reported():
    net = chain_net()
    report = validate_net(net.replace(arcs=net.arcs + (("t0", "t1"),)))
    assert any("transition to transition" in v for v in report)


def test_routing_mass_reported():
    places = (Place("a"), Place("b"), Place("c"))
    trans = (
        Transition("x", "environment", routing_prob=0.3),
        Transition("y", "environment", routing_prob=0.3),
    )
    arcs = (("a", "x"), ("x", "b"), ("a", "y"), ("y", "c"))
    report = validate_net(NetDefinition(places, trans, arcs, (("a", 1),)))
    assert any("routing mass 0.6" in v for v in report)


def test_missing_io_and_duplicate_success_reported():
    places = (Place("a", tag="attack_success"), Place("b", tag="attack_success"))
    trans = (Transition("x", "environment"),)
    report = validate_net(NetDefinition(places, trans, (("a", "x"),), ()))
    assert any("no output arc" in v for v in report)
    assert any("more than one attack_success" in v for v in report)


def test_empty_net_reported():
    assert validate_net(NetDefinition((), (), (), ())) == ["net has neither places nor transitions"]


def test_action_owner_mismatch_reported():
    net = chain_net()
    t = net.transitions[0]
    bad = net.replace(transitions=(Transition(t.id, "environment", action="defend"),) + net.transitions[1:])
    assert any("must be owned by defender" in v for v in validate_net(bad))


@pytest.mark.parametrize("key", catalog.KEYS)
def test_catalog_nets_validate(key):
    assert validate_net(catalog.load(key).net) == []


def test_enabled_empty_marking():
    net = chain_net()
    assert enabled_transitions(net, net.marking({})) == ()


def test_enabled_all_marked():
    net = chain_net(4)
    m = net.marking({p.id: 1 for p in net.places})
    assert set(enabled_transitions(net, m)) == {t.id for t in net.transitions}


def test_enabled_replay_initial(replay):
    net = replay.net
    m = net.initial_marking
    # MN ready (State 1), attacker ready (State 2), CN ready (State 7)
    assert m.as_dict(net) == {"State 1": 1, "State 2": 1, "State 7": 1}
    # only the MN can move until it has changed its address
    assert enabled_transitions(net, m) == ("Obtain new IP",)


def test_unknown_place_in_marking():
    with pytest.raises(NetValidationError):
        chain_net().marking({"nowhere": 1})


def test_fire_dos_create_bogus_reg():
    net = catalog.load("dos-attack").net
    m = fire(net, net.initial_marking, "Create bogus reg")
    assert m.as_dict(net) == {"State 2": 1}


def test_fire_not_enabled():
    net = chain_net()
    with pytest.raises(TransitionNotEnabled):
        fire(net, net.initial_marking, "t1")


def test_fire_zero_reward_keeps_vectors():
    net = chain_net()
    m = fire(net, net.initial_marking, "t0")
    assert m.tokens[1] == ((0.0, 0.0, 0.0),)


def test_fire_adds_reward_componentwise():
    net = chain_net(2, rewards=(-0.3, 0.0, 0.0))
    start = net.initial_marking
    start = type(start)(start.counts, (((0.1, 0.0, 0.0),), ()))
    m = fire(net, start, "t0")
    assert m.tokens[1][0] == pytest.approx((-0.2, 0.0, 0.0), abs=1e-15)


def test_fire_is_deterministic_and_marking_equality_ignores_rewards():
    net = chain_net(3, rewards=(1.0, 2.0, 0.0))
    a = fire(net, net.initial_marking, "t0")
    b = fire(net, net.initial_marking, "t0")
    assert a == b and a.tokens == b.tokens
    assert a == net.marking({"p1": 1})
    assert hash(a) == hash(net.marking({"p1": 1}))


def test_reward_bookkeeping_along_path():
    net = chain_net(4, rewards=(0.5, -0.25, 0.0))
    m = net.initial_marking
    for t in ("t0", "t1", "t2"):
        m = fire(net, m, t)
    assert m.tokens[3][0] == (1.5, -0.75, 0.0)


def test_choice_singleton():
    net = chain_net()
    assert choice_distribution(net, net.initial_marking) == {"t0": 1.0}


def test_choice_reduced_replay_ready(reduced_replay):
    net = reduced_replay
    d = choice_distribution(net, net.initial_marking, StrategyPair(0.25, 2 / 3))
    assert d == pytest.approx({"attack": 0.25, "no_attack": 0.75}, abs=1e-15)


def test_choice_uniform_routing():
    places = (Place("a"), Place("b"), Place("c"))
    trans = (
        Transition("x", "environment", routing_prob=0.5),
        Transition("y", "environment", routing_prob=0.5),
    )
    arcs = (("a", "x"), ("x", "b"), ("a", "y"), ("y", "c"))
    net = NetDefinition(places, trans, arcs, (("a", 1),))
    assert choice_distribution(net, net.initial_marking) == {"x": 0.5, "y": 0.5}


def test_choice_overrides_win():
    places = (Place("a"), Place("b"), Place("c"))
    trans = (
        Transition("x", "environment", routing_prob=0.5),
        Transition("y", "environment", routing_prob=0.5),
    )
    arcs = (("a", "x"), ("x", "b"), ("a", "y"), ("y", "c"))
    net = NetDefinition(places, trans, arcs, (("a", 1),))
    d = choice_distribution(net, net.initial_marking, overrides={"x": 0.9, "y": 0.1})
    assert d == pytest.approx({"x": 0.9, "y": 0.1})


def test_choice_dead_marking_is_empty():
    net = chain_net()
    assert choice_distribution(net, net.marking({"p2": 1})) == {}


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0, 1),
    st.floats(0, 1),
    st.sampled_from([k for k in catalog.KEYS if k.endswith("defense")]),
    st.data(),
)
def test_choice_sums_to_one_on_reachable_markings(pa, pd, key, data):
    from sgpn.reachability import build_reachability

    net = catalog.load(key).net
    s = StrategyPair(pa, pd)
    g = build_reachability(net, s)
    m = g.nodes[data.draw(st.integers(0, len(g.nodes) - 1))]
    d = choice_distribution(net, m, s)
    if d:
        assert abs(sum(d.values()) - 1.0) <= 1e-12
        for tid in d:
            assert fire(net, m, tid).counts.__len__() == len(net.places)
