import pytest

from sgpn import catalog
from sgpn.errors import ConfigurationError
from sgpn.game import solve_ne
from sgpn.net import ATTACK_DEFENDED
from sgpn.reachability import build_reachability, outcome_distribution


def test_list_has_eight_entries():
    models = catalog.list_models()
    assert len(models) == 8
    assert [m["key"] for m in models] == list(catalog.KEYS)


def test_dos_attack_contents():
    net = catalog.load("dos-attack").net
    assert {p.id for p in net.places} == {"State 1", "State 2", "State 3"}
    assert {t.id for t in net.transitions} == {
        "Create bogus reg", "Send Fake Req", "Tunnel Packet to Attacker",
    }


def test_replay_rewards():
    r = catalog.load("replay-defense").rewards
    assert r.as_dict() == {
        "Aa1": -0.3, "An1": 0.6, "Dd1": 0.0, "Dn1": 0.0,
        "Aa2": -0.15, "An2": -0.6, "Dd2": -0.15, "Dn2": 0.0,
    }
    assert catalog.load("replay-defense").provenance["rewards:An1"] == catalog.PUBLISHED


def test_bombing_tcp_reset_into_defended_place():
    net = catalog.load("bombing-defense").net
    outs = [net.places[i] for i in net.outputs("Send TCP RESET")]
    assert [p.tag for p in outs] == [ATTACK_DEFENDED]


def test_unknown_key_lists_valid_keys():
    with pytest.raises(ConfigurationError, match="replay-defense"):
        catalog.load("nope")


def test_attack_models_have_no_rewards():
    for key in catalog.KEYS:
        entry = catalog.load(key)
        assert (entry.rewards is None) == (not entry.is_defense)


@pytest.mark.parametrize("key", catalog.defense_keys())
def test_published_operating_points(key):
    entry = catalog.load(key)
    p_defend, success = catalog.PUBLISHED_OPERATING_POINTS[key]
    s = solve_ne(entry.rewards)
    assert s.p_defend == pytest.approx(p_defend, abs=1e-12)
    assert outcome_distribution(s).attack_success == pytest.approx(success, abs=1e-12)


@pytest.mark.parametrize("key", catalog.defense_keys())
def test_reconstructed_elements_flagged(key):
    prov = catalog.load(key).provenance
    assert prov["transition:Refrain from attack"] == catalog.RECONSTRUCTED
    assert prov["wiring"] == catalog.RECONSTRUCTED
    if key != "replay-defense":
        assert prov["rewards:An1"] == catalog.RECONSTRUCTED


def test_reconstruct_rewards_domain():
    with pytest.raises(ValueError):
        catalog.reconstruct_rewards(0.7, 0.5)


def test_stamp_rewards_places_payoffs():
    entry = catalog.load("replay-defense")
    r = entry.rewards
    net = entry.net
    assert net.transition("Authenticate BU").rewards == (r.Aa1, r.Aa2, 0.0)
    assert net.transition("Accept replayed BU").rewards == (r.An1, r.An2, 0.0)
    assert net.transition("Refrain from attack").rewards == (r.Dn1, r.Dn2, 0.0)


@pytest.mark.parametrize("key", catalog.KEYS)
def test_full_nets_are_finite(key):
    g = build_reachability(catalog.load(key).net)
    assert not g.truncated
    assert len(g.nodes) < 100
