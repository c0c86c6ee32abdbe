"""Built-in Mobile IP attack and defense models.

Place and transition descriptions follow the published model tables. Two
kinds of content are reconstructed, and each entry's provenance map marks
them as such:

* the explicit "refrain from attack" / "let the attack through" branches and
  their outcome places, which the defense tables leave implicit but the
  attack/defend reduction needs;
* the reward tables of the DoS, bombing and redirection defenses. They keep
  the replay table's structure and are solved backwards from the published
  (defender activity, success rate) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigurationError
from .game import RewardTable
from .net import (
    ATTACK_DEFENDED,
    ATTACK_SUCCESS,
    ATTACKER,
    DEFENDER,
    ENVIRONMENT,
    NO_ATTACK,
    PLAIN,
    READY,
    NetDefinition,
    Place,
    Transition,
)

PUBLISHED = "published"
RECONSTRUCTED = "reconstructed"

REPLAY_REWARDS = RewardTable(
    Aa1=-0.3, An1=0.6, Dd1=0.0, Dn1=0.0, Aa2=-0.15, An2=-0.6, Dd2=-0.15, Dn2=0.0
)

# published (P_D, attack success probability) at equilibrium
PUBLISHED_OPERATING_POINTS = {
    "dos-defense": (0.724, 0.0857412),
    "bombing-defense": (0.70, 0.0642),
    "redirection-defense": (0.684, 0.07287),
    "replay-defense": (2.0 / 3.0, 1.0 / 12.0),
}


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    title: str
    summary: str
    net: NetDefinition
    rewards: Optional[RewardTable] = None
    provenance: dict[str, str] = field(default_factory=dict)

    @property
    def is_defense(self) -> bool:
        return self.key.endswith("-defense")


def reconstruct_rewards(
    p_defend: float, success: float, capture_penalty: float = -0.3, defense_cost: float = -0.15
) -> RewardTable:
    """Reward table with the replay structure whose equilibrium hits the given point.

    The attacker's payoff for an undefended attack is set so the defender's
    equilibrium mix is ``p_defend``; the defender's breach cost is set so the
    attacker's mix yields ``success = P_A * (1 - P_D)``.
    """
    if not (0.0 < p_defend < 1.0) or not (0.0 < success < 1.0 - p_defend):
        raise ValueError("operating point must satisfy 0 < P_D < 1 and 0 < success < 1 - P_D")
    p_attack = success / (1.0 - p_defend)
    return RewardTable(
        Aa1=capture_penalty,
        An1=-capture_penalty * p_defend / (1.0 - p_defend),
        Dd1=0.0,
        Dn1=0.0,
        Aa2=defense_cost,
        An2=defense_cost / p_attack,
        Dd2=defense_cost,
        Dn2=0.0,
    )


def stamp_rewards(net: NetDefinition, table: RewardTable) -> NetDefinition:
    """Copy the stage-game payoffs onto the strategic transitions.

    defend pays (Aa1, Aa2), not_defend pays (An1, An2) and no_attack pays the
    undefended no-attack entry (Dn1, Dn2). Other transitions keep their rewards.
    """
    pay = {
        "defend": (table.Aa1, table.Aa2),
        "not_defend": (table.An1, table.An2),
        "no_attack": (table.Dn1, table.Dn2),
    }
    out = []
    for t in net.transitions:
        if t.action in pay:
            vec = list(t.rewards)
            vec[net.players.index(ATTACKER)], vec[net.players.index(DEFENDER)] = pay[t.action]
            t = Transition(t.id, t.owner, t.routing_prob, t.rate, tuple(vec), t.description, t.action)
        out.append(t)
    return net.replace(transitions=tuple(out))


def _build(name, places, transitions, initial) -> NetDefinition:
    ps = tuple(Place(pid, desc, tag) for pid, desc, tag in places)
    ts, arcs = [], []
    for tid, owner, ins, outs, desc, action, routing in transitions:
        ts.append(Transition(tid, owner, routing, 1.0, (0.0, 0.0, 0.0), desc, action))
        arcs += [(p, tid) for p in ins] + [(tid, p) for p in outs]
    return NetDefinition(ps, tuple(ts), tuple(arcs), tuple((p, 1) for p in initial), name=name)


def _dos_attack() -> NetDefinition:
    return _build(
        "dos-attack",
        [
            ("State 1", "Attacker is ready to attack.", READY),
            ("State 2", "Attacker has created bogus registration.", PLAIN),
            ("State 3", "Attacker's fake request is accepted by MN.", ATTACK_SUCCESS),
        ],
        [
            ("Create bogus reg", ATTACKER, ["State 1"], ["State 2"],
             "Attacker is creating a bogus registration.", None, 1.0),
            ("Send Fake Req", ATTACKER, ["State 2"], ["State 3"],
             "Attacker is sending the fake registration request to MN.", None, 1.0),
            ("Tunnel Packet to Attacker", ENVIRONMENT, ["State 3"], ["State 1"],
             "MN is fooled by the fake request. Data is tunneled to attacker instead of MN.", None, 1.0),
        ],
        ["State 1"],
    )


def _redirection_attack() -> NetDefinition:
    return _build(
        "redirection-attack",
        [
            ("State 1", "Attacker is ready.", READY),
            ("State 2", "Attacker has collected IP addresses of MN and CN.", PLAIN),
            ("State 3", "Attacker has created fabricated BU.", PLAIN),
            ("State 4", "CN has updated binding cache using wrong IP address.", PLAIN),
            ("State 5", "CN is ready to send data.", PLAIN),
            ("State 6", "CN has sent data to wrong CoA.", ATTACK_SUCCESS),
        ],
        [
            ("Collect IP Addresses of MN & CN", ATTACKER, ["State 1"], ["State 2"],
             "Attacker is collecting IP addresses of MN & CN.", None, 1.0),
            ("Create Fabricated BU", ATTACKER, ["State 2"], ["State 3"],
             "Attacker is creating fabricated BU.", None, 1.0),
            ("Req to Update Binding Cache", ATTACKER, ["State 3"], ["State 4"],
             "Attacker is requesting to update the binding cache with it's fake BU.", None, 1.0),
            # the poisoned binding cache persists (read arc on State 4)
            ("Send Data to New CoA", ENVIRONMENT, ["State 4", "State 5"], ["State 6", "State 4"],
             "CN is sending data to wrong CoA.", None, 1.0),
            ("Back to Ready", ENVIRONMENT, ["State 6"], ["State 5"],
             "CN is getting back to ready to send data again.", None, 1.0),
        ],
        ["State 1", "State 5"],
    )


def _bombing_attack() -> NetDefinition:
    return _build(
        "bombing-attack",
        [
            ("State 1", "Attacker is ready to attack.", READY),
            ("State 2", "Attacker has established TCP connection with streaming server.", PLAIN),
            ("State 3", "Attacker has obtained data packets from streaming server along with "
             "sequence numbers.", PLAIN),
            ("State 4", "CN updates the binding cache with wrong BU.", PLAIN),
            ("State 5", "CN (Streaming Server) is ready to send data.", PLAIN),
            ("State 6", "Victim MN has received unsolicited stream of data from streaming server.",
             ATTACK_SUCCESS),
        ],
        [
            ("Create TCP/IP Connection", ATTACKER, ["State 1"], ["State 2"],
             "Attacker is creating a TCP/IP connection with server.", None, 1.0),
            ("Request for streaming data", ATTACKER, ["State 2"], ["State 3"],
             "Attacker is requesting for streaming data from streaming server.", None, 1.0),
            ("Send fake BU to Server", ATTACKER, ["State 3"], ["State 4"],
             "Attacker is sending fake BU to server specifying that it has changed its location.",
             None, 1.0),
            ("Send data to new CoA", ENVIRONMENT, ["State 4", "State 5"], ["State 6"],
             "CN, in this case the streaming server is sending data to victim's IP.", None, 1.0),
        ],
        ["State 1", "State 5"],
    )


def _replay_attack() -> NetDefinition:
    return _build(
        "replay-attack",
        [
            ("State 1", "MN is ready.", PLAIN),
            ("State 2", "Attacker is ready.", READY),
            ("State 3", "MN's IP is changed due to change of its location.", PLAIN),
            ("State 4", "Attacker has sent a fake BU which was recorded before.", PLAIN),
            ("State 5", "MN has sent the BU to the CN.", PLAIN),
            ("State 6", "CN has updated the binding cache with attacker's BU.", PLAIN),
            ("State 7", "CN is ready to send data.", PLAIN),
            ("State 8", "CN has sent data to updated wrong CoA.", ATTACK_SUCCESS),
        ],
        [
            ("MN ready", ENVIRONMENT, ["State 5"], ["State 1"],
             "MN is becoming ready to interact with CN.", None, 1.0),
            ("Obtain new IP", ENVIRONMENT, ["State 1"], ["State 3"],
             "MN is obtaining a new IP because it has changed its location.", None, 1.0),
            # the replay waits for the MN to move (read arc on State 3)
            ("Send Previously Saved BU", ATTACKER, ["State 2", "State 3"], ["State 4", "State 3"],
             "MN is sending BU to CN.", None, 1.0),
            ("MN req to update BU", ENVIRONMENT, ["State 3"], ["State 5"],
             "MN is requesting to update binding cache with its BU.", None, 1.0),
            ("Attacker req to update BU", ATTACKER, ["State 4"], ["State 6"],
             "Attacker is requesting to update binding cache with its BU.", None, 1.0),
            ("Send data to new CoA", ENVIRONMENT, ["State 6", "State 7"], ["State 8", "State 6"],
             "CN is sending data to fake CoA.", None, 1.0),
            ("Get Back to Ready", ENVIRONMENT, ["State 8"], ["State 7"],
             "CN is getting ready to send data again.", None, 1.0),
        ],
        ["State 1", "State 2", "State 7"],
    )


def _dos_defense() -> NetDefinition:
    return _build(
        "dos-defense",
        [
            ("State 1", "Attacker is ready to attack.", READY),
            ("State 2", "Attacker has created bogus registration.", PLAIN),
            ("State 3", "Attacker's fake registration request is submitted to CN.", PLAIN),
            ("State 4", "MN's authenticate request is accepted by CN.", PLAIN),
            ("State 5", "MN is ready to send registration request.", PLAIN),
            ("State 6", "Attacker's authentication is failed and attack is not done.",
             ATTACK_DEFENDED),
            ("State 7", "Bogus registration is accepted; traffic is tunneled to the attacker.",
             ATTACK_SUCCESS),
            ("State 8", "Attacker stays idle; no bogus registration is created.", NO_ATTACK),
            ("State 9", "MN's registration request is awaiting authentication.", PLAIN),
        ],
        [
            ("Create bogus reg", ATTACKER, ["State 1"], ["State 2"],
             "Attacker is creating a bogus registration.", "attack", 0.5),
            ("Refrain from attack", ATTACKER, ["State 1"], ["State 8"],
             "Attacker decides not to attack.", "no_attack", 0.5),
            ("Send Fake Req", ATTACKER, ["State 2"], ["State 3"],
             "Attacker is sending the fake registration request to MN.", None, 1.0),
            ("Send Reg Req", ENVIRONMENT, ["State 5"], ["State 9"],
             "MN is sending valid registration request to CN.", None, 1.0),
            ("Successfully Authenticate", ENVIRONMENT, ["State 9"], ["State 4"],
             "CN is successfully authenticating the registration request of the MN.", None, 1.0),
            ("Tunnel Packet to MN", ENVIRONMENT, ["State 4"], ["State 5"],
             "CN is tunneling packet to MN.", None, 1.0),
            ("Fail to Authenticate", DEFENDER, ["State 3"], ["State 6"],
             "CN is unsuccessfully authenticating the registration request of the attacker.",
             "defend", 0.5),
            ("Accept bogus reg", DEFENDER, ["State 3"], ["State 7"],
             "Authentication is not enforced; the bogus registration is accepted.",
             "not_defend", 0.5),
        ],
        ["State 1", "State 5"],
    )


def _redirection_defense() -> NetDefinition:
    return _build(
        "redirection-defense",
        [
            ("State 1", "Attacker is ready.", READY),
            ("State 2", "Attacker has collected IP addresses of MN and CN.", PLAIN),
            ("State 3", "Attacker has created fabricated BU.", PLAIN),
            ("State 4", "CN has received requests to update binding cache.", PLAIN),
            ("State 5", "CN is ready to send data.", PLAIN),
            ("State 6", "CN has failed to authenticate wrong BU and attack is failed.",
             ATTACK_DEFENDED),
            ("State 7", "CN has accepted the fabricated BU and sends data to the wrong CoA.",
             ATTACK_SUCCESS),
            ("State 8", "Attacker stays idle; no fabricated BU is sent.", NO_ATTACK),
        ],
        [
            ("Collect IP Addresses of MN & CN", ATTACKER, ["State 1"], ["State 2"],
             "Attacker is collecting IP addresses of MN & CN.", "attack", 0.5),
            ("Refrain from attack", ATTACKER, ["State 1"], ["State 8"],
             "Attacker decides not to attack.", "no_attack", 0.5),
            ("Create Fabricated BU", ATTACKER, ["State 2"], ["State 3"],
             "Attacker is creating fabricated BU.", None, 1.0),
            ("Req to Update Binding Cache", ATTACKER, ["State 3", "State 5"], ["State 4"],
             "Attacker is requesting to update the binding cache with it's fake BU.", None, 1.0),
            ("Fail to Authenticate BU", DEFENDER, ["State 4"], ["State 6"],
             "CN is failing to authenticate attacker's fake BU.", "defend", 0.5),
            ("Accept fabricated BU", DEFENDER, ["State 4"], ["State 7"],
             "BU is not authenticated; CN updates its binding cache.", "not_defend", 0.5),
        ],
        ["State 1", "State 5"],
    )


def _bombing_defense() -> NetDefinition:
    return _build(
        "bombing-defense",
        [
            ("State 1", "Attacker is ready to attack.", READY),
            ("State 2", "Attacker has established TCP connection with streaming server.", PLAIN),
            ("State 3", "Attacker has obtained data packets from streaming server along with "
             "sequence numbers.", PLAIN),
            ("State 4", "CN updates the binding cache with wrong BU.", PLAIN),
            ("State 5", "CN (Streaming Server) is ready to send data.", PLAIN),
            ("State 6", "Victim MN has received unsolicited stream of data from streaming server.",
             PLAIN),
            ("State 7", "Victim MN has sent TCP RESET and attack is failed.", ATTACK_DEFENDED),
            ("State 8", "Victim MN keeps receiving the unsolicited stream; bandwidth is wasted.",
             ATTACK_SUCCESS),
            ("State 9", "Attacker stays idle; no stream is requested.", NO_ATTACK),
        ],
        [
            ("Create TCP/IP Connection", ATTACKER, ["State 1"], ["State 2"],
             "Attacker is creating a TCP/IP connection with server.", "attack", 0.5),
            ("Refrain from attack", ATTACKER, ["State 1"], ["State 9"],
             "Attacker decides not to attack.", "no_attack", 0.5),
            ("Request for streaming data", ATTACKER, ["State 2"], ["State 3"],
             "Attacker is requesting for streaming data from streaming server.", None, 1.0),
            ("Send fake BU to Server", ATTACKER, ["State 3"], ["State 4"],
             "Attacker is sending fake BU to server specifying that it has changed its location.",
             None, 1.0),
            ("Send data to new CoA", ENVIRONMENT, ["State 4", "State 5"], ["State 6"],
             "CN, in this case the streaming server is sending data to victim's IP.", None, 1.0),
            ("Send TCP RESET", DEFENDER, ["State 6"], ["State 7"],
             "Victim MN is sending TCP RESET signal to CN.", "defend", 0.5),
            ("Ignore stream", DEFENDER, ["State 6"], ["State 8"],
             "Victim MN does not react to the unsolicited stream.", "not_defend", 0.5),
        ],
        ["State 1", "State 5"],
    )


def _replay_defense() -> NetDefinition:
    return _build(
        "replay-defense",
        [
            ("State 1", "MN is ready.", PLAIN),
            ("State 2", "Attacker is ready.", READY),
            ("State 3", "MN's IP is changed due to change of its location.", PLAIN),
            ("State 4", "Attacker has sent a fake BU which was recorded before.", PLAIN),
            ("State 5", "MN has sent the BU to the CN.", PLAIN),
            ("State 6", "CN has received requests to update the binding cache.", PLAIN),
            ("State 7", "CN is ready to send data.", PLAIN),
            ("State 8", "CN has failed to authenticate fake BU and attack is failed.",
             ATTACK_DEFENDED),
            ("State 9", "CN has accepted the replayed BU and sends data to the stale CoA.",
             ATTACK_SUCCESS),
            ("State 10", "Attacker stays idle; the recorded BU is not replayed.", NO_ATTACK),
        ],
        [
            ("MN ready", ENVIRONMENT, ["State 5"], ["State 1"],
             "MN is becoming ready to interact with CN.", None, 1.0),
            ("Obtain new IP", ENVIRONMENT, ["State 1"], ["State 3"],
             "MN is obtaining a new IP because it has changed its location.", None, 1.0),
            ("Send Previously Saved BU", ATTACKER, ["State 2", "State 3"], ["State 4", "State 3"],
             "MN is sending BU to CN.", "attack", 0.5),
            ("Refrain from attack", ATTACKER, ["State 2", "State 3"], ["State 10", "State 3"],
             "Attacker decides not to replay the recorded BU.", "no_attack", 0.5),
            ("MN req to update BU", ENVIRONMENT, ["State 3"], ["State 5"],
             "MN is requesting to update binding cache with its BU.", None, 1.0),
            ("Attacker req to update BU", ATTACKER, ["State 4", "State 7"], ["State 6"],
             "Attacker is requesting to update binding cache with its BU.", None, 1.0),
            ("Authenticate BU", DEFENDER, ["State 6"], ["State 8"],
             "CN is authenticating the BU send by the attacker.", "defend", 0.5),
            ("Accept replayed BU", DEFENDER, ["State 6"], ["State 9"],
             "CN does not check the sequence number and accepts the replayed BU.",
             "not_defend", 0.5),
        ],
        ["State 1", "State 2", "State 7"],
    )


_ADDED = {
    "dos-defense": (["State 7", "State 8", "State 9"], ["Refrain from attack", "Accept bogus reg"]),
    "redirection-defense": (["State 7", "State 8"], ["Refrain from attack", "Accept fabricated BU"]),
    "bombing-defense": (["State 8", "State 9"], ["Refrain from attack", "Ignore stream"]),
    "replay-defense": (["State 9", "State 10"], ["Refrain from attack", "Accept replayed BU"]),
}

_META = {
    "dos-attack": ("DoS attack",
                   "Attacker creates a bogus Registration Request naming its own address as the CoA."),
    "dos-defense": ("DoS defense",
                    "Registration traffic is authenticated, so the bogus registration fails."),
    "redirection-attack": ("Redirection attack",
                           "Attacker sends a fake binding update message to the CN."),
    "redirection-defense": ("Redirection defense",
                            "CN authenticates the BU before updating its binding cache."),
    "bombing-attack": ("Bombing attack",
                       "Attacker requests a large stream of data, then redirects it to the victim MN."),
    "bombing-defense": ("Bombing defense",
                        "Victim MN sends TCP RESET to stop the unsolicited stream."),
    "replay-attack": ("Replay attack",
                      "Attacker replays the recorded BU to the CN after the MN moves."),
    "replay-defense": ("Replay defense",
                       "CN checks BU sequence numbers and rejects the replayed BU."),
}

_BUILDERS = {
    "dos-attack": _dos_attack,
    "dos-defense": _dos_defense,
    "redirection-attack": _redirection_attack,
    "redirection-defense": _redirection_defense,
    "bombing-attack": _bombing_attack,
    "bombing-defense": _bombing_defense,
    "replay-attack": _replay_attack,
    "replay-defense": _replay_defense,
}

KEYS = tuple(_BUILDERS)


def _provenance(key: str, net: NetDefinition, rewards: Optional[RewardTable]) -> dict[str, str]:
    added_places, added_trans = _ADDED.get(key, ([], []))
    prov = {"wiring": RECONSTRUCTED}
    for p in net.places:
        prov[f"place:{p.id}"] = RECONSTRUCTED if p.id in added_places else PUBLISHED
    for t in net.transitions:
        prov[f"transition:{t.id}"] = RECONSTRUCTED if t.id in added_trans else PUBLISHED
    if rewards is not None:
        src = PUBLISHED if key == "replay-defense" else RECONSTRUCTED
        for k in rewards.as_dict():
            prov[f"rewards:{k}"] = src
    return prov


def load(key: str) -> CatalogEntry:
    if key not in _BUILDERS:
        raise ConfigurationError(f"unknown model {key!r}; valid keys: {', '.join(KEYS)}")
    net = _BUILDERS[key]()
    rewards = None
    if key == "replay-defense":
        rewards = REPLAY_REWARDS
    elif key in PUBLISHED_OPERATING_POINTS:
        rewards = reconstruct_rewards(*PUBLISHED_OPERATING_POINTS[key])
    if rewards is not None:
        net = stamp_rewards(net, rewards)
    title, summary = _META[key]
    return CatalogEntry(key, title, summary, net, rewards, _provenance(key, net, rewards))


def list_models() -> list[dict[str, str]]:
    return [{"key": k, "title": _META[k][0], "summary": _META[k][1]} for k in KEYS]


def defense_keys() -> list[str]:
    return [k for k in KEYS if k.endswith("-defense")]
