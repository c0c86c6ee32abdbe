"""Reachability graphs and the attack/defend reduction."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .game import StrategyPair
from .net import (
    ACTIONS,
    ATTACK_DEFENDED,
    ATTACK_SUCCESS,
    ENVIRONMENT,
    NO_ATTACK,
    OUTCOME_TAGS,
    PLAIN,
    READY,
    Marking,
    NetDefinition,
    Place,
    Transition,
    choice_distribution,
    fire,
    require_valid,
)

DEFAULT_MAX_NODES = 10_000
DEFAULT_TOKEN_BOUND = 8
CONTESTED = "contested"


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    transition: str
    probability: float


@dataclass
class ReachabilityGraph:
    net: NetDefinition
    nodes: list[Marking]
    edges: list[Edge]
    truncated: bool = False
    index: dict[Marking, int] = field(default_factory=dict, repr=False)

    @property
    def terminal_nodes(self) -> list[int]:
        has_out = {e.src for e in self.edges}
        return [i for i in range(len(self.nodes)) if i not in has_out]

    def out_edges(self, i: int) -> list[Edge]:
        return [e for e in self.edges if e.src == i]

    def nodes_tagged(self, tag: str) -> list[int]:
        places = {self.net.place_index[p] for p in self.net.places_tagged(tag)}
        return [i for i, m in enumerate(self.nodes) if any(m.counts[p] for p in places)]

    def node_tag(self, i: int) -> str | None:
        """The outcome tag of node ``i``, if any of its marked places carries one."""
        marked = self.nodes[i].marked()
        for tag in OUTCOME_TAGS:
            if any(self.net.places[p].tag == tag for p in marked):
                return tag
        return None

    def to_dict(self) -> dict:
        return {
            "truncated": self.truncated,
            "nodes": [
                {"id": i, "marking": m.as_dict(self.net), "tag": self.node_tag(i)}
                for i, m in enumerate(self.nodes)
            ],
            "edges": [
                {"src": e.src, "dst": e.dst, "transition": e.transition, "probability": e.probability}
                for e in self.edges
            ],
            "terminal_nodes": self.terminal_nodes,
        }


def build_reachability(
    net: NetDefinition,
    strategy: StrategyPair | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
    token_bound: int = DEFAULT_TOKEN_BOUND,
) -> ReachabilityGraph:
    """Breadth-first exploration from the initial marking, merging duplicates.

    If ``max_nodes`` or the per-place ``token_bound`` is exceeded the partial
    graph is returned with ``truncated=True``.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be positive")
    require_valid(net)
    m0 = net.initial_marking
    g = ReachabilityGraph(net, [m0], [], index={m0: 0})
    queue = deque([0])
    while queue:
        i = queue.popleft()
        m = g.nodes[i]
        for tid, p in choice_distribution(net, m, strategy).items():
            nxt = fire(net, m, tid)
            if max(nxt.counts, default=0) > token_bound:
                g.truncated = True
                continue
            j = g.index.get(nxt)
            if j is None:
                if len(g.nodes) >= max_nodes:
                    g.truncated = True
                    continue
                j = len(g.nodes)
                g.nodes.append(nxt)
                g.index[nxt] = j
                queue.append(j)
            g.edges.append(Edge(i, j, tid, p))
    return g


def _single_tagged(net: NetDefinition, tag: str) -> Place:
    found = [p for p in net.places if p.tag == tag]
    if not found:
        raise ConfigurationError(f"net {net.name or '<unnamed>'} has no place tagged {tag!r}")
    if len(found) > 1:
        raise ConfigurationError(
            f"net {net.name or '<unnamed>'} has several places tagged {tag!r}: "
            + ", ".join(p.id for p in found)
        )
    return found[0]


def reduce_to_attack_defend(net: NetDefinition) -> NetDefinition:
    """Keep only the tagged states, wired into the canonical attack/defend game.

    ready -(attack | no_attack)-> contested | no_attack,
    contested -(defend | not_defend)-> attack_defended | attack_success,
    and each outcome returns to ready. Rewards and rates of the strategic
    transitions are carried over from the source net's transitions with the
    same action label.
    """
    ready = _single_tagged(net, READY)
    success = _single_tagged(net, ATTACK_SUCCESS)
    defended = _single_tagged(net, ATTACK_DEFENDED)
    idle = _single_tagged(net, NO_ATTACK)

    taken = {ready.id, success.id, defended.id, idle.id}
    contested_id = CONTESTED
    while contested_id in taken:
        contested_id += "_"
    contested = Place(contested_id, "Attack launched; awaiting the defender's move", PLAIN)

    source = {}
    for t in net.transitions:
        if t.action is not None:
            source.setdefault(t.action, t)
    zero = (0.0,) * len(net.players)

    def strategic(action: str, description: str) -> Transition:
        src = source.get(action)
        return Transition(
            id=action,
            owner=ACTIONS[action],
            routing_prob=0.5,
            rate=src.rate if src else 1.0,
            rewards=src.rewards if src else zero,
            description=description,
            action=action,
        )

    transitions = [
        strategic("attack", "Attacker launches the attack"),
        strategic("no_attack", "Attacker refrains from attacking"),
        strategic("defend", "Defender (IDS) is active and stops the attack"),
        strategic("not_defend", "Defender (IDS) is inactive; the attack goes through"),
    ]
    arcs = [
        (ready.id, "attack"),
        ("attack", contested.id),
        (ready.id, "no_attack"),
        ("no_attack", idle.id),
        (contested.id, "defend"),
        ("defend", defended.id),
        (contested.id, "not_defend"),
        ("not_defend", success.id),
    ]
    outcomes = [idle, success, defended]
    for p in outcomes:
        tid = f"return_from_{p.id}"
        transitions.append(Transition(tid, ENVIRONMENT, 1.0, 1.0, zero, "Back to ready"))
        arcs += [(p.id, tid), (tid, ready.id)]

    return NetDefinition(
        places=(ready, contested, idle, success, defended),
        transitions=tuple(transitions),
        arcs=tuple(arcs),
        initial=((ready.id, 1),),
        players=net.players,
        name=f"{net.name}:reduced" if net.name and not net.name.endswith(":reduced") else net.name,
    )


@dataclass(frozen=True)
class OutcomeDistribution:
    no_attack: float
    attack_success: float
    attack_defended: float

    @property
    def success(self) -> float:
        return self.attack_success

    def as_dict(self) -> dict[str, float]:
        return {
            NO_ATTACK: self.no_attack,
            ATTACK_SUCCESS: self.attack_success,
            ATTACK_DEFENDED: self.attack_defended,
        }

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.no_attack, self.attack_success, self.attack_defended)


def outcome_distribution(strategy: StrategyPair | tuple[float, float]) -> OutcomeDistribution:
    """Closed-form outcome probabilities of one round of the stage game."""
    if not isinstance(strategy, StrategyPair):
        strategy = StrategyPair(*strategy)
    pa, pd = strategy.p_attack, strategy.p_defend
    no_attack = 1.0 - pa
    success = pa * (1.0 - pd)
    return OutcomeDistribution(no_attack, success, 1.0 - no_attack - success)

