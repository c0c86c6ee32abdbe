"""Net data model and token-game semantics.

A net is a bipartite place/transition graph whose transitions are owned by
one of three players. Attacker and defender transitions may carry an
``action`` label (attack, no_attack, defend, not_defend); those are the
choices a :class:`~sgpn.game.StrategyPair` mixes over. Every other choice
is resolved by the transition's static routing probability.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional, Sequence

from .errors import NetValidationError, TransitionNotEnabled

ATTACKER = "attacker"
DEFENDER = "defender"
ENVIRONMENT = "environment"
PLAYERS = (ATTACKER, DEFENDER, ENVIRONMENT)

READY = "ready"
ATTACK_SUCCESS = "attack_success"
ATTACK_DEFENDED = "attack_defended"
NO_ATTACK = "no_attack"
PLAIN = "plain"
TAGS = (READY, ATTACK_SUCCESS, ATTACK_DEFENDED, NO_ATTACK, PLAIN)
OUTCOME_TAGS = (NO_ATTACK, ATTACK_SUCCESS, ATTACK_DEFENDED)

# action label -> owning player
ACTIONS = {
    "attack": ATTACKER,
    "no_attack": ATTACKER,
    "defend": DEFENDER,
    "not_defend": DEFENDER,
}

ROUTING_TOL = 1e-9


@dataclass(frozen=True)
class Place:
    id: str
    description: str = ""
    tag: str = PLAIN


@dataclass(frozen=True)
class Transition:
    id: str
    owner: str
    routing_prob: float = 1.0
    rate: float = 1.0
    rewards: tuple[float, ...] = (0.0, 0.0, 0.0)
    description: str = ""
    action: Optional[str] = None


@dataclass(frozen=True)
class NetDefinition:
    """The SGPN tuple: players, places, owned transitions, arcs, initial marking.

    Construction never validates; call :func:`validate_net` for a report.
    ``initial`` holds ``(place_id, count)`` pairs.
    """

    places: tuple[Place, ...]
    transitions: tuple[Transition, ...]
    arcs: tuple[tuple[str, str], ...]
    initial: tuple[tuple[str, int], ...]
    players: tuple[str, ...] = PLAYERS
    name: str = ""

    @cached_property
    def place_index(self) -> dict[str, int]:
        return {p.id: i for i, p in enumerate(self.places)}

    @cached_property
    def transition_index(self) -> dict[str, int]:
        return {t.id: i for i, t in enumerate(self.transitions)}

    @cached_property
    def _io(self) -> tuple[dict[str, tuple[int, ...]], dict[str, tuple[int, ...]]]:
        pre: dict[str, list[int]] = defaultdict(list)
        post: dict[str, list[int]] = defaultdict(list)
        pidx, tidx = self.place_index, self.transition_index
        for src, dst in self.arcs:
            if src in pidx and dst in tidx:
                pre[dst].append(pidx[src])
            elif src in tidx and dst in pidx:
                post[src].append(pidx[dst])
        inputs = {t.id: tuple(sorted(pre[t.id])) for t in self.transitions}
        outputs = {t.id: tuple(sorted(post[t.id])) for t in self.transitions}
        return inputs, outputs

    def inputs(self, tid: str) -> tuple[int, ...]:
        return self._io[0][tid]

    def outputs(self, tid: str) -> tuple[int, ...]:
        return self._io[1][tid]

    def transition(self, tid: str) -> Transition:
        try:
            return self.transitions[self.transition_index[tid]]
        except KeyError:
            raise NetValidationError(f"unknown transition {tid!r}") from None

    @property
    def state_tags(self) -> dict[str, str]:
        return {p.id: p.tag for p in self.places if p.tag != PLAIN}

    def places_tagged(self, tag: str) -> list[str]:
        return [p.id for p in self.places if p.tag == tag]

    def marking(self, tokens: Mapping[str, int] | Sequence[str]) -> "Marking":
        """Build a marking from ``{place: count}`` or a list of marked places."""
        if not isinstance(tokens, Mapping):
            counts: dict[str, int] = defaultdict(int)
            for pid in tokens:
                counts[pid] += 1
            tokens = counts
        vec = [0] * len(self.places)
        for pid, n in tokens.items():
            if pid not in self.place_index:
                raise NetValidationError(f"marking references unknown place {pid!r}")
            if n < 0:
                raise NetValidationError(f"negative token count {n} at {pid!r}")
            vec[self.place_index[pid]] = int(n)
        return Marking.from_counts(vec, len(self.players))

    @property
    def initial_marking(self) -> "Marking":
        return self.marking(dict(self.initial))

    def replace(self, **changes) -> "NetDefinition":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class Marking:
    """Token counts per place plus each token's accumulated reward vector.

    Equality and hashing use ``counts`` only, so markings that differ only in
    accumulated rewards are the same reachability state.
    """

    counts: tuple[int, ...]
    tokens: tuple[tuple[tuple[float, ...], ...], ...] = field(compare=False, repr=False)

    @classmethod
    def from_counts(cls, counts: Sequence[int], n_players: int) -> "Marking":
        zero = (0.0,) * n_players
        return cls(tuple(counts), tuple((zero,) * n for n in counts))

    def marked(self) -> tuple[int, ...]:
        return tuple(i for i, n in enumerate(self.counts) if n > 0)

    def as_dict(self, net: NetDefinition) -> dict[str, int]:
        return {net.places[i].id: n for i, n in enumerate(self.counts) if n}

    def label(self, net: NetDefinition) -> str:
        parts = [pid if n == 1 else f"{pid}*{n}" for pid, n in self.as_dict(net).items()]
        return "{" + ", ".join(parts) + "}"


def validate_net(net: NetDefinition) -> list[str]:
    """Return every violated structural rule; an empty list means valid."""
    out: list[str] = []
    place_ids = [p.id for p in net.places]
    trans_ids = [t.id for t in net.transitions]
    if not place_ids and not trans_ids:
        out.append("net has neither places nor transitions")
    for kind, ids in (("place", place_ids), ("transition", trans_ids)):
        seen = set()
        for i in ids:
            if i in seen:
                out.append(f"duplicate {kind} id {i!r}")
            seen.add(i)
    for shared in sorted(set(place_ids) & set(trans_ids)):
        out.append(f"id {shared!r} used for both a place and a transition")

    if len(set(net.players)) != len(net.players) or not net.players:
        out.append(f"players must be a nonempty ordered set, got {list(net.players)}")

    pset, tset = set(place_ids), set(trans_ids)
    for src, dst in net.arcs:
        if src in pset and dst in pset:
            out.append(f"arc {src!r}->{dst!r} connects place to place")
        elif src in tset and dst in tset:
            out.append(f"arc {src!r}->{dst!r} connects transition to transition")
        elif (src not in pset | tset) or (dst not in pset | tset):
            out.append(f"arc {src!r}->{dst!r} references an unknown node")
    if len(set(net.arcs)) != len(net.arcs):
        out.append("duplicate arcs")

    for p in net.places:
        if p.tag not in TAGS:
            out.append(f"place {p.id!r} has unknown tag {p.tag!r}")
    succ = net.places_tagged(ATTACK_SUCCESS)
    if len(succ) > 1:
        out.append(f"more than one attack_success place: {succ}")

    for t in net.transitions:
        if t.owner not in net.players:
            out.append(f"transition {t.id!r} owner {t.owner!r} is not a player")
        if not (0.0 <= t.routing_prob <= 1.0) or math.isnan(t.routing_prob):
            out.append(f"transition {t.id!r} routing_prob {t.routing_prob} outside [0, 1]")
        if not (t.rate > 0 and math.isfinite(t.rate)):
            out.append(f"transition {t.id!r} rate {t.rate} is not positive")
        if len(t.rewards) != len(net.players):
            out.append(
                f"transition {t.id!r} has {len(t.rewards)} rewards for {len(net.players)} players"
            )
        elif not all(math.isfinite(r) for r in t.rewards):
            out.append(f"transition {t.id!r} has non-finite rewards")
        if t.action is not None:
            if t.action not in ACTIONS:
                out.append(f"transition {t.id!r} has unknown action {t.action!r}")
            elif ACTIONS[t.action] != t.owner:
                out.append(
                    f"transition {t.id!r} action {t.action!r} must be owned by {ACTIONS[t.action]}"
                )
        if t.id in tset:
            if not net.inputs(t.id):
                out.append(f"transition {t.id!r} has no input arc")
            if not net.outputs(t.id):
                out.append(f"transition {t.id!r} has no output arc")

    # conflict sets: transitions sharing an input place and an owner
    groups: dict[tuple[int, str], list[Transition]] = defaultdict(list)
    for t in net.transitions:
        if t.id in tset:
            for pi in net.inputs(t.id):
                groups[(pi, t.owner)].append(t)
    for (pi, owner), members in sorted(groups.items()):
        mass = math.fsum(t.routing_prob for t in members)
        if abs(mass - 1.0) > ROUTING_TOL:
            ids = ", ".join(t.id for t in members)
            out.append(
                f"routing mass {mass:g} != 1 for {owner} conflict set {{{ids}}} "
                f"at place {net.places[pi].id!r}"
            )

    for pid, n in net.initial:
        if pid not in pset:
            out.append(f"initial marking references unknown place {pid!r}")
        elif n < 0:
            out.append(f"initial marking has negative count at {pid!r}")
    return out


def require_valid(net: NetDefinition) -> None:
    problems = validate_net(net)
    if problems:
        raise NetValidationError(
            f"net {net.name or '<unnamed>'} is invalid: " + "; ".join(problems), problems
        )


def _check_marking(net: NetDefinition, m: Marking) -> None:
    if len(m.counts) != len(net.places):
        raise NetValidationError(
            f"marking has {len(m.counts)} entries but net has {len(net.places)} places"
        )


def enabled_transitions(net: NetDefinition, m: Marking) -> tuple[str, ...]:
    """Transitions whose input places all hold a token, in net order."""
    _check_marking(net, m)
    return tuple(
        t.id for t in net.transitions if all(m.counts[i] > 0 for i in net.inputs(t.id))
    )


def fire(net: NetDefinition, m: Marking, tid: str) -> Marking:
    """Fire ``tid`` and return the successor marking.

    One token leaves each input place and one enters each output place. Each
    produced token carries the summed reward vectors of the consumed tokens
    plus ``R(t)``; for a single token moving along a path this is exactly the
    running sum of the rewards of the fired transitions.
    """
    t = net.transition(tid)
    if tid not in enabled_transitions(net, m):
        raise TransitionNotEnabled(f"transition {tid!r} is not enabled in {m.label(net)}")
    counts = list(m.counts)
    tokens = [list(ts) for ts in m.tokens]
    carried = [0.0] * len(net.players)
    for i in net.inputs(tid):
        h = tokens[i].pop(0)
        counts[i] -= 1
        carried = [a + b for a, b in zip(carried, h)]
    produced = tuple(c + r for c, r in zip(carried, t.rewards))
    for i in net.outputs(tid):
        tokens[i].append(produced)
        tokens[i].sort()
        counts[i] += 1
    return Marking(tuple(counts), tuple(tuple(ts) for ts in tokens))


def transition_weight(t: Transition, strategy=None, overrides: Mapping[str, float] | None = None) -> float:
    if overrides and t.id in overrides:
        return float(overrides[t.id])
    if strategy is not None and t.action is not None:
        if t.action == "attack":
            return strategy.p_attack
        if t.action == "no_attack":
            return 1.0 - strategy.p_attack
        if t.action == "defend":
            return strategy.p_defend
        return 1.0 - strategy.p_defend
    return t.routing_prob


def choice_distribution(
    net: NetDefinition,
    m: Marking,
    strategy=None,
    overrides: Mapping[str, float] | None = None,
) -> dict[str, float]:
    """Probability of each enabled transition firing next.

    Strategic transitions are weighted by the strategy pair, others by their
    routing probability (``overrides`` wins over both). Weights are normalised
    over everything enabled, which preserves the ratio inside each conflict
    set. Zero-weight transitions are dropped; an empty dict signals a dead
    marking.
    """
    enabled = enabled_transitions(net, m)
    weights = {}
    for tid in enabled:
        w = transition_weight(net.transition(tid), strategy, overrides)
        if w < 0 or math.isnan(w):
            raise NetValidationError(f"negative choice weight {w} for {tid!r}")
        if w > 0:
            weights[tid] = w
    if not weights:
        return {}
    if len(weights) == 1:
        return {next(iter(weights)): 1.0}
    total = math.fsum(weights.values())
    return {tid: w / total for tid, w in weights.items()}
