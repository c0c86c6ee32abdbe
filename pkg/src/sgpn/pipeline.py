"""End-to-end evaluation: equilibrium, reduction, reachability, steady state."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import catalog
from .chain import build_tpm, outcome_report, stationary_distribution, stationary_residual
from .errors import SGPNError, SolverError
from .game import (
    DEFAULT_DISCOUNT,
    DiscountedGame,
    StrategyPair,
    discounted_utility,
    indifference_residuals,
    optimality_residual,
    solve_ne,
    verify_equilibrium,
)
from .modelfile import ModelDocument, load_model_file
from .net import ATTACK_DEFENDED, NO_ATTACK, NetDefinition
from .reachability import (
    OutcomeDistribution,
    ReachabilityGraph,
    build_reachability,
    reduce_to_attack_defend,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Model:
    ref: str
    doc: ModelDocument

    @property
    def net(self) -> NetDefinition:
        return self.doc.net

    @property
    def reducible(self) -> bool:
        tags = set(self.net.state_tags.values())
        return {NO_ATTACK, ATTACK_DEFENDED} <= tags


def load(ref: Union[str, Path, ModelDocument]) -> Model:
    """Resolve a catalog key, a model file path or an in-memory document."""
    if isinstance(ref, ModelDocument):
        return Model(ref.net.name or "<document>", ref)
    ref = str(ref)
    if ref in catalog.KEYS:
        e = catalog.load(ref)
        return Model(ref, ModelDocument(e.net, e.rewards, None, e.provenance))
    if Path(ref).exists():
        return Model(ref, load_model_file(ref))
    raise FileNotFoundError(
        f"{ref!r} is neither a catalog key ({', '.join(catalog.KEYS)}) nor a model file"
    )


class _stage:
    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, typ, exc, tb):
        if isinstance(exc, SGPNError) and not getattr(exc, "stage", None):
            exc.stage = self.name
            if exc.args:
                exc.args = (f"[{self.name}] {exc.args[0]}",) + exc.args[1:]
        return False


def resolve_strategy(
    model: Model, p_attack: Optional[float] = None, p_defend: Optional[float] = None
) -> tuple[Optional[StrategyPair], Optional[StrategyPair], list[str]]:
    """(strategy to use, equilibrium or None, warnings)."""
    warnings = []
    ne = None
    if model.doc.rewards is not None:
        with _stage("solve_ne"):
            ne = solve_ne(model.doc.rewards)
    elif p_attack is None or p_defend is None:
        if model.reducible:
            raise SolverError(
                "[solve_ne] model has no reward table; supply both --p-attack and --p-defend"
            )
        warnings.append("model has no reward table; equilibrium step skipped")
    if ne is None and (p_attack is None or p_defend is None):
        return None, None, warnings
    strategy = StrategyPair(
        ne.p_attack if p_attack is None else p_attack,
        ne.p_defend if p_defend is None else p_defend,
    )
    return strategy, ne, warnings


def working_net(model: Model, full: bool = False) -> NetDefinition:
    if full or not model.reducible:
        return model.net
    with _stage("reduce_to_attack_defend"):
        return reduce_to_attack_defend(model.net)


def discounted_game(g: ReachabilityGraph, m: np.ndarray, beta: float) -> DiscountedGame:
    """Per-state expected immediate reward of the next firing, for every player."""
    net = g.net
    rewards = np.zeros((len(g.nodes), len(net.players)))
    for e in g.edges:
        rewards[e.src] += e.probability * np.asarray(net.transition(e.transition).rewards)
    labels = tuple(n.label(net) for n in g.nodes)
    return DiscountedGame(labels, rewards, m, beta, tuple(net.players))


@dataclass
class AnalysisReport:
    model: str
    strategy: Optional[StrategyPair]
    equilibrium: Optional[StrategyPair]
    residuals: Optional[tuple[float, float]]
    best_response_gain: Optional[float]
    outcome: OutcomeDistribution
    stationary: list[tuple[str, float]]
    stationary_residual: float
    nodes: int
    edges: int
    reduced: bool
    discount: float
    utilities: dict[str, float]
    provenance: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        s = self.strategy
        return {
            "model": self.model,
            "strategy": None if s is None else {"P_A": s.p_attack, "P_D": s.p_defend},
            "equilibrium": None
            if self.equilibrium is None
            else {"P_A": self.equilibrium.p_attack, "P_D": self.equilibrium.p_defend},
            "indifference_residuals": None if self.residuals is None else list(self.residuals),
            "best_response_gain": self.best_response_gain,
            "outcome": self.outcome.as_dict(),
            "stationary": [{"state": k, "probability": v} for k, v in self.stationary],
            "stationary_residual": self.stationary_residual,
            "reachability": {"nodes": self.nodes, "edges": self.edges, "reduced": self.reduced},
            "discount": self.discount,
            "discounted_utility_at_start": self.utilities,
            "provenance": self.provenance,
            "warnings": self.warnings,
        }

    def sentence(self) -> str:
        o = self.outcome
        if self.strategy is None:
            return f"The probability of a successful attack is {100 * o.attack_success:.6f}%."
        return (
            f"If the defender defends {100 * self.strategy.p_defend:.6f}% of the time, "
            f"the probability of a successful attack is {100 * o.attack_success:.6f}%."
        )

    def to_text(self) -> str:
        lines = [f"model: {self.model}"]
        if self.equilibrium is not None:
            lines.append(
                f"equilibrium: P_A={self.equilibrium.p_attack:.6f} P_D={self.equilibrium.p_defend:.6f}"
            )
        if self.strategy is not None:
            lines.append(f"strategy: P_A={self.strategy.p_attack:.6f} P_D={self.strategy.p_defend:.6f}")
        if self.residuals is not None:
            lines.append(
                f"indifference residuals: attacker={self.residuals[0]:.6f} defender={self.residuals[1]:.6f}"
            )
        o = self.outcome
        lines.append(
            f"outcome: no_attack={o.no_attack:.6f} success={o.attack_success:.6f} "
            f"defended={o.attack_defended:.6f}"
        )
        lines.append(
            f"reachability: {self.nodes} nodes, {self.edges} edges"
            + (" (reduced attack/defend model)" if self.reduced else "")
        )
        lines.append("stationary distribution:")
        lines += [f"  {k}: {v:.6f}" for k, v in self.stationary]
        lines.append(f"discounted utility at start (beta={self.discount:.6f}):")
        lines += [f"  {k}: {v:.6f}" for k, v in self.utilities.items()]
        reconstructed = sorted(k for k, v in self.provenance.items() if v == catalog.RECONSTRUCTED)
        if reconstructed:
            lines.append("reconstructed values: " + ", ".join(reconstructed))
        lines += [f"warning: {w}" for w in self.warnings]
        lines.append(self.sentence())
        return "\n".join(lines)


def analyze(
    ref,
    p_attack: Optional[float] = None,
    p_defend: Optional[float] = None,
    full: bool = False,
    cross_check: bool = True,
) -> AnalysisReport:
    """Equilibrium -> reduction -> reachability -> TPM -> stationary -> outcome report."""
    model = ref if isinstance(ref, Model) else load(ref)
    strategy, ne, warnings = resolve_strategy(model, p_attack, p_defend)
    for w in warnings:
        log.warning(w)
    if not model.reducible:
        warnings.append("model has no attack/defend branch; analysing the full net")
    net = working_net(model, full)
    with _stage("build_reachability"):
        g = build_reachability(net, strategy)
        if g.truncated:
            warnings.append("reachability graph truncated")
    with _stage("build_tpm"):
        m = build_tpm(g)
    with _stage("stationary_distribution"):
        v = stationary_distribution(m, cross_check=cross_check)
    with _stage("outcome_report"):
        outcome = outcome_report(g, v)

    residuals = gain = None
    if model.doc.rewards is not None and strategy is not None:
        residuals = indifference_residuals(model.doc.rewards, strategy)
        gain = verify_equilibrium(model.doc.rewards, strategy).max_gain

    beta = model.doc.discount if model.doc.discount is not None else DEFAULT_DISCOUNT
    game = discounted_game(g, m, beta)
    utilities = {}
    for i, player in enumerate(net.players):
        u = discounted_utility(game, i)
        if optimality_residual(game, u, i) > 1e-9:
            warnings.append(f"utility fixed point residual high for {player}")
        utilities[player] = float(u[0])

    return AnalysisReport(
        model=model.ref,
        strategy=strategy,
        equilibrium=ne,
        residuals=residuals,
        best_response_gain=gain,
        outcome=outcome,
        stationary=[(g.nodes[i].label(net), float(p)) for i, p in enumerate(v)],
        stationary_residual=stationary_residual(m, v),
        nodes=len(g.nodes),
        edges=len(g.edges),
        reduced=net is not model.net,
        discount=beta,
        utilities=utilities,
        provenance=dict(model.doc.provenance),
        warnings=warnings,
    )


SWEEP_COLUMNS = ("param", "value", "no_attack", "success", "defended")


def grid(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("step must be positive")
    if start > stop:
        raise ValueError("from must not exceed to")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


def sweep(
    ref,
    param: str,
    start: float,
    stop: float,
    step: float,
    p_attack: Optional[float] = None,
    p_defend: Optional[float] = None,
) -> list[dict]:
    """Outcome distribution along a grid of P_A or P_D; the other stays at its
    equilibrium value unless given explicitly."""
    if param not in ("P_A", "P_D"):
        raise ValueError("param must be P_A or P_D")
    model = ref if isinstance(ref, Model) else load(ref)
    values = grid(start, stop, step)
    if values[0] < 0 or values[-1] > 1:
        raise ValueError("swept probabilities must lie in [0, 1]")
    if param == "P_A":
        base, _, _ = resolve_strategy(model, 0.0, p_defend)
    else:
        base, _, _ = resolve_strategy(model, p_attack, 0.0)
    net = working_net(model)
    rows = []
    for x in values:
        x = float(x)
        s = StrategyPair(x, base.p_defend) if param == "P_A" else StrategyPair(base.p_attack, x)
        g = build_reachability(net, s)
        o = outcome_report(g, stationary_distribution(build_tpm(g)))
        rows.append(
            {"param": param, "value": x, "no_attack": o.no_attack, "success": o.attack_success,
             "defended": o.attack_defended}
        )
    return rows
