"""Stochastic game Petri nets for Mobile IP attack/defense analysis."""

from .catalog import CatalogEntry, list_models, load
from .chain import build_tpm, outcome_report, stationary_distribution
from .game import (
    DiscountedGame,
    RewardTable,
    StrategyPair,
    discounted_utility,
    indifference_residuals,
    optimality_residual,
    solve_ne,
    verify_equilibrium,
)
from .net import (
    Marking,
    NetDefinition,
    Place,
    Transition,
    choice_distribution,
    enabled_transitions,
    fire,
    validate_net,
)
from .pipeline import analyze, sweep
from .reachability import (
    OutcomeDistribution,
    ReachabilityGraph,
    build_reachability,
    outcome_distribution,
    reduce_to_attack_defend,
)

__version__ = "0.1.0"
