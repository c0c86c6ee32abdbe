"""Two-player attacker/defender stage game and discounted utilities."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateGame, NoInteriorEquilibrium, PureEquilibriumRegime, SolverError

DEFAULT_DISCOUNT = 0.9
REWARD_KEYS = ("Aa1", "An1", "Dd1", "Dn1", "Aa2", "An2", "Dd2", "Dn2")


@dataclass(frozen=True)
class RewardTable:
    """Payoffs of the 2x2 game. Suffix 1 is the attacker, suffix 2 the defender.

    ====================  ===========  ===========
    attacker \\ defender   defend       not defend
    ====================  ===========  ===========
    attack                Aa           An
    not attack            Dd           Dn
    ====================  ===========  ===========
    """

    Aa1: float
    An1: float
    Dd1: float
    Dn1: float
    Aa2: float
    An2: float
    Dd2: float
    Dn2: float

    def __post_init__(self):
        for k in REWARD_KEYS:
            if not math.isfinite(getattr(self, k)):
                raise ValueError(f"reward {k} must be finite")

    @classmethod
    def from_matrices(cls, attacker, defender) -> "RewardTable":
        """Build from 2x2 payoff matrices, rows attack/not, columns defend/not."""
        a = np.asarray(attacker, dtype=float)
        d = np.asarray(defender, dtype=float)
        return cls(a[0, 0], a[0, 1], a[1, 0], a[1, 1], d[0, 0], d[0, 1], d[1, 0], d[1, 1])

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        att = np.array([[self.Aa1, self.An1], [self.Dd1, self.Dn1]])
        dfn = np.array([[self.Aa2, self.An2], [self.Dd2, self.Dn2]])
        return att, dfn

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class StrategyPair:
    p_attack: float
    p_defend: float

    def __post_init__(self):
        for name in ("p_attack", "p_defend"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} outside [0, 1]")


@dataclass(frozen=True)
class EquilibriumCheck:
    is_equilibrium: bool
    attacker_gain: float
    defender_gain: float

    @property
    def max_gain(self) -> float:
        return max(self.attacker_gain, self.defender_gain)


def _indifference(num: float, den: float) -> float | None:
    if den == 0.0:
        return None
    return num / den


def solve_ne(r: RewardTable) -> StrategyPair:
    """Interior mixed equilibrium from the two indifference conditions.

    The defender's mix makes the attacker indifferent between attacking and
    not; the attacker's mix makes the defender indifferent between defending
    and not. Solutions outside [0, 1] are reported, never clamped.
    """
    den_d = r.Aa1 - r.An1 - r.Dd1 + r.Dn1
    den_a = r.Aa2 - r.An2 - r.Dd2 + r.Dn2
    num_d = r.Dn1 - r.An1
    num_a = r.Dn2 - r.Dd2

    indifferent = []
    if den_d == 0.0 and num_d == 0.0:
        indifferent.append("attacker")
    if den_a == 0.0 and num_a == 0.0:
        indifferent.append("defender")
    if indifferent:
        raise DegenerateGame(
            f"{' and '.join(indifferent)} indifferent everywhere; any strategy is a best response",
            indifferent,
        )
    p_defend = _indifference(num_d, den_d)
    p_attack = _indifference(num_a, den_a)
    if p_defend is None or p_attack is None:
        raise NoInteriorEquilibrium(
            "indifference equation has no solution (zero denominator); "
            "check pure profiles with verify_equilibrium"
        )
    if not (0.0 <= p_attack <= 1.0 and 0.0 <= p_defend <= 1.0):
        raise PureEquilibriumRegime(
            f"indifference solution P_A={p_attack:.6g}, P_D={p_defend:.6g} is outside [0, 1]",
            p_attack,
            p_defend,
        )
    return StrategyPair(p_attack, p_defend)


def indifference_residuals(r: RewardTable, s: StrategyPair) -> tuple[float, float]:
    """(attacker residual, defender residual): attack-minus-not and defend-minus-not payoff."""
    q = s.p_defend
    p = s.p_attack
    att = (q * r.Aa1 + (1 - q) * r.An1) - (q * r.Dd1 + (1 - q) * r.Dn1)
    dfn = (p * r.Aa2 + (1 - p) * r.Dd2) - (p * r.An2 + (1 - p) * r.Dn2)
    return att, dfn


def expected_payoffs(r: RewardTable, s: StrategyPair) -> tuple[float, float]:
    x = np.array([s.p_attack, 1 - s.p_attack])
    y = np.array([s.p_defend, 1 - s.p_defend])
    att, dfn = r.matrices()
    return float(x @ att @ y), float(x @ dfn @ y)


def verify_equilibrium(r: RewardTable, s: StrategyPair, tol: float = 1e-9) -> EquilibriumCheck:
    """Best-response check against each pure deviation, opponent held at ``s``."""
    att, dfn = r.matrices()
    x = np.array([s.p_attack, 1 - s.p_attack])
    y = np.array([s.p_defend, 1 - s.p_defend])
    u_att = float(x @ att @ y)
    u_def = float(x @ dfn @ y)
    att_gain = max(0.0, float(np.max(att @ y)) - u_att)
    def_gain = max(0.0, float(np.max(x @ dfn)) - u_def)
    return EquilibriumCheck(att_gain <= tol and def_gain <= tol, att_gain, def_gain)


@dataclass(frozen=True)
class DiscountedGame:
    """Stationary-profile view of a discounted stochastic game.

    ``rewards`` has shape (n_states, n_players); ``kernel`` is the
    row-stochastic next-state matrix under the fixed profile.
    """

    states: tuple[str, ...]
    rewards: np.ndarray
    kernel: np.ndarray
    beta: float = DEFAULT_DISCOUNT
    players: tuple[str, ...] = ("attacker", "defender", "environment")

    def __post_init__(self):
        n = len(self.states)
        if not (0.0 < self.beta < 1.0):
            raise ValueError(f"discount factor {self.beta} outside (0, 1)")
        q = np.asarray(self.kernel, dtype=float)
        if q.shape != (n, n):
            raise ValueError(f"kernel shape {q.shape} does not match {n} states")
        if np.any(q < 0) or not np.allclose(q.sum(axis=1), 1.0, atol=1e-9, rtol=0):
            raise ValueError("kernel rows must be nonnegative and sum to 1")
        rew = np.asarray(self.rewards, dtype=float)
        if rew.ndim == 1:
            rew = rew[:, None]
        if rew.shape[0] != n:
            raise ValueError("rewards must have one row per state")
        object.__setattr__(self, "kernel", q)
        object.__setattr__(self, "rewards", rew)

    def player_index(self, player: str | int) -> int:
        if isinstance(player, int):
            return player
        return self.players.index(player)


def discounted_utility(g: DiscountedGame, player: str | int = 0) -> np.ndarray:
    """Solve U = R + beta Q U directly, i.e. U = (I - beta Q)^-1 R."""
    r = g.rewards[:, g.player_index(player)]
    a = np.eye(len(g.states)) - g.beta * g.kernel
    try:
        return np.linalg.solve(a, r)
    except np.linalg.LinAlgError as exc:  # cannot happen for beta < 1
        raise SolverError(f"singular utility system: {exc}") from exc


def optimality_residual(g: DiscountedGame, u: Sequence[float], player: str | int = 0) -> float:
    u = np.asarray(u, dtype=float)
    if u.shape != (len(g.states),):
        raise ValueError(f"utility vector has shape {u.shape}, expected ({len(g.states)},)")
    r = g.rewards[:, g.player_index(player)]
    return float(np.max(np.abs(u - r - g.beta * g.kernel @ u), initial=0.0))
