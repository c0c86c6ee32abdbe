"""Seeded Monte Carlo simulation of the token game.

Runs are simulated in fixed-size blocks over the net's compiled reachability
graph. Block ``b`` draws from its own PCG64 stream spawned from
``SeedSequence(seed, spawn_key=(b,))`` and always draws a full block of
uniforms per step, so the random numbers seen by run ``i`` depend only on
``(seed, i)``. Results are therefore identical whatever the block execution
order, and the first ``n`` runs of a long simulation equal a simulation of
``n`` runs.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .chain import build_tpm, outcome_report, stationary_distribution
from .game import StrategyPair
from .net import (
    OUTCOME_TAGS,
    NetDefinition,
    choice_distribution,
    enabled_transitions,
    fire,
)
from .reachability import ReachabilityGraph, build_reachability

BLOCK = 1 << 16
DEFAULT_MAX_STEPS = 10_000
_NO_OUTCOME = -1


@dataclass(frozen=True)
class SimConfig:
    runs: int
    seed: int = 0
    max_steps: int = DEFAULT_MAX_STEPS
    strategy: Optional[StrategyPair] = None
    timed: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class SimResult:
    """Outcome counts plus empirical rewards.

    ``sum(counts.values()) + truncated == runs``. Frequencies and means are
    over completed (non-truncated) runs.
    """

    runs: int
    counts: dict[str, int]
    truncated: int
    mean_reward: tuple[float, ...]
    mean_time: Optional[float] = None
    players: tuple[str, ...] = field(default=(), repr=False)

    @property
    def completed(self) -> int:
        return self.runs - self.truncated

    @property
    def frequencies(self) -> dict[str, float]:
        n = self.completed
        if n == 0:
            return {k: 0.0 for k in self.counts}
        return {k: c / n for k, c in self.counts.items()}

    def to_dict(self) -> dict:
        out = {
            "runs": self.runs,
            "completed": self.completed,
            "truncated": self.truncated,
            "counts": dict(self.counts),
            "frequencies": self.frequencies,
            "mean_reward": dict(zip(self.players, self.mean_reward)),
        }
        if self.mean_time is not None:
            out["mean_time"] = self.mean_time
        return out


@dataclass
class _Compiled:
    graph: ReachabilityGraph
    outcome: np.ndarray  # node -> outcome tag index or -1
    dead: np.ndarray  # node has no successor
    cum: np.ndarray  # (nodes, maxdeg) cumulative edge probabilities
    deg: np.ndarray
    dst: np.ndarray
    reward: np.ndarray  # (nodes, maxdeg, players)
    total_rate: np.ndarray


def _compile(net: NetDefinition, strategy: Optional[StrategyPair]) -> _Compiled:
    g = build_reachability(net, strategy)
    n = len(g.nodes)
    players = len(net.players)
    outs = [[] for _ in range(n)]
    for e in g.edges:
        outs[e.src].append(e)
    maxdeg = max(1, max(len(o) for o in outs))
    cum = np.ones((n, maxdeg))
    dst = np.zeros((n, maxdeg), dtype=np.int64)
    reward = np.zeros((n, maxdeg, players))
    deg = np.zeros(n, dtype=np.int64)
    total_rate = np.ones(n)
    outcome = np.full(n, _NO_OUTCOME, dtype=np.int64)
    for i in range(n):
        tag = g.node_tag(i)
        if tag is not None:
            outcome[i] = OUTCOME_TAGS.index(tag)
        deg[i] = len(outs[i])
        if outs[i]:
            cum[i, : len(outs[i])] = np.cumsum([e.probability for e in outs[i]])
            cum[i, len(outs[i]) - 1 :] = 1.0
        for k, e in enumerate(outs[i]):
            dst[i, k] = e.dst
            reward[i, k] = net.transition(e.transition).rewards
        rates = [net.transition(t).rate for t in enabled_transitions(net, g.nodes[i])]
        if rates:
            total_rate[i] = math.fsum(rates)
    return _Compiled(g, outcome, deg == 0, cum, deg, dst, reward, total_rate)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _run_block(c: _Compiled, seed: int, block: int, n: int, max_steps: int, timed: bool):
    rng = _block_rng(seed, block)
    state = np.zeros(n, dtype=np.int64)
    acc = np.zeros((n, c.reward.shape[2]))
    clock = np.zeros(n)
    result = np.full(n, _NO_OUTCOME, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    for step in range(max_steps + 1):
        idx = np.flatnonzero(active)
        hit = c.outcome[state[idx]] >= 0
        result[idx[hit]] = c.outcome[state[idx[hit]]]
        stop = hit | c.dead[state[idx]]
        active[idx[stop]] = False
        idx = idx[~stop]
        if idx.size == 0 or step == max_steps:
            break
        u = rng.random(BLOCK)[:n]
        w = rng.random(BLOCK)[:n] if timed else None
        s = state[idx]
        k = np.minimum((u[idx, None] >= c.cum[s]).sum(axis=1), c.deg[s] - 1)
        acc[idx] += c.reward[s, k]
        if timed:
            clock[idx] += -np.log1p(-w[idx]) / c.total_rate[s]
        state[idx] = c.dst[s, k]
    return result, acc, clock


def _simulate_arrays(net: NetDefinition, cfg: SimConfig):
    c = _compile(net, cfg.strategy)
    blocks = [(b, min(BLOCK, cfg.runs - b * BLOCK)) for b in range(math.ceil(cfg.runs / BLOCK))]

    def job(item):
        b, n = item
        return _run_block(c, cfg.seed, b, n, cfg.max_steps, cfg.timed)

    if cfg.workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(job, blocks))
    else:
        parts = [job(item) for item in blocks]
    result = np.concatenate([p[0] for p in parts])
    acc = np.concatenate([p[1] for p in parts])
    clock = np.concatenate([p[2] for p in parts])
    return result, acc, clock


def _summarise(net, result, acc, clock, timed) -> SimResult:
    done = result >= 0
    counts = {tag: int(np.count_nonzero(result == i)) for i, tag in enumerate(OUTCOME_TAGS)}
    n_done = int(done.sum())
    if n_done:
        mean_reward = tuple(float(x) for x in acc[done].sum(axis=0) / n_done)
        mean_time = float(clock[done].mean()) if timed else None
    else:
        mean_reward = (0.0,) * len(net.players)
        mean_time = None
    return SimResult(
        runs=len(result),
        counts=counts,
        truncated=len(result) - n_done,
        mean_reward=mean_reward,
        mean_time=mean_time,
        players=tuple(net.players),
    )


def simulate(net: NetDefinition, cfg: SimConfig) -> SimResult:
    """Run ``cfg.runs`` plays from the initial marking until the first outcome state.

    Runs that exceed ``max_steps`` or reach a dead marking without an outcome
    are counted as truncated.
    """
    result, acc, clock = _simulate_arrays(net, cfg)
    return _summarise(net, result, acc, clock, cfg.timed)


@dataclass(frozen=True)
class ConvergenceRow:
    runs: int
    empirical_success: float
    analytic_success: float
    abs_error: float


CONVERGENCE_COLUMNS = ("runs", "empirical_success", "analytic_success", "abs_error")


def analytic_outcomes(net: NetDefinition, strategy: Optional[StrategyPair]):
    g = build_reachability(net, strategy)
    return outcome_report(g, stationary_distribution(build_tpm(g)))


def convergence_report(
    net: NetDefinition,
    strategy: Optional[StrategyPair],
    checkpoints: Sequence[int],
    seed: int = 0,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> list[ConvergenceRow]:
    """Empirical vs analytic success probability after the first n runs, per checkpoint."""
    checkpoints = sorted(int(n) for n in checkpoints)
    if not checkpoints or checkpoints[0] < 1:
        raise ValueError("checkpoints must be positive run counts")
    analytic = analytic_outcomes(net, strategy).attack_success
    cfg = SimConfig(runs=checkpoints[-1], seed=seed, max_steps=max_steps, strategy=strategy)
    result, _, _ = _simulate_arrays(net, cfg)
    success = OUTCOME_TAGS.index("attack_success")
    rows = []
    for n in checkpoints:
        head = result[:n]
        done = np.count_nonzero(head >= 0)
        emp = np.count_nonzero(head == success) / done if done else float("nan")
        rows.append(ConvergenceRow(n, emp, analytic, abs(emp - analytic)))
    return rows


def token_game_run(
    net: NetDefinition,
    strategy: Optional[StrategyPair],
    rng: np.random.Generator,
    max_steps: int = DEFAULT_MAX_STEPS,
):
    """Play one run directly on markings with :func:`fire`.

    Returns ``(outcome tag or None, final marking, fired transition ids)``.
    Slow; meant for inspection and for cross-checking the compiled simulator.
    """
    m = net.initial_marking
    fired: list[str] = []
    tagged = {
        net.place_index[p.id]: p.tag for p in net.places if p.tag in OUTCOME_TAGS
    }
    for _ in range(max_steps + 1):
        for i, tag in tagged.items():
            if m.counts[i]:
                return tag, m, fired
        dist = choice_distribution(net, m, strategy)
        if not dist:
            return None, m, fired
        if len(fired) == max_steps:
            break
        ids = list(dist)
        tid = ids[int(rng.choice(len(ids), p=list(dist.values())))]
        m = fire(net, m, tid)
        fired.append(tid)
    return None, m, fired
