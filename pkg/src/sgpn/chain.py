"""Transition probability matrices and stationary distributions."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import ConvergenceError, DegenerateModelError, NumericalError
from .net import ATTACK_DEFENDED, ATTACK_SUCCESS, NO_ATTACK
from .reachability import OutcomeDistribution, ReachabilityGraph

DAMPING = 0.99
POWER_TOL = 1e-12
POWER_MAX_ITER = 1_000_000
CROSS_CHECK_TOL = 1e-9


def build_tpm(g: ReachabilityGraph) -> np.ndarray:
    """Node-indexed transition matrix; terminal nodes get a unit self-loop."""
    n = len(g.nodes)
    m = np.zeros((n, n))
    for e in g.edges:
        m[e.src, e.dst] += e.probability
    for i in g.terminal_nodes:
        m[i, i] = 1.0
    return m


def fold_states(m: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Eliminate the states not in ``keep`` (stochastic complement).

    Row i of the result gives where the chain next lands among ``keep`` when
    started at ``keep[i]``, having passed through any number of dropped states.
    """
    m = np.asarray(m, dtype=float)
    keep = list(keep)
    drop = [i for i in range(m.shape[0]) if i not in set(keep)]
    if not drop:
        return m[np.ix_(keep, keep)].copy()
    kk = m[np.ix_(keep, keep)]
    kd = m[np.ix_(keep, drop)]
    dd = m[np.ix_(drop, drop)]
    dk = m[np.ix_(drop, keep)]
    return kk + kd @ np.linalg.solve(np.eye(len(drop)) - dd, dk)


def _check_stochastic(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NumericalError(f"transition matrix must be square, got shape {m.shape}")
    if np.any(m < -1e-15) or not np.allclose(m.sum(axis=1), 1.0, atol=1e-9, rtol=0):
        raise NumericalError("transition matrix is not row-stochastic")
    return m


def _irreducible_stationary(p: np.ndarray) -> np.ndarray:
    n = p.shape[0]
    if n == 1:
        return np.ones(1)
    a = (p - np.eye(n)).T
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    v = np.linalg.solve(a, b)
    return v


def direct_stationary(m: np.ndarray, start: int = 0) -> np.ndarray:
    """Limiting distribution of the chain started at ``start``, by linear solves.

    Each closed communicating class reachable from ``start`` contributes its
    own stationary vector, weighted by the probability of being absorbed there.
    """
    m = _check_stochastic(m)
    n = m.shape[0]
    graph = csr_matrix(m > 0)
    n_comp, labels = connected_components(graph, directed=True, connection="strong")
    reach = set(breadth_first_order(graph, start, directed=True, return_predecessors=False))

    closed = []
    for c in range(n_comp):
        members = np.flatnonzero(labels == c)
        if members[0] not in reach:
            continue
        outside = np.setdiff1d(np.arange(n), members)
        if not np.any(m[np.ix_(members, outside)] > 0):
            closed.append(members)

    recurrent = np.concatenate(closed)
    transient = np.array(sorted(reach - set(recurrent.tolist())), dtype=int)
    v = np.zeros(n)
    if transient.size:
        a = np.eye(transient.size) - m[np.ix_(transient, transient)]
    for members in closed:
        if start in members:
            weight = 1.0
        elif start in transient:
            rhs = m[np.ix_(transient, members)].sum(axis=1)
            h = np.linalg.solve(a, rhs)
            weight = h[np.searchsorted(transient, start)]
        else:
            weight = 0.0
        v[members] += weight * _irreducible_stationary(m[np.ix_(members, members)])
    v = np.clip(v, 0.0, None)
    return v / v.sum()


def power_iteration(
    m: np.ndarray,
    start: int = 0,
    damping: float = DAMPING,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
) -> np.ndarray:
    """Damped power iteration v <- d*vM + (1-d)*v from a unit vector at ``start``."""
    m = _check_stochastic(m)
    v = np.zeros(m.shape[0])
    v[start] = 1.0
    diff = np.inf
    for k in range(max_iter):
        nxt = damping * (v @ m) + (1.0 - damping) * v
        diff = float(np.max(np.abs(nxt - v)))
        v = nxt
        if diff < tol:
            return v / v.sum()
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations (last step {diff:.3e})"
    )


def stationary_residual(m: np.ndarray, v: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(v) @ np.asarray(m) - v)))


def stationary_distribution(m: np.ndarray, start: int = 0, cross_check: bool = True) -> np.ndarray:
    """Direct solve, cross-checked against damped power iteration."""
    v = direct_stationary(m, start)
    if cross_check:
        w = power_iteration(m, start)
        gap = float(np.max(np.abs(v - w)))
        if gap > CROSS_CHECK_TOL:
            raise NumericalError(
                f"direct and power-iteration stationary vectors differ by {gap:.3e}"
            )
    return v


def outcome_report(g: ReachabilityGraph, v: Sequence[float]) -> OutcomeDistribution:
    """Renormalised stationary mass on the outcome-tagged states."""
    mass = {NO_ATTACK: 0.0, ATTACK_SUCCESS: 0.0, ATTACK_DEFENDED: 0.0}
    for i, p in enumerate(v):
        tag = g.node_tag(i)
        if tag is not None:
            mass[tag] += float(p)
    total = sum(mass.values())
    if total <= 0.0:
        raise DegenerateModelError("no stationary mass on any outcome state")
    return OutcomeDistribution(
        mass[NO_ATTACK] / total, mass[ATTACK_SUCCESS] / total, mass[ATTACK_DEFENDED] / total
    )
