"""Independent reference computations used only by the tests."""

import itertools

import numpy as np


def support_enumeration(att, dfn, tol=1e-12):
    """All Nash equilibria of a 2x2 bimatrix game by support enumeration.

    Returns a list of (x, y): x over attacker rows, y over defender columns.
    """
    att = np.asarray(att, float)
    dfn = np.asarray(dfn, float)
    found = []
    supports = [(0,), (1,), (0, 1)]
    for sa, sd in itertools.product(supports, supports):
        if len(sa) != len(sd):
            continue
        k = len(sa)
        # defender mix y over sd makes attacker indifferent across sa
        a = np.zeros((k + 1, k + 1))
        b = np.zeros(k + 1)
        for r, i in enumerate(sa):
            a[r, :k] = att[i, list(sd)]
            a[r, k] = -1.0
        a[k, :k] = 1.0
        b[k] = 1.0
        c = np.zeros((k + 1, k + 1))
        for r, j in enumerate(sd):
            c[r, :k] = dfn[list(sa), j]
            c[r, k] = -1.0
        c[k, :k] = 1.0
        try:
            ys = np.linalg.solve(a, b)
            xs = np.linalg.solve(c, b)
        except np.linalg.LinAlgError:
            continue
        if np.any(ys[:k] < -tol) or np.any(xs[:k] < -tol):
            continue
        x = np.zeros(2)
        y = np.zeros(2)
        x[list(sa)] = xs[:k]
        y[list(sd)] = ys[:k]
        if np.max(att @ y) > x @ att @ y + 1e-9 or np.max(x @ dfn) > x @ dfn @ y + 1e-9:
            continue
        found.append((x, y))
    return found


def value_iteration(r, q, beta, tol=1e-12, max_iter=1_000_000):
    """Iterate U <- R + beta Q U until the contraction bound certifies ``tol``."""
    u = np.zeros(len(r))
    for _ in range(max_iter):
        nxt = r + beta * q @ u
        step = np.max(np.abs(nxt - u))
        u = nxt
        if step * beta / (1 - beta) < tol:
            return u
    raise RuntimeError("value iteration did not converge")


def cesaro_limit(m, start=0, doublings=60):
    """Limit of e_start (I/2 + M/2)^n by repeated squaring."""
    lazy = 0.5 * (np.eye(len(m)) + np.asarray(m, float))
    for _ in range(doublings):
        lazy = lazy @ lazy
        lazy /= lazy.sum(axis=1, keepdims=True)  # stop round-off compounding
    return lazy[start]


def random_stochastic(rng, n, density=1.0):
    m = rng.random((n, n)) * (rng.random((n, n)) < density)
    m[np.arange(n), rng.integers(0, n, n)] += 0.1
    return m / m.sum(axis=1, keepdims=True)
