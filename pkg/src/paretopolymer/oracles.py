"""Slow reference solutions used to cross-check the fast solvers."""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize


@lru_cache(maxsize=32)
def simplex_grid(k: int, n: int) -> np.ndarray:
    """All w in (1/n) Z^k with w >= 0 and sum(w) <= 1 (stars and bars with a slack part)."""
    bars = np.asarray(list(itertools.combinations(range(n + k), k)), dtype=np.int64).reshape(-1, k)
    edges = np.column_stack([np.full(len(bars), -1), bars])
    parts = np.diff(edges, axis=1) - 1
    out = parts.astype(float) / n
    out.setflags(write=False)
    return out


def phi_oracle(f, theta: float, grid: int | None = None) -> tuple[float, np.ndarray]:
    """max of sum(f w - theta w^2) on the sub-simplex by grid search, then SLSQP from the best node."""
    f = np.asarray(f, dtype=float)
    k = f.size
    if grid is None:
        grid = {1: 1000, 2: 150, 3: 40, 4: 20, 5: 14, 6: 12}.get(k, 8)
    W = simplex_grid(k, grid)
    vals = W @ f - theta * (W * W).sum(axis=1)
    w0 = W[int(np.argmax(vals))]

    def neg(w):
        return -(f @ w - theta * w @ w)

    def grad(w):
        return -(f - 2 * theta * w)

    res = minimize(
        neg,
        w0,
        jac=grad,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * k,
        constraints=[{"type": "ineq", "fun": lambda w: 1.0 - w.sum(), "jac": lambda w: -np.ones(k)}],
        options={"ftol": 1e-15, "maxiter": 500},
    )
    w = np.clip(res.x, 0.0, None)
    if w.sum() > 1:
        w = w / w.sum()
    best = max(float(vals.max()), -neg(w))
    return best, w
