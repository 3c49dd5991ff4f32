"""Energy/entropy functionals on finite point measures and the exact maximizer.

For a weighted measure mu = sum_i w_i delta_(f_i, y_i) absolutely continuous
with respect to a point measure P,

    Phi_P(mu) = sum_i (f_i w_i - theta w_i^2),
    Psi_P(mu) = Phi_P(mu) - q D0({y_i}),

where D0 is the l1-length of the shortest path from the origin through all
support locations. ``solve_xi`` maximizes Psi_P over sub-probability measures.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .point_process import PointMeasure

D0_EXACT_CAP = 18
SOLVER_CAP = 40
TIE_TOL = 1e-9
_TABLE_CAP = 15
_SMALL_HK = 7


# ---------------------------------------------------------------------------
# shortest origin-anchored path


class D0Result(NamedTuple):
    cost: float
    order: tuple
    exact: bool = True


def _as_points(Y) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    return Y


def l1_distances(Y: np.ndarray) -> np.ndarray:
    return np.abs(Y[:, None, :] - Y[None, :, :]).sum(axis=2)


def _path_cost(Y: np.ndarray, order) -> float:
    pts = np.vstack([np.zeros((1, Y.shape[1])), Y[list(order)]])
    return float(np.abs(np.diff(pts, axis=0)).sum())


def d0_bruteforce(Y) -> D0Result:
    """D0 by enumerating every visiting order. Reference implementation for small sets."""
    Y = _as_points(Y)
    n = len(Y)
    if n == 0:
        return D0Result(0.0, ())
    dist = l1_distances(Y)
    norms = np.abs(Y).sum(axis=1)
    best, best_order = math.inf, None
    for perm in itertools.permutations(range(n)):
        c = norms[perm[0]] + sum(dist[perm[i], perm[i + 1]] for i in range(n - 1))
        if c < best:
            best, best_order = c, perm
    return D0Result(float(best), tuple(best_order))


def _held_karp_small(Y: np.ndarray) -> D0Result:
    n = len(Y)
    dist = l1_distances(Y).tolist()
    norms = np.abs(Y).sum(axis=1).tolist()
    full = 1 << n
    dp = [[math.inf] * n for _ in range(full)]
    parent = [[-1] * n for _ in range(full)]
    for j in range(n):
        dp[1 << j][j] = norms[j]
    for mask in range(1, full):
        row = dp[mask]
        for j in range(n):
            cj = row[j]
            if cj == math.inf:
                continue
            for k in range(n):
                if mask >> k & 1:
                    continue
                nm = mask | 1 << k
                c = cj + dist[j][k]
                if c < dp[nm][k]:
                    dp[nm][k] = c
                    parent[nm][k] = j
    last = min(range(n), key=lambda j: dp[full - 1][j])
    return D0Result(dp[full - 1][last], _backtrack(parent, full - 1, last))


def _backtrack(parent, mask: int, last: int) -> tuple:
    order = []
    while last != -1:
        order.append(int(last))
        prev = parent[mask][last]
        mask ^= 1 << last
        last = prev
    return tuple(reversed(order))


def _held_karp_table(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """dp[mask, j]: shortest path from the origin visiting exactly ``mask``, ending at j."""
    n = len(Y)
    full = 1 << n
    dist = l1_distances(Y)
    dp = np.full((full, n), np.inf)
    parent = np.full((full, n), -1, dtype=np.int8)
    bits = 1 << np.arange(n)
    dp[bits, np.arange(n)] = np.abs(Y).sum(axis=1)
    masks = np.arange(full)
    pop = np.zeros(full, dtype=np.int64)
    for j in range(n):
        pop += (masks >> j) & 1
    for size in range(2, n + 1):
        layer = masks[pop == size]
        for j in range(n):
            m = layer[(layer >> j) & 1 == 1]
            # dp[prev, i] is inf whenever i is not in prev, so no extra masking
            cand = dp[m ^ (1 << j)] + dist[:, j]
            best = cand.argmin(axis=1)
            dp[m, j] = cand[np.arange(len(m)), best]
            parent[m, j] = best
    return dp, parent


def d0_subset_table(Y) -> np.ndarray:
    """D0 of every subset of ``Y`` at once, indexed by bitmask (bit i = point i)."""
    Y = _as_points(Y)
    if len(Y) == 0:
        return np.zeros(1)
    if len(Y) > D0_EXACT_CAP:
        raise ValueError(f"subset table for {len(Y)} points exceeds cap {D0_EXACT_CAP}")
    dp, _ = _held_karp_table(Y)
    table = dp.min(axis=1)
    table[0] = 0.0
    return table


def _nn_two_opt(Y: np.ndarray) -> D0Result:
    n = len(Y)
    dist = l1_distances(Y)
    norms = np.abs(Y).sum(axis=1)
    left = set(range(n))
    cur = int(np.argmin(norms))
    order = [cur]
    left.remove(cur)
    while left:
        cur = min(left, key=lambda k: dist[order[-1], k])
        order.append(cur)
        left.remove(cur)
    best = _path_cost(Y, order)
    improved = True
    while improved:
        improved = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                cand = order[:i] + order[i : j + 1][::-1] + order[j + 1 :]
                c = _path_cost(Y, cand)
                if c < best - 1e-12:
                    order, best, improved = cand, c, True
    return D0Result(best, tuple(order), exact=False)


def d0(Y, cap: int = D0_EXACT_CAP) -> D0Result:
    """Shortest l1 path from the origin through every point of ``Y``.

    Exact (Held-Karp) up to ``cap`` points. Above the cap a nearest-neighbour
    plus 2-opt tour is returned with ``exact=False``; its cost is only an
    upper bound.
    """
    Y = _as_points(Y)
    n = len(Y)
    if n == 0:
        return D0Result(0.0, ())
    if n > cap:
        return _nn_two_opt(Y)
    if n <= _SMALL_HK:
        return _held_karp_small(Y)
    dp, parent = _held_karp_table(Y)
    full = (1 << n) - 1
    last = int(np.argmin(dp[full]))
    return D0Result(float(dp[full, last]), _backtrack(parent.tolist(), full, last))


def has_short_k_path(Y, k: int, bound: float) -> bool:
    """Whether some k distinct points of ``Y`` have D0 < ``bound``."""
    Y = _as_points(Y)
    near = Y[np.abs(Y).sum(axis=1) < bound]
    if len(near) < k:
        return False
    for combo in itertools.combinations(range(len(near)), k):
        if d0(near[list(combo)]).cost < bound:
            return True
    return False


# ---------------------------------------------------------------------------
# energy optimization for a fixed set of marks


class PhiResult(NamedTuple):
    value: float
    weights: np.ndarray
    k_star: int
    saturated: bool  # True when sum(f) >= 2 theta and the weights sum to one


def k_star(f, theta: float) -> int:
    """Number of active weights for non-increasing marks ``f`` with sum(f) >= 2 theta.

    The first j in 1..k-1 with j f_{j+1} <= f_1 + ... + f_j - 2 theta, else k.
    """
    f = np.asarray(f, dtype=float)
    if f.size == 0:
        raise ValueError("need at least one mark")
    if np.any(np.diff(f) > 0):
        raise ValueError("marks must be sorted in non-increasing order")
    if f.sum() < 2 * theta:
        raise ValueError("k_star needs sum(f) >= 2 theta; use the unsaturated formula")
    cs = np.cumsum(f)
    for j in range(1, f.size):
        if j * f[j] <= cs[j - 1] - 2 * theta:
            return j
    return f.size


def phi_k(f, theta: float) -> PhiResult:
    """max of sum(w f - theta w^2) over w >= 0, sum(w) <= 1, with the maximizing w.

    Weights come back aligned with the input order.
    """
    f = np.asarray(f, dtype=float).reshape(-1)
    if f.size == 0:
        return PhiResult(0.0, np.zeros(0), 0, False)
    if np.any(~(f > 0)):
        raise ValueError("marks must be positive")
    if not theta > 0:
        raise ValueError("theta must be positive")
    total = f.sum()
    if total < 2 * theta:
        return PhiResult(float((f**2).sum() / (4 * theta)), f / (2 * theta), f.size, False)
    order = np.argsort(-f, kind="stable")
    fs = f[order]
    ks = k_star(fs, theta)
    shift = (fs[:ks].sum() - 2 * theta) / ks
    w_sorted = np.zeros_like(fs)
    w_sorted[:ks] = (fs[:ks] - shift) / (2 * theta)
    weights = np.empty_like(f)
    weights[order] = w_sorted
    value = ((fs[:ks] ** 2).sum() - ks * shift**2) / (4 * theta)
    return PhiResult(float(value), weights, ks, True)


# ---------------------------------------------------------------------------
# measures and functionals


@dataclass(frozen=True, eq=False)
class WeightedMeasure:
    """sum_j weights[j] delta at point ``support[j]`` of ``base``."""

    base: PointMeasure
    support: tuple = ()
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if len(support) != len(w):
            raise ValueError("support and weights differ in length")
        if len(set(support)) != len(support):
            raise ValueError("support indices must be distinct")
        if support and (min(support) < 0 or max(support) >= len(self.base)):
            raise IndexError("support index out of range")
        if np.any(~(w > 0)) or np.any(w > 1 + 1e-12):
            raise ValueError("weights must lie in (0, 1]")
        if w.sum() > 1 + 1e-12:
            raise ValueError(f"total mass {w.sum()} exceeds 1")
        w.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_weights(cls, base: PointMeasure, support, weights) -> "WeightedMeasure":
        """Like the constructor, but silently drops zero weights."""
        support = list(support)
        weights = np.asarray(weights, dtype=float)
        keep = weights > 0
        return cls(base, tuple(np.asarray(support, dtype=int)[keep]), weights[keep])

    @classmethod
    def zero(cls, base: PointMeasure) -> "WeightedMeasure":
        return cls(base)

    def __len__(self) -> int:
        return len(self.support)

    @property
    def marks(self) -> np.ndarray:
        return self.base.marks[list(self.support)]

    @property
    def locations(self) -> np.ndarray:
        return self.base.locations[list(self.support)].reshape(len(self.support), self.base.d)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())


def _indices_in(P: PointMeasure, mu: WeightedMeasure) -> list[int] | None:
    if mu.base is P:
        return list(mu.support)
    out = []
    for f, y in zip(mu.marks, mu.locations):
        i = P.index_of(f, y)
        if i is None:
            return None
        out.append(i)
    return out


def energy(P: PointMeasure, mu: WeightedMeasure, theta: float) -> float:
    """Phi_P(mu); -inf when mu charges a point that P does not have."""
    if _indices_in(P, mu) is None:
        return -math.inf
    w = mu.weights
    return float((mu.marks * w).sum() - theta * (w**2).sum())


def psi(P: PointMeasure, mu: WeightedMeasure, q: float, theta: float) -> float:
    """Psi_P(mu) = Phi_P(mu) - q D0(support locations); -inf if mu is not carried by P."""
    phi = energy(P, mu, theta)
    if phi == -math.inf:
        return phi
    locs = np.unique(mu.locations, axis=0) if len(mu) else mu.locations
    res = d0(locs)
    if not res.exact:
        raise ValueError(f"support of {len(locs)} locations exceeds the exact D0 cap")
    return phi - q * res.cost


# ---------------------------------------------------------------------------
# the maximization


@dataclass(frozen=True, eq=False)
class SolverResult:
    xi_value: float
    maximizer: WeightedMeasure
    visiting_order: tuple
    d0_cost: float
    phi_value: float
    q: float
    theta: float
    ties: list = field(default_factory=list)
    nodes: int = 0

    @property
    def support_size(self) -> int:
        return len(self.maximizer)

    def to_json(self) -> str:
        mu = self.maximizer
        return json.dumps(
            {
                "schema": "solver/1",
                "xi": self.xi_value,
                "phi": self.phi_value,
                "d0": self.d0_cost,
                "q": self.q,
                "theta": self.theta,
                "support": [[float(f), *map(float, y)] for f, y in zip(mu.marks, mu.locations)],
                "support_index": list(mu.support),
                "weights": mu.weights.tolist(),
                "order": list(self.visiting_order),
                "ties": [{"support": list(s), "value": v} for s, v in self.ties],
            }
        )

    @staticmethod
    def read_json(text: str) -> dict:
        doc = json.loads(text)
        if doc.get("schema") != "solver/1":
            raise ValueError(f"unsupported schema {doc.get('schema')!r}")
        return doc


def solve_xi(P: PointMeasure, q: float, theta: float, tie_tol: float = TIE_TOL) -> SolverResult:
    """Exact sup of Psi_P over finitely supported sub-probability measures on P.

    Enumerates candidate supports depth-first with branch-and-bound. A subtree
    rooted at support S, extendable by the points R not yet decided, is pruned
    when phi(S u R) - q D0(S) falls below the incumbent: phi only grows when
    points are added and D0 never shrinks. Points with q |y|_1 >= max mark are
    dropped up front because any measure charging them scores below zero.

    Among optima within ``tie_tol`` the lexicographically smallest support
    (as sorted indices into P) is reported; the others are listed in ``ties``.
    """
    marks, locs = P.marks, P.locations
    zero = SolverResult(0.0, WeightedMeasure.zero(P), (), 0.0, 0.0, q, theta)
    if len(P) == 0:
        return zero
    fmax = marks.max()
    cand = [i for i in np.argsort(-marks, kind="stable") if q * P.l1_norms[i] < fmax]
    if not cand:
        return zero
    if len(cand) > SOLVER_CAP:
        raise ValueError(
            f"{len(cand)} candidate points exceed the exact solver cap {SOLVER_CAP}; "
            "restrict the measure to a smaller window first"
        )
    cand = np.asarray(cand)
    cf, cy = marks[cand], locs[cand]
    m = len(cand)

    if m <= _TABLE_CAP:
        table = d0_subset_table(cy)

        def d0_of(mask, members):
            return table[mask]
    else:
        cache: dict[int, float] = {}

        def d0_of(mask, members):
            if mask not in cache:
                if len(members) > D0_EXACT_CAP:
                    raise ValueError("a candidate support exceeds the exact D0 cap; use a smaller window")
                cache[mask] = d0(cy[members]).cost
            return cache[mask]

    best = 0.0
    found: dict[tuple, float] = {(): 0.0}
    nodes = 0
    # node: (members as positions into cand, bitmask, next position)
    stack = [((), 0, 0)]
    while stack:
        members, mask, nxt = stack.pop()
        nodes += 1
        dist = d0_of(mask, list(members)) if members else 0.0
        if members:
            ph = phi_k(cf[list(members)], theta)
            val = ph.value - q * dist
            if val >= best - tie_tol:
                eff = tuple(sorted(int(cand[members[j]]) for j in np.flatnonzero(ph.weights > 0)))
                if val > found.get(eff, -math.inf):
                    found[eff] = val
                best = max(best, val)
        if nxt >= m:
            continue
        rest = list(members) + list(range(nxt, m))
        bound = phi_k(cf[rest], theta).value - q * dist
        if bound < best - tie_tol:
            continue
        for j in range(m - 1, nxt - 1, -1):
            stack.append((members + (j,), mask | (1 << j), j + 1))

    ties = sorted((s, v) for s, v in found.items() if v >= best - tie_tol)
    support = ties[0][0]
    others = [(s, v) for s, v in ties[1:]]
    if not support:
        return SolverResult(0.0, WeightedMeasure.zero(P), (), 0.0, 0.0, q, theta, others, nodes)
    ph = phi_k(marks[list(support)], theta)
    path = d0(locs[list(support)])
    mu = WeightedMeasure.from_weights(P, support, ph.weights)
    order = tuple(support[i] for i in path.order)
    return SolverResult(ph.value - q * path.cost, mu, order, path.cost, ph.value, q, theta, others, nodes)


def xi_d1_screening(P: PointMeasure, q: float, theta: float) -> float:
    """Xi for d = 1 through the interval reduction.

    For every pair of extremes -x <= 0 <= z taken from the support, all points
    in [-x, z] come for free, and the path costs (x + z) + min(x, z).
    """
    if P.d != 1:
        raise ValueError(f"the interval reduction needs d = 1, got d = {P.d}")
    if len(P) == 0:
        return 0.0
    y = P.locations[:, 0]
    lefts = np.unique(np.concatenate([[0.0], -y[y < 0]]))
    rights = np.unique(np.concatenate([[0.0], y[y > 0]]))
    best = 0.0
    for x in lefts:
        for z in rights:
            inside = (y >= -x) & (y <= z)
            if not inside.any():
                continue
            val = phi_k(P.marks[inside], theta).value - q * (x + z) - q * min(x, z)
            best = max(best, val)
    return float(best)


# ---------------------------------------------------------------------------
# configurations with a prescribed maximizer size


class MultisupportRegions(NamedTuple):
    eps: float
    L: float
    mark_low: float
    mark_high: float


def multisupport_regions(k: int, q: float, theta: float) -> MultisupportRegions:
    eps = theta / (4 * q * k**4)
    L = 2 * theta + (q + 1) * eps + 1
    return MultisupportRegions(eps, L, L, L + 2 * theta / k)


def multisupport_region_of(f: float, y, reg: MultisupportRegions, theta: float) -> str | None:
    """Which of G, E1, E2, E3 contains (f, y), or None."""
    r = float(np.abs(np.atleast_1d(y)).sum())
    if r <= reg.eps:
        if reg.mark_low <= f <= reg.mark_high:
            return "G"
        if reg.eps < f < reg.mark_low:
            return "E1"
        if f > reg.mark_high:
            return "E2"
        return None
    if f > max(reg.eps, r - 3 * theta):
        return "E3"
    return None


def _uniform_l1_ball(n: int, d: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    e = rng.exponential(size=(n, d + 1))
    x = e[:, :d] / e.sum(axis=1, keepdims=True)
    signs = rng.choice([-1.0, 1.0], size=(n, d))
    return radius * signs * x


def build_multisupport_config(k: int, q: float, theta: float, rng: np.random.Generator, d: int = 1) -> PointMeasure:
    """k points in G = [L, L + 2 theta/k] x B_eps and none in E1, E2, E3.

    eps = theta / (4 q k^4), L = 2 theta + (q+1) eps + 1; marks uniform on the
    G mark interval, locations uniform in the closed l1 ball of radius eps.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    reg = multisupport_regions(k, q, theta)
    marks = rng.uniform(reg.mark_low, reg.mark_high, size=k)
    locs = _uniform_l1_ball(k, d, reg.eps, rng)
    return PointMeasure(marks, locs, d, "Synthetic")
