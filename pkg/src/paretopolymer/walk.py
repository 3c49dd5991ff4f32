"""Continuous-time simple random walk, local times and partition-function estimators.

The walk has generator the discrete Laplacian: Exp(2d) holding times and a
uniformly chosen neighbour at each jump. The Hamiltonian of a path is

    H = sum_z xi(z) l(z) - beta sum_z l(z)^2,

with l the local times on [0, t]. Monte Carlo estimates of log E[e^H] are
accumulated in log space.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse, stats
from scipy.integrate import solve_ivp

from .model import ModelParams, PotentialField, derive_scales
from .point_process import PointMeasure, rescale_field
from .variational import SolverResult, WeightedMeasure


@dataclass(frozen=True, eq=False)
class WalkTrajectory:
    """Jump times in (0, t] and the visited sites; ``sites[0]`` is the origin."""

    jump_times: np.ndarray
    sites: np.ndarray
    t: float

    def __post_init__(self):
        jt = np.asarray(self.jump_times, dtype=float)
        st = np.asarray(self.sites, dtype=np.int64)
        if st.ndim != 2 or len(st) != len(jt) + 1:
            raise ValueError("need one more site than jump times")
        if np.any(st[0] != 0):
            raise ValueError("walk must start at the origin")
        if len(jt) and (np.any(np.diff(jt) <= 0) or jt[0] <= 0 or jt[-1] > self.t):
            raise ValueError("jump times must be strictly increasing in (0, t]")
        if len(jt) and np.any(np.abs(np.diff(st, axis=0)).sum(axis=1) != 1):
            raise ValueError("consecutive sites must be lattice neighbours")
        object.__setattr__(self, "jump_times", jt)
        object.__setattr__(self, "sites", st)

    @property
    def d(self) -> int:
        return self.sites.shape[1]

    @property
    def n_jumps(self) -> int:
        return len(self.jump_times)

    def durations(self) -> np.ndarray:
        """Time spent in each visit, aligned with ``sites``."""
        return np.diff(np.concatenate([[0.0], self.jump_times, [self.t]]))

    def max_distance(self) -> int:
        return int(np.abs(self.sites).max()) if len(self.sites) else 0


@dataclass(frozen=True, eq=False)
class LocalTimeField:
    sites: np.ndarray
    times: np.ndarray
    t: float

    def as_dict(self) -> dict:
        return {tuple(int(c) for c in s): float(v) for s, v in zip(self.sites, self.times)}

    def total(self) -> float:
        return math.fsum(self.times)


def _unit_steps(d: int) -> np.ndarray:
    eye = np.eye(d, dtype=np.int64)
    return np.concatenate([eye, -eye])


def _jump_times(t: float, rate: float, rng: np.random.Generator) -> np.ndarray:
    chunk = int(rate * t + 6 * math.sqrt(rate * t) + 16)
    times = np.cumsum(rng.exponential(1.0 / rate, size=chunk))
    while times[-1] <= t:
        more = times[-1] + np.cumsum(rng.exponential(1.0 / rate, size=chunk))
        times = np.concatenate([times, more])
    return times[: np.searchsorted(times, t, side="right")]


def simulate_walk(t: float, d: int, rng: np.random.Generator) -> WalkTrajectory:
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    jt = _jump_times(t, 2.0 * d, rng)
    steps = _unit_steps(d)[rng.integers(0, 2 * d, size=len(jt))]
    sites = np.vstack([np.zeros((1, d), dtype=np.int64), np.cumsum(steps, axis=0)])
    return WalkTrajectory(jt, sites, t)


def local_times(traj: WalkTrajectory) -> LocalTimeField:
    uniq, inv = np.unique(traj.sites, axis=0, return_inverse=True)
    times = np.bincount(inv.reshape(-1), weights=traj.durations(), minlength=len(uniq))
    return LocalTimeField(uniq, times, traj.t)


def hamiltonian(lt: LocalTimeField, field: PotentialField, beta: float) -> float:
    """<xi, l> - beta |l|_2^2. Raises IndexError if an occupied site is outside the field's box."""
    xi = field.value_at(lt.sites)
    return float(np.dot(xi, lt.times) - beta * np.dot(lt.times, lt.times))


def empirical_measure(
    lt: LocalTimeField, params: ModelParams, field: PotentialField, base: PointMeasure | None = None
) -> WeightedMeasure:
    """Weights l(z)/t on the rescaled points of ``field``.

    ``base`` may pass a precomputed ``rescale_field(field, params)``.
    """
    if base is None:
        base = rescale_field(field, params)
    idx = field.flat_index(lt.sites)
    return WeightedMeasure.from_weights(base, idx, lt.times / lt.t)


# ---------------------------------------------------------------------------
# log-mean-exp accumulation


class LogMeanExp:
    """Streaming mean of exp(values) kept relative to a running maximum.

    Values of -inf (killed paths, paths outside an event) count as zeros.
    Accumulators from separate workers combine with ``merge``.
    """

    def __init__(self):
        self.n = 0
        self.shift = -math.inf
        self.s1 = 0.0
        self.s2 = 0.0

    def _rebase(self, new_shift: float):
        if new_shift > self.shift:
            if self.shift > -math.inf:
                f = math.exp(self.shift - new_shift)
                self.s1 *= f
                self.s2 *= f * f
            self.shift = new_shift

    def update(self, values) -> "LogMeanExp":
        v = np.atleast_1d(np.asarray(values, dtype=float))
        self.n += v.size
        finite = v[np.isfinite(v)]
        if finite.size:
            self._rebase(float(finite.max()))
            e = np.exp(finite - self.shift)
            self.s1 += float(e.sum())
            self.s2 += float((e * e).sum())
        return self

    def merge(self, other: "LogMeanExp") -> "LogMeanExp":
        out = LogMeanExp()
        out.n = self.n + other.n
        for acc in (self, other):
            if acc.shift > -math.inf:
                out._rebase(acc.shift)
        for acc in (self, other):
            if acc.shift > -math.inf:
                f = math.exp(acc.shift - out.shift)
                out.s1 += acc.s1 * f
                out.s2 += acc.s2 * f * f
        return out

    def result(self) -> tuple[float, float]:
        """log of the sample mean of exp(values) and its delta-method standard error."""
        if self.n == 0 or self.s1 == 0.0:
            return -math.inf, math.nan
        mean = self.s1 / self.n
        if self.n < 2:
            return self.shift + math.log(mean), math.nan
        var = max(self.s2 - self.s1 * self.s1 / self.n, 0.0) / (self.n - 1)
        return self.shift + math.log(mean), math.sqrt(var / self.n) / mean


def log_mean_exp(values) -> tuple[float, float]:
    return LogMeanExp().update(values).result()


@dataclass
class MCEstimate:
    log_estimate: float
    stderr: float
    replicas: int
    mode: str
    params: ModelParams
    seed: int | None = None
    gamma_t: float | None = None
    info: dict = field(default_factory=dict)

    def __iter__(self):
        # unpacks as (log_estimate, stderr)
        return iter((self.log_estimate, self.stderr))

    @property
    def normalized(self) -> float | None:
        return None if self.gamma_t is None else self.log_estimate / self.gamma_t

    @property
    def normalized_stderr(self) -> float | None:
        return None if self.gamma_t is None else self.stderr / self.gamma_t

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": "mc/1",
                "mode": self.mode,
                "params": self.params.to_dict(),
                "replicas": self.replicas,
                "log_estimate": self.log_estimate,
                "stderr": self.stderr,
                "normalization": "per gamma_t",
                "gamma_t": self.gamma_t,
                "seed": self.seed,
                "info": self.info,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "MCEstimate":
        doc = json.loads(text)
        if doc.get("schema") != "mc/1":
            raise ValueError(f"unsupported schema {doc.get('schema')!r}")
        return cls(
            doc["log_estimate"],
            doc["stderr"],
            doc["replicas"],
            doc["mode"],
            ModelParams(**doc["params"]),
            doc["seed"],
            doc["gamma_t"],
            doc.get("info", {}),
        )


def _gamma_or_none(params: ModelParams) -> float | None:
    return derive_scales(params).gamma_t if params.t > 1 else None


def _resolve_beta(params: ModelParams, beta: float | None) -> float:
    if beta is not None:
        return float(beta)
    if params.t <= 1:
        raise ValueError("beta_t is undefined for t <= 1; pass beta explicitly")
    return derive_scales(params).beta_t


def free_box_radius(t: float, d: int, tol: float = 1e-6) -> int:
    """Smallest box radius that a walk leaves before time t with probability below ``tol``.

    Leaving radius n takes at least n + 1 jumps, and the jump count is Poisson(2dt).
    """
    n = int(stats.poisson.isf(tol, 2 * d * t))
    while stats.poisson.sf(n, 2 * d * t) > tol:
        n += 1
    return n


def path_hamiltonian(traj: WalkTrajectory, field: PotentialField, beta: float) -> float:
    """H of a path, or -inf when it leaves the field's box (killed)."""
    if traj.max_distance() > field.box_radius:
        return -math.inf
    if beta == 0.0:
        return float(np.dot(field.value_at(traj.sites), traj.durations()))
    return hamiltonian(local_times(traj), field, beta)


def estimate_logZ_naive(
    params: ModelParams,
    field: PotentialField,
    replicas: int,
    rng: np.random.Generator,
    *,
    beta: float | None = None,
    mode: str = "free",
    seed: int | None = None,
) -> MCEstimate:
    """log E[e^H] from independent unconditioned paths.

    Paths that leave the field's box contribute zero (Dirichlet killing). In
    ``"killed"`` mode that is the target quantity, matching ``pam_oracle``;
    in ``"free"`` mode the box should be at least ``free_box_radius`` so the
    killing is negligible, and escapes are reported in ``info``.
    """
    if replicas < 2:
        raise ValueError("need at least 2 replicas")
    if mode not in ("free", "killed"):
        raise ValueError(f"unknown mode {mode!r}")
    b = _resolve_beta(params, beta)
    if mode == "free" and field.box_radius < free_box_radius(params.t, params.d):
        warnings.warn(
            f"box radius {field.box_radius} is below the free-walk radius "
            f"{free_box_radius(params.t, params.d)}; escapes are killed",
            stacklevel=2,
        )
    acc = LogMeanExp()
    escapes = 0
    for _ in range(replicas):
        h = path_hamiltonian(simulate_walk(params.t, params.d, rng), field, b)
        escapes += h == -math.inf
        acc.update(h)
    est, se = acc.result()
    return MCEstimate(est, se, replicas, mode, params, seed, _gamma_or_none(params), {"beta": b, "escapes": int(escapes)})


# ---------------------------------------------------------------------------
# guided lower-bound strategy


@dataclass(frozen=True, eq=False)
class StrategySpec:
    """Visit ``targets`` in order, holding at target i for a time in [(1-delta) t w_i, t w_i].

    Each travel leg gets at most s t / k time. Weights satisfy sum(w) + s = 1.
    """

    targets: np.ndarray
    weights: np.ndarray
    delta: float
    s: float

    def __post_init__(self):
        y = np.atleast_2d(np.asarray(self.targets, dtype=np.int64))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(y) != len(w) or len(w) == 0:
            raise ValueError("need as many weights as targets, at least one")
        if not (0 < self.delta < 1 and 0 < self.s < 1):
            raise ValueError("delta and s must lie in (0, 1)")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() + self.s - 1) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()}, need 1 - s = {1 - self.s}")
        if len(y) > 1 and np.any(np.all(y[1:] == y[:-1], axis=1)):
            raise ValueError("consecutive targets must differ")
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "weights", w)

    @property
    def k(self) -> int:
        return len(self.weights)

    def leg_lengths(self) -> np.ndarray:
        pts = np.vstack([np.zeros((1, self.targets.shape[1]), dtype=np.int64), self.targets])
        return np.abs(np.diff(pts, axis=0)).sum(axis=1)


def strategy_from_solution(result: SolverResult, params: ModelParams, s: float, delta: float) -> StrategySpec:
    """Lattice strategy that follows a maximizer of the rescaled field.

    Targets are the support sites in visiting order; each weight is lowered
    by s/k so that the weights and the travel budget add up to one. Sites
    whose weight would drop to zero are skipped and the rest rescaled.
    """
    if result.support_size == 0:
        raise ValueError("the maximizer is the zero measure; there is nothing to visit")
    r_t = derive_scales(params).r_t
    mu = result.maximizer
    pos = {idx: j for j, idx in enumerate(mu.support)}
    order = [pos[i] for i in result.visiting_order]
    k = len(order)
    targets = np.rint(mu.locations[order] * r_t).astype(np.int64)
    weights = mu.weights[order] - s / k
    # targets whose weight does not survive the s/k cut are skipped
    keep = weights > 0
    if not keep.any():
        raise ValueError("s is too large for every weight of the maximizer")
    targets, weights = targets[keep], weights[keep]
    weights = weights * ((1 - s) / weights.sum())
    return StrategySpec(targets, weights, delta, s)


def _event_times(traj: WalkTrajectory, spec: StrategySpec):
    """Entry/exit times of the targets in order, plus the visit indices; None if a target is missed."""
    enter = np.concatenate([[0.0], traj.jump_times])
    leave = np.concatenate([traj.jump_times, [math.inf]])
    taus, sigmas, idx = [], [], []
    j_prev = 0
    for y in spec.targets:
        hits = np.flatnonzero(np.all(traj.sites[j_prev:] == y, axis=1))
        if hits.size == 0:
            return None
        j = j_prev + int(hits[0])
        tau = enter[j] if j > j_prev or not taus else taus[-1]
        taus.append(tau)
        sigmas.append(leave[j])
        idx.append(j)
        j_prev = j
    return np.array(taus), np.array(sigmas), np.array(idx)


def in_event_A(traj: WalkTrajectory, spec: StrategySpec, direct: bool = False) -> bool:
    """Whether the path follows the strategy: legs within s t/k, holds within [(1-delta) t w_i, t w_i].

    With ``direct=True`` every leg must also be a shortest lattice path (the
    sub-event that ``estimate_logZ_guided`` samples).
    """
    times = _event_times(traj, spec)
    if times is None:
        return False
    taus, sigmas, idx = times
    t, k = traj.t, spec.k
    starts = np.concatenate([[0.0], sigmas[:-1]])
    if np.any(taus - starts > spec.s * t / k):
        return False
    hold = sigmas - taus
    if np.any(hold < (1 - spec.delta) * t * spec.weights) or np.any(hold > t * spec.weights):
        return False
    if direct:
        jumps = np.diff(np.concatenate([[0], idx]))
        if np.any(jumps != spec.leg_lengths()):
            return False
    return True


def _log_poisson_pmf(n, lam):
    return stats.poisson.logpmf(n, lam)


def log_prob_A_lower_bound(spec: StrategySpec, t: float) -> float:
    """Log of the product lower bound on P(A): per leg, Poi_{2dst/k}(m) (2d)^{-m} times the hold probability."""
    d = spec.targets.shape[1]
    lam = 2 * d * spec.s * t / spec.k
    m = spec.leg_lengths()
    w = spec.weights
    with np.errstate(divide="ignore"):
        hold = -2 * d * t * w * (1 - spec.delta) + np.log(-np.expm1(-2 * d * t * spec.delta * w))
    return float(np.sum(_log_poisson_pmf(m, lam) + hold - m * math.log(2 * d)))


def _log_multinomial(z: np.ndarray) -> float:
    z = np.abs(z)
    return math.lgamma(int(z.sum()) + 1) - sum(math.lgamma(int(c) + 1) for c in z)


def log_prob_direct_event(spec: StrategySpec, t: float) -> float:
    """Exact log-probability of the direct sub-event sampled by the guided estimator."""
    d = spec.targets.shape[1]
    rate = 2.0 * d
    rho = spec.s * t / spec.k
    pts = np.vstack([np.zeros((1, d), dtype=np.int64), spec.targets])
    total = 0.0
    for i in range(spec.k):
        z = pts[i + 1] - pts[i]
        m = int(np.abs(z).sum())
        timed = m if i == 0 else m - 1
        total += _log_multinomial(z) - m * math.log(rate)
        if timed > 0:
            total += float(stats.poisson.logsf(timed - 1, rate * rho))
        a, b = (1 - spec.delta) * t * spec.weights[i], t * spec.weights[i]
        if b <= 0:
            return -math.inf
        total += -rate * a + math.log(-math.expm1(-rate * (b - a)))
    return total


def _truncated_gamma(n: int, rate: float, rho: float, rng: np.random.Generator) -> float:
    """Sum of n Exp(rate) variables conditioned to be <= rho."""
    p = stats.gamma.cdf(rho, n, scale=1.0 / rate)
    if p > 1e-250:
        x = stats.gamma.ppf(rng.random() * p, n, scale=1.0 / rate)
        return float(min(x, rho))
    # deep tail: propose rho U^{1/n} (density n s^{n-1}/rho^n), accept with e^{-rate s}
    while True:
        x = rho * rng.random() ** (1.0 / n)
        if rng.random() < math.exp(-rate * x):
            return x


def _truncated_exp(rate: float, a: float, b: float, rng: np.random.Generator) -> float:
    u = rng.random()
    return a - math.log1p(u * math.expm1(-rate * (b - a))) / rate


def sample_direct_strategy(spec: StrategySpec, t: float, rng: np.random.Generator) -> WalkTrajectory:
    """A path drawn from the walk law conditioned on the direct sub-event of the strategy."""
    d = spec.targets.shape[1]
    rate = 2.0 * d
    rho = spec.s * t / spec.k
    eye = np.eye(d, dtype=np.int64)
    jumps: list[float] = []
    sites: list[np.ndarray] = [np.zeros(d, dtype=np.int64)]
    now = 0.0
    pos = np.zeros(d, dtype=np.int64)
    for i, y in enumerate(spec.targets):
        z = y - pos
        steps = np.concatenate([np.repeat(np.sign(z[j]) * eye[j][None, :], abs(z[j]), axis=0) for j in range(d)])
        steps = steps[rng.permutation(len(steps))]
        m = len(steps)
        if m:
            timed = m if i == 0 else m - 1
            total = _truncated_gamma(timed, rate, rho, rng) if timed else 0.0
            cuts = np.sort(rng.random(timed - 1)) * total if timed > 1 else np.zeros(0)
            offsets = np.concatenate([cuts, [total]]) if timed else np.zeros(0)
            # for legs after the first, the exit jump from the previous target happens at `now`
            leg_times = now + (offsets if i == 0 else np.concatenate([[0.0], offsets]))
            for tj, st in zip(leg_times, steps):
                pos = pos + st
                jumps.append(float(tj))
                sites.append(pos.copy())
            now = float(leg_times[-1])
        a, b = (1 - spec.delta) * t * spec.weights[i], t * spec.weights[i]
        now += _truncated_exp(rate, a, b, rng)
        if i < spec.k - 1:
            continue
        # after the last hold the walk jumps to a uniform neighbour and runs freely
        if now < t:
            step = _unit_steps(d)[rng.integers(0, 2 * d)]
            pos = pos + step
            jumps.append(now)
            sites.append(pos.copy())
            tail = simulate_walk(t - now, d, rng)
            for tj, st in zip(tail.jump_times, tail.sites[1:]):
                jumps.append(now + float(tj))
                sites.append(pos + st)
    jt = np.asarray(jumps, dtype=float)
    # a hold can end exactly at a leg's first jump only by floating coincidence; keep times strictly increasing
    keep = np.concatenate([[True], np.diff(jt) > 0]) if len(jt) else np.zeros(0, dtype=bool)
    if not np.all(keep):
        raise RuntimeError("degenerate jump times in guided sample")
    jt = jt[jt <= t]
    return WalkTrajectory(jt, np.asarray(sites[: len(jt) + 1]), t)


def hamiltonian_lower_bound(spec: StrategySpec, params: ModelParams, field: PotentialField) -> float:
    """gamma_t [(1-delta) sum f_i w_i - theta sum w_i^2 - (k+5) theta (delta+s)], f_i = xi(y_i)/r_t^{d/alpha}."""
    s = derive_scales(params)
    f = field.value_at(spec.targets) / s.r_t ** (params.d / params.alpha)
    w = spec.weights
    inner = (1 - spec.delta) * np.dot(f, w) - params.theta * np.dot(w, w) - (spec.k + 5) * params.theta * (spec.delta + spec.s)
    return float(s.gamma_t * inner)


def estimate_logZ_guided(
    params: ModelParams,
    field: PotentialField,
    spec: StrategySpec,
    replicas: int,
    rng: np.random.Generator,
    *,
    beta: float | None = None,
    seed: int | None = None,
) -> MCEstimate:
    """Unbiased estimate of log E[e^H; direct strategy event], a lower bound for log Z.

    Paths are drawn conditionally on the event, so the likelihood ratio is the
    constant P(event), added in log space. Every accepted path is checked
    against ``hamiltonian_lower_bound``; failures are counted in ``info``.
    """
    if replicas < 2:
        raise ValueError("need at least 2 replicas")
    if np.any(spec.weights <= 0):
        warnings.warn("a zero weight makes the strategy event null", stacklevel=2)
        return MCEstimate(-math.inf, math.nan, replicas, "guided", params, seed, _gamma_or_none(params))
    if not np.all(field.contains(spec.targets)):
        raise ValueError("strategy targets must lie inside the field's box")
    b = _resolve_beta(params, beta)
    log_p = log_prob_direct_event(spec, params.t)
    budget = spec.s * params.t / spec.k
    timed = spec.leg_lengths() - np.r_[0, np.ones(spec.k - 1, dtype=np.int64)]
    log_travel = float(np.sum(stats.poisson.logsf(timed[timed > 0] - 1, 2.0 * params.d * budget)))
    if log_travel < math.log(1e-6):
        warnings.warn(
            f"travel budget s t/k = {budget:.3g} is short for the direct legs (log P(travel) = {log_travel:.1f}); "
            "the event is rare but the estimate stays valid",
            stacklevel=2,
        )
    lower = hamiltonian_lower_bound(spec, params, field) if params.t > 1 and beta is None else None
    acc = LogMeanExp()
    violations = escapes = 0
    for _ in range(replicas):
        traj = sample_direct_strategy(spec, params.t, rng)
        h = path_hamiltonian(traj, field, b)
        if h == -math.inf:
            escapes += 1
        elif lower is not None and h < lower * (1 + 1e-12) - 1e-9:
            violations += 1
        acc.update(h)
    est, se = acc.result()
    info = {"beta": b, "log_prob_event": float(log_p), "escapes": escapes, "bound_violations": violations}
    return MCEstimate(est + log_p, se, replicas, "guided", params, seed, _gamma_or_none(params), info)


# ---------------------------------------------------------------------------
# beta = 0 oracle and jump tail


def box_generator(field: PotentialField) -> sparse.csr_matrix:
    """Laplacian with zero boundary values outside the box, plus diag(xi)."""
    sites = field.sites()
    n = len(sites)
    rows, cols = [], []
    for step in _unit_steps(field.d):
        nb = sites + step
        ok = field.contains(nb)
        rows.append(np.flatnonzero(ok))
        cols.append(field.flat_index(nb[ok]))
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    lap = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    diag = field.values.reshape(-1) - 2.0 * field.d
    return (lap + sparse.diags(diag)).tocsr()


def pam_oracle(field: PotentialField, t: float) -> float:
    """Total mass at time t of du/dt = Delta u + xi u on the box, u(0) = delta_0, u = 0 outside."""
    A = box_generator(field)
    u0 = np.zeros(A.shape[0])
    u0[field.flat_index([[0] * field.d])[0]] = 1.0
    xi_max = float(field.values.max())
    sol = solve_ivp(
        lambda _, u: A @ u,
        (0.0, t),
        u0,
        method="DOP853",
        rtol=1e-8,
        atol=1e-12,
        max_step=0.1 / max(xi_max, 1e-12),
        t_eval=[t],
    )
    if not sol.success:
        raise RuntimeError(f"ODE integration failed ({sol.message}); largest xi = {xi_max}")
    return float(sol.y[:, -1].sum())


def jump_tail_bound_check(params: ModelParams, R: float) -> tuple[float, float]:
    """(P[Poisson(2dt) >= R r_t], exp(-(q/2) R r_t log t))."""
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    s = derive_scales(params)
    n = R * s.r_t
    exact = math.exp(float(stats.poisson.logsf(math.ceil(n) - 1, 2 * params.d * params.t)))
    bound = math.exp(-(s.q / 2) * R * s.r_t * math.log(params.t))
    return exact, bound


def jump_tail_log_check(params: ModelParams, R: float) -> tuple[float, float]:
    """Same comparison as ``jump_tail_bound_check`` on the log scale, free of underflow."""
    s = derive_scales(params)
    n = R * s.r_t
    return float(stats.poisson.logsf(math.ceil(n) - 1, 2 * params.d * params.t)), -(s.q / 2) * R * s.r_t * math.log(params.t)
