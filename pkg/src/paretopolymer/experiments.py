"""Seeded batch experiments with JSON run records and CSV plot data.

Each experiment kind maps a validated ``ExperimentConfig`` to a results
payload, a set of pass/fail verdicts and rows of ``series, x, y, stderr``.
Results depend only on the config (seed included), so reruns reproduce them.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
import tempfile
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ._rng import derive_seed, make_rng
from .model import ModelParams, derive_scales, sample_field, scaling_identity_errors
from .oracles import phi_oracle
from .point_process import (
    ConeSet,
    PointMeasure,
    count_in_cone,
    cone_intensity,
    rescale_field,
    sample_ppp,
    sample_rescaled_window,
)
from .variational import (
    build_multisupport_config,
    d0,
    d0_bruteforce,
    d0_subset_table,
    phi_k,
    psi,
    solve_xi,
    xi_d1_screening,
)
from .walk import (
    LogMeanExp,
    StrategySpec,
    estimate_logZ_guided,
    estimate_logZ_naive,
    free_box_radius,
    in_event_A,
    jump_tail_bound_check,
    jump_tail_log_check,
    log_prob_A_lower_bound,
    path_hamiltonian,
    simulate_walk,
    strategy_from_solution,
)

VERSION = "0.1.0"
WORKERS_ENV = "PARETOPOLYMER_WORKERS"

KINDS = (
    "scales-check",
    "ppp-convergence",
    "phi-oracle",
    "d0-oracle",
    "xi-solve",
    "multisupport",
    "mc-partition",
    "guided-vs-naive",
    "d1-screening",
    "tail-bound",
)

REQUIRED = {
    "scales-check": ("t",),
    "ppp-convergence": ("replicas", "cone_h", "cone_s", "R"),
    "phi-oracle": ("instances", "k"),
    "d0-oracle": ("instances", "n_points"),
    "xi-solve": ("instances", "n_points", "replicas"),
    "multisupport": ("k", "instances"),
    "mc-partition": ("t", "replicas"),
    "guided-vs-naive": ("t", "replicas"),
    "d1-screening": ("instances", "n_points"),
    "tail-bound": ("t", "R"),
}

# kinds whose scales need log t > 0
_NEEDS_T_ABOVE_ONE = {"scales-check", "mc-partition", "guided-vs-naive", "tail-bound"}

_INT_FIELDS = ("seed", "d", "replicas", "instances", "k", "n_points", "box_radius")
_FLOAT_FIELDS = ("alpha", "theta", "t", "R", "f_min", "cone_h", "cone_s", "s", "delta")


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid config: " + "; ".join(self.errors))


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int | None = None
    d: int = 1
    alpha: float = 3.0
    theta: float = 1.0
    t: float | None = None
    replicas: int | None = None
    instances: int | None = None
    k: int | None = None
    n_points: int | None = None
    R: float | None = None
    f_min: float | None = None
    box_radius: int | None = None
    cone_h: float | None = None
    cone_s: float | None = None
    s: float | None = None
    delta: float | None = None
    output: str | None = None

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        errors = [f"unknown key {key!r}" for key in data if key not in names]
        if "kind" not in data:
            errors.append("kind: missing")
        values = {}
        for key, val in data.items():
            if key not in names:
                continue
            if key in _INT_FIELDS and val is not None:
                if isinstance(val, bool) or not isinstance(val, (int, float)) or int(val) != val:
                    errors.append(f"{key}: expected an integer, got {val!r}")
                    continue
                val = int(val)
            elif key in _FLOAT_FIELDS and val is not None:
                if isinstance(val, bool) or not isinstance(val, (int, float)):
                    errors.append(f"{key}: expected a number, got {val!r}")
                    continue
                val = float(val)
            values[key] = val
        if errors:
            raise ConfigError(errors)
        cfg = cls(**values)
        cfg.check()
        return cfg

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def params(self) -> ModelParams:
        return ModelParams(self.d, self.alpha, self.theta, self.t if self.t is not None else 2.0)

    def errors(self) -> list[str]:
        """Every problem with this config; empty when it is runnable."""
        errs = []
        if self.kind not in KINDS:
            return [f"kind: {self.kind!r} is not one of {', '.join(KINDS)}"]
        if self.seed is None:
            errs.append("seed: missing (seeds are mandatory)")
        for name in REQUIRED[self.kind]:
            if getattr(self, name) is None:
                errs.append(f"{name}: required for kind {self.kind}")
        if self.d < 1:
            errs.append(f"d: must be >= 1, got {self.d}")
        if not self.alpha > self.d:
            errs.append(f"alpha: must exceed d={self.d}, got {self.alpha}")
        if not self.theta > 0:
            errs.append(f"theta: must be positive, got {self.theta}")
        if self.t is not None:
            if self.kind in _NEEDS_T_ABOVE_ONE and not self.t > 1:
                errs.append(f"t: must be > 1 for kind {self.kind}, got {self.t}")
            elif not self.t > 0:
                errs.append(f"t: must be positive, got {self.t}")
        for name, low in (("replicas", 2), ("instances", 1), ("k", 1), ("n_points", 1), ("box_radius", 0)):
            val = getattr(self, name)
            if val is not None and val < low:
                errs.append(f"{name}: must be >= {low}, got {val}")
        for name in ("f_min", "cone_h", "cone_s"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                errs.append(f"{name}: must be positive, got {val}")
        if self.R is not None:
            low = 1.0 if self.kind == "tail-bound" else 0.0
            if not self.R >= low or self.R == 0:
                errs.append(f"R: must be >= {low:g} and positive, got {self.R}")
        for name in ("s", "delta"):
            val = getattr(self, name)
            if val is not None and not 0 < val < 1:
                errs.append(f"{name}: must lie in (0, 1), got {val}")
        if self.kind == "d0-oracle" and self.n_points is not None and self.n_points > 9:
            errs.append(f"n_points: brute force is limited to 9 points, got {self.n_points}")
        if self.kind == "xi-solve" and self.n_points is not None and self.n_points > 15:
            errs.append(f"n_points: random-measure check is limited to 15 points, got {self.n_points}")
        if self.kind == "phi-oracle" and self.k is not None and self.k > 8:
            errs.append(f"k: grid oracle is limited to k <= 8, got {self.k}")
        if self.kind == "d1-screening" and self.d != 1:
            errs.append(f"d: d1-screening needs d = 1, got {self.d}")
        return errs

    def check(self) -> None:
        errs = self.errors()
        if errs:
            raise ConfigError(errs)


def parse_override(text: str) -> tuple[str, object]:
    """``key=value`` with the value read as a TOML scalar, falling back to a bare string."""
    if "=" not in text:
        raise ConfigError([f"override {text!r}: expected key=value"])
    key, raw = (p.strip() for p in text.split("=", 1))
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value


def load_config(path, overrides=()) -> ExperimentConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    for text in overrides:
        key, value = parse_override(text)
        data[key] = value
    return ExperimentConfig.from_mapping(data)


@dataclass
class RunRecord:
    config: dict
    version: str
    artifact: str
    wall_clock: float
    results: dict
    verdicts: dict
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": "run/1",
                "config": self.config,
                "version": self.version,
                "artifact": self.artifact,
                "wall_clock": self.wall_clock,
                "results": self.results,
                "verdicts": self.verdicts,
                "rows": self.rows,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        doc = json.loads(text)
        if doc.get("schema") != "run/1":
            raise ValueError(f"unsupported schema {doc.get('schema')!r}")
        return cls(
            doc["config"], doc["version"], doc["artifact"], doc["wall_clock"], doc["results"], doc["verdicts"],
            [list(r) for r in doc.get("rows", [])],
        )


def _plain(obj):
    """numpy scalars/arrays to JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


# ---------------------------------------------------------------------------
# experiment kinds


def _scales_check(cfg: ExperimentConfig):
    p = cfg.params()
    e1, e2 = scaling_identity_errors(p)
    res = {"scales": derive_scales(p)._asdict(), "relative_errors": [e1, e2]}
    return res, {"r_t_identity": e1 <= 1e-12, "beta_t_identity": e2 <= 1e-12}, []


def _ppp_convergence(cfg: ExperimentConfig):
    cone = ConeSet(cfg.cone_h, cfg.cone_s)
    f_min = cfg.f_min if cfg.f_min is not None else cfg.cone_h
    rng = make_rng(cfg.seed, "ppp")
    counts = [count_in_cone(sample_ppp(cfg.d, cfg.alpha, f_min, cfg.R, rng), cone) for _ in range(cfg.replicas)]
    mean, se = _mean_se(counts)
    full = cone_intensity(cone, cfg.alpha, cfg.d)
    windowed = cone_intensity(cone, cfg.alpha, cfg.d, cfg.R)
    res = {"mean_count": mean, "stderr": se, "intensity": full, "window_intensity": windowed, "truncated_mass": full - windowed}
    rows = [("ppp", cfg.cone_h, mean, se), ("intensity", cfg.cone_h, full, 0.0)]
    verdicts = {"cone_mean_within_3se": abs(mean - full) <= 3 * se, "window_covers_cone": f_min <= cfg.cone_h}
    if cfg.t is not None and cfg.t > 1:
        p = cfg.params()
        r_t = derive_scales(p).r_t
        trng = make_rng(cfg.seed, "rescaled")
        radius = int(math.floor(cfg.R * r_t))
        tc = [count_in_cone(sample_rescaled_window(p, radius, f_min, trng), cone) for _ in range(cfg.replicas)]
        tmean, tse = _mean_se(tc)
        res["rescaled_mean_count"], res["rescaled_stderr"] = tmean, tse
        rows.append(("rescaled", cfg.cone_h, tmean, tse))
    return res, verdicts, rows


def phi_certificate(f, w, theta: float) -> float:
    """Largest violation of the KKT conditions of the sub-simplex problem at w."""
    f, w = np.asarray(f, float), np.asarray(w, float)
    active = w > 0
    grad = f - 2 * theta * w
    lam = float(grad[active].mean()) if abs(w.sum() - 1) <= 1e-12 and active.any() else 0.0
    viol = [max(-lam, 0.0), float(max(w.sum() - 1, 0.0)), float(max(-w.min(), 0.0))]
    if active.any():
        viol.append(float(np.abs(grad[active] - lam).max()))
    if (~active).any():
        viol.append(float(max((grad[~active] - lam).max(), 0.0)))
    return max(viol)


def random_phi_instance(k_max: int, theta: float, rng: np.random.Generator) -> np.ndarray:
    """Positive marks on scales ranging from well below to well above 2 theta."""
    k = int(rng.integers(1, k_max + 1))
    scale = theta * 10 ** rng.uniform(-1.0, 1.0)
    return scale * rng.exponential(size=k) + 1e-3 * theta


def _phi_oracle(cfg: ExperimentConfig):
    rng = make_rng(cfg.seed, "phi")
    theta = cfg.theta
    err = cert = 0.0
    dichotomy = bracket = True
    n_case1 = 0
    for _ in range(cfg.instances):
        f = random_phi_instance(cfg.k, theta, rng)
        r = phi_k(f, theta)
        val, _ = phi_oracle(f, theta)
        err = max(err, abs(r.value - val))
        cert = max(cert, phi_certificate(f, r.weights, theta))
        if f.sum() >= 2 * theta:
            n_case1 += 1
            dichotomy &= r.saturated and abs(r.weights.sum() - 1) <= 1e-12
            fs = np.sort(f)[::-1] ** 2 / (4 * theta)
            bracket &= fs[: r.k_star - 1].sum() < r.value <= fs[: r.k_star].sum() * (1 + 1e-14)
        else:
            dichotomy &= (not r.saturated) and r.weights.sum() < 1
    res = {"max_abs_error": err, "max_certificate_violation": cert, "case1_instances": n_case1}
    verdicts = {
        "matches_oracle": err <= 1e-6,
        "stationarity": cert <= 1e-9,
        "mass_dichotomy": bool(dichotomy),
        "bracketing": bool(bracket),
    }
    return res, verdicts, [("max_abs_error", cfg.k, err, 0.0)]


def _random_points(n: int, d: int, rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    return rng.uniform(-spread, spread, size=(n, d))


def _d0_oracle(cfg: ExperimentConfig):
    rng = make_rng(cfg.seed, "d0")
    err = 0.0
    perm_ok = mono_ok = True
    for _ in range(cfg.instances):
        n = int(rng.integers(1, cfg.n_points + 1))
        Y = _random_points(n, cfg.d, rng)
        fast, slow = d0(Y).cost, d0_bruteforce(Y).cost
        err = max(err, abs(fast - slow))
        perm_ok &= abs(d0(Y[rng.permutation(n)]).cost - fast) <= 1e-9
        extra = np.vstack([Y, _random_points(1, cfg.d, rng)])
        mono_ok &= d0(extra).cost >= fast - 1e-12
    res = {"max_abs_error": err}
    verdicts = {"matches_bruteforce": err <= 1e-9, "permutation_invariant": bool(perm_ok), "monotone": bool(mono_ok)}
    return res, verdicts, [("max_abs_error", cfg.n_points, err, 0.0)]


def random_point_measure(n: int, d: int, theta: float, rng: np.random.Generator, spread: float = 2.0) -> PointMeasure:
    marks = theta * rng.uniform(0.05, 3.0, size=n)
    return PointMeasure(marks, _random_points(n, d, rng, spread), d)


def random_psi_values(P: PointMeasure, q: float, theta: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Psi of n random sub-probability measures carried by P (random support, Dirichlet shape, uniform mass)."""
    N = len(P)
    table = d0_subset_table(P.locations)
    masks = rng.integers(1, 1 << N, size=n)
    bits = (masks[:, None] >> np.arange(N)[None, :]) & 1
    raw = rng.exponential(size=(n, N)) * bits
    W = raw / raw.sum(axis=1, keepdims=True) * rng.random((n, 1))
    return W @ P.marks - theta * (W * W).sum(axis=1) - q * table[masks]


def _xi_solve(cfg: ExperimentConfig):
    rng = make_rng(cfg.seed, "xi")
    q, theta = cfg.params().q, cfg.theta
    worst_gap = math.inf
    nonneg = consistent = True
    for _ in range(cfg.instances):
        n = int(rng.integers(1, cfg.n_points + 1))
        P = random_point_measure(n, cfg.d, theta, rng)
        sol = solve_xi(P, q, theta)
        nonneg &= sol.xi_value >= 0
        consistent &= abs(psi(P, sol.maximizer, q, theta) - sol.xi_value) <= 1e-9
        vals = random_psi_values(P, q, theta, cfg.replicas, rng)
        worst_gap = min(worst_gap, sol.xi_value - float(vals.max()))
    res = {"min_gap_to_random": worst_gap}
    verdicts = {"dominates_random": worst_gap >= -1e-9, "nonnegative": bool(nonneg), "maximizer_attains_xi": bool(consistent)}
    return res, verdicts, [("min_gap", cfg.n_points, worst_gap, 0.0)]


def _multisupport(cfg: ExperimentConfig):
    q, theta = cfg.params().q, cfg.theta
    sizes = []
    for i in range(cfg.instances):
        P = build_multisupport_config(cfg.k, q, theta, make_rng(cfg.seed, "multisupport", i), cfg.d)
        sizes.append(solve_xi(P, q, theta).support_size)
    failures = sum(s != cfg.k for s in sizes)
    mean, se = _mean_se(sizes) if len(sizes) > 1 else (float(sizes[0]), 0.0)
    res = {"support_sizes": sizes, "failures": failures}
    return res, {"support_size_is_k": failures == 0}, [("support_size", cfg.k, mean, se)]


def _d1_screening(cfg: ExperimentConfig):
    rng = make_rng(cfg.seed, "d1")
    q, theta = cfg.params().q, cfg.theta
    err = 0.0
    for _ in range(cfg.instances):
        n = int(rng.integers(1, cfg.n_points + 1))
        P = random_point_measure(n, 1, theta, rng, spread=3.0)
        err = max(err, abs(xi_d1_screening(P, q, theta) - solve_xi(P, q, theta).xi_value))
    return {"max_abs_error": err}, {"matches_solver": err <= 1e-9}, [("max_abs_error", cfg.n_points, err, 0.0)]


def _tail_bound(cfg: ExperimentConfig):
    p = cfg.params()
    exact, bound = jump_tail_bound_check(p, cfg.R)
    log_exact, log_bound = jump_tail_log_check(p, cfg.R)
    res = {"exact_tail": exact, "bound": bound, "log_exact_tail": log_exact, "log_bound": log_bound}
    return res, {"exact_below_bound": log_exact <= log_bound}, [("log_exact_tail", cfg.R, log_exact, 0.0), ("log_bound", cfg.R, log_bound, 0.0)]


def _field_for(cfg: ExperimentConfig, p: ModelParams):
    radius = cfg.box_radius if cfg.box_radius is not None else free_box_radius(p.t, p.d)
    return sample_field(p, radius, derive_seed(cfg.seed, "field"))


def _mc_partition(cfg: ExperimentConfig):
    p = cfg.params()
    sc = derive_scales(p)
    fld = _field_for(cfg, p)
    naive = estimate_logZ_naive(p, fld, cfg.replicas, make_rng(cfg.seed, "naive"), seed=cfg.seed)
    window = rescale_field(fld, p).top(cfg.n_points or 12)
    sol = solve_xi(window, sc.q, p.theta)
    res = {
        "gamma_t": sc.gamma_t,
        "box_radius": fld.box_radius,
        "naive": {"log_estimate": naive.log_estimate, "stderr": naive.stderr, "normalized": naive.normalized,
                  "normalized_stderr": naive.normalized_stderr, "escapes": naive.info["escapes"]},
        "xi_window": sol.xi_value,
        "window_size": len(window),
        "maximizer_support": sol.support_size,
    }
    rows = [("naive", p.t, naive.normalized, naive.normalized_stderr), ("xi_window", p.t, sol.xi_value, 0.0)]
    below = True
    if sol.support_size:
        s = cfg.s if cfg.s is not None else 1.0 / math.log(p.t)
        delta = cfg.delta if cfg.delta is not None else 1.0 / math.log(p.t)
        spec = strategy_from_solution(sol, p, s, delta)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            guided = estimate_logZ_guided(p, fld, spec, cfg.replicas, make_rng(cfg.seed, "guided"), seed=cfg.seed)
        res["warnings"] = [str(w.message) for w in caught]
        res["guided"] = {"log_estimate": guided.log_estimate, "stderr": guided.stderr, "normalized": guided.normalized,
                         "normalized_stderr": guided.normalized_stderr, "s": s, "delta": delta, **guided.info}
        rows.append(("guided", p.t, guided.normalized, guided.normalized_stderr))
        below = guided.normalized <= sol.xi_value + 3 * guided.normalized_stderr
    else:
        res["guided"] = None
    return res, {"guided_below_xi_window": bool(below)}, rows


def _guided_vs_naive(cfg: ExperimentConfig):
    p = cfg.params()
    s = cfg.s if cfg.s is not None else 0.2
    delta = cfg.delta if cfg.delta is not None else 0.2
    target = np.zeros((1, p.d), dtype=np.int64)
    target[0, 0] = 1
    spec = StrategySpec(target, [1.0 - s], delta, s)
    fld = _field_for(cfg, p)
    beta = derive_scales(p).beta_t
    guided = estimate_logZ_guided(p, fld, spec, cfg.replicas, make_rng(cfg.seed, "guided"), seed=cfg.seed)
    naive = estimate_logZ_naive(p, fld, cfg.replicas, make_rng(cfg.seed, "naive"), seed=cfg.seed)
    rng = make_rng(cfg.seed, "plain")
    hits = 0
    direct = LogMeanExp()
    for _ in range(cfg.replicas):
        traj = simulate_walk(p.t, p.d, rng)
        hits += in_event_A(traj, spec)
        direct.update(path_hamiltonian(traj, fld, beta) if in_event_A(traj, spec, direct=True) else -math.inf)
    freq = hits / cfg.replicas
    freq_se = math.sqrt(max(freq * (1 - freq), 1.0 / cfg.replicas) / cfg.replicas)
    bound = math.exp(log_prob_A_lower_bound(spec, p.t))
    plain_est, plain_se = direct.result()
    comb = math.sqrt(guided.stderr**2 + naive.stderr**2)
    res = {
        "guided": {"log_estimate": guided.log_estimate, "stderr": guided.stderr, **guided.info},
        "naive": {"log_estimate": naive.log_estimate, "stderr": naive.stderr},
        "event_frequency": freq,
        "event_frequency_stderr": freq_se,
        "event_probability_bound": bound,
        "plain_direct": {"log_estimate": plain_est, "stderr": plain_se},
    }
    verdicts = {
        "guided_below_naive": guided.log_estimate <= naive.log_estimate + 3 * comb,
        "event_frequency_above_bound": freq + 3 * freq_se >= bound,
    }
    if math.isfinite(plain_est) and math.isfinite(plain_se):
        verdicts["guided_matches_plain"] = abs(guided.log_estimate - plain_est) <= 3 * math.hypot(guided.stderr, plain_se)
    rows = [("guided", p.t, guided.log_estimate, guided.stderr), ("naive", p.t, naive.log_estimate, naive.stderr),
            ("plain_direct", p.t, plain_est, plain_se)]
    return res, verdicts, rows


_DISPATCH = {
    "scales-check": _scales_check,
    "ppp-convergence": _ppp_convergence,
    "phi-oracle": _phi_oracle,
    "d0-oracle": _d0_oracle,
    "xi-solve": _xi_solve,
    "multisupport": _multisupport,
    "mc-partition": _mc_partition,
    "guided-vs-naive": _guided_vs_naive,
    "d1-screening": _d1_screening,
    "tail-bound": _tail_bound,
}


# ---------------------------------------------------------------------------
# orchestration


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "x", "y", "stderr"])
    for r in rows:
        w.writerow([r[0], *(repr(float(v)) if v is not None else "" for v in r[1:])])
    return buf.getvalue()


def read_csv(text: str) -> list[tuple]:
    rd = csv.reader(io.StringIO(text))
    header = next(rd)
    if header != ["series", "x", "y", "stderr"]:
        raise ValueError(f"unexpected CSV header {header}")
    return [(r[0], *(float(v) if v else None for v in r[1:])) for r in rd]


def _stem(cfg: ExperimentConfig) -> str:
    return f"{cfg.kind}-seed{cfg.seed}"


def run(config: ExperimentConfig, out_dir=None) -> RunRecord:
    """Run one experiment. Writes ``<kind>-seed<seed>.json`` (and ``.csv``) to ``out_dir`` or ``config.output``."""
    config.check()
    start = time.perf_counter()
    results, verdicts, rows = _DISPATCH[config.kind](config)
    results, verdicts = _plain(results), {k: bool(v) for k, v in verdicts.items()}
    rows = [list(_plain(r)) for r in rows]
    digest = hashlib.sha1(json.dumps(results, sort_keys=True).encode()).hexdigest()[:12]
    record = RunRecord(config.to_dict(), VERSION, digest, time.perf_counter() - start, results, verdicts, rows)
    target = out_dir if out_dir is not None else config.output
    if target is not None:
        atomic_write(Path(target) / f"{_stem(config)}.json", record.to_json())
        if rows:
            atomic_write(Path(target) / f"{_stem(config)}.csv", rows_to_csv(rows))
    return record


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def sweep_configs(base: ExperimentConfig, axis: str, values) -> list[ExperimentConfig]:
    if axis not in _INT_FIELDS + _FLOAT_FIELDS or axis == "seed":
        raise ConfigError([f"axis: {axis!r} is not a numeric config field"])
    base.check()
    out, errors = [], []
    for i, v in enumerate(values):
        data = base.to_dict()
        data[axis] = v
        data["seed"] = derive_seed(base.seed, "sweep", axis, i)
        try:
            out.append(ExperimentConfig.from_mapping(data))
        except ConfigError as exc:
            errors += [f"{axis}={v}: {e}" for e in exc.errors]
    if errors:
        raise ConfigError(errors)
    return out


def sweep(base: ExperimentConfig, axis: str, values, out_dir=None, workers: int | None = None) -> list[RunRecord]:
    """One run per value of ``axis``, each with its own derived seed, plus a consolidated CSV."""
    configs = sweep_configs(base, axis, values)
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(configs))) as pool:
            records = list(pool.map(run, configs, [out_dir] * len(configs)))
    else:
        records = [run(c, out_dir) for c in configs]
    target = out_dir if out_dir is not None else base.output
    if target is not None:
        rows = [[r[0], getattr(c, axis), *r[2:]] for c, rec in zip(configs, records) for r in rec.rows]
        atomic_write(Path(target) / f"sweep-{base.kind}-{axis}.csv", rows_to_csv(rows))
    return records
