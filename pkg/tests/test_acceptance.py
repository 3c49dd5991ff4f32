"""Acceptance suite: one test per criterion, each logging a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines as they
happen; a summary table is printed at the end of every session.
"""
import functools
import math
import time

import numpy as np
from scipy import stats

from paretopolymer._rng import make_rng
from paretopolymer.experiments import ExperimentConfig, phi_certificate, random_phi_instance, random_point_measure, random_psi_values, sweep
from paretopolymer.model import ModelParams, PotentialField, derive_scales, sample_field, scaling_identity_errors
from paretopolymer.oracles import phi_oracle
from paretopolymer.point_process import ConeSet, cone_intensity, count_in_cone, pareto_order_statistics, rescale_field, sample_ppp, sample_uniform_ppp
from paretopolymer.variational import build_multisupport_config, d0, d0_bruteforce, energy, has_short_k_path, phi_k, psi, solve_xi, xi_d1_screening
from paretopolymer.walk import (
    StrategySpec,
    empirical_measure,
    estimate_logZ_guided,
    estimate_logZ_naive,
    free_box_radius,
    hamiltonian,
    in_event_A,
    jump_tail_log_check,
    local_times,
    log_prob_A_lower_bound,
    pam_oracle,
    simulate_walk,
)

THETAS = (0.1, 1.0, 10.0)


@functools.lru_cache(maxsize=1)
def phi_instances():
    rng = make_rng(2024, "acceptance-phi")
    return [(random_phi_instance(6, THETAS[i % 3], rng), THETAS[i % 3]) for i in range(500)]


def test_01_phi_closed_form_vs_grid_oracle(acceptance):
    start = time.perf_counter()
    err = cert = 0.0
    dichotomy = True
    for f, theta in phi_instances():
        r = phi_k(f, theta)
        err = max(err, abs(r.value - phi_oracle(f, theta)[0]))
        cert = max(cert, phi_certificate(f, r.weights, theta))
        if f.sum() >= 2 * theta:
            dichotomy &= abs(r.weights.sum() - 1) <= 1e-12
        else:
            dichotomy &= r.weights.sum() < 1
    elapsed = time.perf_counter() - start
    acceptance.check(
        1, "phi_k vs simplex oracle", err <= 1e-6 and cert <= 1e-9 and dichotomy and elapsed < 60,
        f"max|err|={err:.2e} certificate={cert:.2e} dichotomy={dichotomy} time={elapsed:.1f}s",
    )


def test_02_bracketing(acceptance):
    case1 = violations = 0
    worst = None
    for f, theta in phi_instances():
        if f.sum() < 2 * theta:
            continue
        case1 += 1
        r = phi_k(f, theta)
        sq = np.sort(f)[::-1] ** 2 / (4 * theta)
        lower, upper = sq[: r.k_star - 1].sum(), sq[: r.k_star].sum()
        if not (lower < r.value <= upper):
            violations += 1
            worst = worst or (np.round(np.sort(f)[::-1], 4).tolist(), theta, lower, r.value)
    acceptance.check(
        2, "bracketing of phi_k", violations == 0,
        f"{violations}/{case1} Case-1 instances violate; first: f={worst[0] if worst else None} theta={worst[1] if worst else None} "
        f"lower={worst[2] if worst else 0:.4f} phi={worst[3] if worst else 0:.4f}" if worst else f"{case1} Case-1 instances",
    )


def test_03_d0_exactness(acceptance):
    start = time.perf_counter()
    rng = make_rng(2024, "acceptance-d0")
    err = 0.0
    perm = mono = True
    for i in range(200):
        d = 1 + i % 3
        n = int(rng.integers(1, 9))
        Y = rng.uniform(-1, 1, size=(n, d))
        fast = d0(Y).cost
        err = max(err, abs(fast - d0_bruteforce(Y).cost))
        perm &= abs(d0(Y[rng.permutation(n)]).cost - fast) <= 1e-12
        mono &= d0(np.vstack([Y, rng.uniform(-1, 1, size=(1, d))])).cost >= fast - 1e-12
    elapsed = time.perf_counter() - start
    acceptance.check(
        3, "D0 dynamic program vs brute force", err <= 1e-12 and perm and mono and elapsed < 60,
        f"max|err|={err:.1e} permutation={perm} monotone={mono} time={elapsed:.1f}s",
    )


def test_04_xi_dominance(acceptance):
    start = time.perf_counter()
    rng = make_rng(2024, "acceptance-xi")
    q, theta = 0.5, 1.0
    gap = math.inf
    nonneg = True
    for i in range(100):
        n = int(rng.integers(1, 13))
        P = random_point_measure(n, 1 + i % 2, theta, rng)
        sol = solve_xi(P, q, theta)
        nonneg &= sol.xi_value >= 0
        gap = min(gap, psi(P, sol.maximizer, q, theta) - float(random_psi_values(P, q, theta, 10_000, rng).max()))
    elapsed = time.perf_counter() - start
    acceptance.check(
        4, "Xi maximizer beats random measures", gap >= -1e-12 and nonneg and elapsed < 300,
        f"min(Psi(mu*) - max Psi(random))={gap:.3e} nonneg={nonneg} time={elapsed:.1f}s",
    )


def test_05_multisupport(acceptance):
    start = time.perf_counter()
    q, theta = 0.5, 1.0
    failures = []
    for k in range(1, 6):
        for seed in range(50):
            P = build_multisupport_config(k, q, theta, make_rng(seed, "acceptance-multisupport", k))
            size = solve_xi(P, q, theta).support_size
            if size != k:
                failures.append((k, seed, size))
    elapsed = time.perf_counter() - start
    acceptance.check(5, "multisupport maximizer size", not failures and elapsed < 300, f"failures={failures} time={elapsed:.1f}s")


def test_06_d1_reduction(acceptance):
    rng = make_rng(2024, "acceptance-d1")
    err = 0.0
    for _ in range(200):
        P = random_point_measure(int(rng.integers(1, 11)), 1, 1.0, rng, spread=3.0)
        err = max(err, abs(xi_d1_screening(P, 0.5, 1.0) - solve_xi(P, 0.5, 1.0).xi_value))
    acceptance.check(6, "d=1 interval reduction vs solver", err <= 1e-9, f"max|err|={err:.2e}")


def test_07_pathwise_identity(acceptance):
    start = time.perf_counter()
    p = ModelParams(1, 3.0, 1.0, 20.0)
    s = derive_scales(p)
    field = sample_field(p, free_box_radius(p.t, p.d), seed=2024)
    base = rescale_field(field, p)
    rng = make_rng(2024, "acceptance-walks")
    worst = 0.0
    for _ in range(1000):
        lt = local_times(simulate_walk(p.t, p.d, rng))
        h = hamiltonian(lt, field, s.beta_t)
        phi = energy(base, empirical_measure(lt, p, field, base), p.theta)
        worst = max(worst, abs(h - s.gamma_t * phi) / abs(h))
    elapsed = time.perf_counter() - start
    acceptance.check(7, "H = gamma_t Phi(W_t)", worst <= 1e-10 and elapsed < 60, f"max rel err={worst:.2e} time={elapsed:.1f}s")


def test_08_scaling_identities(acceptance):
    worst = 0.0
    for d in (1, 2, 3):
        for excess in (0.1, 0.5, 1.0, 3.0, 10.0):
            for t in (1.5, math.e, 10.0, 1e2, 1e4, 1e8):
                for theta in (0.1, 1.0, 7.0):
                    p = ModelParams(d, d + excess, theta, t)
                    try:
                        worst = max(worst, *scaling_identity_errors(p))
                    except OverflowError:
                        continue
    acceptance.check(8, "scaling identities", worst <= 1e-12, f"max rel err={worst:.2e}")


def test_09_order_statistics(acceptance):
    start = time.perf_counter()
    rng = make_rng(2024, "acceptance-order")
    pvals = {}
    for n in (1, 10, 100):
        gamma_max = pareto_order_statistics(n, 3.0, rng, size=100_000)[:, 0]
        direct_max = ((1.0 - rng.random((100_000, n))) ** (-1 / 3.0)).max(axis=1)
        pvals[n] = float(stats.ks_2samp(gamma_max, direct_max).pvalue)
    elapsed = time.perf_counter() - start
    ok = min(pvals.values()) > 0.01 and elapsed < 120
    acceptance.check(9, "order statistics two-sample KS", ok, f"p-values={ {k: round(v, 3) for k, v in pvals.items()} } time={elapsed:.1f}s")


def test_10_cone_intensity(acceptance):
    rng = make_rng(2024, "acceptance-cone")
    lines, ok = [], True
    for h, s, R in ((1.0, 1.0, 200.0), (0.5, 2.0, 100.0), (2.0, 0.5, 800.0)):
        cone = ConeSet(h, s)
        full = cone_intensity(cone, 3.0, 1)
        c = np.array([count_in_cone(sample_ppp(1, 3.0, h, R, rng), cone) for _ in range(10_000)])
        se = c.std(ddof=1) / math.sqrt(len(c))
        ok &= abs(c.mean() - full) <= 3 * se
        lines.append(f"(h={h},s={s}): {c.mean():.4f} vs {full:.4f} se={se:.4f}")
    acceptance.check(10, "PPP cone counts vs intensity integral", ok, "; ".join(lines))


def test_11_tsp_in_ppp(acceptance):
    rng = make_rng(2024, "acceptance-tsp")
    lines, ok = [], True
    for d in (1, 2):
        for lam in (4.0, 16.0):
            k = int(math.floor((lam / 4) ** (1 / d) + 1e-12))
            hits = sum(has_short_k_path(sample_uniform_ppp(lam, d, rng), k, float(d)) for _ in range(1000))
            freq = hits / 1000
            se = math.sqrt(freq * (1 - freq) / 1000)
            bound = 1 - math.exp(-((lam / 4) ** (1 / d)))
            ok &= freq >= bound - 3 * se
            lines.append(f"d={d} lam={lam:g} k={k}: {freq:.3f} vs {bound:.3f}")
    acceptance.check(11, "short k-paths in a uniform PPP", ok, "; ".join(lines))


def test_12_partition_function_cross_validation(acceptance):
    start = time.perf_counter()
    p = ModelParams(1, 3.0, 1.0, 1.0)
    worst, ok = 0.0, True
    for i in range(20):
        field = sample_field(p, 3, seed=1000 + i)
        est = estimate_logZ_naive(p, field, 20_000, make_rng(2024, "acceptance-pam", i), beta=0.0, mode="killed")
        z = (est.log_estimate - math.log(pam_oracle(field, 1.0))) / est.stderr
        worst = max(worst, abs(z))
        ok &= abs(z) <= 3
    c = 2.5
    # large box: killing is negligible, so log Z = c t for every path
    const = PotentialField.from_values(np.full(2 * free_box_radius(p.t, p.d) + 1, c))
    est = estimate_logZ_naive(p, const, 2000, make_rng(2024, "acceptance-const"), beta=0.0, mode="killed")
    const_ok = abs(est.log_estimate - c * p.t) <= 3 * est.stderr + 1e-12 * c * p.t
    elapsed = time.perf_counter() - start
    acceptance.check(
        12, "naive estimator vs linear ODE", ok and const_ok,
        f"max |z|={worst:.2f} over 20 fields; constant field err={abs(est.log_estimate - c * p.t):.1e}; time={elapsed:.1f}s",
    )


def test_13_guided_lower_bound(acceptance):
    spec = StrategySpec([[1]], [0.8], 0.2, 0.2)
    p = ModelParams(1, 3.0, 1.0, 2.0)
    lines, ok = [], True
    for i in range(3):
        field = sample_field(p, free_box_radius(p.t, p.d), seed=2024 + i)
        g = estimate_logZ_guided(p, field, spec, 5000, make_rng(2024, "acceptance-guided", i))
        n = estimate_logZ_naive(p, field, 5000, make_rng(2024, "acceptance-naive", i))
        ok &= g.log_estimate <= n.log_estimate + 3 * math.hypot(g.stderr, n.stderr)
        ok &= g.info["bound_violations"] == 0
        lines.append(f"guided {g.log_estimate:.3f}±{g.stderr:.3f} naive {n.log_estimate:.3f}±{n.stderr:.3f}")
    rng = make_rng(2024, "acceptance-event")
    m = 20_000
    freq = sum(in_event_A(simulate_walk(p.t, 1, rng), spec) for _ in range(m)) / m
    se = math.sqrt(freq * (1 - freq) / m)
    bound = math.exp(log_prob_A_lower_bound(spec, p.t))
    ok &= freq + 3 * se >= bound
    lines.append(f"event frequency {freq:.4f}±{se:.4f} vs product bound {bound:.4f}")
    acceptance.check(13, "guided lower bound and event probability", ok, "; ".join(lines))


def test_14_jump_tail_bound(acceptance):
    p = ModelParams(1, 3.0, 1.0, 100.0)
    rows, ok = [], True
    for R in (1.0, 2.0, 4.0):
        log_exact, log_bound = jump_tail_log_check(p, R)
        ok &= log_exact <= log_bound
        rows.append(f"R={R:g}: log exact={log_exact:.1f} log bound={log_bound:.1f}")
    acceptance.check(14, "Poisson jump tail vs exponential bound", ok, "; ".join(rows))


def test_15_convergence_report(acceptance, tmp_path):
    base = ExperimentConfig.from_mapping({"kind": "mc-partition", "seed": 2024, "t": 20.0, "replicas": 400})
    first = sweep(base, "t", [20.0, 50.0, 100.0], tmp_path / "a", workers=1)
    second = sweep(base, "t", [20.0, 50.0, 100.0], tmp_path / "b", workers=1)
    same = [a.results for a in first] == [b.results for b in second]
    csv_same = (tmp_path / "a" / "sweep-mc-partition-t.csv").read_text() == (tmp_path / "b" / "sweep-mc-partition-t.csv").read_text()
    below = all(r.verdicts["guided_below_xi_window"] for r in first)
    lines = []
    for r in first:
        g = r.results["guided"]
        gtxt = f"{g['normalized']:.3f}±{g['normalized_stderr']:.3f}" if g else "n/a"
        lines.append(f"t={r.config['t']:g}: naive {r.results['naive']['normalized']:.3f}±{r.results['naive']['normalized_stderr']:.3f} "
                     f"Xi(window) {r.results['xi_window']:.3f} guided {gtxt}")
    print("\n".join(lines))
    acceptance.check(15, "convergence report", same and csv_same and below, f"deterministic={same and csv_same} guided<=Xi+3se={below}; " + "; ".join(lines))
