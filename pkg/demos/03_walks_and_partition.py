"""
Walks, local times and the partition function
=============================================

Simulate a walk, check that its Hamiltonian equals the rescaled energy of
its occupation measure, then estimate log Z three ways.
"""

import math

import numpy as np

from paretopolymer import ModelParams, StrategySpec, derive_scales, make_rng, rescale_field, sample_field
from paretopolymer.variational import energy
from paretopolymer.walk import (
    empirical_measure,
    estimate_logZ_guided,
    estimate_logZ_naive,
    free_box_radius,
    hamiltonian,
    local_times,
    pam_oracle,
    simulate_walk,
)

params = ModelParams(d=1, alpha=3.0, theta=1.0, t=20.0)
s = derive_scales(params)
field = sample_field(params, free_box_radius(params.t, params.d), seed=7)
rng = make_rng(7, "walks")

walk = simulate_walk(params.t, params.d, rng)
lt = local_times(walk)
print(f"{walk.n_jumps} jumps, {len(lt.sites)} distinct sites, total time {lt.total()}")
H = hamiltonian(lt, field, s.beta_t)
W = empirical_measure(lt, params, field)
print(f"H = {H:.6f},  gamma_t * Phi(W) = {s.gamma_t * energy(rescale_field(field, params), W, params.theta):.6f}")

# Without self-repulsion Z solves a linear ODE; Monte Carlo with killing at the box edge matches it.
small = sample_field((1, 3.0), 3, seed=11)
p1 = ModelParams(1, 3.0, 1.0, 1.0)
mc = estimate_logZ_naive(p1, small, 20_000, rng, beta=0.0, mode="killed")
print(f"beta=0: Monte Carlo {mc.log_estimate:.4f} +- {mc.stderr:.4f}, ODE {math.log(pam_oracle(small, 1.0)):.4f}")

# A strategy that jumps to the neighbour and stays there gives a lower bound.
p2 = ModelParams(1, 3.0, 1.0, 2.0)
f2 = sample_field(p2, free_box_radius(2.0, 1), seed=5)
spec = StrategySpec(targets=[[1]], weights=[0.8], delta=0.2, s=0.2)
guided = estimate_logZ_guided(p2, f2, spec, 4000, rng)
naive = estimate_logZ_naive(p2, f2, 4000, rng)
print(f"t=2: guided lower bound {guided.log_estimate:.3f} +- {guided.stderr:.3f}, naive {naive.log_estimate:.3f} +- {naive.stderr:.3f}")
print("estimate record:", guided.to_json()[:120], "...")
