"""
The variational problem on a finite point measure
=================================================

Weights for a fixed set of marks, the shortest origin-anchored path, and
the exact maximizer of energy minus travel cost.
"""

import numpy as np

from paretopolymer import PointMeasure, d0, make_rng, phi_k, solve_xi
from paretopolymer.variational import build_multisupport_config, xi_d1_screening

# Closed-form weights: a large mark takes everything, comparable marks share.
for f in [(10.0, 1.0, 1.0), (4.0, 3.0), (1.0, 0.5)]:
    r = phi_k(f, theta=1.0)
    print(f"phi{f} = {r.value:.4f}, weights {np.round(r.weights, 4)}, active {r.k_star}, saturated {r.saturated}")

# l1 path from the origin through every point.
Y = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
res = d0(Y)
print("D0 =", res.cost, "visiting order", res.order)

# A random configuration and its maximizer.
rng = make_rng(3, "demo")
P = PointMeasure(rng.uniform(0.2, 3.0, 10), rng.uniform(-2, 2, (10, 1)), d=1)
sol = solve_xi(P, q=0.5, theta=1.0)
print(f"Xi = {sol.xi_value:.4f} with {sol.support_size} points, path cost {sol.d0_cost:.3f}")
print("same value from the interval reduction:", round(xi_d1_screening(P, 0.5, 1.0), 12))

# Configurations engineered to need exactly k points.
for k in range(1, 6):
    Pk = build_multisupport_config(k, q=0.5, theta=1.0, rng=rng)
    print(f"k={k}: maximizer uses {solve_xi(Pk, 0.5, 1.0).support_size} points")
