"""
Scales and the Pareto potential
===============================

Build a parameter set, look at the four scales, draw a potential on a box
and see where its rescaled points land.
"""

import numpy as np

from paretopolymer import ModelParams, derive_scales, make_rng, rescale_field, sample_field
from paretopolymer.model import scaling_identity_errors
from paretopolymer.point_process import ConeSet, cone_intensity, count_in_cone

params = ModelParams(d=1, alpha=3.0, theta=1.0, t=100.0)
scales = derive_scales(params)
print("q, beta_t, r_t, gamma_t =", scales)
print("relative errors of the two identities:", scaling_identity_errors(params))

# One Pareto(3) value per site of [-300, 300]; the seed pins the field down.
field = sample_field(params, 300, seed=1)
print("largest potential value:", field.values.max(), "at site", field.sites()[field.values.argmax()])

# The rescaled points: marks xi / r_t^{d/alpha}, locations z / r_t.
P = rescale_field(field, params)
top = P.top(5)
for f, y in sorted(zip(top.marks, top.locations[:, 0]), reverse=True):
    print(f"  mark {f:7.3f}   location {y:+.3f}")

# Points above a cone: compare with the limiting mean.
cone = ConeSet(h=0.5, s=1.0)
print("points in the cone:", count_in_cone(P, cone), " limiting mean:", round(cone_intensity(cone, 3.0, 1), 3))

# Reproducibility: same seed, same field.
again = sample_field(params, 300, seed=1)
print("identical on reuse:", np.array_equal(field.values, again.values))
rng = make_rng(1, "demo")
print("a derived stream:", rng.random(3))
