"""Numerically certify an exponential-stability region.

Samples the error box crossed with reference heading/speed ranges and
checks Vdot < 0 everywhere off the origin.  Two weight choices are shown:
the (2, 3) pair fails on this region for the wheeled gain set (the sampler
returns the offending point), while (80, 8) certifies it with a positive
decay-rate floor.
"""

import math

from convoy import Gains, LyapunovWeights, StabilityRegion, certify_region

gains = Gains(4.5, 7.5, 2.5)  # wheeled platform
region = StabilityRegion(
    e1_max=0.2, e2_max=0.2, e3_max=0.2,
    x3s_max=math.radians(30.0),
    u_ref_range=(0.1, 0.5),
)

for weights in (LyapunovWeights(2.0, 3.0), LyapunovWeights(80.0, 8.0)):
    res = certify_region(region, gains, weights, n_samples=100_000)
    print(f"weights (delta={weights.delta}, delta1={weights.delta1}): "
          f"{'CERTIFIED' if res.ok else 'counterexample found'}")
    if res.ok:
        b = res.bounds
        print(f"  alpha={b.alpha:.4f}  beta={b.beta:.4f}  rho={b.rho:.4f}"
              f"  ({res.n_checked} samples)")
        print(f"  => {b.alpha:.3f}|e|^2 <= V <= {b.beta:.3f}|e|^2,"
              f"  Vdot <= -{b.rho:.3f}|e|^2 on the sampled region")
    else:
        ce = res.counterexample
        print(f"  Vdot = {ce['vdot']:+.4f} at e={ce['e']}, "
              f"x3*={math.degrees(ce['x3s']):.1f} deg, u*={ce['u_ref']:.2f}")
    print()
