"""Build spline paths from waypoints and query geometry.

Shows interpolation through waypoints, slope/curvature evaluation, arc
length, and the arc-length inversion used to place followers.
"""

import math

import numpy as np

from convoy import SplineKind, Waypoint, build_path

# A gentle S-curve sampled every metre.
xs = np.arange(0.0, 12.01, 1.0)
wps = [Waypoint(float(x), 0.6 * math.sin(0.5 * x)) for x in xs]
path = build_path(wps, SplineKind.CLAMPED_BSPLINE)

print("domain:", path.domain)
for x in (0.0, 3.0, 6.0, 9.0):
    y, dy, d2y = path.eval(x)
    print(f"x={x:4.1f}  y={y:+.4f}  slope={dy:+.4f}  curvature={path.curvature(x):+.4f}")

total = path.arc_length(0.0, 12.0)
print(f"\narc length 0 -> 12 m of abscissa: {total:.4f} m (straight-line 12.0)")

# Walk backwards from the end at fixed arc-length intervals, the same way
# follower references are seeded behind a leader.
anchor = 12.0
for d in (0.0, 1.0, 2.0, 3.0):
    x = path.point_at_arc_length(anchor, d)
    print(f"point {d:.1f} m behind the end sits at abscissa {x:.4f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    dense = np.linspace(0.0, 12.0, 400)
    y, _, _ = path.eval(dense)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax1.plot(dense, y, label="spline")
    ax1.plot(xs, [w.y for w in wps], "o", label="waypoints")
    ax1.set_ylabel("y [m]")
    ax1.legend()
    ax2.plot(dense, path.curvature(dense))
    ax2.set_ylabel("curvature [1/m]")
    ax2.set_xlabel("x [m]")
    fig.savefig("demos_out_paths.png", dpi=120)
    print("\nwrote demos_out_paths.png")
except ImportError:
    print("\n(matplotlib not installed; skipping plot)")
