"""Path replanning on a heading change, and steep-slope frame rotation.

A heading command rebuilds the path ahead of the leader while geometry
behind it is retained exactly; when the local heading climbs past 60
degrees the frame rotates so the curve stays a well-conditioned function
of x, without moving anything in the global frame.
"""

import math

import numpy as np

from convoy import Waypoint, build_path
from convoy.paths import replan, rotate_frame

# --- replanning -----------------------------------------------------------
line = build_path([Waypoint(float(x), 0.0) for x in np.arange(-4.0, 10.1, 1.0)])
cmd = math.radians(15.0)
new = replan(line, (2.0, 0.0, 0.0), cmd, lookahead=3.0, n_new_waypoints=8)

print("replan with a +15 degree command at x = 2:")
print(f"  slope at the anchor: {new.eval(2.0)[1]:+.4f} (tan 15deg = {math.tan(cmd):+.4f})")
probe = np.linspace(-3.5, 1.7, 50)
dev = np.max(np.abs(new.eval(probe)[0] - line.eval(probe)[0]))
print(f"  trailing geometry deviation behind the leader: {dev:.2e} m")
print(f"  new domain: [{new.x_min:.1f}, {new.x_max:.1f}]")

# --- frame rotation ---------------------------------------------------------
theta = math.radians(75.0)
steep = build_path([Waypoint(float(x), math.tan(theta) * x) for x in np.arange(0.0, 3.01, 0.25)])
rot, frame = rotate_frame(steep, 1.5)
lx, _ = frame.to_local(*steep.point_global(1.5))

print("\nsteep line climbing at 75 degrees, rotated about the anchor:")
print(f"  frame rotation: {math.degrees(frame.rotation):.1f} degrees")
print(f"  local heading at the anchor after rotation: "
      f"{math.degrees(rot.heading(lx)):.1f} degrees")
worst = 0.0
for x in np.linspace(0.1, 2.9, 25):
    gx, gy = steep.point_global(x)
    nx, ny = frame.to_local(gx, gy)
    worst = max(worst, abs(rot.value(nx) - ny))
print(f"  worst global-geometry deviation: {worst:.2e} m")
print(f"  curvature before/after at the anchor: "
      f"{steep.curvature(1.5):+.2e} / {rot.curvature(lx):+.2e}")
