"""Planar reference curves y = g(x) in a rotatable local frame.

A path is an interpolated curve through waypoints, kept a well-conditioned
function of x by rotating the local frame whenever the heading gets close
to vertical.  All geometric queries (value, slope, curvature, arc length)
and the re-planning machinery live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import BPoly, BarycentricInterpolator, make_interp_spline
from scipy.optimize import brentq

from .errors import (
    DegenerateGeometry,
    NonFiniteInput,
    NonMonotoneAbscissae,
    OutOfDomain,
    SteepHeading,
    TooFewWaypoints,
)

# Local-frame heading beyond which the frame must rotate, and the heading
# the anchor is brought back to after a rotation.
STEEP_HEADING_RAD = math.pi / 3.0  # 60 deg
ROTATED_HEADING_RAD = math.pi / 12.0  # 15 deg

_DOMAIN_TOL = 1e-9

# Gauss-Legendre nodes/weights for the adaptive arc-length quadrature.
_GL7 = np.polynomial.legendre.leggauss(7)
_GL15 = np.polynomial.legendre.leggauss(15)


class SplineKind(str, Enum):
    CLAMPED_BSPLINE = "bspline"
    BARYCENTRIC = "barycentric"


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float


@dataclass(frozen=True)
class FrameTransform:
    """Rigid transform between the path's local frame and the global frame.

    local -> global:  p_g = origin + R(rotation) @ p_l
    """

    rotation: float = 0.0
    origin: tuple[float, float] = (0.0, 0.0)

    def to_global(self, x, y):
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return (self.origin[0] + c * x - s * y, self.origin[1] + s * x + c * y)

    def to_local(self, x, y):
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        dx, dy = x - self.origin[0], y - self.origin[1]
        return (c * dx + s * dy, -s * dx + c * dy)

    def heading_to_global(self, theta: float) -> float:
        return _wrap(theta + self.rotation)

    def heading_to_local(self, theta: float) -> float:
        return _wrap(theta - self.rotation)


def _wrap(theta: float) -> float:
    return math.pi - (math.pi - theta) % math.tau


class PathModel:
    """Immutable interpolated curve with first and second derivatives.

    ``control_x``/``control_y`` are the interpolation nodes in the local
    frame; ``frame`` maps local coordinates to the global frame.  Instances
    are never mutated after construction: replanning and frame rotation
    build new values.
    """

    def __init__(self, f, breaks, control_x, control_y, kind, frame=None):
        self._f = f
        self._breaks = np.asarray(breaks, dtype=float)
        self.control_x = np.asarray(control_x, dtype=float)
        self.control_y = np.asarray(control_y, dtype=float)
        self.kind = kind
        self.frame = frame if frame is not None else FrameTransform()
        self.x_min = float(self._breaks[0])
        self.x_max = float(self._breaks[-1])

    # -- basic queries ----------------------------------------------------

    @property
    def domain(self) -> tuple[float, float]:
        return (self.x_min, self.x_max)

    @property
    def waypoints(self) -> list[Waypoint]:
        return [Waypoint(float(x), float(y)) for x, y in zip(self.control_x, self.control_y)]

    def _check_domain(self, x):
        xa = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(xa)):
            raise NonFiniteInput("abscissa must be finite")
        if np.any(xa < self.x_min - _DOMAIN_TOL) or np.any(xa > self.x_max + _DOMAIN_TOL):
            raise OutOfDomain(
                f"abscissa outside domain [{self.x_min:.6g}, {self.x_max:.6g}]"
            )
        return np.clip(xa, self.x_min, self.x_max)

    def eval(self, x):
        """Value and first two derivatives of g at x (scalar or array)."""
        xa = self._check_domain(x)
        y = self._f(xa, 0)
        dy = self._f(xa, 1)
        d2y = self._f(xa, 2)
        if np.isscalar(x) or np.ndim(x) == 0:
            return float(y), float(dy), float(d2y)
        return y, dy, d2y

    def value(self, x):
        xa = self._check_domain(x)
        y = self._f(xa, 0)
        return float(y) if np.ndim(x) == 0 else y

    def heading(self, x):
        """Local-frame heading atan(g'(x)) of the curve at x."""
        xa = self._check_domain(x)
        h = np.arctan(self._f(xa, 1))
        return float(h) if np.ndim(x) == 0 else h

    def curvature(self, x):
        """Signed curvature g'' / (1 + g'^2)^(3/2).

        Positive curvature turns the heading counterclockwise.  The sign is
        kept (rather than the magnitude) so the feedforward turn rate has
        the correct direction.
        """
        xa = self._check_domain(x)
        dy = self._f(xa, 1)
        d2y = self._f(xa, 2)
        k = d2y / np.power(1.0 + dy * dy, 1.5)
        return float(k) if np.ndim(x) == 0 else k

    def point_global(self, x) -> tuple[float, float]:
        y = self.value(x)
        return self.frame.to_global(float(x), float(y))

    # -- arc length -------------------------------------------------------

    def _speed(self, x):
        dy = self._f(x, 1)
        return np.sqrt(1.0 + dy * dy)

    def _segment_quad(self, a: float, b: float, depth: int = 0) -> float:
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        x7 = mid + half * _GL7[0]
        x15 = mid + half * _GL15[0]
        i7 = half * float(np.dot(_GL7[1], self._speed(x7)))
        i15 = half * float(np.dot(_GL15[1], self._speed(x15)))
        if abs(i15 - i7) <= 1e-12 + 1e-10 * abs(i15) or depth >= 24:
            return i15
        return self._segment_quad(a, mid, depth + 1) + self._segment_quad(mid, b, depth + 1)

    def arc_length(self, x_from: float, x_to: float) -> float:
        """Arc length of the curve between two abscissae (x_from <= x_to)."""
        if x_from > x_to:
            raise OutOfDomain("arc_length requires x_from <= x_to")
        a = float(self._check_domain(x_from))
        b = float(self._check_domain(x_to))
        if a == b:
            return 0.0
        cuts = self._breaks[(self._breaks > a) & (self._breaks < b)]
        edges = np.concatenate(([a], cuts, [b]))
        return sum(self._segment_quad(lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))

    def point_at_arc_length(self, x_anchor: float, s: float) -> float:
        """Abscissa of the point at arc-length distance s behind the anchor.

        s > 0 walks backwards along the curve, s < 0 forwards.  Solved to
        |ds| well below 1e-8 m.
        """
        xa = float(self._check_domain(x_anchor))
        if s == 0.0:
            return xa
        if s > 0:
            lo, hi = self.x_min, xa
            total = self.arc_length(lo, xa)
            if s > total + 1e-12:
                raise OutOfDomain("requested point falls off the start of the path")
            if abs(s - total) <= 1e-12:
                return lo
            fn = lambda x: self.arc_length(x, xa) - s
        else:
            lo, hi = xa, self.x_max
            total = self.arc_length(xa, hi)
            if -s > total + 1e-12:
                raise OutOfDomain("requested point falls off the end of the path")
            if abs(-s - total) <= 1e-12:
                return hi
            fn = lambda x: -self.arc_length(xa, x) - s
        return float(brentq(fn, lo, hi, xtol=1e-12, rtol=8.9e-16))


def _as_xy(waypoints) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(waypoints, "__len__") and len(waypoints) and isinstance(waypoints[0], Waypoint):
        xs = np.array([w.x for w in waypoints], dtype=float)
        ys = np.array([w.y for w in waypoints], dtype=float)
    else:
        arr = np.asarray(waypoints, dtype=float)
        xs, ys = arr[:, 0].copy(), arr[:, 1].copy()
    return xs, ys


def build_path(waypoints, kind: SplineKind = SplineKind.CLAMPED_BSPLINE,
               frame: FrameTransform | None = None) -> PathModel:
    """Interpolate waypoints into a PathModel.

    The clamped cubic B-spline (default) interpolates every waypoint and has
    local support; the barycentric variant is a global polynomial kept only
    for smoothness comparisons.
    """
    xs, ys = _as_xy(waypoints)
    if xs.size < 4:
        raise TooFewWaypoints(f"need at least 4 waypoints, got {xs.size}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise NonFiniteInput("waypoints must be finite")
    if np.any(np.diff(xs) <= 0):
        raise NonMonotoneAbscissae("waypoint abscissae must be strictly increasing")
    kind = SplineKind(kind)
    if kind is SplineKind.CLAMPED_BSPLINE:
        spl = make_interp_spline(xs, ys, k=3)
        derivs = (spl, spl.derivative(1), spl.derivative(2))
        f = lambda x, nu: derivs[nu](x)
    else:
        bar = BarycentricInterpolator(xs, ys)
        def f(x, nu, _b=bar):
            return _b(x) if nu == 0 else _b.derivative(x, der=nu)
    return PathModel(f, xs, xs, ys, kind, frame)


def _hermite_path(nodes_x, nodes_data, control_y, kind, frame) -> PathModel:
    """C2 piecewise-quintic through (y, y', y'') data at each node."""
    poly = BPoly.from_derivatives(nodes_x, nodes_data)
    derivs = (poly, poly.derivative(1), poly.derivative(2))
    f = lambda x, nu: derivs[nu](x)
    return PathModel(f, nodes_x, nodes_x, control_y, kind, frame)


def _hermite_samples(path: PathModel, xs) -> list[list[float]]:
    y, dy, d2y = path.eval(np.asarray(xs, dtype=float))
    return [[float(a), float(b), float(c)] for a, b, c in zip(np.atleast_1d(y), np.atleast_1d(dy), np.atleast_1d(d2y))]


def replan(path: PathModel, pose, heading_command: float, lookahead: float = 2.0,
           n_new_waypoints: int = 8, keep_behind: float | None = None,
           blend: float = 0.2) -> PathModel:
    """Re-plan the path from the leader's reference pose.

    Geometry behind the anchor is retained exactly (the old curve's pieces
    are reproduced node-for-node); a short blend interval just behind the
    anchor absorbs the direction change; ahead of the anchor the new path is
    a straight ray in the commanded direction.  The slope at the anchor
    equals tan(heading_command), so a heading change is a step perturbation
    of the leader's reference heading, as a steering keypress should be.

    ``pose`` is the leader reference pose in the path's local frame; only
    its abscissa is used (the anchor stays exactly on the old curve).
    """
    if lookahead <= 0:
        raise ValueError("lookahead must be positive")
    if n_new_waypoints < 3:
        raise ValueError("need at least 3 new waypoints")
    if not math.isfinite(heading_command):
        raise NonFiniteInput("heading command must be finite")
    if abs(heading_command) >= STEEP_HEADING_RAD:
        raise SteepHeading(
            f"commanded heading {math.degrees(heading_command):.1f} deg is too close "
            f"to the local Y axis (threshold {math.degrees(STEEP_HEADING_RAD):.0f} deg)"
        )
    x_a = float(pose[0]) if not np.isscalar(pose) else float(pose)
    if not (path.x_min < x_a <= path.x_max + _DOMAIN_TOL):
        raise OutOfDomain("replan anchor outside path domain")
    x_a = min(x_a, path.x_max)

    m = math.tan(heading_command)
    y_a = path.value(x_a)

    lo = path.x_min if keep_behind is None else max(path.x_min, x_a - keep_behind)
    blend_start = max(lo, x_a - blend)
    trailing = [b for b in path._breaks if lo - _DOMAIN_TOL <= b < blend_start - _DOMAIN_TOL]
    if not trailing or trailing[0] > lo + _DOMAIN_TOL:
        trailing = [lo] + [b for b in trailing if b > lo + _DOMAIN_TOL]
    if blend_start - trailing[-1] > _DOMAIN_TOL:
        trailing.append(blend_start)
    if x_a - trailing[-1] <= _DOMAIN_TOL:
        trailing = trailing[:-1]
    if not trailing:
        raise OutOfDomain("no room behind the anchor to retain trailing geometry")

    nodes = list(trailing)
    data = _hermite_samples(path, nodes)
    nodes.append(x_a)
    data.append([y_a, m, 0.0])
    h = lookahead / n_new_waypoints
    for j in range(1, n_new_waypoints + 1):
        nodes.append(x_a + j * h)
        data.append([y_a + m * j * h, m, 0.0])

    nodes = np.asarray(nodes, dtype=float)
    ys = np.asarray([d[0] for d in data], dtype=float)
    return _hermite_path(nodes, data, ys, path.kind, path.frame)


def extend_path(path: PathModel, length: float, n_nodes: int = 4) -> PathModel:
    """Append a straight extension along the end slope, keeping the rest exact."""
    if length <= 0:
        raise ValueError("extension length must be positive")
    x_e = path.x_max
    y_e, m, c = path.eval(x_e)
    nodes = list(path._breaks)
    data = _hermite_samples(path, nodes)
    h = length / n_nodes
    for j in range(1, n_nodes + 1):
        nodes.append(x_e + j * h)
        data.append([y_e + m * j * h, m, 0.0])
    nodes = np.asarray(nodes, dtype=float)
    ys = np.asarray([d[0] for d in data], dtype=float)
    return _hermite_path(nodes, data, ys, path.kind, path.frame)


def rotate_frame(path: PathModel, anchor_x: float,
                 reference_heading: float | None = None) -> tuple[PathModel, FrameTransform]:
    """Re-express the path in a frame rotated so the anchor heading is gentle.

    The new frame is pivoted at the anchor's global position and rotated so
    that ``reference_heading`` (default: the curve heading at the anchor)
    maps to +/-15 deg.  Global geometry is unchanged; only its local
    coordinates are.  Returns the rebuilt path and the new frame.
    """
    anchor_x = float(path._check_domain(anchor_x))
    theta = path.heading(anchor_x) if reference_heading is None else float(reference_heading)
    if abs(theta) <= ROTATED_HEADING_RAD:
        return path, path.frame

    delta = theta - math.copysign(ROTATED_HEADING_RAD, theta)
    origin = path.point_global(anchor_x)
    new_frame = FrameTransform(_wrap(path.frame.rotation + delta), origin)

    # Resample at the old breakpoints plus subdivisions, carrying exact
    # first- and second-derivative data through the rotation.
    subdivided = []
    for a, b in zip(path._breaks[:-1], path._breaks[1:]):
        subdivided.extend(np.linspace(a, b, 5)[:-1])
    subdivided.append(path._breaks[-1])
    xs = np.asarray(subdivided, dtype=float)
    y, dy, d2y = path.eval(xs)

    ax, ay = anchor_x, path.value(anchor_x)
    cd, sd = math.cos(delta), math.sin(delta)
    den = cd + dy * sd
    xi = cd * (xs - ax) + sd * (y - ay)
    eta = -sd * (xs - ax) + cd * (y - ay)
    m_new = (-sd + dy * cd) / den
    c_new = d2y / den**3

    # Keep the maximal contiguous run around the anchor where the rotated
    # curve is still a steep-bounded function of the new abscissa.
    ok = (den > 0.15) & (np.abs(m_new) < math.tan(math.radians(80.0)))
    i_anchor = int(np.argmin(np.abs(xs - anchor_x)))
    if not ok[i_anchor]:
        raise DegenerateGeometry("anchor neighbourhood collapses under rotation")
    lo = i_anchor
    while lo > 0 and ok[lo - 1]:
        lo -= 1
    hi = i_anchor
    while hi < len(xs) - 1 and ok[hi + 1]:
        hi += 1
    if hi - lo < 3:
        raise DegenerateGeometry("too little geometry survives the rotation")

    nodes = xi[lo:hi + 1]
    if np.any(np.diff(nodes) <= 0):
        raise DegenerateGeometry("rotated abscissae are not strictly increasing")
    data = [[float(e), float(m), float(c)] for e, m, c in
            zip(eta[lo:hi + 1], m_new[lo:hi + 1], c_new[lo:hi + 1])]
    return _hermite_path(nodes, data, eta[lo:hi + 1], path.kind, new_frame), new_frame
