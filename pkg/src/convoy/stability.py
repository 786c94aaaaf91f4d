"""Lyapunov function, descent rate, and sampled region certification.

V(e) = 1/2 e^T M e with M = [[d, 0, 0], [0, d1, 1], [0, 1, 1]].  M is
positive definite iff d > 0 and d1 > 1 (the latter is stricter than d1 > 0:
the lower-right block needs det = d1 - 1 > 0).  Certification samples a
box of errors crossed with reference-heading and speed ranges, checks
Vdot < 0 everywhere off the origin, and reports the exponential-bound
constants alpha, beta, rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .control import EPS_SINGULAR, ErrorVector, Gains, closed_loop_rhs
from .errors import HeadingSingularity, InvalidRegion, InvalidWeights
from .references import ReferenceState


@dataclass(frozen=True)
class LyapunovWeights:
    delta: float = 2.0
    delta1: float = 3.0

    def matrix(self) -> np.ndarray:
        return np.array([
            [self.delta, 0.0, 0.0],
            [0.0, self.delta1, 1.0],
            [0.0, 1.0, 1.0],
        ])


@dataclass(frozen=True)
class StabilityRegion:
    e1_max: float
    e2_max: float
    e3_max: float
    x3s_max: float
    u_ref_range: tuple[float, float]

    def __post_init__(self):
        if min(self.e1_max, self.e2_max, self.e3_max, self.x3s_max) <= 0:
            raise InvalidRegion("region bounds must be positive")
        if self.x3s_max + self.e3_max >= math.pi / 2:
            raise InvalidRegion("x3s_max + e3_max must stay below 90 deg")
        lo, hi = self.u_ref_range
        if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
            raise InvalidRegion("bad reference speed range")


@dataclass(frozen=True)
class ExponentialBoundEstimate:
    alpha: float
    beta: float
    rho: float


@dataclass(frozen=True)
class CertificationResult:
    ok: bool
    bounds: ExponentialBoundEstimate | None
    counterexample: dict | None
    n_checked: int


def is_positive_definite(w: LyapunovWeights) -> tuple[bool, str | None]:
    """Check the leading-minor conditions; on failure name the violator."""
    checks = (("delta", w.delta), ("delta1", w.delta1), ("delta1 - 1", w.delta1 - 1.0))
    for name, val in checks:
        if not (math.isfinite(val) and val > 0):
            return False, f"{name} = {val:.6g} is not positive"
    return True, None


def lyapunov_value(e: ErrorVector, w: LyapunovWeights) -> float:
    ok, witness = is_positive_definite(w)
    if not ok:
        raise InvalidWeights(witness)
    ev = np.array([e.e1, e.e2, e.e3])
    return 0.5 * float(ev @ w.matrix() @ ev)


def lyapunov_rate(e: ErrorVector, ref: ReferenceState, gains: Gains,
                  w: LyapunovWeights, method: str = "gradient") -> float:
    """Vdot along the closed loop.

    "gradient" chains grad(V) = M e with the analytic error derivative and
    is authoritative; "expanded" evaluates the fully expanded expression
    (with sigma = lam3 tan(e3 + x3*), psi = u*/cos(e3 + x3*), a = lam1,
    b = lam2) as a cross-check.
    """
    if method == "gradient":
        rhs = np.array(closed_loop_rhs(e, ref, gains))
        ev = np.array([e.e1, e.e2, e.e3])
        return float((w.matrix() @ ev) @ rhs)
    if method != "expanded":
        raise ValueError(f"unknown method {method!r}")
    c = math.cos(e.e3 + ref.x3s)
    if abs(c) < EPS_SINGULAR:
        raise HeadingSingularity("cos(x3* + e3) below guard")
    sigma = gains.lambda3 * math.tan(e.e3 + ref.x3s)
    psi = ref.u_ref / c
    a, b = gains.lambda1, gains.lambda2
    d, d1 = w.delta, w.delta1
    e1, e2, e3 = e.e1, e.e2, e.e3
    return (
        -d * gains.lambda3 * e1 * e1
        - d1 * sigma * e1 * e2
        - sigma * e1 * e3
        + d1 * psi * e2 * math.sin(e3)
        + psi * e3 * math.sin(e3)
        - a * e2 * e2
        - b * e3 * e3
        - a * e2 * e3
        - b * e2 * e3
    )


def _vdot_batch(E: np.ndarray, x3s: np.ndarray, u_ref: np.ndarray,
                gains: Gains, w: LyapunovWeights) -> np.ndarray:
    """Vectorized gradient-chain Vdot for sample batches."""
    e1, e2, e3 = E[:, 0], E[:, 1], E[:, 2]
    c = np.cos(x3s + e3)
    de1 = -gains.lambda3 * e1
    de2 = -gains.lambda3 * e1 * np.tan(x3s + e3) + u_ref * np.sin(e3) / c
    de3 = -gains.lambda1 * e2 - gains.lambda2 * e3
    g1 = w.delta * e1
    g2 = w.delta1 * e2 + e3
    g3 = e2 + e3
    return g1 * de1 + g2 * de2 + g3 * de3


def certify_region(region: StabilityRegion, gains: Gains, w: LyapunovWeights,
                   n_samples: int = 100_000, seed: int = 0) -> CertificationResult:
    """Sample the region and certify Vdot < 0 away from the origin.

    Roughly half the budget goes to a regular grid (including axis zeros
    and corners), the rest to a Sobol fill.  Returns eigenvalue bounds
    alpha = lambda_min(M), beta = lambda_max(M) and the sampled decay
    rate rho = min(-Vdot / |e|^2), or the first counterexample found.
    """
    if n_samples < 1000:
        raise InvalidRegion("need at least 1e3 samples for a meaningful check")
    ok, witness = is_positive_definite(w)
    if not ok:
        raise InvalidWeights(witness)

    lows = np.array([-region.e1_max, -region.e2_max, -region.e3_max,
                     -region.x3s_max, region.u_ref_range[0]])
    highs = np.array([region.e1_max, region.e2_max, region.e3_max,
                      region.x3s_max, region.u_ref_range[1]])

    per_axis = max(3, int(round((n_samples / 2) ** 0.2)))
    if per_axis % 2 == 0:
        per_axis += 1  # odd count keeps 0 on the error/heading axes
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(lows, highs)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 5)

    n_fill = max(0, n_samples - grid.shape[0])
    if n_fill:
        sob = qmc.Sobol(d=5, scramble=True, seed=seed)
        raw = sob.random_base2(int(math.ceil(math.log2(max(n_fill, 2)))))[:n_fill]
        fill = qmc.scale(raw, lows, highs)
    else:
        fill = np.empty((0, 5))
    samples = np.vstack([grid, fill])

    E = samples[:, :3]
    x3s = samples[:, 3]
    u_ref = samples[:, 4]
    norm2 = np.einsum("ij,ij->i", E, E)
    nonzero = norm2 > 1e-18

    vdot = _vdot_batch(E[nonzero], x3s[nonzero], u_ref[nonzero], gains, w)
    n2 = norm2[nonzero]
    bad = np.nonzero(vdot >= 0.0)[0]
    if bad.size:
        i = int(bad[np.argmax(vdot[bad])])
        ce = {
            "e": E[nonzero][i].tolist(),
            "x3s": float(x3s[nonzero][i]),
            "u_ref": float(u_ref[nonzero][i]),
            "vdot": float(vdot[i]),
        }
        return CertificationResult(False, None, ce, int(n2.size))

    eigs = np.linalg.eigvalsh(w.matrix())
    rho = float(np.min(-vdot / n2))
    bounds = ExponentialBoundEstimate(
        alpha=0.5 * float(eigs[0]), beta=0.5 * float(eigs[-1]), rho=rho
    )
    return CertificationResult(True, bounds, None, int(n2.size))
