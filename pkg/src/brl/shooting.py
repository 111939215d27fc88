"""Critical-threshold search in b for the radial problem.

For each starting height a there is a critical Laplacian value b~(a):
trajectories with b below it die at finite radius, trajectories above it
survive with quadratic growth, and the threshold trajectory itself follows
the power profile L r^alpha.  The search brackets the threshold by doubling,
bisects on the trajectory classification, and then removes the dominant
finite-horizon bias by Richardson extrapolation across two horizons.

The bias model: near the threshold the deviation from the power profile
grows like r^beta1, where beta1 > 0 is the unstable characteristic exponent
of the mean-mode quartic.  A trajectory with b slightly below b~ therefore
dies at radius ~ (b~ - b)^(-1/beta1), so the apparent threshold at horizon H
sits below the true one by about C H^(-beta1).  Measuring it at H and 2H and
eliminating C gives an estimate whose residual bias is O(H^(-2 beta1)).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .charpoly import mean_roots_closed
from .errors import (
    BracketFailure,
    NotAboveCritical,
    UnclassifiableTrajectory,
)
from .params import Parameters, alpha_of, L_of, require_admissible
from .radial_ode import IVP, Termination, Trajectory, integrate

B_CAP = 1e12


@dataclass(frozen=True)
class ShootingConfig:
    r_max: float = 500.0
    tol: float = 1e-10
    rel_tol: float = 1e-8
    growth: float = 2.0

    def __post_init__(self):
        if self.r_max < 50.0:
            raise ValueError(f"r_max={self.r_max} must be >= 50")
        if self.rel_tol < 100.0 * self.tol:
            raise ValueError(
                f"rel_tol={self.rel_tol} must be >= 100*tol={100 * self.tol}"
            )
        if self.growth <= 1.0:
            raise ValueError(f"growth={self.growth} must exceed 1")


class Outcome(enum.Enum):
    Extinct = "extinct"
    Survives = "survives"


@dataclass(frozen=True)
class ShootingResult:
    a: float
    params: Parameters
    b_lo: float           # final bracket: dies below ...
    b_hi: float           # ... survives above (classified at horizon 2*r_max)
    b_tilde_est: float    # two-horizon extrapolation, >= b_hi
    minimal_traj: Trajectory
    r_max: float
    tol: float
    rel_tol: float
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "a": self.a,
                "N": self.params.N,
                "p": self.params.p,
                "b_lo": self.b_lo,
                "b_hi": self.b_hi,
                "b_tilde_est": self.b_tilde_est,
                "r_max": self.r_max,
                "tol": self.tol,
                "diagnostics": self.diagnostics,
            }
        )


def b_seed(a: float, params: Parameters) -> float:
    """Scaling-informed initial guess: equivariant under the exact symmetry
    a -> lam^(-alpha) a, b -> lam^(2-alpha) b."""
    alpha = alpha_of(params.p)
    return a ** ((alpha - 2.0) / alpha)


def classify(traj: Trajectory) -> Outcome:
    """Extinct / Survives verdict for bisection.

    Overflow with u positive throughout counts as Survives (quadratic-growth
    side); a step-size failure is unclassifiable and aborts the search.
    """
    t = traj.termination
    if t == Termination.Extinct:
        return Outcome.Extinct
    if t == Termination.ReachedRmax and traj.u[-1] > 0.0:
        return Outcome.Survives
    if t == Termination.Overflow and np.all(traj.u > 0.0):
        return Outcome.Survives
    raise UnclassifiableTrajectory(
        f"termination={t.value} at r={traj.r_end:.6g} cannot be classified"
    )


def _classify_b(a: float, b: float, params: Parameters, r_max: float,
                tol: float) -> Outcome:
    traj = integrate(IVP(a=a, b=b, params=params), r_max=r_max, tol=tol)
    return classify(traj)


def _expand_bracket(a, params, cfg) -> tuple[float, float]:
    """Find b_lo (Extinct) < b_hi (Survives) at horizon cfg.r_max by doubling."""
    seed = b_seed(a, params)

    b_hi = seed
    step = abs(seed)
    while _classify_b(a, b_hi, params, cfg.r_max, cfg.tol) == Outcome.Extinct:
        b_hi += step
        step *= cfg.growth
        if b_hi > B_CAP:
            raise BracketFailure(
                f"no surviving trajectory found below b={B_CAP:g}"
            )

    b_lo = min(seed, b_hi - abs(seed))
    step = abs(seed)
    while _classify_b(a, b_lo, params, cfg.r_max, cfg.tol) == Outcome.Survives:
        b_lo -= step
        step *= cfg.growth
        if b_lo < -B_CAP:
            raise BracketFailure(
                f"no extinct trajectory found above b={-B_CAP:g}"
            )
    return b_lo, b_hi


def _bisect(a, params, b_lo, b_hi, r_max, tol, rel_tol) -> tuple[float, float]:
    """Shrink an (Extinct, Survives) bracket at a fixed horizon."""
    while (b_hi - b_lo) / max(abs(b_hi), 1.0) > rel_tol:
        mid = 0.5 * (b_lo + b_hi)
        if mid == b_lo or mid == b_hi:
            break
        if _classify_b(a, mid, params, r_max, tol) == Outcome.Extinct:
            b_lo = mid
        else:
            b_hi = mid
    return b_lo, b_hi


def find_b_tilde(a: float, params: Parameters,
                 cfg: Optional[ShootingConfig] = None) -> ShootingResult:
    """Locate the critical b~(a) and return a minimal-solution proxy.

    The bracket is bisected at horizons r_max and 2*r_max; the two apparent
    thresholds are extrapolated with the known bias exponent beta1, and the
    proxy trajectory is integrated at the extrapolated b.
    """
    if a <= 0:
        raise ValueError(f"a={a} must be > 0")
    require_admissible(params)
    if cfg is None:
        cfg = ShootingConfig()

    b_lo0, b_hi0 = _expand_bracket(a, params, cfg)

    lo1, hi1 = _bisect(a, params, b_lo0, b_hi0, cfg.r_max, cfg.tol, cfg.rel_tol)
    thr1 = 0.5 * (lo1 + hi1)

    # The horizon-H extinct side stays extinct at 2H; the original doubling
    # survivor is far above threshold, so it survives at 2H as well.
    hi_top = b_hi0
    if _classify_b(a, hi_top, params, 2.0 * cfg.r_max, cfg.tol) == Outcome.Extinct:
        hi_top = hi1 + (b_hi0 - lo1)
        while _classify_b(a, hi_top, params, 2.0 * cfg.r_max,
                          cfg.tol) == Outcome.Extinct:
            hi_top = thr1 + cfg.growth * (hi_top - thr1)
            if hi_top > B_CAP:
                raise BracketFailure(
                    f"no surviving trajectory found below b={B_CAP:g} "
                    f"at the doubled horizon"
                )
    lo2, hi2 = _bisect(a, params, lo1, hi_top, 2.0 * cfg.r_max, cfg.tol,
                       cfg.rel_tol)
    thr2 = 0.5 * (lo2 + hi2)

    beta1 = mean_roots_closed(params).roots[0].real
    x = 2.0 ** (-beta1)
    b_tilde = (thr2 - x * thr1) / (1.0 - x)
    b_tilde = max(b_tilde, hi2)

    traj = integrate(IVP(a=a, b=b_tilde, params=params), r_max=cfg.r_max,
                     tol=cfg.tol)
    if classify(traj) != Outcome.Survives:
        # Extrapolation overshot into territory the integrator resolves as
        # extinct; fall back to the certified survivor endpoint.
        b_tilde = hi2
        traj = integrate(IVP(a=a, b=b_tilde, params=params), r_max=cfg.r_max,
                         tol=cfg.tol)

    alpha = alpha_of(params.p)
    L = L_of(params.N, params.p)
    ratio = traj.u[-1] * traj.r[-1] ** (-alpha) / L
    diagnostics = {
        "ratio_at_rmax": float(ratio),
        "v_at_rmax": float(traj.v[-1]),
        "threshold_at_rmax": thr1,
        "threshold_at_2rmax": thr2,
        "bias_exponent": beta1,
    }
    return ShootingResult(
        a=a, params=params, b_lo=lo2, b_hi=hi2, b_tilde_est=b_tilde,
        minimal_traj=traj, r_max=cfg.r_max, tol=cfg.tol, rel_tol=cfg.rel_tol,
        diagnostics=diagnostics,
    )


def nonminimal_solution(a: float, b: float, params: Parameters,
                        cfg: Optional[ShootingConfig] = None) -> Trajectory:
    """Integrate a supercritical trajectory (caller guarantees b > b~(a))."""
    if a <= 0:
        raise ValueError(f"a={a} must be > 0")
    require_admissible(params)
    if cfg is None:
        cfg = ShootingConfig()
    traj = integrate(IVP(a=a, b=b, params=params), r_max=cfg.r_max, tol=cfg.tol)
    if classify(traj) == Outcome.Extinct:
        raise NotAboveCritical(
            f"b={b:.17g} went extinct at r={traj.r_end:.6g}; "
            f"not above the critical value within numeric resolution"
        )
    return traj
