"""Trajectory transforms and decay-rate estimation.

The two coordinate systems used to inspect a trajectory near infinity:

* Kelvin profile: (s, w) with s = 1/r and w = r^(-alpha) u(r) - L, mapping
  behavior at infinity to behavior at s = 0.
* Log-radius profile: (t, m) with t = ln r and m = e^(-alpha t) u(e^t) - L,
  in which the radial equation becomes autonomous:

      T0(d/dt) m + g(m) = 0,

  where T0 is the mean-mode characteristic quartic and
  g(m) = (m+L)^(-p) - L^(-p) + p L^(-(p+1)) m is the superlinear remainder.

Decay exponents are fitted by ordinary least squares on log|value| against
log x.  Oscillatory profiles (complex characteristic pair ell +/- i q) are
fitted on an envelope: either local maxima of |value| or, when too few
extrema fit in the usable window, the phase-quadrature envelope
sqrt(m^2 + ((m' - ell m)/q)^2), which is exactly A e^(ell t) for a pure
damped oscillation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .charpoly import mean_quartic, mean_roots_closed
from .errors import (
    DegenerateFit,
    InsufficientSamples,
    InvalidTrajectory,
)
from .params import (
    Beta34Branch,
    DerivedConstants,
    Parameters,
    L_of,
    alpha_of,
    classify_beta_branch,
    require_admissible,
)
from .radial_ode import Termination, Trajectory

FLOOR = 1e-14


@dataclass(frozen=True)
class RateFit:
    exponent: float
    log_amplitude: float
    rms_residual: float
    window: tuple[float, float]
    n_points: int
    oscillatory: bool

    def __post_init__(self):
        if not self.window[0] < self.window[1]:
            raise ValueError(f"window {self.window} is not increasing")
        if self.n_points < 8:
            raise ValueError(f"n_points={self.n_points} < 8")
        if not math.isfinite(self.rms_residual):
            raise ValueError("rms_residual must be finite")

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "log_amplitude": self.log_amplitude,
            "rms_residual": self.rms_residual,
            "window": list(self.window),
            "n_points": self.n_points,
            "oscillatory": self.oscillatory,
        }


@dataclass(frozen=True)
class NonminimalDiagnostics:
    d_from_laplacian: float
    d_from_quadratic: float
    kappa_predicted: float
    log_correction: bool
    kappa_fitted: RateFit

    def to_dict(self) -> dict:
        return {
            "d_from_laplacian": self.d_from_laplacian,
            "d_from_quadratic": self.d_from_quadratic,
            "kappa_predicted": self.kappa_predicted,
            "log_correction": self.log_correction,
            "kappa_fitted": self.kappa_fitted.to_dict(),
        }


def _check_positive_survivor(traj: Trajectory) -> None:
    if traj.termination not in (Termination.ReachedRmax, Termination.Overflow):
        raise InvalidTrajectory(
            f"trajectory terminated {traj.termination.value}; need a survivor"
        )
    if not np.all(traj.u > 0.0):
        raise InvalidTrajectory("trajectory has non-positive u samples")


def kelvin_profile(traj: Trajectory,
                   dc: DerivedConstants) -> tuple[np.ndarray, np.ndarray]:
    """(s, w) = (1/r, r^(-alpha) u - L), ordered by increasing s."""
    _check_positive_survivor(traj)
    s = 1.0 / traj.r
    w = traj.u * traj.r ** (-dc.alpha) - dc.L
    order = np.argsort(s)
    return s[order], w[order]


def ef_transform(traj: Trajectory,
                 alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """(t, m) = (ln r, e^(-alpha t) u - L) over the trajectory range."""
    _check_positive_survivor(traj)
    if np.any(traj.r <= 0.0):
        raise InvalidTrajectory("trajectory has non-positive radii")
    t = np.log(traj.r)
    L = L_of(traj.ivp.params.N, traj.ivp.params.p)
    m = traj.u * traj.r ** (-alpha) - L
    return t, m


def ef_derivative(traj: Trajectory, alpha: float) -> np.ndarray:
    """dm/dt at the trajectory samples: e^(-alpha t)(r u' - alpha u)."""
    return traj.r ** (-alpha) * (traj.r * traj.du - alpha * traj.u)


def ef_residual(t: Sequence[float], m: Sequence[float], params: Parameters,
                window: Optional[tuple[float, float]] = None,
                n_grid: int = 65) -> float:
    """RMS residual of the autonomous equation, relative to its largest term.

    The samples are resampled onto a uniform grid by cubic interpolation;
    derivatives of orders 1-4 are taken by second-order central differences.
    """
    require_admissible(params)
    t = np.asarray(t, dtype=float)
    m = np.asarray(m, dtype=float)
    if len(t) < 9:
        raise InsufficientSamples(f"need >= 9 samples, got {len(t)}")
    if window is None:
        window = (float(t[0]), float(t[-1]))
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise InsufficientSamples(f"empty window {window}")

    cs = CubicSpline(t, m)
    tg = np.linspace(t_lo, t_hi, n_grid)
    h = tg[1] - tg[0]
    mg = cs(tg)
    i = np.arange(2, n_grid - 2)
    d1 = (mg[i + 1] - mg[i - 1]) / (2.0 * h)
    d2 = (mg[i + 1] - 2.0 * mg[i] + mg[i - 1]) / h ** 2
    d3 = (mg[i + 2] - 2.0 * mg[i + 1] + 2.0 * mg[i - 1] - mg[i - 2]) / (
        2.0 * h ** 3)
    d4 = (mg[i + 2] - 4.0 * mg[i + 1] + 6.0 * mg[i] - 4.0 * mg[i - 1]
          + mg[i - 2]) / h ** 4

    L = L_of(params.N, params.p)
    p = params.p
    _, c3, c2, c1, c0 = mean_quartic(params).coeffs()
    g = (mg[i] + L) ** (-p) - L ** (-p) + p * L ** (-(p + 1.0)) * mg[i]
    terms = (d4, c3 * d3, c2 * d2, c1 * d1, c0 * mg[i], g)
    residual = sum(terms)

    def rms(x):
        return float(np.sqrt(np.mean(np.square(x))))

    denom = max(rms(x) for x in terms)
    if denom == 0.0:
        return 0.0
    return rms(residual) / denom


def _local_maxima(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keep = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    idx = np.nonzero(keep)[0] + 1
    return x[idx], y[idx]


def fit_decay_exponent(x: Sequence[float], value: Sequence[float],
                       window: Optional[tuple[float, float]] = None,
                       envelope: bool = False) -> RateFit:
    """OLS fit of log|value| against log x within the window.

    With envelope=True the fit uses local maxima of |value| only (at least
    4 are required) and the result is flagged oscillatory.
    """
    x = np.asarray(x, dtype=float)
    value = np.asarray(value, dtype=float)
    if window is None:
        window = (float(np.max(x)) / 10.0, float(np.max(x)))
    x_lo, x_hi = window
    mask = (x >= x_lo) & (x <= x_hi)
    x, value = x[mask], value[mask]
    if np.all(np.abs(value) < FLOOR):
        raise DegenerateFit(
            f"all values below {FLOOR:g} in window ({x_lo:g}, {x_hi:g})"
        )

    n_window = len(x)
    oscillatory = False
    absv = np.abs(value)
    if envelope:
        sign_changes = np.count_nonzero(np.diff(np.sign(value)) != 0)
        oscillatory = sign_changes > 0
        x, absv = _local_maxima(x, absv)
        if len(x) < 4:
            raise DegenerateFit(
                f"envelope fit needs >= 4 extrema, found {len(x)}"
            )
    keep = absv > FLOOR
    x, absv = x[keep], absv[keep]
    if len(x) < 8 and not envelope:
        raise InsufficientSamples(
            f"need >= 8 nonzero samples in window, got {len(x)}"
        )
    if envelope and len(x) < 4:
        raise DegenerateFit(f"envelope fit needs >= 4 extrema, found {len(x)}")

    lx = np.log(x)
    ly = np.log(absv)
    A = np.vstack([lx, np.ones(len(lx))]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = ly - (slope * lx + intercept)
    return RateFit(
        exponent=slope,
        log_amplitude=intercept,
        rms_residual=float(np.sqrt(np.mean(resid ** 2))),
        window=(float(x_lo), float(x_hi)),
        n_points=n_window if envelope else len(x),
        oscillatory=oscillatory,
    )


def predicted_minimal_remainder(params: Parameters,
                                dc: DerivedConstants) -> tuple[float, str]:
    """Sharp remainder exponent of u - L r^alpha for the minimal solution.

    The remainder decays at the slowest stable characteristic rate of the
    autonomous equation: Re(beta_3) in the log-radius variable, hence
    Re(beta_3) + alpha as an r-power.  In the complex branch this equals
    2 - N/2 exactly.
    """
    require_admissible(params)
    branch = classify_beta_branch(params).beta34_branch
    beta3 = mean_roots_closed(params).roots[2]
    tag = ("Complex" if branch == Beta34Branch.ComplexPair else "Real")
    return beta3.real + dc.alpha, tag


def minimal_remainder_fit(traj: Trajectory,
                          params: Parameters) -> tuple[RateFit, float]:
    """Fit the remainder decay of a minimal-solution proxy.

    Returns (fit in the log-radius variable, remainder exponent as an
    r-power, i.e. fitted slope + alpha).  The fit window ends where the
    profile is smallest: beyond that point the residual threshold error
    re-grows along the unstable direction and contaminates the slope.
    """
    require_admissible(params)
    alpha = alpha_of(params.p)
    t, m = ef_transform(traj, alpha)
    branch = classify_beta_branch(params).beta34_branch
    sub = t > 1.0
    if np.count_nonzero(sub) < 8:
        raise InsufficientSamples("trajectory too short for a rate fit")

    if branch == Beta34Branch.ComplexPair:
        beta3 = mean_roots_closed(params).roots[2]
        ell, q = beta3.real, abs(beta3.imag)
        mp = ef_derivative(traj, alpha)
        env = np.sqrt(m ** 2 + ((mp - ell * m) / q) ** 2)
        t_hi = float(t[sub][np.argmin(env[sub])])
        fit = fit_decay_exponent(traj.r, env, window=(math.exp(t_hi - 3.0),
                                                      math.exp(t_hi)))
        fit = RateFit(exponent=fit.exponent, log_amplitude=fit.log_amplitude,
                      rms_residual=fit.rms_residual, window=fit.window,
                      n_points=fit.n_points, oscillatory=True)
    else:
        t_hi = float(t[sub][np.argmin(np.abs(m[sub]))]) - 0.5
        fit = fit_decay_exponent(traj.r, m, window=(math.exp(t_hi - 2.5),
                                                    math.exp(t_hi)))
    return fit, fit.exponent + alpha


def kappa_predicted_of(params: Parameters) -> float:
    return min(2.0, params.N - 2.0, 2.0 * (params.p - 1.0))


def has_log_correction(params: Parameters, tol: float = 1e-12) -> bool:
    """True when the quadratic-growth remainder rate carries a log factor."""
    if abs(params.p - params.N / 2.0) <= tol:
        return True
    return abs(min(params.N - 2.0, 2.0 * (params.p - 1.0)) - 2.0) <= tol


def nonminimal_diagnostics(traj: Trajectory,
                           params: Parameters) -> NonminimalDiagnostics:
    """Limit diagnostics for a quadratic-growth (supercritical) trajectory."""
    _check_positive_survivor(traj)
    require_admissible(params)
    N = params.N
    d_lap = float(traj.v[-1])
    d_quad = float(2.0 * N * traj.u[-1] / traj.r[-1] ** 2)
    resid = np.abs(traj.u / traj.r ** 2 - d_lap / (2.0 * N))
    fit = fit_decay_exponent(traj.r, resid)
    return NonminimalDiagnostics(
        d_from_laplacian=d_lap,
        d_from_quadratic=d_quad,
        kappa_predicted=kappa_predicted_of(params),
        log_correction=has_log_correction(params),
        kappa_fitted=fit,
    )


def d_monotonicity_scan(a: float, params: Parameters,
                        b_values: Sequence[float],
                        r_max: float = 1e3,
                        tol: float = 1e-10) -> list[tuple[float, float]]:
    """(b, limit of the Laplacian) pairs for a list of supercritical b."""
    from .radial_ode import IVP, integrate

    out = []
    for b in b_values:
        traj = integrate(IVP(a=a, b=b, params=params), r_max=r_max, tol=tol)
        _check_positive_survivor(traj)
        out.append((float(b), float(traj.v[-1])))
    return out


def samples_to_csv(x: np.ndarray, value: np.ndarray,
                   header: str = "x,value") -> str:
    lines = [header]
    for xi, vi in zip(x, value):
        lines.append(f"{xi:.17g},{vi:.17g}")
    return "\n".join(lines) + "\n"
