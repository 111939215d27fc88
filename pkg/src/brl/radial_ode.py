"""Adaptive integration of the radial problem as a coupled second-order system.

State is (u, u', v, v') with v = Lap u, so that

    u'' + (N-1)/r u' = v,
    v'' + (N-1)/r v' = -u^(-p).

Integration starts from a Taylor series at the origin (the 1/r terms are
never evaluated at r = 0) and stops at r_max, at extinction (u reaches a
small floor, after which the solution is certainly non-entire), or on an
overflow/step-size failure.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError
from .params import Parameters, require_admissible

R0_DEFAULT = 1e-3
R0_MAX = 1e-3
U_FLOOR_FRACTION = 1e-8
OVERFLOW_LIMIT = 1e290


@dataclass(frozen=True)
class IVP:
    a: float      # u(0)
    b: float      # Lap u(0)
    params: Parameters

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError(f"a={self.a} must be > 0")
        require_admissible(self.params)


class Termination(enum.Enum):
    ReachedRmax = "reached_rmax"
    Extinct = "extinct"
    Overflow = "overflow"
    StepFailure = "step_failure"


class ExtinctReason(enum.Enum):
    UFloor = "u_floor"
    # Lap u went negative.  Lap u is decreasing along every trajectory and
    # has a nonnegative limit for entire solutions, so a negative value
    # certifies extinction long before u itself touches down (and before
    # u^(-p) stiffens enough to kill the step size).
    VNegative = "v_negative"


@dataclass(frozen=True)
class Trajectory:
    ivp: IVP
    r: np.ndarray        # strictly increasing sample radii
    u: np.ndarray
    du: np.ndarray
    v: np.ndarray        # Lap u
    dv: np.ndarray
    termination: Termination
    r_end: float         # extinction/overflow/failure radius, or r_max
    extinct_reason: Optional[ExtinctReason] = None

    def state(self, i: int) -> tuple[float, float, float, float, float]:
        return (self.r[i], self.u[i], self.du[i], self.v[i], self.dv[i])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("r,u,du,v,dv\n")
        for i in range(len(self.r)):
            buf.write(
                ",".join(
                    format(x, ".17g")
                    for x in (self.r[i], self.u[i], self.du[i], self.v[i], self.dv[i])
                )
            )
            buf.write("\n")
        return buf.getvalue()


def taylor_start(ivp: IVP, r0: float = R0_DEFAULT) -> np.ndarray:
    """Series state (u, u', v, v') at the handoff radius r0.

    u(r) = a + (b/2N) r^2 - (a^-p / 8N(N+2)) r^4 + O(r^6),
    v(r) = b - (a^-p / 2N) r^2 + O(r^4).
    """
    if not (0.0 < r0 <= R0_MAX):
        raise DomainError(f"r0={r0} outside (0, {R0_MAX}]")
    N = ivp.params.N
    a, b, p = ivp.a, ivp.b, ivp.params.p
    f = a ** (-p)
    c2 = b / (2.0 * N)
    c4 = -f / (8.0 * N * (N + 2.0))
    u = a + c2 * r0 ** 2 + c4 * r0 ** 4
    du = 2.0 * c2 * r0 + 4.0 * c4 * r0 ** 3
    v = b - f / (2.0 * N) * r0 ** 2
    dv = -f / N * r0
    return np.array([u, du, v, dv])


def _rhs(N: int, p: float):
    def rhs(r, y):
        u, du, v, dv = y
        uu = max(u, 1e-300)
        return (du, v - (N - 1.0) / r * du, dv, -uu ** (-p) - (N - 1.0) / r * dv)

    return rhs


def integrate(
    ivp: IVP,
    r_max: float,
    tol: float = 1e-10,
    r0: float = R0_DEFAULT,
    method: str = "DOP853",
    max_samples: Optional[int] = None,
    max_step: float = np.inf,
) -> Trajectory:
    """Integrate from the Taylor handoff at r0 out to r_max."""
    if not (1e-12 <= tol <= 1e-4):
        raise DomainError(f"tol={tol} outside [1e-12, 1e-4]")
    if r_max <= r0:
        raise DomainError(f"r_max={r_max} must exceed r0={r0}")
    N, p = ivp.params.N, ivp.params.p
    u_floor = U_FLOOR_FRACTION * ivp.a
    y0 = taylor_start(ivp, r0)

    def ufloor_event(r, y):
        return y[0] - u_floor

    ufloor_event.terminal = True
    ufloor_event.direction = -1

    def vneg_event(r, y):
        return y[2]

    vneg_event.terminal = True
    vneg_event.direction = -1

    def overflow_event(r, y):
        return OVERFLOW_LIMIT - float(np.max(np.abs(y)))

    overflow_event.terminal = True
    overflow_event.direction = -1

    if y0[2] <= 0.0:
        # Lap u already nonpositive at the handoff: certainly non-entire.
        return Trajectory(
            ivp=ivp, r=np.array([r0]), u=y0[:1], du=y0[1:2], v=y0[2:3],
            dv=y0[3:4], termination=Termination.Extinct, r_end=r0,
            extinct_reason=ExtinctReason.VNegative,
        )

    sol = solve_ivp(
        _rhs(N, p),
        (r0, r_max),
        y0,
        method=method,
        rtol=tol,
        atol=tol * max(1.0, ivp.a),
        events=(ufloor_event, vneg_event, overflow_event),
        dense_output=False,
        max_step=max_step,
    )

    r = sol.t
    u, du, v, dv = sol.y
    extinct_reason = None
    if sol.status == 1:
        if len(sol.t_events[0]) > 0:
            termination, r_end = Termination.Extinct, float(sol.t_events[0][0])
            extinct_reason = ExtinctReason.UFloor
        elif len(sol.t_events[1]) > 0:
            termination, r_end = Termination.Extinct, float(sol.t_events[1][0])
            extinct_reason = ExtinctReason.VNegative
        else:
            termination, r_end = Termination.Overflow, float(sol.t_events[2][0])
    elif sol.status == 0:
        termination, r_end = Termination.ReachedRmax, r_max
    else:
        termination, r_end = Termination.StepFailure, float(r[-1]) if len(r) else r0

    if max_samples is not None and len(r) > max_samples:
        idx = np.unique(
            np.linspace(0, len(r) - 1, max_samples).round().astype(int)
        )
        r, u, du, v, dv = r[idx], u[idx], du[idx], v[idx], dv[idx]

    return Trajectory(
        ivp=ivp, r=r, u=u, du=du, v=v, dv=dv,
        termination=termination, r_end=r_end, extinct_reason=extinct_reason,
    )


def biharmonic_of_power(gamma: float, N: int) -> float:
    """Coefficient c with Lap^2(r^gamma) = c r^(gamma-4)."""
    if N < 3:
        raise DomainError(f"N={N} must be >= 3")
    return gamma * (gamma - 2.0) * (gamma + N - 2.0) * (gamma + N - 4.0)


def singular_state(params: Parameters, r: float) -> np.ndarray:
    """Exact state of the power solution U_s = L r^alpha at radius r."""
    require_admissible(params)
    from .params import alpha_of, L_of

    a = alpha_of(params.p)
    L = L_of(params.N, params.p)
    N = params.N
    u = L * r ** a
    du = L * a * r ** (a - 1.0)
    # Lap(r^a) = a(a + N - 2) r^(a-2)
    v = L * a * (a + N - 2.0) * r ** (a - 2.0)
    dv = L * a * (a + N - 2.0) * (a - 2.0) * r ** (a - 3.0)
    return np.array([u, du, v, dv])


def integrate_from_state(
    params: Parameters,
    r_start: float,
    y0: np.ndarray,
    r_max: float,
    tol: float = 1e-10,
    method: str = "DOP853",
) -> Trajectory:
    """Integrate from an arbitrary state at r_start > 0 (no Taylor handoff)."""
    if not (1e-12 <= tol <= 1e-4):
        raise DomainError(f"tol={tol} outside [1e-12, 1e-4]")
    if r_start <= 0 or r_max <= r_start:
        raise DomainError("need 0 < r_start < r_max")
    require_admissible(params)
    N, p = params.N, params.p
    u_floor = U_FLOOR_FRACTION * float(y0[0])

    def extinct_event(r, y):
        return y[0] - u_floor

    extinct_event.terminal = True
    extinct_event.direction = -1

    sol = solve_ivp(
        _rhs(N, p), (r_start, r_max), np.asarray(y0, dtype=float),
        method=method, rtol=tol, atol=tol, events=(extinct_event,),
    )
    r = sol.t
    u, du, v, dv = sol.y
    if sol.status == 1:
        termination, r_end = Termination.Extinct, float(sol.t_events[0][0])
    elif sol.status == 0:
        termination, r_end = Termination.ReachedRmax, r_max
    else:
        termination, r_end = Termination.StepFailure, float(r[-1])
    ivp = IVP(a=float(y0[0]), b=float(y0[2]), params=params)
    return Trajectory(
        ivp=ivp, r=r, u=u, du=du, v=v, dv=dv,
        termination=termination, r_end=r_end,
    )
