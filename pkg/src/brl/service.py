"""Command layer shared by the HTTP API and the CLI.

Each command takes a validated pydantic request, runs the corresponding
library routines, and returns a RunReport with a stable schema
{command, inputs, outputs, wall_time_ms, version}.  The CLI calls these
functions in-process; the FastAPI app exposes them over HTTP.
"""

from __future__ import annotations

import math
import time
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from . import asymptotics, charpoly, radial_ode, shooting
from .charpoly import Family
from .errors import DomainError, NotAboveCritical
from .params import (
    Parameters,
    classify_beta_branch,
    derive_constants,
)

VERSION = "1.0.0"

#: Engineering tolerance for fitted-vs-predicted exponents; widened when the
#: predicted rate carries a logarithmic factor.
RATE_TOL = 0.3
RATE_TOL_LOG = 0.5


class ConstantsRequest(BaseModel):
    N: int
    p: float


class RootsRequest(BaseModel):
    N: int
    p: Optional[float] = None     # required for mode/mean families
    k_max: int = 0
    family: Literal["mode", "mean", "nm-mode", "nm-mean", "nm-tilde"] = "mode"
    i: int = 1                    # mode index for the non-minimal families


class VerifyClaimsRequest(BaseModel):
    N: int
    p: float
    k_max: int = Field(default=50, ge=1)


class ShootRequest(BaseModel):
    N: int
    p: float
    a: float = 1.0
    r_max: float = 500.0
    tol: float = 1e-10
    rel_tol: float = 1e-8
    emit_csv: bool = False


class RatesRequest(BaseModel):
    N: int
    p: float
    a: float = 1.0
    mode: Literal["minimal", "nonminimal"] = "minimal"
    b_mult: float = 2.0           # multiple of b~ for the nonminimal mode
    r_max: float = 500.0
    tol: float = 1e-10
    emit_series: bool = False


class RunReport(BaseModel):
    command: str
    inputs: dict
    outputs: dict
    wall_time_ms: int
    version: str = VERSION


def _report(command: str, inputs: dict, outputs: dict, t0: float) -> RunReport:
    return RunReport(
        command=command,
        inputs=inputs,
        outputs=outputs,
        wall_time_ms=int(1000.0 * (time.monotonic() - t0)),
    )


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def run_constants(req: ConstantsRequest) -> RunReport:
    t0 = time.monotonic()
    params = Parameters(req.N, req.p)
    dc = derive_constants(params)
    regime = classify_beta_branch(params)
    p_star = dc.p_star
    if p_star is not None and math.isinf(p_star):
        p_star = "inf"  # valid-JSON stand-in for the unbounded N=5 interval
    outputs = {
        "alpha": dc.alpha,
        "L": dc.L,
        "p_star": p_star,
        "p_threshold": dc.p_threshold,
        "p_c": dc.p_c,
        "p3": list(dc.p3) if dc.p3 is not None else None,
        "theorem_branch": regime.theorem_branch.value,
        "beta34_branch": regime.beta34_branch.value,
        "ell": regime.ell,
        "q": regime.q,
    }
    return _report("constants", req.model_dump(), outputs, t0)


def _root_row(closed: charpoly.RootSet, quartic: charpoly.Quartic) -> dict:
    oracle = charpoly.solve_quartic(quartic, degenerate_ok=True)
    deviation = charpoly.match_roots(closed.roots, oracle.roots)
    return {
        "index": closed.index,
        "rho": closed.rho,
        "closed": [_complex_pair(z) for z in closed.roots],
        "oracle": [_complex_pair(z) for z in oracle.roots],
        "max_deviation": deviation,
        "degenerate": closed.degenerate or oracle.degenerate,
    }


def run_roots(req: RootsRequest) -> RunReport:
    t0 = time.monotonic()
    family = Family(req.family)
    rows = []
    if family in (Family.Mode, Family.Mean):
        if req.p is None:
            raise DomainError("p is required for the mode/mean families")
        params = Parameters(req.N, req.p)
        k_hi = 0 if family == Family.Mean else req.k_max
        for k in range(k_hi + 1):
            rows.append(_root_row(
                charpoly.mode_roots_closed(params, k),
                charpoly.mode_quartic(params, k),
            ))
    else:
        rows.append(_root_row(
            charpoly.nonminimal_roots_closed(req.N, req.i, family),
            charpoly.nonminimal_quartic(req.N, req.i, family),
        ))
    outputs = {
        "family": family.value,
        "rows": rows,
        "max_deviation": max(r["max_deviation"] for r in rows),
    }
    return _report("roots", req.model_dump(), outputs, t0)


def run_verify_claims(req: VerifyClaimsRequest) -> RunReport:
    t0 = time.monotonic()
    params = Parameters(req.N, req.p)
    report = charpoly.verify_claims(params, req.k_max)
    regime = classify_beta_branch(params)
    outputs = {
        "all_passed": report.all_passed,
        "worst_margin": report.worst_margin,
        "theorem_branch": regime.theorem_branch.value,
        "beta34_branch": regime.beta34_branch.value,
        "checks": [
            {
                "claim": c.claim,
                "description": c.description,
                "passed": c.passed,
                "margin": c.margin,
            }
            for c in report.checks
        ],
    }
    return _report("verify-claims", req.model_dump(), outputs, t0)


def run_shoot(req: ShootRequest) -> RunReport:
    t0 = time.monotonic()
    params = Parameters(req.N, req.p)
    cfg = shooting.ShootingConfig(r_max=req.r_max, tol=req.tol,
                                  rel_tol=req.rel_tol)
    result = shooting.find_b_tilde(req.a, params, cfg)
    outputs = {
        "a": result.a,
        "N": params.N,
        "p": params.p,
        "b_lo": result.b_lo,
        "b_hi": result.b_hi,
        "b_tilde_est": result.b_tilde_est,
        "r_max": result.r_max,
        "tol": result.tol,
        "diagnostics": {
            "ratio_at_rmax": result.diagnostics["ratio_at_rmax"],
            "v_at_rmax": result.diagnostics["v_at_rmax"],
        },
    }
    if req.emit_csv:
        outputs["trajectory_csv"] = result.minimal_traj.to_csv()
    return _report("shoot", req.model_dump(), outputs, t0)


def _minimal_rates(req: RatesRequest, params: Parameters) -> dict:
    dc = derive_constants(params)
    cfg = shooting.ShootingConfig(r_max=req.r_max, tol=req.tol)
    result = shooting.find_b_tilde(req.a, params, cfg)
    traj = result.minimal_traj
    predicted, branch = asymptotics.predicted_minimal_remainder(params, dc)
    fit, fitted = asymptotics.minimal_remainder_fit(traj, params)
    out = {
        "mode": "minimal",
        "b_tilde_est": result.b_tilde_est,
        "predicted_remainder_exponent": predicted,
        "branch": branch,
        "fitted_remainder_exponent": fitted,
        "fit": fit.to_dict(),
        "tolerance": RATE_TOL,
        "passed": abs(fitted - predicted) <= RATE_TOL,
    }
    if req.emit_series:
        t, m = asymptotics.ef_transform(traj, dc.alpha)
        out["series_csv"] = asymptotics.samples_to_csv(np.exp(t), m,
                                                       header="r,m")
    return out


def _nonminimal_rates(req: RatesRequest, params: Parameters) -> dict:
    cfg = shooting.ShootingConfig(r_max=req.r_max, tol=req.tol)
    result = shooting.find_b_tilde(req.a, params, cfg)
    b = req.b_mult * result.b_tilde_est
    if b <= result.b_tilde_est:
        raise NotAboveCritical(
            f"b_mult={req.b_mult} does not exceed the critical value"
        )
    traj = radial_ode.integrate(
        radial_ode.IVP(a=req.a, b=b, params=params),
        r_max=max(req.r_max, 1e3), tol=req.tol,
    )
    diag = asymptotics.nonminimal_diagnostics(traj, params)
    tol = RATE_TOL_LOG if diag.log_correction else RATE_TOL
    fitted_kappa = -diag.kappa_fitted.exponent
    out = {
        "mode": "nonminimal",
        "b_tilde_est": result.b_tilde_est,
        "b": b,
        "kappa_predicted": diag.kappa_predicted,
        "log_correction": diag.log_correction,
        "fitted_kappa": fitted_kappa,
        "diagnostics": diag.to_dict(),
        "tolerance": tol,
        "passed": abs(fitted_kappa - diag.kappa_predicted) <= tol,
    }
    if req.emit_series:
        resid = np.abs(traj.u / traj.r ** 2
                       - diag.d_from_laplacian / (2.0 * params.N))
        out["series_csv"] = asymptotics.samples_to_csv(traj.r, resid,
                                                       header="r,residual")
    return out


def run_rates(req: RatesRequest) -> RunReport:
    t0 = time.monotonic()
    params = Parameters(req.N, req.p)
    if req.mode == "minimal":
        outputs = _minimal_rates(req, params)
    else:
        outputs = _nonminimal_rates(req, params)
    return _report("rates", req.model_dump(), outputs, t0)
