"""HTTP front end: one POST route per command, JSON in / RunReport out.

Input problems (inadmissible parameters, malformed requests) map to 422;
numerical failures (bracket expansion, unclassifiable trajectories) map to
500 with a JSON error object {error, message}.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import service
from .errors import BrlError, DomainError, InadmissibleParameters

app = FastAPI(title="radial biharmonic laboratory", version=service.VERSION)

INPUT_ERRORS = (InadmissibleParameters, DomainError, ValueError)


@app.exception_handler(BrlError)
async def brl_error_handler(request: Request, exc: BrlError):
    status = 422 if isinstance(exc, INPUT_ERRORS) else 500
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "message": str(exc)},
    )


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(
        status_code=422,
        content={"error": type(exc).__name__, "message": str(exc)},
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": service.VERSION}


@app.post("/constants")
def constants(req: service.ConstantsRequest) -> service.RunReport:
    return service.run_constants(req)


@app.post("/roots")
def roots(req: service.RootsRequest) -> service.RunReport:
    return service.run_roots(req)


@app.post("/verify-claims")
def verify_claims(req: service.VerifyClaimsRequest) -> service.RunReport:
    return service.run_verify_claims(req)


@app.post("/shoot")
def shoot(req: service.ShootRequest) -> service.RunReport:
    return service.run_shoot(req)


@app.post("/rates")
def rates(req: service.RatesRequest) -> service.RunReport:
    return service.run_rates(req)
