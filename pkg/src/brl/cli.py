"""Command-line front end.

Thin client over the service layer: each subcommand builds a request model,
runs it (in-process by default, over HTTP with --server), and prints one
RunReport as JSON.  Grid sweeps fan out over worker threads and write one
JSON line per grid point, in input order.

Exit codes: 0 success, 1 claim/tolerance failure, 2 input error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from typing import Callable, Optional

import pydantic

from . import service
from .errors import BrlError, DomainError, InadmissibleParameters

EXIT_OK = 0
EXIT_CLAIM_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3

INPUT_ERRORS = (
    InadmissibleParameters,
    DomainError,
    ValueError,
    pydantic.ValidationError,
)

ROUTES = {
    "constants": (service.ConstantsRequest, service.run_constants),
    "roots": (service.RootsRequest, service.run_roots),
    "verify-claims": (service.VerifyClaimsRequest, service.run_verify_claims),
    "shoot": (service.ShootRequest, service.run_shoot),
    "rates": (service.RatesRequest, service.run_rates),
}


def _n_threads() -> int:
    env = os.environ.get("BRL_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _run_remote(server: str, command: str, payload: dict) -> dict:
    import httpx

    resp = httpx.post(f"{server.rstrip('/')}/{command}", json=payload,
                      timeout=600.0)
    body = resp.json()
    if resp.status_code >= 400:
        code = EXIT_INPUT_ERROR if resp.status_code == 422 \
            else EXIT_NUMERICAL_FAILURE
        raise SystemExit(_fail(body, code))
    return body


def _fail(error_obj: dict, code: int) -> int:
    print(json.dumps(error_obj), file=sys.stderr)
    return code


def _execute(command: str, payload: dict, server: Optional[str]) -> dict:
    req_model, runner = ROUTES[command]
    if server:
        return _run_remote(server, command, payload)
    req = req_model(**payload)
    return runner(req).model_dump()


def _verdict_exit_code(command: str, report: dict) -> int:
    out = report.get("outputs", {})
    if command == "verify-claims" and not out.get("all_passed", True):
        return EXIT_CLAIM_FAILURE
    if command == "rates" and not out.get("passed", True):
        return EXIT_CLAIM_FAILURE
    return EXIT_OK


def _extract_file_payload(report: dict, key: str, path: Optional[str]) -> None:
    """Move a CSV payload out of the report and into a file, if requested."""
    body = report.get("outputs", {}).pop(key, None)
    if path and body is not None:
        with open(path, "w") as fh:
            fh.write(body)


def _parse_grid(spec: str) -> list[float]:
    try:
        start, stop, count = spec.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError as exc:
        raise ValueError(f"bad grid spec {spec!r}; want start:stop:count") \
            from exc
    if count < 1:
        raise ValueError(f"grid count {count} must be >= 1")
    if count == 1:
        return [start]
    step = (stop - start) / (count - 1)
    return [start + i * step for i in range(count)]


def _run_grid(command: str, payload: dict, grid: str,
              server: Optional[str]) -> int:
    p_values = _parse_grid(grid)
    worst = EXIT_OK

    def one(p: float) -> tuple[dict, int]:
        pt = dict(payload, p=p)
        try:
            report = _execute(command, pt, server)
            return report, _verdict_exit_code(command, report)
        except INPUT_ERRORS as exc:
            return ({"error": type(exc).__name__, "message": str(exc),
                     "inputs": pt}, EXIT_INPUT_ERROR)
        except BrlError as exc:
            return ({"error": type(exc).__name__, "message": str(exc),
                     "inputs": pt}, EXIT_NUMERICAL_FAILURE)

    with concurrent.futures.ThreadPoolExecutor(_n_threads()) as pool:
        for report, code in pool.map(one, p_values):
            print(json.dumps(report))
            worst = max(worst, code)
    return worst


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="brl",
        description="numerical laboratory for radial biharmonic solutions",
    )
    top.add_argument("--server", default=None,
                     help="run against a remote service instead of in-process")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p_, with_p=True):
        p_.add_argument("--N", type=int, required=True)
        if with_p:
            p_.add_argument("--p", type=float)
        p_.add_argument("--json", action="store_true",
                        help="emit JSON (the default; accepted for scripts)")

    c = sub.add_parser("constants", help="derived constants and regime")
    common(c)

    r = sub.add_parser("roots", help="characteristic-exponent root tables")
    common(r)
    r.add_argument("--k-max", type=int, default=0)
    r.add_argument("--family", default="mode",
                   choices=["mode", "mean", "nm-mode", "nm-mean", "nm-tilde"])
    r.add_argument("--i", type=int, default=1)

    v = sub.add_parser("verify-claims", help="root-structure claim suite")
    common(v)
    v.add_argument("--k-max", type=int, default=50)

    s = sub.add_parser("shoot", help="locate the critical b~(a)")
    common(s)
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--r-max", type=float, default=500.0)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--rel-tol", type=float, default=1e-8)
    s.add_argument("--emit-csv", default=None, metavar="PATH",
                   help="write the minimal-proxy trajectory CSV here")
    s.add_argument("--grid", default=None, metavar="START:STOP:COUNT",
                   help="sweep p; one JSON line per grid point")

    ra = sub.add_parser("rates", help="fit decay rates against predictions")
    common(ra)
    ra.add_argument("--a", type=float, default=1.0)
    ra.add_argument("--mode", default="minimal",
                    choices=["minimal", "nonminimal"])
    ra.add_argument("--b-mult", type=float, default=2.0)
    ra.add_argument("--r-max", type=float, default=500.0)
    ra.add_argument("--tol", type=float, default=1e-10)
    ra.add_argument("--emit-series", default=None, metavar="PATH",
                    help="write the fitted series CSV here")
    ra.add_argument("--grid", default=None, metavar="START:STOP:COUNT")

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    return top


def _payload_from_args(args: argparse.Namespace) -> dict:
    cmd = args.command
    if cmd == "constants":
        return {"N": args.N, "p": args.p}
    if cmd == "roots":
        return {"N": args.N, "p": args.p, "k_max": args.k_max,
                "family": args.family, "i": args.i}
    if cmd == "verify-claims":
        return {"N": args.N, "p": args.p, "k_max": args.k_max}
    if cmd == "shoot":
        return {"N": args.N, "p": args.p, "a": args.a, "r_max": args.r_max,
                "tol": args.tol, "rel_tol": args.rel_tol,
                "emit_csv": args.emit_csv is not None}
    if cmd == "rates":
        return {"N": args.N, "p": args.p, "a": args.a, "mode": args.mode,
                "b_mult": args.b_mult, "r_max": args.r_max, "tol": args.tol,
                "emit_series": args.emit_series is not None}
    raise ValueError(f"unknown command {cmd}")


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .api import app
        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    try:
        payload = _payload_from_args(args)
        if args.command in ("constants", "roots", "verify-claims", "rates") \
                and payload.get("p") is None and args.command != "roots":
            raise ValueError("--p is required")

        grid = getattr(args, "grid", None)
        if grid:
            return _run_grid(args.command, payload, grid, args.server)

        report = _execute(args.command, payload, args.server)
        if args.command == "shoot":
            _extract_file_payload(report, "trajectory_csv", args.emit_csv)
        if args.command == "rates":
            _extract_file_payload(report, "series_csv", args.emit_series)
        print(json.dumps(report))
        return _verdict_exit_code(args.command, report)
    except INPUT_ERRORS as exc:
        return _fail({"error": type(exc).__name__, "message": str(exc)},
                     EXIT_INPUT_ERROR)
    except BrlError as exc:
        return _fail({"error": type(exc).__name__, "message": str(exc)},
                     EXIT_NUMERICAL_FAILURE)


if __name__ == "__main__":
    raise SystemExit(main())
