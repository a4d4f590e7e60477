"""FastAPI service wrapping the certification pipeline.

The handlers are plain functions over the pydantic models so the CLI can run
them in process; the routes are thin wrappers.  Run a server with

    uvicorn warpcert.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI

from ..certify import build_certificate
from ..fd_oracle import oracle_comparison
from ..report import (
    ChecksumMismatchError,
    ReportSchemaError,
    build_report,
    csv_text,
    reconstruct_from_report,
)
from ..synthesis import InfeasibleSynthesisError, build_counterexample
from .schemas import (
    OracleBlockModel,
    OracleRequest,
    OracleResponse,
    ReportModel,
    SynthesizeRequest,
    SynthesizeResponse,
    VerifyRequest,
    VerifyResponse,
)

ORDER_RANGE = (1.7, 2.3)
MIXED_BOUND_FACTOR = 50.0


def _failed_checks(cert) -> list[str]:
    failed = []
    if not cert.min_horiz_eigen_inside > 0.0:
        failed.append("min horizontal eigenvalue inside the window must be > 0")
    if not cert.min_horiz_eigen_outside >= 0.5:
        failed.append("min horizontal eigenvalue outside the window must be >= 1/2")
    if not cert.min_vert_lower > 0.0:
        failed.append("min vertical lower bound must be > 0")
    if not cert.base_min < -cert.params.C:
        failed.append(f"base Ricci minimum must be < -C = {-cert.params.C}")
    failed += [f"construction item {it.index}"
               + (" (inconclusive margin)" if it.inconclusive else "")
               for it in cert.lemma_items if not it.passed]
    return failed


def handle_synthesize(req: SynthesizeRequest) -> SynthesizeResponse:
    try:
        params, spec = build_counterexample(req.C, req.k)
    except InfeasibleSynthesisError as err:
        return SynthesizeResponse(status="infeasible", message=str(err))
    cert = build_certificate(spec, params, req.grid_n)
    report = build_report(params, spec, cert)
    csv = csv_text(spec, params, req.grid_n) if req.emit_csv else None
    status = "pass" if cert.verdict == "pass" else "certification_failed"
    return SynthesizeResponse(status=status, failed_checks=_failed_checks(cert),
                              report=ReportModel.model_validate(report),
                              csv_text=csv)


def handle_verify(req: VerifyRequest) -> VerifyResponse:
    stored = req.report.model_dump()
    try:
        params, spec = reconstruct_from_report(stored)
    except ReportSchemaError as err:
        return VerifyResponse(status="schema_mismatch", ok=False, message=str(err))
    except ChecksumMismatchError as err:
        return VerifyResponse(status="checksum_mismatch", ok=False, message=str(err))
    grid_n = req.grid_n if req.grid_n is not None else stored["grid_n"]
    cert = build_certificate(spec, params, grid_n)
    ok = cert.verdict == "pass" and stored["certificate"]["verdict"] == "pass"
    minima = {
        "min_horiz_eigen_inside": cert.min_horiz_eigen_inside,
        "min_horiz_eigen_outside": cert.min_horiz_eigen_outside,
        "min_vert_lower": cert.min_vert_lower,
        "base_min": cert.base_min,
    }
    msg = "" if ok else "; ".join(_failed_checks(cert)) or "stored verdict was not pass"
    return VerifyResponse(status="pass" if ok else "certification_failed",
                          ok=ok, minima=minima, message=msg)


def handle_oracle(req: OracleRequest) -> OracleResponse:
    try:
        params, spec = build_counterexample(req.C, req.k)
    except InfeasibleSynthesisError as err:
        return OracleResponse(status="infeasible", message=str(err))
    res = oracle_comparison(spec, req.fd_step, params=params, n_points=req.n_points)
    bound_h = MIXED_BOUND_FACTOR * req.fd_step ** 2
    bound_half = MIXED_BOUND_FACTOR * (req.fd_step / 2.0) ** 2
    failures = []
    for name, block in res["blocks"].items():
        if not (ORDER_RANGE[0] <= block["order"] <= ORDER_RANGE[1]):
            failures.append(
                f"{name} block convergence order {block['order']:.3f} outside "
                f"[{ORDER_RANGE[0]}, {ORDER_RANGE[1]}]")
    if res["mixed_max_h"] > bound_h:
        failures.append(f"mixed entries {res['mixed_max_h']:.3e} exceed 50 h^2")
    if res["mixed_max_half"] > bound_half:
        failures.append(f"mixed entries {res['mixed_max_half']:.3e} exceed 50 (h/2)^2")
    return OracleResponse(
        status="pass" if not failures else "failed",
        fd_step=req.fd_step, n_points=res["n_points"],
        blocks={k: OracleBlockModel(**v) for k, v in res["blocks"].items()},
        mixed_max_h=res["mixed_max_h"], mixed_max_half=res["mixed_max_half"],
        mixed_bound_h=bound_h, mixed_bound_half=bound_half,
        failures=failures)


app = FastAPI(title="warpcert",
              description="Certificates for positively curved warped products "
                          "over bases with arbitrarily negative Ricci spots")


@app.get("/healthz")
def healthz():
    return {"status": "ok"}


@app.post("/synthesize", response_model=SynthesizeResponse)
def synthesize(req: SynthesizeRequest) -> SynthesizeResponse:
    return handle_synthesize(req)


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest) -> VerifyResponse:
    return handle_verify(req)


@app.post("/oracle", response_model=OracleResponse)
def oracle(req: OracleRequest) -> OracleResponse:
    return handle_oracle(req)
