"""Versioned report files: JSON certificates and CSV plot data.

Profiles are persisted as parameters plus a construction-recipe identifier,
not raw samples; construction is deterministic, so a SHA-256 checksum over
canonical profile samples pins the reconstruction bit for bit.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .certify import Certificate, forced_points, region_grid
from .curvature import base_ricci_values, horizontal_values, vertical_values
from .profiles import PI
from .synthesis import (
    SynthesisParams,
    WarpedProductSpec,
    choose_lambda,
    synthesize_nu,
    synthesize_phi,
)

SCHEMA_VERSION = 1
RECIPE = "warpcert-counterexample-v1"
_CHECKSUM_GRID_N = 2048

CSV_COLUMNS = ["r", "phi", "dphi", "ddphi", "nu", "dnu", "ddnu",
               "ric_base", "ric_h_rr", "ric_h_tt_eigen", "ric_v_lower"]


class ReportSchemaError(ValueError):
    """Unknown schema version or recipe identifier."""


class ChecksumMismatchError(ValueError):
    """Stored profile checksum differs from the deterministic reconstruction."""


def profile_checksum(spec: WarpedProductSpec, params: SynthesisParams) -> str:
    """SHA-256 over canonical profile samples and the parameter pack."""
    rs = region_grid(0.0, PI, _CHECKSUM_GRID_N + 1, forced_points(spec, params))
    header = np.array([params.C, float(params.k), params.p, params.eta,
                       params.delta, params.epsilon, params.lam,
                       float(spec.k), spec.lam, spec.ricF_lower])
    digest = hashlib.sha256()
    digest.update(header.tobytes())
    for arr in (rs, spec.phi.eval(rs), spec.phi.d1(rs), spec.phi.d2(rs),
                spec.nu.eval(rs), spec.nu.d1(rs), spec.nu.d2(rs)):
        digest.update(np.asarray(arr, dtype=np.float64).tobytes())
    return digest.hexdigest()


def params_to_dict(params: SynthesisParams, ricF_lower: float) -> dict:
    return {"C": params.C, "k": params.k, "p": params.p, "eta": params.eta,
            "delta": params.delta, "epsilon": params.epsilon,
            "lam": params.lam, "ricF_lower": ricF_lower}


def params_from_dict(d: dict) -> SynthesisParams:
    return SynthesisParams(C=float(d["C"]), k=int(d["k"]), p=float(d["p"]),
                           eta=float(d["eta"]), delta=float(d["delta"]),
                           epsilon=float(d["epsilon"]), lam=float(d["lam"]))


def build_report(params: SynthesisParams, spec: WarpedProductSpec,
                 cert: Certificate) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "recipe": RECIPE,
        "params": params_to_dict(params, spec.ricF_lower),
        "grid_n": cert.grid_n,
        "certificate": cert.to_dict(),
        "profile_checksum": profile_checksum(spec, params),
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_report(path: Path, report: dict) -> Path:
    path = Path(path)
    path.write_text(report_to_json(report), encoding="utf-8")
    return path


def load_report(path: Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def reconstruct_from_report(report: dict):
    """Rebuild (params, spec) deterministically from a stored report.

    Raises ReportSchemaError for version/recipe mismatches and
    ChecksumMismatchError when the stored checksum does not match the
    reconstruction (e.g. a tampered parameter).
    """
    if report.get("schema_version") != SCHEMA_VERSION:
        raise ReportSchemaError(
            f"schema version {report.get('schema_version')!r} != {SCHEMA_VERSION}")
    if report.get("recipe") != RECIPE:
        raise ReportSchemaError(f"unknown recipe {report.get('recipe')!r}")
    pd = report["params"]
    try:
        params = params_from_dict(pd)
        phi = synthesize_phi(params)
        nu = synthesize_nu(phi, params)
    except Exception as err:
        raise ChecksumMismatchError(f"stored parameters do not reconstruct: {err}")
    ricF_lower = float(pd["ricF_lower"])
    lam = choose_lambda(phi, nu, params.k, ricF_lower)
    if lam != params.lam:
        raise ChecksumMismatchError(
            f"reconstructed lambda {lam!r} differs from stored {params.lam!r}")
    spec = WarpedProductSpec(phi=phi, nu=nu, k=params.k, lam=lam,
                             ricF_lower=ricF_lower)
    stored = report.get("profile_checksum")
    actual = profile_checksum(spec, params)
    if stored != actual:
        raise ChecksumMismatchError(
            f"profile checksum mismatch: stored {stored!r}, rebuilt {actual!r}")
    return params, spec


def curvature_table(spec: WarpedProductSpec, params: SynthesisParams | None,
                    grid_n: int) -> dict:
    """Column arrays for the CSV plot data."""
    rs = region_grid(0.0, PI, grid_n + 1, forced_points(spec, params))
    A, B, _, eig_tt = horizontal_values(spec, rs)
    return {
        "r": rs,
        "phi": spec.phi.eval(rs), "dphi": spec.phi.d1(rs), "ddphi": spec.phi.d2(rs),
        "nu": spec.nu.eval(rs), "dnu": spec.nu.d1(rs), "ddnu": spec.nu.d2(rs),
        "ric_base": base_ricci_values(spec.phi, rs),
        "ric_h_rr": A,
        "ric_h_tt_eigen": eig_tt,
        "ric_v_lower": vertical_values(spec, rs),
    }


def csv_text(spec: WarpedProductSpec, params: SynthesisParams | None,
             grid_n: int) -> str:
    cols = curvature_table(spec, params, grid_n)
    lines = [",".join(CSV_COLUMNS)]
    data = [cols[name] for name in CSV_COLUMNS]
    for row in zip(*data):
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path: Path, text: str) -> Path:
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path
