"""Pydantic request/response models for the certification service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class ParamsModel(BaseModel):
    C: float = Field(gt=0)
    k: int = Field(ge=2)
    p: float = Field(gt=0)
    eta: float = Field(gt=0)
    delta: float = Field(gt=0)
    epsilon: float = Field(gt=0)
    lam: float = Field(gt=0, le=1)
    ricF_lower: float = Field(ge=1)


class WitnessModel(BaseModel):
    r: float
    value: float


class LemmaItemModel(BaseModel):
    index: int
    description: str
    passed: bool
    margin: float
    inconclusive: bool = False
    detail: str = ""


class CertificateModel(BaseModel):
    grid_n: int
    min_horiz_eigen_inside: float
    min_horiz_eigen_outside: float
    min_vert_lower: float
    base_min: float
    witness_r: float
    norms: dict[str, float]
    lemma_items: list[LemmaItemModel]
    negative_measure: float
    theorem2_witness: WitnessModel
    verdict: Literal["pass", "fail"]
    witnesses: dict[str, WitnessModel]


class ReportModel(BaseModel):
    schema_version: int
    recipe: str
    params: ParamsModel
    grid_n: int
    certificate: CertificateModel
    profile_checksum: str


class SynthesizeRequest(BaseModel):
    C: float = Field(gt=0, description="target base-Ricci deficit")
    k: int = Field(default=2, ge=2, description="fiber dimension")
    grid_n: int = Field(default=8192, ge=1024)
    emit_csv: bool = False


class SynthesizeResponse(BaseModel):
    status: Literal["pass", "certification_failed", "infeasible"]
    message: str = ""
    failed_checks: list[str] = []
    report: Optional[ReportModel] = None
    csv_text: Optional[str] = None


class VerifyRequest(BaseModel):
    report: ReportModel
    grid_n: Optional[int] = Field(default=None, ge=1024)


class VerifyResponse(BaseModel):
    status: Literal["pass", "certification_failed", "schema_mismatch",
                    "checksum_mismatch"]
    ok: bool
    message: str = ""
    minima: dict[str, float] = {}


class OracleBlockModel(BaseModel):
    dev_h: float
    dev_half: float
    order: float


class OracleRequest(BaseModel):
    C: float = Field(gt=0)
    k: int = Field(default=2, ge=2)
    fd_step: float = Field(default=1e-3, ge=1e-5, le=1e-2)
    n_points: int = Field(default=25, ge=1, le=200)


class OracleResponse(BaseModel):
    status: Literal["pass", "failed", "infeasible"]
    fd_step: float = 0.0
    n_points: int = 0
    blocks: dict[str, OracleBlockModel] = {}
    mixed_max_h: float = 0.0
    mixed_max_half: float = 0.0
    mixed_bound_h: float = 0.0
    mixed_bound_half: float = 0.0
    failures: list[str] = []
    message: str = ""
