"""Closed-form curvature of the warped product over a rotationally symmetric base.

Base metric dr^2 + phi^2 dtheta^2 on the 2-sphere; warped metric scales the
fiber by (lam * e^{nu})^2.  All quantities reduce to pointwise expressions in
(phi, phi', phi'', nu, nu', nu'') at a radius r:

  base Ricci factor        -phi''/phi
  horizontal Ricci         A dr^2 + B dtheta^2,
                           A = -(phi''/phi + k (nu'' + nu'^2))
                           B = -phi (phi'' + k nu' phi')
  vertical Ricci bound     ricF_lower - lam^2 e^{2 nu} (nu'' + phi' nu'/phi + k nu'^2)
  mixed terms              identically zero

Ratios that degenerate at the poles (phi -> 0) are evaluated from the
declared exact regions (phi = sin, nu constant), where the limits are exact.
All operations accept scalars or arrays and are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .profiles import SmoothProfile, _as_1d

if TYPE_CHECKING:  # pragma: no cover
    from .synthesis import WarpedProductSpec


class PoleEvaluationError(ValueError):
    """0/0 at a pole that no exact region resolves."""


@dataclass(frozen=True)
class PointwiseGeometry:
    """Profile jets at one radius; grad nu = nu' d/dr, so |grad nu| = |nu'|."""

    r: float
    phi: float
    dphi: float
    ddphi: float
    nu: float
    dnu: float
    ddnu: float

    @property
    def grad_nu_norm(self) -> float:
        return abs(self.dnu)

    @classmethod
    def from_profiles(cls, phi: SmoothProfile, nu: SmoothProfile, r: float):
        return cls(r=float(r), phi=phi.eval(r), dphi=phi.d1(r), ddphi=phi.d2(r),
                   nu=nu.eval(r), dnu=nu.d1(r), ddnu=nu.d2(r))


@dataclass(frozen=True)
class RicciSample:
    """Pointwise curvature readout of the warped product."""

    r: float
    base_ricci: float
    horiz_rr: float
    horiz_tt_coeff: float
    horiz_eigen_rr: float
    horiz_eigen_tt: float
    vert_lower: float
    mixed: float = 0.0


def _safe_div(num, den, fallback_mask):
    den = np.where(fallback_mask, 1.0, den)
    return num / den


def base_ricci_values(phi: SmoothProfile, r) -> np.ndarray:
    """-phi''/phi, vectorized; exactly 1 on exact sin regions (poles included)."""
    arr, shape = _as_1d(r)
    sinm = phi.in_form(arr, "sin")
    val = phi.eval(arr)
    bad = ~sinm & (val <= 0.0)
    if np.any(bad):
        raise PoleEvaluationError(
            f"phi vanishes at r = {arr[bad][0]:.6g} outside an exact sin region")
    out = np.where(sinm, 1.0, -_safe_div(phi.d2(arr), val, sinm))
    return out.reshape(shape) if shape else float(out[0])


def base_ricci(phi: SmoothProfile, r: float) -> float:
    """The factor in Ric = (-phi''/phi) g for the base metric."""
    return base_ricci_values(phi, r)


def hessian_nu(geom: PointwiseGeometry) -> tuple[float, float]:
    """(dr^2, dtheta^2) coefficients of Hess nu: (nu'', nu' phi phi')."""
    return geom.ddnu, geom.dnu * geom.phi * geom.dphi


def laplacian_nu(geom: PointwiseGeometry) -> float:
    """nu'' + (phi'/phi) nu'; the radial term vanishes identically when nu' = 0."""
    if geom.dnu == 0.0:
        return geom.ddnu
    if geom.phi <= 0.0:
        raise PoleEvaluationError("laplacian needs phi > 0 where nu' != 0")
    return geom.ddnu + geom.dphi / geom.phi * geom.dnu


def horizontal_values(spec: "WarpedProductSpec", r):
    """(A, B, eigen_rr, eigen_tt) of the horizontal Ricci form, vectorized."""
    arr, shape = _as_1d(r)
    phi, nu, k = spec.phi, spec.nu, spec.k
    val, dphi, ddphi = phi.eval(arr), phi.d1(arr), phi.d2(arr)
    dnu, ddnu = nu.d1(arr), nu.d2(arr)
    sinm = phi.in_form(arr, "sin")
    pole = val <= 0.0
    if np.any(pole & ~(sinm & (dnu == 0.0))):
        bad = arr[pole & ~(sinm & (dnu == 0.0))][0]
        raise PoleEvaluationError(
            f"pole at r = {bad:.6g} without exact sin region and locally constant nu")
    ratio = np.where(sinm, -1.0, _safe_div(ddphi, val, sinm | pole))
    A = -(ratio + k * (ddnu + dnu * dnu))
    B = -val * (ddphi + k * dnu * dphi)
    eig_tt = np.where(pole, 1.0, -_safe_div(ddphi + k * dnu * dphi, val, pole))
    if shape:
        return A.reshape(shape), B.reshape(shape), A.reshape(shape), eig_tt.reshape(shape)
    return float(A[0]), float(B[0]), float(A[0]), float(eig_tt[0])


def horizontal_ricci(spec: "WarpedProductSpec", r: float) -> tuple[float, float]:
    """Coefficients (A, B) with Ric^h = A dr^2 + B dtheta^2; eigenvalues (A, B/phi^2)."""
    A, B, _, _ = horizontal_values(spec, r)
    return A, B


def vertical_values(spec: "WarpedProductSpec", r):
    """Lower bound of the vertical Ricci on ricF-unit directions, vectorized.

    lam enters as the nu + ln(lam) shift: the warp derivative terms are
    unchanged and e^{2 nu} picks up the factor lam^2.
    """
    arr, shape = _as_1d(r)
    phi, nu, k = spec.phi, spec.nu, spec.k
    dnu, ddnu = nu.d1(arr), nu.d2(arr)
    moving = dnu != 0.0
    val = phi.eval(arr)
    if np.any(moving & (val <= 0.0)):
        bad = arr[moving & (val <= 0.0)][0]
        raise PoleEvaluationError(f"phi vanishes at r = {bad:.6g} where nu' != 0")
    radial = np.where(moving, phi.d1(arr) * dnu * _safe_div(1.0, val, ~moving), 0.0)
    term = ddnu + radial + k * dnu * dnu
    out = spec.ricF_lower - spec.lam ** 2 * np.exp(2.0 * nu.eval(arr)) * term
    return out.reshape(shape) if shape else float(out[0])


def vertical_ricci_lower(spec: "WarpedProductSpec", r: float) -> float:
    return vertical_values(spec, r)


def warped_ricci_general(ric_B, hess, grad, uv_inner: float, ric_F: float,
                         k: int, nu_val: float):
    """General product-warp Ricci from bilinear data in a base-orthonormal frame.

    ric_B and hess are 2x2 symmetric matrices, grad the frame components of
    grad nu.  Returns (horizontal 2x2, mixed scalar, vertical scalar):

      horizontal = ric_B - k (hess + grad (x) grad)
      mixed      = 0
      vertical   = uv_inner * (ric_F - e^{2 nu} (tr hess + k |grad|^2))
    """
    ric_B = np.asarray(ric_B, dtype=float)
    hess = np.asarray(hess, dtype=float)
    grad = np.asarray(grad, dtype=float)
    horizontal = ric_B - k * (hess + np.outer(grad, grad))
    vertical = uv_inner * ric_F - uv_inner * np.exp(2.0 * nu_val) * (
        np.trace(hess) + k * float(grad @ grad))
    return horizontal, 0.0, vertical


def ricci_from_geometry(geom: PointwiseGeometry, k: int, lam: float,
                        ricF_lower: float):
    """Specialized pointwise formulas (A, B, eigen_tt, vert) from profile jets.

    Requires phi > 0 at the point; pole limits are the profile-aware
    operations' job.
    """
    if geom.phi <= 0.0:
        raise PoleEvaluationError("pointwise formulas need phi > 0")
    A = -(geom.ddphi / geom.phi + k * (geom.ddnu + geom.dnu ** 2))
    B = -geom.phi * (geom.ddphi + k * geom.dnu * geom.dphi)
    eig_tt = B / geom.phi ** 2
    vert = ricF_lower - lam ** 2 * np.exp(2.0 * geom.nu) * (
        geom.ddnu + geom.dphi * geom.dnu / geom.phi + k * geom.dnu ** 2)
    return A, B, eig_tt, vert


def ricci_sample(spec: "WarpedProductSpec", r: float) -> RicciSample:
    """All pointwise curvature quantities at one radius."""
    A, B, eig_rr, eig_tt = horizontal_values(spec, r)
    return RicciSample(
        r=float(r),
        base_ricci=base_ricci(spec.phi, r),
        horiz_rr=A,
        horiz_tt_coeff=B,
        horiz_eigen_rr=eig_rr,
        horiz_eigen_tt=eig_tt,
        vert_lower=vertical_ricci_lower(spec, r),
    )
