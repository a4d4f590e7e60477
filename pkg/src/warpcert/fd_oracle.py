"""Brute-force Ricci tensor of the warped metric from raw chart components.

Independent cross-check of the closed-form curvature module: the metric of
S^2_phi x F (F = round unit S^k in polar angles, fiber scaled by
lam^2 e^{2 nu}) is assembled as a plain (2+k) x (2+k) matrix field on a
coordinate chart, Christoffel symbols come from central differences of the
components, and the Ricci tensor from central differences of the symbols.
Nothing here touches the closed-form formulas being validated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, TYPE_CHECKING

import numpy as np

from .profiles import PI

if TYPE_CHECKING:  # pragma: no cover
    from .synthesis import SynthesisParams, WarpedProductSpec


class ChartDomainError(ValueError):
    """Query point (or its stencil ball) leaves the chart domain."""


@dataclass(frozen=True)
class MetricField:
    """Metric components on a chart (r, theta, u_1 .. u_k) of S^2 x S^k."""

    dim: int
    k: int
    chart_lo: np.ndarray
    chart_hi: np.ndarray
    component_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def components(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise ChartDomainError(f"point must have {self.dim} coordinates")
        if np.any(point <= self.chart_lo) or np.any(point >= self.chart_hi):
            raise ChartDomainError(f"point {point} outside the open chart domain")
        return self.component_fn(point)


@dataclass(frozen=True)
class FdReport:
    """Finite-difference Ricci at one chart point with closed-form deviations."""

    point: np.ndarray
    step: float
    ricci_matrix: np.ndarray
    comparison: dict
    symmetry_defect: float


def round_sphere_diag(angles, k: int) -> np.ndarray:
    """Diagonal of the round unit S^k metric in polar angles u_1 .. u_k."""
    comps = np.ones(k)
    for i in range(1, k):
        comps[i] = comps[i - 1] * math.sin(angles[i - 1]) ** 2
    return comps


def build_metric_chart(spec: "WarpedProductSpec") -> MetricField:
    """Block-diagonal metric diag(1, phi^2, lam^2 e^{2 nu} * round S^k)."""
    k = spec.k
    dim = 2 + k
    lo = np.array([0.0, 0.0] + [0.0] * k)
    hi = np.array([PI, 2 * PI] + [PI] * (k - 1) + [2 * PI])
    phi, nu, lam2 = spec.phi, spec.nu, spec.lam ** 2

    def component_fn(x):
        r = x[0]
        diag = np.empty(dim)
        diag[0] = 1.0
        diag[1] = phi.eval(r) ** 2
        diag[2:] = lam2 * math.exp(2.0 * nu.eval(r)) * round_sphere_diag(x[2:], k)
        return np.diag(diag)

    return MetricField(dim=dim, k=k, chart_lo=lo, chart_hi=hi,
                       component_fn=component_fn)


def christoffel_fd(field_: MetricField, point, h: float) -> np.ndarray:
    """Gamma^i_{jk} from central differences of the metric; symmetric in (j, k)."""
    point = np.asarray(point, dtype=float)
    if h <= 0:
        raise ValueError("h must be positive")
    if np.any(point - h <= field_.chart_lo) or np.any(point + h >= field_.chart_hi):
        raise ChartDomainError(f"h-ball around {point} leaves the chart domain")
    n = field_.dim
    g = field_.components(point)
    ginv = np.linalg.inv(g)
    dg = np.empty((n, n, n))
    for m in range(n):
        e = np.zeros(n)
        e[m] = h
        dg[m] = (field_.components(point + e) - field_.components(point - e)) / (2.0 * h)
    # term[l, j, k] = d_j g_{lk} + d_k g_{lj} - d_l g_{jk}
    term = np.einsum('jlk->ljk', dg) + np.einsum('klj->ljk', dg) - dg
    return 0.5 * np.einsum('il,ljk->ijk', ginv, term)


def ricci_fd(field_: MetricField, point, h: float,
             expected: dict | None = None) -> FdReport:
    """Ricci matrix from central differences of Christoffel symbols.

    R_{jk} = d_i Gamma^i_{jk} - d_j Gamma^i_{ik}
             + Gamma^i_{ip} Gamma^p_{jk} - Gamma^i_{jp} Gamma^p_{ik}

    ``expected`` (optional) carries closed-form block values
    {"rr": A, "tt": B, "fiber_scale": vert_value}; deviations per block are
    reported in ``comparison`` (mixed block always compared against zero).
    """
    point = np.asarray(point, dtype=float)
    if np.any(point - 2 * h <= field_.chart_lo) or np.any(point + 2 * h >= field_.chart_hi):
        raise ChartDomainError(f"2h-ball around {point} leaves the chart domain")
    n = field_.dim
    gamma = christoffel_fd(field_, point, h)
    dgamma = np.empty((n, n, n, n))
    for m in range(n):
        e = np.zeros(n)
        e[m] = h
        dgamma[m] = (christoffel_fd(field_, point + e, h)
                     - christoffel_fd(field_, point - e, h)) / (2.0 * h)
    ricci = (np.einsum('iijk->jk', dgamma)
             - np.einsum('jiik->jk', dgamma)
             + np.einsum('iip,pjk->jk', gamma, gamma)
             - np.einsum('ijp,pik->jk', gamma, gamma))
    symdef = float(np.max(np.abs(ricci - ricci.T)))

    comparison = {}
    if expected is not None:
        target = np.zeros((n, n))
        target[0, 0] = expected["rr"]
        target[1, 1] = expected["tt"]
        fiber = expected["fiber_scale"] * round_sphere_diag(point[2:], field_.k)
        target[2:, 2:] = np.diag(fiber)
        diff = np.abs(ricci - target)
        comparison = {
            "rr": float(diff[0, 0]),
            "tt": float(np.max(diff[:2, :2])),
            "fiber": float(np.max(diff[2:, 2:])),
            "mixed": float(np.max(diff[:2, 2:])),
        }
    return FdReport(point=point, step=float(h), ricci_matrix=ricci,
                    comparison=comparison, symmetry_defect=symdef)


def expected_blocks(spec: "WarpedProductSpec", r: float) -> dict:
    """Closed-form block values for comparison at radius r."""
    from .curvature import horizontal_ricci, vertical_ricci_lower
    A, B = horizontal_ricci(spec, r)
    return {"rr": A, "tt": B, "fiber_scale": vertical_ricci_lower(spec, r)}


def sample_chart_points(spec: "WarpedProductSpec", n: int, h: float,
                        params: "SynthesisParams | None" = None,
                        seed: int = 20260810) -> list[np.ndarray]:
    """Deterministic interior sample avoiding coordinate singularities.

    Radii keep a 10h margin from the poles and skip the synthesis window
    (plus padding), where the deliberately sharp phi'' spike would put the
    stencil outside the finite-difference asymptotic regime.  Fiber polar
    angles stay in an equatorial band so the chart is well conditioned.
    """
    rng = np.random.default_rng(seed)
    margin = 10.0 * h
    lo, hi = margin, PI - margin
    if params is not None:
        pad = 2.0 * params.delta + margin
        lo = max(lo, params.p + params.delta + pad)
    points = []
    k = spec.k
    while len(points) < n:
        r = rng.uniform(lo, hi)
        theta = rng.uniform(0.5, 2 * PI - 0.5)
        polar = rng.uniform(PI / 2 - 0.3, PI / 2 + 0.3, size=max(k - 1, 0))
        last = rng.uniform(0.5, 2 * PI - 0.5)
        points.append(np.array([r, theta, *polar, last]))
    return points


def oracle_comparison(spec: "WarpedProductSpec", fd_step: float,
                      params: "SynthesisParams | None" = None,
                      n_points: int = 25) -> dict:
    """Deviation-vs-closed-form study at fd_step and fd_step/2.

    Returns per-block max deviations at both steps, the empirical convergence
    order log2(dev_h / dev_{h/2}) for the rr/tt/fiber blocks, and the max
    mixed-block entries (true value zero, so no order is defined there).
    """
    field_ = build_metric_chart(spec)
    points = sample_chart_points(spec, n_points, fd_step, params=params)
    devs = {h: {"rr": 0.0, "tt": 0.0, "fiber": 0.0, "mixed": 0.0}
            for h in (fd_step, fd_step / 2.0)}
    for pt in points:
        exp = expected_blocks(spec, float(pt[0]))
        for h in devs:
            rep = ricci_fd(field_, pt, h, expected=exp)
            for key in devs[h]:
                devs[h][key] = max(devs[h][key], rep.comparison[key])
    h1, h2 = fd_step, fd_step / 2.0
    blocks = {}
    for key in ("rr", "tt", "fiber"):
        d1, d2 = devs[h1][key], devs[h2][key]
        order = math.log2(d1 / d2) if d1 > 0 and d2 > 0 else float("nan")
        blocks[key] = {"dev_h": d1, "dev_half": d2, "order": order}
    return {
        "fd_step": fd_step,
        "n_points": len(points),
        "blocks": blocks,
        "mixed_max_h": devs[h1]["mixed"],
        "mixed_max_half": devs[h2]["mixed"],
    }
