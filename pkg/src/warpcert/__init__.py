"""Certified warped-product metrics: positive total Ricci curvature over a
rotationally symmetric base with Ricci dips below any prescribed -C."""

from .certify import (
    Certificate,
    build_certificate,
    negative_region_measure,
    theorem2_sanity,
    verify_base_negative,
    verify_lemma_constraints,
    verify_positive_ricci,
)
from .curvature import (
    PointwiseGeometry,
    RicciSample,
    base_ricci,
    hessian_nu,
    horizontal_ricci,
    laplacian_nu,
    ricci_sample,
    vertical_ricci_lower,
    warped_ricci_general,
)
from .fd_oracle import MetricField, build_metric_chart, christoffel_fd, ricci_fd
from .profiles import Interval, SmoothProfile, bump, integrate_profile, norm_cr_diff
from .synthesis import (
    SynthesisParams,
    WarpedProductSpec,
    build_counterexample,
    choose_lambda,
    choose_parameters,
    round_product_spec,
    synthesize_nu,
    synthesize_phi,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "Interval",
    "MetricField",
    "PointwiseGeometry",
    "RicciSample",
    "SmoothProfile",
    "SynthesisParams",
    "WarpedProductSpec",
    "base_ricci",
    "build_certificate",
    "build_counterexample",
    "build_metric_chart",
    "bump",
    "choose_lambda",
    "choose_parameters",
    "christoffel_fd",
    "hessian_nu",
    "horizontal_ricci",
    "integrate_profile",
    "laplacian_nu",
    "negative_region_measure",
    "norm_cr_diff",
    "ricci_fd",
    "ricci_sample",
    "round_product_spec",
    "synthesize_nu",
    "synthesize_phi",
    "theorem2_sanity",
    "verify_base_negative",
    "verify_lemma_constraints",
    "verify_positive_ricci",
    "vertical_ricci_lower",
    "warped_ricci_general",
]
