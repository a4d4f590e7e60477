"""Construction of the warped-product counterexample data for a target C.

Given C > 0 and a fiber dimension k >= 2, this module produces profiles
(phi, nu) on [0, pi] and a parameter pack (p, eta, delta, epsilon, lambda)
such that the rotationally symmetric base metric dr^2 + phi^2 dtheta^2 has
Ricci curvature below -C at r = p while the warped product with any fiber of
Ricci >= ricF_lower keeps strictly positive Ricci curvature everywhere.

The perturbation lives in a window around p: phi'' is blended up to the
positive value eta exactly at p, with flanking negative lobes cancelling the
zeroth and first moments of the perturbation so phi rejoins sin identically
outside the window.  nu ramps down, holds a negative-second-derivative
plateau across the window, then relaxes back to a constant on a long gentle
ramp so its C^2 size stays O(eta/k) outside the window.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .profiles import (
    PI,
    Interval,
    PiecewiseFn,
    SmoothProfile,
    flat_bump,
    integrate_profile,
    neg_sin_fn,
    norm_cr_diff,
    panel_integral,
    sin_profile,
    smoothstep,
    zero_fn,
    _solve_lobe_amplitudes,
    FLAT_BUMP_MASS,
)


class InfeasibleSynthesisError(RuntimeError):
    """A stated inequality cannot be met with the current parameters."""


# Parameter schedule (artifact choices; the construction only needs existence).
ETA_CAP = 1e-2
P_CAP = PI / 8
DELTA_FRACTION = 0.1
EPSILON_CAP = 1e-3
MAX_DELTA_HALVINGS = 40

# phi window layout, relative to the window halfwidth delta.
PEAK_FRACTION = 0.3
LOBE_FRACTION = 0.25
LOBE_OFFSET = 0.6

# nu regime constants (in units of eta/k and eta/(k*p)).
PLATEAU_LEVEL = 3.0        # nu'' = -3 eta/(k p) across the window
ENTRY_SLOPE = 3.0          # nu'(p - delta) = -3 eta/k
EXIT_LEVEL = 0.5           # |nu''(p + delta)| = eta/(2k)
SHOULDER_FRACTION = 0.125  # rho = delta/8: width of the in-window release ramp
RECOVERY_LENGTH = 1.6
RECOVERY_END_CAP = 0.85 * PI
NU_C2_BOUND = 20.0         # |nu|_C2 <= 20 eta/k away from the window


@dataclass(frozen=True)
class SynthesisParams:
    """Full parameter pack tying the window geometry to the target C."""

    C: float
    k: int
    p: float
    eta: float
    delta: float
    epsilon: float
    lam: float = 1.0

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if int(self.k) != self.k or self.k < 2:
            raise ValueError("k must be an integer >= 2")
        if not (0.0 < self.p < PI / 4):
            raise ValueError("p must lie in (0, pi/4)")
        if self.eta <= 0 or self.delta <= 0 or self.epsilon <= 0:
            raise ValueError("eta, delta, epsilon must be positive")
        if (self.eta / self.k) ** 2 >= self.eta / (100.0 * self.k * self.p):
            raise ValueError("eta too large: need (eta/k)^2 < eta/(100 k p)")
        if self.delta >= self.p / 2:
            raise ValueError("delta must be < p/2")
        if not (self.p - 2 * self.delta > 0 and self.p + self.delta < PI / 4 + self.delta):
            raise ValueError("window [p-2delta, p+delta] must lie in (0, pi/4 + delta)")
        if not (0.0 < self.lam <= 1.0):
            raise ValueError("lam must lie in (0, 1]")

    @property
    def window(self) -> Interval:
        """The nu perturbation window (p - 2 delta, p + delta)."""
        return Interval(self.p - 2 * self.delta, self.p + self.delta)

    @property
    def phi_window(self) -> Interval:
        """The phi perturbation window (p - delta, p + delta)."""
        return Interval(self.p - self.delta, self.p + self.delta)


@dataclass(frozen=True)
class WarpedProductSpec:
    """Everything needed to evaluate the warped-product curvature formulas."""

    phi: SmoothProfile
    nu: SmoothProfile
    k: int
    lam: float
    ricF_lower: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise ValueError("k must be an integer >= 2")
        if not (0.0 < self.lam <= 1.0):
            raise ValueError("lam must lie in (0, 1]")
        if self.ricF_lower < 1.0:
            raise ValueError("ricF_lower must be >= 1")
        for r, name in ((0.0, "0"), (PI, "pi")):
            if abs(self.phi.eval(r)) > 1e-12:
                raise ValueError(f"phi must vanish at r = {name}")
        probe = np.linspace(1e-3, PI - 1e-3, 257)
        if np.any(self.phi.eval(probe) <= 0.0):
            raise ValueError("phi must be positive on (0, pi)")


def choose_parameters(C: float, k: int = 2) -> SynthesisParams:
    """Parameter schedule realizing eta/(2p) > C with >= 10% margin.

    Two-pass fixpoint: p is set from the current eta, then eta is capped by
    the smallness condition (eta/k)^2 < eta/(100 k p) with a factor-2 margin,
    then p is re-derived.  Every C > 0 admits parameters (p shrinks with C).
    """
    if C <= 0:
        raise ValueError("C must be positive")
    if int(k) != k or k < 2:
        raise ValueError("k must be an integer >= 2")
    eta = ETA_CAP
    for _ in range(2):
        p = min(P_CAP, 0.9 * eta / (2.0 * C))
        eta = min(ETA_CAP, k / (200.0 * p))
    p = min(P_CAP, 0.9 * eta / (2.0 * C))
    delta = DELTA_FRACTION * p
    epsilon = min(EPSILON_CAP, eta / 100.0)
    return SynthesisParams(C=float(C), k=int(k), p=p, eta=eta, delta=delta,
                           epsilon=epsilon)


def _phi_d2_spec(params: SynthesisParams):
    """Prescribed phi'' and the window bookkeeping.

    Inside the peak, phi'' is the convex blend psi*eta + (1-psi)*(-sin), so
    its global maximum is attained exactly (and only) at p; the flanking
    lobes are nonpositive and cancel both moments of phi'' + sin.
    """
    p, d = params.p, params.delta
    w1 = PEAK_FRACTION * d
    wl = LOBE_FRACTION * d
    c1, c2 = p - LOBE_OFFSET * d, p + LOBE_OFFSET * d

    def peak_excess(r):
        # phi'' + sin inside the peak
        return flat_bump((r - p) / w1) * (params.eta + np.sin(r))

    m0 = panel_integral(peak_excess, p - w1, p + w1)
    m1 = panel_integral(lambda r: r * peak_excess(r), p - w1, p + w1)
    a1, a2 = _solve_lobe_amplitudes(m0, m1, c1, c2, wl * FLAT_BUMP_MASS)
    if not (a1 < 0 and a2 < 0):
        raise InfeasibleSynthesisError(
            f"moment lobes must be negative, got ({a1:.3g}, {a2:.3g})")

    def blend(r):
        psi = flat_bump((r - p) / w1)
        return psi * params.eta + (1.0 - psi) * (-np.sin(r))

    breaks = [0.0, p - d, c1 - wl, c1 + wl, p - w1, p + w1, c2 - wl, c2 + wl, p + d, PI]
    fns = [
        neg_sin_fn,
        neg_sin_fn,
        lambda r: -np.sin(r) + a1 * flat_bump((r - c1) / wl),
        neg_sin_fn,
        blend,
        neg_sin_fn,
        lambda r: -np.sin(r) + a2 * flat_bump((r - c2) / wl),
        neg_sin_fn,
        neg_sin_fn,
    ]
    return PiecewiseFn(breaks, fns), (a1, a2)


def synthesize_phi(params: SynthesisParams) -> SmoothProfile:
    """Profile with phi''(p) = eta as its sole maximum, phi = sin off the window."""
    d2, _ = _phi_d2_spec(params)
    p, d = params.p, params.delta
    phi = integrate_profile(
        d2, 0.0, 1.0,
        exact_regions=[(Interval(0.0, p - d), "sin"), (Interval(p + d, PI), "sin")])

    if phi.d2(p) != params.eta:
        raise InfeasibleSynthesisError("phi''(p) != eta")
    win = np.linspace(p - d, p + d, 4097)
    win_vals = phi.d2(win)
    if np.max(win_vals) > params.eta:
        raise InfeasibleSynthesisError("phi'' exceeds eta inside the window")
    # The blend saturates to eta in floats for |r - p| < ~1e-8 delta; demand
    # strict decrease outside that collar.
    off = win_vals[np.abs(win - p) > 1e-7 * d]
    if np.max(off) >= params.eta:
        raise InfeasibleSynthesisError("phi'' not maximal only at p")
    c1 = norm_cr_diff(phi, sin_profile(), 1, Interval(0.0, PI), 4096)
    if c1 >= params.epsilon:
        raise InfeasibleSynthesisError(
            f"|phi - sin|_C1 = {c1:.3e} >= epsilon = {params.epsilon:.3e}")
    if np.any(phi.eval(win) <= 0.0):
        raise InfeasibleSynthesisError("phi not positive inside the window")
    return phi


def _nu_geometry(params: SynthesisParams):
    p, d, eta, k = params.p, params.delta, params.eta, params.k
    rho = SHOULDER_FRACTION * d
    a = p - 2 * d
    m1 = p - d
    m2 = p + d - 2 * rho
    m3 = p + d
    length = min(RECOVERY_LENGTH, 0.92 * (RECOVERY_END_CAP - m3))
    m4 = m3 + length
    q_pl = PLATEAU_LEVEL * eta / (k * p)
    mu = EXIT_LEVEL * eta / k
    return a, m1, m2, m3, m4, q_pl, mu


def synthesize_nu(phi: SmoothProfile, params: SynthesisParams) -> SmoothProfile:
    """Warping exponent: zero left of the window, plateau across it, gentle exit.

    nu'' regimes: flat zero on [0, p-2delta]; a strictly negative dip over
    [p-2delta, p-delta] delivering nu'(p-delta) = -3 eta/k; the plateau
    -3 eta/(k p) over the window (released to -eta/(2k) on the last
    delta/4 sliver so the C^2 bound holds at p+delta); a long positive table
    ramp returning nu' to zero; constant afterwards.
    """
    p, d, eta, k = params.p, params.delta, params.eta, params.k
    a, m1, m2, m3, m4, q_pl, mu = _nu_geometry(params)
    if m4 >= PI:
        raise InfeasibleSynthesisError("no room for the recovery ramp")

    # Region II shape: dip beta (support [0, 0.9] in window units) plus the
    # plateau shoulder S2 rising on [0.5, 1]; both flat at the junctions.
    def beta1(r):
        return flat_bump(((r - a) / d - 0.45) / 0.45)

    def shoulder_in(r):
        return smoothstep(((r - a) / d - 0.5) / 0.5)

    i_beta = panel_integral(beta1, a, m1)
    i_sh = panel_integral(shoulder_in, a, m1)
    amp_dip = (ENTRY_SLOPE * eta / k - q_pl * i_sh) / i_beta
    if amp_dip <= 0:
        raise InfeasibleSynthesisError("region-II dip amplitude must be positive")

    def f_region2(r):
        return -amp_dip * beta1(r) - q_pl * shoulder_in(r)

    def f_release(r):
        # convex combination, exact at both junctions even when q_pl >> mu
        s = smoothstep((r - m2) / (m3 - m2))
        return -(q_pl * (1.0 - s) + mu * s)

    length = m4 - m3

    def decay(r):
        return 1.0 - smoothstep((r - m3) / (0.1 * length))

    def table(r):
        x = (r - m3) / length
        return smoothstep((x - 0.08) / 0.25) - smoothstep((x - 0.70) / 0.25)

    slope_m3 = -(ENTRY_SLOPE * eta / k) - q_pl * (m2 - m1) \
        + panel_integral(f_release, m2, m3)
    i_decay = panel_integral(decay, m3, m4)
    i_table = panel_integral(table, m3, m4)
    amp_rec = (-slope_m3 + mu * i_decay) / i_table

    def f_recovery(r):
        return -mu * decay(r) + amp_rec * table(r)

    d2 = PiecewiseFn(
        [0.0, a, m1, m2, m3, m4, PI],
        [zero_fn, f_region2, lambda r: np.full_like(np.asarray(r, float), -q_pl),
         f_release, f_recovery, zero_fn])
    raw = integrate_profile(d2, 0.0, 0.0)
    nu_inf = raw.eval(m4)
    nu = raw.with_exact_regions(
        [(Interval(0.0, a), ("const", 0.0)), (Interval(m4, PI), ("const", nu_inf))])

    _validate_nu(nu, params)
    return nu


def _validate_nu(nu: SmoothProfile, params: SynthesisParams) -> None:
    p, d, eta, k = params.p, params.delta, params.eta, params.k
    a, m1, m2, m3, m4, q_pl, mu = _nu_geometry(params)

    def fail(msg):
        raise InfeasibleSynthesisError(msg)

    target = -ENTRY_SLOPE * eta / k
    if abs(nu.d1(m1) - target) > 1e-9 * abs(target):
        fail(f"nu'(p-delta) = {nu.d1(m1):.6e} != -3 eta/k = {target:.6e}")

    xs = np.linspace(a, m1, 2049)[1:]
    if np.any(nu.d2(xs) + nu.d1(xs) ** 2 >= 0):
        fail("nu'' + nu'^2 not negative on (p-2delta, p-delta]")

    xs = np.linspace(m1, m2, 2049)
    if np.any(nu.d2(xs) + nu.d1(xs) ** 2 >= -2 * eta / (k * p)):
        fail("nu'' + nu'^2 not below -2 eta/(k p) on the plateau")
    if np.any(nu.d1(xs) / math.sqrt(2.0) >= -2 * eta / k):
        fail("nu'/sqrt(2) not below -2 eta/k on the plateau")

    xs = np.linspace(m1, m3, 2049)
    vals = nu.d2(xs)
    if np.any(vals >= 0) or np.any(vals < -4 * eta / (k * p)):
        fail("nu'' outside [-4 eta/(k p), 0) on [p-delta, p+delta]")

    s3 = nu.d1(m3)
    if not (-ENTRY_SLOPE * eta / k - 8 * d * eta / (k * p) <= s3 < 0):
        fail(f"nu'(p+delta) = {s3:.6e} outside the stated bracket")

    bound = NU_C2_BOUND * eta / k
    for lo, hi in ((0.0, a), (m3, PI)):
        xs = np.linspace(lo, hi, 4097)
        worst = max(np.max(np.abs(nu.eval(xs))), np.max(np.abs(nu.d1(xs))),
                    np.max(np.abs(nu.d2(xs))))
        if worst > bound:
            fail(f"|nu|_C2 = {worst:.3e} exceeds 20 eta/k = {bound:.3e} off the window")

    xs = np.linspace(0.0, PI, 8193)
    if np.any(nu.d1(xs) > 1e-12 * eta / k):
        fail("nu' must be nonpositive everywhere")


def choose_lambda(phi: SmoothProfile, nu: SmoothProfile, k: int,
                  ricF_lower: float) -> float:
    """Fiber shrink factor making the vertical Ricci bound at least ricF_lower/2.

    Solves lam^2 * sup_r e^{2 nu} * max(0, nu'' + phi' nu'/phi + k nu'^2)
    <= ricF_lower / 2 at equality, capped at 1.
    """
    if ricF_lower < 1.0:
        raise ValueError("ricF_lower must be >= 1")
    rs = np.unique(np.concatenate([
        np.linspace(0.0, PI, 8193), nu.d2_spec.breaks, phi.d2_spec.breaks]))
    dnu = nu.d1(rs)
    term = nu.d2(rs) + k * dnu ** 2
    m = dnu != 0.0
    term[m] += phi.d1(rs[m]) * dnu[m] / phi.eval(rs[m])
    sup = float(np.max(np.exp(2.0 * nu.eval(rs)) * np.maximum(term, 0.0)))
    if sup <= 0.0:
        return 1.0
    return min(1.0, math.sqrt(ricF_lower / (2.0 * sup)))


def build_counterexample(C: float, k: int = 2,
                         ricF_lower: float | None = None):
    """Full pipeline for a target C: returns (params, spec).

    Infeasibility (an inequality failing at the current window width) is
    retried with delta halved, at most MAX_DELTA_HALVINGS times; the final
    delta is recorded in the returned params.
    """
    params = choose_parameters(C, k)
    if ricF_lower is None:
        ricF_lower = float(k - 1)
    last_err = None
    for _ in range(MAX_DELTA_HALVINGS + 1):
        try:
            phi = synthesize_phi(params)
            nu = synthesize_nu(phi, params)
            break
        except InfeasibleSynthesisError as err:
            last_err = err
            params = dataclasses.replace(params, delta=params.delta / 2.0)
    else:
        raise InfeasibleSynthesisError(
            f"no feasible delta after {MAX_DELTA_HALVINGS} halvings: {last_err}")
    lam = choose_lambda(phi, nu, params.k, ricF_lower)
    params = dataclasses.replace(params, lam=lam)
    spec = WarpedProductSpec(phi=phi, nu=nu, k=params.k, lam=lam,
                             ricF_lower=ricF_lower)
    return params, spec


def round_product_spec(k: int = 2, lam: float = 1.0,
                       ricF_lower: float | None = None) -> WarpedProductSpec:
    """Unperturbed baseline: phi = sin, nu = 0."""
    from .profiles import const_profile
    if ricF_lower is None:
        ricF_lower = float(k - 1)
    return WarpedProductSpec(phi=sin_profile(), nu=const_profile(0.0),
                             k=k, lam=lam, ricF_lower=ricF_lower)
