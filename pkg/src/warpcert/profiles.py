"""Smooth functions on [0, pi] defined by a prescribed second derivative.

A profile is reconstructed from its second derivative (a piecewise-analytic
function) plus value/slope anchors at r = 0, via fixed-node Gauss-Legendre
panel quadrature, so evaluation is deterministic bit for bit.  Regions where
the profile coincides with a named closed form (sin, a constant) are declared
explicitly and evaluated from the closed form instead of quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

PI = math.pi

# Fixed quadrature rule: 24-point Gauss-Legendre on 16 subpanels per declared
# piece.  Constants are frozen so rebuilt profiles are bitwise reproducible.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_PANELS_PER_PIECE = 16

ClosedForm = Union[str, tuple]  # "sin" or ("const", value)


class ProfileSpecError(ValueError):
    """The prescribed second derivative violates a construction precondition."""


class BumpWindowError(ValueError):
    """Bump window invalid, touching the domain ends, or too narrow."""


@dataclass(frozen=True)
class Interval:
    """Closed subinterval of [0, pi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi <= PI + 1e-12):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, r):
        return (np.asarray(r) >= self.lo) & (np.asarray(r) <= self.hi)


def _as_1d(r):
    arr = np.asarray(r, dtype=float)
    return arr.reshape(-1), arr.shape


def flat_bump(x):
    """C-infinity bump on [-1, 1]: exp(1 - 1/(1 - x^2)), zero outside.

    Peak value 1 at x = 0; all derivatives vanish at the support boundary.
    """
    arr, shape = _as_1d(x)
    out = np.zeros_like(arr)
    m = np.abs(arr) < 1.0
    t = arr[m]
    out[m] = np.exp(1.0 - 1.0 / (1.0 - t * t))
    return out.reshape(shape) if shape else float(out[0])


def smoothstep(x):
    """C-infinity monotone step: 0 for x <= 0, 1 for x >= 1, strictly rising between."""
    arr, shape = _as_1d(x)
    out = np.zeros_like(arr)
    out[arr >= 1.0] = 1.0
    m = (arr > 0.0) & (arr < 1.0)
    t = arr[m]
    a = np.exp(-1.0 / t)
    b = np.exp(-1.0 / (1.0 - t))
    out[m] = a / (a + b)
    return out.reshape(shape) if shape else float(out[0])


def panel_integral(fn: Callable, lo: float, hi: float, panels: int = _PANELS_PER_PIECE) -> float:
    """Integral of fn over [lo, hi] with the module's fixed panel rule."""
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = edges[:-1] + half
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    w = half[:, None] * _GL_WEIGHTS[None, :]
    vals = np.asarray(fn(nodes.ravel()), dtype=float).reshape(nodes.shape)
    return float((w * vals).sum())


# Mass of the unit flat bump over its support; fixed numeric constant of the rule.
FLAT_BUMP_MASS = panel_integral(flat_bump, -1.0, 1.0)


class PiecewiseFn:
    """Function on [0, pi] given by analytic formulas on consecutive pieces.

    ``breaks`` is increasing with breaks[0] = 0 and breaks[-1] = pi;
    ``fns[i]`` is a vectorized callable valid on [breaks[i], breaks[i+1]].
    """

    def __init__(self, breaks: Sequence[float], fns: Sequence[Callable]):
        breaks = np.asarray(breaks, dtype=float)
        if breaks.ndim != 1 or len(breaks) != len(fns) + 1:
            raise ValueError("need len(breaks) == len(fns) + 1")
        if np.any(np.diff(breaks) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if abs(breaks[0]) > 1e-15 or abs(breaks[-1] - PI) > 1e-12:
            raise ValueError("pieces must cover [0, pi]")
        self.breaks = breaks
        self.fns = list(fns)

    def _piece_index(self, r):
        idx = np.searchsorted(self.breaks, r, side="right") - 1
        return np.clip(idx, 0, len(self.fns) - 1)

    def __call__(self, r):
        arr, shape = _as_1d(r)
        out = np.empty_like(arr)
        idx = self._piece_index(arr)
        for i in np.unique(idx):
            m = idx == i
            out[m] = self.fns[i](arr[m])
        return out.reshape(shape) if shape else float(out[0])

    def __add__(self, other: "PiecewiseFn") -> "PiecewiseFn":
        breaks = np.union1d(self.breaks, other.breaks)
        fns = []
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            mid = 0.5 * (lo + hi)
            fa = self.fns[int(self._piece_index(mid))]
            fb = other.fns[int(other._piece_index(mid))]
            fns.append(lambda r, fa=fa, fb=fb: fa(r) + fb(r))
        return PiecewiseFn(breaks, fns)

    def __mul__(self, scalar: float) -> "PiecewiseFn":
        s = float(scalar)
        return PiecewiseFn(self.breaks, [lambda r, f=f: s * f(r) for f in self.fns])

    __rmul__ = __mul__

    def continuity_jumps(self):
        """(breakpoint, |jump|, scale) at each interior breakpoint."""
        rows = []
        for i in range(1, len(self.breaks) - 1):
            b = self.breaks[i]
            left = float(np.asarray(self.fns[i - 1](np.array([b])))[0])
            right = float(np.asarray(self.fns[i](np.array([b])))[0])
            rows.append((b, abs(left - right), max(abs(left), abs(right))))
        return rows


def zero_fn(r):
    return np.zeros_like(np.asarray(r, dtype=float))


def piecewise_constant(value: float) -> PiecewiseFn:
    v = float(value)
    return PiecewiseFn([0.0, PI], [lambda r: np.full_like(np.asarray(r, float), v)])


def neg_sin_fn(r):
    return -np.sin(np.asarray(r, dtype=float))


class SmoothProfile:
    """C^2 function on [0, pi] reconstructed from its prescribed second derivative.

    eval/d1/d2 accept scalars or arrays.  Immutable after construction; safe
    to share across threads.
    """

    def __init__(self, d2_spec: PiecewiseFn, anchor_value: float, anchor_slope: float,
                 exact_regions: Sequence[tuple] = (), _tables=None):
        self.d2_spec = d2_spec
        self.anchor_value = float(anchor_value)
        self.anchor_slope = float(anchor_slope)
        self.exact_regions = tuple(exact_regions)
        for iv, form in self.exact_regions:
            if not isinstance(iv, Interval):
                raise TypeError("exact region key must be an Interval")
            if form != "sin" and not (isinstance(form, tuple) and form[0] == "const"):
                raise ValueError(f"unknown closed form {form!r}")
        if _tables is not None:
            self._edges, self._prefix0, self._prefix1 = _tables
        else:
            self._build_tables()

    def _build_tables(self):
        edges_list = [
            np.linspace(lo, hi, _PANELS_PER_PIECE + 1)
            for lo, hi in zip(self.d2_spec.breaks[:-1], self.d2_spec.breaks[1:])
        ]
        edges = np.unique(np.concatenate(edges_list))
        half = 0.5 * np.diff(edges)
        mid = edges[:-1] + half
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        w = half[:, None] * _GL_WEIGHTS[None, :]
        vals = self.d2_spec(nodes.ravel()).reshape(nodes.shape)
        p0 = (w * vals).sum(axis=1)
        p1 = (w * vals * nodes).sum(axis=1)
        self._edges = edges
        self._prefix0 = np.concatenate([[0.0], np.cumsum(p0)])
        self._prefix1 = np.concatenate([[0.0], np.cumsum(p1)])

    def _partials(self, arr):
        """(int_0^r d2, int_0^r s*d2(s) ds) for a 1-D query array."""
        idx = np.clip(np.searchsorted(self._edges, arr, side="right") - 1,
                      0, len(self._edges) - 2)
        t0 = self._edges[idx]
        half = 0.5 * (arr - t0)
        mid = t0 + half
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        w = half[:, None] * _GL_WEIGHTS[None, :]
        vals = self.d2_spec(nodes.ravel()).reshape(nodes.shape)
        i0 = self._prefix0[idx] + (w * vals).sum(axis=1)
        i1 = self._prefix1[idx] + (w * vals * nodes).sum(axis=1)
        return i0, i1

    def _override(self, arr, out, pick):
        for iv, form in self.exact_regions:
            m = (arr >= iv.lo) & (arr <= iv.hi)
            if not np.any(m):
                continue
            if form == "sin":
                out[m] = pick[0](arr[m])
            else:
                out[m] = pick[1](arr[m], form[1])
        return out

    def eval(self, r):
        arr, shape = _as_1d(r)
        i0, i1 = self._partials(arr)
        out = self.anchor_value + self.anchor_slope * arr + (arr * i0 - i1)
        out = self._override(arr, out, (np.sin, lambda x, c: np.full_like(x, c)))
        return out.reshape(shape) if shape else float(out[0])

    def d1(self, r):
        arr, shape = _as_1d(r)
        i0, _ = self._partials(arr)
        out = self.anchor_slope + i0
        out = self._override(arr, out, (np.cos, lambda x, c: np.zeros_like(x)))
        return out.reshape(shape) if shape else float(out[0])

    def d2(self, r):
        arr, shape = _as_1d(r)
        out = np.asarray(self.d2_spec(arr), dtype=float).reshape(arr.shape)
        out = self._override(arr, out, (lambda x: -np.sin(x), lambda x, c: np.zeros_like(x)))
        return out.reshape(shape) if shape else float(out[0])

    def derivative(self, r, order: int):
        if order == 0:
            return self.eval(r)
        if order == 1:
            return self.d1(r)
        if order == 2:
            return self.d2(r)
        raise ValueError("order must be 0, 1 or 2")

    def in_form(self, r, form_kind: str):
        """Boolean mask: r lies in an exact region of the given kind ('sin'/'const')."""
        arr, shape = _as_1d(r)
        out = np.zeros(arr.shape, dtype=bool)
        for iv, form in self.exact_regions:
            kind = "sin" if form == "sin" else "const"
            if kind == form_kind:
                out |= (arr >= iv.lo) & (arr <= iv.hi)
        return out.reshape(shape) if shape else bool(out[0])

    def with_exact_regions(self, regions) -> "SmoothProfile":
        return SmoothProfile(self.d2_spec, self.anchor_value, self.anchor_slope,
                             regions, _tables=(self._edges, self._prefix0, self._prefix1))

    def with_anchor_value(self, value: float) -> "SmoothProfile":
        """Same profile shifted by a constant (d1/d2 bitwise unchanged)."""
        return SmoothProfile(self.d2_spec, value, self.anchor_slope,
                             self.exact_regions, _tables=(self._edges, self._prefix0, self._prefix1))


def integrate_profile(d2_spec: PiecewiseFn, anchor_value: float, anchor_slope: float,
                      exact_regions: Sequence[tuple] = ()) -> SmoothProfile:
    """Build a SmoothProfile from a continuous prescribed second derivative.

    Rejects second derivatives whose pieces do not match at the breakpoints
    (jump beyond 1e-12 relative to the local scale).
    """
    for b, jump, scale in d2_spec.continuity_jumps():
        if jump > 1e-12 * (1.0 + scale):
            raise ProfileSpecError(
                f"d2_spec has a jump of {jump:.3e} at r = {b:.6g}")
    return SmoothProfile(d2_spec, anchor_value, anchor_slope, exact_regions)


def sin_profile() -> SmoothProfile:
    """The round profile: sin on [0, pi], exact everywhere."""
    return integrate_profile(
        PiecewiseFn([0.0, PI], [neg_sin_fn]), 0.0, 1.0,
        exact_regions=[(Interval(0.0, PI), "sin")])


def const_profile(value: float) -> SmoothProfile:
    """Constant profile, exact everywhere."""
    return integrate_profile(
        piecewise_constant(0.0) * 0.0, float(value), 0.0,
        exact_regions=[(Interval(0.0, PI), ("const", float(value)))])


def _solve_lobe_amplitudes(m0: float, m1: float, c1: float, c2: float, lobe_mass: float):
    """Amplitudes (a1, a2) of two unit-height lobes cancelling mass m0 and first moment m1.

    Unit lobes centred at c1 < c2 are symmetric, so their moments are
    (lobe_mass, c_i * lobe_mass).
    """
    mat = np.array([[lobe_mass, lobe_mass], [c1 * lobe_mass, c2 * lobe_mass]])
    rhs = np.array([-m0, -m1])
    a1, a2 = np.linalg.solve(mat, rhs)
    return float(a1), float(a2)


def bump(center: float, halfwidth: float, height: float,
         neutralize_moments: bool = False) -> PiecewiseFn:
    """C-infinity bump supported in (center - halfwidth, center + halfwidth).

    Attains exactly ``height`` at ``center`` and that extremum only there.
    With ``neutralize_moments`` the window also carries two flanking lobes of
    the opposite sign solving int b = int r*b = 0; each lobe stays strictly
    below |height| in magnitude.
    """
    c, w, h = float(center), float(halfwidth), float(height)
    if w <= 0.0:
        raise BumpWindowError("halfwidth must be positive")
    if not (0.0 < c - w and c + w < PI):
        raise BumpWindowError(
            f"window [{c - w:.6g}, {c + w:.6g}] must lie strictly inside (0, pi)")

    if not neutralize_moments:
        return PiecewiseFn(
            [0.0, c - w, c + w, PI],
            [zero_fn, lambda r: h * flat_bump((r - c) / w), zero_fn])

    w1 = 0.3 * w          # peak halfwidth
    wl = 0.25 * w         # lobe halfwidth
    c1, c2 = c - 0.6 * w, c + 0.6 * w
    m0 = h * w1 * FLAT_BUMP_MASS
    a1, a2 = _solve_lobe_amplitudes(m0, c * m0, c1, c2, wl * FLAT_BUMP_MASS)
    worst = max(abs(a1), abs(a2))
    if worst >= abs(h):
        need = w * worst / (0.95 * abs(h))
        raise BumpWindowError(
            f"window too narrow for moment lobes (|lobe| = {worst:.3g} >= |height|);"
            f" widen halfwidth to at least {need:.3g}")

    breaks = [0.0, c - w, c1 - wl, c1 + wl, c - w1, c + w1, c2 - wl, c2 + wl, c + w, PI]
    fns = [
        zero_fn,
        zero_fn,
        lambda r: a1 * flat_bump((r - c1) / wl),
        zero_fn,
        lambda r: h * flat_bump((r - c) / w1),
        zero_fn,
        lambda r: a2 * flat_bump((r - c2) / wl),
        zero_fn,
        zero_fn,
    ]
    return PiecewiseFn(breaks, fns)


def norm_cr_diff(f: SmoothProfile, g: SmoothProfile, order: int,
                 regions, samples: int) -> float:
    """Sampled sup over derivative orders 0..order of |f^(j) - g^(j)| on regions.

    ``regions`` is an Interval or a sequence of them; each region is sampled
    at ``samples`` uniform points including its endpoints.
    """
    if samples < 64:
        raise ValueError("samples must be >= 64")
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    if isinstance(regions, Interval):
        regions = [regions]
    worst = 0.0
    for iv in regions:
        xs = np.linspace(iv.lo, iv.hi, samples)
        for j in range(order + 1):
            worst = max(worst, float(np.max(np.abs(f.derivative(xs, j) - g.derivative(xs, j)))))
    return worst
