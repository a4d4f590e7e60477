import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import simpson

from warpcert.profiles import (
    PI,
    BumpWindowError,
    Interval,
    PiecewiseFn,
    ProfileSpecError,
    bump,
    const_profile,
    integrate_profile,
    neg_sin_fn,
    norm_cr_diff,
    sin_profile,
    zero_fn,
)

RNG = np.random.default_rng(42)


def piecewise_neg_sin():
    return PiecewiseFn([0.0, PI], [neg_sin_fn])


def dense_integral(fn, lo, hi, n=1_000_001):
    """Independent quadrature oracle: Simpson on a dense uniform grid."""
    xs = np.linspace(lo, hi, n)
    return simpson(fn(xs), x=xs)


class TestIntegrateProfile:
    def test_neg_sin_gives_sin(self):
        # f'' = -sin, f(0) = 0, f'(0) = 1 is solved by sin
        prof = integrate_profile(piecewise_neg_sin(), 0.0, 1.0)
        rs = np.linspace(0.0, PI, 1001)
        assert np.max(np.abs(prof.eval(rs) - np.sin(rs))) < 1e-10 * 2
        assert np.max(np.abs(prof.d1(rs) - np.cos(rs))) < 1e-10 * 2

    def test_zero_d2_gives_constant(self):
        prof = integrate_profile(PiecewiseFn([0.0, PI], [zero_fn]), 3.5, 0.0)
        rs = np.linspace(0.0, PI, 257)
        assert np.all(prof.eval(rs) == 3.5)
        assert np.all(prof.d1(rs) == 0.0)

    def test_neutralized_bump_rejoins_sin(self):
        # zero mass and zero first moment of the perturbation imply that both
        # value and slope rejoin sin after the window
        b = bump(0.8, 0.1, 0.25, neutralize_moments=True)
        assert abs(dense_integral(b, 0.7, 0.9)) < 1e-12 * 0.25 * 0.1
        assert abs(dense_integral(lambda r: r * b(r), 0.7, 0.9)) < 1e-12 * 0.25 * 0.1
        prof = integrate_profile(piecewise_neg_sin() + b, 0.0, 1.0)
        rs = np.linspace(0.95, PI, 257)
        assert np.max(np.abs(prof.eval(rs) - np.sin(rs))) < 1e-12
        assert np.max(np.abs(prof.d1(rs) - np.cos(rs))) < 1e-12

    def test_rejects_jump_discontinuity(self):
        step = PiecewiseFn([0.0, 1.0, PI],
                           [zero_fn, lambda r: np.ones_like(np.asarray(r, float))])
        with pytest.raises(ProfileSpecError, match="jump"):
            integrate_profile(step, 0.0, 0.0)

    def test_quadrature_consistency_random_radii(self):
        # d1(r) - d1(0) must equal the integral of d2 from 0 to r
        profs = [
            integrate_profile(piecewise_neg_sin(), 0.0, 1.0),
            integrate_profile(piecewise_neg_sin() + bump(0.8, 0.1, 0.25, True), 0.0, 1.0),
        ]
        rs = RNG.uniform(0.0, PI, size=1000)
        for prof in profs:
            for r in rs:
                lhs = prof.d1(r) - prof.d1(0.0)
                rhs = dense_integral(prof.d2_spec, 0.0, r, n=20001)
                assert abs(lhs - rhs) <= 1e-10 * (1.0 + abs(lhs))

    def test_eval_matches_two_stage_quadrature(self):
        prof = integrate_profile(piecewise_neg_sin() + bump(0.8, 0.1, 0.25, True), 0.0, 1.0)
        for r in [0.3, 0.77, 0.84, 2.5]:
            slope = lambda s, prof=prof: prof.d1(s)
            expected = prof.eval(0.0) + dense_integral(slope, 0.0, r, n=20001)
            assert abs(prof.eval(r) - expected) <= 1e-10 * (1.0 + abs(expected))

    def test_determinism(self):
        a = integrate_profile(piecewise_neg_sin() + bump(0.8, 0.1, 0.25, True), 0.0, 1.0)
        b = integrate_profile(piecewise_neg_sin() + bump(0.8, 0.1, 0.25, True), 0.0, 1.0)
        rs = RNG.uniform(0.0, PI, size=257)
        assert np.array_equal(a.eval(rs), b.eval(rs))
        assert np.array_equal(a.d1(rs), b.d1(rs))


class TestExactRegions:
    def test_sin_profile_is_bit_exact(self):
        prof = sin_profile()
        rs = np.concatenate([[0.0, PI], RNG.uniform(0.0, PI, 257)])
        assert np.array_equal(prof.eval(rs), np.sin(rs))
        assert np.array_equal(prof.d1(rs), np.cos(rs))
        assert np.array_equal(prof.d2(rs), -np.sin(rs))

    def test_const_profile_is_bit_exact(self):
        prof = const_profile(-0.125)
        rs = RNG.uniform(0.0, PI, 65)
        assert np.all(prof.eval(rs) == -0.125)
        assert np.all(prof.d1(rs) == 0.0)
        assert np.all(prof.d2(rs) == 0.0)

    def test_anchor_shift_keeps_derivatives(self):
        prof = sin_profile()
        shifted = prof.with_anchor_value(prof.anchor_value + 2.0)
        rs = RNG.uniform(0.0, PI, 65)
        assert np.array_equal(prof.d1(rs), shifted.d1(rs))
        assert np.array_equal(prof.d2(rs), shifted.d2(rs))


class TestBump:
    def test_peak_value_exact(self):
        b = bump(0.9, 0.2, 1.75)
        assert b(0.9) == 1.75

    def test_compact_support_flat_edges(self):
        b = bump(0.9, 0.2, 1.75)
        assert b(0.7) == 0.0 and b(1.1) == 0.0
        # all derivatives vanish at the edges: difference quotients collapse
        for h in (1e-4, 1e-5, 1e-6):
            assert abs(b(0.7 + h)) < h ** 4
            assert abs(b(1.1 - h)) < h ** 4

    def test_neutralized_moments_vanish(self):
        c, w, h = 1.2, 0.15, -0.6
        b = bump(c, w, h, neutralize_moments=True)
        tol = 1e-12 * abs(h) * w
        assert abs(dense_integral(b, c - w, c + w)) < tol
        assert abs(dense_integral(lambda r: r * b(r), c - w, c + w)) < tol

    def test_lobe_magnitudes_below_height(self):
        c, w, h = 0.9, 0.2, 1.0
        b = bump(c, w, h, neutralize_moments=True)
        xs = np.linspace(c - w, c - 0.3 * w, 4001)
        assert 0.0 < np.max(np.abs(b(xs))) < h
        assert b(c) == h

    def test_max_attained_only_at_center(self):
        c, w, h = 0.9, 0.2, 1.0
        b = bump(c, w, h, neutralize_moments=True)
        xs = np.linspace(c - w, c + w, 8001)
        vals = b(xs)
        assert np.max(vals) <= h
        assert np.max(vals[np.abs(xs - c) > 1e-6 * w]) < h

    def test_rejects_window_touching_domain_ends(self):
        with pytest.raises(BumpWindowError):
            bump(0.05, 0.1, 1.0)
        with pytest.raises(BumpWindowError):
            bump(PI - 0.05, 0.1, 1.0)
        with pytest.raises(BumpWindowError):
            bump(1.0, -0.1, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(t=st.floats(min_value=-0.2, max_value=0.2, allow_nan=False))
    def test_symmetry(self, t):
        b = bump(0.9, 0.2, 1.0)
        assert abs(b(0.9 + t) - b(0.9 - t)) <= 1e-13


class TestNormCrDiff:
    def test_identical_profiles(self):
        prof = sin_profile()
        assert norm_cr_diff(prof, prof, 2, Interval(0.0, PI), 128) == 0.0

    def test_sin_vs_zero_c1_is_one(self):
        assert norm_cr_diff(sin_profile(), const_profile(0.0), 1,
                            Interval(0.0, PI), 129) == 1.0

    def test_monotone_in_order(self):
        f, g = sin_profile(), const_profile(0.0)
        n0 = norm_cr_diff(f, g, 0, Interval(0.1, 1.2), 128)
        n1 = norm_cr_diff(f, g, 1, Interval(0.1, 1.2), 128)
        n2 = norm_cr_diff(f, g, 2, Interval(0.1, 1.2), 128)
        assert n0 <= n1 <= n2

    def test_region_list(self):
        regions = [Interval(0.0, 1.0), Interval(2.0, PI)]
        assert norm_cr_diff(sin_profile(), const_profile(0.0), 0, regions, 64) < 1.0

    def test_rejects_few_samples(self):
        with pytest.raises(ValueError):
            norm_cr_diff(sin_profile(), const_profile(0.0), 0, Interval(0.0, PI), 63)

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            norm_cr_diff(sin_profile(), const_profile(0.0), 3, Interval(0.0, PI), 64)


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(1.0, 0.5)
    iv = Interval(0.25, 0.75)
    assert iv.length == 0.5
    assert bool(iv.contains(0.5)) and not bool(iv.contains(0.8))


def test_scalar_and_array_paths_agree():
    prof = integrate_profile(piecewise_neg_sin() + bump(0.8, 0.1, 0.25, True), 0.0, 1.0)
    rs = RNG.uniform(0.0, PI, 33)
    arr = prof.eval(rs)
    for i, r in enumerate(rs):
        assert prof.eval(float(r)) == arr[i]
