import math

import numpy as np
import pytest

from warpcert.fd_oracle import (
    ChartDomainError,
    build_metric_chart,
    christoffel_fd,
    expected_blocks,
    oracle_comparison,
    ricci_fd,
    round_sphere_diag,
    sample_chart_points,
)
from warpcert.profiles import PI
from warpcert.synthesis import round_product_spec

RNG = np.random.default_rng(11)


def random_chart_point(field_, margin=0.4):
    lo = field_.chart_lo + margin
    hi = field_.chart_hi - margin
    return RNG.uniform(lo, hi)


class TestBuildMetricChart:
    def test_round_block_pattern(self, round2):
        field_ = build_metric_chart(round2)
        u1 = 0.9
        g = field_.components(np.array([PI / 2, 1.0, u1, 2.0]))
        want = np.diag([1.0, math.sin(PI / 2) ** 2, 1.0, math.sin(u1) ** 2])
        assert np.allclose(g, want, atol=1e-15)

    def test_positive_definite_at_random_points(self, case10):
        _, spec = case10
        field_ = build_metric_chart(spec)
        for _ in range(1000):
            g = field_.components(random_chart_point(field_))
            assert np.linalg.det(g) > 0.0
            assert np.all(np.diag(g) > 0.0)

    def test_off_diagonal_zero(self, case10):
        _, spec = case10
        field_ = build_metric_chart(spec)
        g = field_.components(random_chart_point(field_))
        assert np.array_equal(g - np.diag(np.diag(g)), np.zeros_like(g))

    def test_fiber_scaling(self, case100):
        params, spec = case100
        field_ = build_metric_chart(spec)
        r = 2.0
        g = field_.components(np.array([r, 1.0, PI / 2, 1.0]))
        scale = spec.lam ** 2 * math.exp(2 * spec.nu.eval(r))
        assert g[2, 2] == pytest.approx(scale, rel=1e-14)

    def test_rejects_outside_chart(self, round2):
        field_ = build_metric_chart(round2)
        with pytest.raises(ChartDomainError):
            field_.components(np.array([-0.1, 1.0, 1.0, 1.0]))
        with pytest.raises(ChartDomainError):
            field_.components(np.array([1.0, 1.0, PI + 0.1, 1.0]))


class TestChristoffel:
    def test_flat_radial_symbol_zero(self, round2):
        field_ = build_metric_chart(round2)
        gamma = christoffel_fd(field_, np.array([1.2, 1.0, 1.5, 1.0]), 1e-3)
        assert abs(gamma[0, 0, 0]) < 1e-12  # dr^2 block is flat

    def test_round_sphere_symbol(self, round2):
        field_ = build_metric_chart(round2)
        h = 1e-3
        # Gamma^r_{theta theta} = -sin r cos r; vanishes at the equator
        gamma = christoffel_fd(field_, np.array([PI / 2, 1.0, 1.5, 1.0]), h)
        assert abs(gamma[0, 1, 1]) <= 10 * h ** 2
        r = 1.0
        gamma = christoffel_fd(field_, np.array([r, 1.0, 1.5, 1.0]), h)
        assert gamma[0, 1, 1] == pytest.approx(-math.sin(r) * math.cos(r), abs=10 * h ** 2)

    def test_symmetry_in_lower_indices(self, case10):
        _, spec = case10
        field_ = build_metric_chart(spec)
        gamma = christoffel_fd(field_, random_chart_point(field_), 1e-3)
        assert np.array_equal(gamma, np.transpose(gamma, (0, 2, 1)))

    def test_rejects_stencil_leaving_chart(self, round2):
        field_ = build_metric_chart(round2)
        with pytest.raises(ChartDomainError):
            christoffel_fd(field_, np.array([5e-4, 1.0, 1.5, 1.0]), 1e-3)


class TestRicciFd:
    def test_round_product_blocks(self, round2):
        field_ = build_metric_chart(round2)
        h = 1e-3
        pt = np.array([1.1, 2.0, 1.3, 0.7])
        rep = ricci_fd(field_, pt, h, expected=expected_blocks(round2, 1.1))
        for key in ("rr", "tt", "fiber", "mixed"):
            assert rep.comparison[key] <= 10 * h ** 2
        assert rep.ricci_matrix[0, 0] == pytest.approx(1.0, abs=10 * h ** 2)
        assert rep.symmetry_defect <= 10 * h ** 2

    def test_fiber_isotropy(self):
        spec = round_product_spec(k=3)
        field_ = build_metric_chart(spec)
        h = 1e-3
        pt = np.array([1.3, 2.0, 1.2, 1.4, 0.7])
        rep = ricci_fd(field_, pt, h)
        comps = round_sphere_diag(pt[2:], 3)
        ratios = np.diag(rep.ricci_matrix)[2:] / comps
        assert np.max(np.abs(ratios - ratios[0])) <= 50 * h ** 2

    def test_halving_h_quarters_deviations(self, round2):
        field_ = build_metric_chart(round2)
        pt = np.array([0.9, 2.0, 1.3, 0.7])
        exp = expected_blocks(round2, 0.9)
        devs = []
        for h in (1e-3, 5e-4, 2.5e-4):
            rep = ricci_fd(field_, pt, h, expected=exp)
            devs.append(max(rep.comparison["tt"], rep.comparison["fiber"]))
        for a, b in zip(devs[:-1], devs[1:]):
            assert a / b == pytest.approx(4.0, rel=0.3)

    def test_mixed_block_small_on_synthesized(self, case10):
        params, spec = case10
        field_ = build_metric_chart(spec)
        h = 1e-3
        for pt in sample_chart_points(spec, 5, h, params=params):
            rep = ricci_fd(field_, pt, h, expected=expected_blocks(spec, float(pt[0])))
            assert rep.comparison["mixed"] <= 50 * h ** 2

    def test_rejects_2h_ball_leaving_chart(self, round2):
        field_ = build_metric_chart(round2)
        with pytest.raises(ChartDomainError):
            ricci_fd(field_, np.array([1.5e-3, 1.0, 1.5, 1.0]), 1e-3)


class TestOracleComparison:
    def test_synthesized_convergence_order(self, case10):
        params, spec = case10
        res = oracle_comparison(spec, 1e-3, params=params, n_points=10)
        for block in res["blocks"].values():
            assert 1.7 <= block["order"] <= 2.3
        assert res["mixed_max_h"] <= 50 * (1e-3) ** 2
        assert res["mixed_max_half"] <= 50 * (5e-4) ** 2

    def test_k3_spec(self):
        from warpcert.synthesis import build_counterexample
        params, spec = build_counterexample(10.0, 3)
        res = oracle_comparison(spec, 1e-3, params=params, n_points=5)
        for block in res["blocks"].values():
            assert 1.7 <= block["order"] <= 2.3

    def test_three_refinement_order_on_synthesized(self, case10):
        params, spec = case10
        field_ = build_metric_chart(spec)
        pt = sample_chart_points(spec, 1, 1e-3, params=params)[0]
        exp = expected_blocks(spec, float(pt[0]))
        devs = [max(ricci_fd(field_, pt, h, expected=exp).comparison[k]
                    for k in ("rr", "tt", "fiber"))
                for h in (1e-3, 5e-4, 2.5e-4)]
        for a, b in zip(devs[:-1], devs[1:]):
            assert 1.7 <= math.log2(a / b) <= 2.3

    def test_sample_points_avoid_window_and_poles(self, case10):
        params, spec = case10
        h = 1e-3
        for pt in sample_chart_points(spec, 50, h, params=params):
            assert pt[0] > params.p + params.delta
            assert 10 * h <= pt[0] <= PI - 10 * h

    def test_deterministic_sampling(self, case10):
        params, spec = case10
        a = sample_chart_points(spec, 7, 1e-3, params=params)
        b = sample_chart_points(spec, 7, 1e-3, params=params)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
