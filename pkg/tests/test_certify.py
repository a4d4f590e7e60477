import numpy as np
import pytest

from warpcert.certify import (
    build_certificate,
    forced_points,
    negative_region_measure,
    theorem2_sanity,
    verify_base_negative,
    verify_lemma_constraints,
    verify_positive_ricci,
)
from warpcert.curvature import base_ricci, base_ricci_values, horizontal_values, vertical_values
from warpcert.profiles import PI, const_profile, sin_profile
from warpcert.synthesis import WarpedProductSpec


class TestLemmaConstraints:
    def test_synthesized_all_pass(self, case10):
        params, spec = case10
        items = verify_lemma_constraints(spec, params, 2048)
        assert len(items) == 5
        assert all(it.passed for it in items)
        assert all(it.margin > 0 for it in items)
        assert not any(it.inconclusive for it in items)

    def test_nu_zero_mutation_fails_item4_at_p(self, case10):
        params, spec = case10
        mutated = WarpedProductSpec(phi=spec.phi, nu=const_profile(0.0),
                                    k=spec.k, lam=1.0, ricF_lower=spec.ricF_lower)
        items = verify_lemma_constraints(mutated, params, 2048)
        by_index = {it.index: it for it in items}
        assert not by_index[4].passed and by_index[4].margin < 0
        worst_r = float(by_index[4].detail.rsplit("r = ", 1)[1])
        assert abs(worst_r - params.p) <= params.delta
        # the violation is pinned at the peak: without the warp, the spike
        # makes both window inequalities fail at r = p itself
        assert -spec.phi.d2(params.p) / params.k < 0
        for i in (1, 2, 3, 5):
            assert by_index[i].passed

    def test_phi_sin_mutation_fails_item1(self, case10):
        params, spec = case10
        mutated = WarpedProductSpec(phi=sin_profile(), nu=spec.nu,
                                    k=spec.k, lam=spec.lam, ricF_lower=spec.ricF_lower)
        items = verify_lemma_constraints(mutated, params, 2048)
        by_index = {it.index: it for it in items}
        assert not by_index[1].passed and by_index[1].margin < 0
        for i in (2, 3, 4, 5):
            assert by_index[i].passed

    def test_grid_n_precondition(self, case10):
        params, spec = case10
        with pytest.raises(ValueError):
            verify_lemma_constraints(spec, params, 512)


class TestPositiveRicci:
    def test_round_product_minima(self, round2):
        res = verify_positive_ricci(round2, None, 2048)
        assert res.min_horiz_eigen_inside == pytest.approx(1.0, abs=1e-12)
        assert res.min_horiz_eigen_outside == pytest.approx(1.0, abs=1e-12)
        assert res.min_vert_lower == pytest.approx(round2.ricF_lower, abs=1e-12)

    def test_synthesized_c100(self, case100):
        params, spec = case100
        res = verify_positive_ricci(spec, params, 8192)
        assert res.min_horiz_eigen_inside > 0.0
        assert res.min_horiz_eigen_outside >= 0.5
        assert res.min_vert_lower > 0.0

    def test_sample_set_contains_critical_radii(self, case10):
        params, spec = case10
        pts = forced_points(spec, params)
        for r in (params.p, params.p - params.delta, params.p + params.delta,
                  params.p - 2 * params.delta):
            assert r in pts

    def test_witness_soundness_bitwise(self, case100):
        params, spec = case100
        res = verify_positive_ricci(spec, params, 2048)
        r, value = res.witnesses["vert"]
        assert vertical_values(spec, r) == value
        r, value = res.witnesses["horiz_outside"]
        A, _, _, eig_tt = horizontal_values(spec, r)
        assert value in (A, eig_tt)


class TestBaseNegative:
    def test_c10_witness(self, case10):
        params, spec = case10
        res = verify_base_negative(spec, 10.0, params)
        assert res.ok
        assert res.witness_r == params.p
        assert res.value <= -params.eta / (2 * params.p) < -10.0

    def test_c1000_end_to_end(self, case1000):
        params, spec = case1000
        res = verify_base_negative(spec, 1000.0, params)
        assert res.ok and res.value < -1000.0

    def test_round_sphere_reports_failure(self, round2):
        res = verify_base_negative(round2, 10.0)
        assert not res.ok
        assert res.value == pytest.approx(1.0, abs=1e-12)


class TestNegativeMeasure:
    def test_round_sphere_zero(self, round2):
        assert negative_region_measure(round2, 4096) == 0.0

    def test_bounded_by_window(self, case10):
        params, spec = case10
        grid_n = max(4096, int(32 * PI / params.delta))
        measure = negative_region_measure(spec, grid_n)
        assert 0.0 < measure <= 2 * params.delta + 2 * PI / grid_n

    def test_grid_n_precondition(self, round2):
        with pytest.raises(ValueError):
            negative_region_measure(round2, 1024)

    def test_negative_set_is_where_phi_pp_positive(self, case10):
        params, spec = case10
        rs = np.linspace(params.p - params.delta, params.p + params.delta, 4097)
        base = base_ricci_values(spec.phi, rs)
        assert np.array_equal(base < 0, spec.phi.d2(rs) > 0)


class TestTheorem2:
    def test_round_sphere(self, round2):
        r, value = theorem2_sanity(round2, 2048)
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_synthesized_has_positive_point(self, case10):
        params, spec = case10
        r, value = theorem2_sanity(spec, 2048)
        assert value > 0.0
        # near the poles the base curvature is exactly the round value
        assert base_ricci(spec.phi, 0.01) == 1.0


class TestCertificate:
    def test_verdict_pass_and_fields(self, case10):
        params, spec = case10
        cert = build_certificate(spec, params, 2048)
        assert cert.verdict == "pass"
        assert cert.base_min < -params.C
        assert cert.min_horiz_eigen_outside >= 0.5
        assert cert.min_vert_lower > 0.0
        assert len(cert.lemma_items) == 5
        d = cert.to_dict()
        assert d["verdict"] == "pass"
        assert set(d["witnesses"]) >= {"base_min", "vert", "horiz_inside",
                                       "horiz_outside", "theorem2"}

    def test_witness_bitwise_reproducible(self, case10):
        params, spec = case10
        cert = build_certificate(spec, params, 2048)
        assert base_ricci_values(spec.phi, cert.witness_r) == cert.base_min

    def test_grid_stability_one_percent(self, case10):
        params, spec = case10
        a = build_certificate(spec, params, 4096)
        b = build_certificate(spec, params, 8192)
        for name in ("min_horiz_eigen_inside", "min_horiz_eigen_outside",
                     "min_vert_lower", "base_min"):
            va, vb = getattr(a, name), getattr(b, name)
            assert abs(va - vb) <= 0.01 * max(abs(va), abs(vb))

    def test_deterministic(self, case10):
        params, spec = case10
        a = build_certificate(spec, params, 2048)
        b = build_certificate(spec, params, 2048)
        assert a.to_dict() == b.to_dict()

    def test_failed_verdict_for_mutation(self, case10):
        params, spec = case10
        mutated = WarpedProductSpec(phi=spec.phi, nu=const_profile(0.0),
                                    k=spec.k, lam=1.0, ricF_lower=spec.ricF_lower)
        cert = build_certificate(mutated, params, 2048)
        assert cert.verdict == "fail"
        assert cert.min_horiz_eigen_inside < 0.0  # the spike is unshielded
