import math

import numpy as np
import pytest

from graphfuse.fusion import (
    NullReference,
    WeightScheme,
    adaptive_weights,
    critical_value,
    equal_weights,
    fuse,
    power,
)
from graphfuse.fusion import test_at as run_test_at


class TestWeightScheme:
    def test_valid(self):
        s = WeightScheme("adaptive", (1, 2, 7))
        assert s.subset == (1, 2, 7)
        assert list(s.columns) == [0, 1, 6]

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            WeightScheme("fancy", (1,))

    def test_empty_subset(self):
        with pytest.raises(ValueError):
            WeightScheme("equal", ())

    def test_duplicate_ids(self):
        with pytest.raises(ValueError):
            WeightScheme("equal", (2, 2))

    def test_out_of_range_id(self):
        with pytest.raises(ValueError):
            WeightScheme("equal", (0,))
        with pytest.raises(ValueError):
            WeightScheme("equal", (10,))


class TestEqualWeights:
    def test_nine(self):
        assert np.allclose(equal_weights(9), np.full(9, 1.0 / 9.0))

    def test_one(self):
        assert list(equal_weights(1)) == [1.0]

    def test_two(self):
        assert list(equal_weights(2)) == [0.5, 0.5]

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            equal_weights(0)


class TestAdaptiveWeights:
    def test_direct_formula(self):
        ref = NullReference(np.zeros((2, 2)), np.array([0.0, 0.0]), np.array([1.0, 1.0]))
        assert list(adaptive_weights([2.0, -1.0], ref)) == [2.0, 1.0]

    def test_zero_at_null_mean(self):
        ref = NullReference(np.zeros((2, 3)), np.array([1.0, 2.0, 3.0]), np.ones(3))
        assert list(adaptive_weights([1.0, 2.0, 3.0], ref)) == [0.0, 0.0, 0.0]

    def test_elementwise(self):
        ref = NullReference(np.zeros((2, 3)), np.array([1.0, 0.0, 0.0]), np.array([2.0, 1.0, 4.0]))
        assert list(adaptive_weights([3.0, 0.0, -2.0], ref)) == [1.0, 0.0, 0.5]

    def test_sigma_floor(self):
        ref = NullReference(np.zeros((2, 1)), np.array([0.0]), np.array([0.0]))
        w = adaptive_weights([1e-4], ref)
        assert np.isfinite(w[0])
        assert w[0] == pytest.approx(1e4)

    def test_shape_mismatch(self):
        ref = NullReference.from_samples(np.zeros((3, 2)))
        with pytest.raises(ValueError):
            adaptive_weights([1.0, 2.0, 3.0], ref)


class TestNullReference:
    def test_from_samples(self):
        ref = NullReference.from_samples([[0.0, 1.0], [2.0, 3.0]])
        assert list(ref.mu0) == [1.0, 2.0]
        assert ref.sigma0 == pytest.approx([math.sqrt(2), math.sqrt(2)])

    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            NullReference.from_samples([[1.0, 2.0]])


class TestFuse:
    def test_equal_average(self):
        assert fuse([1.0, 2.0, 3.0], equal_weights(3)) == pytest.approx(2.0)

    def test_zero_weights(self):
        assert fuse([5.0, -7.0], [0.0, 0.0]) == 0.0

    def test_dot_product(self):
        assert fuse([2.0, -1.0], [2.0, 1.0]) == pytest.approx(3.0)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            fuse([1.0], [1.0, 2.0])


class TestCriticalValue:
    def test_order_statistic_rule(self):
        assert critical_value(np.arange(1.0, 101.0), 0.05) == 95.0

    def test_all_equal(self):
        assert critical_value([3.0, 3.0, 3.0], 0.1) == 3.0

    def test_two_samples_alpha_half(self):
        assert critical_value([0.0, 10.0], 0.5) == 0.0

    def test_empty(self):
        with pytest.raises(ValueError):
            critical_value([], 0.05)

    def test_bad_alpha(self):
        with pytest.raises(ValueError):
            critical_value([1.0], 0.0)
        with pytest.raises(ValueError):
            critical_value([1.0], 1.0)


class TestSinglePointTest:
    def test_degenerate_identity_point(self):
        # test point exactly at the null mean: zero weights, fused 0,
        # every null fused value 0, strict inequality keeps reject False
        null_s = np.array([[1.0, -1.0], [3.0, 1.0], [-1.0, 3.0], [1.0, 1.0]])
        mu0 = null_s.mean(axis=0)
        r = run_test_at(mu0, null_s, WeightScheme("adaptive", (1, 2)), 0.05)
        assert r.fused == 0.0
        assert r.cv == 0.0
        assert r.weights == (0.0, 0.0)
        assert r.reject is False

    def test_equal_boundary_has_slope_minus_one(self):
        rng = np.random.default_rng(17)
        null_s = rng.standard_normal((500, 2))
        scheme = WeightScheme("equal", (1, 2))
        base = run_test_at(np.zeros(2), null_s, scheme, 0.05)
        c = 2.0 * base.cv  # fused > cv means s1 + s2 > 2 cv
        on = run_test_at(np.array([1.0, c - 1.0]), null_s, scheme, 0.05)
        above = run_test_at(np.array([1.0, c - 1.0 + 1e-9]), null_s, scheme, 0.05)
        shifted = run_test_at(np.array([5.0, c - 5.0]), null_s, scheme, 0.05)
        assert on.reject is False          # boundary itself does not reject
        assert above.reject is True
        assert shifted.reject is False     # sliding along slope -1 changes nothing

    def test_far_point_rejects_adaptively(self):
        rng = np.random.default_rng(18)
        null_s = rng.standard_normal((1000, 2))
        r = run_test_at(np.array([5.0, 5.0]), null_s, WeightScheme("adaptive", (1, 2)), 0.05)
        assert r.reject is True
        assert r.fused > 40.0

    def test_subset_selects_columns(self):
        null_s = np.zeros((10, 9))
        null_s[:, 4] = np.arange(10)
        s_test = np.zeros(9)
        s_test[4] = 100.0
        r = run_test_at(s_test, null_s, WeightScheme("equal", (5,)), 0.05)
        assert r.reject is True

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            run_test_at(np.zeros(3), np.zeros((5, 2)), WeightScheme("equal", (1,)), 0.05)
        with pytest.raises(ValueError):
            run_test_at(np.zeros(2), np.zeros((5, 2)), WeightScheme("equal", (1, 2, 3)), 0.05)


class TestPower:
    def test_matches_run_test_at(self):
        rng = np.random.default_rng(19)
        null_s = rng.standard_normal((200, 3))
        alt_s = rng.standard_normal((50, 3)) + 1.0
        for kind in ("equal", "adaptive"):
            scheme = WeightScheme(kind, (1, 3))
            slow = np.mean([
                run_test_at(row, null_s, scheme, 0.05).reject for row in alt_s
            ])
            assert power(null_s, alt_s, scheme, 0.05, chunk=16) == pytest.approx(slow)

    def test_equal_size_calibration(self):
        rng = np.random.default_rng(20)
        m = 4000
        null_s = rng.standard_normal((m, 4))
        alt_s = rng.standard_normal((m, 4))
        rate = power(null_s, alt_s, WeightScheme("equal", (1, 2, 3, 4)), 0.05)
        slack = 4 * math.sqrt(0.05 * 0.95 / m)
        assert abs(rate - 0.05) <= slack

    def test_separated_alternative(self):
        rng = np.random.default_rng(21)
        null_s = rng.standard_normal((2000, 3))
        alt_s = rng.standard_normal((2000, 3)) + 10.0
        for kind in ("equal", "adaptive"):
            assert power(null_s, alt_s, WeightScheme(kind, (1, 2, 3)), 0.05) > 0.999

    def test_empty_inputs(self):
        with pytest.raises(ValueError):
            power(np.zeros((0, 2)), np.zeros((5, 2)), WeightScheme("equal", (1,)), 0.05)


class TestDecisionProperties:
    def test_reject_invariant_under_weight_scaling(self):
        rng = np.random.default_rng(23)
        null_s = rng.standard_normal((300, 3))
        w = np.abs(rng.standard_normal(3)) + 0.1
        for _ in range(20):
            s = rng.standard_normal(3) * 2
            base = fuse(s, w) > critical_value(null_s @ w, 0.05)
            for c in (0.01, 3.0, 250.0):
                scaled = fuse(s, c * w) > critical_value(null_s @ (c * w), 0.05)
                assert scaled == base

    def test_adaptive_weights_invariant_under_feature_affine_maps(self):
        rng = np.random.default_rng(24)
        null_s = rng.standard_normal((400, 3))
        a = np.array([2.0, 0.5, 7.0])
        b = np.array([-3.0, 11.0, 0.25])
        s = rng.standard_normal(3)
        w0 = adaptive_weights(s, NullReference.from_samples(null_s))
        w1 = adaptive_weights(a * s + b, NullReference.from_samples(a * null_s + b))
        assert np.allclose(w0, w1)

    def test_reject_invariant_under_common_scale_and_shifts(self):
        # a shared positive scale plus per-feature shifts leaves the
        # adaptive decision unchanged; per-feature scales do not (they
        # reweight the fused sum), so only the common-scale law holds
        rng = np.random.default_rng(25)
        null_s = rng.standard_normal((400, 3))
        scheme = WeightScheme("adaptive", (1, 2, 3))
        b = np.array([-5.0, 2.0, 0.5])
        for c in (0.2, 4.0):
            for _ in range(10):
                s = rng.standard_normal(3) * 2
                base = run_test_at(s, null_s, scheme, 0.05).reject
                mapped = run_test_at(c * s + b, c * null_s + b, scheme, 0.05).reject
                assert mapped == base

    def test_equal_monotone_in_test_point(self):
        rng = np.random.default_rng(26)
        null_s = rng.standard_normal((300, 4))
        scheme = WeightScheme("equal", (1, 2, 3, 4))
        for _ in range(30):
            s = rng.standard_normal(4)
            if run_test_at(s, null_s, scheme, 0.05).reject:
                bigger = s + np.abs(rng.standard_normal(4))
                assert run_test_at(bigger, null_s, scheme, 0.05).reject

    def test_subset_order_irrelevant_to_decision(self):
        rng = np.random.default_rng(27)
        null_s = rng.standard_normal((200, 9))
        s = rng.standard_normal(9) * 1.5
        for kind in ("equal", "adaptive"):
            a = run_test_at(s, null_s, WeightScheme(kind, (1, 4, 7)), 0.05)
            b = run_test_at(s, null_s, WeightScheme(kind, (7, 1, 4)), 0.05)
            assert a.fused == pytest.approx(b.fused)
            assert a.cv == pytest.approx(b.cv)
            assert a.reject == b.reject
            assert a.weights == (b.weights[1], b.weights[2], b.weights[0])

    def test_single_feature_adaptive_matches_equal(self):
        # with one feature the positive weight cancels from both sides
        rng = np.random.default_rng(28)
        null_s = rng.standard_normal((500, 9))
        alt_s = rng.standard_normal((500, 9)) + 0.8
        for i in range(1, 10):
            pa = power(null_s, alt_s, WeightScheme("adaptive", (i,)), 0.05)
            pe = power(null_s, alt_s, WeightScheme("equal", (i,)), 0.05)
            assert pa == pytest.approx(pe, abs=0.01)
