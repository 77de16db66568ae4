import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvetail import (
    Curve,
    Dataset,
    DegenerateGridError,
    EmptyWindowError,
    ParameterError,
    Slice,
    StructuralError,
    ball_proportion,
    curve_distance,
    extract_slice,
    pairwise_distance_grid,
    semi_metric_sq,
)
from curvetail.sim import generate_curves


def brute_force_semi_metric_sq(a, b):
    # independent oracle: literal loop over interior points
    total = 0.0
    av, bv = list(a.values), list(b.values)
    for l in range(1, len(av) - 1):
        term = (av[l + 1] - bv[l + 1]) + (av[l - 1] - bv[l - 1]) - 2.0 * (av[l] - bv[l])
        total += term * term
    return total


finite_values = st.floats(min_value=-100.0, max_value=100.0, allow_nan=False)
curve_values = st.lists(finite_values, min_size=3, max_size=32)


class TestSemiMetric:
    def test_identical_curves_have_zero_distance(self):
        c = Curve([1.0, 4.0, 2.0, 8.0], identifier="x")
        assert semi_metric_sq(c, c) == 0.0

    def test_affine_difference_is_null(self):
        a = Curve([2 * l + 5 for l in range(1, 5)])
        b = Curve([0.0, 0.0, 0.0, 0.0])
        assert semi_metric_sq(a, b) == 0.0

    def test_hand_computed_spike(self):
        a = Curve([0.0, 0.0, 1.0, 0.0, 0.0])
        b = Curve([0.0, 0.0, 0.0, 0.0, 0.0])
        assert semi_metric_sq(a, b) == pytest.approx(6.0, rel=1e-15)
        assert semi_metric_sq(a, b) == pytest.approx(brute_force_semi_metric_sq(a, b), rel=1e-15)

    def test_length_mismatch_rejected(self):
        with pytest.raises(StructuralError):
            semi_metric_sq(Curve([0, 0, 0]), Curve([0, 0, 0, 0]))

    def test_too_short_curve_rejected(self):
        with pytest.raises(StructuralError):
            Curve([1.0, 2.0])

    def test_non_finite_values_rejected(self):
        with pytest.raises(StructuralError):
            Curve([0.0, math.nan, 1.0])

    @given(curve_values, curve_values)
    def test_symmetry_exact(self, av, bv):
        n = min(len(av), len(bv))
        a, b = Curve(av[:n] + [0.0] * (3 - n)), Curve(bv[:n] + [0.0] * (3 - n))
        if len(a) != len(b):
            return
        assert semi_metric_sq(a, b) == semi_metric_sq(b, a)

    @given(curve_values, st.floats(-50, 50), st.floats(-5, 5))
    def test_affine_shift_null_space(self, av, c0, c1):
        a = Curve(av)
        b = Curve([v + c0 + c1 * l for l, v in enumerate(av)])
        tol = 1e-9 * max(1.0, a.energy + b.energy)
        assert semi_metric_sq(a, b) <= tol

    @given(curve_values, curve_values)
    def test_matches_brute_force(self, av, bv):
        n = max(3, min(len(av), len(bv)))
        a, b = Curve((av + [0.0] * 3)[:n]), Curve((bv + [0.0] * 3)[:n])
        expected = brute_force_semi_metric_sq(a, b)
        assert semi_metric_sq(a, b) == pytest.approx(expected, rel=1e-12, abs=1e-12)


class TestBallProportion:
    def test_full_ball(self, toy_dataset):
        t = toy_dataset.curves[0]
        assert ball_proportion(toy_dataset, t, 100.0) == 1.0

    def test_degenerate_ball_counts_target(self, toy_dataset):
        t = toy_dataset.curves[0]
        assert ball_proportion(toy_dataset, t, 0.0) == 0.25

    def test_against_brute_force_on_synthetic_curves(self):
        curves = generate_curves(64, 16, seed=3)
        ds = Dataset(curves, [np.ones(1) for _ in curves])
        dists = sorted(
            curve_distance(curves[i], curves[j])
            for i in range(16) for j in range(i + 1, 16)
        )
        h = dists[len(dists) // 2]
        t = curves[4]
        expected = sum(1 for c in curves if curve_distance(c, t) <= h) / 16
        got = ball_proportion(ds, t, h)
        assert 0.0 < got <= 1.0
        assert got == expected

    def test_negative_radius_rejected(self, toy_dataset):
        with pytest.raises(ParameterError):
            ball_proportion(toy_dataset, toy_dataset.curves[0], -1.0)

    @given(st.floats(0, 5), st.floats(0, 5))
    def test_monotone_in_radius(self, h1, h2):
        curves = [Curve([0, 0, v], identifier=str(v)) for v in (0.0, 1.0, 3.0, 7.0)]
        ds = Dataset(curves, [np.ones(2) for _ in curves])
        lo, hi = min(h1, h2), max(h1, h2)
        assert ball_proportion(ds, curves[1], lo) <= ball_proportion(ds, curves[1], hi)


class TestExtractSlice:
    def test_single_point_window_sorts(self, toy_dataset):
        s = extract_slice(toy_dataset, toy_dataset.curves[0], 0.0)
        assert list(s.order_stats) == [1.0, 2.0, 3.0]
        assert s.size == 3

    def test_merge_two_windows(self, toy_dataset):
        # curves b (distance 0) and a (distance 1) from b within h=1.5
        t = toy_dataset.curves[1]
        s = extract_slice(toy_dataset, t, 1.5)
        assert list(s.order_stats) == [1.0, 2.0, 3.0, 5.0]
        # at h=2 curve c (distance 2) joins on the closed boundary
        s2 = extract_slice(toy_dataset, t, 2.0)
        assert list(s2.order_stats) == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]

    def test_empty_window_is_loud(self, toy_dataset):
        far = Curve([0.0, 0.0, 100.0], identifier="far")
        with pytest.raises(EmptyWindowError):
            extract_slice(toy_dataset, far, 0.5)

    def test_window_count_matches_ball_proportion(self):
        # one response per curve: slice size equals n * proportion exactly
        curves = [Curve([0, 0, v], identifier=str(v)) for v in (0.0, 1.0, 3.0, 7.0)]
        ds = Dataset(curves, [np.array([float(i + 1)]) for i in range(4)])
        for h in (0.0, 1.0, 2.5, 10.0):
            s = extract_slice(ds, curves[0], h)
            assert s.size == round(len(curves) * ball_proportion(ds, curves[0], h))

    @given(st.lists(st.floats(0.1, 100), min_size=1, max_size=40))
    def test_order_stats_match_naive_sort(self, values):
        s = Slice.from_members(values)
        assert list(s.order_stats) == sorted(values)

    @given(st.floats(0, 3), st.floats(0, 3))
    def test_wider_window_is_superset(self, h1, h2):
        curves = [Curve([0, 0, v], identifier=str(v)) for v in (0.0, 1.0, 3.0, 7.0)]
        ds = Dataset(curves, [np.array([10.0 + i]) for i in range(4)])
        lo, hi = min(h1, h2), max(h1, h2)
        small = extract_slice(ds, curves[0], lo)
        big = extract_slice(ds, curves[0], hi)
        assert set(small.members).issubset(set(big.members))


class TestPairwiseDistanceGrid:
    def test_single_pair(self):
        curves = [Curve([0, 0, 0]), Curve([0, 0, 2])]
        ds = Dataset(curves, [np.ones(1), np.ones(1)])
        assert pairwise_distance_grid(ds, [1.0]) == (2.0,)

    def test_quantile_convention(self):
        # distances {1, 2, 3}; ceil(0.5 * 3) = 2nd and ceil(1.0 * 3) = 3rd
        curves = [Curve([0, 0, 0]), Curve([0, 0, 1]), Curve([0, 0, 3])]
        ds = Dataset(curves, [np.ones(1)] * 3)
        assert pairwise_distance_grid(ds, (0.5, 1.0)) == (2.0, 3.0)

    def test_identical_curves_degenerate(self):
        curves = [Curve([1, 2, 3], identifier="a"), Curve([1, 2, 3], identifier="b")]
        ds = Dataset(curves, [np.ones(1), np.ones(1)])
        with pytest.raises(DegenerateGridError):
            pairwise_distance_grid(ds, [0.5])

    def test_deduplicated_ascending(self):
        curves = [Curve([0, 0, 0]), Curve([0, 0, 1]), Curve([0, 0, 3])]
        ds = Dataset(curves, [np.ones(1)] * 3)
        grid = pairwise_distance_grid(ds, (0.4, 0.5, 0.9, 1.0))
        assert grid == (2.0, 3.0)

    def test_needs_two_curves(self):
        ds = Dataset([Curve([0, 0, 1])], [np.ones(1)])
        with pytest.raises(StructuralError):
            pairwise_distance_grid(ds, [0.5])

    def test_bad_level_rejected(self, toy_dataset):
        with pytest.raises(ParameterError):
            pairwise_distance_grid(toy_dataset, [0.0])


class TestDataset:
    def test_rejects_non_positive_responses(self):
        with pytest.raises(StructuralError):
            Dataset([Curve([0, 0, 1])], [np.array([1.0, -2.0])])

    def test_rejects_mixed_lengths(self):
        with pytest.raises(StructuralError):
            Dataset([Curve([0, 0, 1]), Curve([0, 0, 1, 2])], [np.ones(1), np.ones(1)])

    def test_rejects_empty_responses(self):
        with pytest.raises(StructuralError):
            Dataset([Curve([0, 0, 1])], [np.array([])])
