"""Curve construction, resampling, lifting, and pointwise diagnostics."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import (
    TWO_PI,
    circle_curve,
    lemniscate_curve,
    random_selfcrossing_curve,
    square_curve,
    tangent_circles_curve,
)
from minhomotopy.curve import (
    ClosedCurve,
    dump_curve,
    lift,
    load_curve,
    min_lift_separation,
    parse_curve,
    resample_arclength,
    save_curve,
    self_intersections,
    winding_number,
)
from minhomotopy.errors import IndeterminateWindingError, InvalidCurveError

# Unit square, perimeter 4, resampled at n=8: arc positions k/2 along the
# boundary, worked out by hand from the cumulative edge lengths.
SQUARE_8 = np.array(
    [
        [0.0, 0.0],
        [0.5, 0.0],
        [1.0, 0.0],
        [1.0, 0.5],
        [1.0, 1.0],
        [0.5, 1.0],
        [0.0, 1.0],
        [0.0, 0.5],
    ]
)


def ray_winding(points, p):
    """Independent winding oracle: signed crossings of a rightward ray."""
    w = 0
    n = len(points)
    for i in range(n):
        a, b = points[i], points[(i + 1) % n]
        if (a[1] <= p[1]) != (b[1] <= p[1]):
            x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0])
            if x > p[0]:
                w += 1 if b[1] > a[1] else -1
    return w


class TestConstruction:
    def test_repeated_consecutive_point_reports_index(self):
        with pytest.raises(InvalidCurveError) as err:
            ClosedCurve.uniform([[0, 0], [1, 0], [1, 0], [0, 1]])
        assert err.value.index == 2
        assert "2" in str(err.value)

    def test_too_few_samples(self):
        with pytest.raises(InvalidCurveError):
            ClosedCurve.uniform([[0, 0], [1, 0]])

    def test_params_must_start_at_zero(self):
        with pytest.raises(InvalidCurveError):
            ClosedCurve([0.1, 1.0, 2.0], [[0, 0], [1, 0], [0, 1]])

    def test_params_strictly_increasing(self):
        with pytest.raises(InvalidCurveError):
            ClosedCurve([0.0, 2.0, 2.0], [[0, 0], [1, 0], [0, 1]])

    def test_nonfinite_point_reports_index(self):
        with pytest.raises(InvalidCurveError) as err:
            ClosedCurve.uniform([[0, 0], [1, np.nan], [0, 1]])
        assert err.value.index == 1

    def test_closure_duplicate_detected(self):
        with pytest.raises(InvalidCurveError) as err:
            ClosedCurve.uniform([[0, 0], [1, 0], [0, 1], [0, 0]])
        assert err.value.index == 0

    def test_arrays_are_immutable(self):
        c = square_curve()
        with pytest.raises(ValueError):
            c.points[0, 0] = 5.0

    def test_corner_angles_square(self):
        assert np.allclose(square_curve().corner_angles(), np.pi / 2)


class TestResample:
    def test_unit_square_eight_samples(self):
        out = resample_arclength(square_curve(), 8)
        assert np.allclose(out.points, SQUARE_8, atol=1e-14)
        assert np.allclose(out.params, TWO_PI * np.arange(8) / 8)
        assert abs(out.length - 4.0) <= 1e-12 * 4.0

    def test_uniform_circle_is_fixed_point(self):
        c = circle_curve(n=48)
        out = resample_arclength(c, 48)
        assert np.allclose(out.points, c.points, atol=1e-12)

    def test_fixed_point_of_arc_uniform_curves(self):
        # arc-length uniform inputs are exact fixed points of the resampler
        for base in (resample_arclength(square_curve(), 8), circle_curve(36)):
            again = resample_arclength(base, base.n)
            assert np.allclose(again.points, base.points, atol=1e-10)

    def test_minimum_count(self):
        with pytest.raises(ValueError):
            resample_arclength(square_curve(), 2)

    def test_starting_point_kept(self):
        c = lemniscate_curve(64)
        out = resample_arclength(c, 100)
        assert np.array_equal(out.points[0], c.points[0])


class TestLift:
    def test_circle_lift_coordinates(self):
        c = circle_curve(n=24)
        lifted = lift(c, 0.1)
        t = c.params
        assert np.array_equal(lifted.points4[:, :2], c.points)
        assert np.array_equal(lifted.points4[:, 2], 0.1 * np.cos(t))
        assert np.array_equal(lifted.points4[:, 3], 0.1 * np.sin(t))

    def test_flattened_lift(self):
        c = circle_curve(n=24)
        lifted = lift(c, 0.0)
        assert np.array_equal(lifted.points4[:, 2:], np.zeros((24, 2)))

    def test_epsilon_domain(self):
        c = circle_curve(n=24)
        for eps in (-0.1, 1.5, np.nan):
            with pytest.raises(ValueError):
                lift(c, eps)

    @given(
        st.integers(min_value=8, max_value=40),
        st.floats(min_value=1e-4, max_value=1.0),
        st.integers(min_value=0, max_value=2**31 - 1),
    )
    def test_isometry_defect(self, n, eps, seed):
        # |lifted segment|^2 splits exactly into the planar part plus
        # eps^2 times the squared chord of the parameter arc
        rng = np.random.default_rng(seed)
        c = random_selfcrossing_curve(rng, n=max(n, 8))
        lifted = lift(c, eps)
        p4 = np.vstack([lifted.points4, lifted.points4[:1]])
        p2 = np.vstack([c.points, c.points[:1]])
        t = c.params
        chord = np.hypot(
            np.cos(np.append(t[1:], t[0])) - np.cos(t),
            np.sin(np.append(t[1:], t[0])) - np.sin(t),
        )
        lhs = ((np.diff(p4, axis=0)) ** 2).sum(axis=1)
        rhs = ((np.diff(p2, axis=0)) ** 2).sum(axis=1) + eps**2 * chord**2
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-15)


class TestMinLiftSeparation:
    def test_embedded_circle_matches_chord_bound(self):
        n, eps, gap = 48, 0.1, 0.5
        lifted = lift(circle_curve(n=n), eps)
        got = min_lift_separation(lifted, gap)
        # smallest admissible sample gap is the first multiple of 2pi/n
        # at or above `gap`; both planar chord and lift chord scale with it
        k = int(np.ceil(gap / (TWO_PI / n)))
        expected = np.sqrt(1.0 + eps**2) * 2.0 * np.sin(k * np.pi / n)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got > 0.0

    def test_figure_eight_brute_force(self):
        eps = 0.05
        lifted = lift(lemniscate_curve(64), eps)
        got = min_lift_separation(lifted, 0.5)
        # independent brute force over admissible sample pairs
        best = np.inf
        t = lifted.params
        p = lifted.points4
        for i in range(len(t)):
            for j in range(i + 1, len(t)):
                d = abs(t[i] - t[j])
                if min(d, TWO_PI - d) >= 0.5:
                    best = min(best, float(np.linalg.norm(p[i] - p[j])))
        assert got == pytest.approx(best, rel=1e-12)
        # the crossing pair dominates: value is about eps * |chord of params|
        assert got < 3.0 * eps

    def test_flattened_embedded_curve_plain_distance(self):
        n, gap = 48, 0.5
        lifted = lift(circle_curve(n=n), 0.0)
        k = int(np.ceil(gap / (TWO_PI / n)))
        assert min_lift_separation(lifted, gap) == pytest.approx(
            2.0 * np.sin(k * np.pi / n), rel=1e-12
        )

    def test_flattened_crossing_curve_vanishes(self):
        lifted = lift(lemniscate_curve(64), 0.0)
        assert min_lift_separation(lifted, 0.5) < 1e-12

    def test_gap_domain(self):
        lifted = lift(circle_curve(), 0.1)
        for gap in (0.0, np.pi, 4.0, -1.0):
            with pytest.raises(ValueError):
                min_lift_separation(lifted, gap)


class TestSelfIntersections:
    def test_circle_empty(self):
        report = self_intersections(circle_curve(n=48))
        assert len(report) == 0

    def test_lemniscate_single_transverse(self):
        report = self_intersections(lemniscate_curve(64))
        assert len(report) == 1
        (crossing,) = report.crossings
        assert crossing.kind == "transverse"
        assert np.allclose(crossing.location, [0.0, 0.0], atol=1e-9)
        t1, t2 = crossing.params
        assert t1 == pytest.approx(np.pi / 2, abs=1e-6)
        assert t2 == pytest.approx(3 * np.pi / 2, abs=1e-6)

    def test_tangent_circles_single_tangential(self):
        report = self_intersections(tangent_circles_curve(64))
        assert len(report) == 1
        (contact,) = report.crossings
        assert contact.kind == "tangential"
        assert np.allclose(contact.location, [0.0, 0.0], atol=1e-9)

    def test_pairs_are_sample_separated(self):
        report = self_intersections(lemniscate_curve(64))
        c = lemniscate_curve(64)
        step = c.param_steps.min()
        for crossing in report.crossings:
            t1, t2 = crossing.params
            d = abs(t1 - t2)
            assert min(d, TWO_PI - d) >= step

    def test_tolerance_domain(self):
        with pytest.raises(ValueError):
            self_intersections(circle_curve(), tol=0.0)


class TestWinding:
    def test_circle_center(self):
        assert winding_number(circle_curve(n=48), [0.0, 0.0]) == 1

    def test_circle_outside(self):
        assert winding_number(circle_curve(n=48), [2.5, 0.0]) == 0

    def test_clockwise_circle(self):
        assert winding_number(circle_curve(n=48, clockwise=True), [0.0, 0.0]) == -1

    def test_doubled_circle(self):
        t = TWO_PI * np.arange(64) / 64
        doubled = ClosedCurve(t, np.column_stack([np.cos(2 * t), np.sin(2 * t)]))
        assert winding_number(doubled, [0.1, 0.0]) == 2
        assert ray_winding(doubled.points, np.array([0.1, 0.0])) == 2

    def test_point_on_curve_rejected(self):
        with pytest.raises(IndeterminateWindingError):
            winding_number(circle_curve(n=48), [1.0, 0.0])

    @given(
        st.floats(min_value=0.0, max_value=TWO_PI),
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=-5.0, max_value=5.0),
    )
    def test_rigid_motion_invariance(self, angle, dx, dy):
        c = lemniscate_curve(64)
        probe = np.array([0.55, 0.25])  # inside the right lobe
        rot = np.array(
            [[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]]
        )
        moved = ClosedCurve(c.params, c.points @ rot.T + [dx, dy])
        assert winding_number(moved, rot @ probe + [dx, dy]) == winding_number(
            c, probe
        )

    def test_winding_survives_resampling(self):
        c = lemniscate_curve(256)
        probe = [0.55, 0.25]
        assert winding_number(resample_arclength(c, 200), probe) == winding_number(
            c, probe
        )


class TestLiftInjectivity:
    def test_randomized_crossing_curves(self):
        # lifted samples stay pairwise separated by the parameter circle
        rng = np.random.default_rng(20260819)
        for _ in range(25):
            eps = float(rng.uniform(0.01, 0.5))
            c = random_selfcrossing_curve(rng)
            lifted = lift(c, eps)
            p = lifted.points4
            d2 = ((p[:, None, :] - p[None, :, :]) ** 2).sum(axis=2)
            np.fill_diagonal(d2, np.inf)
            floor = 2.0 * eps * np.sin(np.pi / c.n)
            assert np.sqrt(d2.min()) >= floor * (1.0 - 1e-12)


class TestCurveFiles:
    def test_roundtrip(self, tmp_path):
        c = circle_curve(n=24)
        path = tmp_path / "curve.json"
        save_curve(c, path)
        back = load_curve(path)
        assert np.allclose(back.points, c.points, atol=0)
        assert back.n == 24

    def test_count_mismatch(self):
        with pytest.raises(InvalidCurveError) as err:
            parse_curve({"n": 10, "points": [[0.0, 0.0]] * 12})
        assert "10" in str(err.value) and "12" in str(err.value)

    def test_bad_entry_reports_index(self):
        pts = [[float(i), 0.0] for i in range(20)]
        pts[17] = [1.0, "x"]
        with pytest.raises(InvalidCurveError) as err:
            parse_curve({"n": 20, "points": pts})
        assert err.value.index == 17

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("not json")
        with pytest.raises(InvalidCurveError):
            load_curve(path)

    def test_dump_shape(self):
        doc = dump_curve(square_curve())
        assert doc["n"] == 4
        assert doc["points"][2] == [1.0, 1.0]
