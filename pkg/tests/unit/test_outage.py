"""
Tests for smartem.outage.

Tests cover:
- Poisson segment blocking and body self-blockage closed forms
- Wilson intervals
- Monte Carlo outage: determinism, analytic limits, separation trend
- Link length sensitivity
"""

import math

import pytest

from smartem.errors import DomainError
from smartem.outage import (
    ObstacleModel,
    SrcGeometry,
    link_length_sensitivity,
    outage_vs_separation,
    run_trial,
    segment_blocking_probability,
    self_blockage_probability,
    src_outage_probability,
    wilson_interval,
)

NO_OBSTACLES = ObstacleModel(density_per_m2=0.0)


class TestObstacleModel:
    """Tests for the ObstacleModel class."""

    @pytest.mark.unit
    def test_fixed_radius(self):
        """Good path: fixed radii have trivial moments."""
        model = ObstacleModel(radius_m=0.5)

        assert model.mean_radius() == 0.5
        assert model.mean_square_radius() == 0.25
        assert model.max_radius == 0.5

    @pytest.mark.unit
    def test_uniform_radius(self):
        """Good path: uniform radii use the moments of the uniform law."""
        model = ObstacleModel(radius_law="uniform", radius_m=0.2, radius_max_m=0.4)

        assert model.mean_radius() == pytest.approx(0.3)
        assert model.mean_square_radius() == pytest.approx((0.04 + 0.08 + 0.16) / 3)
        assert model.max_radius == 0.4

    @pytest.mark.unit
    def test_uniform_needs_upper_bound(self):
        """Bad path: a uniform law without an upper radius is rejected."""
        with pytest.raises(DomainError):
            ObstacleModel(radius_law="uniform").mean_radius()


class TestClosedForms:
    """Tests for analytic blocking helpers."""

    @pytest.mark.unit
    def test_segment_blocking(self):
        """Good path: the stadium area sets the Poisson exponent."""
        model = ObstacleModel(density_per_m2=0.01, radius_m=0.3)

        expected = 1 - math.exp(-0.01 * (2 * 0.3 * 50 + math.pi * 0.09))
        assert segment_blocking_probability(50.0, model) == pytest.approx(expected)

    @pytest.mark.unit
    def test_segment_blocking_zero_length(self):
        """Critical path: a point is blocked only by disks covering it."""
        model = ObstacleModel(density_per_m2=0.01, radius_m=0.3)

        assert segment_blocking_probability(0.0, model) == pytest.approx(
            1 - math.exp(-0.01 * math.pi * 0.09)
        )

    @pytest.mark.unit
    def test_negative_length(self):
        """Bad path: lengths cannot be negative."""
        with pytest.raises(DomainError):
            segment_blocking_probability(-1.0, NO_OBSTACLES)

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "separation,width,expected",
        [(10.0, 60.0, 50 / 360), (90.0, 60.0, 0.0), (350.0, 60.0, 50 / 360), (0.0, 360.0, 1.0)],
    )
    def test_self_blockage(self, separation, width, expected):
        """Good path: a sector covers both departures with (width − gap)/360."""
        assert self_blockage_probability(separation, width) == pytest.approx(expected)


class TestWilsonInterval:
    """Tests for wilson_interval function."""

    @pytest.mark.unit
    def test_contains_estimate(self):
        """Good path: the interval brackets the observed proportion."""
        low, high = wilson_interval(30, 100)

        assert low < 0.3 < high

    @pytest.mark.unit
    def test_extremes_are_clamped(self):
        """Critical path: zero and full counts stay inside [0, 1]."""
        assert wilson_interval(0, 50)[0] == 0.0
        assert wilson_interval(50, 50)[1] == 1.0

    @pytest.mark.unit
    def test_no_trials(self):
        """Bad path: an interval needs trials."""
        with pytest.raises(DomainError):
            wilson_interval(0, 0)


class TestSrcGeometry:
    """Tests for the SrcGeometry class."""

    @pytest.mark.unit
    def test_from_separation(self):
        """Good path: the device sits at the requested angle."""
        geometry = SrcGeometry.from_separation(30.0, 50.0, 20.0)

        assert geometry.gnb == (50.0, 0.0)
        assert geometry.separation_deg == pytest.approx(30.0)
        assert len(geometry.reflected_legs()) == 2

    @pytest.mark.unit
    @pytest.mark.parametrize("requested,expected", [(200.0, 160.0), (350.0, 10.0), (-90.0, 90.0)])
    def test_separation_wraps_to_half_circle(self, requested, expected):
        """Critical path: separations are reported within [0, 180] degrees."""
        geometry = SrcGeometry.from_separation(requested)

        assert geometry.separation_deg == pytest.approx(expected)

    @pytest.mark.unit
    def test_separation_across_the_negative_x_axis(self):
        """Critical path: both paths near 180 degrees are close, not 356 apart."""
        geometry = SrcGeometry(gnb=(-50.0, 1.0), device=(-20.0, -1.0))

        expected = math.degrees(math.atan(1 / 50) + math.atan(1 / 20))
        assert geometry.separation_deg == pytest.approx(expected)
        assert geometry.separation_deg < 5.0

    @pytest.mark.unit
    def test_non_positive_length(self):
        """Bad path: path lengths must be positive."""
        with pytest.raises(DomainError):
            SrcGeometry.from_separation(30.0, 0.0, 20.0)


class TestSrcOutage:
    """Tests for Monte Carlo outage estimation."""

    @pytest.mark.unit
    def test_no_blockers_no_outage(self):
        """Good path: without obstacles or body blockage nothing fails."""
        estimate = src_outage_probability(
            SrcGeometry.from_separation(10.0), NO_OBSTACLES, 0.0, 500, seed=1
        )

        assert estimate.outages == 0
        assert estimate.outage_probability == 0.0

    @pytest.mark.unit
    def test_self_blockage_matches_closed_form(self):
        """Critical path: body blockage alone reproduces the angular overlap."""
        estimate = src_outage_probability(
            SrcGeometry.from_separation(10.0), NO_OBSTACLES, 60.0, 20_000, seed=3
        )

        assert estimate.outage_probability == pytest.approx(
            self_blockage_probability(10.0, 60.0), abs=0.02
        )

    @pytest.mark.unit
    def test_wide_separation_escapes_body(self):
        """Critical path: separations beyond the sector width never both fall in it."""
        estimate = src_outage_probability(
            SrcGeometry.from_separation(90.0), NO_OBSTACLES, 60.0, 2000, seed=3
        )

        assert estimate.outages == 0
        assert estimate.primary_blocked_fraction > 0.0

    @pytest.mark.unit
    def test_same_seed_same_estimate(self):
        """Good path: results depend on the seed only, not on the thread count."""
        geometry = SrcGeometry.from_separation(20.0)
        obstacles = ObstacleModel(density_per_m2=0.02)

        one = src_outage_probability(geometry, obstacles, 60.0, 2500, seed=42, workers=1)
        three = src_outage_probability(geometry, obstacles, 60.0, 2500, seed=42, workers=3)

        assert one == three

    @pytest.mark.unit
    def test_trial_reproducible(self):
        """Good path: a trial is a pure function of seed and index."""
        geometry = SrcGeometry.from_separation(20.0)
        obstacles = ObstacleModel(density_per_m2=0.05)

        assert run_trial(geometry, obstacles, 60.0, 9, 17) == run_trial(
            geometry, obstacles, 60.0, 9, 17
        )
        assert run_trial(geometry, obstacles, 60.0, 9, 17) != run_trial(
            geometry, obstacles, 60.0, 9, 18
        )

    @pytest.mark.unit
    def test_small_separation_worse(self):
        """Critical path: correlated paths at 10 degrees fail more than at 90."""
        estimates = outage_vs_separation(
            [10.0, 90.0], ObstacleModel(), 60.0, 10_000, seed=7
        )

        assert [e.separation_deg for e in estimates] == pytest.approx([10.0, 90.0])
        assert estimates[0].ci_low > estimates[1].ci_high

    @pytest.mark.unit
    def test_bad_arguments(self):
        """Bad path: trial counts and sector widths are checked."""
        geometry = SrcGeometry.from_separation(10.0)
        with pytest.raises(DomainError):
            src_outage_probability(geometry, NO_OBSTACLES, 60.0, 0, seed=1)
        with pytest.raises(DomainError):
            src_outage_probability(geometry, NO_OBSTACLES, 400.0, 10, seed=1)


class TestLinkLengthSensitivity:
    """Tests for link_length_sensitivity function."""

    @pytest.mark.unit
    def test_sorted_and_monotone(self):
        """Good path: rows are sorted by length and blocking never decreases."""
        rows = link_length_sensitivity([40.0, 10.0, 20.0], ObstacleModel(), 0.0, 5000, seed=5)

        assert [r.length_m for r in rows] == [10.0, 20.0, 40.0]
        probabilities = [r.outage_probability for r in rows]
        assert probabilities == sorted(probabilities)

    @pytest.mark.unit
    def test_matches_poisson_closed_form(self):
        """Critical path: estimates track the analytic column."""
        rows = link_length_sensitivity([10.0, 20.0, 40.0], ObstacleModel(), 0.0, 5000, seed=5)

        for row in rows:
            assert row.outage_probability == pytest.approx(row.analytic, abs=0.03)

    @pytest.mark.unit
    def test_body_blockage_included(self):
        """Good path: the analytic column folds in body blockage."""
        rows = link_length_sensitivity([10.0], NO_OBSTACLES, 90.0, 4000, seed=5)

        assert rows[0].analytic == pytest.approx(0.25)
        assert rows[0].outage_probability == pytest.approx(0.25, abs=0.03)

    @pytest.mark.unit
    @pytest.mark.parametrize("lengths", [[], [0.0, 10.0], [-5.0]])
    def test_bad_lengths(self, lengths):
        """Bad path: lengths must be given and positive."""
        with pytest.raises(DomainError):
            link_length_sensitivity(lengths, NO_OBSTACLES, 0.0, 10, seed=1)
