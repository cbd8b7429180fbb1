"""
Tests for smartem.scenario.

Tests cover:
- UE grid indexing and indoor exclusion
- Scenario rule checks reported as Violation records
- JSON parsing with line/column and field locations
- Defaults echo for fields missing from the file
- Loading the shipped scenarios
"""

import pytest

from smartem.errors import ScenarioParseError
from smartem.geometry import Building, Point3
from smartem.nodes import GnbSpec, IabSpec, RisSpec
from smartem.scenario import (
    PlacedNode,
    RadioParams,
    Scenario,
    UeGrid,
    Violation,
    applied_defaults,
    load_scenario,
    parse_document,
    validate,
)
from tests.conftest import make_box, make_gnb


def rules(scenario):
    return [(v.entity, v.rule) for v in validate(scenario)]


class TestUeGrid:
    """Tests for the UeGrid model."""

    @pytest.mark.unit
    def test_row_major_indexing(self):
        """Good path: x varies fastest."""
        grid = UeGrid(origin=Point3(x=1.0, y=2.0, z=0.0), nx=3, ny=2, spacing=2.0)

        assert grid.size == 6
        assert grid.point(0) == Point3(x=1.0, y=2.0, z=1.5)
        assert grid.point(2) == Point3(x=5.0, y=2.0, z=1.5)
        assert grid.point(4) == Point3(x=3.0, y=4.0, z=1.5)

    @pytest.mark.unit
    def test_ue_height_above_origin(self):
        """Good path: UE height is added to the origin's z."""
        grid = UeGrid(origin=Point3(x=0.0, y=0.0, z=2.0), nx=1, ny=1, ue_height=1.0)

        assert grid.point(0).z == pytest.approx(3.0)


class TestUePoints:
    """Tests for Scenario.ue_points."""

    @pytest.mark.unit
    def test_open_field_keeps_all_points(self, open_field):
        """Good path: without buildings every grid point is evaluated."""
        points = open_field.ue_points()

        assert [i for i, _ in points] == list(range(25))

    @pytest.mark.unit
    def test_indoor_points_excluded(self, single_building):
        """Good path: points strictly inside the footprint are skipped."""
        points = single_building.ue_points()

        assert len(points) == 81 - 9
        assert all(not (20 < p.x < 40 and -10 < p.y < 10) for _, p in points)

    @pytest.mark.unit
    def test_indoor_points_kept_when_disabled(self, single_building):
        """Good path: exclude_indoor=False evaluates the whole grid."""
        grid = single_building.grid.model_copy(update={"exclude_indoor": False})
        scenario = single_building.model_copy(update={"grid": grid})

        assert len(scenario.ue_points()) == 81


class TestScenario:
    """Tests for Scenario helpers."""

    @pytest.mark.unit
    def test_with_nodes_appends(self, open_field):
        """Good path: with_nodes leaves the original untouched."""
        extra = PlacedNode(id="ris1", position=Point3(x=5, y=5, z=5), spec=RisSpec())

        bigger = open_field.with_nodes([extra])

        assert [n.id for n in bigger.nodes] == ["gnb0", "ris1"]
        assert [n.id for n in open_field.nodes] == ["gnb0"]

    @pytest.mark.unit
    def test_donors(self, cross_street_ris):
        """Good path: donors are the gNB placements only."""
        assert [n.id for n in cross_street_ris.donors()] == ["gnb0"]

    @pytest.mark.unit
    def test_node_model_lookup(self, open_field):
        """Good path: a placement resolves its node model by kind."""
        assert open_field.nodes[0].model.kind == "gnb"


class TestValidate:
    """Tests for the validate function."""

    @pytest.mark.unit
    def test_consistent_scenario(self, open_field, cross_street_ris):
        """Good path: consistent scenarios produce no violations."""
        assert validate(open_field) == []
        assert validate(cross_street_ris) == []

    @pytest.mark.unit
    def test_no_donor(self, open_field):
        """Bad path: a scenario without gNB is flagged."""
        scenario = open_field.model_copy(update={"nodes": []})

        assert ("scenario", "no donor gNB") in rules(scenario)

    @pytest.mark.unit
    def test_duplicate_ids(self, open_field):
        """Bad path: node ids must be unique."""
        scenario = open_field.with_nodes([make_gnb(50.0, 0.0, 10.0)])

        assert ("node gnb0", "duplicate node id") in rules(scenario)

    @pytest.mark.unit
    def test_node_inside_building(self, single_building):
        """Bad path: a node below the roof of a building."""
        scenario = single_building.with_nodes([make_gnb(30.0, 0.0, 10.0, node_id="inside")])

        assert ("node inside", "node inside building") in rules(scenario)

    @pytest.mark.unit
    def test_node_on_roof_allowed(self, single_building):
        """Good path: above the roof is outdoors."""
        scenario = single_building.with_nodes([make_gnb(30.0, 0.0, 25.0, node_id="roof")])

        assert validate(scenario) == []

    @pytest.mark.unit
    def test_gnb_height_mismatch(self, open_field):
        """Bad path: gNB height must agree with its placement."""
        node = PlacedNode(
            id="tall", position=Point3(x=0, y=50, z=10), spec=GnbSpec(height_m=25.0)
        )

        assert ("node tall", "gNB height disagrees with placement") in rules(
            open_field.with_nodes([node])
        )

    @pytest.mark.unit
    def test_default_gnb_height_is_checked(self, open_field):
        """Bad path: a gNB without an explicit height is held to 10 m."""
        node = PlacedNode(id="mast", position=Point3(x=0, y=50, z=25), spec=GnbSpec())

        assert GnbSpec().height_m == 10.0
        assert ("node mast", "gNB height disagrees with placement") in rules(
            open_field.with_nodes([node])
        )

    @pytest.mark.unit
    def test_node_model_rules_included(self, open_field):
        """Bad path: hardware limits come from the node model."""
        node = PlacedNode(id="iab1", position=Point3(x=0, y=50, z=6), spec=IabSpec(power_w=400.0))

        assert ("node iab1", "IAB power outside (0, 350] W") in rules(open_field.with_nodes([node]))

    @pytest.mark.unit
    def test_non_finite_node(self, open_field):
        """Bad path: NaN positions are rejected."""
        node = PlacedNode(id="nan", position=Point3(x=float("nan"), y=0), spec=RisSpec())

        assert ("node nan", "non-finite coordinates") in rules(open_field.with_nodes([node]))

    @pytest.mark.unit
    def test_building_rules(self, open_field):
        """Bad path: building rules name the building by index."""
        scenario = open_field.model_copy(
            update={
                "buildings": [
                    make_box(100, 100, 110, 110),
                    Building(footprint=[(0, 0), (10, 10), (10, 0), (0, 10)], height=10),
                ]
            }
        )

        assert rules(scenario) == [("building 1", "footprint is not a simple polygon")]

    @pytest.mark.unit
    def test_grid_and_radio_rules(self, open_field):
        """Bad path: grid and radio limits are checked."""
        scenario = open_field.model_copy(
            update={
                "grid": UeGrid(nx=0, ny=3, spacing=0.0),
                "radio": RadioParams(bandwidth_hz=0.0, noise_figure_db=-1.0),
            }
        )

        found = rules(scenario)

        assert ("grid", "grid needs at least one point") in found
        assert ("grid", "grid spacing must be positive") in found
        assert ("radio", "bandwidth must be positive") in found
        assert ("radio", "noise figure must be non-negative") in found

    @pytest.mark.unit
    def test_violation_str(self):
        """Good path: violations print as entity: rule."""
        assert str(Violation(entity="grid", rule="bad")) == "grid: bad"


class TestParseDocument:
    """Tests for parse_document function."""

    @pytest.mark.unit
    def test_valid_document(self):
        """Good path: a minimal document parses."""
        text = '{"nodes": [], "grid": {"nx": 2, "ny": 2}}'

        scenario = parse_document(text, "s.json", Scenario)

        assert scenario.grid.size == 4

    @pytest.mark.unit
    def test_syntax_error_location(self):
        """Bad path: JSON syntax errors carry line and column."""
        text = '{\n  "nodes": \n}'

        with pytest.raises(ScenarioParseError) as exc_info:
            parse_document(text, "broken.json", Scenario)

        assert exc_info.value.line == 3
        assert exc_info.value.column == 1
        assert str(exc_info.value).startswith("broken.json:3:1:")

    @pytest.mark.unit
    def test_unknown_key(self):
        """Bad path: unknown keys are rejected with their location."""
        text = '{"nodes": [], "grid": {"nx": 1, "ny": 1}, "bogus": 1}'

        with pytest.raises(ScenarioParseError) as exc_info:
            parse_document(text, "s.json", Scenario)

        assert exc_info.value.location == "bogus"
        assert "at bogus" in str(exc_info.value)

    @pytest.mark.unit
    def test_unknown_node_kind(self):
        """Bad path: node kinds outside the registry are schema errors."""
        text = (
            '{"nodes": [{"id": "x", "position": {"x": 0, "y": 0}, "spec": {"kind": "lens"}}],'
            ' "grid": {"nx": 1, "ny": 1}}'
        )

        with pytest.raises(ScenarioParseError) as exc_info:
            parse_document(text, None, Scenario)

        assert exc_info.value.location.startswith("nodes.0.spec")
        assert str(exc_info.value).startswith("<input>")


class TestAppliedDefaults:
    """Tests for applied_defaults function."""

    @pytest.mark.unit
    def test_open_field_defaults(self, open_field):
        """Good path: missing radio, grid and node fields are listed."""
        defaults = applied_defaults(open_field)

        assert defaults["radio"]["carrier_frequency_hz"] == 28e9
        assert defaults["grid"] == {"ue_height": 1.5, "exclude_indoor": True}
        assert defaults["node gnb0"] == {
            "eirp_dbm": 65.0,
            "antenna_gain_dbi": 33.0,
            "power_w": 800.0,
        }

    @pytest.mark.unit
    def test_explicit_fields_not_listed(self):
        """Good path: fields given in the file are not defaults."""
        text = (
            '{"nodes": [{"id": "g", "position": {"x": 0, "y": 0, "z": 10},'
            ' "spec": {"kind": "gnb", "eirp_dbm": 60, "antenna_gain_dbi": 30,'
            ' "height_m": 10, "power_w": 500}}],'
            ' "grid": {"nx": 1, "ny": 1, "spacing": 1, "ue_height": 1.5,'
            ' "exclude_indoor": true, "origin": {"x": 0, "y": 0}},'
            ' "radio": {"carrier_frequency_hz": 28e9}}'
        )
        scenario = parse_document(text, None, Scenario)

        defaults = applied_defaults(scenario)

        assert "grid" not in defaults
        assert "node g" not in defaults
        assert "carrier_frequency_hz" not in defaults["radio"]


class TestLoadScenario:
    """Tests for load_scenario function."""

    @pytest.mark.unit
    def test_load_shipped_scenario(self, scenarios_dir):
        """Good path: the shipped cross-street scenario loads."""
        scenario = load_scenario(scenarios_dir / "cross_street.json")

        assert scenario.grid.size == 100 * 100
        assert len(scenario.buildings) == 6

    @pytest.mark.unit
    def test_load_logs_defaults(self, scenarios_dir):
        """Good path: applied defaults are echoed to the run log."""
        from smartem.debug import get_log_file, setup_logger

        setup_logger()
        load_scenario(scenarios_dir / "cross_street.json")

        content = get_log_file().read_text()
        assert "Stage: load" in content
        assert "Defaults applied:" in content

    @pytest.mark.unit
    def test_missing_file(self, tmp_path):
        """Bad path: unreadable files raise a parse error."""
        with pytest.raises(ScenarioParseError, match="cannot read file"):
            load_scenario(tmp_path / "absent.json")
