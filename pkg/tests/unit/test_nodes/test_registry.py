"""
Tests for the node model registry.

Tests cover:
- Kind and alias resolution
- Model listing for ``smartem list-nodes``
- Defaults echo and feeder rules shared by all models
"""

import pytest

from smartem.errors import DomainError
from smartem.geometry import Point3
from smartem.nodes import (
    NODE_MODELS,
    GnbSpec,
    RepeaterSpec,
    RisSpec,
    get_node_model,
    list_node_models,
    resolve_kind,
)
from smartem.nodes.gnb import GnbModel
from smartem.scenario import PlacedNode, RadioParams


class TestResolveKind:
    """Tests for resolve_kind function."""

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "kind,expected",
        [
            ("ris", "ris"),
            ("RIS", "ris"),
            ("surface", "ris"),
            ("ncr", "repeater"),
            ("sr", "repeater"),
            ("relay", "iab"),
            ("donor", "gnb"),
            ("smart-skin", "skin"),
        ],
    )
    def test_known(self, kind, expected):
        """Good path: kinds and aliases resolve case-insensitively."""
        assert resolve_kind(kind) == expected

    @pytest.mark.unit
    def test_unknown(self):
        """Bad path: unknown kinds resolve to None."""
        assert resolve_kind("lens") is None
        assert get_node_model("lens") is None


class TestGetNodeModel:
    """Tests for get_node_model function."""

    @pytest.mark.unit
    def test_returns_instance(self):
        """Good path: aliases return an instance of the model."""
        model = get_node_model("surface")

        assert isinstance(model, NODE_MODELS["ris"])
        assert model.kind == "ris"

    @pytest.mark.unit
    def test_only_gnb_is_donor(self):
        """Good path: only the gNB has a wired backhaul."""
        donors = [kind for kind, cls in NODE_MODELS.items() if cls.is_donor]

        assert donors == ["gnb"]


class TestListNodeModels:
    """Tests for list_node_models function."""

    @pytest.mark.unit
    def test_registry_order(self):
        """Good path: models are listed in registry order."""
        kinds = [info.kind for info in list_node_models()]

        assert kinds == ["gnb", "iab", "repeater", "ris", "skin"]

    @pytest.mark.unit
    def test_aliases_and_costs(self):
        """Good path: each entry carries its aliases and default cost."""
        infos = {info.kind: info for info in list_node_models()}

        assert infos["repeater"].aliases == ["ncr", "sr"]
        assert infos["ris"].aliases == ["surface"]
        assert infos["gnb"].default_cost > infos["ris"].default_cost > infos["skin"].default_cost


class TestSharedBehaviour:
    """Tests for NodeModel base behaviour."""

    @pytest.mark.unit
    def test_applied_defaults_skip_given_fields(self):
        """Good path: fields set in the file are not reported as defaults."""
        model = get_node_model("repeater")

        defaults = model.applied_defaults(RepeaterSpec(isolation_db=100.0))

        assert "isolation_db" not in defaults
        assert "kind" not in defaults
        assert defaults["e2e_gain_db"] == 90.0

    @pytest.mark.unit
    def test_default_feeder_is_gnb(self):
        """Good path: surfaces and repeaters accept donor gNBs only."""
        gnb = PlacedNode(id="g", position=Point3(x=0, y=0, z=10), spec=GnbSpec())
        ris = PlacedNode(id="r", position=Point3(x=5, y=0, z=5), spec=RisSpec())

        assert get_node_model("ris").accepts_feeder(gnb, 0)
        assert not get_node_model("ris").accepts_feeder(ris, 1)

    @pytest.mark.unit
    def test_donor_does_not_relay(self, free_space, feed_factory):
        """Bad path: asking a gNB to relay is a domain error."""
        node = PlacedNode(id="g", position=Point3(x=0, y=0, z=10), spec=GnbSpec())
        feed = feed_factory(Point3(x=100, y=0, z=10), node.position)

        with pytest.raises(DomainError, match="does not relay"):
            GnbModel().relay(node, feed, Point3(x=10, y=0, z=1.5), free_space, RadioParams())


class TestGnbModel:
    """Tests for the donor gNB model."""

    @pytest.mark.unit
    def test_conforming_spec(self, radio):
        """Good path: the default gNB breaks no limit."""
        assert GnbModel().violations(GnbSpec(), radio) == []

    @pytest.mark.unit
    def test_limits(self, radio):
        """Bad path: EIRP above 70 dBm and zero power are flagged."""
        rules = GnbModel().violations(GnbSpec(eirp_dbm=71.0, power_w=0.0), radio)

        assert rules == ["gNB EIRP above 70 dBm", "gNB power outside (0, 800] W"]

    @pytest.mark.unit
    def test_conducted_power(self):
        """Good path: conducted power excludes the antenna gain."""
        assert GnbSpec().conducted_power_dbm == pytest.approx(32.0)
        assert GnbModel().transmit_eirp_dbm(GnbSpec()) == 65.0
