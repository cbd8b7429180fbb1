"""Smart Skin: a fully passive surface with one fixed non-specular redirection."""

from __future__ import annotations

from typing import TYPE_CHECKING, Literal, Optional

from pydantic import BaseModel, ConfigDict

from smartem.geometry import Point3, Propagator, off_normal_angle_deg, signed_offset_deg
from smartem.nodes.base import FeedLink, NodeModel, RelayPath
from smartem.nodes.ris import aperture_gain_db, surface_path

if TYPE_CHECKING:
    from smartem.scenario import PlacedNode, RadioParams

MIN_SIDE_M = 0.25


class SkinSpec(BaseModel):
    """
    Fixed surface configuration.

    ``incident_deg`` and ``departure_deg`` are signed horizontal angles from
    the surface normal; the specular partner of θ is −θ.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["skin"] = "skin"
    side_m: float = 0.5
    incident_deg: float
    departure_deg: float
    tolerance_deg: float = 5.0


class SkinModel(NodeModel):
    """Smart Skin node model."""

    kind = "skin"
    display_name = "Smart Skin"
    description = "Passive fixed-configuration surface, no power supply"
    default_cost = 0.3

    def power_consumption_w(self, spec: SkinSpec, radio: RadioParams) -> float:
        return 0.0

    def violations(self, spec: SkinSpec, radio: RadioParams) -> list[str]:
        rules = []
        if not spec.side_m > MIN_SIDE_M:
            rules.append(f"skin side not above {MIN_SIDE_M:g} m")
        if not (abs(spec.incident_deg) < 90.0 and abs(spec.departure_deg) < 90.0):
            rules.append("skin directions must lie in front of the surface")
        if not spec.tolerance_deg > 0:
            rules.append("skin tolerance must be positive")
        return rules

    def relay(
        self,
        node: PlacedNode,
        feed: FeedLink,
        ue: Point3,
        propagator: Propagator,
        radio: RadioParams,
    ) -> Optional[RelayPath]:
        spec: SkinSpec = node.spec
        source = feed.source_position
        seen_incident = signed_offset_deg(node.position, node.azimuth_deg, source)
        seen_departure = signed_offset_deg(node.position, node.azimuth_deg, ue)
        if abs(seen_incident - spec.incident_deg) > spec.tolerance_deg:
            return None
        if abs(seen_departure - spec.departure_deg) > spec.tolerance_deg:
            return None

        incident = off_normal_angle_deg(node.position, node.azimuth_deg, source)
        departure = off_normal_angle_deg(node.position, node.azimuth_deg, ue)
        if incident is None or departure is None:
            return None
        gain = aperture_gain_db(spec.side_m, radio.carrier_frequency_hz, incident, departure)
        return surface_path(node, feed, ue, propagator, radio, gain)
