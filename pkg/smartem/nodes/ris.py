"""
Reconfigurable Intelligent Surface (RIS).

A nearly passive array of λ/2 unit cells whose reflection phases are tuned so
that the incident wave leaves towards the served UE. In the far field a
phase-conjugating surface of area A behaves like an aperture of gain
``(4πA/λ²)² · cos θi · cos θo``, reduced by the phase-quantization loss.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict

from smartem.arrays import expected_quantization_loss_db
from smartem.em import LinkBudgetTerms, wavelength_m
from smartem.errors import DomainError
from smartem.geometry import Point3, Propagator, off_normal_angle_deg
from smartem.nodes.base import FeedLink, NodeModel, RelayPath

if TYPE_CHECKING:
    from smartem.scenario import PlacedNode, RadioParams

MAX_ELEMENT_POWER_MW = 1.0
MAX_TOTAL_POWER_W = 2.0


class RisSpec(BaseModel):
    """Square RIS; the surface normal is the placement azimuth."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["ris"] = "ris"
    side_m: float = 0.25
    bits: Union[int, Literal["continuous"]] = 2
    element_power_mw: float = 0.2


def ris_element_count(spec: RisSpec, frequency_hz: float) -> tuple[int, int]:
    """
    Unit cells of a square RIS with λ/2 pitch.

    Returns:
        ``(per_side, total)``.

    Raises:
        DomainError: If the side is shorter than one pitch.
    """
    pitch = wavelength_m(frequency_hz) / 2.0
    per_side = math.floor(spec.side_m / pitch + 1e-9)
    if per_side < 1:
        raise DomainError(
            f"RIS side {spec.side_m} m is shorter than one element pitch ({pitch:.6g} m)"
        )
    return per_side, per_side * per_side


def aperture_gain_db(
    side_m: float,
    frequency_hz: float,
    incident_deg: float,
    departure_deg: float,
    quantization_loss_db: float = 0.0,
) -> float:
    """Bistatic gain of a phase-conjugating square aperture, clamped at 0 dB."""
    for angle, what in ((incident_deg, "incident"), (departure_deg, "departure")):
        if not 0.0 <= angle < 90.0:
            raise DomainError(f"{what} angle must lie in [0, 90) degrees, got {angle}")
    area = side_m * side_m
    lam = wavelength_m(frequency_hz)
    linear = (4.0 * math.pi * area / lam**2) ** 2 * (
        math.cos(math.radians(incident_deg)) * math.cos(math.radians(departure_deg))
    )
    if linear <= 0.0:
        return 0.0
    return max(0.0, 10.0 * math.log10(linear) - quantization_loss_db)


def ris_bistatic_gain_db(
    spec: RisSpec,
    frequency_hz: float,
    incident_deg: float,
    departure_deg: float,
    bits: Optional[Union[int, Literal["continuous"]]] = None,
) -> float:
    """
    RIS reflection gain between an incident and a departure direction.

    Args:
        spec: The RIS.
        frequency_hz: Carrier frequency.
        incident_deg: Angle of the feeder from the surface normal, [0, 90).
        departure_deg: Angle of the UE from the surface normal, [0, 90).
        bits: Phase quantization, defaults to ``spec.bits``.

    Returns:
        Gain in dB, never below 0.
    """
    depth = spec.bits if bits is None else bits
    return aperture_gain_db(
        spec.side_m,
        frequency_hz,
        incident_deg,
        departure_deg,
        expected_quantization_loss_db(depth),
    )


def surface_path(
    node: PlacedNode,
    feed: FeedLink,
    ue: Point3,
    propagator: Propagator,
    radio: RadioParams,
    gain_db: float,
) -> Optional[RelayPath]:
    """Passive reflection ledger shared by RIS and Smart Skin."""
    if node.position.distance_to(ue) <= 1e-9:
        return None
    access = propagator.segment(node.position, ue)
    terms = LinkBudgetTerms(
        eirp_dbm=feed.terms.eirp_dbm,
        path_loss_db=feed.terms.path_loss_db + access.fspl_db,
        extra_gain_db=gain_db,
        penetration_db=feed.terms.penetration_db + access.penetration_db,
        rx_gain_dbi=radio.ue_antenna_gain_dbi,
    )
    return RelayPath(
        node_id=node.id,
        terms=terms,
        distances_m=(feed.distance_m, access.distance_m),
        los=(feed.los, access.los),
    )


class RisModel(NodeModel):
    """RIS node model."""

    kind = "ris"
    display_name = "RIS"
    description = "Reconfigurable reflecting surface with quantized phase control"
    default_cost = 1.0

    def power_consumption_w(self, spec: RisSpec, radio: RadioParams) -> float:
        try:
            _, total = ris_element_count(spec, radio.carrier_frequency_hz)
        except DomainError:
            return 0.0
        return total * spec.element_power_mw / 1000.0

    def violations(self, spec: RisSpec, radio: RadioParams) -> list[str]:
        rules = []
        if spec.bits != "continuous" and spec.bits not in (1, 2, 3, 4):
            rules.append("RIS bits outside 1..4")
        try:
            ris_element_count(spec, radio.carrier_frequency_hz)
        except DomainError:
            rules.append("RIS smaller than one element pitch")
            return rules
        if not spec.element_power_mw < MAX_ELEMENT_POWER_MW:
            rules.append(f"RIS element power not below {MAX_ELEMENT_POWER_MW:g} mW")
        if not self.power_consumption_w(spec, radio) < MAX_TOTAL_POWER_W:
            rules.append(f"RIS control power not below {MAX_TOTAL_POWER_W:g} W")
        return rules

    def relay(
        self,
        node: PlacedNode,
        feed: FeedLink,
        ue: Point3,
        propagator: Propagator,
        radio: RadioParams,
    ) -> Optional[RelayPath]:
        incident = off_normal_angle_deg(node.position, node.azimuth_deg, feed.source_position)
        departure = off_normal_angle_deg(node.position, node.azimuth_deg, ue)
        if incident is None or departure is None:
            return None
        gain = ris_bistatic_gain_db(
            node.spec, radio.carrier_frequency_hz, incident, departure
        )
        return surface_path(node, feed, ue, propagator, radio, gain)
