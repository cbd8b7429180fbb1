"""
Smart Repeater (network-controlled repeater).

Amplify-and-forward: the donor-side beam points at the feeding gNB and the
service beam at each evaluated UE, a best case. Stable operation needs the isolation
between the two antennas to exceed the end-to-end gain by a margin.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Literal, Optional

from pydantic import BaseModel, ConfigDict

from smartem.em import LinkBudgetTerms
from smartem.geometry import Point3, Propagator
from smartem.nodes.base import FeedLink, NodeModel, RelayPath

if TYPE_CHECKING:
    from smartem.scenario import PlacedNode, RadioParams

MAX_EIRP_DBM = 60.0

RepeaterStatus = Literal["nominal", "reduced", "off"]


class RepeaterSpec(BaseModel):
    """Repeater parameters. ``isolation_db`` has no default and must be given."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["repeater"] = "repeater"
    e2e_gain_db: float = 90.0
    max_eirp_dbm: float = 55.0
    isolation_db: float
    stability_margin_db: float = 10.0
    power_w: float = 20.0


def repeater_effective_gain_db(spec: RepeaterSpec) -> tuple[float, RepeaterStatus]:
    """
    Operating gain after the isolation check.

    Returns:
        ``(e2e_gain, "nominal")`` when the gain fits under isolation − margin,
        ``(isolation − margin, "reduced")`` when it must back off, and
        ``(0.0, "off")`` when no positive gain is stable.
    """
    ceiling = spec.isolation_db - spec.stability_margin_db
    if ceiling <= 0:
        return 0.0, "off"
    if spec.e2e_gain_db <= ceiling:
        return spec.e2e_gain_db, "nominal"
    return ceiling, "reduced"


class RepeaterModel(NodeModel):
    """Smart Repeater node model."""

    kind = "repeater"
    display_name = "Smart Repeater"
    description = "Amplify-and-forward relay with beamformed donor and service links"
    default_cost = 2.0

    def power_consumption_w(self, spec: RepeaterSpec, radio: RadioParams) -> float:
        return spec.power_w

    def violations(self, spec: RepeaterSpec, radio: RadioParams) -> list[str]:
        rules = []
        if not spec.max_eirp_dbm < MAX_EIRP_DBM:
            rules.append(f"repeater max EIRP not below {MAX_EIRP_DBM:g} dBm")
        if spec.stability_margin_db < 0:
            rules.append("repeater stability margin must be non-negative")
        return rules

    def relay(
        self,
        node: PlacedNode,
        feed: FeedLink,
        ue: Point3,
        propagator: Propagator,
        radio: RadioParams,
    ) -> Optional[RelayPath]:
        spec: RepeaterSpec = node.spec
        gain, status = repeater_effective_gain_db(spec)
        if status == "off":
            return None
        access = self.access_segment(node, ue, propagator)
        if access is None:
            return None

        p_in = feed.terms.rx_power_dbm
        output_eirp = min(p_in + gain, spec.max_eirp_dbm)
        terms = LinkBudgetTerms(
            eirp_dbm=feed.terms.eirp_dbm,
            path_loss_db=feed.terms.path_loss_db + access.fspl_db,
            extra_gain_db=output_eirp - p_in,
            penetration_db=feed.terms.penetration_db + access.penetration_db,
            rx_gain_dbi=radio.ue_antenna_gain_dbi,
        )
        return RelayPath(
            node_id=node.id,
            terms=terms,
            distances_m=(feed.distance_m, access.distance_m),
            los=(feed.los, access.los),
            snr_penalty_db=radio.repeater_snr_penalty_db,
        )
