"""
Integrated Access and Backhaul (IAB) node.

An IAB node decodes and re-transmits (Layer-2 relay). Access and wireless
backhaul share one set of radio resources in half duplex: a fraction α of the
time goes to backhaul and 1 − α to access.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict

from smartem.em import LinkBudgetTerms, shannon_capacity_bps
from smartem.errors import DomainError
from smartem.geometry import Point3, Propagator
from smartem.nodes.base import FeedLink, NodeModel, RelayPath

if TYPE_CHECKING:
    from smartem.scenario import PlacedNode, RadioParams

MAX_POWER_W = 350.0

# Deepest IAB chain considered: gNB -> IAB -> IAB
MAX_DEPTH = 2


class IabSpec(BaseModel):
    """IAB node parameters. ``mt_gain_dbi`` is the backhaul receive gain."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["iab"] = "iab"
    eirp_dbm: float = 60.0
    power_w: float = 300.0
    backhaul_mode: Literal["half_duplex"] = "half_duplex"
    resource_split: Union[float, Literal["optimal"]] = "optimal"
    mt_gain_dbi: float = 25.0


def iab_end_to_end_capacity(
    backhaul_capacity_bps: float,
    access_capacity_bps: float,
    split: Union[float, Literal["optimal"]] = "optimal",
) -> float:
    """
    End-to-end throughput of a half-duplex relay.

    Args:
        backhaul_capacity_bps: Capacity Cb of the backhaul hop.
        access_capacity_bps: Capacity Ca of the access hop.
        split: Backhaul time share α in (0, 1), or ``"optimal"``.

    Returns:
        ``min(α·Cb, (1 − α)·Ca)`` for a fixed split, ``Ca·Cb / (Ca + Cb)``
        for the optimal one.

    Raises:
        DomainError: On negative capacities or α outside (0, 1).
    """
    cb, ca = backhaul_capacity_bps, access_capacity_bps
    if cb < 0 or ca < 0:
        raise DomainError("capacities must be non-negative")

    if split == "optimal":
        if ca == 0 or cb == 0:
            return 0.0
        if ca == cb:
            return ca / 2.0
        return ca * cb / (ca + cb)

    if not 0.0 < split < 1.0:
        raise DomainError(f"resource split must lie in (0, 1), got {split}")
    return min(split * cb, (1.0 - split) * ca)


def chained_backhaul_bps(
    hop_capacity_bps: float, upstream_feed: Optional[FeedLink], upstream: Optional[IabSpec]
) -> float:
    """Backhaul capacity seen by an IAB node, folding in an upstream IAB hop."""
    if upstream_feed is None or upstream is None:
        return hop_capacity_bps
    return iab_end_to_end_capacity(
        upstream_feed.backhaul_capacity_bps, hop_capacity_bps, upstream.resource_split
    )


class IabModel(NodeModel):
    """IAB node model."""

    kind = "iab"
    display_name = "IAB Node"
    description = "Regenerative relay sharing resources between access and backhaul"
    default_cost = 5.0

    def power_consumption_w(self, spec: IabSpec, radio: RadioParams) -> float:
        return spec.power_w

    def transmit_eirp_dbm(self, spec: IabSpec) -> Optional[float]:
        return spec.eirp_dbm

    def feed_gain_dbi(self, spec: IabSpec) -> float:
        return spec.mt_gain_dbi

    def accepts_feeder(self, feeder: PlacedNode, feeder_depth: int) -> bool:
        if feeder.spec.kind == "gnb":
            return True
        return feeder.spec.kind == "iab" and feeder_depth < MAX_DEPTH

    def violations(self, spec: IabSpec, radio: RadioParams) -> list[str]:
        rules = []
        if not 0 < spec.power_w <= MAX_POWER_W:
            rules.append(f"IAB power outside (0, {MAX_POWER_W:g}] W")
        if spec.resource_split != "optimal" and not 0.0 < spec.resource_split < 1.0:
            rules.append("IAB resource split outside (0, 1)")
        return rules

    def relay(
        self,
        node: PlacedNode,
        feed: FeedLink,
        ue: Point3,
        propagator: Propagator,
        radio: RadioParams,
    ) -> Optional[RelayPath]:
        spec: IabSpec = node.spec
        access = self.access_segment(node, ue, propagator)
        if access is None:
            return None

        terms = LinkBudgetTerms(
            eirp_dbm=spec.eirp_dbm,
            path_loss_db=access.fspl_db,
            penetration_db=access.penetration_db,
            rx_gain_dbi=radio.ue_antenna_gain_dbi,
        )
        access_capacity = shannon_capacity_bps(
            terms.rx_power_dbm, radio.bandwidth_hz, radio.noise_figure_db
        )
        return RelayPath(
            node_id=node.id,
            terms=terms,
            distances_m=(feed.distance_m, access.distance_m),
            los=(feed.los, access.los),
            capacity_bps=iab_end_to_end_capacity(
                feed.backhaul_capacity_bps, access_capacity, spec.resource_split
            ),
        )
