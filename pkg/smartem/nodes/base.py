"""
Base abstract class defining the contract for node models.

Each node class (donor gNB, IAB node, Smart Repeater, RIS, Smart Skin) is a
``NodeModel`` paired with a pydantic spec carried in the scenario file. The
model knows how the node is fed, how much power it draws, which hardware
limits its spec must respect and how a path through it composes into a link
budget.

Example:
    class LensModel(NodeModel):
        kind = "lens"
        display_name = "Passive Lens"
        description = "Fixed focusing surface"
        default_cost = 0.5

        def power_consumption_w(self, spec, radio) -> float:
            return 0.0

        def relay(self, node, feed, ue, propagator, radio):
            ...
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Optional

from pydantic import BaseModel

from smartem.em import LinkBudgetTerms
from smartem.errors import DomainError
from smartem.geometry import Point3, Propagator

if TYPE_CHECKING:
    from smartem.scenario import PlacedNode, RadioParams


class FeedLink(BaseModel):
    """How a non-donor node receives the signal it forwards."""

    source_id: str
    source_position: Point3
    terms: LinkBudgetTerms
    distance_m: float
    los: bool
    depth: int = 1
    backhaul_capacity_bps: float = 0.0


class RelayPath(BaseModel):
    """One UE path through a Smart-EM node (feed segment plus access segment)."""

    node_id: str
    terms: LinkBudgetTerms
    distances_m: tuple[float, float]
    los: tuple[bool, bool]
    snr_penalty_db: float = 0.0
    capacity_bps: Optional[float] = None


class NodeModel(ABC):
    """
    Abstract base class for node models.

    Attributes:
        kind: Discriminator used in scenario files (e.g. "ris").
        display_name: Human-readable name.
        description: One-line summary for ``smartem list-nodes``.
        default_cost: Relative installation cost used by the planner.
        is_donor: True for nodes with wired backhaul (gNB).
    """

    kind: str
    display_name: str
    description: str
    default_cost: float
    is_donor: bool = False

    # ----------------------------------------------------------------
    # Abstract methods - MUST be implemented by subclasses
    # ----------------------------------------------------------------

    @abstractmethod
    def power_consumption_w(self, spec: BaseModel, radio: RadioParams) -> float:
        """
        Electrical power drawn by the node.

        Args:
            spec: The node spec.
            radio: Global radio parameters (carrier frequency for surfaces).

        Returns:
            Power in watts.
        """
        pass

    # ----------------------------------------------------------------
    # Overridable hooks
    # ----------------------------------------------------------------

    def violations(self, spec: BaseModel, radio: RadioParams) -> list[str]:
        """Hardware limits the spec breaks. Empty when the spec conforms."""
        return []

    def transmit_eirp_dbm(self, spec: BaseModel) -> Optional[float]:
        """EIRP the node radiates as a feeder, None if it cannot feed others."""
        return None

    def feed_gain_dbi(self, spec: BaseModel) -> float:
        """Receive gain on the feed segment."""
        return 0.0

    def accepts_feeder(self, feeder: PlacedNode, feeder_depth: int) -> bool:
        """Whether ``feeder`` may drive this node. Default: donor gNBs only."""
        return feeder.spec.kind == "gnb"

    def relay(
        self,
        node: PlacedNode,
        feed: FeedLink,
        ue: Point3,
        propagator: Propagator,
        radio: RadioParams,
    ) -> Optional[RelayPath]:
        """
        Compose the path feeder -> node -> UE.

        Args:
            node: The placed node.
            feed: The node's resolved feed.
            ue: Evaluated UE position.
            propagator: Segment queries for the scenario.
            radio: Global radio parameters.

        Returns:
            The path, or None when the node cannot serve this UE.

        Raises:
            DomainError: If the node class does not relay.
        """
        raise DomainError(f"{self.display_name} does not relay signals")

    # ----------------------------------------------------------------
    # Concrete methods - shared implementation for all models
    # ----------------------------------------------------------------

    def access_segment(self, node: PlacedNode, ue: Point3, propagator: Propagator):
        """Segment from the node to the UE, None when they coincide."""
        if node.position.distance_to(ue) <= 1e-9:
            return None
        return propagator.segment(node.position, ue)

    def applied_defaults(self, spec: BaseModel) -> dict[str, object]:
        """Spec fields that were not given in the scenario file."""
        return {
            name: getattr(spec, name)
            for name in type(spec).model_fields
            if name != "kind" and name not in spec.model_fields_set
        }
