"""
Node models registry.

To add a node class, create a module in this directory defining its pydantic
spec (with a ``kind`` literal) and a ``NodeModel`` subclass, add the model to
NODE_MODELS and the spec to ``NodeSpec``.
"""

from typing import Annotated, Optional, Union

from pydantic import BaseModel, Field

from smartem.nodes.base import FeedLink, NodeModel, RelayPath
from smartem.nodes.gnb import GnbModel, GnbSpec
from smartem.nodes.iab import IabModel, IabSpec, iab_end_to_end_capacity
from smartem.nodes.repeater import (
    RepeaterModel,
    RepeaterSpec,
    repeater_effective_gain_db,
)
from smartem.nodes.ris import RisModel, RisSpec, ris_bistatic_gain_db, ris_element_count
from smartem.nodes.skin import SkinModel, SkinSpec

# Tagged union carried by scenario placements
NodeSpec = Annotated[
    Union[GnbSpec, IabSpec, RepeaterSpec, RisSpec, SkinSpec],
    Field(discriminator="kind"),
]


class NodeModelInfo(BaseModel):
    """Information about an available node class."""

    kind: str
    display_name: str
    description: str
    default_cost: float
    aliases: list[str] = Field(default_factory=list)


# Registry of node models
# Key: node kind (used in scenario files and on the CLI)
# Value: model class
NODE_MODELS: dict[str, type[NodeModel]] = {
    "gnb": GnbModel,
    "iab": IabModel,
    "repeater": RepeaterModel,
    "ris": RisModel,
    "skin": SkinModel,
}

# Aliases for convenience
ALIASES: dict[str, str] = {
    "donor": "gnb",
    "relay": "iab",
    "ncr": "repeater",
    "sr": "repeater",
    "surface": "ris",
    "smart-skin": "skin",
}


def resolve_kind(kind: str) -> Optional[str]:
    """Canonical kind for ``kind`` or one of its aliases."""
    kind = kind.lower()
    kind = ALIASES.get(kind, kind)
    return kind if kind in NODE_MODELS else None


def get_node_model(kind: str) -> Optional[NodeModel]:
    """
    Get an instantiated model for the specified node kind.

    Args:
        kind: Node kind or alias (e.g., "ris", "surface", "ncr").

    Returns:
        Instantiated NodeModel, or None if not found.
    """
    resolved = resolve_kind(kind)
    if resolved is None:
        return None
    return NODE_MODELS[resolved]()


def list_node_models() -> list[NodeModelInfo]:
    """
    List all available node classes.

    Returns:
        List of NodeModelInfo objects in registry order.
    """
    result = []
    for kind, model_class in NODE_MODELS.items():
        aliases = [alias for alias, target in ALIASES.items() if target == kind]
        result.append(
            NodeModelInfo(
                kind=kind,
                display_name=model_class.display_name,
                description=model_class.description,
                default_cost=model_class.default_cost,
                aliases=aliases,
            )
        )
    return result


__all__ = [
    "ALIASES",
    "FeedLink",
    "GnbSpec",
    "IabSpec",
    "NODE_MODELS",
    "NodeModel",
    "NodeModelInfo",
    "NodeSpec",
    "RelayPath",
    "RepeaterSpec",
    "RisSpec",
    "SkinSpec",
    "get_node_model",
    "iab_end_to_end_capacity",
    "list_node_models",
    "repeater_effective_gain_db",
    "resolve_kind",
    "ris_bistatic_gain_db",
    "ris_element_count",
]
