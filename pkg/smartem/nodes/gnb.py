"""Donor gNB: the only node class with a wired backhaul."""

from __future__ import annotations

from typing import TYPE_CHECKING, Literal, Optional

from pydantic import BaseModel, ConfigDict

from smartem.nodes.base import NodeModel

if TYPE_CHECKING:
    from smartem.scenario import RadioParams

MAX_EIRP_DBM = 70.0
MAX_POWER_W = 800.0


class GnbSpec(BaseModel):
    """Macro gNB. ``eirp_dbm`` already includes the antenna gain."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["gnb"] = "gnb"
    eirp_dbm: float = 65.0
    antenna_gain_dbi: float = 33.0
    height_m: float = 10.0
    power_w: float = 800.0

    @property
    def conducted_power_dbm(self) -> float:
        return self.eirp_dbm - self.antenna_gain_dbi


class GnbModel(NodeModel):
    """Donor gNB node model."""

    kind = "gnb"
    display_name = "Donor gNB"
    description = "Macro base station with fiber backhaul, up to 70 dBm EIRP"
    default_cost = 10.0
    is_donor = True

    def power_consumption_w(self, spec: GnbSpec, radio: RadioParams) -> float:
        return spec.power_w

    def transmit_eirp_dbm(self, spec: GnbSpec) -> Optional[float]:
        return spec.eirp_dbm

    def violations(self, spec: GnbSpec, radio: RadioParams) -> list[str]:
        rules = []
        if spec.eirp_dbm > MAX_EIRP_DBM:
            rules.append(f"gNB EIRP above {MAX_EIRP_DBM:g} dBm")
        if not 0 < spec.power_w <= MAX_POWER_W:
            rules.append(f"gNB power outside (0, {MAX_POWER_W:g}] W")
        return rules
