"""
Scenario model: buildings, node placements, the UE grid and radio parameters.

Scenario files are single JSON documents with the top-level keys
``buildings``, ``nodes``, ``grid`` and ``radio``. Angles are in degrees,
lengths in meters, powers in dBm and gains in dB/dBi. Unknown keys are
rejected at load time; physical limits are checked by ``validate`` and
reported as ``Violation`` records.
"""

import json
import math
from pathlib import Path
from typing import Any, Optional, Union

import shapely
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from smartem.debug import log_defaults_applied, log_stage
from smartem.errors import ScenarioParseError
from smartem.geometry import (
    Building,
    Point3,
    Propagator,
    footprint_violations,
    is_los,
    wall_crossings,
)
from smartem.nodes import NodeSpec, get_node_model


class UeGrid(BaseModel):
    """Regular evaluation grid of UE positions."""

    model_config = ConfigDict(extra="forbid")

    origin: Point3 = Field(default_factory=lambda: Point3(x=0.0, y=0.0, z=0.0))
    nx: int
    ny: int
    spacing: float = 2.0
    ue_height: float = 1.5
    exclude_indoor: bool = True

    def point(self, index: int) -> Point3:
        """Position of grid point ``index`` (row-major, x fastest)."""
        j, i = divmod(index, self.nx)
        return Point3(
            x=self.origin.x + i * self.spacing,
            y=self.origin.y + j * self.spacing,
            z=self.origin.z + self.ue_height,
        )

    @property
    def size(self) -> int:
        return self.nx * self.ny


class RadioParams(BaseModel):
    """Global radio parameters. Bandwidth and noise figure are assumptions."""

    model_config = ConfigDict(extra="forbid")

    carrier_frequency_hz: float = 28e9
    bandwidth_hz: float = 400e6
    noise_figure_db: float = 7.0
    ue_antenna_gain_dbi: float = 0.0
    coverage_threshold_dbm: float = -85.0
    repeater_snr_penalty_db: float = 3.0


class PlacedNode(BaseModel):
    """A node spec at a position, facing ``azimuth_deg`` (degrees from +x)."""

    model_config = ConfigDict(extra="forbid")

    id: str
    position: Point3
    azimuth_deg: float = 0.0
    spec: NodeSpec

    @property
    def model(self):
        return get_node_model(self.spec.kind)


class Violation(BaseModel):
    """A broken scenario rule."""

    entity: str
    rule: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.rule}"


class Scenario(BaseModel):
    """Immutable description of one deployment."""

    model_config = ConfigDict(extra="forbid")

    buildings: list[Building] = Field(default_factory=list)
    nodes: list[PlacedNode]
    grid: UeGrid
    radio: RadioParams = Field(default_factory=RadioParams)

    def with_nodes(self, extra: list[PlacedNode]) -> "Scenario":
        """A copy of this scenario with ``extra`` placements appended."""
        return self.model_copy(update={"nodes": [*self.nodes, *extra]})

    def donors(self) -> list[PlacedNode]:
        return [node for node in self.nodes if node.spec.kind == "gnb"]

    def propagator(self) -> Propagator:
        return Propagator(self.buildings, self.radio.carrier_frequency_hz)

    def ue_points(self, propagator: Optional[Propagator] = None) -> list[tuple[int, Point3]]:
        """
        Evaluation points as ``(grid index, position)`` pairs.

        Points inside a building (below its roof) are skipped when
        ``grid.exclude_indoor`` is set.
        """
        points = [(i, self.grid.point(i)) for i in range(self.grid.size)]
        if not self.grid.exclude_indoor or not self.buildings:
            return points
        propagator = propagator or self.propagator()
        return [(i, p) for i, p in points if not propagator.indoor(p)]


def _node_violations(scenario: Scenario) -> list[Violation]:
    violations = []
    seen: set[str] = set()
    polygons = [(b, b.polygon()) for b in scenario.buildings if not footprint_violations(b)]

    for node in scenario.nodes:
        entity = f"node {node.id}"
        if node.id in seen:
            violations.append(Violation(entity=entity, rule="duplicate node id"))
        seen.add(node.id)

        if not node.position.is_finite():
            violations.append(Violation(entity=entity, rule="non-finite coordinates"))
            continue

        for building, polygon in polygons:
            if node.position.z < building.height and shapely.contains_xy(
                polygon, node.position.x, node.position.y
            ):
                violations.append(Violation(entity=entity, rule="node inside building"))
                break

        if node.spec.kind == "gnb":
            if not math.isclose(node.spec.height_m, node.position.z, abs_tol=1e-6):
                violations.append(
                    Violation(entity=entity, rule="gNB height disagrees with placement")
                )

        for rule in node.model.violations(node.spec, scenario.radio):
            violations.append(Violation(entity=entity, rule=rule))
    return violations


def validate(scenario: Scenario) -> list[Violation]:
    """
    Check every scenario rule.

    Args:
        scenario: A parsed scenario.

    Returns:
        All violations, empty when the scenario is consistent. Each names the
        offending entity and the broken rule.
    """
    violations = []

    if not scenario.donors():
        violations.append(Violation(entity="scenario", rule="no donor gNB"))

    for index, building in enumerate(scenario.buildings):
        for rule in footprint_violations(building):
            violations.append(Violation(entity=f"building {index}", rule=rule))

    violations.extend(_node_violations(scenario))

    grid = scenario.grid
    if grid.nx < 1 or grid.ny < 1:
        violations.append(Violation(entity="grid", rule="grid needs at least one point"))
    if not grid.spacing > 0:
        violations.append(Violation(entity="grid", rule="grid spacing must be positive"))
    if not grid.origin.is_finite() or not math.isfinite(grid.ue_height):
        violations.append(Violation(entity="grid", rule="non-finite coordinates"))

    radio = scenario.radio
    if not radio.carrier_frequency_hz > 0:
        violations.append(Violation(entity="radio", rule="carrier frequency must be positive"))
    if not radio.bandwidth_hz > 0:
        violations.append(Violation(entity="radio", rule="bandwidth must be positive"))
    if not radio.noise_figure_db >= 0:
        violations.append(Violation(entity="radio", rule="noise figure must be non-negative"))

    return violations


def _error_location(error: dict) -> str:
    return ".".join(str(part) for part in error.get("loc", ()))


def parse_document(text: str, path: Optional[str], model: type[BaseModel]) -> BaseModel:
    """
    Parse JSON ``text`` into ``model``.

    Raises:
        ScenarioParseError: With line/column for syntax errors, or the field
            location for schema errors.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(e.msg, path=path, line=e.lineno, column=e.colno) from e

    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        extra = f" (+{e.error_count() - 1} more)" if e.error_count() > 1 else ""
        raise ScenarioParseError(
            f"{first['msg']}{extra}", path=path, location=_error_location(first)
        ) from e


def applied_defaults(scenario: Scenario) -> dict[str, dict[str, Any]]:
    """Defaults the scenario relies on, per entity (fields absent from the file)."""
    defaults: dict[str, dict[str, Any]] = {
        "radio": scenario.radio.model_dump(
            mode="json", exclude=scenario.radio.model_fields_set
        ),
        "grid": scenario.grid.model_dump(mode="json", exclude=scenario.grid.model_fields_set),
    }
    for node in scenario.nodes:
        defaults[f"node {node.id}"] = node.model.applied_defaults(node.spec)
    return {entity: fields for entity, fields in defaults.items() if fields}


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Load a scenario file and echo the defaults it relies on to the run log.

    Raises:
        ScenarioParseError: If the file is unreadable, malformed or carries
            unknown keys.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ScenarioParseError(f"cannot read file: {e.strerror}", path=str(path)) from e

    scenario = parse_document(text, str(path), Scenario)
    log_stage(
        "load",
        scenario=path.name,
        buildings=len(scenario.buildings),
        nodes=len(scenario.nodes),
        grid=f"{scenario.grid.nx}x{scenario.grid.ny}",
    )
    for entity, defaults in applied_defaults(scenario).items():
        log_defaults_applied(entity, defaults)
    return scenario


__all__ = [
    "Building",
    "PlacedNode",
    "Point3",
    "RadioParams",
    "Scenario",
    "UeGrid",
    "applied_defaults",
    "Violation",
    "is_los",
    "load_scenario",
    "parse_document",
    "validate",
    "wall_crossings",
]
