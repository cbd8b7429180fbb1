"""
Full-grid evaluation: per-UE best path selection, coverage and percentile tables.

Each UE is served by the strongest of the direct gNB paths and every path
through one Smart-EM node. A node is fed by its best donor (IAB nodes may
also hang off a gNB-fed IAB node). Capacity is the Shannon capacity of the
chosen path, except for IAB paths whose throughput is limited by the shared
access/backhaul resources.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, computed_field

from smartem.debug import log_debug, log_stage
from smartem.em import LinkBudgetTerms, shannon_capacity_bps, snr_db
from smartem.errors import DomainError, GridMismatchError
from smartem.geometry import Point3, Propagator
from smartem.nodes import FeedLink
from smartem.nodes.iab import chained_backhaul_bps
from smartem.progress import ProgressTracker
from smartem.scenario import PlacedNode, Scenario, UeGrid

PERCENTILES = (5, 10, 25, 50, 75, 90, 95)

# Bottom decile of received power
CELL_EDGE_PERCENTILE = 10

# Upper bound for the automatic worker count
MAX_AUTO_WORKERS = 8

_CHUNK_POINTS = 256


def worker_count(requested: Optional[int] = None) -> int:
    """
    Number of worker threads to use.

    ``requested`` wins when given; otherwise ``SMARTEM_THREADS`` is read.
    Zero, unset or unparsable values mean automatic (``min(8, cpu_count)``).
    """
    if requested is None:
        try:
            requested = int(os.environ.get("SMARTEM_THREADS", "0"))
        except ValueError:
            requested = 0
    if requested <= 0:
        return max(1, min(MAX_AUTO_WORKERS, os.cpu_count() or 1))
    return requested


class PathCandidate(NamedTuple):
    """One way of reaching a UE."""

    path_id: str
    serving_node_id: str
    terms: LinkBudgetTerms
    distances_m: tuple[float, ...]
    los: tuple[bool, ...]
    snr_penalty_db: float = 0.0
    capacity_bps: Optional[float] = None


class LinkResult(BaseModel):
    """Best serving path of one grid point."""

    ue_index: int
    x: float
    y: float
    path_id: str
    serving_node_id: str
    terms: LinkBudgetTerms
    snr_db: float
    capacity_bps: float
    scheduled_capacity_bps: float = 0.0
    los: tuple[bool, ...]
    distances_m: tuple[float, ...]

    @computed_field
    @property
    def rx_power_dbm(self) -> float:
        return self.terms.rx_power_dbm


class PercentileRow(BaseModel):
    percentile: int
    rx_power_dbm: float
    capacity_bps: float


class CoverageReport(BaseModel):
    """Outcome of one grid evaluation."""

    grid: UeGrid
    threshold_dbm: float
    coverage_fraction: float = Field(ge=0.0, le=1.0)
    results: list[LinkResult]
    percentiles: list[PercentileRow]

    def rx_powers(self) -> np.ndarray:
        return np.array([r.rx_power_dbm for r in self.results])

    def capacities(self) -> np.ndarray:
        return np.array([r.capacity_bps for r in self.results])

    def indices(self) -> tuple[int, ...]:
        return tuple(r.ue_index for r in self.results)

    def percentile(self, q: int) -> PercentileRow:
        for row in self.percentiles:
            if row.percentile == q:
                return row
        raise DomainError(f"percentile {q} not tabulated")

    @property
    def cell_edge_power_dbm(self) -> float:
        return self.percentile(CELL_EDGE_PERCENTILE).rx_power_dbm


def resolve_feeds(scenario: Scenario, propagator: Propagator) -> dict[str, FeedLink]:
    """
    Pick the feeder of every non-donor node.

    Donors are tried first, then gNB-fed IAB nodes for node classes that
    accept a chained feed. The feeder with the highest received power at the
    node wins; ties go to the earlier placement.
    """
    radio = scenario.radio
    feeds: dict[str, FeedLink] = {}
    relays = [n for n in scenario.nodes if not n.model.is_donor]
    by_id = {n.id: n for n in scenario.nodes}

    def _link(node: PlacedNode, feeder: PlacedNode, depth: int) -> Optional[FeedLink]:
        if feeder.id == node.id or feeder.position.distance_to(node.position) <= 1e-9:
            return None
        eirp = feeder.model.transmit_eirp_dbm(feeder.spec)
        if eirp is None:
            return None
        segment = propagator.segment(feeder.position, node.position)
        terms = LinkBudgetTerms(
            eirp_dbm=eirp,
            path_loss_db=segment.fspl_db,
            penetration_db=segment.penetration_db,
            rx_gain_dbi=node.model.feed_gain_dbi(node.spec),
        )
        hop = shannon_capacity_bps(
            terms.rx_power_dbm, radio.bandwidth_hz, radio.noise_figure_db
        )
        upstream = feeds.get(feeder.id) if depth > 1 else None
        return FeedLink(
            source_id=feeder.id,
            source_position=feeder.position,
            terms=terms,
            distance_m=segment.distance_m,
            los=segment.los,
            depth=depth,
            backhaul_capacity_bps=chained_backhaul_bps(
                hop, upstream, feeder.spec if upstream is not None else None
            ),
        )

    def _offer(node: PlacedNode, link: Optional[FeedLink]) -> None:
        if link is None:
            return
        current = feeds.get(node.id)
        if current is None or link.terms.rx_power_dbm > current.terms.rx_power_dbm:
            feeds[node.id] = link

    for node in relays:
        for donor in scenario.donors():
            if node.model.accepts_feeder(donor, 0):
                _offer(node, _link(node, donor, 1))

    first_hop = {node_id: feed for node_id, feed in feeds.items() if feed.depth == 1}
    for node in relays:
        for feeder_id, feeder_feed in first_hop.items():
            feeder = by_id[feeder_id]
            if feeder.model.transmit_eirp_dbm(feeder.spec) is None:
                continue
            if node.model.accepts_feeder(feeder, feeder_feed.depth):
                _offer(node, _link(node, feeder, feeder_feed.depth + 1))

    for node_id, feed in feeds.items():
        log_debug(
            "Feed resolved",
            node=node_id,
            source=feed.source_id,
            depth=feed.depth,
            rx_dbm=f"{feed.terms.rx_power_dbm:.2f}",
        )
    return feeds


def enumerate_paths(
    scenario: Scenario,
    feeds: dict[str, FeedLink],
    ue: Point3,
    propagator: Propagator,
) -> list[PathCandidate]:
    """All paths to ``ue``: direct ones first, then one per relaying node."""
    radio = scenario.radio
    paths = []
    for donor in scenario.donors():
        if donor.position.distance_to(ue) <= 1e-9:
            continue
        segment = propagator.segment(donor.position, ue)
        paths.append(
            PathCandidate(
                path_id=f"direct:{donor.id}",
                serving_node_id=donor.id,
                terms=LinkBudgetTerms(
                    eirp_dbm=donor.spec.eirp_dbm,
                    path_loss_db=segment.fspl_db,
                    penetration_db=segment.penetration_db,
                    rx_gain_dbi=radio.ue_antenna_gain_dbi,
                ),
                distances_m=(segment.distance_m,),
                los=(segment.los,),
            )
        )

    for node in scenario.nodes:
        feed = feeds.get(node.id)
        if node.model.is_donor or feed is None:
            continue
        relayed = node.model.relay(node, feed, ue, propagator, radio)
        if relayed is None:
            continue
        paths.append(
            PathCandidate(
                path_id=f"via:{node.id}",
                serving_node_id=node.id,
                terms=relayed.terms,
                distances_m=relayed.distances_m,
                los=relayed.los,
                snr_penalty_db=relayed.snr_penalty_db,
                capacity_bps=relayed.capacity_bps,
            )
        )
    return paths


def best_path(paths: Sequence[PathCandidate]) -> PathCandidate:
    """Strongest path; the earliest one wins ties."""
    if not paths:
        raise DomainError("no path reaches this point")
    best = paths[0]
    for candidate in paths[1:]:
        if candidate.terms.rx_power_dbm > best.terms.rx_power_dbm:
            best = candidate
    return best


def _link_result(
    scenario: Scenario, index: int, ue: Point3, path: PathCandidate
) -> LinkResult:
    radio = scenario.radio
    rx = path.terms.rx_power_dbm
    if path.capacity_bps is not None:
        capacity = path.capacity_bps
    else:
        capacity = shannon_capacity_bps(
            rx, radio.bandwidth_hz, radio.noise_figure_db, path.snr_penalty_db
        )
    return LinkResult(
        ue_index=index,
        x=ue.x,
        y=ue.y,
        path_id=path.path_id,
        serving_node_id=path.serving_node_id,
        terms=path.terms,
        snr_db=snr_db(rx, radio.bandwidth_hz, radio.noise_figure_db, path.snr_penalty_db),
        capacity_bps=capacity,
        los=path.los,
        distances_m=path.distances_m,
    )


def percentile_table(powers: np.ndarray, capacities: np.ndarray) -> list[PercentileRow]:
    """Inverted-CDF percentiles of received power and capacity."""
    return [
        PercentileRow(
            percentile=q,
            rx_power_dbm=float(np.percentile(powers, q, method="inverted_cdf")),
            capacity_bps=float(np.percentile(capacities, q, method="inverted_cdf")),
        )
        for q in PERCENTILES
    ]


def evaluate_grid(
    scenario: Scenario,
    propagator: Optional[Propagator] = None,
    workers: Optional[int] = None,
    tracker: Optional[ProgressTracker] = None,
) -> CoverageReport:
    """
    Evaluate every grid point of ``scenario``.

    Args:
        scenario: A validated scenario.
        propagator: Shared segment cache; a fresh one is built when omitted.
        workers: Thread count, see ``worker_count``.
        tracker: Optional progress display.

    Returns:
        The coverage report. Identical inputs give identical reports
        regardless of the worker count.

    Raises:
        DomainError: If no grid point is left to evaluate.
    """
    propagator = propagator or scenario.propagator()
    feeds = resolve_feeds(scenario, propagator)
    points = scenario.ue_points(propagator)
    if not points:
        raise DomainError("the grid has no outdoor points to evaluate")

    log_stage("evaluate", points=len(points), nodes=len(scenario.nodes))

    def _evaluate(chunk: list[tuple[int, Point3]]) -> list[LinkResult]:
        return [
            _link_result(
                scenario, i, p, best_path(enumerate_paths(scenario, feeds, p, propagator))
            )
            for i, p in chunk
        ]

    chunks = [points[i : i + _CHUNK_POINTS] for i in range(0, len(points), _CHUNK_POINTS)]
    results: list[LinkResult] = []
    with ThreadPoolExecutor(max_workers=worker_count(workers)) as executor:
        for chunk_results in executor.map(_evaluate, chunks):
            results.extend(chunk_results)
            if tracker is not None:
                tracker.advance(f"{len(results)}/{len(points)} points", len(chunk_results))

    load: dict[str, int] = {}
    for result in results:
        load[result.serving_node_id] = load.get(result.serving_node_id, 0) + 1
    for result in results:
        result.scheduled_capacity_bps = result.capacity_bps / load[result.serving_node_id]

    powers = np.array([r.rx_power_dbm for r in results])
    capacities = np.array([r.capacity_bps for r in results])
    threshold = scenario.radio.coverage_threshold_dbm
    coverage = float(np.count_nonzero(powers >= threshold)) / len(results)

    log_debug(
        "Segment cache",
        queries=propagator.queries,
        hits=propagator.hits,
    )
    return CoverageReport(
        grid=scenario.grid,
        threshold_dbm=threshold,
        coverage_fraction=coverage,
        results=results,
        percentiles=percentile_table(powers, capacities),
    )


def cdf(
    values: Sequence[float], probabilities: Optional[Sequence[float]] = None
) -> list[tuple[float, float]]:
    """
    Empirical CDF with standard ``<=`` counting.

    Args:
        values: Sample, non-empty.
        probabilities: Optional probability grid. When given, each entry maps
            to the smallest sample value whose CDF reaches it.

    Returns:
        ``(value, P(X <= value))`` pairs sorted by value.

    Raises:
        DomainError: On an empty sample or probabilities outside [0, 1].
    """
    sample = np.sort(np.asarray(values, dtype=float))
    if sample.size == 0:
        raise DomainError("cdf needs at least one value")

    if probabilities is None:
        unique, counts = np.unique(sample, return_counts=True)
        levels = np.cumsum(counts) / sample.size
        return [(float(v), float(p)) for v, p in zip(unique, levels)]

    grid = np.asarray(probabilities, dtype=float)
    if np.any((grid < 0) | (grid > 1)):
        raise DomainError("probabilities must lie in [0, 1]")
    quantiles = np.quantile(sample, grid, method="inverted_cdf")
    return [(float(v), float(p)) for v, p in zip(quantiles, grid)]


class PercentileDelta(BaseModel):
    percentile: int
    rx_power_delta_db: float
    capacity_delta_bps: float


class DeltaReport(BaseModel):
    """Change between two evaluations of the same grid."""

    coverage_delta: float
    cell_edge_power_delta_db: float
    median_capacity_ratio: Optional[float]
    percentiles: list[PercentileDelta]


def delta_report(before: CoverageReport, after: CoverageReport) -> DeltaReport:
    """
    Compare two reports point set by point set.

    Raises:
        GridMismatchError: If the reports cover different grid points.
    """
    if before.grid != after.grid or before.indices() != after.indices():
        raise GridMismatchError("reports were computed on different grids")

    rows = [
        PercentileDelta(
            percentile=b.percentile,
            rx_power_delta_db=a.rx_power_dbm - b.rx_power_dbm,
            capacity_delta_bps=a.capacity_bps - b.capacity_bps,
        )
        for b, a in zip(before.percentiles, after.percentiles)
    ]
    median_before = before.percentile(50).capacity_bps
    median_after = after.percentile(50).capacity_bps
    return DeltaReport(
        coverage_delta=after.coverage_fraction - before.coverage_fraction,
        cell_edge_power_delta_db=after.cell_edge_power_dbm - before.cell_edge_power_dbm,
        median_capacity_ratio=median_after / median_before if median_before > 0 else None,
        percentiles=rows,
    )
