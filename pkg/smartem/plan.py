"""
Heterogeneous placement planning.

Chooses which node class (if any) to install at each user-supplied candidate
site so that the coverage target is met at minimum installation cost. The
search is a greedy gain-per-cost construction refined by first-improvement
local search; an exhaustive enumeration is available as an oracle for small
candidate sets.

Every metric a solution reports comes from a full ``evaluate_grid`` run on
the corresponding deployment, so it can be re-verified independently.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, Iterator, Literal, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from smartem.debug import log_debug, log_info, log_stage, log_warning
from smartem.errors import DomainError, ScenarioParseError
from smartem.geometry import Point3, Propagator
from smartem.nodes import NODE_MODELS, NodeSpec, get_node_model, resolve_kind
from smartem.progress import ProgressTracker
from smartem.scenario import PlacedNode, Scenario, parse_document
from smartem.simulate import CoverageReport, evaluate_grid, worker_count

_SPEC_ADAPTER: TypeAdapter = TypeAdapter(NodeSpec)

Method = Literal["greedy", "exhaustive"]

# Coverage fractions closer than this are equal
_COVERAGE_EPS = 1e-12


def _default_costs() -> dict[str, float]:
    return {kind: model.default_cost for kind, model in NODE_MODELS.items()}


class CostModel(BaseModel):
    """
    Relative installation costs.

    The defaults only encode the expected ordering gNB > IAB > repeater >
    RIS > skin; the absolute numbers are arbitrary units.
    """

    model_config = ConfigDict(extra="forbid")

    unit_costs: dict[str, float] = Field(default_factory=_default_costs)
    power_weight: float = Field(default=0.0, ge=0)

    def unit_cost(self, kind: str) -> float:
        try:
            return self.unit_costs[kind]
        except KeyError:
            raise DomainError(f"no unit cost for node class {kind!r}") from None

    def class_rank(self, kind: str) -> int:
        """Position of ``kind`` in the cost model, used as visiting order."""
        order = list(self.unit_costs)
        return order.index(kind) if kind in order else len(order)

    def ordering_violations(self) -> list[str]:
        """Pairs that break the expected cost ordering."""
        problems = []
        for kind, cost in self.unit_costs.items():
            if not cost > 0:
                problems.append(f"cost of {kind} must be positive")
        ranked = [k for k in NODE_MODELS if k in self.unit_costs]
        for higher, lower in zip(ranked, ranked[1:]):
            if not self.unit_costs[higher] > self.unit_costs[lower]:
                problems.append(f"cost({higher}) should exceed cost({lower})")
        return problems


class CandidateSite(BaseModel):
    """A place where one node may be installed."""

    model_config = ConfigDict(extra="forbid")

    position: Point3
    classes: list[str]
    orientations_deg: list[float] = Field(default_factory=lambda: [0.0])
    overrides: dict[str, dict] = Field(default_factory=dict)


class ReferenceOptimum(BaseModel):
    """Known minimum cost of a candidate file against one scenario and target."""

    model_config = ConfigDict(extra="forbid")

    scenario: str
    coverage_target: float = Field(ge=0, le=1)
    total_cost: float = Field(ge=0)


class CandidateSet(BaseModel):
    """Planner input file: candidate sites plus per-class spec templates."""

    model_config = ConfigDict(extra="forbid")

    sites: list[CandidateSite]
    templates: dict[str, dict] = Field(default_factory=dict)
    cost_model: CostModel = Field(default_factory=CostModel)
    coverage_target: Optional[float] = Field(default=None, ge=0, le=1)
    reference_optimum: Optional[ReferenceOptimum] = None


class PlanOption(BaseModel):
    """One installable choice: a node class at a site with an orientation."""

    model_config = ConfigDict(frozen=True)

    site_index: int
    kind: str
    azimuth_deg: float = 0.0


class PlanSolution(BaseModel):
    """Outcome of a planner run."""

    method: str
    selected: list[PlanOption]
    total_cost: float
    coverage: float
    cell_edge_power_dbm: float
    median_capacity_bps: float
    target: float
    feasible: bool
    evaluations: int
    moves: int = 0


def meets_target(coverage: float, target: float) -> bool:
    return coverage + _COVERAGE_EPS >= target


def node_spec(candidates: CandidateSet, option: PlanOption):
    """Spec for ``option``: class template, then site overrides."""
    site = candidates.sites[option.site_index]
    data = {
        **candidates.templates.get(option.kind, {}),
        **site.overrides.get(option.kind, {}),
        "kind": option.kind,
    }
    return _SPEC_ADAPTER.validate_python(data)


def placed_node(candidates: CandidateSet, option: PlanOption) -> PlacedNode:
    """The placement ``option`` stands for."""
    site = candidates.sites[option.site_index]
    return PlacedNode(
        id=f"site{option.site_index}-{option.kind}",
        position=site.position,
        azimuth_deg=option.azimuth_deg,
        spec=node_spec(candidates, option),
    )


def deployment(
    scenario: Scenario, candidates: CandidateSet, solution: Union[PlanSolution, Iterable[PlanOption]]
) -> Scenario:
    """Scenario with the solution's nodes added in canonical order."""
    options = solution.selected if isinstance(solution, PlanSolution) else list(solution)
    ordered = sorted(options, key=lambda o: (o.site_index, o.kind, o.azimuth_deg))
    return scenario.with_nodes([placed_node(candidates, o) for o in ordered])


def load_candidates(path: Union[str, Path]) -> CandidateSet:
    """
    Load a candidate file and check that every option builds a valid spec.

    Raises:
        ScenarioParseError: On syntax or schema errors, unknown node classes
            or templates that do not form a complete spec.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ScenarioParseError(f"cannot read file: {e.strerror}", path=str(path)) from e

    candidates = parse_document(text, str(path), CandidateSet)
    for index, site in enumerate(candidates.sites):
        resolved = []
        for position, kind in enumerate(site.classes):
            canonical = resolve_kind(kind)
            if canonical is None:
                raise ScenarioParseError(
                    f"unknown node class {kind!r}",
                    path=str(path),
                    location=f"sites.{index}.classes.{position}",
                )
            resolved.append(canonical)
        site.classes = resolved
        for kind in resolved:
            try:
                node_spec(candidates, PlanOption(site_index=index, kind=kind))
            except ValidationError as e:
                first = e.errors()[0]
                raise ScenarioParseError(
                    first["msg"],
                    path=str(path),
                    location=f"sites.{index}.{kind}." + ".".join(str(p) for p in first["loc"]),
                ) from e
    log_stage("load", candidates=path.name, sites=len(candidates.sites))
    return candidates


class PlanEvaluator:
    """
    Evaluates deployments for the planner.

    Reports are memoized per option set and all evaluations share one
    segment cache, since candidate deployments reuse most links.
    """

    def __init__(
        self,
        scenario: Scenario,
        candidates: CandidateSet,
        cost_model: Optional[CostModel] = None,
        propagator: Optional[Propagator] = None,
        workers: Optional[int] = None,
    ):
        self.scenario = scenario
        self.candidates = candidates
        self.cost_model = cost_model or candidates.cost_model
        self.propagator = propagator or scenario.propagator()
        self.workers = worker_count(workers)
        self.evaluations = 0
        self._memo: dict[frozenset, CoverageReport] = {}
        self._costs: dict[PlanOption, float] = {}

    def options(self) -> list[PlanOption]:
        """
        Every installable option in visiting order.

        Sites ascend; classes follow the cost model; orientations keep file
        order. Surfaces without line of sight to any donor are skipped.
        """
        donors = self.scenario.donors()
        result = []
        for index, site in enumerate(self.candidates.sites):
            kinds = sorted(site.classes, key=self.cost_model.class_rank)
            for kind in kinds:
                if kind in ("ris", "skin") and not any(
                    self.propagator.segment(d.position, site.position).los for d in donors
                ):
                    log_debug("Candidate skipped, no donor in sight", site=index, kind=kind)
                    continue
                for azimuth in site.orientations_deg:
                    result.append(PlanOption(site_index=index, kind=kind, azimuth_deg=azimuth))
        return result

    def option_cost(self, option: PlanOption) -> float:
        cost = self._costs.get(option)
        if cost is None:
            spec = node_spec(self.candidates, option)
            power = get_node_model(option.kind).power_consumption_w(spec, self.scenario.radio)
            cost = self.cost_model.unit_cost(option.kind) + self.cost_model.power_weight * power
            self._costs[option] = cost
        return cost

    def total_cost(self, options: Iterable[PlanOption]) -> float:
        return math.fsum(self.option_cost(o) for o in _canonical(options))

    def _report(self, options: Sequence[PlanOption]) -> CoverageReport:
        return evaluate_grid(
            deployment(self.scenario, self.candidates, options),
            propagator=self.propagator,
            workers=1,
        )

    def evaluate(self, options: Iterable[PlanOption]) -> CoverageReport:
        return self.evaluate_many([list(options)])[0]

    def evaluate_many(self, option_sets: Sequence[Sequence[PlanOption]]) -> list[CoverageReport]:
        """Reports for several deployments, evaluated concurrently."""
        keys = [frozenset(s) for s in option_sets]
        missing = list(dict.fromkeys(k for k in keys if k not in self._memo))
        if missing:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                reports = list(executor.map(lambda k: self._report(_canonical(k)), missing))
            for key, report in zip(missing, reports):
                self._memo[key] = report
            self.evaluations += len(missing)
        return [self._memo[k] for k in keys]

    def solution(
        self,
        options: Iterable[PlanOption],
        target: float,
        method: str,
        moves: int = 0,
    ) -> PlanSolution:
        selected = _canonical(options)
        report = self.evaluate(selected)
        return PlanSolution(
            method=method,
            selected=selected,
            total_cost=self.total_cost(selected),
            coverage=report.coverage_fraction,
            cell_edge_power_dbm=report.cell_edge_power_dbm,
            median_capacity_bps=report.percentile(50).capacity_bps,
            target=target,
            feasible=meets_target(report.coverage_fraction, target),
            evaluations=self.evaluations,
            moves=moves,
        )


def _canonical(options: Iterable[PlanOption]) -> list[PlanOption]:
    return sorted(options, key=lambda o: (o.site_index, o.kind, o.azimuth_deg))


def _check_target(target: float) -> None:
    if not 0.0 <= target <= 1.0:
        raise DomainError(f"coverage target must lie in [0, 1], got {target}")


def greedy_plan(
    scenario: Scenario,
    candidates: CandidateSet,
    cost_model: CostModel,
    coverage_target: float,
    evaluator: Optional[PlanEvaluator] = None,
    tracker: Optional[ProgressTracker] = None,
) -> PlanSolution:
    """
    Add the option with the best coverage gain per cost until the target is met.

    Ties on the ratio go to the cheaper option, then to the lower site index.
    Options with no coverage gain are never taken. One node per site.

    Returns:
        The construction, flagged infeasible when candidates run out first.
    """
    _check_target(coverage_target)
    evaluator = evaluator or PlanEvaluator(scenario, candidates, cost_model)
    options = evaluator.options()
    selected: list[PlanOption] = []
    coverage = evaluator.evaluate(selected).coverage_fraction
    log_stage("plan", method="greedy", options=len(options), baseline=f"{coverage:.4f}")

    while not meets_target(coverage, coverage_target):
        used = {o.site_index for o in selected}
        remaining = [o for o in options if o.site_index not in used]
        if not remaining:
            break
        reports = evaluator.evaluate_many([selected + [o] for o in remaining])

        best: Optional[tuple[float, float, int, PlanOption, float]] = None
        for option, report in zip(remaining, reports):
            gain = report.coverage_fraction - coverage
            if gain <= _COVERAGE_EPS:
                continue
            cost = evaluator.option_cost(option)
            ratio = gain / cost
            log_debug(
                "Greedy score",
                site=option.site_index,
                kind=option.kind,
                azimuth=option.azimuth_deg,
                gain=f"{gain:.6f}",
                cost=cost,
            )
            if best is None or _better(ratio, cost, option.site_index, best):
                best = (ratio, cost, option.site_index, option, report.coverage_fraction)

        if tracker is not None:
            tracker.advance(f"step {len(selected) + 1}: {len(remaining)} options")
        if best is None:
            break
        selected.append(best[3])
        coverage = best[4]
        log_info(
            "Greedy step",
            site=best[3].site_index,
            kind=best[3].kind,
            coverage=f"{coverage:.4f}",
        )

    return evaluator.solution(selected, coverage_target, method="greedy")


def _better(ratio: float, cost: float, site: int, best: tuple) -> bool:
    best_ratio, best_cost, best_site = best[0], best[1], best[2]
    if not math.isclose(ratio, best_ratio, rel_tol=1e-12, abs_tol=0.0):
        return ratio > best_ratio
    if cost != best_cost:
        return cost < best_cost
    return site < best_site


def _neighbors(
    current: list[PlanOption], options: list[PlanOption], cost_model: CostModel
) -> Iterator[tuple[str, list[PlanOption]]]:
    """Moves in visiting order: drop, swap class at a site, swap site within class."""
    by_site = sorted(current, key=lambda o: (o.site_index, cost_model.class_rank(o.kind)))
    used = {o.site_index for o in current}

    for option in by_site:
        yield "drop", [o for o in current if o != option]

    for option in by_site:
        for other in options:
            if other.site_index == option.site_index and other != option:
                yield "swap-class", [other if o == option else o for o in current]

    for option in by_site:
        for other in options:
            if other.kind == option.kind and other.site_index not in used:
                yield "swap-site", [other if o == option else o for o in current]


def local_search(
    scenario: Scenario,
    initial: PlanSolution,
    cost_model: CostModel,
    coverage_target: float,
    max_moves: int,
    evaluator: Optional[PlanEvaluator] = None,
    candidates: Optional[CandidateSet] = None,
) -> PlanSolution:
    """
    First-improvement descent on cost.

    A move is taken when it lowers cost strictly and keeps the coverage
    constraint (for an infeasible start: does not lower coverage). Stops at
    a local optimum or after ``max_moves`` moves.

    Args:
        scenario: Baseline scenario.
        initial: Starting solution.
        cost_model: Unit costs.
        coverage_target: Coverage constraint.
        max_moves: Move budget; 0 returns ``initial`` unchanged.
        evaluator: Shared evaluator; required unless ``candidates`` is given.
        candidates: Candidate set, used to build an evaluator.
    """
    _check_target(coverage_target)
    if max_moves <= 0:
        return initial
    if evaluator is None:
        if candidates is None:
            raise DomainError("local search needs an evaluator or a candidate set")
        evaluator = PlanEvaluator(scenario, candidates, cost_model)

    options = evaluator.options()
    current = _canonical(initial.selected)
    current_cost = evaluator.total_cost(current)
    current_coverage = evaluator.evaluate(current).coverage_fraction
    feasible = meets_target(current_coverage, coverage_target)
    moves = 0

    while moves < max_moves:
        accepted = None
        for name, neighbor in _neighbors(current, options, cost_model):
            cost = evaluator.total_cost(neighbor)
            if not cost < current_cost:
                continue
            coverage = evaluator.evaluate(neighbor).coverage_fraction
            keeps = (
                meets_target(coverage, coverage_target)
                if feasible
                else coverage + _COVERAGE_EPS >= current_coverage
            )
            if keeps:
                accepted = (name, _canonical(neighbor), cost, coverage)
                break
        if accepted is None:
            break
        name, current, current_cost, current_coverage = accepted
        moves += 1
        log_info("Local search move", move=name, cost=current_cost, coverage=f"{current_coverage:.4f}")

    return evaluator.solution(current, coverage_target, method=f"{initial.method}+local", moves=moves)


def plan(
    scenario: Scenario,
    candidates: CandidateSet,
    cost_model: CostModel,
    coverage_target: float,
    max_moves: int = 100,
    evaluator: Optional[PlanEvaluator] = None,
    tracker: Optional[ProgressTracker] = None,
) -> PlanSolution:
    """Greedy construction followed by local search."""
    evaluator = evaluator or PlanEvaluator(scenario, candidates, cost_model)
    greedy = greedy_plan(scenario, candidates, cost_model, coverage_target, evaluator, tracker)
    return local_search(scenario, greedy, cost_model, coverage_target, max_moves, evaluator)


def pareto_sweep(
    scenario: Scenario,
    candidates: CandidateSet,
    cost_model: CostModel,
    coverage_targets: Sequence[float],
    max_moves: int = 100,
    evaluator: Optional[PlanEvaluator] = None,
) -> list[PlanSolution]:
    """
    One planned solution per target.

    Raises:
        DomainError: If the targets are not sorted ascending.
    """
    if list(coverage_targets) != sorted(coverage_targets):
        raise DomainError("coverage targets must be sorted ascending")
    evaluator = evaluator or PlanEvaluator(scenario, candidates, cost_model)
    return [
        plan(scenario, candidates, cost_model, target, max_moves, evaluator)
        for target in coverage_targets
    ]


def exhaustive_plan(
    scenario: Scenario,
    candidates: CandidateSet,
    cost_model: CostModel,
    coverage_target: float,
    evaluator: Optional[PlanEvaluator] = None,
    tracker: Optional[ProgressTracker] = None,
) -> PlanSolution:
    """
    Enumerate every assignment (each site: nothing or one option).

    The cheapest feasible assignment wins; ties go to higher coverage, then
    enumeration order. With no feasible assignment the highest-coverage one
    is returned, flagged infeasible.
    """
    _check_target(coverage_target)
    evaluator = evaluator or PlanEvaluator(scenario, candidates, cost_model)
    options = evaluator.options()
    per_site: dict[int, list[Optional[PlanOption]]] = {}
    for option in options:
        per_site.setdefault(option.site_index, [None]).append(option)

    assignments = [
        [o for o in choice if o is not None]
        for choice in itertools.product(*per_site.values())
    ]
    log_stage("plan", method="exhaustive", assignments=len(assignments))
    if tracker is not None:
        tracker.grow(len(assignments))

    best_feasible: Optional[tuple[float, float, list[PlanOption]]] = None
    best_any: Optional[tuple[float, float, list[PlanOption]]] = None
    batch = max(1, evaluator.workers * 8)
    for start in range(0, len(assignments), batch):
        chunk = assignments[start : start + batch]
        for assignment, report in zip(chunk, evaluator.evaluate_many(chunk)):
            cost = evaluator.total_cost(assignment)
            coverage = report.coverage_fraction
            if meets_target(coverage, coverage_target):
                if (
                    best_feasible is None
                    or cost < best_feasible[0]
                    or (cost == best_feasible[0] and coverage > best_feasible[1])
                ):
                    best_feasible = (cost, coverage, assignment)
            if (
                best_any is None
                or coverage > best_any[1]
                or (coverage == best_any[1] and cost < best_any[0])
            ):
                best_any = (cost, coverage, assignment)
        if tracker is not None:
            tracker.advance(f"{start + len(chunk)}/{len(assignments)} assignments", len(chunk))

    chosen = best_feasible or best_any
    if best_feasible is None:
        log_warning("No assignment reaches the coverage target", target=coverage_target)
    return evaluator.solution(chosen[2], coverage_target, method="exhaustive")

