"""
Run orchestration shared by the CLI commands.

A ``RunConfig`` names the command, its inputs and the flag overrides. ``run``
loads and validates the inputs, dispatches to the library, writes every
artifact plus ``summary.json`` and ``manifest.json`` into the output
directory, and returns the exit status with the report to display.

Precedence for overridable values is flags > scenario/candidate file > model
defaults.
"""

import math
from pathlib import Path
from typing import Any, Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from smartem import __version__
from smartem.arrays import (
    ArraySpec,
    BitsSpec,
    EnvelopePoint,
    parse_bits_label,
    scan_loss_envelope,
)
from smartem.cache import ENVELOPE_NAMESPACE, cache_key, read_cache, write_cache
from smartem.debug import (
    log_cache_hit,
    log_cache_miss,
    log_error,
    log_info,
    log_stage,
    log_warning,
)
from smartem.errors import DomainError, ScenarioParseError, SmartEmError
from smartem.export import (
    bits_label,
    cdf_frame,
    coverage_frame,
    envelope_frame,
    length_frame,
    src_frame,
    write_csv,
    write_json,
)
from smartem.nodes import get_node_model
from smartem.outage import ObstacleModel, link_length_sensitivity, outage_vs_separation
from smartem.plan import (
    CandidateSet,
    Method,
    PlanEvaluator,
    PlanOption,
    PlanSolution,
    deployment,
    exhaustive_plan,
    load_candidates,
    node_spec,
    plan,
)
from smartem.progress import ProgressTracker
from smartem.reporters import Metric, ReportData, ReportTable, get_reporter
from smartem.scenario import (
    PlacedNode,
    Scenario,
    applied_defaults,
    load_scenario,
    validate,
)
from smartem.simulate import CoverageReport, cdf, delta_report, evaluate_grid, worker_count

Command = Literal["validate", "coverage", "cdf", "plan", "src", "envelope"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

MAX_SEED = 2**64 - 1

DEFAULT_SEPARATIONS_DEG = (10.0, 20.0, 30.0, 45.0, 60.0, 90.0)

_SCENARIO_COMMANDS = ("validate", "coverage", "cdf", "plan")


class RunConfig(BaseModel):
    """Everything one CLI invocation asks for."""

    model_config = ConfigDict(extra="forbid")

    command: Command
    scenario: Optional[Path] = None
    out: Path = Path("out")
    seed: Optional[int] = Field(default=None, ge=0, le=MAX_SEED)
    workers: Optional[int] = Field(default=None, ge=0)

    # Overrides
    threshold_dbm: Optional[float] = None
    bandwidth_hz: Optional[float] = Field(default=None, gt=0)
    bits: Optional[str] = None

    # cdf
    baseline: Optional[Path] = None

    # plan
    candidates: Optional[Path] = None
    method: Method = "greedy"
    target: Optional[float] = Field(default=None, ge=0, le=1)
    max_moves: int = Field(default=100, ge=0)

    # src
    separations_deg: list[float] = Field(default_factory=lambda: list(DEFAULT_SEPARATIONS_DEG))
    lengths_m: list[float] = Field(default_factory=list)
    trials: int = Field(default=10_000, ge=1)
    density_per_m2: float = Field(default=0.01, ge=0)
    radius_m: float = Field(default=0.3, gt=0)
    self_blockage_deg: float = Field(default=60.0, ge=0, le=360)
    primary_length_m: float = Field(default=50.0, gt=0)
    reflected_length_m: float = Field(default=20.0, gt=0)

    # envelope
    elements: int = Field(default=8, ge=1)
    spacing: float = Field(default=1.5, gt=0)
    element_exponent: float = Field(default=2.0, ge=0)
    max_scan_deg: float = Field(default=60.0, gt=0, lt=90)
    step_deg: float = Field(default=1.0, gt=0)
    use_cache: bool = True

    @model_validator(mode="after")
    def _check_inputs(self) -> "RunConfig":
        if self.command in _SCENARIO_COMMANDS and self.scenario is None:
            raise ValueError(f"{self.command} needs --scenario")
        if self.command == "plan" and self.candidates is None:
            raise ValueError("plan needs --candidates")
        if self.command == "src" and self.seed is None:
            raise ValueError("src needs --seed")
        return self

    def apply_overrides(self, scenario: Scenario) -> Scenario:
        """Scenario with the flag overrides applied on top of the file values."""
        radio_update: dict[str, Any] = {}
        if self.threshold_dbm is not None:
            radio_update["coverage_threshold_dbm"] = self.threshold_dbm
        if self.bandwidth_hz is not None:
            radio_update["bandwidth_hz"] = self.bandwidth_hz

        update: dict[str, Any] = {}
        if radio_update:
            update["radio"] = scenario.radio.model_copy(update=radio_update)
        if self.bits is not None:
            bits = self.ris_bits()
            update["nodes"] = [
                node.model_copy(update={"spec": node.spec.model_copy(update={"bits": bits})})
                if node.spec.kind == "ris"
                else node
                for node in scenario.nodes
            ]
        if update:
            log_info("Overrides applied", **self.overrides())
        return scenario.model_copy(update=update) if update else scenario

    def overrides(self) -> dict[str, Any]:
        values = {
            "threshold_dbm": self.threshold_dbm,
            "bandwidth_hz": self.bandwidth_hz,
            "bits": self.bits,
        }
        return {k: v for k, v in values.items() if v is not None}

    def ris_bits(self) -> int | Literal["continuous"]:
        """``--bits`` as a RIS phase resolution (one value, no hybrid)."""
        assert self.bits is not None
        labels = self.bit_labels()
        if len(labels) != 1:
            raise DomainError("--bits takes a single value outside the envelope command")
        bits = parse_bits_label(labels[0], 1)
        if not (bits == "continuous" or isinstance(bits, int)):
            raise DomainError("RIS bits must be 1..4 or continuous")
        return bits

    def bit_labels(self) -> list[str]:
        raw = self.bits if self.bits is not None else "1,2,hybrid"
        labels = [token.strip() for token in raw.split(",") if token.strip()]
        if not labels:
            raise DomainError("--bits needs at least one value")
        return labels


class RunManifest(BaseModel):
    """
    Config echo written next to the artifacts of every run.

    The output directory is not echoed and ``workers`` is the requested
    count (None for automatic), so identical inputs write identical bytes
    into any directory.
    """

    tool: str = "smartem"
    version: str = __version__
    command: str
    seed: Optional[int]
    workers: Optional[int]
    config: dict[str, Any]
    overrides: dict[str, Any]
    applied_defaults: dict[str, dict[str, Any]] = Field(default_factory=dict)
    artifacts: list[str] = Field(default_factory=list)
    exit_code: int
    error: Optional[str] = None


class PlanDocument(BaseModel):
    """Contents of ``plan.json``."""

    solution: PlanSolution
    nodes: list[PlacedNode]


class RunResult(BaseModel):
    """What the CLI needs after a run."""

    exit_code: int
    report: Optional[ReportData] = None
    error: Optional[str] = None
    out_dir: Path


class _Run:
    """Mutable state of one run: output directory, artifacts and defaults."""

    def __init__(self, config: RunConfig, tracker: Optional[ProgressTracker]):
        self.config = config
        self.tracker = tracker
        self.workers = worker_count(config.workers)
        self.artifacts: list[str] = []
        self.defaults: dict[str, dict[str, Any]] = {}

    def csv(self, name: str, frame) -> None:
        write_csv(frame, self.config.out / name)
        self.artifacts.append(name)
        log_stage("export", artifact=name, rows=len(frame))

    def json(self, name: str, data) -> None:
        write_json(data, self.config.out / name)
        self.artifacts.append(name)
        log_stage("export", artifact=name)

    def scenario(self, path: Path) -> Scenario:
        loaded = load_scenario(path)
        for entity, fields in applied_defaults(loaded).items():
            self.defaults[f"{path.name}: {entity}"] = fields
        return self.config.apply_overrides(loaded)

    def report(self, subject: str, **kwargs) -> ReportData:
        return ReportData(
            command=self.config.command,
            subject=subject,
            version=__version__,
            artifacts=self.artifacts,
            **kwargs,
        )

    def evaluate(self, scenario: Scenario, description: str) -> CoverageReport:
        if self.tracker is None:
            return evaluate_grid(scenario, workers=self.workers)
        self.tracker.start(description)
        try:
            report = evaluate_grid(scenario, workers=self.workers, tracker=self.tracker)
            self.tracker.finish()
        finally:
            self.tracker.stop()
        return report


def _violations_report(run: _Run, subject: str, scenario: Scenario) -> Optional[ReportData]:
    log_stage("validate", subject=subject)
    violations = [str(v) for v in validate(scenario)]
    if not violations:
        return None
    for violation in violations:
        log_warning("Violation", rule=violation)
    return run.report(subject, status="violations", violations=violations)


def _coverage_metrics(report: CoverageReport) -> list[Metric]:
    return [
        Metric(name="points", value=len(report.results)),
        Metric(name="threshold", value=report.threshold_dbm, unit="dBm"),
        Metric(name="coverage_fraction", value=report.coverage_fraction),
        Metric(name="cell_edge_power", value=report.cell_edge_power_dbm, unit="dBm"),
        Metric(name="median_power", value=report.percentile(50).rx_power_dbm, unit="dBm"),
        Metric(name="median_capacity", value=report.percentile(50).capacity_bps, unit="bit/s"),
    ]


def _percentile_table(report: CoverageReport) -> ReportTable:
    return ReportTable(
        title="Percentiles",
        columns=["percentile", "rx_power_dbm", "capacity_bps"],
        rows=[[r.percentile, r.rx_power_dbm, r.capacity_bps] for r in report.percentiles],
    )


def _run_validate(run: _Run) -> tuple[int, ReportData]:
    path = run.config.scenario
    assert path is not None
    scenario = run.scenario(path)
    failed = _violations_report(run, path.name, scenario)
    if failed is not None:
        return EXIT_FAILED, failed
    kinds: dict[str, int] = {}
    for node in scenario.nodes:
        kinds[node.spec.kind] = kinds.get(node.spec.kind, 0) + 1
    metrics = [
        Metric(name="buildings", value=len(scenario.buildings)),
        Metric(name="nodes", value=len(scenario.nodes)),
        *(Metric(name=f"{kind} nodes", value=count) for kind, count in sorted(kinds.items())),
        Metric(name="grid_points", value=scenario.grid.size),
    ]
    return EXIT_OK, run.report(path.name, metrics=metrics)


def _run_coverage(run: _Run) -> tuple[int, ReportData]:
    path = run.config.scenario
    assert path is not None
    scenario = run.scenario(path)
    failed = _violations_report(run, path.name, scenario)
    if failed is not None:
        return EXIT_FAILED, failed

    report = run.evaluate(scenario, "Evaluating grid")
    run.csv("coverage.csv", coverage_frame(report))
    return EXIT_OK, run.report(
        path.name, metrics=_coverage_metrics(report), tables=[_percentile_table(report)]
    )


def _run_cdf(run: _Run) -> tuple[int, ReportData]:
    path = run.config.scenario
    assert path is not None
    scenario = run.scenario(path)
    failed = _violations_report(run, path.name, scenario)
    if failed is not None:
        return EXIT_FAILED, failed

    baseline: Optional[Scenario] = None
    if run.config.baseline is not None:
        baseline = run.scenario(run.config.baseline)
        failed = _violations_report(run, run.config.baseline.name, baseline)
        if failed is not None:
            return EXIT_FAILED, failed

    report = run.evaluate(scenario, "Evaluating grid")
    run.csv("cdf_power.csv", cdf_frame(cdf(report.rx_powers()), "rx_power_dbm"))
    run.csv("cdf_capacity.csv", cdf_frame(cdf(report.capacities()), "capacity_bps"))
    metrics = _coverage_metrics(report)
    tables = [_percentile_table(report)]

    if baseline is not None:
        before = run.evaluate(baseline, "Evaluating baseline")
        delta = delta_report(before, report)
        run.json("delta.json", delta)
        metrics += [
            Metric(name="coverage_delta", value=delta.coverage_delta),
            Metric(name="cell_edge_power_delta", value=delta.cell_edge_power_delta_db, unit="dB"),
            Metric(name="median_capacity_ratio", value=delta.median_capacity_ratio),
        ]
        tables.append(
            ReportTable(
                title="Change against baseline",
                columns=["percentile", "rx_power_delta_db", "capacity_delta_bps"],
                rows=[
                    [r.percentile, r.rx_power_delta_db, r.capacity_delta_bps]
                    for r in delta.percentiles
                ],
            )
        )
    return EXIT_OK, run.report(path.name, metrics=metrics, tables=tables)


def _candidate_violations(scenario: Scenario, candidates: CandidateSet) -> list[str]:
    rules = []
    for index, site in enumerate(candidates.sites):
        for kind in site.classes:
            spec = node_spec(candidates, PlanOption(site_index=index, kind=kind))
            model = get_node_model(kind)
            assert model is not None
            for rule in model.violations(spec, scenario.radio):
                rules.append(f"site {index} {kind}: {rule}")
    return rules


def _run_plan(run: _Run) -> tuple[int, ReportData]:
    config = run.config
    assert config.scenario is not None and config.candidates is not None
    scenario = run.scenario(config.scenario)
    failed = _violations_report(run, config.scenario.name, scenario)
    if failed is not None:
        return EXIT_FAILED, failed

    candidates = load_candidates(config.candidates)
    rules = _candidate_violations(scenario, candidates)
    if rules:
        report = run.report(config.candidates.name, status="violations", violations=rules)
        return EXIT_FAILED, report

    target = config.target if config.target is not None else candidates.coverage_target
    if target is None:
        raise DomainError("plan needs a coverage target (--target or coverage_target)")
    cost_model = candidates.cost_model
    warnings = cost_model.ordering_violations()
    for warning in warnings:
        log_warning("Cost model", issue=warning)

    evaluator = PlanEvaluator(scenario, candidates, cost_model, workers=run.workers)
    tracker = run.tracker
    if tracker is not None:
        tracker.start(f"Planning ({config.method})")
    try:
        if config.method == "exhaustive":
            solution = exhaustive_plan(
                scenario, candidates, cost_model, target, evaluator, tracker
            )
        else:
            solution = plan(
                scenario, candidates, cost_model, target, config.max_moves, evaluator, tracker
            )
        if tracker is not None:
            tracker.finish()
    finally:
        if tracker is not None:
            tracker.stop()

    deployed = deployment(scenario, candidates, solution)
    report = evaluator.evaluate(solution.selected)
    added = deployed.nodes[len(scenario.nodes) :]
    run.json("plan.json", PlanDocument(solution=solution, nodes=added))
    run.csv("coverage.csv", coverage_frame(report))

    metrics = [
        Metric(name="method", value=solution.method),
        Metric(name="target", value=solution.target),
        Metric(name="feasible", value=solution.feasible),
        Metric(name="total_cost", value=solution.total_cost),
        Metric(name="coverage_fraction", value=solution.coverage),
        Metric(name="cell_edge_power", value=solution.cell_edge_power_dbm, unit="dBm"),
        Metric(name="median_capacity", value=solution.median_capacity_bps, unit="bit/s"),
        Metric(name="evaluations", value=solution.evaluations),
        Metric(name="moves", value=solution.moves),
    ]
    reference = candidates.reference_optimum
    if (
        reference is not None
        and solution.feasible
        and reference.scenario == config.scenario.name
        and math.isclose(reference.coverage_target, target)
        and reference.total_cost > 0
    ):
        metrics.append(
            Metric(name="cost_vs_reference", value=solution.total_cost / reference.total_cost)
        )

    selected = ReportTable(
        title="Selected nodes",
        columns=["site", "class", "azimuth_deg", "cost"],
        rows=[
            [o.site_index, o.kind, o.azimuth_deg, evaluator.option_cost(o)]
            for o in solution.selected
        ],
    )
    status = "ok" if solution.feasible else "infeasible"
    if not solution.feasible:
        log_warning("Plan infeasible", coverage=solution.coverage, target=target)
    return (
        EXIT_OK if solution.feasible else EXIT_FAILED,
        run.report(
            config.candidates.name,
            status=status,
            metrics=metrics,
            tables=[selected],
            warnings=warnings,
        ),
    )


def _run_src(run: _Run) -> tuple[int, ReportData]:
    config = run.config
    assert config.seed is not None
    obstacles = ObstacleModel(density_per_m2=config.density_per_m2, radius_m=config.radius_m)
    estimates = outage_vs_separation(
        config.separations_deg,
        obstacles,
        config.self_blockage_deg,
        config.trials,
        config.seed,
        config.primary_length_m,
        config.reflected_length_m,
        workers=run.workers,
    )
    run.csv("src_outage.csv", src_frame(estimates))
    tables = [
        ReportTable(
            title="Outage versus angular separation",
            columns=["separation_deg", "outage", "ci_low", "ci_high"],
            rows=[
                [e.separation_deg, e.outage_probability, e.ci_low, e.ci_high] for e in estimates
            ],
        )
    ]
    if config.lengths_m:
        rows = link_length_sensitivity(
            config.lengths_m, obstacles, config.self_blockage_deg, config.trials, config.seed
        )
        run.csv("link_length.csv", length_frame(rows))
        tables.append(
            ReportTable(
                title="Blocking versus link length",
                columns=["length_m", "outage", "analytic"],
                rows=[[r.length_m, r.outage_probability, r.analytic] for r in rows],
            )
        )
    metrics = [
        Metric(name="trials", value=config.trials),
        Metric(name="seed", value=config.seed),
        Metric(name="density", value=config.density_per_m2, unit="1/m²"),
        Metric(name="radius", value=config.radius_m, unit="m"),
        Metric(name="self_blockage", value=config.self_blockage_deg, unit="deg"),
    ]
    return EXIT_OK, run.report("smart radio connection", metrics=metrics, tables=tables)


def _envelope_column(
    run: _Run, spec: ArraySpec, bits: BitsSpec, angles: np.ndarray
) -> list[EnvelopePoint]:
    key = cache_key(spec, bits if isinstance(bits, (int, str)) else list(bits), angles.tolist())
    if run.config.use_cache:
        cached = read_cache(ENVELOPE_NAMESPACE, key)
        if cached is not None:
            log_cache_hit(ENVELOPE_NAMESPACE, bits_label(bits))
            return [EnvelopePoint.model_validate(p) for p in cached]
        log_cache_miss(ENVELOPE_NAMESPACE, bits_label(bits))

    points = scan_loss_envelope(spec, bits, angles.tolist(), workers=run.workers)
    if run.config.use_cache:
        write_cache(ENVELOPE_NAMESPACE, key, [p.model_dump(mode="json") for p in points])
    return points


def _run_envelope(run: _Run) -> tuple[int, ReportData]:
    config = run.config
    spec = ArraySpec(
        n_elements=config.elements,
        spacing_wavelengths=config.spacing,
        element_exponent=config.element_exponent,
    )
    count = int(math.floor(config.max_scan_deg / config.step_deg + 1e-9))
    angles = np.radians(np.arange(-count, count + 1) * config.step_deg)

    assignments: dict[str, BitsSpec] = {"continuous": "continuous"}
    for label in config.bit_labels():
        bits = parse_bits_label(label, spec.n_elements)
        assignments.setdefault(bits_label(bits), bits)

    if run.tracker is not None:
        run.tracker.start("Optimizing codewords", total=len(assignments))
    columns: dict[str, list[EnvelopePoint]] = {}
    try:
        for name, bits in assignments.items():
            log_stage("envelope", bits=name, angles=len(angles))
            columns[name] = _envelope_column(run, spec, bits, angles)
            if run.tracker is not None:
                run.tracker.advance(name)
        if run.tracker is not None:
            run.tracker.finish()
    finally:
        if run.tracker is not None:
            run.tracker.stop()

    run.csv("envelope.csv", envelope_frame(columns))

    reference = np.array([p.directivity_dbi for p in columns["continuous"]])
    rows = []
    for name, points in columns.items():
        values = np.array([p.directivity_dbi for p in points])
        loss = float(np.mean(reference - values))
        rows.append([name, float(values.max()), float(values.min()), loss])
    table = ReportTable(
        title="Envelopes",
        columns=["bits", "peak_dbi", "worst_dbi", "mean_loss_db"],
        rows=rows,
    )
    metrics = [
        Metric(name="elements", value=spec.n_elements),
        Metric(name="spacing", value=spec.spacing_wavelengths, unit="λ"),
        Metric(name="scan_range", value=config.max_scan_deg, unit="±deg"),
        Metric(name="angles", value=len(angles)),
    ]
    return EXIT_OK, run.report("scan-loss envelope", metrics=metrics, tables=[table])


_DISPATCH: dict[str, Callable[[_Run], tuple[int, ReportData]]] = {
    "validate": _run_validate,
    "coverage": _run_coverage,
    "cdf": _run_cdf,
    "plan": _run_plan,
    "src": _run_src,
    "envelope": _run_envelope,
}


def run(config: RunConfig, tracker: Optional[ProgressTracker] = None) -> RunResult:
    """
    Execute one command and write its artifacts.

    Args:
        config: The run configuration.
        tracker: Optional progress display for long stages.

    Returns:
        Exit status 0 when every artifact was written (and, for ``plan``, the
        target was met), 1 on scenario violations or an infeasible plan,
        2 on parse or usage errors. ``manifest.json`` is written in all cases
        once the output directory exists.
    """
    state = _Run(config, tracker)
    log_stage("run", command=config.command, seed=config.seed, workers=state.workers)

    try:
        config.out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        message = f"cannot create output directory {config.out}: {e.strerror}"
        log_error(message)
        return RunResult(exit_code=EXIT_USAGE, error=message, out_dir=config.out)

    report: Optional[ReportData] = None
    error: Optional[str] = None
    try:
        exit_code, report = _DISPATCH[config.command](state)
    except (ScenarioParseError, DomainError) as e:
        exit_code, error = EXIT_USAGE, str(e)
    except SmartEmError as e:
        exit_code, error = EXIT_FAILED, str(e)
    except OSError as e:
        exit_code, error = EXIT_USAGE, f"cannot write artifacts: {e}"
    if error is not None:
        log_error("Run failed", error=error)

    if report is not None:
        summary = get_reporter("json")
        assert summary is not None
        written = summary.write_report(report, config.out)
        assert written is not None
        state.artifacts.append(written.name)

    manifest = RunManifest(
        command=config.command,
        seed=config.seed,
        workers=config.workers,
        config=config.model_dump(mode="json", exclude={"out", "workers"}),
        overrides=config.overrides(),
        applied_defaults=state.defaults,
        artifacts=list(state.artifacts),
        exit_code=exit_code,
        error=error,
    )
    write_json(manifest, config.out / "manifest.json")
    log_stage("done", exit_code=exit_code, artifacts=len(state.artifacts))
    return RunResult(exit_code=exit_code, report=report, error=error, out_dir=config.out)
