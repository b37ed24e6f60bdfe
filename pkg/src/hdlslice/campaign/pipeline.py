"""End-to-end driver: parse, slice, simulate, prune, inject, report."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..depgraph import Pdg, StaticSlice, build_pdg, static_slice
from ..errors import ConfigError, HdlSliceError
from ..faultsim import CampaignResult, run_campaign, write_results
from ..frontend import ElaboratedDesign, load_design
from ..sim import CoverageTrace, GoldenTrace, Stimulus, load_stimulus, simulate_golden
from ..slicer import (
    DynamicSliceSeries,
    FaultDescriptor,
    FaultList,
    PruneMode,
    dynamic_slice,
    generate_fault_list,
    write_fault_list,
)
from .config import CampaignConfig
from .report import CampaignReport, emit_report


def load_design_file(path: Path | str) -> ElaboratedDesign:
    """Parse and elaborate a design file; errors carry the file name."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read design: {exc.strerror or exc}") from None
    try:
        return load_design(text)
    except HdlSliceError as exc:
        exc.filename = str(path)
        raise


@dataclass(frozen=True)
class Analysis:
    """Everything computed before fault injection starts."""

    design: ElaboratedDesign
    stimulus: Stimulus
    observation: tuple[str, ...]
    pdg: Pdg
    static: StaticSlice
    golden: GoldenTrace
    coverage: CoverageTrace
    dynamic: DynamicSliceSeries

    def fault_list(self, config: CampaignConfig, mode: PruneMode | None = None) -> FaultList:
        return generate_fault_list(
            self.design,
            self.static,
            self.dynamic,
            self.coverage,
            self.stimulus.n_cycles,
            mode or config.mode,
            config.target,
            config.effective_semantics,
            config.refine_memory,
        )

    def inject(self, faults: FaultList | list[FaultDescriptor], workers: int) -> CampaignResult:
        return run_campaign(
            self.design, self.stimulus, self.observation, faults, self.golden, workers=workers
        )


def analyse(config: CampaignConfig) -> Analysis:
    config.require("design", "stimulus", "observation")
    design = load_design_file(config.design)
    stimulus = load_stimulus(design, config.stimulus)
    pdg = build_pdg(design)
    static = static_slice(pdg, design, config.observation)
    golden, coverage = simulate_golden(design, stimulus, config.observation)
    return Analysis(
        design,
        stimulus,
        tuple(config.observation),
        pdg,
        static,
        golden,
        coverage,
        dynamic_slice(static, coverage),
    )


def run_pipeline(config: CampaignConfig, analysis: Analysis | None = None) -> CampaignReport:
    """Run one pruned campaign and, if ``config.out`` is set, write its artefacts.

    Files written to the output directory: ``faults.csv``, ``results.csv``,
    ``report.txt`` and ``report.json``.
    """
    analysis = analysis or analyse(config)
    faults = analysis.fault_list(config)
    result = analysis.inject(faults, config.workers)
    results_path = None
    if config.out is not None:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "faults.csv", "w", newline="") as f:
            write_fault_list(analysis.design, faults, f)
        results_path = out / "results.csv"
        with open(results_path, "w", newline="") as f:
            write_results(analysis.design, result, f)
    report = make_report(config, analysis, faults, result, results_path)
    if config.out is not None:
        out = Path(config.out)
        (out / "report.txt").write_bytes(emit_report(report, "Text"))
        (out / "report.json").write_bytes(emit_report(report, "Structured"))
    return report


def make_report(
    config: CampaignConfig,
    analysis: Analysis,
    faults: FaultList,
    result: CampaignResult,
    results_path: Path | None = None,
) -> CampaignReport:
    universe = faults.universe_size
    return CampaignReport(
        design_name=analysis.design.name,
        mode=faults.mode.value,
        semantics=faults.semantics.value,
        observation=tuple(analysis.observation),
        target=config.target,
        universe_size=universe,
        injected=result.injected,
        detected=result.detected,
        undetected=result.undetected,
        prune_ratio=result.injected / universe if universe else 0.0,
        wall_seconds=result.wall_seconds,
        cpu_seconds=result.cpu_seconds,
        results_path=str(results_path) if results_path is not None else None,
    )


# -- exhaustive oracle ---------------------------------------------------------


@dataclass(frozen=True)
class OracleComparison:
    """Pruned campaign checked against the exhaustive campaign on the same target.

    ``violations`` are faults the pruned list dropped although the exhaustive
    run detects them. ``missing``/``extra`` compare the two detected sets.
    """

    mode: str
    semantics: str
    universe_size: int
    pruned_injected: int
    exhaustive_detected: int
    pruned_detected: int
    violations: tuple[FaultDescriptor, ...]
    missing: tuple[FaultDescriptor, ...]
    extra: tuple[FaultDescriptor, ...]

    @property
    def verdict(self) -> bool:
        return not self.violations and not self.missing and not self.extra

    def text(self, design: ElaboratedDesign) -> str:
        def name(f: FaultDescriptor) -> str:
            sig = design.signals[f.signal]
            where = f"[{f.row}]" if sig.depth else ""
            return f"{sig.name}{where} bit {f.bit} cycle {f.cycle}"

        lines = [
            f"Optimization type | {self.mode}",
            f"Semantics | {self.semantics}",
            f"Fault universe size | {self.universe_size}",
            f"Pruned faults injected | {self.pruned_injected}",
            f"Exhaustive detected | {self.exhaustive_detected}",
            f"Pruned detected | {self.pruned_detected}",
            f"Soundness violations | {len(self.violations)}",
            f"Missing detections | {len(self.missing)}",
            f"Extra detections | {len(self.extra)}",
            f"Verdict | {'PASS' if self.verdict else 'FAIL'}",
        ]
        lines += [f"violation: {name(f)}" for f in self.violations]
        lines += [f"missing: {name(f)}" for f in self.missing]
        lines += [f"extra: {name(f)}" for f in self.extra]
        return "\n".join(lines) + "\n"


def compare_with_oracle(
    config: CampaignConfig,
    fault_list: FaultList | None = None,
    analysis: Analysis | None = None,
) -> OracleComparison:
    """Run the pruned and the exhaustive campaign and diff their outcomes.

    ``fault_list`` overrides the pruned list computed from ``config.mode``
    (useful to check a hand-edited or corrupted list).
    """
    analysis = analysis or analyse(config)
    pruned = fault_list if fault_list is not None else analysis.fault_list(config)
    full = analysis.fault_list(config, PruneMode.EXHAUSTIVE)
    if pruned.semantics is not full.semantics:
        full = FaultList(
            full.mode,
            pruned.semantics,
            tuple(f._replace(semantics=pruned.semantics) for f in full.faults),
            full.universe_size,
            full.targets,
        )
    exhaustive = analysis.inject(full, config.workers)
    pruned_result = analysis.inject(pruned, config.workers)

    kept = set(pruned.faults)
    full_detected = exhaustive.detected_set()
    pruned_detected = pruned_result.detected_set()
    return OracleComparison(
        mode=pruned.mode.value,
        semantics=pruned.semantics.value,
        universe_size=full.universe_size,
        pruned_injected=pruned_result.injected,
        exhaustive_detected=len(full_detected),
        pruned_detected=len(pruned_detected),
        violations=tuple(sorted(f for f in full_detected if f not in kept)),
        missing=tuple(sorted(full_detected - pruned_detected)),
        extra=tuple(sorted(pruned_detected - full_detected)),
    )

