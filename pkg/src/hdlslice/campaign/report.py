"""Campaign summary in a pipe-separated text table or sorted-key JSON."""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass

from ..errors import ReportInvariantError

TIMING_FIELDS = ("wall_seconds", "cpu_seconds")


class ReportFormat(str, enum.Enum):
    TEXT = "Text"
    STRUCTURED = "Structured"


@dataclass(frozen=True)
class CampaignReport:
    design_name: str
    mode: str
    semantics: str
    observation: tuple[str, ...]
    target: str
    universe_size: int
    injected: int
    detected: int
    undetected: int
    prune_ratio: float
    wall_seconds: float
    cpu_seconds: float
    results_path: str | None = None

    def check(self) -> None:
        if self.injected != self.detected + self.undetected:
            raise ReportInvariantError(
                f"injected ({self.injected}) != detected ({self.detected})"
                f" + undetected ({self.undetected})"
            )
        if not 0.0 <= self.prune_ratio <= 1.0:
            raise ReportInvariantError(f"prune ratio {self.prune_ratio} outside [0, 1]")
        if self.injected > self.universe_size:
            raise ReportInvariantError("more faults injected than the universe holds")

    def without_timing(self) -> dict:
        data = asdict(self)
        for key in TIMING_FIELDS:
            data.pop(key)
        return data


def _text(report: CampaignReport) -> str:
    rows = [
        ("Design name", report.design_name),
        ("Optimization type", report.mode),
        ("Fault semantics", report.semantics),
        ("Observation list", ", ".join(report.observation)),
        ("Fault target", report.target),
        ("Fault universe size", report.universe_size),
        ("Total number of injected faults", report.injected),
        ("Number of detected faults", report.detected),
        ("Number of undetected faults", report.undetected),
        ("Prune ratio", f"{report.prune_ratio:.3f}"),
        ("Total CPU time of overall regression", f"{report.cpu_seconds:.6f} s"),
        ("Wall time", f"{report.wall_seconds:.6f} s"),
    ]
    if report.results_path is not None:
        rows.append(("Per-fault results", report.results_path))
    return "".join(f"{label} | {value}\n" for label, value in rows)


def emit_report(report: CampaignReport, fmt: ReportFormat | str = ReportFormat.TEXT) -> bytes:
    """Serialise ``report``; refuses reports whose totals do not add up."""
    report.check()
    if ReportFormat(fmt) is ReportFormat.TEXT:
        return _text(report).encode()
    data = asdict(report)
    data["observation"] = list(report.observation)
    return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode()


def parse_report(data: bytes | str) -> CampaignReport:
    """Inverse of the structured format."""
    fields = json.loads(data)
    fields["observation"] = tuple(fields["observation"])
    return CampaignReport(**fields)
