"""Campaign orchestration: config, pipeline, oracle, reports, CLI and generator."""

from .config import CampaignConfig, load_config, parse_config
from .generator import GeneratedDesign, GeneratorParams, generate_random_design
from .pipeline import Analysis, OracleComparison, analyse, compare_with_oracle, run_pipeline
from .report import CampaignReport, ReportFormat, emit_report, parse_report

__all__ = [
    "Analysis",
    "CampaignConfig",
    "CampaignReport",
    "GeneratedDesign",
    "GeneratorParams",
    "OracleComparison",
    "ReportFormat",
    "analyse",
    "compare_with_oracle",
    "emit_report",
    "generate_random_design",
    "load_config",
    "parse_config",
    "parse_report",
    "run_pipeline",
]
