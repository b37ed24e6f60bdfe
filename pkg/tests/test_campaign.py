import json
from pathlib import Path

import pytest

from hdlslice.benchmarks import config_path
from hdlslice.campaign import (
    CampaignConfig,
    CampaignReport,
    GeneratorParams,
    analyse,
    compare_with_oracle,
    emit_report,
    generate_random_design,
    load_config,
    parse_config,
    parse_report,
    run_pipeline,
)
from hdlslice.errors import ConfigError, NoMatchingTargets, ReportInvariantError
from hdlslice.slicer import FaultList, PruneMode, Semantics

DATA = Path(__file__).parent / "data"


# -- config -----------------------------------------------------------------------


def test_config_parsing(tmp_path):
    cfg = parse_config(
        """# comment
        design = d.mrtl
        stimulus = s.csv
        observation = a, b
        target = mem[][], r*
        mode = DynamicLivePrune
        workers = 3
        refine_memory = false
        max_regs = 2
        """,
        tmp_path,
    )
    assert cfg.design == tmp_path / "d.mrtl"
    assert cfg.observation == ("a", "b")
    assert cfg.target == "mem[][], r*"
    assert cfg.mode is PruneMode.DYNAMIC_LIVE
    assert cfg.effective_semantics is Semantics.PERSISTENT
    assert cfg.workers == 3
    assert cfg.refine_memory is False
    assert cfg.generator.max_regs == 2


@pytest.mark.parametrize(
    "text",
    ["bogus = 1", "mode = Fastest", "workers = 0", "workers = many", "no equals sign", "memory = maybe", "max_regs = 99"],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_files_are_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")
    cfg = parse_config("design = nope.mrtl\nstimulus = nope.csv\nobservation = o", tmp_path)
    with pytest.raises(ConfigError):
        analyse(cfg)


def test_overrides(toy_files):
    cfg = load_config(toy_files).replace(mode="Exhaustive", workers=2, semantics=None)
    assert cfg.mode is PruneMode.EXHAUSTIVE and cfg.workers == 2
    with pytest.raises(ConfigError):
        cfg.replace(mode="nope")


# -- pipeline ----------------------------------------------------------------------


def test_toy_pipeline(toy_files, tmp_path):
    cfg = load_config(toy_files).replace(out=tmp_path / "out")
    report = run_pipeline(cfg)
    assert (report.injected, report.universe_size) == (8, 12)
    assert report.prune_ratio == pytest.approx(0.667, abs=1e-3)
    assert report.detected + report.undetected == 8
    text = (tmp_path / "out" / "report.txt").read_text()
    assert "Total number of injected faults | 8\n" in text
    assert "Prune ratio | 0.667\n" in text
    assert (tmp_path / "out" / "results.csv").read_text().startswith("signal,row,bit,cycle,outcome")
    assert (tmp_path / "out" / "faults.csv").exists()
    reparsed = parse_report((tmp_path / "out" / "report.json").read_bytes())
    assert reparsed.without_timing() == report.without_timing()


def test_toy_exhaustive_pipeline(toy_files):
    report = run_pipeline(load_config(toy_files).replace(mode="Exhaustive"))
    assert report.injected == 12
    assert report.prune_ratio == 1.0


def test_oracle_on_toy(toy_files):
    cfg = load_config(toy_files)
    cmp = compare_with_oracle(cfg)
    assert cmp.verdict
    assert cmp.violations == () and cmp.missing == ()


def test_oracle_catches_corrupted_list(toy_files):
    cfg = load_config(toy_files)
    an = analyse(cfg)
    good = an.fault_list(cfg)
    result = an.inject(good, 1)
    dropped = next(f for f, o in zip(result.faults, result.outcomes) if o.detected)
    bad = FaultList(good.mode, good.semantics, tuple(f for f in good.faults if f != dropped), good.universe_size)
    cmp = compare_with_oracle(cfg, fault_list=bad, analysis=an)
    assert not cmp.verdict
    assert cmp.missing == (dropped,)
    assert cmp.violations == (dropped,)
    assert "missing: r" in cmp.text(an.design)


def test_observing_every_register_prunes_nothing_detected(tmp_path):
    g = generate_random_design(3, max_regs=4)
    names = [line.split()[-1].rstrip(";") for line in g.text.splitlines() if line.strip().startswith("reg ")]
    (tmp_path / "d.mrtl").write_text(g.text)
    (tmp_path / "s.csv").write_text(g.stimulus_csv)
    cfg = parse_config(f"design = d.mrtl\nstimulus = s.csv\nobservation = {', '.join(names)}\n", tmp_path)
    for mode in ("DynamicPrune", "DynamicLivePrune", "StaticPrune"):
        assert compare_with_oracle(cfg.replace(mode=mode)).verdict


def test_no_register_design_has_no_targets(tmp_path):
    g = generate_random_design(0, max_regs=0)
    (tmp_path / "d.mrtl").write_text(g.text)
    (tmp_path / "s.csv").write_text(g.stimulus_csv)
    cfg = parse_config(f"design = d.mrtl\nstimulus = s.csv\nobservation = {g.observation[0]}\n", tmp_path)
    with pytest.raises(NoMatchingTargets):
        run_pipeline(cfg)


@pytest.mark.parametrize("name", ["chopper_like", "spi_like"])
def test_benchmarks_pass_oracle(name):
    cfg = load_config(config_path(name))
    for mode in ("DynamicPrune", "DynamicLivePrune"):
        assert compare_with_oracle(cfg.replace(mode=mode)).verdict


# -- report ----------------------------------------------------------------------------


def _report(**kw):
    base = dict(
        design_name="toy", mode="DynamicPrune", semantics="Transient", observation=("out",),
        target="all", universe_size=12, injected=8, detected=5, undetected=3,
        prune_ratio=8 / 12, wall_seconds=0.5, cpu_seconds=0.25,
    )
    base.update(kw)
    return CampaignReport(**base)


def test_text_report_rows():
    lines = emit_report(_report(), "Text").decode().splitlines()
    assert lines[0] == "Design name | toy"
    assert "Optimization type | DynamicPrune" in lines
    assert "Observation list | out" in lines
    assert "Fault target | all" in lines
    assert "Total number of injected faults | 8" in lines
    assert "Number of detected faults | 5" in lines
    assert "Number of undetected faults | 3" in lines
    assert "Total CPU time of overall regression | 0.250000 s" in lines


def test_structured_report_round_trip():
    r = _report()
    data = emit_report(r, "Structured")
    assert list(json.loads(data)) == sorted(json.loads(data))
    assert parse_report(data) == r


def test_inconsistent_report_refused():
    with pytest.raises(ReportInvariantError):
        emit_report(_report(detected=6))
    with pytest.raises(ReportInvariantError):
        emit_report(_report(prune_ratio=1.5), "Structured")


# -- generator ------------------------------------------------------------------------


def test_generator_fixture_is_pinned():
    g = generate_random_design(0, max_regs=4)
    assert g.text == (DATA / "gen_seed0.mrtl").read_text()
    assert g.stimulus_csv == (DATA / "gen_seed0.csv").read_text()


def test_generator_is_deterministic():
    a = generate_random_design(42, memory=True)
    b = generate_random_design(42, GeneratorParams(memory=True))
    assert (a.text, a.stimulus_csv, a.observation) == (b.text, b.stimulus_csv, b.observation)
    assert generate_random_design(43, memory=True).text != a.text


@pytest.mark.parametrize("bad", [dict(max_regs=-1), dict(max_stmts=0), dict(max_bits=65), dict(max_cycles=0)])
def test_generator_param_bounds(bad):
    with pytest.raises(ValueError):
        GeneratorParams(**bad)


def test_default_config_is_dynamic_prune():
    assert CampaignConfig().mode is PruneMode.DYNAMIC
