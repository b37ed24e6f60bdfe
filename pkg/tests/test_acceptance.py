"""Acceptance criteria, one test each; run with ``-s`` to see the verdict lines."""

import io
import math
import shutil
import time

import pytest

from hdlslice.benchmarks import config_path
from hdlslice.campaign import analyse, load_config
from hdlslice.campaign.cli import main
from hdlslice.campaign.generator import generate_random_design
from hdlslice.depgraph import build_pdg, static_slice
from hdlslice.faultsim import run_campaign
from hdlslice.frontend import load_design
from hdlslice.sim import read_stimulus, simulate_golden
from hdlslice.slicer import PruneMode, Semantics, dynamic_slice, fault_universe, generate_fault_list
from oracles import ref_static_slice

CORPUS = [(seed, memory) for seed in range(100) for memory in (False, True)]
NOISE = 0.10
TIMING_REPEATS = 5
CHUNK_SECONDS = 0.1


@pytest.fixture
def verdict(capsys):
    def report(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}{': ' + detail if detail else ''}")
        assert ok, detail

    return report


def _corpus_case(seed, memory):
    g = generate_random_design(seed, memory=memory)
    d = load_design(g.text)
    stim = read_stimulus(d, io.StringIO(g.stimulus_csv))
    static = static_slice(build_pdg(d), d, g.observation)
    golden, cov = simulate_golden(d, stim, g.observation)
    return g, d, stim, static, dynamic_slice(static, cov), cov, golden


def _pruned_vs_exhaustive():
    """Yield (label, violations, detected-set equality) per design and mode."""
    for seed, memory in CORPUS:
        g, d, stim, static, dyn, cov, golden = _corpus_case(seed, memory)
        if not d.storage:
            continue
        for mode, sem in ((PruneMode.DYNAMIC, Semantics.TRANSIENT), (PruneMode.DYNAMIC_LIVE, Semantics.PERSISTENT)):
            full = fault_universe(d, stim.n_cycles, "all", sem)
            pruned = generate_fault_list(d, static, dyn, cov, stim.n_cycles, mode, semantics=sem)
            full_res = run_campaign(d, stim, g.observation, full, golden)
            pruned_res = run_campaign(d, stim, g.observation, pruned, golden)
            kept = set(pruned.faults)
            violations = [f for f in full_res.detected_set() if f not in kept]
            yield (seed, memory, mode.value), violations, pruned_res.detected_set() == full_res.detected_set()


@pytest.fixture(scope="module")
def corpus_results():
    start = time.perf_counter()
    results = list(_pruned_vs_exhaustive())
    return results, time.perf_counter() - start


def test_criterion_1_pruning_soundness(corpus_results, verdict):
    results, elapsed = corpus_results
    designs = len({r[0][:2] for r in results})
    bad = [(label, len(v)) for label, v, _ in results if v]
    ok = not bad and designs >= 200 and elapsed < 120
    verdict(
        "1 pruning soundness",
        ok,
        f"{designs} designs, {len(results)} campaigns, {sum(n for _, n in bad)} violations, {elapsed:.1f}s",
    )


def test_criterion_2_detection_set_completeness(corpus_results, verdict):
    results, _ = corpus_results
    mismatched = [label for label, _, same in results if not same]
    verdict("2 detection-set completeness", not mismatched, f"{len(results)} campaigns, {len(mismatched)} mismatches")


def test_criterion_3_slice_oracle(verdict):
    slice_mismatch = subset_breaks = 0
    for seed in range(100):
        g, d, stim, static, dyn, cov, _ = _corpus_case(seed, seed % 2 == 1)
        if static.statements != ref_static_slice(d, g.observation):
            slice_mismatch += 1
        for c in range(stim.n_cycles):
            s = dyn.slice_at(c)
            if not (s <= static.statements and s <= cov.executed_at(c)):
                subset_breaks += 1
    verdict(
        "3 slice oracle equivalence",
        slice_mismatch == 0 and subset_breaks == 0,
        f"100 designs, {slice_mismatch} static mismatches, {subset_breaks} dynamic containment breaks",
    )


def _counts(name):
    cfg = load_config(config_path(name))
    an = analyse(cfg)
    return {m: an.fault_list(cfg, m) for m in PruneMode}


def test_criterion_4_pruning_magnitude(verdict):
    chop = _counts("chopper_like")
    spi = _counts("spi_like")
    chop_ratio = len(chop[PruneMode.DYNAMIC]) / len(chop[PruneMode.STATIC])
    spi_ratio = len(spi[PruneMode.DYNAMIC]) / spi[PruneMode.EXHAUSTIVE].universe_size
    verdict(
        "4 pruning magnitude",
        chop_ratio <= 0.70 and spi_ratio <= 0.05,
        f"chopper_like dynamic/static {len(chop[PruneMode.DYNAMIC])}/{len(chop[PruneMode.STATIC])} = {chop_ratio:.3f}"
        f" (<= 0.70); spi_like dynamic/universe {len(spi[PruneMode.DYNAMIC])}/"
        f"{spi[PruneMode.EXHAUSTIVE].universe_size} = {spi_ratio:.4f} (<= 0.05)",
    )


def _best_wall_times(name):
    """Wall time per mode at workers=1, robust to a noisy shared CPU.

    Each list is cut into the same number of chunks and the modes take turns
    chunk by chunk, so a burst of contention lands on all of them alike. A
    mode's time is the sum over chunks of the best of several repeats.
    """
    cfg = load_config(config_path(name))
    an = analyse(cfg)
    lists = {m: an.fault_list(cfg, m).faults for m in (PruneMode.EXHAUSTIVE, PruneMode.STATIC, PruneMode.DYNAMIC)}
    start = time.perf_counter()
    an.inject(list(lists[PruneMode.EXHAUSTIVE]), 1)
    total = time.perf_counter() - start
    n_chunks = max(1, math.ceil(total / CHUNK_SECONDS))
    # short campaigns get extra repeats instead
    repeats = TIMING_REPEATS * max(1, math.ceil(CHUNK_SECONDS / total))
    chunks = {m: [list(f[i::n_chunks]) for i in range(n_chunks)] for m, f in lists.items()}
    best = {m: [math.inf] * n_chunks for m in lists}
    for _ in range(repeats):
        for i in range(n_chunks):
            for mode in lists:
                start = time.perf_counter()
                an.inject(chunks[mode][i], 1)
                best[mode][i] = min(best[mode][i], time.perf_counter() - start)
    return {m: sum(v) for m, v in best.items()}


def test_criterion_5_speed_up_direction(verdict):
    details, ok = [], True
    for name in ("chopper_like", "spi_like"):
        t = _best_wall_times(name)
        ex, st, dy = t[PruneMode.EXHAUSTIVE], t[PruneMode.STATIC], t[PruneMode.DYNAMIC]
        ordered = ex >= st * (1 - NOISE) and st >= dy * (1 - NOISE)
        ok &= ordered
        details.append(f"{name} exhaustive {ex:.4f}s static {st:.4f}s dynamic {dy:.4f}s")
        if name == "spi_like":
            speedup = st / dy
            ok &= speedup >= 2.0
            details.append(f"spi_like static/dynamic speed-up {speedup:.1f}x (>= 2x)")
    verdict("5 speed-up direction", ok, "; ".join(details))


TIMING_LABELS = ("Total CPU time of overall regression |", "Wall time |")


def _strip_timing(data: bytes) -> bytes:
    lines = data.decode().splitlines(keepends=True)
    keep = [ln for ln in lines if not ln.startswith(TIMING_LABELS)]
    keep = [ln for ln in keep if '"wall_seconds"' not in ln and '"cpu_seconds"' not in ln]
    return "".join(keep).encode()


def _invoke(argv, capsys, out_dir):
    shutil.rmtree(out_dir, ignore_errors=True)
    code = main([*argv, "--out", str(out_dir)])
    out, err = capsys.readouterr()
    files = {p.name: _strip_timing(p.read_bytes()) for p in sorted(out_dir.rglob("*")) if p.is_file()}
    return code, _strip_timing(out.encode()), err, files


def test_criterion_6_cli_determinism(tmp_path, capsys, verdict):
    cfg = str(config_path("chopper_like"))
    commands = {
        "parse": ["parse", "--config", cfg],
        "slice": ["slice", "--config", cfg],
        "golden": ["golden", "--config", cfg],
        "faults": ["faults", "--config", cfg],
        "run": ["run", "--config", cfg, "--workers", "2"],
        "oracle": ["oracle", "--config", cfg],
        "gen": ["gen", "--seed", "5", "--memory"],
    }
    differing = []
    for name, argv in commands.items():
        first = _invoke(argv, capsys, tmp_path / name)
        second = _invoke(argv, capsys, tmp_path / name)
        if first != second or first[0] not in (0, 1):
            differing.append(name)
    verdict(
        "6 CLI determinism",
        not differing,
        f"{len(commands)} subcommands run twice into the same output directory, "
        f"differing: {', '.join(differing) or 'none'}",
    )


def test_criterion_7_parallel_invariance(verdict):
    differing = []
    for name in ("chopper_like", "spi_like"):
        cfg = load_config(config_path(name))
        an = analyse(cfg)
        faults = an.fault_list(cfg, PruneMode.STATIC)
        one, four = an.inject(faults, 1), an.inject(faults, 4)
        if one.outcomes != four.outcomes or (one.detected, one.undetected) != (four.detected, four.undetected):
            differing.append(name)
    for seed in range(20):
        g, d, stim, *_ , golden = _corpus_case(seed, True)
        if not d.storage:
            continue
        faults = fault_universe(d, stim.n_cycles)
        one = run_campaign(d, stim, g.observation, faults, golden, workers=1)
        four = run_campaign(d, stim, g.observation, faults, golden, workers=4)
        if one.outcomes != four.outcomes:
            differing.append(f"seed {seed}")
    verdict("7 parallel invariance", not differing, f"differing: {', '.join(differing) or 'none'}")
