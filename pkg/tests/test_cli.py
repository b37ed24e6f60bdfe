import subprocess
import sys

import pytest

from hdlslice.campaign.cli import main

# `keep` is read only while en is high, so a persistent flip made while en is
# low surfaces later; transient-only pruning misses it.
GAPPED = """\
module gapped(clk, en, d, o);
  input clk;
  input en;
  input [1:0] d;
  output [1:0] o;
  reg [1:0] keep;
  reg [1:0] q;
  always @(posedge clk)
    if (en)
      q <= keep;
  always @(posedge clk)
    if (d == 2'd3)
      keep <= d;
  assign o = q;
endmodule
"""
GAPPED_STIM = "en,d\n1,3\n0,0\n0,0\n0,0\n1,0\n1,0\n"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def gapped(tmp_path):
    (tmp_path / "g.mrtl").write_text(GAPPED)
    (tmp_path / "g.csv").write_text(GAPPED_STIM)
    cfg = tmp_path / "g.cfg"
    cfg.write_text("design = g.mrtl\nstimulus = g.csv\nobservation = o\n")
    return cfg


def test_parse_listing_and_pretty(capsys, toy_files):
    code, out, _ = run(capsys, "parse", toy_files.parent / "toy.mrtl")
    assert code == 0
    assert "stmt 3 nonblocking_assign line 15 parent - def r2 use r1,r2" in out
    code, out, _ = run(capsys, "parse", "--config", toy_files, "--pretty")
    assert code == 0 and out.startswith("module toy(")


def test_slice_output_and_graph(capsys, toy_files, tmp_path):
    graph = tmp_path / "pdg.txt"
    code, out, _ = run(capsys, "slice", "--config", toy_files, "--graph", graph)
    assert code == 0
    assert out.splitlines()[0] == "0: if (rst)"
    assert out.splitlines()[-1] == "registers: r1, r2"
    assert "4:" not in out
    assert graph.read_text().splitlines()[:2] == ["0 control 1", "0 control 2"]


def test_golden_and_faults(capsys, toy_files, tmp_path):
    code, out, _ = run(capsys, "golden", "--config", toy_files, "--out", tmp_path / "o")
    assert code == 0 and out.splitlines() == ["cycle,out", "0,0", "1,0", "2,1", "3,0"]
    assert (tmp_path / "o" / "coverage.txt").read_text() == "0x1: 0 1 3 4 5\n1x3: 0 2 3 4 5\n"
    code, out, _ = run(capsys, "faults", "--config", toy_files, "--mode", "Exhaustive")
    assert code == 0 and len(out.splitlines()) == 13


def test_run_prints_report(capsys, toy_files):
    code, out, _ = run(capsys, "run", "--config", toy_files, "--workers", 2)
    assert code == 0
    assert "Total number of injected faults | 8" in out


def test_oracle_pass_and_fail(capsys, gapped):
    code, out, _ = run(capsys, "oracle", "--config", gapped, "--mode", "DynamicLivePrune")
    assert code == 0 and "Verdict | PASS" in out
    code, out, _ = run(capsys, "oracle", "--config", gapped, "--mode", "DynamicPrune", "--semantics", "Persistent")
    assert code == 1
    assert "Verdict | FAIL" in out
    assert "violation: keep bit" in out


def test_gen_writes_runnable_campaign(capsys, tmp_path):
    code, _, _ = run(capsys, "gen", "--seed", 7, "--memory", "--out", tmp_path / "g")
    assert code == 0
    code, out, _ = run(capsys, "oracle", "--config", tmp_path / "g" / "campaign.cfg")
    assert code == 0


@pytest.mark.parametrize(
    "design, expected",
    [
        ("module m(a);\ninput a\nendmodule\n", 2),
        ("module m(o);\noutput o;\nwire a;\nassign a = a;\nassign o = a;\nendmodule\n", 3),
    ],
)
def test_frontend_exit_codes(capsys, tmp_path, design, expected):
    path = tmp_path / "bad.mrtl"
    path.write_text(design)
    code, _, err = run(capsys, "parse", path)
    assert code == expected
    assert err.startswith(f"{path}:")
    assert ": error: " in err


def test_config_and_runtime_exit_codes(capsys, tmp_path, toy_files):
    code, _, err = run(capsys, "run", "--config", tmp_path / "missing.cfg")
    assert code == 4 and "error:" in err
    bad_obs = tmp_path / "bad.cfg"
    bad_obs.write_text("design = toy.mrtl\nstimulus = toy.csv\nobservation = nope\n")
    assert run(capsys, "run", "--config", bad_obs)[0] == 4

    (tmp_path / "oob.mrtl").write_text(
        "module m(clk, a, o);\ninput clk;\ninput [1:0] a;\noutput o;\nreg o1;\nreg mem [0:2];\n"
        "always @(posedge clk) o1 <= mem[a];\nassign o = o1;\nendmodule\n"
    )
    (tmp_path / "oob.csv").write_text("a\n0\n3\n")
    cfg = tmp_path / "oob.cfg"
    cfg.write_text("design = oob.mrtl\nstimulus = oob.csv\nobservation = o\n")
    code, _, err = run(capsys, "golden", "--config", cfg)
    assert code == 5 and "out of range" in err


def test_module_entry_point(toy_files):
    proc = subprocess.run(
        [sys.executable, "-m", "hdlslice", "faults", "--config", str(toy_files)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "r1,0,0,0,DynamicPrune,Transient"
