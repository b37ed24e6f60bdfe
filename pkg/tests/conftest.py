import io
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hdlslice.frontend import load_design  # noqa: E402
from hdlslice.sim import read_stimulus  # noqa: E402

TOY = """\
module toy(clk, rst, in_a, out);
  input clk;
  input rst;
  input in_a;
  output out;
  reg r1;
  reg r2;
  reg dead;
  always @(posedge clk)
    if (rst)
      r1 <= 0;
    else
      r1 <= in_a;
  always @(posedge clk)
    r2 <= r1 ^ r2;
  always @(posedge clk)
    dead <= in_a;
  assign out = r2;
endmodule
"""

# reset at cycle 0 only, in_a = 1 afterwards
TOY_STIMULUS = "rst,in_a\n1,0\n0,1\n0,1\n0,1\n"

# statement ids in source order
S1, S2, S3, S4, S5, S6 = range(6)


@pytest.fixture
def toy():
    return load_design(TOY)


@pytest.fixture
def toy_stimulus(toy):
    return read_stimulus(toy, io.StringIO(TOY_STIMULUS))


@pytest.fixture
def toy_files(tmp_path):
    (tmp_path / "toy.mrtl").write_text(TOY)
    (tmp_path / "toy.csv").write_text(TOY_STIMULUS)
    cfg = tmp_path / "toy.cfg"
    cfg.write_text("design = toy.mrtl\nstimulus = toy.csv\nobservation = out\nmode = DynamicPrune\n")
    return cfg
