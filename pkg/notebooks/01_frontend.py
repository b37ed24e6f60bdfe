# %% [markdown]
# # Parsing a MiniRTL design
#
# A design is parsed and elaborated into an IR with dense signal and
# statement ids. Each statement carries the signals it defines and uses.

# %%
from hdlslice.errors import HdlSliceError
from hdlslice.frontend import load_design, pretty

SOURCE = """\
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

design = load_design(SOURCE)
for sig in design.signals:
    print(sig.id, sig.name, sig.kind.value, sig.width)

# %% [markdown]
# Statement ids follow source order. The def/use table drives slicing.

# %%
for stmt in design.statements:
    du = design.defuse[stmt.id]
    names = lambda ids: sorted(design.signals[i].name for i in ids)
    print(stmt.id, type(stmt).__name__, "def", names(du.defs), "use", names(du.uses))

# %% [markdown]
# The pretty-printer gives back equivalent source, and errors carry a
# line and column.

# %%
print(pretty(design))
try:
    load_design(SOURCE.replace("reg r2;", "reg r2;\n  reg r2;"))
except HdlSliceError as exc:
    print(exc.format("toy.mrtl"))
