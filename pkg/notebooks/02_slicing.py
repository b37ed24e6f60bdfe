# %% [markdown]
# # Static slices
#
# The dependence graph links each definition to its uses and each `if` or
# `case` header to the statements it guards. The static slice of an
# observed signal is everything that reaches it backwards.

# %%
from hdlslice.benchmarks import config_path
from hdlslice.campaign import load_config
from hdlslice.campaign.pipeline import load_design_file
from hdlslice.depgraph import build_pdg, static_slice

cfg = load_config(config_path("chopper_like"))
design = load_design_file(cfg.design)
pdg = build_pdg(design)
print(len(pdg.nodes), "statements,", len(pdg.edges), "edges")

# %%
sl = static_slice(pdg, design, cfg.observation)
lines = design.source.splitlines()
for sid in sorted(sl.statements):
    stmt = design.statements[sid]
    print(f"{sid:3}: {lines[stmt.loc.line - 1].strip()}")
print("registers in slice:", sorted(design.signals[s].name for s in sl.registers))

# %% [markdown]
# The free-running counter `cnt` never reaches `tar_f`. Its statement is
# missing from the slice, so StaticPrune would drop all of its faults if the
# target list included it.
