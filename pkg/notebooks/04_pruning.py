# %% [markdown]
# # Fault lists
#
# A fault flips one stored bit at one cycle. Pruning drops flips that
# cannot change the observed outputs.

# %%
from hdlslice.benchmarks import config_path
from hdlslice.campaign import analyse, load_config
from hdlslice.slicer import PruneMode

for name in ("chopper_like", "spi_like"):
    cfg = load_config(config_path(name))
    an = analyse(cfg)
    counts = {m.value: len(an.fault_list(cfg, m)) for m in PruneMode}
    print(name, counts)

# %% [markdown]
# On the FIFO benchmark only the memory rows read by the output path in a
# given cycle keep their faults, which removes nearly all of the universe.
# `DynamicLivePrune` targets flips that persist until overwritten, so it
# keeps every cycle between a flip and the next read.

# %%
cfg = load_config(config_path("spi_like"))
an = analyse(cfg)
fl = an.fault_list(cfg, PruneMode.DYNAMIC)
print(f"prune ratio {fl.prune_ratio:.4f}")
print(fl.faults[:5])
