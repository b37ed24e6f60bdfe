# %% [markdown]
# # Golden run and coverage
#
# The simulator advances one clock edge per stimulus row. It records the
# observed outputs and the set of statements executed in each cycle.

# %%
from hdlslice.benchmarks import config_path
from hdlslice.campaign import analyse, load_config

an = analyse(load_config(config_path("chopper_like")))
print(an.golden.values[:12, 0].tolist())

# %%
for cycle in range(6):
    print(cycle, sorted(an.coverage.executed_at(cycle)))

# %% [markdown]
# The dynamic slice in a cycle is the static slice restricted to the
# statements that actually ran.

# %%
for cycle in range(6):
    print(cycle, sorted(an.dynamic.slice_at(cycle)))
