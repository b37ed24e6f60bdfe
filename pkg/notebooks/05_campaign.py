# %% [markdown]
# # Injection campaigns
#
# The pipeline injects every listed fault, compares the observed outputs
# with the golden run, and checks pruning against the exhaustive run.

# %%
from hdlslice.benchmarks import config_path
from hdlslice.campaign import analyse, compare_with_oracle, emit_report, load_config, run_pipeline

cfg = load_config(config_path("spi_like"))
for mode in ("StaticPrune", "DynamicPrune"):
    report = run_pipeline(cfg.replace(mode=mode))
    print(emit_report(report).decode())

# %% [markdown]
# The oracle reruns the exhaustive campaign. A pruned fault that the
# exhaustive run detects would be reported as a violation.

# %%
chopper = load_config(config_path("chopper_like"))
an = analyse(chopper)
print(compare_with_oracle(chopper, analysis=an).text(an.design))
