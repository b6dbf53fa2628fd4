"""
Detecting a cloning attack from excess quadrature noise
=======================================================

An eavesdropper who clones the probe state hands back copies with extra
noise.  The verifier runs a chi-square style variance test on N
homodyne outcomes with threshold Gamma = 2N.
"""

# %%
from qlv.gaussian import CloningChannelParams
from qlv.simulator import ScenarioConfig, ThresholdPolicy, run_clone_sweep

config = ScenarioConfig(
    mode="clone",
    n_values=(1, 2, 5, 10, 20, 50, 100),
    trials=20_000,
    seed=1,
    clone_inputs=CloningChannelParams(1, 5, 1.0),
    threshold_policy=ThresholdPolicy.gamma_equals(2.0),
)
result = run_clone_sweep(config, workers=4)

# %%
print(f"{'N':>4} {'alpha':>9} {'1-beta':>9} {'T_E':>9} {'T_E (MC)':>9}")
for rec in result.records:
    a = rec.analytic
    print(f"{rec.n:>4} {a.alpha:9.5f} {a.false_negative:9.5f} {a.total_error:9.5f} {rec.te_empirical:9.5f}")

# %%
# The total error falls with every extra observation but slowly: about
# 6% at N = 50 and 2% at N = 100.
