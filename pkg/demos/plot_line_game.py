"""
The line-probing game
=====================

A classical player makes ``k`` queries.  Each pair of queries probes the line
through the origin spanned by their difference, and a bell rings if the hidden
shift lies on a probed line.  At most ``C(k, 2)`` lines get probed, so success
stays near ``(C(k, 2) + 1) / #lines`` until ``k`` is about the square root of
the number of lines.
"""

# %%
from hiddenshift import ExperimentConfig, enumerate_1dim_subspaces, run_experiment

print("lines in Z_2^6:", len(enumerate_1dim_subspaces(2, 6)))

# %%
for k in (0, 4, 16, 32):
    report = run_experiment(ExperimentConfig(experiment="classical-game", n=6, k=k,
                                             trials=5_000, seed=k))
    agg = report.aggregate
    print(f"k={k:2d}  success {agg['success_rate']:.4f}  predicted {agg['predicted_rate']:.4f}")
