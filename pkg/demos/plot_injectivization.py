"""
Injectivization of a random function
====================================

A random ``f : Z_2^6 -> {0, 1}`` collides everywhere.  Stacking ``m``
shifted copies of it separates the points once ``m`` is large enough.
"""

# %%
import numpy as np

from hiddenshift import (
    GroupSpec,
    build_fV,
    is_injective,
    make_random_function,
    random_function_failure_bound,
    sample_V_distinct,
)

spec = GroupSpec(2, 6)
rng = np.random.default_rng(0)

# %%
# Failure rate as ``m`` grows, 400 fresh functions per point, one fixed V each.
for m in (8, 12, 16, 20, 24, 28):
    V = sample_V_distinct(spec, m, rng)
    failures = sum(not is_injective(build_fV(make_random_function(spec, 2, rng), V))[0]
                   for _ in range(400))
    bound = random_function_failure_bound(spec.order, 2, m)
    print(f"m={m:2d}  empirical {failures / 400:.3f}  bound {float(bound):.4g}")

# %%
# The bound drops below 1 only past ``m = 4 log2 |G| = 24``, while the
# empirical rate is already small by then.
