"""
Bent functions have every influence equal to one half
=====================================================

Maiorana-McFarland functions ``f(x, y) = <x, pi(y)> + aux(y)`` are bent.
Their flat Walsh spectrum forces ``gamma_v = 1/2`` for all ``v != 0``, which
is the best case for the influence bound.
"""

# %%
import numpy as np

from hiddenshift import (
    influence_failure_bounds,
    influence_profile,
    random_mm_bent,
    walsh_spectrum,
)

f = random_mm_bent(2, seed=4)
print("spectrum magnitudes:", sorted(set(np.abs(walsh_spectrum(f).coefficients).tolist())))
print("influences:", sorted(set(influence_profile(f).gammas()[1:])))

# %%
profile = influence_profile(f)
for m in (6, 9, 12, 15):
    total, worst = influence_failure_bounds(profile, m)
    print(f"m={m:2d}  sum bound {float(total):.4g}  gamma_min bound {float(worst):.4g}")
