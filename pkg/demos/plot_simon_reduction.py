"""
Recovering a planted shift through Simon's algorithm
====================================================

``g`` is random and non-periodic, ``f(x) = g(s + x)``.  After injectivization
the pair becomes a Simon oracle on one extra bit whose period is ``1||s``.
"""

# %%
import numpy as np

from hiddenshift import (
    GroupSpec,
    build_fV,
    build_simon_oracle,
    end_to_end_hidden_shift,
    make_random_nonperiodic,
    make_shifted,
    make_tuple,
)
from hiddenshift.simon import SampleMatrix, SimonSampler

spec = GroupSpec(2, 6)
g = make_random_nonperiodic(spec, 2, seed=1)
f = make_shifted(g, 37)
print("planted shift:", spec.element_at(37))

# %%
# Samples from the simulated measurement are always orthogonal to ``1||s``.
V = make_tuple(spec, range(18))
h = build_simon_oracle(build_fV(f, V), build_fV(g, V))
sampler = SimonSampler(h)
matrix = SampleMatrix(h.width)
rng = np.random.default_rng(2)
while matrix.rank < h.width - 1:
    matrix.add(sampler.draw(rng))
print("samples used:", len(matrix.samples), " nullspace:", [bin(p) for p in matrix.nullspace()])

# %%
# The full pipeline picks V itself, retries on failure and verifies its answer.
result = end_to_end_hidden_shift(f, g, m=18, seed=3)
print(result.success, result.shift, "queries:", result.queries)
