"""
Where the column degrees come from
==================================

Compare the truncated finite distribution with the robust soliton and look
at what a generated graph actually contains.
"""
from collections import Counter

import numpy as np

from xorfountain import DEFAULT_SEED, build_generator, make_distribution

k = 1036
finite = make_distribution("FiniteDist", k)
rsd = make_distribution("RSD", k)

print("FiniteDist mean degree", round(finite.mean, 3))
for d, p in zip(finite.degrees, finite.probs):
    print(f"  d={d:4d}  p={p:.5f}")
print("RSD mean degree", round(rsd.mean, 3), "support size", len(rsd.degrees))

gen = build_generator(k, 2180, 10, DEFAULT_SEED, finite)
counts = Counter(gen.degrees.tolist())
print("observed mean", round(gen.num_edges / gen.n, 3))
print("most common degrees", counts.most_common(5))

# averaging over seeds pulls the sample mean onto the expectation.  Seeds are
# spaced out because disk i of seed s uses stream s + i.
means = [build_generator(k, 2180, 10, 7919 * s, finite).num_edges / 2180 for s in range(20)]
print("mean over 20 seeds", round(float(np.mean(means)), 3))
