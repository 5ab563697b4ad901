"""
Spanning forests and the insertion delta
========================================

A class is represented by the minimum spanning forest of its samples.  A new
sample is scored by how much that forest's weight changes once it joins.
"""

# %%
import math

import numpy as np

from mstnet import build_network, forest_weight, insertion_delta, weighted_distance

# %% [markdown]
# Weighted distance scales each coordinate before taking the Euclidean norm,
# so a weight of 0 removes a feature entirely.

# %%
print(weighted_distance([0, 0], [3, 4], [1, 1]))  # 5.0
print(weighted_distance([0, 0], [3, 4], [1, 0]))  # 3.0

# %% [markdown]
# A 4-cycle with weights 1..4: the forest drops the heaviest edge.

# %%
cycle = [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (3, 0, 4.0)]
print(forest_weight(4, cycle))  # 6.0

# %% [markdown]
# Pruning keeps edges no longer than theta times the median edge.  On the
# triangle with sides 1, 2 and 3 the default theta of 0.8 keeps only the
# shortest side.

# %%
tri = build_network([[0.0], [1.0], [3.0]], theta=0.8)
print(tri.median_weight, [e.weight for e in tri.edges], tri.mst_weight)

# %% [markdown]
# Inserting the centroid of an equilateral triangle *shortens* the tree:
# three spokes of length 1/sqrt(3) replace two unit sides.  The delta is
# negative, sqrt(3) - 2.

# %%
pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
net = build_network(pts, theta=1e9)
delta = insertion_delta(net, pts.mean(axis=0))
print(f"{delta:.12f} vs {math.sqrt(3) - 2:.12f}")

# %% [markdown]
# Points inside the triangle can still shorten it, while far-away points pay
# roughly their distance to the nearest node.

# %%
for x in ([0.5, 0.3], [2.0, 0.0], [5.0, 5.0]):
    print(x, round(insertion_delta(net, x), 4))
