# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# # Synthetic corpora
#
# The six benchmark shapes (nodes, edges, topics, seeds per topic) are
# available as `uape.DATASET_SHAPES`.  The generator draws distinct directed
# edges without self-loops and gives every seed a random known attitude.

# + tags=["parameters"]
rng_seed = 0
# -

import numpy as np
from uape import DATASET_SHAPES, generate_synthetic

for name, (n, m, z, s) in DATASET_SHAPES.items():
    graph, attitudes, seeds = generate_synthetic(n, m, z, s, rng_seed)
    known = (attitudes.values != -1).sum(axis=0)
    print(f"{name:>3}: n={graph.node_count} m={graph.edge_count} z={attitudes.topic_count} "
          f"seeds/topic={known.tolist()}")

# Degree profile of the largest shape.  Uniform edge sampling gives a
# binomial in-degree, so there are no hubs.

graph, attitudes, seeds = generate_synthetic(*DATASET_SHAPES["VI"], rng_seed)
print("mean in-degree", graph.in_degree.mean())
print("max in-degree", graph.in_degree.max())
print("isolated from inflow", int((graph.in_degree == 0).sum()))

# Seed attitudes are split roughly evenly over the three known values.

values, counts = np.unique(attitudes.values[attitudes.values != -1], return_counts=True)
dict(zip(values.tolist(), counts.tolist()))
