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

# # One cascade, round by round
#
# Run the attitude-aware engine on a mid-sized synthetic graph and plot how
# many nodes hold each attitude after every round.

# + tags=["parameters"]
rounds = 15
rng_seed = 3
# -

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from uape import DATASET_SHAPES, SimulationConfig, activation_curve, generate_synthetic, run_uape

graph, attitudes, _ = generate_synthetic(*DATASET_SHAPES["IV"], rng_seed)
config = SimulationConfig(rounds=rounds)
state, trace = run_uape(graph, attitudes, config)
print(len(trace), "attitude changes")

# Row 0 of the curve is the initial state; columns are positive, neutral,
# negative, unknown.

curve = activation_curve(trace, attitudes, rounds)
curve[:4, 0]

# +
fig, axes = plt.subplots(1, attitudes.topic_count, figsize=(10, 3.5), sharey=True)
for t, ax in enumerate(axes):
    for k, label in enumerate(["positive", "neutral", "negative"]):
        ax.plot(curve[:, t, k], label=label)
    ax.set_title(f"topic {t}")
    ax.set_xlabel("round")
axes[0].set_ylabel("nodes")
axes[0].legend()
fig.savefig("single_cascade.png", dpi=100, bbox_inches="tight")
# -

# Nearly every newly reached node lands on neutral: a node that holds no attitude on
# any other topic shares nothing with the sender, so its similarity (and
# therefore its influence probability) is zero.  Only nodes that already
# share known topics with the sender can adopt the sender's attitude.

first_hop = trace.round == 1
print("round 1 adoptions:", int(((trace.old == -1) & (trace.new != 0.5) & first_hop).sum()),
      "of", int(((trace.old == -1) & first_hop).sum()), "activations")

# The adjacent set (nodes reached but not yet aware at the start of a round)
# is tracked per topic.

trace.adjacent_sizes[0][:5]
