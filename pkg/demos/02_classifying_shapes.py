"""
Classifying interleaved spirals
===============================

Each class gets its own network; a sample goes to the class whose forest
grows the least when the sample is added.
"""

# %%
import numpy as np

from mstnet import ARTIFICIAL_7, evaluate, fit, generate_artificial, predict_batch
from mstnet.classifier import nearest_neighbor_predict
from mstnet.data import stratified_holdout

# %% [markdown]
# Four spirals and three five-armed stars, 100 samples each.  Overlap is the
# standard deviation of Gaussian jitter added to every point.

# %%
for overlap in (0.0, 0.3):
    data = generate_artificial([f"{s}:100" for s in ARTIFICIAL_7], overlap, seed=1)
    keep, hold = stratified_holdout(data, 0.3, seed=1)
    train, test = data.subset(keep), data.subset(hold)

    model = fit(train, theta=1e9)
    m = evaluate(predict_batch(model, test), test.labels, classes=model.labels)
    nn = np.mean(nearest_neighbor_predict(train, test) == test.labels)
    print(f"overlap {overlap}: accuracy {m.accuracy:.3f}, macro precision "
          f"{m.macro_precision:.3f}, 1-NN {nn:.3f}")

# %% [markdown]
# The per-class deltas behind one decision.

# %%
p = predict_batch(model, test.features[:1])[0]
print("true", test.labels[0], "predicted", p.label)
for label, d in sorted(p.deltas.items(), key=lambda kv: kv[1]):
    print(f"  class {label}: {d:+.4f}")

# %% [markdown]
# The default theta of 0.8 drops long edges, which splits sparse classes into
# several components.  Compare a few values on the noisy data.

# %%
for theta in (0.5, 0.8, 1.5, 1e9):
    model = fit(train, theta=theta)
    acc = evaluate(predict_batch(model, test), test.labels).accuracy
    edges = sum(len(n.edges) for n in model.networks.values())
    print(f"theta {theta:g}: accuracy {acc:.3f}, {edges} retained edges")
