"""Minimum-spanning-forest classifier: one network per class, prediction by
smallest insertion delta."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import Dataset, DataError, ScalingParams, minmax_scale
from .graph import DEFAULT_THETA, ClassNetwork, FeatureWeights, _as_weights, build_network, insertion_delta

MODEL_FORMAT = "mstnet.model"
MODEL_VERSION = 1
# deltas closer than this fraction of the total tree weight count as ties
TIE_RTOL = 1e-9


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Prediction:
    label: object
    deltas: dict


@dataclass(frozen=True, eq=False)
class FittedModel:
    networks: dict
    scaling: ScalingParams
    weights: FeatureWeights
    theta: float

    @property
    def labels(self) -> list:
        """Class labels in canonical (sorted) order; this order breaks ties."""
        return sorted(self.networks)

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "theta": self.theta,
            "weights": self.weights.tolist(),
            "scaling": self.scaling.to_dict(),
            "classes": [
                {"label": _jsonable(c), "network": self.networks[c].to_dict()}
                for c in self.labels
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FittedModel":
        if d.get("format") != MODEL_FORMAT or d.get("version") != MODEL_VERSION:
            raise ModelError("unsupported model format or version")
        networks = {e["label"]: ClassNetwork.from_dict(e["network"]) for e in d["classes"]}
        return cls(networks, ScalingParams.from_dict(d["scaling"]),
                   FeatureWeights(d["weights"]), float(d["theta"]))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "FittedModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _jsonable(label):
    return label.item() if isinstance(label, np.generic) else label


def fit(train: Dataset, weights=None, theta: float = DEFAULT_THETA, scale: bool = True) -> FittedModel:
    """Scale ``train`` and build one pruned network per class.

    Each network sees only its own class's samples. With ``scale=False``
    an identity scaling is stored instead of min-max statistics.
    """
    classes = train.classes
    if len(classes) < 2:
        raise ModelError(f"need at least 2 classes to fit, found {len(classes)}")
    weights = _as_weights(weights, train.n_features)
    if scale:
        scaled, params = minmax_scale(train)
    else:
        n = train.n_features
        scaled, params = train, ScalingParams(np.zeros(n), np.ones(n))
    networks = {}
    for c in classes:
        members = scaled.features[scaled.labels == c]
        networks[_jsonable(c)] = build_network(members, weights, theta)
    return FittedModel(networks, params, weights, float(theta))


def predict_one(model: FittedModel, x) -> Prediction:
    x = np.asarray(x, dtype=float).ravel()
    if x.size != model.n_features:
        raise ModelError(f"sample has {x.size} features, model expects {model.n_features}")
    z = model.scaling.transform(x)
    deltas = {c: insertion_delta(model.networks[c], z, model.weights) for c in model.labels}
    # a delta is a difference of two sums of many edges, so exact ties (common
    # with a single effective feature) come back as +-1e-16 noise; treat values
    # within a relative tolerance as tied and give them to the smallest label
    scale = max(net.mst_weight for net in model.networks.values()) + max(abs(d) for d in deltas.values())
    lowest = min(deltas.values())
    best = next(c for c in model.labels if deltas[c] <= lowest + TIE_RTOL * scale)
    return Prediction(best, deltas)


def predict_batch(model: FittedModel, test: Dataset | np.ndarray) -> list[Prediction]:
    features = test.features if isinstance(test, Dataset) else np.asarray(test, dtype=float)
    if features.size == 0:
        return []
    features = features.reshape(len(features), -1)
    if features.shape[1] != model.n_features:
        raise ModelError(f"data has {features.shape[1]} features, model expects {model.n_features}")
    return [predict_one(model, x) for x in features]


@dataclass
class Metrics:
    accuracy: float
    macro_precision: float
    per_class_precision: dict
    confusion: dict = field(default_factory=dict)


def evaluate(predictions, truth, classes=None) -> Metrics:
    """Accuracy, per-class and macro precision.

    ``predictions`` may be :class:`Prediction` objects or bare labels.
    Precision of a never-predicted class is 0. Classes default to the union
    of true and predicted labels.
    """
    pred = [p.label if isinstance(p, Prediction) else p for p in predictions]
    truth = list(np.asarray(truth).tolist())
    if len(pred) != len(truth):
        raise DataError(f"{len(pred)} predictions for {len(truth)} labels")
    if not pred:
        raise DataError("cannot evaluate an empty prediction list")
    pred = [_jsonable(p) for p in pred]
    if classes is None:
        classes = sorted(set(truth) | set(pred))
    correct = sum(p == t for p, t in zip(pred, truth))
    confusion = {t: {p: 0 for p in classes} for t in classes}
    for p, t in zip(pred, truth):
        confusion.setdefault(t, {}).setdefault(p, 0)
        confusion[t][p] += 1
    per_class = {}
    for c in classes:
        predicted = sum(1 for p in pred if p == c)
        hits = sum(1 for p, t in zip(pred, truth) if p == c and t == c)
        per_class[c] = hits / predicted if predicted else 0.0
    macro = sum(per_class.values()) / len(per_class)
    return Metrics(correct / len(pred), macro, per_class, confusion)


def nearest_neighbor_predict(train: Dataset, test: Dataset, scale: bool = True) -> list:
    """1-nearest-neighbour reference classifier (plain Euclidean)."""
    if scale:
        train, params = minmax_scale(train)
        x = params.transform(test.features)
    else:
        x = test.features
    if len(x) == 0:
        return []
    d = ((x[:, None, :] - train.features[None, :, :]) ** 2).sum(axis=2)
    return [_jsonable(v) for v in train.labels[np.argmin(d, axis=1)]]
