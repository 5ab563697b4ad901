"""Dataset container, CSV ingestion, scaling, balancing, fold splitting and
the artificial spiral/star generator."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DataError(ValueError):
    """Raised for malformed or unusable datasets."""


def _parse_label(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        return text
    return int(value) if value.is_integer() else value


@dataclass
class Dataset:
    """Labeled numeric feature matrix.

    ``rows`` records, for every row, the index of the source row it came
    from (oversampled copies point back at their original).
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: list[str] = field(default_factory=list)
    rows: np.ndarray | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        if self.features.ndim == 1:
            self.features = self.features.reshape(-1, 1)
        if self.features.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        self.labels = np.asarray(self.labels)
        if self.labels.ndim != 1 or len(self.labels) != len(self.features):
            raise DataError(
                f"{len(self.features)} feature rows but {self.labels.size} labels"
            )
        if not self.feature_names:
            self.feature_names = [f"x{i}" for i in range(self.n_features)]
        elif len(self.feature_names) != self.n_features:
            raise DataError("feature_names length does not match column count")
        if self.rows is None:
            self.rows = np.arange(len(self.labels))
        else:
            self.rows = np.asarray(self.rows, dtype=int)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def classes(self) -> list:
        return sorted(set(self.labels.tolist()))

    def class_counts(self) -> dict:
        values, counts = np.unique(self.labels, return_counts=True)
        return {v: int(c) for v, c in zip(values.tolist(), counts.tolist())}

    def subset(self, index) -> "Dataset":
        index = np.asarray(index, dtype=int)
        return Dataset(
            self.features[index],
            self.labels[index],
            list(self.feature_names),
            self.rows[index],
        )


@dataclass(frozen=True)
class ScalingParams:
    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.minimum, dtype=float)
        hi = np.asarray(self.maximum, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DataError("minimum and maximum must be 1-D and equal length")
        if np.any(lo > hi):
            raise DataError("minimum exceeds maximum")
        object.__setattr__(self, "minimum", lo)
        object.__setattr__(self, "maximum", hi)

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != len(self.minimum):
            raise DataError(
                f"expected {len(self.minimum)} columns, got {x.shape[-1]}"
            )
        span = self.maximum - self.minimum
        safe = np.where(span > 0, span, 1.0)
        out = (x - self.minimum) / safe
        # constant training columns carry no information
        return np.where(span > 0, out, 0.0)

    def to_dict(self) -> dict:
        return {"minimum": self.minimum.tolist(), "maximum": self.maximum.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalingParams":
        return cls(np.array(d["minimum"], dtype=float), np.array(d["maximum"], dtype=float))


@dataclass(frozen=True)
class FoldAssignment:
    fold_of: np.ndarray
    k: int

    def test_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def train_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)


# --------------------------------------------------------------------- I/O


def load_csv(path, label_column: str | int | None = None) -> Dataset:
    """Read a headered CSV into a :class:`Dataset`.

    ``label_column`` may be a column name or a (possibly negative) index;
    the default is the last column.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        body = [row for row in reader if row]

    header = [h.strip() for h in header]
    if label_column is None:
        label_idx = len(header) - 1
    elif isinstance(label_column, int) or str(label_column).lstrip("-").isdigit():
        label_idx = int(label_column)
        if not -len(header) <= label_idx < len(header):
            raise DataError(f"{path}: label column index {label_idx} out of range")
        label_idx %= len(header)
    else:
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header")
        label_idx = header.index(label_column)

    if len(body) < 2:
        raise DataError(f"{path}: need at least 2 data rows, found {len(body)}")

    feat_cols = [i for i in range(len(header)) if i != label_idx]
    features = np.empty((len(body), len(feat_cols)))
    labels = []
    for r, row in enumerate(body):
        if len(row) != len(header):
            raise DataError(
                f"{path}: row {r + 2} has {len(row)} cells, header has {len(header)}"
            )
        for j, c in enumerate(feat_cols):
            try:
                features[r, j] = float(row[c])
            except ValueError:
                raise DataError(
                    f"{path}: row {r + 2}, column {header[c]!r}: "
                    f"cannot parse {row[c]!r} as a number"
                ) from None
        labels.append(_parse_label(row[label_idx].strip()))

    kinds = {type(v) for v in labels}
    if len(kinds) > 1:
        labels = [str(v) for v in labels]
    return Dataset(features, np.array(labels), [header[c] for c in feat_cols])


def save_csv(data: Dataset, path, label_column: str = "class") -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([*data.feature_names, label_column])
        for x, y in zip(data.features.tolist(), data.labels.tolist()):
            writer.writerow([*(repr(v) for v in x), y])


# ------------------------------------------------------------ preprocessing


def minmax_scale(data: Dataset) -> tuple[Dataset, ScalingParams]:
    if len(data) == 0:
        raise DataError("cannot scale an empty dataset")
    params = ScalingParams(data.features.min(axis=0), data.features.max(axis=0))
    return apply_scaling(data, params), params


def apply_scaling(data: Dataset, params: ScalingParams) -> Dataset:
    """Scale with stored training statistics. Values are not clamped."""
    return Dataset(
        params.transform(data.features),
        data.labels,
        list(data.feature_names),
        data.rows,
    )


def random_oversample(data: Dataset, seed: int) -> Dataset:
    """Duplicate uniformly drawn rows of each minority class until every
    class matches the majority count. Original rows come first."""
    if len(data) == 0:
        raise DataError("cannot oversample an empty dataset")
    rng = np.random.default_rng(seed)
    counts = data.class_counts()
    target = max(counts.values())
    extra = []
    for label in sorted(counts):
        members = np.flatnonzero(data.labels == label)
        deficit = target - len(members)
        if deficit > 0:
            extra.append(rng.choice(members, size=deficit, replace=True))
    index = np.concatenate([np.arange(len(data)), *extra]).astype(int)
    return data.subset(index)


def stratified_kfold(data: Dataset, k: int, seed: int) -> FoldAssignment:
    """Assign every sample to one of ``k`` folds, class by class.

    Within each class the members are shuffled and dealt round-robin; the
    starting fold rotates between classes so that fold sizes stay balanced.
    """
    if k < 2:
        raise DataError("k must be at least 2")
    rng = np.random.default_rng(seed)
    fold_of = np.full(len(data), -1, dtype=int)
    offset = 0
    for label, count in sorted(data.class_counts().items()):
        if count < k:
            raise DataError(f"class {label!r} has {count} samples, fewer than k={k}")
        members = rng.permutation(np.flatnonzero(data.labels == label))
        fold_of[members] = (np.arange(count) + offset) % k
        offset = (offset + count) % k
    return FoldAssignment(fold_of, k)


def stratified_holdout(data: Dataset, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Split indices into (keep, holdout) with ``fraction`` of every class
    held out (at least one sample per class on each side)."""
    rng = np.random.default_rng(seed)
    keep, hold = [], []
    for label in data.classes:
        members = rng.permutation(np.flatnonzero(data.labels == label))
        if len(members) < 2:
            raise DataError(f"class {label!r} too small for a holdout split")
        n_hold = min(max(1, int(round(fraction * len(members)))), len(members) - 1)
        hold.append(members[:n_hold])
        keep.append(members[n_hold:])
    return np.sort(np.concatenate(keep)), np.sort(np.concatenate(hold))


# ---------------------------------------------------------------- generator


@dataclass(frozen=True)
class ShapeSpec:
    """One or more classes of the same shape kind.

    ``kind`` is ``"spiral"`` or ``"star"``; ``count`` classes of ``n``
    samples each are produced.
    """

    kind: str
    count: int = 1
    n: int = 200

    @classmethod
    def parse(cls, text: str, n: int = 200) -> "ShapeSpec":
        """Parse ``kind[:count[:n]]``, e.g. ``spiral:7`` or ``star:2:150``."""
        parts = text.strip().split(":")
        kind = parts[0]
        count = int(parts[1]) if len(parts) > 1 else 1
        size = int(parts[2]) if len(parts) > 2 else n
        return cls(kind, count, size)


SPIRAL_TURNS = 3 * math.pi
SPIRAL_PITCH = 1.0
STAR_ARMS = 5
STAR_RADIUS = 2.0


def _spiral(n, phase, rng):
    # uniform in arc length: t ∝ sqrt(u) because arc length grows like t²
    t = np.sort(SPIRAL_TURNS * np.sqrt(rng.uniform(0.0, 1.0, n)))
    r = SPIRAL_PITCH * t
    return np.column_stack([r * np.cos(t + phase), r * np.sin(t + phase)])


def _star(n, center, rotation, rng):
    arm = rng.integers(0, STAR_ARMS, n)
    angle = rotation + 2 * math.pi * arm / STAR_ARMS
    radius = STAR_RADIUS * rng.uniform(0.0, 1.0, n)
    pts = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    return pts + center


def generate_artificial(shapes: Sequence[ShapeSpec | str], overlap: float = 0.0, seed: int = 0) -> Dataset:
    """Two-dimensional multi-class dataset made of spirals and stars.

    All spiral classes share the origin and are rotated by ``2*pi*c/S``
    for the c-th of S spirals. Stars sit on a ring outside the spirals,
    each made of ``STAR_ARMS`` radial arms. Isotropic Gaussian noise with
    standard deviation ``overlap`` is added to every point.
    """
    specs = [ShapeSpec.parse(s) if isinstance(s, str) else s for s in shapes]
    if not specs:
        raise DataError("shape list is empty")
    if overlap < 0:
        raise DataError("overlap must be non-negative")
    for s in specs:
        if s.kind not in ("spiral", "star"):
            raise DataError(f"unknown shape kind {s.kind!r}")
        if s.count < 1 or s.n < 1:
            raise DataError("shape counts and sample sizes must be positive")

    rng = np.random.default_rng(seed)
    n_spirals = sum(s.count for s in specs if s.kind == "spiral")
    n_stars = sum(s.count for s in specs if s.kind == "star")
    ring = SPIRAL_PITCH * SPIRAL_TURNS + 2.5 * STAR_RADIUS

    blocks, labels = [], []
    spiral_i = star_i = 0
    label = 0
    for s in specs:
        for _ in range(s.count):
            if s.kind == "spiral":
                pts = _spiral(s.n, 2 * math.pi * spiral_i / n_spirals, rng)
                spiral_i += 1
            else:
                a = 2 * math.pi * star_i / n_stars
                center = np.array([ring * math.cos(a), ring * math.sin(a)])
                pts = _star(s.n, center, rng.uniform(0, 2 * math.pi), rng)
                star_i += 1
            if overlap > 0:
                pts = pts + rng.normal(0.0, overlap, pts.shape)
            blocks.append(pts)
            labels.append(np.full(s.n, label))
            label += 1

    return Dataset(np.vstack(blocks), np.concatenate(labels), ["x", "y"])


# the 7-class layout used throughout the demos and acceptance runs
ARTIFICIAL_7 = ("spiral:4", "star:3")


def generate_noise_fixture(n_per_class: int = 100, noise_amplitude: float = 0.06,
                           seed: int = 0, tail_df: float = 3.0) -> Dataset:
    """Two classes, one separating feature and one pure-noise feature.

    ``signal`` is uniform on [0, 0.45] for class 0 and [0.55, 1] for
    class 1. ``noise`` is ``noise_amplitude`` times a Student-t draw with
    ``tail_df`` degrees of freedom, independent of the class. Use it
    unscaled: min-max scaling would erase the amplitude.
    """
    if n_per_class < 1 or noise_amplitude < 0:
        raise DataError("n_per_class must be positive and noise_amplitude non-negative")
    rng = np.random.default_rng(seed)
    labels = np.repeat([0, 1], n_per_class)
    signal = np.where(labels == 0,
                      rng.uniform(0.0, 0.45, labels.size),
                      rng.uniform(0.55, 1.0, labels.size))
    noise = noise_amplitude * rng.standard_t(tail_df, labels.size)
    return Dataset(np.column_stack([signal, noise]), labels, ["signal", "noise"])
