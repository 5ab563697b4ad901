"""Feature-weight search: exhaustive grid and a real-coded genetic algorithm.

Both maximize the macro precision of the classifier on a validation split.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifier import evaluate, fit, predict_batch
from .data import Dataset
from .graph import DEFAULT_THETA, FeatureWeights


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 30
    generations: int = 50
    crossover_rate: float = 0.9
    blend_alpha: float = 0.5
    mutation_rate: float = 0.1
    mutation_sigma: float = 0.1
    tournament_size: int = 3
    elitism_count: int = 2
    weight_lo: float = 0.0
    weight_hi: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2 or self.generations < 0:
            raise ConfigError("population_size must be >= 2 and generations >= 0")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.mutation_sigma <= 0 or self.blend_alpha < 0:
            raise ConfigError("mutation_sigma must be > 0 and blend_alpha >= 0")
        if self.tournament_size < 2 or self.tournament_size > self.population_size:
            raise ConfigError("tournament_size must be in [2, population_size]")
        if not 0 <= self.elitism_count < self.population_size:
            raise ConfigError("elitism_count must be in [0, population_size)")
        if not 0.0 <= self.weight_lo < self.weight_hi:
            raise ConfigError("weight bounds must satisfy 0 <= lo < hi")

    @property
    def max_evaluations(self) -> int:
        return self.population_size * (self.generations + 1)


@dataclass(frozen=True)
class GridConfig:
    grid_values: tuple = (0.25, 0.5, 0.75, 1.0)
    max_evaluations: int | None = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.grid_values)
        if not values:
            raise ConfigError("grid_values is empty")
        if any(v < 0 for v in values) or list(values) != sorted(set(values)):
            raise ConfigError("grid_values must be non-negative, sorted and distinct")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ConfigError("max_evaluations must be positive")
        object.__setattr__(self, "grid_values", values)


def _coerce(value: str, kind):
    kind = str(kind)
    if "tuple" in kind:
        return tuple(float(v) for v in value.replace(",", " ").split())
    if "int" in kind:
        if value.strip().lower() in ("none", "unbounded", ""):
            return None
        return int(value)
    if "float" in kind:
        return float(value)
    return value


def read_config(path, cls):
    """Read ``key = value`` lines (``#`` comments allowed) into ``cls``."""
    fields = {f.name: f.type for f in dataclasses.fields(cls)}
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in fields:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(value, fields[key])
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from None
    return cls(**values)


@dataclass
class OptimizationResult:
    best_weights: FeatureWeights
    best_fitness: float
    history: list = field(default_factory=list)
    evaluations: int = 0
    best_accuracy: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "best_weights": self.best_weights.tolist(),
            "best_fitness": self.best_fitness,
            "best_accuracy": self.best_accuracy,
            "evaluations": self.evaluations,
            "history": [list(h) for h in self.history],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizationResult":
        return cls(FeatureWeights(d["best_weights"]), d["best_fitness"],
                   [tuple(h) for h in d["history"]], d["evaluations"], d["best_accuracy"])


def score(weights, train: Dataset, validation: Dataset, theta: float = DEFAULT_THETA,
          scale: bool = True):
    model = fit(train, weights, theta, scale=scale)
    return evaluate(predict_batch(model, validation), validation.labels, classes=model.labels)


def fitness(weights, train: Dataset, validation: Dataset, theta: float = DEFAULT_THETA,
            scale: bool = True) -> float:
    """Macro precision on ``validation`` of a model fitted on ``train``."""
    return score(weights, train, validation, theta, scale).macro_precision


class _Tracker:
    """Evaluates candidates, memoizes repeats and keeps the best-ever one.

    Equal fitness is resolved towards the lexicographically smaller vector
    so the outcome does not depend on evaluation order.
    """

    def __init__(self, train, validation, theta, scale):
        self.train, self.validation, self.theta, self.scale = train, validation, theta, scale
        self.cache: dict[tuple, float] = {}
        self.best_key = None
        self.best_fitness = -np.inf
        self.best_accuracy = float("nan")
        self.history: list[tuple[int, float]] = []

    @property
    def evaluations(self) -> int:
        return len(self.cache)

    def __call__(self, w: np.ndarray) -> float:
        key = tuple(float(v) for v in w)
        if key in self.cache:
            return self.cache[key]
        m = score(key, self.train, self.validation, self.theta, self.scale)
        self.cache[key] = m.macro_precision
        f = m.macro_precision
        if f > self.best_fitness or (f == self.best_fitness and key < self.best_key):
            self.best_key, self.best_fitness, self.best_accuracy = key, f, m.accuracy
        self.history.append((self.evaluations, self.best_fitness))
        return f

    def result(self) -> OptimizationResult:
        return OptimizationResult(FeatureWeights(self.best_key), float(self.best_fitness),
                                  list(self.history), self.evaluations, self.best_accuracy)


def grid_search(grid: GridConfig, train: Dataset, validation: Dataset,
                theta: float = DEFAULT_THETA, scale: bool = True) -> OptimizationResult:
    """Evaluate the Cartesian product of ``grid_values`` in lexicographic
    order, stopping after ``max_evaluations`` candidates.

    All-zero vectors are skipped (they define no distance) and do not count
    against the budget.
    """
    n = train.n_features
    track = _Tracker(train, validation, theta, scale)
    for combo in itertools.product(grid.grid_values, repeat=n):
        if grid.max_evaluations is not None and track.evaluations >= grid.max_evaluations:
            break
        if not any(combo):
            continue
        track(np.array(combo))
    if track.best_key is None:
        raise ConfigError("grid contains no admissible weight vector")
    return track.result()


def _repair(w: np.ndarray, hi: float, rng: np.random.Generator) -> np.ndarray:
    if not np.any(w > 0):
        w = w.copy()
        w[rng.integers(len(w))] = hi
    return w


def _rank(pop: np.ndarray, fit: np.ndarray) -> np.ndarray:
    # best first; equal fitness -> lexicographically smaller vector first
    keys = [tuple(row) for row in pop.tolist()]
    return np.array(sorted(range(len(pop)), key=lambda i: (-fit[i], keys[i])))


def ga_optimize(config: GAConfig, train: Dataset, validation: Dataset,
                theta: float = DEFAULT_THETA, scale: bool = True) -> OptimizationResult:
    """Real-coded GA over feature weights.

    Generation 0 is uniform random in ``[weight_lo, weight_hi]`` plus one
    all-equal individual (the unweighted baseline). Each later generation
    keeps ``elitism_count`` elites and fills the rest by tournament
    selection, blend (BLX-alpha) crossover and per-gene Gaussian mutation,
    all clamped to the bounds.
    """
    n = train.n_features
    lo, hi = config.weight_lo, config.weight_hi
    rng = np.random.default_rng(config.seed)
    track = _Tracker(train, validation, theta, scale)

    baseline = 1.0 if lo <= 1.0 <= hi else hi
    pop = rng.uniform(lo, hi, size=(config.population_size, n))
    pop[0] = baseline
    pop = np.array([_repair(w, hi, rng) for w in pop])

    def tournament(fit):
        picks = rng.choice(len(pop), size=config.tournament_size, replace=False)
        return pop[min(picks, key=lambda i: (-fit[i], tuple(pop[i])))]

    fit = np.array([track(w) for w in pop])
    for _ in range(config.generations):
        order = _rank(pop, fit)
        children = [pop[i].copy() for i in order[: config.elitism_count]]
        while len(children) < config.population_size:
            a, b = tournament(fit), tournament(fit)
            if rng.random() < config.crossover_rate:
                span = np.abs(a - b)
                low = np.minimum(a, b) - config.blend_alpha * span
                high = np.maximum(a, b) + config.blend_alpha * span
                c1, c2 = rng.uniform(low, high), rng.uniform(low, high)
            else:
                c1, c2 = a.copy(), b.copy()
            for c in (c1, c2):
                mask = rng.random(n) < config.mutation_rate
                c[mask] += rng.normal(0.0, config.mutation_sigma, mask.sum())
                c = _repair(np.clip(c, lo, hi), hi, rng)
                if len(children) < config.population_size:
                    children.append(c)
        pop = np.array(children)
        fit = np.array([track(w) for w in pop])
    return track.result()
