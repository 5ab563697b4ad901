"""Graph-based classification with per-class minimum spanning forests.

Each class is a pruned complete graph over its own training samples; a new
sample goes to the class whose minimum spanning forest weight grows the
least when the sample is inserted. Feature weights inside the distance can
be tuned by grid search or a genetic algorithm.
"""

__version__ = "0.1.0"

from .data import (  # noqa: E402
    ARTIFICIAL_7,
    Dataset,
    DataError,
    FoldAssignment,
    ScalingParams,
    ShapeSpec,
    apply_scaling,
    generate_artificial,
    generate_noise_fixture,
    load_csv,
    minmax_scale,
    random_oversample,
    save_csv,
    stratified_holdout,
    stratified_kfold,
)
from .graph import (  # noqa: E402
    DEFAULT_THETA,
    ClassNetwork,
    Edge,
    FeatureWeights,
    GraphError,
    build_network,
    forest_weight,
    insertion_delta,
    weighted_distance,
)
from .classifier import (  # noqa: E402
    FittedModel,
    Metrics,
    ModelError,
    Prediction,
    evaluate,
    fit,
    predict_batch,
    predict_one,
)
from .optimizer import (  # noqa: E402
    GAConfig,
    GridConfig,
    OptimizationResult,
    fitness,
    ga_optimize,
    grid_search,
)
from .harness import (  # noqa: E402
    ExperimentConfig,
    ExperimentReport,
    compare,
    emit_report,
    read_report,
    run_cv,
)
