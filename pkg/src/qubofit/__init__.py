"""Binary latent fitness landscapes.

Turns labeled embedding datasets into binary latent codes, fits a
quadratic (QUBO-form) surrogate of fitness over those codes by ridge
regression, searches the surrogate with classical combinatorial
optimizers, and decodes optima back to observed records by Hamming
nearest-neighbor retrieval.
"""

from .binarization import Binarizer, CodeBook, binarize, binarize_batch, fit_thresholds
from .dataset import FitnessDataset, load_dataset, split, subsample
from .evaluation import RunMetrics, evaluate_run, hamming_nn, percentile, spearman
from .harness import ExperimentConfig, ExperimentReport, aggregate, run_experiment
from .optimizers import (
    OptimizationResult,
    OptimizerParams,
    brute_force,
    genetic_algorithm,
    greedy_hill_climb,
    latent_bo,
    random_search,
    simulated_annealing,
)
from .projection import Projector, fit_pca_projection, fit_random_projection, project, project_batch
from .surrogate import (
    QuboSurrogate,
    build_features,
    export_qubo,
    fit_qubo,
    import_qubo,
    predict,
    predict_batch,
)

__version__ = "0.1.0"

__all__ = [
    "Binarizer",
    "CodeBook",
    "ExperimentConfig",
    "ExperimentReport",
    "FitnessDataset",
    "OptimizationResult",
    "OptimizerParams",
    "Projector",
    "QuboSurrogate",
    "RunMetrics",
    "aggregate",
    "binarize",
    "binarize_batch",
    "brute_force",
    "build_features",
    "evaluate_run",
    "export_qubo",
    "fit_pca_projection",
    "fit_qubo",
    "fit_random_projection",
    "fit_thresholds",
    "genetic_algorithm",
    "greedy_hill_climb",
    "hamming_nn",
    "import_qubo",
    "latent_bo",
    "load_dataset",
    "percentile",
    "predict",
    "predict_batch",
    "project",
    "project_batch",
    "random_search",
    "run_experiment",
    "simulated_annealing",
    "spearman",
    "split",
    "subsample",
]
