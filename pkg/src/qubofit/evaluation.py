"""Run metrics: rank correlation, Hamming retrieval, percentile rank.

Ties use midrank conventions throughout (Spearman ranks and percentile),
so duplicate fitness values are handled consistently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .binarization import CodeBook, validate_code
from .optimizers import OptimizationResult
from .surrogate import QuboSurrogate, predict_batch


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class RunMetrics:
    test_spearman: float
    improvement: float
    nn_true_fitness: float
    nn_percentile: float
    nn_id: str
    nn_hamming: int


def spearman(a, b) -> float:
    """Spearman rho: Pearson correlation of midrank transforms.

    Raises on length mismatch, fewer than 2 points, or a constant input
    (rank correlation is undefined there; an error beats a silent 0).
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise EvaluationError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.shape[0] < 2:
        raise EvaluationError("need at least 2 points")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise EvaluationError("rank correlation is undefined for a constant input")
    rx = rankdata(x, method="average")
    ry = rankdata(y, method="average")
    rx -= rx.mean()
    ry -= ry.mean()
    return float(np.dot(rx, ry) / np.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))


def hamming_nn(code, book: CodeBook, k: int = 1) -> list[tuple[str, int, float]]:
    """The k nearest codebook entries by Hamming distance, ties by record order.

    Returns (id, distance, fitness) triples; k is clamped to the book size.
    """
    if book.n_records < 1:
        raise EvaluationError("codebook is empty")
    if k < 1:
        raise EvaluationError(f"k must be >= 1, got {k}")
    x = validate_code(code, book.dim)
    distances = np.count_nonzero(book.codes != x, axis=1)
    order = np.argsort(distances, kind="stable")[: min(k, book.n_records)]
    return [(book.ids[i], int(distances[i]), float(book.fitness[i])) for i in order]


def percentile(v: float, training_fitness) -> float:
    """Midrank percentile of v within the training fitness values, in [0, 100]."""
    y = np.asarray(training_fitness, dtype=np.float64)
    if y.size < 1:
        raise EvaluationError("training fitness is empty")
    below = np.count_nonzero(y < v)
    equal = np.count_nonzero(y == v)
    return 100.0 * (below + 0.5 * equal) / y.size


def evaluate_run(
    q: QuboSurrogate,
    train: CodeBook,
    test_codes,
    test_fitness,
    opt: OptimizationResult,
) -> RunMetrics:
    """Assemble the reported metrics for one optimization run.

    Spearman is computed on surrogate predictions over the test codes;
    the retrieval metrics come from the nearest training neighbor of the
    optimizer's best code, with its percentile taken within the training
    fitness distribution only.
    """
    preds = predict_batch(q, test_codes)
    rho = spearman(preds, test_fitness)
    nn_id, nn_dist, nn_fit = hamming_nn(opt.best_code, train, k=1)[0]
    return RunMetrics(
        test_spearman=rho,
        improvement=opt.improvement,
        nn_true_fitness=nn_fit,
        nn_percentile=percentile(nn_fit, train.fitness),
        nn_id=nn_id,
        nn_hamming=nn_dist,
    )
