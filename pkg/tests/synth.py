"""Synthetic dataset construction shared by tests and scripts/make_fixture.py.

Embeddings are built from latent factors so that PCA recovers the factor
subspace; fitness is a noisy degree-2 pseudo-Boolean function of the
median-binarized PCA latents, giving the pipeline a planted signal.
"""

from __future__ import annotations

import numpy as np

from qubofit.binarization import binarize_batch, fit_thresholds
from qubofit.dataset import FitnessDataset
from qubofit.projection import fit_pca_projection, project_batch
from qubofit.surrogate import QuboSurrogate, predict_batch


def random_surrogate(m: int, seed: int, intercept: float = 0.0, ridge_lambda: float = 1.0) -> QuboSurrogate:
    """Surrogate with i.i.d. standard-normal linear and pair coefficients."""
    rng = np.random.default_rng(seed)
    linear = rng.normal(size=m)
    coupling = np.zeros((m, m))
    iu, ju = np.triu_indices(m, k=1)
    coupling[iu, ju] = rng.normal(size=iu.size)
    coupling = coupling + coupling.T
    return QuboSurrogate(linear=linear, coupling=coupling, intercept=intercept, ridge_lambda=ridge_lambda)


def all_codes(m: int) -> np.ndarray:
    """All 2^m codes, ordered so row index equals the lexicographic integer."""
    n = 1 << m
    idx = np.arange(n, dtype=np.uint32)
    return ((idx[:, None] >> (m - 1 - np.arange(m))) & 1).astype(np.uint8)


def planted_dataset(
    n: int, d: int, m: int, seed: int, noise: float = 0.25
) -> tuple[FitnessDataset, QuboSurrogate]:
    """Dataset whose fitness is a noisy quadratic function of its own binarized
    PCA latents; returns the dataset and the generating surrogate."""
    rng = np.random.default_rng(seed)
    factors = rng.normal(size=(n, m))
    mixing = rng.normal(size=(m, d))
    embeddings = factors @ mixing + 0.05 * rng.normal(size=(n, d))

    projector = fit_pca_projection(embeddings, m)
    latents = project_batch(projector, embeddings)
    codes = binarize_batch(fit_thresholds(latents), latents)

    truth = random_surrogate(m, seed + 1)
    clean = predict_batch(truth, codes)
    fitness = clean + noise * clean.std() * rng.normal(size=n)
    ids = tuple(f"v{i:05d}" for i in range(n))
    return FitnessDataset(ids=ids, embeddings=embeddings, fitness=fitness), truth
