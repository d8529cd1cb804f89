"""Median-threshold binarization of continuous latents to {0,1} codes.

Bit k is 1 iff the latent coordinate strictly exceeds the training median
of dimension k; ties map to 0. For even column length the median is the
mean of the two middle order statistics. Codes are uint8 numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class BinarizationError(ValueError):
    pass


@dataclass(frozen=True)
class Binarizer:
    thresholds: np.ndarray  # (m,) per-dimension training medians

    def __post_init__(self):
        tau = np.asarray(self.thresholds, dtype=np.float64)
        if tau.ndim != 1 or tau.shape[0] < 1:
            raise BinarizationError(f"thresholds must be a nonempty vector, got shape {tau.shape}")
        if not np.isfinite(tau).all():
            raise BinarizationError("thresholds must be finite")
        tau.setflags(write=False)
        object.__setattr__(self, "thresholds", tau)

    @property
    def dim(self) -> int:
        return self.thresholds.shape[0]


@dataclass(frozen=True)
class CodeBook:
    """Binary codes of observed records with their fitness, for retrieval."""

    codes: np.ndarray  # (N, m) uint8
    fitness: np.ndarray  # (N,)
    ids: tuple[str, ...]
    sequences: tuple[str, ...] | None = None

    def __post_init__(self):
        codes = np.ascontiguousarray(self.codes, dtype=np.uint8)
        fit = np.asarray(self.fitness, dtype=np.float64)
        if codes.ndim != 2:
            raise BinarizationError(f"codes must be 2-D, got shape {codes.shape}")
        n = codes.shape[0]
        if fit.shape != (n,) or len(self.ids) != n:
            raise BinarizationError("codes, fitness, and ids must have aligned lengths")
        if self.sequences is not None and len(self.sequences) != n:
            raise BinarizationError("sequences length must match codes")
        if codes.size and codes.max() > 1:
            raise BinarizationError("codes must be over {0, 1}")
        codes.setflags(write=False)
        fit.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "fitness", fit)
        object.__setattr__(self, "ids", tuple(self.ids))
        if self.sequences is not None:
            object.__setattr__(self, "sequences", tuple(self.sequences))

    @property
    def n_records(self) -> int:
        return self.codes.shape[0]

    @property
    def dim(self) -> int:
        return self.codes.shape[1]


def fit_thresholds(latents) -> Binarizer:
    """Per-dimension medians of an (N, m) latent matrix."""
    z = np.asarray(latents, dtype=np.float64)
    if z.ndim != 2 or z.shape[0] < 1:
        raise BinarizationError(f"latents must be a nonempty 2-D matrix, got shape {z.shape}")
    return Binarizer(thresholds=np.median(z, axis=0))


def binarize(b: Binarizer, z) -> np.ndarray:
    """Code with bit k = 1 iff z_k > threshold_k (strict; ties give 0)."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (b.dim,):
        raise BinarizationError(f"latent of shape {z.shape} does not match dim {b.dim}")
    return (z > b.thresholds).astype(np.uint8)


def binarize_batch(b: Binarizer, latents) -> np.ndarray:
    z = np.asarray(latents, dtype=np.float64)
    if z.ndim != 2 or z.shape[1] != b.dim:
        raise BinarizationError(f"latents of shape {z.shape} do not match dim {b.dim}")
    return (z > b.thresholds).astype(np.uint8)


def validate_code(code, m: int) -> np.ndarray:
    """Check an externally supplied code and normalize it to uint8."""
    arr = np.asarray(code)
    if arr.shape != (m,):
        raise BinarizationError(f"code of shape {arr.shape} does not match dim {m}")
    if not np.isin(arr, (0, 1)).all():
        raise BinarizationError("code entries must be 0 or 1")
    return np.ascontiguousarray(arr, dtype=np.uint8)


def save_binarizer(b: Binarizer, path) -> None:
    """Single TSV row of thresholds."""
    Path(path).write_text("\t".join(f"{v:.17g}" for v in b.thresholds) + "\n", encoding="utf-8")


def load_binarizer(path) -> Binarizer:
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        raise BinarizationError(f"{path}: empty binarizer file")
    try:
        tau = np.array(text.split("\t"), dtype=np.float64)
    except ValueError as exc:
        raise BinarizationError(f"{path}: malformed binarizer file: {exc}") from exc
    return Binarizer(thresholds=tau)
