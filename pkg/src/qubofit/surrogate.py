"""Quadratic pseudo-Boolean surrogate fitted by ridge regression.

The model scores a code x as ``intercept + sum_k linear_k x_k +
sum_{k<l} coupling_kl x_k x_l``. The canonical parameterization is the
k < l coefficient list; the stored matrix is symmetric with zero diagonal
and coupling[k, l] equal to that coefficient, so the matrix identity
``0.5 x' C x`` matches the pair sum exactly.

Targets are centered before the ridge solve and the mean becomes an
unpenalized intercept; the intercept never changes the argmax over codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import kernels
from .binarization import validate_code


class SurrogateError(ValueError):
    pass


@dataclass(frozen=True)
class QuboSurrogate:
    linear: np.ndarray  # (m,) per-bit coefficients
    coupling: np.ndarray  # (m, m) symmetric, zero diagonal
    intercept: float = 0.0
    ridge_lambda: float = 1.0

    def __post_init__(self):
        lin = np.ascontiguousarray(self.linear, dtype=np.float64)
        cpl = np.ascontiguousarray(self.coupling, dtype=np.float64)
        m = lin.shape[0] if lin.ndim == 1 else 0
        if m < 1 or cpl.shape != (m, m):
            raise SurrogateError(f"bad parameter shapes: linear {lin.shape}, coupling {cpl.shape}")
        if not (np.isfinite(lin).all() and np.isfinite(cpl).all() and np.isfinite(self.intercept)):
            raise SurrogateError("surrogate parameters must be finite")
        if np.any(np.diag(cpl) != 0.0):
            raise SurrogateError("coupling diagonal must be exactly zero")
        if not np.array_equal(cpl, cpl.T):
            raise SurrogateError("coupling matrix must be exactly symmetric")
        lin.setflags(write=False)
        cpl.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "coupling", cpl)
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "ridge_lambda", float(self.ridge_lambda))

    @property
    def dim(self) -> int:
        return self.linear.shape[0]

    def pair_coefficients(self) -> np.ndarray:
        """Upper-triangle coupling coefficients in (0,1),(0,2),...,(m-2,m-1) order."""
        iu, ju = np.triu_indices(self.dim, k=1)
        return self.coupling[iu, ju]

    def weight_vector(self) -> np.ndarray:
        """Flat [linear, pair] coefficient vector matching build_features order."""
        return np.concatenate([self.linear, self.pair_coefficients()])


def feature_count(m: int) -> int:
    return m + m * (m - 1) // 2


def build_features(code) -> np.ndarray:
    """Feature vector [x_0..x_{m-1}, x_k x_l for k < l in lexicographic order]."""
    x = np.asarray(code, dtype=np.float64)
    if x.ndim != 1:
        raise SurrogateError(f"code must be a vector, got shape {x.shape}")
    iu, ju = np.triu_indices(x.shape[0], k=1)
    return np.concatenate([x, x[iu] * x[ju]])


def build_feature_matrix(codes) -> np.ndarray:
    """Row-wise build_features for an (N, m) code matrix."""
    x = np.asarray(codes, dtype=np.float64)
    if x.ndim != 2:
        raise SurrogateError(f"codes must be a matrix, got shape {x.shape}")
    iu, ju = np.triu_indices(x.shape[1], k=1)
    return np.concatenate([x, x[:, iu] * x[:, ju]], axis=1)


def fit_qubo(codes, fitness, ridge_lambda: float = 1.0) -> QuboSurrogate:
    """Ridge-regress linear+pair features onto fitness, intercept unpenalized.

    Centers features and targets, solves the normal equations
    (Phi_c' Phi_c + lambda I) w = Phi_c' (y - ybar) with a Cholesky
    factorization, and sets intercept = ybar - mean(Phi) . w. Centering
    keeps the constant component of the target out of the linear and pair
    coefficients, so a noiseless degree-2 target is recovered exactly as
    lambda -> 0. The Gram matrix is positive definite for lambda > 0.
    """
    if ridge_lambda <= 0:
        raise SurrogateError(f"ridge_lambda must be > 0, got {ridge_lambda}")
    x = np.asarray(codes, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    y = np.asarray(fitness, dtype=np.float64)
    if y.shape != (x.shape[0],):
        raise SurrogateError(f"{x.shape[0]} codes but {y.shape} fitness values")
    if x.shape[0] < 1:
        raise SurrogateError("need at least one sample")

    m = x.shape[1]
    phi = build_feature_matrix(x)
    phi_mean = phi.mean(axis=0)
    phi -= phi_mean
    ybar = float(y.mean())
    rhs = phi.T @ (y - ybar)
    gram = phi.T @ phi
    gram[np.diag_indices_from(gram)] += ridge_lambda
    w = cho_solve(cho_factor(gram, lower=True), rhs)

    residual = np.linalg.norm(gram @ w - rhs)
    scale = np.linalg.norm(rhs)
    if residual > 1e-6 * max(scale, 1e-300):
        raise SurrogateError(
            f"normal-equations solve failed: residual {residual:.3e} exceeds 1e-6 * {scale:.3e}"
        )

    linear = w[:m]
    coupling = np.zeros((m, m))
    iu, ju = np.triu_indices(m, k=1)
    coupling[iu, ju] = w[m:]
    coupling = coupling + coupling.T
    return QuboSurrogate(
        linear=linear,
        coupling=coupling,
        intercept=ybar - float(phi_mean @ w),
        ridge_lambda=ridge_lambda,
    )


def predict(q: QuboSurrogate, code) -> float:
    """Score one code: intercept + linear terms + upper-triangle pair terms."""
    x = validate_code(code, q.dim)
    return q.intercept + float(kernels.predict_batch_raw(q.linear, q.coupling, x[None, :])[0])


def predict_batch(q: QuboSurrogate, codes) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.uint8)
    if codes.ndim != 2 or codes.shape[1] != q.dim:
        raise SurrogateError(f"codes of shape {codes.shape} do not match dim {q.dim}")
    return q.intercept + kernels.predict_batch_raw(q.linear, q.coupling, codes)


def flip_deltas(q: QuboSurrogate, code) -> np.ndarray:
    """Score change of each single-bit flip: (1 - 2 x_k)(linear_k + sum_l coupling_kl x_l)."""
    x = validate_code(code, q.dim)
    return kernels.flip_deltas_raw(q.linear, q.coupling, x)


_QUBO_HEADER = (
    "# QUBO surrogate export. Maximization convention: score(x) = c + sum_k b_k x_k\n"
    "#   + sum_{k<l} q_kl x_k x_l. Consumers targeting minimizing annealers must\n"
    "#   negate all coefficients (b, q, c).\n"
)


def export_qubo(q: QuboSurrogate, path) -> None:
    """Write the line-oriented QUBO file: m, lambda, c, then b/q entries."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_QUBO_HEADER)
        fh.write(f"m {q.dim}\n")
        fh.write(f"lambda {q.ridge_lambda:.17g}\n")
        fh.write(f"c {q.intercept:.17g}\n")
        for k in range(q.dim):
            if q.linear[k] != 0.0:
                fh.write(f"b {k} {q.linear[k]:.17g}\n")
        iu, ju = np.triu_indices(q.dim, k=1)
        for k, l in zip(iu, ju):
            v = q.coupling[k, l]
            if v != 0.0:
                fh.write(f"q {k} {l} {v:.17g}\n")


def import_qubo(path) -> QuboSurrogate:
    """Parse a QUBO file back into a surrogate; rejects malformed entries."""
    path = Path(path)
    m = None
    ridge_lambda = 1.0
    intercept = 0.0
    bias_entries: list[tuple[int, float]] = []
    pair_entries: list[tuple[int, int, float]] = []
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            tag = tokens[0]
            if tag == "m":
                m = int(tokens[1])
            elif tag == "lambda":
                ridge_lambda = float(tokens[1])
            elif tag == "c":
                intercept = float(tokens[1])
            elif tag == "b":
                bias_entries.append((int(tokens[1]), float(tokens[2])))
            elif tag == "q":
                pair_entries.append((int(tokens[1]), int(tokens[2]), float(tokens[3])))
            else:
                raise SurrogateError(f"{path}:{line_no}: unknown record tag {tag!r}")
        except (IndexError, ValueError) as exc:
            raise SurrogateError(f"{path}:{line_no}: malformed record {line!r}") from exc
    if m is None or m < 1:
        raise SurrogateError(f"{path}: missing or invalid dimension header 'm'")

    linear = np.zeros(m)
    seen_bias = set()
    for k, v in bias_entries:
        if not 0 <= k < m:
            raise SurrogateError(f"{path}: bias index {k} out of range for m={m}")
        if k in seen_bias:
            raise SurrogateError(f"{path}: duplicate bias entry for index {k}")
        seen_bias.add(k)
        linear[k] = v
    coupling = np.zeros((m, m))
    seen_pairs = set()
    for k, l, v in pair_entries:
        if not (0 <= k < m and 0 <= l < m):
            raise SurrogateError(f"{path}: coupling index ({k}, {l}) out of range for m={m}")
        if k == l:
            raise SurrogateError(f"{path}: diagonal coupling ({k}, {k}) is not allowed")
        if k > l:
            raise SurrogateError(f"{path}: coupling ({k}, {l}) must satisfy k < l")
        if (k, l) in seen_pairs:
            raise SurrogateError(f"{path}: duplicate coupling entry for ({k}, {l})")
        seen_pairs.add((k, l))
        coupling[k, l] = v
        coupling[l, k] = v
    return QuboSurrogate(
        linear=linear, coupling=coupling, intercept=intercept, ridge_lambda=ridge_lambda
    )
