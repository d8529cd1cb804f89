"""Hot numeric kernels with numba-jitted and pure-numpy variants.

The jitted path is the default. Set ``QUBOFIT_NUMBA=0`` to force the
pure-numpy fallback (useful on platforms where numba is unavailable or
for benchmarking; see ``benchmarks/bench_kernels.py``).

All kernels take raw arrays: ``bias`` is the length-m linear coefficient
vector, ``coupling`` the m-by-m symmetric zero-diagonal pair matrix, and
codes are uint8 arrays over {0, 1}. Scores returned by kernels exclude
the surrogate intercept; callers add it.
"""

from __future__ import annotations

import math
import os

import numpy as np

NUMBA_ENV_VAR = "QUBOFIT_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(NUMBA_ENV_VAR, "1") != "0"


# ---------------------------------------------------------------------------
# Loop-style sources. These compile under numba and also run as plain Python,
# which keeps the two paths algorithmically identical where it matters
# (sequential chains); batch kernels get vectorized numpy replacements below.
# ---------------------------------------------------------------------------


def _predict_batch_loops(bias, coupling, codes, out):
    # BLAS matmuls plus an explicit row reduction; under numba this beats
    # both the scalar-loop form and the einsum fallback at every batch size
    x = codes.astype(np.float64)
    cross = np.dot(x, coupling)
    lin = np.dot(x, bias)
    n, m = codes.shape
    for i in range(n):
        s = 0.0
        for k in range(m):
            s += cross[i, k] * x[i, k]
        out[i] = lin[i] + 0.5 * s


def _flip_deltas_loops(bias, coupling, code, out):
    # out[k] = score change from flipping bit k (marginal-effect identity);
    # the l == k term is included but contributes 0 (zero diagonal).
    m = bias.shape[0]
    for k in range(m):
        acc = bias[k]
        for l in range(m):
            if code[l] == 1:
                acc += coupling[k, l]
        out[k] = acc if code[k] == 0 else -acc


def _sa_chain_loops(bias, coupling, start, bit_choices, uniforms, t0, alpha):
    """Metropolis single-bit-flip chain with geometric cooling.

    Randomness is pre-drawn (bit_choices, uniforms) so the jitted and
    plain paths consume the identical stream. Returns the best code seen,
    the final code, and the best-so-far score trace (relative scores,
    intercept excluded).
    """
    m = bias.shape[0]
    steps = bit_choices.shape[0]
    x = start.copy()
    cross = np.zeros(m)  # cross[k] = sum_l coupling[k, l] * x[l]
    score = 0.0
    for k in range(m):
        if x[k] == 1:
            score += bias[k]
    for k in range(m):
        acc = 0.0
        for l in range(m):
            if x[l] == 1:
                acc += coupling[k, l]
        cross[k] = acc
    for k in range(m):
        if x[k] == 1:
            score += 0.5 * cross[k]
    # 0.5 * x'Jx double-counts nothing: J zero-diagonal, symmetric

    best = x.copy()
    best_score = score
    trace = np.empty(steps)
    temp = t0
    for t in range(steps):
        k = bit_choices[t]
        delta = bias[k] + cross[k]
        if x[k] == 1:
            delta = -delta
        accept = delta > 0.0
        if not accept and temp > 0.0:
            accept = uniforms[t] < math.exp(delta / temp)
        if accept:
            if x[k] == 1:
                x[k] = 0
                for l in range(m):
                    cross[l] -= coupling[l, k]
            else:
                x[k] = 1
                for l in range(m):
                    cross[l] += coupling[l, k]
            score += delta
            if score > best_score:
                best_score = score
                best = x.copy()
        trace[t] = best_score
        temp *= alpha
    return best, x, trace


def _exhaustive_argmax_loops(bias, coupling):
    """Gray-code sweep over all 2^m codes; returns (best_lex, best_score).

    best_lex encodes the winning code with bit k of the code at position
    m-1-k, so integer order equals lexicographic order of code tuples and
    ties resolve to the lexicographically smallest code.
    """
    m = bias.shape[0]
    x = np.zeros(m, dtype=np.uint8)
    cross = np.zeros(m)
    score = 0.0
    lex = 0
    best_score = 0.0
    best_lex = 0
    total = 1 << m
    for i in range(1, total):
        # bit flipped between Gray(i-1) and Gray(i) is the lowest set bit of i
        k = 0
        while (i >> k) & 1 == 0:
            k += 1
        delta = bias[k] + cross[k]
        if x[k] == 1:
            delta = -delta
        if x[k] == 1:
            x[k] = 0
            lex -= 1 << (m - 1 - k)
            for l in range(m):
                cross[l] -= coupling[l, k]
        else:
            x[k] = 1
            lex += 1 << (m - 1 - k)
            for l in range(m):
                cross[l] += coupling[l, k]
        score += delta
        if score > best_score or (score == best_score and lex < best_lex):
            best_score = score
            best_lex = lex
    return best_lex, best_score


def _min_hamming_loops(queries, book, out):
    nq, m = queries.shape
    nb = book.shape[0]
    for i in range(nq):
        best = m + 1
        for j in range(nb):
            d = 0
            for k in range(m):
                if queries[i, k] != book[j, k]:
                    d += 1
                if d >= best:
                    break
            if d < best:
                best = d
                if best == 0:
                    break
        out[i] = best


# ---------------------------------------------------------------------------
# Vectorized numpy fallbacks for the batch kernels.
# ---------------------------------------------------------------------------


def _predict_batch_numpy(bias, coupling, codes, out):
    x = codes.astype(np.float64)
    out[:] = x @ bias + 0.5 * np.einsum("ij,ij->i", x @ coupling, x)


def _flip_deltas_numpy(bias, coupling, code, out):
    x = code.astype(np.float64)
    out[:] = (1.0 - 2.0 * x) * (bias + coupling @ x)


def _min_hamming_numpy(queries, book, out):
    # chunk the query axis to bound the (nq, nb, m) broadcast
    nb = book.shape[0]
    chunk = max(1, int(2_000_000 // max(1, nb * queries.shape[1])))
    for lo in range(0, queries.shape[0], chunk):
        q = queries[lo : lo + chunk]
        d = (q[:, None, :] != book[None, :, :]).sum(axis=2)
        out[lo : lo + chunk] = d.min(axis=1)


def build_kernels(use_numba: bool) -> dict:
    """Return the kernel table for one path; used by module init and benchmarks."""
    if use_numba:
        from numba import njit

        jit = njit(cache=True)
        return {
            "predict_batch": jit(_predict_batch_loops),
            "flip_deltas": jit(_flip_deltas_loops),
            "sa_chain": jit(_sa_chain_loops),
            "exhaustive_argmax": jit(_exhaustive_argmax_loops),
            "min_hamming": jit(_min_hamming_loops),
        }
    return {
        "predict_batch": _predict_batch_numpy,
        "flip_deltas": _flip_deltas_numpy,
        "sa_chain": _sa_chain_loops,
        "exhaustive_argmax": _exhaustive_argmax_loops,
        "min_hamming": _min_hamming_numpy,
    }


NUMBA_ENABLED = False
if _numba_requested():
    try:
        _table = build_kernels(use_numba=True)
        NUMBA_ENABLED = True
    except ImportError:
        _table = build_kernels(use_numba=False)
else:
    _table = build_kernels(use_numba=False)

_predict_batch = _table["predict_batch"]
_flip_deltas = _table["flip_deltas"]
_sa_chain = _table["sa_chain"]
_exhaustive_argmax = _table["exhaustive_argmax"]
_min_hamming = _table["min_hamming"]


# ---------------------------------------------------------------------------
# Public wrappers: allocate outputs, normalize dtypes.
# ---------------------------------------------------------------------------


def predict_batch_raw(bias, coupling, codes) -> np.ndarray:
    """Relative scores (no intercept) for an (n, m) uint8 code matrix."""
    codes = np.ascontiguousarray(codes, dtype=np.uint8)
    out = np.empty(codes.shape[0])
    _predict_batch(bias, coupling, codes, out)
    return out


def flip_deltas_raw(bias, coupling, code) -> np.ndarray:
    """Score change of every single-bit flip of ``code``."""
    code = np.ascontiguousarray(code, dtype=np.uint8)
    out = np.empty(bias.shape[0])
    _flip_deltas(bias, coupling, code, out)
    return out


def sa_chain_raw(bias, coupling, start, bit_choices, uniforms, t0, alpha):
    start = np.ascontiguousarray(start, dtype=np.uint8)
    bit_choices = np.ascontiguousarray(bit_choices, dtype=np.int64)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    return _sa_chain(bias, coupling, start, bit_choices, uniforms, float(t0), float(alpha))


def exhaustive_argmax_raw(bias, coupling):
    return _exhaustive_argmax(bias, coupling)


def min_hamming_raw(queries, book) -> np.ndarray:
    queries = np.ascontiguousarray(queries, dtype=np.uint8)
    book = np.ascontiguousarray(book, dtype=np.uint8)
    out = np.empty(queries.shape[0], dtype=np.int64)
    _min_hamming(queries, book, out)
    return out
