"""Maximize a QuboSurrogate over {0,1}^m.

Strategies: simulated annealing, genetic algorithm, greedy hill climbing,
random search, a kernel-uncertainty latent search, and an exhaustive
oracle for small m. All stochastic methods are deterministic per seed
(numpy PCG64); ties break to the lowest index or lexicographically
smallest code throughout.

Final best/start scores are recomputed through ``predict`` so results are
always consistent with the surrogate, independent of the incremental
deltas used during search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .binarization import validate_code
from .surrogate import QuboSurrogate, predict

_SCALE_PROBES = 64  # random codes used to estimate the score spread for SA


class OptimizerError(ValueError):
    pass


@dataclass(frozen=True)
class OptimizerParams:
    """Hyperparameters for all search strategies (flat for easy config mapping).

    ``sa_alpha`` and ``ga_mutation_rate``/``bo_length_scale`` default to
    None, meaning: cool geometrically to ``sa_final_temp_ratio * T0`` over
    the run, mutate each bit with probability 1/m, and use length scale
    m/4 respectively.
    """

    sa_iterations: int = 2000
    sa_t0_factor: float = 1.0  # multiplies the estimated score spread
    sa_final_temp_ratio: float = 1e-3
    sa_alpha: float | None = None
    ga_population: int = 64
    ga_generations: int = 100
    ga_tournament: int = 2
    ga_crossover_mix: float = 0.5
    ga_mutation_rate: float | None = None
    ga_elites: int = 1
    rs_samples: int = 2000
    bo_iterations: int = 200
    bo_pool: int = 256
    bo_kappa: float = 1.0
    bo_length_scale: float | None = None

    def __post_init__(self):
        if self.sa_iterations < 1 or self.rs_samples < 1 or self.bo_iterations < 1:
            raise OptimizerError("iteration/sample counts must be >= 1")
        if self.ga_population < 1 or self.ga_tournament < 1:
            raise OptimizerError("population and tournament size must be >= 1")
        if self.ga_generations < 0 or self.ga_elites < 0 or self.bo_pool < 0:
            raise OptimizerError("generations, elites, and pool size must be >= 0")
        if self.ga_elites > self.ga_population:
            raise OptimizerError("elite count cannot exceed the population")
        if self.sa_t0_factor <= 0:
            raise OptimizerError("sa_t0_factor must be > 0")
        if not 0.0 < self.sa_final_temp_ratio < 1.0:
            raise OptimizerError("sa_final_temp_ratio must be in (0, 1)")
        if self.sa_alpha is not None and not 0.0 < self.sa_alpha < 1.0:
            raise OptimizerError("sa_alpha must be in (0, 1)")
        for name in ("ga_crossover_mix", "ga_mutation_rate"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise OptimizerError(f"{name} must be in [0, 1]")
        if self.bo_kappa < 0:
            raise OptimizerError("bo_kappa must be >= 0")
        if self.bo_length_scale is not None and self.bo_length_scale <= 0:
            raise OptimizerError("bo_length_scale must be > 0")


@dataclass(frozen=True)
class OptimizationResult:
    best_code: np.ndarray
    best_score: float
    start_code: np.ndarray
    start_score: float
    improvement: float
    evaluations: int
    trace: list[tuple[int, float]] | None = None


def _finalize(q, best_code, start_code, evaluations, trace_rows):
    best_score = predict(q, best_code)
    start_score = predict(q, start_code)
    if best_score < start_score:
        # the start is always in the visited set; incremental-score drift
        # must not leave the reported best below it
        best_code, best_score = start_code, start_score
    return OptimizationResult(
        best_code=np.ascontiguousarray(best_code, dtype=np.uint8),
        best_score=best_score,
        start_code=np.ascontiguousarray(start_code, dtype=np.uint8),
        start_score=start_score,
        improvement=best_score - start_score,
        evaluations=int(evaluations),
        trace=trace_rows,
    )


def _score_spread(q, rng) -> float:
    """Std of predictions over random codes; sets the SA temperature scale."""
    probes = rng.integers(0, 2, size=(_SCALE_PROBES, q.dim), dtype=np.uint8)
    spread = float(np.std(kernels.predict_batch_raw(q.linear, q.coupling, probes)))
    return spread if spread > 0.0 else 1.0


def simulated_annealing(
    q: QuboSurrogate, start, params: OptimizerParams | None = None, seed: int = 0, trace: bool = False
) -> OptimizationResult:
    """Metropolis single-bit-flip search with geometric cooling.

    Each step proposes a uniformly random bit flip; improving moves are
    always accepted, worsening moves with probability exp(delta / T). The
    initial temperature is ``sa_t0_factor`` times the estimated score
    spread, and the best code ever visited is returned.
    """
    p = params or OptimizerParams()
    start = validate_code(start, q.dim)
    rng = np.random.default_rng(seed)
    t0 = p.sa_t0_factor * _score_spread(q, rng)
    alpha = p.sa_alpha if p.sa_alpha is not None else p.sa_final_temp_ratio ** (1.0 / p.sa_iterations)
    bits = rng.integers(0, q.dim, size=p.sa_iterations)
    uniforms = rng.random(p.sa_iterations)
    best, _final, rel_trace = kernels.sa_chain_raw(
        q.linear, q.coupling, start, bits, uniforms, t0, alpha
    )
    rows = None
    if trace:
        rows = [(t + 1, q.intercept + v) for t, v in enumerate(rel_trace)]
    return _finalize(q, best, start, _SCALE_PROBES + 1 + p.sa_iterations, rows)


def genetic_algorithm(
    q: QuboSurrogate,
    seed_population=None,
    params: OptimizerParams | None = None,
    seed: int = 0,
    trace: bool = False,
) -> OptimizationResult:
    """Elitist GA with tournament selection, uniform crossover, bit mutation.

    The population starts from ``seed_population`` (if given) padded with
    uniform random codes. The reported start is the best of the initial
    population; the result is the best individual ever evaluated.
    """
    p = params or OptimizerParams()
    m = q.dim
    rng = np.random.default_rng(seed)
    mut_rate = p.ga_mutation_rate if p.ga_mutation_rate is not None else 1.0 / m

    pop = np.empty((p.ga_population, m), dtype=np.uint8)
    seeded = [validate_code(c, m) for c in (seed_population or [])][: p.ga_population]
    if seeded:
        pop[: len(seeded)] = np.array(seeded)
    if len(seeded) < p.ga_population:
        pop[len(seeded) :] = rng.integers(0, 2, size=(p.ga_population - len(seeded), m), dtype=np.uint8)

    scores = kernels.predict_batch_raw(q.linear, q.coupling, pop)
    evaluations = p.ga_population
    start = pop[int(np.argmax(scores))].copy()
    best = start.copy()
    best_rel = float(scores.max())
    rows = [(0, q.intercept + best_rel)] if trace else None

    n_children = p.ga_population - p.ga_elites
    for gen in range(1, p.ga_generations + 1):
        elite_idx = np.argsort(-scores, kind="stable")[: p.ga_elites]
        cand = rng.integers(0, p.ga_population, size=(n_children, 2, p.ga_tournament))
        win = np.argmax(scores[cand], axis=2)
        parents = np.take_along_axis(cand, win[..., None], axis=2)[..., 0]
        pa = pop[parents[:, 0]]
        pb = pop[parents[:, 1]]
        mix = rng.random((n_children, m)) < p.ga_crossover_mix
        children = np.where(mix, pb, pa).astype(np.uint8)
        children ^= (rng.random((n_children, m)) < mut_rate).astype(np.uint8)
        pop = np.concatenate([pop[elite_idx], children], axis=0)
        scores = kernels.predict_batch_raw(q.linear, q.coupling, pop)
        evaluations += p.ga_population
        gen_best = float(scores.max())
        if gen_best > best_rel:
            best_rel = gen_best
            best = pop[int(np.argmax(scores))].copy()
        if trace:
            rows.append((gen, q.intercept + best_rel))
    return _finalize(q, best, start, evaluations, rows)


def greedy_hill_climb(q: QuboSurrogate, start, trace: bool = False) -> OptimizationResult:
    """Repeatedly apply the best strictly improving single-bit flip.

    Fully deterministic; stops at a 1-flip local optimum. Ties among
    equally improving flips go to the lowest bit index.
    """
    x = validate_code(start, q.dim).copy()
    rows = [] if trace else None
    evaluations = 1
    sweep = 0
    while True:
        deltas = kernels.flip_deltas_raw(q.linear, q.coupling, x)
        evaluations += q.dim
        k = int(np.argmax(deltas))
        if deltas[k] <= 0.0:
            break
        x[k] ^= 1
        sweep += 1
        if trace:
            rows.append((sweep, predict(q, x)))
    return _finalize(q, x, start, evaluations, rows)


def random_search(q: QuboSurrogate, n: int = 2000, seed: int = 0, trace: bool = False) -> OptimizationResult:
    """Evaluate n uniform random codes; the first sample is the start."""
    if n < 1:
        raise OptimizerError(f"need at least one sample, got {n}")
    rng = np.random.default_rng(seed)
    codes = rng.integers(0, 2, size=(n, q.dim), dtype=np.uint8)
    scores = kernels.predict_batch_raw(q.linear, q.coupling, codes)
    best_idx = int(np.argmax(scores))
    rows = None
    if trace:
        rows = [(i + 1, q.intercept + v) for i, v in enumerate(np.maximum.accumulate(scores))]
    return _finalize(q, codes[best_idx], codes[0], n, rows)


def exploration_bonus(min_hamming, length_scale: float) -> np.ndarray:
    """Kernel uncertainty 1 - exp(-d_H / ell) given nearest evaluated distance."""
    return 1.0 - np.exp(-np.asarray(min_hamming, dtype=np.float64) / length_scale)


def latent_bo(
    q: QuboSurrogate,
    observed=None,
    params: OptimizerParams | None = None,
    seed: int = 0,
    trace: bool = False,
) -> OptimizationResult:
    """Acquisition search: surrogate score plus a kernel uncertainty bonus.

    Keeps an evaluated set E (the observed codes plus one random code);
    each iteration scores a pool of random codes and 1-flip neighbors of
    the incumbent by ``predict + kappa * (1 - exp(-d_H(x, E) / ell))`` and
    evaluates the acquisition maximizer. Returns the best evaluated code.
    """
    p = params or OptimizerParams()
    m = q.dim
    ell = p.bo_length_scale if p.bo_length_scale is not None else m / 4.0
    rng = np.random.default_rng(seed)

    evaluated = [validate_code(c, m) for c in (observed or [])]
    evaluated.append(rng.integers(0, 2, size=m, dtype=np.uint8))
    e_codes = np.array(evaluated, dtype=np.uint8)
    e_scores = kernels.predict_batch_raw(q.linear, q.coupling, e_codes)
    evaluations = len(evaluated)

    start = e_codes[0].copy()
    best_idx = int(np.argmax(e_scores))
    best = e_codes[best_idx].copy()
    best_rel = float(e_scores[best_idx])
    rows = [(0, q.intercept + best_rel)] if trace else None

    for it in range(1, p.bo_iterations + 1):
        neighbors = np.repeat(best[None, :], m, axis=0)
        neighbors[np.arange(m), np.arange(m)] ^= 1
        pool = np.concatenate(
            [rng.integers(0, 2, size=(p.bo_pool, m), dtype=np.uint8), neighbors], axis=0
        )
        pool_scores = kernels.predict_batch_raw(q.linear, q.coupling, pool)
        evaluations += pool.shape[0]
        bonus = exploration_bonus(kernels.min_hamming_raw(pool, e_codes), ell)
        pick = int(np.argmax(pool_scores + p.bo_kappa * bonus))
        e_codes = np.concatenate([e_codes, pool[pick : pick + 1]], axis=0)
        if pool_scores[pick] > best_rel:
            best_rel = float(pool_scores[pick])
            best = pool[pick].copy()
        if trace:
            rows.append((it, q.intercept + best_rel))
    return _finalize(q, best, start, evaluations, rows)


def brute_force(q: QuboSurrogate) -> OptimizationResult:
    """Exact argmax by enumerating all 2^m codes (lowest lexicographic on ties).

    The start is the all-zeros code, where enumeration begins. Guarded to
    m <= 24.
    """
    if q.dim > 24:
        raise OptimizerError(f"brute force is limited to m <= 24, got m={q.dim}")
    best_lex, _rel = kernels.exhaustive_argmax_raw(q.linear, q.coupling)
    code = np.array([(best_lex >> (q.dim - 1 - k)) & 1 for k in range(q.dim)], dtype=np.uint8)
    zeros = np.zeros(q.dim, dtype=np.uint8)
    return _finalize(q, code, zeros, 2**q.dim, None)


METHODS = ("sa", "ga", "greedy", "random", "bo", "brute")


def run_method(
    method: str,
    q: QuboSurrogate,
    start,
    params: OptimizerParams | None = None,
    seed: int = 0,
    trace: bool = False,
) -> OptimizationResult:
    """Dispatch a named method from a shared start code (harness entry point).

    The start seeds SA and greedy directly, the GA initial population, and
    the evaluated set of the kernel-uncertainty search; random and brute
    ignore it.
    """
    p = params or OptimizerParams()
    if method == "sa":
        return simulated_annealing(q, start, p, seed, trace)
    if method == "ga":
        return genetic_algorithm(q, [start], p, seed, trace)
    if method == "greedy":
        return greedy_hill_climb(q, start, trace)
    if method == "random":
        return random_search(q, p.rs_samples, seed, trace)
    if method == "bo":
        return latent_bo(q, [start], p, seed, trace)
    if method == "brute":
        return brute_force(q)
    raise OptimizerError(f"unknown method {method!r}; expected one of {METHODS}")
