"""Bat-algorithm search over a bounded hyperparameter box (maximization).

Per iteration, each bat draws a frequency f = f_min + (f_max - f_min) * beta
with beta ~ U[0, 1], moves its velocity toward the incumbent best, and
proposes its clamped position plus velocity.  With probability
1 - pulse_rate the proposal is replaced by a local walk around the incumbent,
best + eps * mean_loudness with eps ~ U[-1, 1] per dimension.  A proposal is
accepted when it improves the bat's own fitness AND a uniform draw falls
below the bat's loudness; acceptance decays the loudness by the scaling
factor and re-raises the pulse rate on the schedule
r0 * (1 - exp(-lambda * t)).  The incumbent is updated from every evaluated
proposal, so the best fitness never decreases.

Randomness is split per bat per iteration from the master seed
(SeedSequence spawn_key = (1, iteration, bat), draw order: beta, walk gate,
walk displacement, acceptance gate), so per-bat evaluations could run
concurrently without changing any result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .classifier import Normalization, fit
from .data import Dataset, stratified_kfold
from .evaluation import fold_metrics
from .kernels import KernelFamily, KernelSpec


class FitnessEvaluationError(RuntimeError):
    """Raised when the fitness evaluator fails for some bat; the swarm state
    that was being advanced is left untouched."""

    def __init__(self, bat_index: int, cause: Exception):
        super().__init__(f"fitness evaluation failed for bat {bat_index}: {cause}")
        self.bat_index = bat_index


@dataclass(frozen=True)
class BatConfig:
    population: int = 20
    f_min: float = 0.0
    f_max: float = 2.0
    loudness_scale: float = 0.9
    initial_loudness: float = 1.0
    initial_pulse_rate: float = 0.5
    bounds: tuple = ((0.01, 1.0), (-6.0, 6.0))
    max_iters: int = 100
    patience: int = 10
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple(tuple(map(float, b)) for b in self.bounds))
        if self.population < 2:
            raise ValueError(f"population must be >= 2, got {self.population}")
        if not 0.0 <= self.f_min <= self.f_max:
            raise ValueError("need 0 <= f_min <= f_max")
        if not 0.0 < self.loudness_scale < 1.0:
            raise ValueError("loudness_scale must lie in (0, 1)")
        if self.initial_loudness <= 0.0:
            raise ValueError("initial_loudness must be > 0")
        if not 0.0 <= self.initial_pulse_rate <= 1.0:
            raise ValueError("initial_pulse_rate must lie in [0, 1]")
        if not self.bounds:
            raise ValueError("bounds must be nonempty")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ValueError(f"invalid bound [{lo}, {hi}]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.patience < 0:
            raise ValueError("patience must be >= 0")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def lows(self) -> np.ndarray:
        return np.asarray([b[0] for b in self.bounds])

    @property
    def highs(self) -> np.ndarray:
        return np.asarray([b[1] for b in self.bounds])


@dataclass
class BatSwarmState:
    positions: np.ndarray
    velocities: np.ndarray
    loudness: np.ndarray
    pulse_rate: np.ndarray
    fitness: np.ndarray
    best_position: np.ndarray
    best_fitness: float
    iteration: int = 0


@dataclass
class FitnessSpec:
    """Fitness contract: an evaluator mapping a position to a score (higher is
    better), plus the inner-CV shape used when the evaluator is built by
    :func:`cv_fitness`."""

    evaluator: Callable[[np.ndarray], float] | None = None
    folds: int = 3
    metric_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        w = tuple(float(v) for v in self.metric_weights)
        if len(w) != 3 or any(v < 0 for v in w) or not any(v > 0 for v in w):
            raise ValueError("metric_weights must be 3 nonnegative values, not all zero")
        object.__setattr__(self, "metric_weights", w)


def _bat_rng(seed: int, iteration: int, bat: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1, iteration, bat)))


def _init_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0,)))


def init_swarm(config: BatConfig, fitness: FitnessSpec) -> BatSwarmState:
    """Uniformly seed the population inside the bounds and evaluate it."""
    if fitness.evaluator is None:
        raise ValueError("fitness.evaluator is required")
    rng = _init_rng(config.seed)
    b = config.population
    positions = rng.uniform(config.lows, config.highs, size=(b, config.dim))
    fvals = np.empty(b)
    for i in range(b):
        try:
            fvals[i] = float(fitness.evaluator(positions[i]))
        except Exception as exc:
            raise FitnessEvaluationError(i, exc) from exc
    best = int(np.argmax(fvals))
    return BatSwarmState(
        positions=positions,
        velocities=np.zeros((b, config.dim)),
        loudness=np.full(b, config.initial_loudness),
        pulse_rate=np.full(b, config.initial_pulse_rate),
        fitness=fvals,
        best_position=positions[best].copy(),
        best_fitness=float(fvals[best]),
        iteration=0,
    )


def bat_step(state: BatSwarmState, config: BatConfig, fitness: FitnessSpec,
             rng: np.random.SeedSequence | None = None) -> BatSwarmState:
    """Advance the swarm one iteration; returns a new state, leaving the
    input untouched (a failing evaluator therefore aborts the step cleanly).
    """
    if fitness.evaluator is None:
        raise ValueError("fitness.evaluator is required")
    seed = rng.entropy if rng is not None else config.seed
    t = state.iteration
    mean_loudness = float(state.loudness.mean())

    positions = state.positions.copy()
    velocities = state.velocities.copy()
    loudness = state.loudness.copy()
    pulse_rate = state.pulse_rate.copy()
    fvals = state.fitness.copy()
    best_position = state.best_position.copy()
    best_fitness = state.best_fitness

    for i in range(config.population):
        gen = _bat_rng(seed, t, i)
        beta = gen.uniform()
        f_i = config.f_min + (config.f_max - config.f_min) * beta
        velocities[i] = velocities[i] + (best_position - positions[i]) * f_i
        candidate = np.clip(positions[i] + velocities[i], config.lows, config.highs)
        u_walk = gen.uniform()
        if u_walk > pulse_rate[i]:
            eps = gen.uniform(-1.0, 1.0, size=config.dim)
            candidate = np.clip(best_position + eps * mean_loudness, config.lows, config.highs)
        try:
            f_new = float(fitness.evaluator(candidate))
        except Exception as exc:
            raise FitnessEvaluationError(i, exc) from exc
        u_accept = gen.uniform()
        if f_new > fvals[i] and u_accept < loudness[i]:
            positions[i] = candidate
            fvals[i] = f_new
            loudness[i] = config.loudness_scale * loudness[i]
            pulse_rate[i] = config.initial_pulse_rate * (
                1.0 - math.exp(-config.loudness_scale * t)
            )
        if f_new > best_fitness:
            best_fitness = f_new
            best_position = candidate.copy()

    return BatSwarmState(
        positions=positions,
        velocities=velocities,
        loudness=loudness,
        pulse_rate=pulse_rate,
        fitness=fvals,
        best_position=best_position,
        best_fitness=best_fitness,
        iteration=t + 1,
    )


@dataclass
class OptimizeResult:
    best_position: np.ndarray
    best_fitness: float
    history: list[dict] = field(default_factory=list)

    def trace(self) -> list[dict]:
        """Optimization trace in the CLI's JSON layout."""
        return [
            {
                "iteration": h["iteration"],
                "best_fitness": h["best_fitness"],
                "best_position": h["best_position"],
            }
            for h in self.history
        ]


def optimize(config: BatConfig, fitness: FitnessSpec) -> OptimizeResult:
    """Run bat steps until max_iters, or until the best fitness has failed to
    improve by more than 1e-6 for ``patience`` consecutive iterations
    (patience 0 disables early stopping).  Fully reproducible from the
    config seed; the history holds one entry per iteration executed."""
    seed_seq = np.random.SeedSequence(entropy=config.seed)
    state = init_swarm(config, fitness)
    history = []
    stall = 0
    last_best = state.best_fitness
    for _ in range(config.max_iters):
        state = bat_step(state, config, fitness, seed_seq)
        history.append(
            {
                "iteration": state.iteration,
                "best_fitness": float(state.best_fitness),
                "best_position": [float(v) for v in state.best_position],
            }
        )
        if state.best_fitness > last_best + 1e-6:
            stall = 0
        else:
            stall += 1
        last_best = state.best_fitness
        if config.patience > 0 and stall >= config.patience:
            break
    return OptimizeResult(
        best_position=state.best_position.copy(),
        best_fitness=float(state.best_fitness),
        history=history,
    )


def cv_fitness(train: Dataset, kernel_family, normalization, spec: FitnessSpec,
               seed: int = 0) -> Callable[[np.ndarray], float]:
    """Build the cross-validated composite fitness for hyperparameter search.

    The returned evaluator maps a position (sigma,) or (sigma, alpha) to the
    mean over stratified inner folds of

        w1 * accuracy + w2 * AUC-ROC + w3 * F1

    computed with the dataset's minority class as the positive class.  The
    training data is folded once up front, so the evaluator is deterministic
    given (train, seed) and safe to call concurrently.  Input features are
    used as given (callers scale beforehand).  If a class has fewer samples
    than requested folds, the fold count shrinks to the smallest class count
    (never below 2); the effective value is exposed as
    ``evaluator.effective_folds``.
    """
    family = KernelFamily.parse(kernel_family)
    normalization = Normalization.parse(normalization)
    min_class = min(train.class_counts().values())
    effective_folds = max(2, min(spec.folds, min_class))
    plan = stratified_kfold(train, effective_folds, seed)
    binary = len(train.class_ids) == 2
    positive = train.minority_label if binary else None
    w_acc, w_auc, w_f1 = spec.metric_weights
    splits = [(train.subset(tr), train.subset(te)) for tr, te in plan.folds]

    def evaluator(position) -> float:
        position = np.asarray(position, dtype=float)
        sigma = float(position[0])
        alpha = float(position[1]) if position.size > 1 else 0.0
        kernel = KernelSpec(family, sigma, alpha)
        composites = []
        for fold_train, fold_test in splits:
            model = fit(fold_train, kernel, normalization)
            m = fold_metrics(model, fold_test, positive)
            value = w_acc * m["accuracy"] + w_f1 * m["f1"]
            if m["auc_roc"] is not None:
                value += w_auc * m["auc_roc"]
            composites.append(value)
        return float(np.mean(composites))

    evaluator.effective_folds = effective_folds
    return evaluator
