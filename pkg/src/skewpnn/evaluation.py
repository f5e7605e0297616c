"""Classification metrics and the cross-validated benchmarking harness.

Binary metrics treat the dataset's minority label as the positive class.
Multiclass F1 is an unweighted macro average; multiclass AUC-ROC is an
unweighted macro one-vs-rest average that skips classes absent from the test
fold.  AUC-ROC is computed from the Mann-Whitney rank statistic, with tied
score pairs contributing one half.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .classifier import Normalization, fit, predict_proba
from .data import Dataset, apply_zscore, fit_zscore, stratified_kfold
from .kernels import KernelFamily, KernelSpec, SkewNormalParams, skew_normal_pdf


def accuracy(y_true, y_pred) -> float:
    """Fraction of exact matches."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred must have equal length")
    if y_true.size == 0:
        raise ValueError("empty input")
    return float(np.mean(y_true == y_pred))


def _binary_f1(y_true: np.ndarray, y_pred: np.ndarray, positive) -> float:
    tp = int(np.sum((y_true == positive) & (y_pred == positive)))
    fp = int(np.sum((y_true != positive) & (y_pred == positive)))
    fn = int(np.sum((y_true == positive) & (y_pred != positive)))
    if tp == 0:
        return 1.0 if fp == 0 and fn == 0 else 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2.0 * precision * recall / (precision + recall)


def f1_score(y_true, y_pred, positive_class=None) -> float:
    """F1 = 2PR / (P + R) for the positive class; with ``positive_class``
    omitted, the unweighted macro average over all observed classes.

    A class with no true and no predicted members scores 1; a class with
    members but no true positives scores 0.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred must have equal length")
    if positive_class is not None:
        labels = set(np.unique(y_true)) | set(np.unique(y_pred))
        if positive_class not in labels:
            raise ValueError(f"positive_class {positive_class!r} not in the label set")
        return _binary_f1(y_true, y_pred, positive_class)
    classes = sorted(set(np.unique(y_true)) | set(np.unique(y_pred)))
    return float(np.mean([_binary_f1(y_true, y_pred, c) for c in classes]))


def _binary_auc(y_true: np.ndarray, scores: np.ndarray, positive) -> float | None:
    pos_mask = y_true == positive
    n_pos = int(pos_mask.sum())
    n_neg = int(y_true.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(scores, method="average")
    rank_sum = float(ranks[pos_mask].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def auc_roc(y_true, scores, positive_class=None, class_ids=None) -> float | None:
    """Area under the ROC curve via the rank (Mann-Whitney) statistic.

    With 1-D ``scores``, computes the binary AUC for ``positive_class``;
    returns ``None`` when either class is absent (undefined, to be excluded
    from aggregation).  With 2-D ``scores`` (one probability column per entry
    of ``class_ids``), computes the macro one-vs-rest average, skipping
    classes that are absent or universal in ``y_true``.
    """
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=float)
    if scores.ndim == 1:
        if y_true.shape != scores.shape:
            raise ValueError("y_true and scores must have equal length")
        if positive_class is None:
            raise ValueError("positive_class is required for 1-D scores")
        return _binary_auc(y_true, scores, positive_class)
    if scores.ndim != 2 or scores.shape[0] != y_true.shape[0]:
        raise ValueError("2-D scores must have one row per sample")
    if class_ids is None:
        class_ids = sorted(np.unique(y_true))
    if len(class_ids) != scores.shape[1]:
        raise ValueError("class_ids must match the score columns")
    parts = []
    for j, c in enumerate(class_ids):
        a = _binary_auc(y_true, scores[:, j], c)
        if a is not None:
            parts.append(a)
    return float(np.mean(parts)) if parts else None


@dataclass
class ModelSpec:
    """What to train in each cross-validation fold.

    With ``tune=False`` the kernel parameters are fixed.  With ``tune=True``
    a bat-algorithm search over sigma (and alpha for the skew-normal family)
    is run inside each training fold, using an inner cross-validated
    composite fitness.
    """

    name: str
    family: KernelFamily
    normalization: Normalization = Normalization.PER_CLASS_AVERAGE
    sigma: float = 0.2
    alpha: float = 0.0
    tune: bool = False
    sigma_bounds: tuple[float, float] = (0.01, 1.0)
    alpha_bounds: tuple[float, float] = (-6.0, 6.0)
    bats: int = 8
    iters: int = 15
    patience: int = 5
    inner_folds: int = 3
    metric_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        self.family = KernelFamily.parse(self.family)
        self.normalization = Normalization.parse(self.normalization)


@dataclass
class EvalReport:
    """Per-fold and aggregate metrics for one (model, dataset) pair.

    Aggregates are arithmetic means and population standard deviations over
    the folds where the metric is defined (undefined AUC folds are recorded
    as null and excluded).
    """

    model_name: str
    dataset_name: str
    per_fold: list[dict]
    mean: dict
    std: dict
    n_defined: dict
    kernel: dict
    normalization: str
    seeds: dict
    k: int
    positive_class: int | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "eval-report",
            "model_name": self.model_name,
            "dataset_name": self.dataset_name,
            "k": self.k,
            "per_fold": self.per_fold,
            "mean": self.mean,
            "std": self.std,
            "n_defined": self.n_defined,
            "kernel": self.kernel,
            "normalization": self.normalization,
            "seeds": self.seeds,
            "positive_class": self.positive_class,
            "metadata": self.metadata,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, doc: dict) -> "EvalReport":
        if doc.get("kind") != "eval-report":
            raise ValueError("not an eval-report document")
        return cls(
            model_name=doc["model_name"],
            dataset_name=doc["dataset_name"],
            per_fold=doc["per_fold"],
            mean=doc["mean"],
            std=doc["std"],
            n_defined=doc["n_defined"],
            kernel=doc["kernel"],
            normalization=doc["normalization"],
            seeds=doc["seeds"],
            k=doc["k"],
            positive_class=doc.get("positive_class"),
            metadata=doc.get("metadata", {}),
        )


METRIC_NAMES = ("accuracy", "f1", "auc_roc")


def _aggregate(per_fold: list[dict]) -> tuple[dict, dict, dict]:
    mean, std, n_defined = {}, {}, {}
    for m in METRIC_NAMES:
        vals = [f[m] for f in per_fold if f[m] is not None]
        n_defined[m] = len(vals)
        if vals:
            arr = np.asarray(vals, dtype=float)
            mean[m] = float(arr.mean())
            std[m] = float(arr.std())
        else:
            mean[m] = None
            std[m] = None
    return mean, std, n_defined


def fold_metrics(model, test: Dataset, positive_class: int | None) -> dict:
    """Accuracy, F1 and AUC-ROC of ``model`` on a test split.

    Binary problems score the minority (positive) class probability;
    multiclass problems use macro averages over the model's class ids.
    """
    results = [predict_proba(model, x) for x in test.X]
    y_pred = np.asarray([r.predicted for r in results])
    prob_matrix = np.vstack([r.probabilities for r in results])
    acc = accuracy(test.y, y_pred)
    if positive_class is not None and len(model.class_ids) == 2:
        col = model.class_ids.index(positive_class)
        f1 = f1_score(test.y, y_pred, positive_class)
        auc = auc_roc(test.y, prob_matrix[:, col], positive_class)
    else:
        f1 = f1_score(test.y, y_pred)
        auc = auc_roc(test.y, prob_matrix, class_ids=model.class_ids)
    return {"accuracy": acc, "f1": f1, "auc_roc": auc}


def _fit_fold_model(train: Dataset, spec: ModelSpec, fold_seed: int):
    """Fit (optionally tuning first) on an already scaled training fold."""
    if not spec.tune:
        kernel = KernelSpec(spec.family, spec.sigma, spec.alpha)
        return fit(train, kernel, spec.normalization), {"sigma": spec.sigma, "alpha": spec.alpha}
    from .bat import BatConfig, FitnessSpec, cv_fitness, optimize

    bounds = [tuple(spec.sigma_bounds)]
    if spec.family is KernelFamily.SKEW_NORMAL:
        bounds.append(tuple(spec.alpha_bounds))
    fitness_spec = FitnessSpec(folds=spec.inner_folds, metric_weights=spec.metric_weights)
    evaluator = cv_fitness(train, spec.family, spec.normalization, fitness_spec, seed=fold_seed)
    config = BatConfig(
        population=spec.bats,
        bounds=bounds,
        max_iters=spec.iters,
        patience=spec.patience,
        seed=fold_seed,
    )
    result = optimize(config, FitnessSpec(evaluator=evaluator,
                                          folds=fitness_spec.folds,
                                          metric_weights=spec.metric_weights))
    sigma = float(result.best_position[0])
    alpha = float(result.best_position[1]) if len(result.best_position) > 1 else 0.0
    kernel = KernelSpec(spec.family, sigma, alpha)
    return fit(train, kernel, spec.normalization), {"sigma": sigma, "alpha": alpha}


def cross_validated_eval(data: Dataset, spec: ModelSpec, k: int, seed: int = 0) -> EvalReport:
    """k-fold protocol: per fold, z-score statistics are fit on the training
    split and applied to both sides (no leakage), the model is fit or tuned
    on the scaled training split, and metrics are taken on the scaled test
    split.  Deterministic given (data, spec, k, seed)."""
    plan = stratified_kfold(data, k, seed)
    binary = len(data.class_ids) == 2
    positive = data.minority_label if binary else None
    per_fold = []
    for fold_idx, (train_idx, test_idx) in enumerate(plan.folds):
        train = data.subset(train_idx)
        test = data.subset(test_idx)
        norm = fit_zscore(train)
        train_z = apply_zscore(norm, train)
        test_z = apply_zscore(norm, test)
        fold_seed = int(np.random.SeedSequence((seed, fold_idx)).generate_state(1)[0])
        model, params = _fit_fold_model(train_z, spec, fold_seed)
        entry = fold_metrics(model, test_z, positive)
        entry["fold"] = fold_idx
        if spec.tune:
            entry["tuned"] = params
        per_fold.append(entry)
    mean, std, n_defined = _aggregate(per_fold)
    kernel_doc = {
        "family": spec.family.value,
        "sigma": None if spec.tune else spec.sigma,
        "alpha": None if spec.tune else spec.alpha,
        "tuned": spec.tune,
    }
    return EvalReport(
        model_name=spec.name,
        dataset_name=data.name,
        per_fold=per_fold,
        mean=mean,
        std=std,
        n_defined=n_defined,
        kernel=kernel_doc,
        normalization=spec.normalization.value,
        seeds={"fold_seed": seed},
        k=plan.k,
        positive_class=positive,
        metadata={
            "std_kind": "population",
            "positive_class_rule": "minority" if binary else "macro",
            "multiclass_auc": "macro-one-vs-rest",
        },
    )


def sample_skew_normal(n: int, alpha: float, seed, xi: float = 0.0, sigma: float = 1.0,
                       grid_points: int = 8001) -> np.ndarray:
    """Draw skew-normal variates by inverse-CDF interpolation on a tabulated
    grid spanning +/- 10 scale units around the location."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    grid = np.linspace(xi - 10.0 * sigma, xi + 10.0 * sigma, grid_points)
    pdf = skew_normal_pdf(grid, SkewNormalParams(xi, sigma, alpha))
    steps = np.diff(grid)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * steps)])
    cdf /= cdf[-1]
    u = rng.uniform(size=int(n))
    return np.interp(u, cdf, grid)
