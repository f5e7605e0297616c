"""Four-layer kernel-density classifier over stored training samples.

Fitting is a single pass that groups the training rows by class; prediction
evaluates the kernel on the Euclidean distances from the query to every
stored sample (pattern layer), aggregates them per class (summation layer)
and picks the class with the highest posterior (output layer).

Two summation-layer normalizations are supported and can disagree on
imbalanced data, which is expected behavior rather than a bug:

* ``per-class-average`` (default): score_c = mean of kernel values in class c
* ``total-sum``: score_c = sum of kernel values in class c; dividing by the
  grand total yields true posterior probabilities
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import Dataset, Normalizer
from .kernels import KernelFamily, KernelSpec, SkewNormalParams, skew_normal_pdf

_SQRT2PI = math.sqrt(2.0 * math.pi)


class Normalization(str, Enum):
    PER_CLASS_AVERAGE = "per-class-average"
    TOTAL_SUM = "total-sum"

    @classmethod
    def parse(cls, value) -> "Normalization":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        if key in ("per-class-average", "average", "class-average", "mean"):
            return cls.PER_CLASS_AVERAGE
        if key in ("total-sum", "total", "sum"):
            return cls.TOTAL_SUM
        raise ValueError(f"unknown normalization mode: {value!r}")


@dataclass
class PredictionResult:
    """Per-class probabilities, raw summation-layer scores and the winner.

    ``degenerate`` marks queries where every kernel evaluation underflowed to
    zero; the probabilities are then uniform.
    """

    probabilities: np.ndarray
    predicted: int
    scores: np.ndarray
    degenerate: bool = False


@dataclass
class TrainedPNN:
    """Fitted classifier: stored samples grouped by class plus the kernel.

    Immutable after :func:`fit`; predictions are pure reads.  ``class_ids``
    are in ascending label order, fixing the layout of every probability
    vector.
    """

    samples_by_class: list[np.ndarray]
    kernel: KernelSpec
    normalization: Normalization
    class_ids: list[int]
    dim: int

    def predict_proba(self, x) -> PredictionResult:
        return predict_proba(self, x)

    def predict_batch(self, X) -> list[PredictionResult]:
        return predict_batch(self, X)


def fit(data: Dataset, kernel: KernelSpec, normalization=Normalization.PER_CLASS_AVERAGE) -> TrainedPNN:
    """Store the training rows grouped by class; no iterative optimization.

    Requires at least two classes and finite features.
    """
    normalization = Normalization.parse(normalization)
    class_ids = data.class_ids
    if len(class_ids) < 2:
        raise ValueError(f"need at least 2 classes to fit, got {len(class_ids)}")
    samples = [data.X[data.y == c].copy() for c in class_ids]
    return TrainedPNN(
        samples_by_class=samples,
        kernel=kernel,
        normalization=normalization,
        class_ids=class_ids,
        dim=data.n_features,
    )


def _check_vector(model: TrainedPNN, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.dim:
        raise ValueError(f"expected a feature vector of length {model.dim}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("feature vector must be finite")
    return x


def class_scores(model: TrainedPNN, x) -> np.ndarray:
    """Summation-layer values for ``x``: per-class kernel sums (total-sum
    mode) or means (per-class-average mode), ordered by ``class_ids``."""
    x = _check_vector(model, x)
    scores = np.empty(len(model.class_ids))
    for i, samples in enumerate(model.samples_by_class):
        diff = samples - x
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        k = model.kernel.evaluate(dist)
        scores[i] = k.mean() if model.normalization is Normalization.PER_CLASS_AVERAGE else k.sum()
    return scores


def predict_proba(model: TrainedPNN, x) -> PredictionResult:
    """Normalize the summation-layer scores to a distribution and take the
    argmax (ties resolved toward the lowest class id).

    If every kernel value underflowed to zero the result is flagged
    degenerate and the distribution is uniform.
    """
    scores = class_scores(model, x)
    total = scores.sum()
    if total == 0.0:
        probs = np.full(len(scores), 1.0 / len(scores))
        return PredictionResult(
            probabilities=probs,
            predicted=model.class_ids[0],
            scores=scores,
            degenerate=True,
        )
    probs = scores / total
    return PredictionResult(
        probabilities=probs,
        predicted=model.class_ids[int(np.argmax(probs))],
        scores=scores,
    )


def predict_batch(model: TrainedPNN, X) -> list[PredictionResult]:
    """Element-wise :func:`predict_proba` over the rows of ``X``,
    order-preserving and identical to per-point calls."""
    results = []
    for i, row in enumerate(X):
        row = np.asarray(row, dtype=float)
        if row.ndim != 1 or row.shape[0] != model.dim:
            raise ValueError(
                f"row {i}: expected a feature vector of length {model.dim}, got shape {row.shape}"
            )
        results.append(predict_proba(model, row))
    return results


def parzen_density(samples, x, bandwidth, kernel: KernelSpec) -> float:
    """Univariate kernel density estimate

        f_n(x) = 1 / (n h) * sum_i K((x - x_i) / h)

    where K is the skew-normal density with xi = 0, sigma = 1 for the
    skew-normal family, or the standard normal density for the Gaussian
    family.  The kernel spec's sigma is a classification knob and plays no
    role here; the bandwidth ``h`` is the only smoothing parameter.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size == 0:
        raise ValueError("samples must be a nonempty 1-D sequence")
    h = float(bandwidth)
    if not math.isfinite(h) or h <= 0.0:
        raise ValueError(f"bandwidth must be finite and > 0, got {h}")
    u = (float(x) - samples) / h
    if kernel.family is KernelFamily.SKEW_NORMAL:
        k = skew_normal_pdf(u, SkewNormalParams(0.0, 1.0, kernel.alpha))
    else:
        k = np.exp(-0.5 * u * u) / _SQRT2PI
    return float(np.sum(k) / (samples.size * h))


MODEL_SCHEMA_VERSION = 1


def model_to_dict(model: TrainedPNN, normalizer: Normalizer | None = None) -> dict:
    """Self-describing JSON document for the CLI's fit/predict split."""
    doc = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "kind": "pnn-model",
        "kernel": model.kernel.to_dict(),
        "normalization": model.normalization.value,
        "class_ids": list(model.class_ids),
        "dim": model.dim,
        "samples_by_class": {
            str(c): samples.tolist()
            for c, samples in zip(model.class_ids, model.samples_by_class)
        },
        "normalizer": normalizer.to_dict() if normalizer is not None else None,
    }
    return doc


def model_from_dict(doc: dict) -> tuple[TrainedPNN, Normalizer | None]:
    if doc.get("kind") != "pnn-model":
        raise ValueError("not a pnn-model document")
    if doc.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema version {doc.get('schema_version')}")
    class_ids = [int(c) for c in doc["class_ids"]]
    model = TrainedPNN(
        samples_by_class=[np.asarray(doc["samples_by_class"][str(c)], dtype=float) for c in class_ids],
        kernel=KernelSpec.from_dict(doc["kernel"]),
        normalization=Normalization.parse(doc["normalization"]),
        class_ids=class_ids,
        dim=int(doc["dim"]),
    )
    norm = Normalizer.from_dict(doc["normalizer"]) if doc.get("normalizer") else None
    return model, norm
