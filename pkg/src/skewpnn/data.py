"""Dataset container, CSV I/O, z-score scaling, splits and synthetic shapes.

Every randomized operation is a pure function of its inputs and an integer
seed, so repeated runs are reproducible byte for byte.
"""

from __future__ import annotations

import csv
import os
import warnings
from dataclasses import dataclass

import numpy as np


class DataError(ValueError):
    """Raised for unreadable, malformed or empty input data files."""


@dataclass
class Dataset:
    """Feature matrix plus integer class labels.

    ``minority_label`` is fixed when the dataset is loaded or generated (the
    least frequent label, ties broken toward the larger label id) and is
    carried through splits so that downstream metrics keep a stable positive
    class.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] | None = None
    label_map: dict[str, int] | None = None
    minority_label: int | None = None
    name: str = "data"

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if self.X.ndim != 2:
            raise ValueError(f"X must be 2-D, got shape {self.X.shape}")
        if self.y.shape != (self.X.shape[0],):
            raise ValueError("y must have one label per row of X")
        if self.X.shape[0] < 1:
            raise ValueError("dataset must contain at least one sample")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("feature values must be finite")
        if self.minority_label is None:
            self.minority_label = _minority_label(self.y)

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def class_ids(self) -> list[int]:
        return sorted(int(c) for c in np.unique(self.y))

    def class_counts(self) -> dict[int, int]:
        ids, counts = np.unique(self.y, return_counts=True)
        return {int(c): int(n) for c, n in zip(ids, counts)}

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return Dataset(
            X=self.X[idx].copy(),
            y=self.y[idx].copy(),
            feature_names=self.feature_names,
            label_map=self.label_map,
            minority_label=self.minority_label,
            name=self.name,
        )


def _minority_label(y: np.ndarray) -> int:
    ids, counts = np.unique(y, return_counts=True)
    smallest = counts.min()
    return int(max(ids[counts == smallest]))


def load_csv(path, label_column="label", has_header: bool = True) -> Dataset:
    """Load a comma-separated dataset.

    ``label_column`` is a column name when the file has a header, otherwise a
    zero-based column index (negative indices count from the end).  Label
    values that all parse as integers are used verbatim; any other values are
    mapped to dense integer ids in first-appearance order and the mapping is
    recorded in ``label_map``.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: file is empty")

    header = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path}: no data rows after header")

    ncols = len(rows[0])
    if header is not None:
        if isinstance(label_column, int):
            label_idx = label_column % ncols
        else:
            if label_column not in header:
                raise DataError(f"{path}: label column {label_column!r} not in header {header}")
            label_idx = header.index(label_column)
    else:
        if not isinstance(label_column, int):
            raise DataError("label_column must be an integer index when the file has no header")
        label_idx = label_column % ncols

    features, raw_labels = [], []
    for r, row in enumerate(rows):
        if len(row) != ncols:
            raise DataError(f"{path}: row {r} has {len(row)} cells, expected {ncols}")
        vals = []
        for c, cell in enumerate(row):
            if c == label_idx:
                continue
            colname = header[c] if header else str(c)
            text = cell.strip()
            try:
                v = float(text)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric value {text!r} at row {r}, column {colname}"
                ) from None
            if not np.isfinite(v):
                raise DataError(f"{path}: non-finite value {text!r} at row {r}, column {colname}")
            vals.append(v)
        features.append(vals)
        raw_labels.append(row[label_idx].strip())

    try:
        y = [int(lbl) for lbl in raw_labels]
        label_map = {str(v): v for v in sorted(set(y))}
    except ValueError:
        label_map = {}
        for lbl in raw_labels:
            if lbl not in label_map:
                label_map[lbl] = len(label_map)
        y = [label_map[lbl] for lbl in raw_labels]

    feature_names = None
    if header is not None:
        feature_names = [h for i, h in enumerate(header) if i != label_idx]
    return Dataset(
        X=np.asarray(features, dtype=float),
        y=np.asarray(y, dtype=int),
        feature_names=feature_names,
        label_map=label_map,
        name=os.path.splitext(os.path.basename(str(path)))[0],
    )


def save_csv(data: Dataset, path, label_column: str = "label") -> None:
    """Write a dataset back to the CSV dialect accepted by :func:`load_csv`.

    Floats are written with ``repr`` so a save/load round trip is exact.
    """
    names = data.feature_names or [f"f{i}" for i in range(data.n_features)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + [label_column])
        for row, label in zip(data.X, data.y):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


@dataclass
class Normalizer:
    """Per-feature z-score statistics (population standard deviation).

    Zero-variance features are mapped to zero rather than dividing by zero.
    """

    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        self.means = np.asarray(self.means, dtype=float)
        self.stds = np.asarray(self.stds, dtype=float)
        if self.means.shape != self.stds.shape or self.means.ndim != 1:
            raise ValueError("means and stds must be 1-D arrays of equal length")
        if np.any(self.stds < 0):
            raise ValueError("stds must be nonnegative")

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.means.shape[0]:
            raise ValueError(
                f"dimension mismatch: normalizer has {self.means.shape[0]} features, "
                f"data has {X.shape[-1]}"
            )
        safe = np.where(self.stds == 0.0, 1.0, self.stds)
        z = (X - self.means) / safe
        return np.where(self.stds == 0.0, 0.0, z)

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "stds": self.stds.tolist(),
            "std_kind": "population",
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Normalizer":
        return cls(means=np.asarray(d["means"]), stds=np.asarray(d["stds"]))


def fit_zscore(train: Dataset) -> Normalizer:
    """Compute z-score statistics on the training split only (no leakage)."""
    return Normalizer(means=train.X.mean(axis=0), stds=train.X.std(axis=0))


def apply_zscore(norm: Normalizer, data: Dataset) -> Dataset:
    return Dataset(
        X=norm.transform(data.X),
        y=data.y.copy(),
        feature_names=data.feature_names,
        label_map=data.label_map,
        minority_label=data.minority_label,
        name=data.name,
    )


@dataclass
class FoldPlan:
    """Cross-validation folds: (train_indices, test_indices) pairs whose test
    sets partition [0, N)."""

    folds: list[tuple[np.ndarray, np.ndarray]]
    seed: int
    stratified: bool = True

    @property
    def k(self) -> int:
        return len(self.folds)


def stratified_kfold(data: Dataset, k: int, seed: int = 0) -> FoldPlan:
    """Stratified k-fold plan via per-class round-robin after a seeded shuffle.

    A single fold cursor continues across classes (taken in ascending label
    order), so per-class fold sizes differ by at most one and k = N degrades
    to a leave-one-out partition.
    """
    k = int(k)
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > data.n_samples:
        raise ValueError(f"k = {k} exceeds the number of samples {data.n_samples}")
    rng = np.random.default_rng(seed)
    assignment = np.empty(data.n_samples, dtype=int)
    cursor = 0
    for c in data.class_ids:
        idx = np.flatnonzero(data.y == c)
        for i in rng.permutation(idx):
            assignment[i] = cursor % k
            cursor += 1
    folds = []
    for f in range(k):
        test = np.flatnonzero(assignment == f)
        train = np.flatnonzero(assignment != f)
        folds.append((train, test))
    return FoldPlan(folds=folds, seed=seed, stratified=True)


def train_test_split(
    data: Dataset, test_fraction: float, seed: int = 0, stratified: bool = True
) -> tuple[Dataset, Dataset]:
    """Seeded train/test split with |test| = round(N * test_fraction).

    When stratified, per-class test counts are floor(fraction * N_c) and the
    remainder is reconciled to the total by largest fractional remainder.  A
    class with a single sample always goes to the training side (a warning is
    recorded), and no class is ever emptied from the training side.
    """
    f = float(test_fraction)
    if not 0.0 < f < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {f}")
    n = data.n_samples
    n_test = int(np.floor(n * f + 0.5))
    rng = np.random.default_rng(seed)

    if not stratified:
        perm = rng.permutation(n)
        test_idx = np.sort(perm[:n_test])
        train_idx = np.sort(perm[n_test:])
        return data.subset(train_idx), data.subset(test_idx)

    counts = data.class_counts()
    quotas, remainders, caps = {}, [], {}
    for c in data.class_ids:
        nc = counts[c]
        if nc == 1:
            warnings.warn(
                f"class {c} has a single sample; keeping it in the training split",
                stacklevel=2,
            )
            quotas[c] = 0
            caps[c] = 0
            continue
        ideal = nc * f
        quotas[c] = int(np.floor(ideal))
        caps[c] = nc - 1
        remainders.append((ideal - np.floor(ideal), nc, -c))
    # largest remainder first; ties favor the bigger class, then lower label
    short = n_test - sum(quotas.values())
    for _, nc, negc in sorted(remainders, reverse=True):
        if short <= 0:
            break
        c = -negc
        if quotas[c] < caps[c]:
            quotas[c] += 1
            short -= 1

    test_parts = []
    for c in data.class_ids:
        idx = np.flatnonzero(data.y == c)
        perm = rng.permutation(idx)
        test_parts.append(perm[: quotas[c]])
    test_idx = np.sort(np.concatenate(test_parts)) if test_parts else np.array([], dtype=int)
    mask = np.ones(n, dtype=bool)
    mask[test_idx] = False
    train_idx = np.flatnonzero(mask)
    return data.subset(train_idx), data.subset(test_idx)


def _split_counts(n: int, imbalance_ratio: float) -> tuple[int, int]:
    n = int(n)
    ir = float(imbalance_ratio)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if ir < 1.0:
        raise ValueError(f"imbalance_ratio must be >= 1, got {ir}")
    n_major = int(np.floor(n * ir / (ir + 1.0) + 0.5))
    n_minor = n - n_major
    if n_minor < 1:
        raise ValueError(
            f"imbalance_ratio {ir} leaves no minority samples out of n = {n}"
        )
    return n_major, n_minor


def _finish_shape(
    parts: list[np.ndarray], counts: tuple[int, int], noise_std: float, rng, name: str
) -> Dataset:
    X = np.vstack(parts)
    if noise_std > 0.0:
        X = X + rng.normal(0.0, noise_std, size=X.shape)
    y = np.concatenate([np.zeros(counts[0], dtype=int), np.ones(counts[1], dtype=int)])
    return Dataset(X=X, y=y, feature_names=["x", "y"], name=name)


def make_moons(n: int, imbalance_ratio: float = 1.0, noise_std: float = 0.0, seed: int = 0) -> Dataset:
    """Two interleaving half-circles; the majority class (label 0) is the unit
    upper half-circle at the origin and the minority class is the lower
    half-circle offset by (1, 0.5)."""
    if noise_std < 0:
        raise ValueError("noise_std must be >= 0")
    n_major, n_minor = _split_counts(n, imbalance_ratio)
    rng = np.random.default_rng(seed)
    t0 = np.linspace(0.0, np.pi, n_major)
    t1 = np.linspace(0.0, np.pi, n_minor)
    outer = np.column_stack([np.cos(t0), np.sin(t0)])
    inner = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    return _finish_shape([outer, inner], (n_major, n_minor), noise_std, rng, "moons")


def make_circles(n: int, imbalance_ratio: float = 1.0, noise_std: float = 0.0, seed: int = 0) -> Dataset:
    """Concentric circles with radii 1.0 (majority, label 0) and 0.5
    (minority)."""
    if noise_std < 0:
        raise ValueError("noise_std must be >= 0")
    n_major, n_minor = _split_counts(n, imbalance_ratio)
    rng = np.random.default_rng(seed)
    t0 = np.linspace(0.0, 2.0 * np.pi, n_major, endpoint=False)
    t1 = np.linspace(0.0, 2.0 * np.pi, n_minor, endpoint=False)
    outer = np.column_stack([np.cos(t0), np.sin(t0)])
    inner = 0.5 * np.column_stack([np.cos(t1), np.sin(t1)])
    return _finish_shape([outer, inner], (n_major, n_minor), noise_std, rng, "circles")


def make_spirals(n: int, imbalance_ratio: float = 1.0, noise_std: float = 0.0, seed: int = 0) -> Dataset:
    """Two Archimedean spiral arms r = theta / (3 pi) with theta in
    [0.25, 3 pi]; the minority arm is the majority arm rotated by pi."""
    if noise_std < 0:
        raise ValueError("noise_std must be >= 0")
    n_major, n_minor = _split_counts(n, imbalance_ratio)
    rng = np.random.default_rng(seed)

    def arm(count: int, rotation: float) -> np.ndarray:
        theta = np.linspace(0.25, 3.0 * np.pi, count)
        r = theta / (3.0 * np.pi)
        return np.column_stack([r * np.cos(theta + rotation), r * np.sin(theta + rotation)])

    return _finish_shape(
        [arm(n_major, 0.0), arm(n_minor, np.pi)], (n_major, n_minor), noise_std, rng, "spirals"
    )


SHAPE_MAKERS = {"moons": make_moons, "circles": make_circles, "spirals": make_spirals}
