"""Nonparametric comparison suite over model x dataset result matrices.

Rank conventions: within each dataset, rank 1 is the best (highest) metric
value and ties share the mean rank, so the ranks of M models always sum to
M(M+1)/2 per dataset.  Lower average rank is better.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, rankdata, studentized_range

from .kernels import std_normal_cdf

# Critical constants q(alpha, M) for the multiple-comparison-with-the-best
# interval: upper-alpha quantile of the studentized range (infinite df)
# divided by sqrt(2).  Frozen so published comparisons are reproducible
# independently of the scipy version; untabulated (alpha, M) pairs fall back
# to a live scipy evaluation.
MCB_Q_TABLE = {
    0.01: {
        2: 2.5758, 3: 2.9135, 4: 3.1133, 5: 3.2547, 6: 3.3637, 7: 3.4522,
        8: 3.5265, 9: 3.5903, 10: 3.6463, 11: 3.6960, 12: 3.7407, 13: 3.7813,
        14: 3.8185, 15: 3.8527, 16: 3.8843, 17: 3.9138, 18: 3.9414, 19: 3.9674,
        20: 3.9918, 21: 4.0148, 22: 4.0367, 23: 4.0575, 24: 4.0773, 25: 4.0962,
    },
    0.05: {
        2: 1.9600, 3: 2.3437, 4: 2.5690, 5: 2.7278, 6: 2.8497, 7: 2.9483,
        8: 3.0309, 9: 3.1017, 10: 3.1637, 11: 3.2187, 12: 3.2680, 13: 3.3127,
        14: 3.3536, 15: 3.3912, 16: 3.4260, 17: 3.4584, 18: 3.4887, 19: 3.5171,
        20: 3.5438, 21: 3.5690, 22: 3.5929, 23: 3.6156, 24: 3.6373, 25: 3.6579,
    },
    0.10: {
        2: 1.6449, 3: 2.0523, 4: 2.2913, 5: 2.4595, 6: 2.5885, 7: 2.6927,
        8: 2.7799, 9: 2.8546, 10: 2.9199, 11: 2.9778, 12: 3.0297, 13: 3.0767,
        14: 3.1197, 15: 3.1592, 16: 3.1957, 17: 3.2297, 18: 3.2615, 19: 3.2912,
        20: 3.3192, 21: 3.3457, 22: 3.3707, 23: 3.3945, 24: 3.4171, 25: 3.4387,
    },
}


def mcb_critical_constant(significance: float, n_models: int) -> float:
    table = MCB_Q_TABLE.get(round(float(significance), 4))
    if table is not None and n_models in table:
        return table[n_models]
    return float(studentized_range.ppf(1.0 - significance, n_models, 1e7) / math.sqrt(2.0))


@dataclass
class RankTable:
    """Models x datasets matrix of metric values (higher is better).

    ``values_are_ranks`` marks matrices whose entries already are per-dataset
    ranks (e.g. fixtures built from published average-rank rows); ranking is
    then skipped.
    """

    models: list[str]
    datasets: list[str]
    values: np.ndarray
    values_are_ranks: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.models), len(self.datasets)):
            raise ValueError(
                f"values must be {len(self.models)} x {len(self.datasets)}, got {self.values.shape}"
            )

    @property
    def n_models(self) -> int:
        return len(self.models)

    @property
    def n_datasets(self) -> int:
        return len(self.datasets)

    def ranks(self) -> np.ndarray:
        """Per-dataset ranks (1 = best, ties share the mean rank)."""
        if self.values_are_ranks:
            return self.values.copy()
        out = np.empty_like(self.values)
        for j in range(self.n_datasets):
            out[:, j] = rankdata(-self.values[:, j], method="average")
        return out

    def average_ranks(self) -> np.ndarray:
        return self.ranks().mean(axis=1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model"] + list(self.datasets))
            for name, row in zip(self.models, self.values):
                writer.writerow([name] + [repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path, values_are_ranks: bool = False) -> "RankTable":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
        if len(rows) < 2:
            raise ValueError(f"{path}: expected a header row and at least one model row")
        datasets = [c.strip() for c in rows[0][1:]]
        models, values = [], []
        for row in rows[1:]:
            models.append(row[0].strip())
            values.append([float(v) for v in row[1:]])
        return cls(models=models, datasets=datasets, values=np.asarray(values),
                   values_are_ranks=values_are_ranks)


def friedman_test(rank_input: RankTable) -> dict:
    """Friedman chi-square test (with tie correction) of the null hypothesis
    that all models perform equivalently across datasets.

    Datasets are the blocks.  Returns the statistic and the p-value from the
    chi-square distribution with M - 1 degrees of freedom; a matrix with no
    rank variation at all yields statistic 0 and p = 1.
    """
    k = rank_input.n_models
    n = rank_input.n_datasets
    if k < 2:
        raise ValueError("friedman_test needs at least 2 models")
    if n < 2:
        raise ValueError("friedman_test needs at least 2 datasets")
    r = rank_input.ranks()
    row_sums = r.sum(axis=1)
    a = float((r * r).sum())
    c = n * k * (k + 1) ** 2 / 4.0
    if a <= c:
        return {"statistic": 0.0, "p_value": 1.0, "df": k - 1}
    stat = (k - 1) * float(((row_sums - n * (k + 1) / 2.0) ** 2).sum()) / (a - c)
    return {"statistic": stat, "p_value": float(chi2.sf(stat, k - 1)), "df": k - 1}


def _signed_rank_distribution(ranks2: np.ndarray) -> np.ndarray:
    # counts[w] = number of sign assignments whose positive-rank sum equals
    # w/2; ranks are doubled so tied (half-integer) ranks stay integral
    total = int(ranks2.sum())
    counts = np.zeros(total + 1, dtype=object)
    counts[0] = 1
    for r in ranks2:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:-r] if r > 0 else counts
        counts = counts + shifted
    return counts


def wilcoxon_signed_rank(a, b, alternative: str = "greater") -> dict:
    """Wilcoxon signed-rank test for paired samples.

    Zero differences are dropped; ties among absolute differences share the
    mean rank.  The statistic is the sum of ranks of positive differences.
    For n <= 25 the p-value is computed from the exact null distribution over
    all 2^n sign assignments; above that, a normal approximation with tie
    correction and continuity correction is used.  ``alternative`` is one of
    ``greater`` (a tends to exceed b), ``less`` or ``two_sided``.
    """
    if alternative not in ("two_sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("a and b must be 1-D arrays of equal length")
    diff = a - b
    diff = diff[diff != 0.0]
    n = diff.size
    if n == 0:
        return {"statistic": 0.0, "p_value": 1.0, "n": 0, "method": "degenerate",
                "degenerate": True}
    if n < 5:
        raise ValueError(f"need >= 5 nonzero differences, got {n}")
    ranks = rankdata(np.abs(diff), method="average")
    w = float(ranks[diff > 0].sum())
    total = float(ranks.sum())

    if n <= 25:
        ranks2 = np.rint(2.0 * ranks).astype(int)
        counts = _signed_rank_distribution(ranks2)
        denom = 1 << n
        w2 = int(round(2.0 * w))
        total2 = int(ranks2.sum())
        support = np.arange(total2 + 1)
        if alternative == "greater":
            p = sum(int(c) for s, c in zip(support, counts) if s >= w2) / denom
        elif alternative == "less":
            p = sum(int(c) for s, c in zip(support, counts) if s <= w2) / denom
        else:
            dev = abs(2 * w2 - total2)
            p = sum(int(c) for s, c in zip(support, counts) if abs(2 * s - total2) >= dev) / denom
        return {"statistic": w, "p_value": float(min(p, 1.0)), "n": n,
                "method": "exact", "degenerate": False}

    mu = n * (n + 1) / 4.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float(((tie_counts**3 - tie_counts)).sum()) / 48.0
    sd = math.sqrt(var)
    if alternative == "greater":
        z = (w - mu - 0.5) / sd
        p = 1.0 - std_normal_cdf(z)
    elif alternative == "less":
        z = (w - mu + 0.5) / sd
        p = std_normal_cdf(z)
    else:
        z = (w - mu - 0.5 * math.copysign(1.0, w - mu)) / sd if w != mu else 0.0
        p = 2.0 * (1.0 - std_normal_cdf(abs(z)))
    return {"statistic": w, "p_value": float(min(max(p, 0.0), 1.0)), "n": n,
            "method": "normal-approximation", "degenerate": False}


def mcb_ranks(rank_input: RankTable, significance: float = 0.05) -> dict:
    """Multiple comparison with the best over average ranks.

    The critical distance is

        CD = q(significance, M) * sqrt(M (M + 1) / (6 N))

    with q from :data:`MCB_Q_TABLE`.  Each model gets the interval
    [rank - CD/2, rank + CD/2]; models whose interval does not overlap the
    best model's interval (gap above CD) are flagged significantly worse.
    """
    m = rank_input.n_models
    n = rank_input.n_datasets
    if m < 2:
        raise ValueError("mcb_ranks needs at least 2 models")
    if n < 2:
        raise ValueError("mcb_ranks needs at least 2 datasets")
    avg = rank_input.average_ranks()
    q = mcb_critical_constant(significance, m)
    cd = q * math.sqrt(m * (m + 1) / (6.0 * n))
    best_idx = int(np.argmin(avg))
    gaps = avg - avg[best_idx]
    flags = {name: bool(g > cd) for name, g in zip(rank_input.models, gaps)}
    return {
        "average_ranks": {name: float(r) for name, r in zip(rank_input.models, avg)},
        "critical_distance": cd,
        "critical_constant": q,
        "significance": significance,
        "best_model": rank_input.models[best_idx],
        "best_rank": float(avg[best_idx]),
        "worse_than_best": flags,
        "metadata": {
            "interval_convention": "rank +/- CD/2; flagged when the gap to the best exceeds CD",
            "critical_value_source": "studentized range (infinite df) divided by sqrt(2)",
        },
    }
