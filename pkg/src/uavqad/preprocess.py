"""Train-fit-only preprocessing stages.

Every fitted statistic here (medians, IQRs, min/max, bin edges, MI scores)
is a pure function of the training fold handed in; nothing is ever fit on
validation or test rows.  Fold balancing marks synthetic rows so downstream
code can assert they never escape the training fold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DataError

ORIGIN_REAL = 0
ORIGIN_SYNTHETIC = 1

MI_BINS = 16


@dataclass(frozen=True)
class RobustScalerFit:
    """Per-feature median and interquartile range (linear-interpolation
    quantiles); zero-IQR features divide by 1."""

    median: np.ndarray
    iqr: np.ndarray

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.median) / self.iqr


def robust_fit(train: np.ndarray) -> RobustScalerFit:
    train = np.asarray(train, dtype=np.float64)
    if train.ndim != 2 or train.shape[0] == 0:
        raise DataError("robust scaler needs a non-empty 2-d training matrix")
    median = np.median(train, axis=0)
    q25 = np.quantile(train, 0.25, axis=0)
    q75 = np.quantile(train, 0.75, axis=0)
    iqr = q75 - q25
    iqr = np.where(iqr == 0.0, 1.0, iqr)
    return RobustScalerFit(median=median, iqr=iqr)


def robust_fit_transform(train: np.ndarray, *others: np.ndarray):
    """Scale train and any further matrices with statistics fit on train only."""
    fit = robust_fit(train)
    out = [fit.transform(train)] + [fit.transform(o) for o in others]
    return fit, out


@dataclass(frozen=True)
class AngleScalerFit:
    """Per-feature train min/max mapping to [-pi, pi]; degenerate features
    map to 0; out-of-range values (possible on non-train data) are clipped."""

    lo: np.ndarray
    hi: np.ndarray

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        span = self.hi - self.lo
        safe = np.where(span == 0.0, 1.0, span)
        scaled = -np.pi + 2.0 * np.pi * (x - self.lo) / safe
        scaled = np.where(span == 0.0, 0.0, scaled)
        return np.clip(scaled, -np.pi, np.pi)


def angle_fit(train: np.ndarray) -> AngleScalerFit:
    train = np.asarray(train, dtype=np.float64)
    if train.ndim != 2 or train.shape[0] == 0:
        raise DataError("angle scaler needs a non-empty 2-d training matrix")
    return AngleScalerFit(lo=train.min(axis=0), hi=train.max(axis=0))


def angle_fit_transform(train: np.ndarray, *others: np.ndarray):
    fit = angle_fit(train)
    out = [fit.transform(train)] + [fit.transform(o) for o in others]
    return fit, out


@dataclass
class BalancedFold:
    """Training fold after SMOTE oversampling and Tomek-link cleaning."""

    x: np.ndarray
    y: np.ndarray
    origin: np.ndarray  # ORIGIN_REAL / ORIGIN_SYNTHETIC per row

    def class_counts(self) -> dict[int, int]:
        return {int(c): int(n) for c, n in zip(*np.unique(self.y, return_counts=True))}


def smote_interpolate(x: np.ndarray, neighbor: np.ndarray, u: float) -> np.ndarray:
    """One synthetic sample on the segment from x towards its neighbour."""
    return x + u * (neighbor - x)


def smote_tomek(
    x: np.ndarray, y: np.ndarray, k: int = 5, seed: int = 0
) -> BalancedFold:
    """SMOTE the minority class up to the majority count, then drop both
    members of every Tomek link (opposite-label mutual nearest neighbours).

    All random draws (base row, neighbour choice, interpolation factor) come
    from one generator seeded with ``seed``, so identical (fold, seed) pairs
    produce identical synthetic rows.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y).astype(np.int64)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DataError("fold matrix and labels must align")
    classes, counts = np.unique(y, return_counts=True)
    if classes.size != 2:
        raise DataError("fold must contain exactly two classes")
    minority = int(classes[np.argmin(counts)])
    n_min = int(counts.min())
    n_maj = int(counts.max())
    if n_min < 2:
        raise DataError("minority class needs at least 2 rows for SMOTE")

    rng = np.random.default_rng(seed)
    n_syn = n_maj - n_min
    if n_syn > 0:
        x_min = x[y == minority]
        k_eff = min(k, n_min - 1)
        # +1 neighbour because each point is its own nearest
        _, nn = cKDTree(x_min).query(x_min, k=k_eff + 1)
        nn = np.atleast_2d(nn)[:, 1:]
        base = rng.integers(0, n_min, size=n_syn)
        pick = rng.integers(0, k_eff, size=n_syn)
        u = rng.random(n_syn)
        x_syn = x_min[base] + u[:, None] * (x_min[nn[base, pick]] - x_min[base])
        x_all = np.vstack([x, x_syn])
        y_all = np.concatenate([y, np.full(n_syn, minority, dtype=np.int64)])
        origin = np.concatenate(
            [
                np.full(x.shape[0], ORIGIN_REAL, dtype=np.int64),
                np.full(n_syn, ORIGIN_SYNTHETIC, dtype=np.int64),
            ]
        )
    else:
        x_all = x.copy()
        y_all = y.copy()
        origin = np.full(x.shape[0], ORIGIN_REAL, dtype=np.int64)

    # Tomek links on the oversampled set: mutual 1-NN pairs with opposite
    # labels; both members removed.
    _, nn1 = cKDTree(x_all).query(x_all, k=2)
    nn1 = np.atleast_2d(nn1)[:, 1]
    idx = np.arange(x_all.shape[0])
    mutual = nn1[nn1[idx]] == idx
    opposite = y_all[nn1] != y_all
    drop = np.unique(np.concatenate([idx[mutual & opposite], nn1[mutual & opposite]]))
    keep = np.setdiff1d(idx, drop, assume_unique=False)
    return BalancedFold(x=x_all[keep], y=y_all[keep], origin=origin[keep])


def _equal_frequency_bins(values: np.ndarray, n_bins: int = MI_BINS) -> np.ndarray:
    edges = np.quantile(values, np.arange(1, n_bins) / n_bins)
    return np.digitize(values, np.unique(edges), right=False)


def mutual_information_nats(feature: np.ndarray, labels: np.ndarray) -> float:
    """Plug-in MI between a discretized feature and binary labels, in nats.

    Discretization: 16 equal-frequency bins computed on the data itself.
    """
    bins = _equal_frequency_bins(np.asarray(feature, dtype=np.float64))
    labels = np.asarray(labels).astype(np.int64)
    n = labels.size
    mi = 0.0
    for b in np.unique(bins):
        in_b = bins == b
        p_b = np.count_nonzero(in_b) / n
        for c in (0, 1):
            joint = np.count_nonzero(in_b & (labels == c)) / n
            if joint == 0.0:
                continue
            p_c = np.count_nonzero(labels == c) / n
            mi += joint * np.log(joint / (p_b * p_c))
    return float(max(mi, 0.0))


def mi_rank(fold: BalancedFold) -> list[tuple[int, float]]:
    """Features ranked by descending MI with the label; ties break on the
    lower feature index."""
    classes, counts = np.unique(fold.y, return_counts=True)
    if classes.size < 2 or counts.min() < 2:
        raise DataError("MI ranking needs at least 2 rows per class")
    scores = [
        (j, mutual_information_nats(fold.x[:, j], fold.y))
        for j in range(fold.x.shape[1])
    ]
    return sorted(scores, key=lambda item: (-item[1], item[0]))


def select_top_k(ranking: list[tuple[int, float]], k: int = 5) -> list[int]:
    if k < 1:
        raise DataError("k must be >= 1")
    if k > len(ranking):
        raise DataError(f"k={k} exceeds the {len(ranking)} ranked features")
    return [idx for idx, _ in ranking[:k]]
