"""Binary classification metrics and cross-seed aggregation.

All metrics are confusion-matrix based except ROC AUC, which uses the
Mann-Whitney pair-counting formulation (ties count one half).  Undefined
values (AUC on a single-class fold, FAR with no normal rows) are reported
as None and excluded from aggregation with their count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

MODES = ("full", "loose", "strict")

RESULTS_HEADER = (
    "seed,mode,model,f1_macro,roc_auc,far_normal,bal_acc,mcc,"
    "n_train,n_val,n_test,prior_train,prior_test"
)
AGGREGATE_HEADER = "model,mode,metric,mean,std,n_missing"

METRIC_NAMES = ("f1_macro", "roc_auc", "far_normal", "bal_acc", "mcc")


@dataclass
class MetricsRecord:
    """One (seed, mode, model) result row."""

    seed: int
    mode: str
    model: str
    f1_macro: float | None
    roc_auc: float | None
    far_normal: float | None
    bal_acc: float | None
    mcc: float | None
    n_train: int
    n_val: int
    n_test: int
    prior_train: float
    prior_test: float

    def metric(self, name: str) -> float | None:
        return getattr(self, name)

    def to_csv_row(self) -> str:
        cells = [str(self.seed), self.mode, self.model]
        for name in METRIC_NAMES:
            v = self.metric(name)
            cells.append("" if v is None else repr(float(v)))
        cells.extend([str(self.n_train), str(self.n_val), str(self.n_test)])
        cells.append(repr(float(self.prior_train)))
        cells.append(repr(float(self.prior_test)))
        return ",".join(cells)

    @staticmethod
    def from_csv_row(row: str) -> "MetricsRecord":
        cells = row.split(",")
        if len(cells) != 13:
            raise DataError(f"results row has {len(cells)} cells, expected 13")

        def opt(v: str) -> float | None:
            return None if v == "" else float(v)

        return MetricsRecord(
            seed=int(cells[0]),
            mode=cells[1],
            model=cells[2],
            f1_macro=opt(cells[3]),
            roc_auc=opt(cells[4]),
            far_normal=opt(cells[5]),
            bal_acc=opt(cells[6]),
            mcc=opt(cells[7]),
            n_train=int(cells[8]),
            n_val=int(cells[9]),
            n_test=int(cells[10]),
            prior_train=float(cells[11]),
            prior_test=float(cells[12]),
        )


def _as_binary(y) -> np.ndarray:
    arr = np.asarray(y).astype(np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise DataError("labels must be a non-empty 1-d sequence")
    if not np.isin(arr, (0, 1)).all():
        raise DataError("labels must be binary 0/1")
    return arr


def confusion(y, yhat) -> tuple[int, int, int, int]:
    """(tp, fp, fn, tn) with anomaly (1) as the positive class."""
    y = _as_binary(y)
    yhat = _as_binary(yhat)
    if y.shape != yhat.shape:
        raise DataError("y and yhat must have equal length")
    tp = int(np.sum((y == 1) & (yhat == 1)))
    fp = int(np.sum((y == 0) & (yhat == 1)))
    fn = int(np.sum((y == 1) & (yhat == 0)))
    tn = int(np.sum((y == 0) & (yhat == 0)))
    return tp, fp, fn, tn


def _f1_one_class(tp: int, fp: int, fn: int) -> float:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def f1_macro(y, yhat) -> float:
    """Unweighted mean of per-class F1 over the classes present in y or yhat."""
    tp, fp, fn, tn = confusion(y, yhat)
    scores = []
    if tp + fn + fp > 0:  # class 1 appears somewhere
        scores.append(_f1_one_class(tp, fp, fn))
    if tn + fp + fn > 0:  # class 0 appears somewhere (swap roles)
        scores.append(_f1_one_class(tn, fn, fp))
    return float(np.mean(scores))


def roc_auc(y, scores) -> float | None:
    """Fraction of (positive, negative) pairs ranked correctly, ties as 1/2.

    Computed via midranks; None when y has a single class.
    """
    y = _as_binary(y)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape:
        raise DataError("y and scores must have equal length")
    n_pos = int(np.sum(y == 1))
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(y.size, dtype=np.float64)
    sorted_s = s[order]
    i = 0
    while i < y.size:
        j = i
        while j + 1 < y.size and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # midrank, 1-based
        i = j + 1
    rank_sum_pos = float(np.sum(ranks[y == 1]))
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def far_normal(y, yhat) -> float | None:
    """False-alarm rate on the normal class: FP / (FP + TN)."""
    tp, fp, fn, tn = confusion(y, yhat)
    if fp + tn == 0:
        return None
    return fp / (fp + tn)


def balanced_accuracy(y, yhat) -> float:
    """Mean of per-class recalls over classes present in y."""
    tp, fp, fn, tn = confusion(y, yhat)
    recalls = []
    if tp + fn > 0:
        recalls.append(tp / (tp + fn))
    if tn + fp > 0:
        recalls.append(tn / (tn + fp))
    return float(np.mean(recalls))


def mcc(y, yhat) -> float:
    """Matthews correlation; 0 when the denominator vanishes."""
    tp, fp, fn, tn = confusion(y, yhat)
    denom = math.sqrt(
        float(tp + fp) * float(tp + fn) * float(tn + fp) * float(tn + fn)
    )
    if denom == 0.0:
        return 0.0
    return (tp * tn - fp * fn) / denom


def compute_all(y, yhat, scores) -> dict[str, float | None]:
    return {
        "f1_macro": f1_macro(y, yhat),
        "roc_auc": roc_auc(y, scores),
        "far_normal": far_normal(y, yhat),
        "bal_acc": balanced_accuracy(y, yhat),
        "mcc": mcc(y, yhat),
    }


@dataclass
class AggregateRow:
    model: str
    mode: str
    metric: str
    mean: float | None
    std: float | None
    n_missing: int

    def to_csv_row(self) -> str:
        mean = "" if self.mean is None else repr(float(self.mean))
        std = "" if self.std is None else repr(float(self.std))
        return f"{self.model},{self.mode},{self.metric},{mean},{std},{self.n_missing}"


def aggregate(records: list[MetricsRecord]) -> list[AggregateRow]:
    """Per (model, mode, metric) mean and sample std across seeds.

    Missing metric values are excluded and counted; std needs >= 2 values
    (n-1 denominator) and is reported missing otherwise.
    """
    if not records:
        raise DataError("no records to aggregate")
    groups: dict[tuple[str, str], list[MetricsRecord]] = {}
    for rec in records:
        groups.setdefault((rec.model, rec.mode), []).append(rec)
    rows: list[AggregateRow] = []
    for (model, mode), recs in sorted(groups.items()):
        for metric in METRIC_NAMES:
            values = [r.metric(metric) for r in recs]
            present = np.array([v for v in values if v is not None], dtype=np.float64)
            n_missing = len(values) - present.size
            if present.size == 0:
                rows.append(AggregateRow(model, mode, metric, None, None, n_missing))
                continue
            mean = float(np.mean(present))
            std = float(np.std(present, ddof=1)) if present.size >= 2 else None
            rows.append(AggregateRow(model, mode, metric, mean, std, n_missing))
    return rows
