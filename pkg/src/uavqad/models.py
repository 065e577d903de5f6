"""Classical heads: logistic regression, MLP, random forest, and a
from-scratch gradient-boosted tree ensemble standing in for XGBoost.

One regression-tree engine backs both ensembles.  Splits maximise
sum-of-squared-error reduction of the target, which for 0/1 targets picks
the same split as Gini gain; leaf values are target means.  Split ties
break deterministically: lowest feature index, then lowest threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DataError

UNBOUNDED_DEPTH = 10**9


@dataclass(frozen=True)
class GbdtConfig:
    n_trees: int = 200
    max_depth: int = 3
    learning_rate: float = 0.1
    min_samples_leaf: int = 5
    seed: int = 0

    def __post_init__(self):
        if min(self.n_trees, self.max_depth, self.min_samples_leaf) < 1:
            raise ValueError("tree counts, depth and leaf size must be positive")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 200
    max_depth: int | None = None  # None = grow until pure / leaf floor
    min_samples_leaf: int = 5
    bootstrap: bool = True
    seed: int = 0


@dataclass(frozen=True)
class MlpConfig:
    hidden: int = 32
    learning_rate: float = 0.05
    epochs: int = 500
    seed: int = 0


@dataclass(frozen=True)
class LogRegConfig:
    l2: float = 1.0
    learning_rate: float = 0.1
    tol: float = 1e-6
    max_iter: int = 10000
    seed: int = 0  # unused (deterministic zero init); kept for a uniform surface


# ---------------------------------------------------------------------------
# regression tree engine


@dataclass
class Tree:
    """Flat node arrays; feature -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        node = np.zeros(x.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while np.any(active):
            idx = np.flatnonzero(active)
            nd = node[idx]
            go_left = x[idx, self.feature[nd]] <= self.threshold[nd]
            node[idx[go_left]] = self.left[nd[go_left]]
            node[idx[~go_left]] = self.right[nd[~go_left]]
            active = self.feature[node] >= 0
        return self.value[node]


def _find_split(x, target, rows, feat_candidates, min_leaf):
    """Best (feature, threshold, left_rows, right_rows) at a node, or None.

    feat_candidates must be sorted ascending so that gain ties keep the
    lowest feature index.
    """
    best_gain = 0.0
    best = None
    for f in feat_candidates:
        col = x[rows, f]
        order = np.argsort(col, kind="mergesort")
        gain, pos = kernels.best_split_sse(col[order], target[rows][order], min_leaf)
        if pos >= 0 and gain > best_gain + 1e-12:
            best_gain = gain
            sorted_col = col[order]
            thr = (sorted_col[pos - 1] + sorted_col[pos]) / 2.0
            best = (f, thr, rows[order[:pos]], rows[order[pos:]])
    return best


def build_tree(
    x: np.ndarray,
    target: np.ndarray,
    max_depth: int | None,
    min_samples_leaf: int,
    rng: np.random.Generator | None = None,
    features_per_split: int | None = None,
) -> Tree:
    """Greedy best-split regression tree.

    When features_per_split is given, each node considers a random subset of
    that many features (drawn from rng), as in a random forest.
    """
    x = np.asarray(x, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    n_features = x.shape[1]
    depth_cap = UNBOUNDED_DEPTH if max_depth is None else max_depth

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def grow(rows: np.ndarray, depth: int) -> int:
        node = new_node()
        value[node] = float(np.mean(target[rows]))
        if depth >= depth_cap or rows.size < 2 * min_samples_leaf:
            return node
        if features_per_split is not None and features_per_split < n_features:
            cand = np.sort(rng.choice(n_features, size=features_per_split, replace=False))
        else:
            cand = np.arange(n_features)
        split = _find_split(x, target, rows, cand, min_samples_leaf)
        if split is None:
            return node
        f, thr, rows_l, rows_r = split
        feature[node] = f
        threshold[node] = thr
        left[node] = grow(rows_l, depth + 1)
        right[node] = grow(rows_r, depth + 1)
        return node

    grow(np.arange(x.shape[0]), 0)
    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# gradient boosting with logistic loss


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1.0 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def _check_two_classes(y: np.ndarray):
    if np.unique(y).size < 2:
        raise DataError("training labels must contain both classes")


@dataclass
class GbdtModel:
    config: GbdtConfig
    f0: float
    trees: list[Tree]
    train_log_loss: list[float] = field(default_factory=list)

    def decision(self, x: np.ndarray) -> np.ndarray:
        f = np.full(x.shape[0], self.f0, dtype=np.float64)
        for tree in self.trees:
            f += self.config.learning_rate * tree.predict(x)
        return f

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return _sigmoid(self.decision(np.asarray(x, dtype=np.float64)))


def gbdt_fit(config: GbdtConfig, x: np.ndarray, y: np.ndarray) -> GbdtModel:
    """Stagewise least-squares fit of trees to logistic-loss gradients.

    F starts at the prior log-odds; each round fits a tree to the residual
    y - sigmoid(F) and adds learning_rate * tree.  First-order only: leaf
    values are plain residual means, no Hessian weighting.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_two_classes(y)
    p0 = float(np.mean(y))
    f0 = float(np.log(p0 / (1.0 - p0)))
    f = np.full(x.shape[0], f0, dtype=np.float64)
    trees: list[Tree] = []
    losses: list[float] = []
    for _ in range(config.n_trees):
        residual = y - _sigmoid(f)
        tree = build_tree(x, residual, config.max_depth, config.min_samples_leaf)
        trees.append(tree)
        f += config.learning_rate * tree.predict(x)
        losses.append(_log_loss(y, _sigmoid(f)))
    model = GbdtModel(config=config, f0=f0, trees=trees)
    model.train_log_loss = losses
    return model


# ---------------------------------------------------------------------------
# random forest (probability forest over 0/1 targets)


@dataclass
class ForestModel:
    config: ForestConfig
    trees: list[Tree]

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        acc = np.zeros(x.shape[0], dtype=np.float64)
        for tree in self.trees:
            acc += tree.predict(x)
        return np.clip(acc / len(self.trees), 0.0, 1.0)


def forest_fit(config: ForestConfig, x: np.ndarray, y: np.ndarray) -> ForestModel:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_two_classes(y)
    n, d = x.shape
    n_sub = int(np.ceil(np.sqrt(d)))
    rng = np.random.default_rng(config.seed)
    trees = []
    for _ in range(config.n_trees):
        rows = rng.integers(0, n, size=n) if config.bootstrap else np.arange(n)
        trees.append(
            build_tree(
                x[rows],
                y[rows],
                config.max_depth,
                config.min_samples_leaf,
                rng=rng,
                features_per_split=n_sub,
            )
        )
    return ForestModel(config=config, trees=trees)


# ---------------------------------------------------------------------------
# multilayer perceptron: one ReLU hidden layer, full-batch gradient descent


@dataclass
class MlpModel:
    config: MlpConfig
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        h = np.maximum(np.asarray(x, dtype=np.float64) @ self.w1 + self.b1, 0.0)
        return _sigmoid(h @ self.w2 + self.b2)


def mlp_fit(config: MlpConfig, x: np.ndarray, y: np.ndarray) -> MlpModel:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_two_classes(y)
    n, d = x.shape
    rng = np.random.default_rng(config.seed)
    w1 = rng.normal(0.0, np.sqrt(2.0 / d), size=(d, config.hidden))
    b1 = np.zeros(config.hidden)
    w2 = rng.normal(0.0, np.sqrt(2.0 / config.hidden), size=config.hidden)
    b2 = 0.0
    lr = config.learning_rate
    for _ in range(config.epochs):
        z1 = x @ w1 + b1
        h = np.maximum(z1, 0.0)
        p = _sigmoid(h @ w2 + b2)
        delta = (p - y) / n  # d(mean BCE)/d(logit)
        gw2 = h.T @ delta
        gb2 = float(np.sum(delta))
        dh = np.outer(delta, w2)
        dh[z1 <= 0.0] = 0.0
        gw1 = x.T @ dh
        gb1 = dh.sum(axis=0)
        w1 -= lr * gw1
        b1 -= lr * gb1
        w2 -= lr * gw2
        b2 -= lr * gb2
    return MlpModel(config=config, w1=w1, b1=b1, w2=w2, b2=np.float64(b2))


# ---------------------------------------------------------------------------
# logistic regression, L2-regularised full-batch gradient descent


@dataclass
class LogRegModel:
    config: LogRegConfig
    w: np.ndarray
    b: float

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return _sigmoid(np.asarray(x, dtype=np.float64) @ self.w + self.b)


def logreg_fit(config: LogRegConfig, x: np.ndarray, y: np.ndarray) -> LogRegModel:
    """Minimises mean log-loss + 0.5 * l2 * ||w||^2 / n (bias unpenalised)
    by gradient descent until the loss change drops below tol."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_two_classes(y)
    n, d = x.shape
    w = np.zeros(d)
    b = 0.0
    lr = config.learning_rate
    prev = np.inf
    for _ in range(config.max_iter):
        p = _sigmoid(x @ w + b)
        loss = _log_loss(y, p) + 0.5 * config.l2 * float(w @ w) / n
        if abs(prev - loss) < config.tol:
            break
        prev = loss
        grad_logit = (p - y) / n
        gw = x.T @ grad_logit + config.l2 * w / n
        gb = float(np.sum(grad_logit))
        w -= lr * gw
        b -= lr * gb
    return LogRegModel(config=config, w=w, b=float(b))


# ---------------------------------------------------------------------------
# uniform fit/predict surface


MODEL_KINDS = ("logreg", "mlp", "random_forest", "gbdt")


def fit_predict(kind: str, config, x_train, y_train, x_eval) -> np.ndarray:
    """Train one head on the (balanced) fold and return probability-like
    scores for the evaluation rows; labels are score >= 0.5."""
    x_train = np.asarray(x_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.float64)
    x_eval = np.asarray(x_eval, dtype=np.float64)
    if x_train.shape[0] != y_train.shape[0]:
        raise DataError("training rows and labels must align")
    if kind == "gbdt":
        return gbdt_fit(config, x_train, y_train).predict_proba(x_eval)
    if kind == "random_forest":
        return forest_fit(config, x_train, y_train).predict_proba(x_eval)
    if kind == "mlp":
        return mlp_fit(config, x_train, y_train).predict_proba(x_eval)
    if kind == "logreg":
        return logreg_fit(config, x_train, y_train).predict_proba(x_eval)
    raise ValueError(f"unknown model kind {kind!r}")
