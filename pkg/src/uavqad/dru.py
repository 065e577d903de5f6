"""Data re-uploading variational classifier.

Circuit: per layer, each qubit gets RX/RY/RZ with angle theta + x[q] (the
same feature added to all three rotations of its qubit), then one ring
entangler -- including after the last layer.  For the default 5-qubit,
2-layer shape this gives 3*5*2 = 30 trainable angles and 40 gates.

The decision score is (1 - <Z_0>)/2; the per-qubit vector ((1 - <Z_q>)/2)
is the feature map consumed by the hybrid family.  Training minimises mean
squared error against {0,1} labels with SciPy's COBYLA under an evaluation
cap, started from Uniform(-pi/8, pi/8) angles seeded by the model spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import kernels, qsim
from .errors import DataError

INIT_HALF_RANGE = math.pi / 8
DEFAULT_MAX_EVALS = 250

_ANGLE_SLOP = 1e-9  # tolerance when validating inputs against [-pi, pi]


@dataclass(frozen=True)
class DruSpec:
    """Circuit shape; n_qubits must equal the number of input features."""

    n_qubits: int = 5
    n_layers: int = 2
    entanglement: str = "ring"
    seed: int = 0

    @property
    def n_params(self) -> int:
        return 3 * self.n_qubits * self.n_layers

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_layers < 1:
            raise ValueError("n_qubits and n_layers must be positive")
        if self.entanglement != "ring":
            raise ValueError(f"unsupported entanglement {self.entanglement!r}")


@dataclass(frozen=True)
class TrainBudget:
    """Caps on the optimiser's training subset and evaluation count."""

    max_per_class: int = 400
    max_optimizer_evals: int = DEFAULT_MAX_EVALS
    subset_tag: str = "A"

    def __post_init__(self):
        if self.max_per_class < 1:
            raise ValueError("max_per_class must be >= 1")
        if self.max_optimizer_evals < 1:
            raise ValueError("max_optimizer_evals must be >= 1")


@dataclass
class DruModel:
    spec: DruSpec
    theta: np.ndarray
    threshold: float = 0.5
    trained: bool = False
    # diagnostics populated by fit()
    loss_history: list[float] = field(default_factory=list)
    train_row_indices: np.ndarray | None = None

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        if self.theta.shape != (self.spec.n_params,):
            raise ValueError(
                f"theta must have length {self.spec.n_params}, "
                f"got shape {self.theta.shape}"
            )
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")


def initial_theta(spec: DruSpec) -> np.ndarray:
    """Seeded Uniform(-pi/8, pi/8) starting angles."""
    rng = np.random.default_rng(spec.seed)
    return rng.uniform(-INIT_HALF_RANGE, INIT_HALF_RANGE, size=spec.n_params)


def untrained_model(spec: DruSpec) -> DruModel:
    return DruModel(spec=spec, theta=initial_theta(spec), trained=False)


def build_circuit(spec: DruSpec, theta: np.ndarray, x: np.ndarray) -> list[qsim.Gate]:
    """Explicit gate list for one input; the readable counterpart of the
    batched kernel evaluation."""
    theta = np.asarray(theta, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if theta.shape != (spec.n_params,):
        raise ValueError(f"theta must have length {spec.n_params}")
    if x.shape != (spec.n_qubits,):
        raise ValueError(
            f"feature vector must have length {spec.n_qubits}, got {x.shape}"
        )
    th = theta.reshape(spec.n_layers, spec.n_qubits, 3)
    gates: list[qsim.Gate] = []
    for layer in range(spec.n_layers):
        for q in range(spec.n_qubits):
            gates.append(qsim.Gate("RX", target=q, angle=th[layer, q, 0] + x[q]))
            gates.append(qsim.Gate("RY", target=q, angle=th[layer, q, 1] + x[q]))
            gates.append(qsim.Gate("RZ", target=q, angle=th[layer, q, 2] + x[q]))
        if spec.n_qubits >= 2:
            gates.extend(qsim.ring_entangler_gates(spec.n_qubits))
    return gates


def _validate_angles(x: np.ndarray, n_features: int):
    if x.ndim != 2 or x.shape[1] != n_features:
        raise ValueError(f"expected shape (*, {n_features}), got {x.shape}")
    if x.size and np.max(np.abs(x)) > math.pi + _ANGLE_SLOP:
        raise ValueError("inputs must be angle-scaled to [-pi, pi]")


def extract_features_batch(model: DruModel, x: np.ndarray) -> np.ndarray:
    """((1 - <Z_q>)/2 for each qubit) per row; shape (batch, n_qubits)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    _validate_angles(x, model.spec.n_qubits)
    z = kernels.dru_expectations(
        model.theta, x, model.spec.n_qubits, model.spec.n_layers
    )
    return (1.0 - z) / 2.0


def extract_features(model: DruModel, x: np.ndarray) -> np.ndarray:
    return extract_features_batch(model, np.asarray(x, dtype=np.float64)[None, :])[0]


def score_batch(model: DruModel, x: np.ndarray) -> np.ndarray:
    return extract_features_batch(model, x)[:, 0]


def score(model: DruModel, x: np.ndarray) -> float:
    """Decision score (1 - <Z_0>)/2 in [0, 1]."""
    return float(extract_features(model, x)[0])


def predict(model: DruModel, x: np.ndarray) -> np.ndarray:
    return (score_batch(model, x) >= model.threshold).astype(np.int64)


def select_budget_rows(
    y: np.ndarray, max_per_class: int, seed: int
) -> np.ndarray:
    """Class-balanced row indices, at most max_per_class per class, drawn
    deterministically from the seed.  Returned sorted for stable slicing."""
    y = np.asarray(y)
    idx0 = np.flatnonzero(y == 0)
    idx1 = np.flatnonzero(y == 1)
    if idx0.size == 0 or idx1.size == 0:
        raise DataError("training data must contain both classes")
    n_per = min(max_per_class, idx0.size, idx1.size)
    rng = np.random.default_rng(seed)
    pick0 = rng.choice(idx0, size=n_per, replace=False)
    pick1 = rng.choice(idx1, size=n_per, replace=False)
    return np.sort(np.concatenate([pick0, pick1]))


def fit(
    spec: DruSpec,
    x: np.ndarray,
    y: np.ndarray,
    budget: TrainBudget = TrainBudget(),
) -> DruModel:
    """Train by derivative-free minimisation of mean squared score error.

    Deterministic in (spec.seed, x, y, budget).  The recorded loss history
    is the best loss seen so far at each evaluation, and the returned theta
    is the best evaluated point, so the final loss never exceeds the loss at
    initialisation.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError("training data must be a non-empty 2-d matrix")
    if y.shape != (x.shape[0],):
        raise DataError("labels must align with rows")
    _validate_angles(x, spec.n_qubits)

    rows = select_budget_rows(y, budget.max_per_class, spec.seed)
    x_fit = x[rows]
    y_fit = y[rows]

    theta0 = initial_theta(spec)
    best_loss = math.inf
    best_theta = theta0.copy()
    history: list[float] = []

    def objective(theta: np.ndarray) -> float:
        nonlocal best_loss, best_theta
        z0 = kernels.dru_expectations(theta, x_fit, spec.n_qubits, spec.n_layers)[:, 0]
        scores = (1.0 - z0) / 2.0
        loss = float(np.mean((scores - y_fit) ** 2))
        if loss < best_loss:
            best_loss = loss
            best_theta = np.array(theta, dtype=np.float64, copy=True)
        history.append(best_loss)
        return loss

    minimize(
        objective,
        theta0,
        method="COBYLA",
        options={"maxiter": budget.max_optimizer_evals, "rhobeg": 0.5},
    )

    model = DruModel(spec=spec, theta=best_theta, trained=True)
    model.loss_history = history
    model.train_row_indices = rows
    return model


def serialize_model(model: DruModel) -> str:
    """Plain-text record; angles stored as hex floats for exact round-trip."""
    lines = [
        "uavqad-dru-model v1",
        f"n_qubits={model.spec.n_qubits}",
        f"n_layers={model.spec.n_layers}",
        f"entanglement={model.spec.entanglement}",
        f"seed={model.spec.seed}",
        f"threshold={float(model.threshold).hex()}",
        f"trained={int(model.trained)}",
        "theta=" + ",".join(float(v).hex() for v in model.theta),
    ]
    return "\n".join(lines) + "\n"


def deserialize_model(text: str) -> DruModel:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "uavqad-dru-model v1":
        raise DataError("not a serialized model record")
    fields = dict(ln.split("=", 1) for ln in lines[1:])
    spec = DruSpec(
        n_qubits=int(fields["n_qubits"]),
        n_layers=int(fields["n_layers"]),
        entanglement=fields["entanglement"],
        seed=int(fields["seed"]),
    )
    theta = np.array([float.fromhex(v) for v in fields["theta"].split(",")])
    return DruModel(
        spec=spec,
        theta=theta,
        threshold=float.fromhex(fields["threshold"]),
        trained=bool(int(fields["trained"])),
    )


def tune_threshold(model: DruModel, x_val: np.ndarray, y_val: np.ndarray) -> float:
    """Optional validation-fold threshold tuning (off by default).

    Scans candidate cuts between consecutive distinct scores and returns the
    one maximising balanced accuracy; ties keep the cut closest to 0.5.
    """
    scores = score_batch(model, x_val)
    y_val = np.asarray(y_val)
    if np.unique(y_val).size < 2:
        return model.threshold
    uniq = np.unique(scores)
    cuts = [0.5]
    cuts.extend(((uniq[:-1] + uniq[1:]) / 2.0).tolist())
    best_cut, best_bal = 0.5, -1.0
    for cut in cuts:
        yhat = scores >= cut
        r0 = np.mean(yhat[y_val == 0] == 0)
        r1 = np.mean(yhat[y_val == 1] == 1)
        bal = (r0 + r1) / 2.0
        if bal > best_bal + 1e-12 or (
            abs(bal - best_bal) <= 1e-12 and abs(cut - 0.5) < abs(best_cut - 0.5)
        ):
            best_bal, best_cut = bal, cut
    if not 0.0 < best_cut < 1.0:
        return model.threshold
    return float(best_cut)
