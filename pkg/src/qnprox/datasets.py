"""Synthetic logistic-regression instances and their CSV format.

Labels come from a noise-free linear rule y_i = sign(<a*_i, x*>) in dimension
d - 1; the observed features add Gaussian noise and a constant shift of one
to every coordinate and append a constant-one intercept column:

    a_i = [a*_i + n_i + 1; 1],    n_i ~ N(0, sigma^2 I).

The objective is the averaged logistic loss
f(x) = (1/n) sum_i log(1 + exp(-y_i <a_i, x>)), whose gradient is Lipschitz
with constant lambda_max(A^T A) / (4 n).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import expit

from .oracles import power_iteration_extreme
from .trace import format_float

DATA_HEADER_PREFIX = "y,a_0"


@dataclass(frozen=True)
class SyntheticLogisticSpec:
    n: int
    d: int
    sigma: float
    seed: int

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.d < 2:
            raise ValueError("d must be >= 2 (one feature plus intercept)")
        if self.sigma < 0.0:
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class LogisticDataset:
    features: np.ndarray  # (n, d), last column all ones
    labels: np.ndarray    # (n,), entries +-1
    true_parameter: Optional[np.ndarray] = None  # ground truth, not serialized

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


def generate_logistic(spec: SyntheticLogisticSpec) -> LogisticDataset:
    """Draw a dataset; a fixed seed gives a bit-identical result."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    x_star = rng.standard_normal(spec.d - 1)
    a_star = rng.standard_normal((spec.n, spec.d - 1))
    noise = rng.standard_normal((spec.n, spec.d - 1)) * spec.sigma
    labels = np.where(a_star @ x_star >= 0.0, 1.0, -1.0)
    features = np.hstack([a_star + noise + 1.0, np.ones((spec.n, 1))])
    return LogisticDataset(features=features, labels=labels,
                           true_parameter=x_star)


class LogisticObjective:
    """Averaged logistic loss over a fixed dataset."""

    def __init__(self, dataset: LogisticDataset, smoothness_seed: int = 0):
        self.features = dataset.features
        self.labels = dataset.labels
        self.dimension = dataset.d
        self._signed = self.features * self.labels[:, None]
        self.smoothness = self._compute_smoothness(smoothness_seed)

    def _compute_smoothness(self, seed: int) -> float:
        A = self.features
        n = A.shape[0]
        scale = 1.0 / (4.0 * n)
        apply_h = lambda v: scale * (A.T @ (A @ v))
        rng = np.random.default_rng(seed)
        return power_iteration_extreme(apply_h, A.shape[1], rng,
                                       iterations=300)

    def value(self, x: np.ndarray) -> float:
        margins = self._signed @ x
        return float(np.mean(np.logaddexp(0.0, -margins)))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        margins = self._signed @ x
        weights = expit(-margins)
        return -(self._signed.T @ weights) / self._signed.shape[0]

    def hessian(self, x: np.ndarray) -> np.ndarray:
        margins = self._signed @ x
        weights = expit(margins) * expit(-margins)
        return (self.features.T * weights) @ self.features / self.features.shape[0]


def write_dataset_csv(dataset: LogisticDataset, path) -> None:
    d = dataset.d
    header = "y," + ",".join(f"a_{j}" for j in range(d))
    lines = [header]
    for i in range(dataset.n):
        row = [format(int(dataset.labels[i]), "d")]
        row.extend(format_float(v) for v in dataset.features[i])
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_dataset_csv(path) -> LogisticDataset:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith(DATA_HEADER_PREFIX):
        raise ValueError(f"{path} is not a dataset CSV (bad header)")
    labels = []
    rows = []
    for line in text[1:]:
        if not line:
            continue
        parts = line.split(",")
        labels.append(float(parts[0]))
        rows.append([float(v) for v in parts[1:]])
    features = np.asarray(rows, dtype=float)
    labels_arr = np.asarray(labels, dtype=float)
    if not np.all(np.abs(labels_arr) == 1.0):
        raise ValueError("labels must be +-1")
    return LogisticDataset(features=features, labels=labels_arr)
