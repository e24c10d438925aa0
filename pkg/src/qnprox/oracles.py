"""Objective oracles, dense symmetric-matrix helpers, and query accounting.

All vectors are 1-d ``numpy.float64`` arrays and all curvature matrices are
dense symmetric ``d x d`` arrays.  Every d x d matrix-vector product in the
stack goes through :func:`matvec` with a shared :class:`OracleCounters`
instance, so oracle-complexity claims (gradient queries, matvecs) can be
audited exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol, runtime_checkable

import numpy as np


@dataclass
class OracleCounters:
    """Mutable accounting channel for one solver run.

    Counters only ever increase.  A single instance is threaded through the
    linear solver, the separation oracle, the learner and the line search so
    that the total equals the sum of per-module reports.
    """

    gradient_queries: int = 0
    matvecs: int = 0

    def count_gradient(self) -> None:
        self.gradient_queries += 1

    def count_matvec(self, n: int = 1) -> None:
        self.matvecs += n


@runtime_checkable
class ObjectiveOracle(Protocol):
    """Smooth convex objective exposing values and gradients.

    ``hessian`` is an optional capability used only by tests and by
    :func:`estimate_smoothness`; solvers never call it.
    """

    dimension: int

    def value(self, x: np.ndarray) -> float: ...

    def gradient(self, x: np.ndarray) -> np.ndarray: ...


class CountingOracle:
    """Wraps an objective so every gradient call increments the counters."""

    def __init__(self, inner, counters: Optional[OracleCounters] = None):
        self.inner = inner
        self.counters = counters if counters is not None else OracleCounters()

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    @property
    def smoothness(self):
        return getattr(self.inner, "smoothness", None)

    def value(self, x: np.ndarray) -> float:
        return self.inner.value(x)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        self.counters.count_gradient()
        return self.inner.gradient(x)

    def hessian(self, x: np.ndarray) -> np.ndarray:
        return self.inner.hessian(x)


def matvec(matrix: np.ndarray, vector: np.ndarray,
           counters: Optional[OracleCounters] = None) -> np.ndarray:
    """Dense d x d matrix-vector product, counted on the accounting channel."""
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    if vector.ndim != 1 or vector.shape[0] != matrix.shape[1]:
        raise ValueError(
            f"dimension mismatch: matrix {matrix.shape} vs vector {vector.shape}"
        )
    if counters is not None:
        counters.count_matvec()
    return matrix @ vector


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """Exactly symmetric part (M + M^T) / 2.

    IEEE addition is commutative, so entries (i, j) and (j, i) of the result
    are bit-identical.
    """
    return (matrix + matrix.T) / 2.0


def frobenius_inner(a: np.ndarray, b: np.ndarray) -> float:
    """trace(A^T B), the Frobenius inner product."""
    return float(np.sum(a * b))


class QuadraticObjective:
    """f(x) = 1/2 (x - c)^T Q (x - c) for symmetric PSD Q.

    Mostly a test fixture; ``smoothness`` is the largest eigenvalue of Q.
    """

    def __init__(self, Q: np.ndarray, center: Optional[np.ndarray] = None):
        self.Q = symmetrize(np.asarray(Q, dtype=float))
        self.dimension = self.Q.shape[0]
        self.center = (np.zeros(self.dimension) if center is None
                       else np.asarray(center, dtype=float))
        self.smoothness = float(np.linalg.eigvalsh(self.Q)[-1])

    def value(self, x: np.ndarray) -> float:
        r = x - self.center
        return 0.5 * float(r @ (self.Q @ r))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.Q @ (x - self.center)

    def hessian(self, x: np.ndarray) -> np.ndarray:
        return self.Q.copy()


def power_iteration_extreme(apply_h, dimension: int, rng,
                            iterations: int = 100) -> float:
    """Largest-magnitude Rayleigh quotient of a symmetric operator.

    Plain power iteration from a Gaussian start; returns the final Rayleigh
    quotient, which never exceeds the true extreme eigenvalue in magnitude.
    """
    v = rng.standard_normal(dimension)
    v /= np.linalg.norm(v)
    rayleigh = 0.0
    for _ in range(iterations):
        hv = apply_h(v)
        norm = np.linalg.norm(hv)
        if norm == 0.0:
            return 0.0
        rayleigh = float(v @ hv)
        v = hv / norm
    return abs(rayleigh)


def estimate_smoothness(oracle, probes: int = 5, seed: int = 0,
                        iterations: int = 100) -> float:
    """Estimate sup ||hessian(x)||_op by power iteration at random points.

    Draws ``probes`` standard-normal points (all up front, so tests can
    reproduce them from the seed), runs power iteration on the Hessian at
    each, and inflates the largest Rayleigh quotient by a 1.1 safety factor.
    Falls back to central-difference Hessian-vector products when the oracle
    exposes no ``hessian``.
    """
    if probes < 1:
        raise ValueError("probes must be >= 1")
    rng = np.random.default_rng(seed)
    points = rng.standard_normal((probes, oracle.dimension))
    has_hessian = hasattr(oracle, "hessian")
    best = 0.0
    for x in points:
        if has_hessian:
            H = oracle.hessian(x)
            apply_h = lambda v: H @ v
        else:
            step = 1e-6 * max(1.0, float(np.linalg.norm(x)))
            apply_h = lambda v, x=x, h=step: (
                oracle.gradient(x + h * v) - oracle.gradient(x - h * v)
            ) / (2.0 * h)
        best = max(best, power_iteration_extreme(apply_h, oracle.dimension,
                                                 rng, iterations))
    estimate = 1.1 * best
    if not np.isfinite(estimate):
        from .errors import NumericsError

        raise NumericsError("curvature estimate is not finite")
    return estimate
