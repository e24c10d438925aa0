"""Shared fixtures: the desk-scale logistic instance, its high-accuracy
reference optimum, and one fully-observed 500-iteration solver run that the
acceptance criteria share."""

from __future__ import annotations

import numpy as np
import pytest

from qnprox import (BaselineConfig, LogisticObjective, SolverConfig,
                    SyntheticLogisticSpec, bfgs_solve, generate_logistic,
                    solve)
from qnprox.errors import ConvergenceError


def random_psd(rng, d, top=1.0):
    """Random symmetric PSD matrix rescaled so its largest eigenvalue is top."""
    Q = rng.standard_normal((d, d))
    M = Q @ Q.T
    M = M * (top / np.linalg.eigvalsh(M)[-1])
    return (M + M.T) / 2.0


def random_unit_opnorm(rng, d):
    """Random symmetric matrix with operator norm exactly 1."""
    M = rng.standard_normal((d, d))
    M = (M + M.T) / 2.0
    return M / np.abs(np.linalg.eigvalsh(M)).max()


def reference_minimizer(objective, x0):
    """BFGS to its numerical floor, then Newton polish to ||grad|| <= 1e-13."""
    try:
        record = bfgs_solve(objective, x0,
                            BaselineConfig(max_iters=2000, tolerance=1e-13))
        x = record.final_x
    except ConvergenceError as exc:
        x = exc.best
    for _ in range(10):
        g = objective.gradient(x)
        if np.linalg.norm(g) <= 1e-14:
            break
        x = x - np.linalg.solve(objective.hessian(x), g)
    assert np.linalg.norm(objective.gradient(x)) <= 1e-13
    return x


def make_logistic(n, d, seed, sigma=0.8):
    dataset = generate_logistic(SyntheticLogisticSpec(n=n, d=d, sigma=sigma,
                                                      seed=seed))
    return LogisticObjective(dataset)


@pytest.fixture(scope="session")
def logistic_instance():
    """The acceptance-scale instance: n=500, d=50, sigma=0.8, seed 0."""
    return make_logistic(500, 50, seed=0)


@pytest.fixture(scope="session")
def reference_optimum(logistic_instance):
    x_star = reference_minimizer(logistic_instance,
                                 np.zeros(logistic_instance.dimension))
    return x_star, float(logistic_instance.value(x_star))


@pytest.fixture(scope="session")
def criterion_run(logistic_instance):
    """500 observed iterations on the acceptance instance (seed 0)."""
    reports = []
    config = SolverConfig(max_iters=500, seed=0)
    record = solve(logistic_instance, np.zeros(logistic_instance.dimension),
                   np.zeros(logistic_instance.dimension), config,
                   observer=reports.append)
    return record, reports, config


@pytest.fixture(scope="session")
def small_logistic():
    """A quick instance for module-level solver tests."""
    return make_logistic(120, 12, seed=7)
