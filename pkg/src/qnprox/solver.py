"""Accelerated proximal-extragradient driver with learned curvature.

Each iteration runs four stages: momentum weights and the anchor point,
the backtracking line search for an inexact proximal step, the case-dependent
state update (plain acceleration when the first trial is accepted, momentum
damping when the search backtracks), and, on backtracked iterations only, one
round of the online curvature learner.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, SolverError
from .learner import (LearnerState, LossSample, default_initial_matrix,
                      init_learner, learner_step)
from .line_search import backtracking_search
from .oracles import CountingOracle, estimate_smoothness
from .trace import RunRecord, TraceRow

CASE_ACCEPTED = "I"
CASE_DAMPED = "II"


class _PrecisionFloor(Exception):
    """Internal signal: the iterate is at float resolution of the optimum."""


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of the accelerated solver.

    alpha1 controls the linear-solve accuracy, alpha2 the proximal slack
    (alpha1 + alpha2 < 1), beta the backtracking factor.  sigma0 defaults to
    alpha2 / L1, the choice under which the amortized gradient cost is below
    three queries per iteration.  L1 may be omitted when the oracle carries a
    ``smoothness`` attribute; otherwise it is estimated by curvature probing.
    """

    alpha1: float = 0.1
    alpha2: float = 0.85
    beta: float = 0.5
    sigma0: Optional[float] = None
    L1: Optional[float] = None
    max_iters: int = 100
    tolerance: float = 0.0
    failure_budget: float = 0.01
    rho: float = 1.0 / 128.0
    seed: int = 0
    max_cr_iters: Optional[int] = None

    def validate(self) -> None:
        if not 0.0 < self.alpha1 < 1.0 or not 0.0 < self.alpha2 < 1.0:
            raise ValueError("alpha1 and alpha2 must lie in (0, 1)")
        if self.alpha1 + self.alpha2 >= 1.0:
            raise ValueError("alpha1 + alpha2 must be < 1")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.sigma0 is not None and self.sigma0 <= 0.0:
            raise ValueError("sigma0 must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 < self.failure_budget < 1.0:
            raise ValueError("failure_budget must lie in (0, 1)")


@dataclass
class SolverState:
    x: np.ndarray
    z: np.ndarray
    A: float
    eta: float
    learner: LearnerState
    k: int


@dataclass(frozen=True)
class IterationReport:
    """Internals of one iteration, for invariant checks and diagnostics."""

    k: int
    a: float
    eta: float
    eta_hat: float
    case: str
    backtracks: int
    y: np.ndarray
    x_hat: np.ndarray
    x: np.ndarray
    z: np.ndarray
    A: float
    grad_norm_at_x_hat: float
    x_tilde: Optional[np.ndarray]
    grad_at_y: np.ndarray
    grad_at_x_tilde: Optional[np.ndarray]
    loss_fed: Optional[float]
    B_used: np.ndarray
    B: np.ndarray
    gamma: Optional[float]
    line_search_matvecs: int
    learner_matvecs: int


def momentum_weights(A: float, eta: float, x: np.ndarray, z: np.ndarray
                     ) -> tuple[float, np.ndarray]:
    """Momentum weight a and anchor y = (A x + a z) / (A + a).

    a solves a^2 = eta (A + a), so eta * (A + a) == a * a up to rounding.
    """
    a = (eta + math.sqrt(eta * eta + 4.0 * eta * A)) / 2.0
    y = (A * x + a * z) / (A + a)
    return a, y


def damped_iterate(x: np.ndarray, x_hat: np.ndarray, A: float, a: float,
                   gamma: float) -> np.ndarray:
    """Momentum-damped convex combination used when the search backtracks."""
    return ((1.0 - gamma) * A * x + gamma * (A + a) * x_hat) / (A + gamma * a)


def step(state: SolverState, oracle: CountingOracle, config: SolverConfig,
         rng: np.random.Generator) -> tuple[SolverState, IterationReport]:
    """Advance one iteration; feeds the learner only when backtracked."""
    a, y = momentum_weights(state.A, state.eta, state.x, state.z)
    grad_y = oracle.gradient(y)
    try:
        outcome = backtracking_search(
            y, grad_y, state.learner.B, state.eta, config.alpha1,
            config.alpha2, config.beta, oracle,
            max_cr_iters=config.max_cr_iters)
    except ConfigurationError:
        # a gradient at float-noise scale means displacements round away and
        # no step size can satisfy the proximal test: converged to the floor
        floor = (4096.0 * np.finfo(float).eps * state.learner.L1
                 * (1.0 + float(np.linalg.norm(y))))
        if float(np.linalg.norm(grad_y)) <= floor:
            raise _PrecisionFloor from None
        raise

    learner_matvecs = 0
    if outcome.backtracks == 0:
        x_next = outcome.x_hat
        z_next = state.z - a * outcome.grad_at_x_hat
        A_next = state.A + a
        eta_next = outcome.eta_hat / config.beta
        learner = state.learner
        case = CASE_ACCEPTED
        loss_fed = None
        gamma = None
    else:
        gamma = outcome.eta_hat / state.eta
        x_next = damped_iterate(state.x, outcome.x_hat, state.A, a, gamma)
        z_next = state.z - gamma * a * outcome.grad_at_x_hat
        A_next = state.A + gamma * a
        eta_next = outcome.eta_hat
        sample = LossSample(w=outcome.grad_at_x_tilde - grad_y,
                            s=outcome.x_tilde - y)
        learner, learner_report = learner_step(
            state.learner, sample, rng, oracle.counters)
        case = CASE_DAMPED
        loss_fed = learner_report.loss_value
        learner_matvecs = learner_report.matvecs

    next_state = SolverState(x=x_next, z=z_next, A=A_next, eta=eta_next,
                             learner=learner, k=state.k + 1)
    report = IterationReport(
        k=state.k, a=a, eta=state.eta, eta_hat=outcome.eta_hat, case=case,
        backtracks=outcome.backtracks, y=y, x_hat=outcome.x_hat, x=x_next,
        z=z_next, A=A_next,
        grad_norm_at_x_hat=float(np.linalg.norm(outcome.grad_at_x_hat)),
        x_tilde=outcome.x_tilde, grad_at_y=grad_y,
        grad_at_x_tilde=outcome.grad_at_x_tilde, loss_fed=loss_fed,
        B_used=state.learner.B, B=learner.B, gamma=gamma,
        line_search_matvecs=outcome.matvecs,
        learner_matvecs=learner_matvecs)
    return next_state, report


def solve(oracle, x0: np.ndarray, z0: Optional[np.ndarray] = None,
          config: Optional[SolverConfig] = None,
          B0: Optional[np.ndarray] = None,
          observer: Optional[Callable[[IterationReport], None]] = None
          ) -> RunRecord:
    """Minimize the oracle's objective from (x0, z0).

    Runs until ``config.max_iters`` or until the gradient norm at the
    accepted extragradient point drops to ``config.tolerance`` (that gradient
    is already paid for by the line search, so the stopping test adds no
    oracle queries).  Returns the per-iteration trace; an ``observer``
    receives the full :class:`IterationReport` each iteration.

    On failure the partial trace is attached to the raised
    :class:`SolverError`.
    """
    config = config if config is not None else SolverConfig()
    config.validate()
    if not isinstance(oracle, CountingOracle):
        oracle = CountingOracle(oracle)
    counters = oracle.counters

    L1 = config.L1
    if L1 is None:
        L1 = oracle.smoothness
    if L1 is None:
        L1 = estimate_smoothness(oracle.inner, seed=config.seed)
    sigma0 = config.sigma0 if config.sigma0 is not None else config.alpha2 / L1

    x = np.asarray(x0, dtype=float).copy()
    z = x.copy() if z0 is None else np.asarray(z0, dtype=float).copy()
    if B0 is None:
        B0 = default_initial_matrix(x.shape[0], L1)
    learner = init_learner(B0, L1, rho=config.rho,
                           failure_budget=config.failure_budget)
    state = SolverState(x=x, z=z, A=0.0, eta=sigma0, learner=learner, k=0)
    rng = np.random.default_rng(config.seed)

    record = RunRecord(method="aqnpe", metadata={
        "alpha1": format(config.alpha1, ".17g"),
        "alpha2": format(config.alpha2, ".17g"),
        "beta": format(config.beta, ".17g"),
        "sigma0": format(sigma0, ".17g"),
        "L1": format(L1, ".17g"),
        "seed": str(config.seed),
        "max_iters": str(config.max_iters),
        "tolerance": format(config.tolerance, ".17g"),
    })
    start = time.perf_counter()
    try:
        for _ in range(config.max_iters):
            try:
                state, report = step(state, oracle, config, rng)
            except _PrecisionFloor:
                record.metadata["stopped"] = "precision_floor"
                break
            record.append(TraceRow(
                iteration=state.k,
                f_value=float(oracle.value(state.x)),
                eta_hat=report.eta_hat,
                case=report.case,
                backtracks=report.backtracks,
                grad_queries=counters.gradient_queries,
                matvecs=counters.matvecs,
            ))
            if observer is not None:
                observer(report)
            if report.grad_norm_at_x_hat <= config.tolerance:
                break
    except Exception as exc:
        record.wall_time = time.perf_counter() - start
        record.final_x = state.x
        raise SolverError(f"solver aborted at iteration {state.k}: {exc}",
                          trace=record) from exc
    record.wall_time = time.perf_counter() - start
    record.final_x = state.x
    return record
