"""Backtracking line search pairing a trial step size with an inexact solve.

For a fixed anchor y with gradient g and model curvature B, each trial step
size eta produces a candidate

    x = y + s,    s ~ solution of (I + eta B) s = -eta g

through the conjugate-residual solver at relative accuracy alpha1, and the
trial is accepted once

    ||x - y + eta grad_f(x)|| <= (alpha1 + alpha2) ||x - y||.

Step sizes shrink geometrically by beta until acceptance; the last rejected
candidate (and its gradient, already paid for) is returned so the caller can
build a curvature loss sample without extra gradient queries.  Acceptance is
guaranteed once eta < alpha2 / (L1 + ||B||_op), so with consistent inputs the
loop is finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .linear_solver import conjugate_residual
from .oracles import matvec, power_iteration_extreme

UNDERFLOW_RATIO = 1e-16


@dataclass(frozen=True)
class LineSearchOutcome:
    """Accepted pair plus the cached rejected trial, if any.

    ``x_tilde``/``grad_at_x_tilde`` are present iff the search backtracked,
    and come from the trial at step size eta_hat / beta.
    """

    eta_hat: float
    x_hat: np.ndarray
    grad_at_x_hat: np.ndarray
    backtracks: int
    x_tilde: Optional[np.ndarray]
    grad_at_x_tilde: Optional[np.ndarray]
    matvecs: int
    linear_solver_iterations: int


def backtracking_search(y: np.ndarray, g: np.ndarray, B: np.ndarray,
                        eta_init: float, alpha1: float, alpha2: float,
                        beta: float, oracle,
                        max_cr_iters: Optional[int] = None
                        ) -> LineSearchOutcome:
    """Find (eta_hat, x_hat) satisfying the solve and proximal conditions.

    ``g`` must be the gradient at ``y`` (already computed by the caller, never
    re-queried here).  Each trial costs one conjugate-residual solve and one
    gradient query.
    """
    counters = getattr(oracle, "counters", None)
    sigma = alpha1 + alpha2
    eta_hat = float(eta_init)
    x_tilde = None
    grad_tilde = None
    backtracks = 0
    matvecs = 0
    cr_iterations = 0

    while True:
        if eta_hat < UNDERFLOW_RATIO * eta_init:
            op_norm = power_iteration_extreme(
                lambda v: B @ v, B.shape[0], np.random.default_rng(0),
                iterations=20)
            raise ConfigurationError(
                "line search step size underflowed: no trial in "
                f"[{eta_hat:.3e}, {eta_init:.3e}] was accepted; the supplied "
                "smoothness constant is likely inconsistent with the oracle "
                f"(estimated ||B||_op = {op_norm:.3e})")

        def apply_A(v, eta=eta_hat):
            return v + eta * matvec(B, v, counters)

        solve = conjugate_residual(apply_A, -eta_hat * g, alpha1,
                                   max_iters=max_cr_iters)
        matvecs += solve.matvecs
        cr_iterations += solve.iterations
        x_hat = y + solve.s
        grad_hat = oracle.gradient(x_hat)

        displacement = float(np.linalg.norm(x_hat - y))
        proximal_residual = float(np.linalg.norm(
            x_hat - y + eta_hat * grad_hat))
        if proximal_residual <= sigma * displacement:
            return LineSearchOutcome(
                eta_hat=eta_hat, x_hat=x_hat, grad_at_x_hat=grad_hat,
                backtracks=backtracks, x_tilde=x_tilde,
                grad_at_x_tilde=grad_tilde, matvecs=matvecs,
                linear_solver_iterations=cr_iterations)
        x_tilde = x_hat
        grad_tilde = grad_hat
        eta_hat *= beta
        backtracks += 1


def step_size_lower_bound(outcome: LineSearchOutcome, y: np.ndarray,
                          g: np.ndarray, B: np.ndarray,
                          alpha2: float, beta: float) -> float:
    """Certified lower bound on the accepted step size after a backtrack.

    The rejected trial x_tilde failed the proximal condition while satisfying
    the inexact-solve condition, which forces

        eta_hat > alpha2 * beta * ||x_tilde - y||
                  / ||grad_f(x_tilde) - g - B (x_tilde - y)||.

    Used by tests and the self-check battery as a runtime invariant.
    """
    if outcome.x_tilde is None:
        raise ValueError("the search accepted its first trial; no bound")
    displacement = outcome.x_tilde - y
    model_error = outcome.grad_at_x_tilde - g - B @ displacement
    return (alpha2 * beta * float(np.linalg.norm(displacement))
            / float(np.linalg.norm(model_error)))
