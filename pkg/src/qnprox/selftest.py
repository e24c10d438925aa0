"""Built-in invariant battery behind ``bench selftest``.

A compact runtime counterpart of the test suite: each check exercises one
contract of the stack (momentum identity, linear-solver residual bounds,
separation-oracle certificates, learner feasibility, line-search step-size
bounds, and the end-to-end convergence certificate on a small logistic
instance) and prints one PASS/FAIL line.
"""

from __future__ import annotations

import math

import numpy as np

from .datasets import LogisticObjective, SyntheticLogisticSpec, generate_logistic
from .baselines import BaselineConfig, bfgs_solve
from .errors import ConvergenceError
from .learner import LossSample, init_learner, learner_step
from .line_search import backtracking_search, step_size_lower_bound
from .linear_solver import conjugate_residual
from .oracles import CountingOracle
from .separation import separation_oracle
from .solver import IterationReport, SolverConfig, momentum_weights, solve


def _random_psd(rng, d, top=1.0):
    Q = rng.standard_normal((d, d))
    M = Q @ Q.T
    return M * (top / np.linalg.eigvalsh(M)[-1])


def check_momentum_identity():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        A = float(rng.uniform(0.0, 100.0))
        eta = float(rng.uniform(1e-6, 100.0))
        a, _ = momentum_weights(A, eta, np.zeros(2), np.zeros(2))
        worst = max(worst, abs(eta * (A + a) - a * a) / (a * a))
    return worst <= 1e-12, f"max relative identity error {worst:.2e}"


def check_linear_solver():
    rng = np.random.default_rng(1)
    d, alpha = 15, 0.1
    for trial in range(20):
        B = _random_psd(rng, d)
        eta = float(rng.uniform(0.1, 10.0))
        A = np.eye(d) + eta * B
        b = rng.standard_normal(d)
        result = conjugate_residual(lambda v: A @ v, b, alpha)
        if np.linalg.norm(A @ result.s - b) > alpha * np.linalg.norm(result.s):
            return False, f"contract violated on trial {trial}"
        lam_max = float(np.linalg.eigvalsh(A)[-1])
        s_star = np.linalg.solve(A, b)
        for k, res in enumerate(result.residual_history):
            if res > lam_max * np.linalg.norm(s_star) / (k + 1) ** 2 + 1e-9:
                return False, f"residual bound violated at iteration {k}"
        cap = math.ceil(math.sqrt((alpha + 1.0) / alpha * lam_max))
        if result.iterations > cap:
            return False, f"terminated in {result.iterations} > cap {cap}"
    one_step = conjugate_residual(
        lambda v: v + (alpha / 2.0) * (_random_psd(rng, d) @ v),
        rng.standard_normal(d), alpha)
    return one_step.iterations <= 1, "one-step termination when eta <= alpha/(2 L1)"


def check_separation_oracle():
    rng = np.random.default_rng(2)
    d = 20
    failures = 0
    calls = 30
    for trial in range(calls):
        target = float(rng.choice([0.4, 1.2, 4.0]))
        W = _random_psd(rng, d, top=1.0)
        W = W / np.linalg.norm(W, 2) * target
        W = (W + W.T) / 2.0
        result = separation_oracle(W, delta=0.05, q=0.05, seed=trial)
        op = float(np.abs(np.linalg.eigvalsh(W)).max())
        if result.separated:
            s_norm = float(np.linalg.norm(result.hyperplane))
            ok = (op <= result.gamma * (1.0 + 1e-8)
                  and (abs(s_norm - 1.0) < 1e-9 or abs(s_norm - 3.0) < 1e-9))
        else:
            ok = op <= 1.0 + 1e-8
        failures += 0 if ok else 1
    return failures <= max(1, int(0.05 * calls)), f"{failures}/{calls} certificate failures"


def check_learner():
    rng = np.random.default_rng(3)
    d, L1 = 8, 1.0
    state = init_learner((L1 / 2.0) * np.eye(d), L1)
    for t in range(25):
        s = rng.standard_normal(d)
        H = _random_psd(rng, d, top=L1)
        sample = LossSample(w=H @ s, s=s)
        state, report = learner_step(state, sample, seed=rng)
        if report.loss_value > L1 ** 2 * (1.0 + 1e-8):
            return False, f"loss {report.loss_value:.3e} above L1^2 at round {t}"
        if np.linalg.norm(state.W) > math.sqrt(d) + 1e-12:
            return False, "Frobenius-ball constraint violated"
        eigs = np.linalg.eigvalsh(state.B)
        if eigs[0] < -1e-8 * L1 or eigs[-1] > (1.0 + 1e-8) * L1:
            return False, f"infeasible matrix at round {t}"
    return True, "feasibility, loss bound, and ball constraint hold"


def _small_logistic(n=120, d=12, seed=7):
    dataset = generate_logistic(SyntheticLogisticSpec(n=n, d=d, sigma=0.8,
                                                      seed=seed))
    return LogisticObjective(dataset)


def check_line_search():
    objective = _small_logistic()
    oracle = CountingOracle(objective)
    rng = np.random.default_rng(4)
    alpha1, alpha2, beta = 0.1, 0.85, 0.5
    for trial in range(5):
        y = rng.standard_normal(objective.dimension)
        g = oracle.gradient(y)
        B = _random_psd(rng, objective.dimension, top=objective.smoothness)
        before = oracle.counters.gradient_queries
        outcome = backtracking_search(y, g, B, 64.0 / objective.smoothness,
                                      alpha1, alpha2, beta, oracle)
        spent = oracle.counters.gradient_queries - before
        if spent != outcome.backtracks + 1:
            return False, f"gradient accounting off: {spent} queries"
        if outcome.backtracks > 0:
            bound = step_size_lower_bound(outcome, y, g, B, alpha2, beta)
            if outcome.eta_hat < bound * (1.0 - 1e-10):
                return False, "step-size lower bound violated"
            ratio = (1.0 + alpha1) / (beta * (1.0 - alpha1))
            if (np.linalg.norm(outcome.x_tilde - y)
                    > ratio * np.linalg.norm(outcome.x_hat - y) * (1.0 + 1e-10)):
                return False, "displacement relation violated"
    return True, "accounting and backtrack bounds hold"


def check_solver_certificate():
    objective = _small_logistic()
    try:
        reference = bfgs_solve(objective, np.zeros(objective.dimension),
                               BaselineConfig(max_iters=500, tolerance=1e-13))
        x_star = reference.final_x
    except ConvergenceError as exc:  # numerical floor; best iterate is fine
        x_star = exc.best
    f_star = float(objective.value(x_star))

    reports: list[IterationReport] = []
    record = solve(objective, np.zeros(objective.dimension),
                   config=SolverConfig(max_iters=120, seed=0),
                   observer=reports.append)
    z0_dist_sq = float(x_star @ x_star)
    phi_prev = 0.5 * z0_dist_sq
    for report in reports:
        gap = float(objective.value(report.x)) - f_star
        if gap > z0_dist_sq / (2.0 * report.A) * (1.0 + 1e-10) + 1e-15:
            return False, f"certificate violated at k={report.k}"
        phi = report.A * gap + 0.5 * float(
            (report.z - x_star) @ (report.z - x_star))
        if phi > phi_prev + 1e-9 * 0.5 * z0_dist_sq:
            return False, f"potential increased at k={report.k}"
        phi_prev = phi
    queries = record.rows[-1].grad_queries
    if queries > 3 * len(record.rows):
        return False, f"gradient accounting exceeded 3N ({queries})"
    return True, "certificate, potential, and query bound hold"


CHECKS = (
    ("momentum-identity", check_momentum_identity),
    ("linear-solver", check_linear_solver),
    ("separation-oracle", check_separation_oracle),
    ("learner", check_learner),
    ("line-search", check_line_search),
    ("solver-certificate", check_solver_certificate),
)


def run_selftest(out=print) -> bool:
    all_ok = True
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok = all_ok and ok
        out(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all_ok
