import math

import numpy as np
import pytest

from qnprox import CountingOracle, QuadraticObjective, backtracking_search
from qnprox.errors import ConfigurationError
from qnprox.line_search import step_size_lower_bound
from conftest import make_logistic, random_psd

ALPHA1, ALPHA2, BETA = 0.1, 0.85, 0.5


def conditions_hold(outcome, y, g, B, eta_hat):
    lhs_solver = np.linalg.norm(
        outcome.x_hat - y + eta_hat * (g + B @ (outcome.x_hat - y)))
    lhs_prox = np.linalg.norm(
        outcome.x_hat - y + eta_hat * outcome.grad_at_x_hat)
    disp = np.linalg.norm(outcome.x_hat - y)
    return (lhs_solver <= ALPHA1 * disp + 1e-14
            and lhs_prox <= (ALPHA1 + ALPHA2) * disp + 1e-14)


class TestAcceptance:
    def test_stationary_anchor_accepts_immediately(self):
        oracle = CountingOracle(QuadraticObjective(np.eye(4)))
        y = np.zeros(4)
        g = oracle.inner.gradient(y)
        assert np.linalg.norm(g) == 0.0
        outcome = backtracking_search(y, g, np.eye(4), 7.0, ALPHA1, ALPHA2,
                                      BETA, oracle)
        assert outcome.backtracks == 0
        assert outcome.eta_hat == 7.0
        assert np.array_equal(outcome.x_hat, y)
        assert outcome.x_tilde is None

    def test_exact_curvature_accepts_any_initial_step(self):
        # with B equal to the true Hessian of a quadratic the model error
        # vanishes and the first trial always passes
        rng = np.random.default_rng(0)
        Q = random_psd(rng, 6, top=4.0)
        oracle = CountingOracle(QuadraticObjective(Q))
        y = rng.standard_normal(6)
        g = oracle.inner.gradient(y)
        for eta_init in (1e-3, 1.0, 1e4):
            outcome = backtracking_search(y, g, Q.copy(), eta_init, 0.05,
                                          ALPHA2, BETA, oracle)
            assert outcome.backtracks == 0
            assert outcome.eta_hat == eta_init

    def test_zero_curvature_backtrack_count(self):
        objective = make_logistic(150, 20, seed=3)
        oracle = CountingOracle(objective)
        L1 = objective.smoothness
        rng = np.random.default_rng(1)
        y = rng.standard_normal(20)
        g = oracle.gradient(y)
        eta_init = 1e6 / L1
        outcome = backtracking_search(y, g, np.zeros((20, 20)), eta_init,
                                      ALPHA1, ALPHA2, BETA, oracle)
        cap = math.ceil(math.log(eta_init * L1 / ALPHA2)
                        / math.log(1.0 / BETA)) + 1
        assert outcome.backtracks <= cap
        assert conditions_hold(outcome, y, g, np.zeros((20, 20)),
                               outcome.eta_hat)


@pytest.fixture(scope="module")
def backtracked():
    objective = make_logistic(150, 20, seed=3)
    oracle = CountingOracle(objective)
    rng = np.random.default_rng(2)
    runs = []
    for _ in range(10):
        y = rng.standard_normal(20)
        g = oracle.gradient(y)
        B = random_psd(rng, 20, top=objective.smoothness)
        before = oracle.counters.gradient_queries
        outcome = backtracking_search(
            y, g, B, 256.0 / objective.smoothness, ALPHA1, ALPHA2, BETA,
            oracle)
        spent = oracle.counters.gradient_queries - before
        runs.append((y, g, B, outcome, spent, objective))
    return runs


class TestInvariants:
    def test_gradient_accounting_one_per_trial(self, backtracked):
        for _, _, _, outcome, spent, _ in backtracked:
            assert spent == outcome.backtracks + 1

    def test_step_size_lower_bound(self, backtracked):
        seen = 0
        for y, g, B, outcome, _, _ in backtracked:
            if outcome.backtracks == 0:
                continue
            seen += 1
            bound = step_size_lower_bound(outcome, y, g, B, ALPHA2, BETA)
            assert outcome.eta_hat >= bound * (1.0 - 1e-10)
        assert seen > 0

    def test_displacement_relation(self, backtracked):
        ratio = (1.0 + ALPHA1) / (BETA * (1.0 - ALPHA1))
        for y, _, _, outcome, _, _ in backtracked:
            if outcome.backtracks == 0:
                continue
            assert (np.linalg.norm(outcome.x_tilde - y)
                    <= ratio * np.linalg.norm(outcome.x_hat - y)
                    * (1.0 + 1e-10))

    def test_accepted_pair_satisfies_both_conditions(self, backtracked):
        for y, g, B, outcome, _, _ in backtracked:
            assert conditions_hold(outcome, y, g, B, outcome.eta_hat)

    def test_step_size_floor_when_backtracked(self, backtracked):
        # acceptance is guaranteed below alpha2 / (L1 + ||B||_op), so the
        # accepted step can undershoot that threshold by at most one beta
        for y, g, B, outcome, _, objective in backtracked:
            if outcome.backtracks == 0:
                continue
            op = float(np.abs(np.linalg.eigvalsh(B)).max())
            floor = ALPHA2 * BETA / (objective.smoothness + op)
            assert outcome.eta_hat >= floor * (1.0 - 1e-10)

    def test_cached_gradients_match_oracle(self, backtracked):
        for _, _, _, outcome, _, objective in backtracked:
            assert np.array_equal(outcome.grad_at_x_hat,
                                  objective.gradient(outcome.x_hat))
            if outcome.x_tilde is not None:
                assert np.array_equal(outcome.grad_at_x_tilde,
                                      objective.gradient(outcome.x_tilde))


class FlippingOracle:
    """Adversarially nonsmooth: the gradient flips sign away from the anchor,
    so no step size can satisfy the proximal condition."""

    dimension = 3

    def __init__(self, anchor, pull):
        self.anchor = anchor
        self.pull = pull

    def value(self, x):
        return 0.0

    def gradient(self, x):
        if np.array_equal(x, self.anchor):
            return self.pull.copy()
        return -self.pull.copy()


class TestErrors:
    def test_underflow_raises_configuration_error(self):
        anchor = np.zeros(3)
        pull = np.array([1.0, 0.0, 0.0])
        oracle = CountingOracle(FlippingOracle(anchor, pull))
        with pytest.raises(ConfigurationError):
            backtracking_search(anchor, pull, np.zeros((3, 3)), 1.0, ALPHA1,
                                ALPHA2, BETA, oracle)

    def test_lower_bound_requires_backtrack(self):
        oracle = CountingOracle(QuadraticObjective(np.eye(2)))
        y = np.zeros(2)
        outcome = backtracking_search(y, np.zeros(2), np.eye(2), 1.0, ALPHA1,
                                      ALPHA2, BETA, oracle)
        with pytest.raises(ValueError):
            step_size_lower_bound(outcome, y, np.zeros(2), np.eye(2), ALPHA2,
                                  BETA)
