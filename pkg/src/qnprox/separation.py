"""Approximate separation oracle for the unit operator-norm ball.

Given a symmetric W with ||W||_F <= sqrt(d), the oracle either certifies
||W||_op <= 1 or returns a scale gamma > 1 with ||W / gamma||_op <= 1 together
with a rank-one hyperplane S satisfying <S, W - B> >= gamma - 1 - delta for
every B in the ball, each guarantee holding with probability at least 1 - q.
Extreme eigenpairs are estimated by the Lanczos method from a random start on
the unit sphere, with full reorthogonalization (d stays small here, and it
keeps the Ritz values trustworthy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .oracles import OracleCounters, matvec

LANCZOS_BREAKDOWN = 1e-14


class LanczosExtremes(NamedTuple):
    u_max: np.ndarray
    lam_max: float
    u_min: np.ndarray
    lam_min: float
    matvecs: int


@dataclass(frozen=True)
class SeparationResult:
    gamma: float
    hyperplane: np.ndarray
    separated: bool
    matvecs: int

    @property
    def inside(self) -> bool:
        return not self.separated


def lanczos_extreme(W: np.ndarray, iterations: int, seed,
                    counters: Optional[OracleCounters] = None) -> LanczosExtremes:
    """Extreme Ritz pairs of symmetric W after ``iterations`` Lanczos steps.

    The start vector is standard Gaussian normalized to the unit sphere.  On
    Krylov breakdown (beta below 1e-14) the basis is truncated and the current
    Ritz extremes are returned; they are valid Rayleigh quotients either way
    because the reported values are recomputed as <W u, u>.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    d = W.shape[0]
    iterations = min(iterations, d)
    rng = np.random.default_rng(seed)

    q = rng.standard_normal(d)
    q /= np.linalg.norm(q)
    basis = np.zeros((d, iterations))
    alphas = np.zeros(iterations)
    betas = np.zeros(max(iterations - 1, 0))
    matvecs = 0
    steps = 0
    for j in range(iterations):
        basis[:, j] = q
        u = matvec(W, q, counters)
        matvecs += 1
        alphas[j] = float(q @ u)
        steps = j + 1
        if j == iterations - 1:
            break
        r = u - alphas[j] * q
        if j > 0:
            r -= betas[j - 1] * basis[:, j - 1]
        # full reorthogonalization against the stored basis
        r -= basis[:, : j + 1] @ (basis[:, : j + 1].T @ r)
        beta = float(np.linalg.norm(r))
        if beta < LANCZOS_BREAKDOWN:
            break
        betas[j] = beta
        q = r / beta

    if steps == 1:
        ritz_vals = alphas[:1]
        ritz_vecs = np.ones((1, 1))
    else:
        ritz_vals, ritz_vecs = eigh_tridiagonal(alphas[:steps],
                                                betas[: steps - 1])
    Q = basis[:, :steps]

    u_max = Q @ ritz_vecs[:, -1]
    u_max /= np.linalg.norm(u_max)
    u_min = Q @ ritz_vecs[:, 0]
    u_min /= np.linalg.norm(u_min)
    lam_max = float(u_max @ matvec(W, u_max, counters))
    lam_min = float(u_min @ matvec(W, u_min, counters))
    matvecs += 2
    return LanczosExtremes(u_max, lam_max, u_min, lam_min, matvecs)


def _lanczos_rounds(d: int, q: float) -> float:
    return math.log(11.0 * d / q ** 2)


def separation_oracle(W: np.ndarray, delta: float, q: float, seed,
                      counters: Optional[OracleCounters] = None
                      ) -> SeparationResult:
    """Randomized separation oracle for {B symmetric : ||B||_op <= 1}.

    First pass: a coarse Lanczos run of min(ceil(log(11 d / q^2) + 1/2), d)
    steps estimates lam_hat = max(lam_1, -lam_d).  If lam_hat <= 1/2 the input
    is certified inside (gamma = 2 lam_hat, S = 0); if lam_hat >= 2 it is
    separated with the scaled certificate gamma = 2 lam_hat and S = +/- 3 u u^T.
    Otherwise a finer run of min(ceil(log(11 d / q^2) / (4 sqrt(2 delta)) +
    1/2), d) steps decides: gamma = lam_tilde + delta with S = 0 when
    lam_tilde <= 1 - delta, else S = +/- u u^T.  Ties between the top and
    bottom Ritz values resolve to the +u u^T branch.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    d = W.shape[0]
    rng = np.random.default_rng(seed)
    log_term = _lanczos_rounds(d, q)

    n1 = min(math.ceil(log_term + 0.5), d)
    coarse = lanczos_extreme(W, n1, rng, counters)
    lam_hat = max(coarse.lam_max, -coarse.lam_min)
    matvecs = coarse.matvecs

    if lam_hat <= 0.5:
        return SeparationResult(gamma=2.0 * lam_hat,
                                hyperplane=np.zeros_like(W),
                                separated=False, matvecs=matvecs)
    if lam_hat >= 2.0:
        if coarse.lam_max >= -coarse.lam_min:
            S = 3.0 * np.outer(coarse.u_max, coarse.u_max)
        else:
            S = -3.0 * np.outer(coarse.u_min, coarse.u_min)
        return SeparationResult(gamma=2.0 * lam_hat, hyperplane=S,
                                separated=True, matvecs=matvecs)

    n2 = min(math.ceil(log_term / (4.0 * math.sqrt(2.0 * delta)) + 0.5), d)
    fine = lanczos_extreme(W, max(n2, 1), rng, counters)
    lam_tilde = max(fine.lam_max, -fine.lam_min)
    matvecs += fine.matvecs
    gamma = lam_tilde + delta

    if lam_tilde <= 1.0 - delta:
        return SeparationResult(gamma=gamma, hyperplane=np.zeros_like(W),
                                separated=False, matvecs=matvecs)
    if fine.lam_max >= -fine.lam_min:
        S = np.outer(fine.u_max, fine.u_max)
    else:
        S = -np.outer(fine.u_min, fine.u_min)
    return SeparationResult(gamma=gamma, hyperplane=S,
                            separated=True, matvecs=matvecs)
