"""Classical Monte-Carlo of the minimization loop using the exact Grover success law.

Replaces the quantum search step with a Bernoulli draw at the closed-form
success probability, which makes large search spaces cheap.  Only the
addition group is modeled: there the minimum is 0 and the marked count at
best-known value w is exactly w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fitting import RateFit, estimate_success_curve, fit_rate_parameter

__all__ = [
    "GroverSearchState",
    "grover_success_prob",
    "run_gmin_mc",
    "survey_beta_gamma",
]

# run-until-solution trials stop after this many effective calls per sqrt(N)
HARD_STOP_ALPHA = 45.0 / 2.0


@dataclass(frozen=True)
class GroverSearchState:
    """Marked count, search size, and chosen step count of one search round."""

    k: int
    N: int
    p: int


def grover_success_prob(k: int, N: int, p: int) -> float:
    """Probability that p Grover steps over N items with k marked succeed.

    sin^2((2p+1) * theta) with sin^2(theta) = k/N; 0 when nothing is marked.
    """
    if not 0 <= k <= N:
        raise ValueError(f"marked count {k} out of range [0, {N}]")
    if p < 0:
        raise ValueError("step count must be nonnegative")
    if k == 0:
        return 0.0
    theta = math.asin(math.sqrt(k / N))
    return math.sin((2 * p + 1) * theta) ** 2


def _one_trial(N: int, beta: float, gamma: float, rng: np.random.Generator,
               v: int | None, hard_stop: float) -> float:
    """Calls-to-solution of a single simulated trial (inf if the stop hits)."""
    w = int(rng.integers(0, N)) if v is None else v
    t = 1.0
    t_max = math.sqrt(N)
    calls = 0
    cap = math.ceil(hard_stop * t_max)
    while w != 0:
        if calls >= cap:
            return math.inf
        p = int(rng.integers(0, math.ceil(t)))
        calls += p + 1
        if rng.random() < grover_success_prob(w, N, p):
            f = int(rng.integers(0, w))
        else:
            f = int(rng.integers(w, N))
        if f < w:
            w = f
            t = max(1.0, beta * t)
        else:
            t = min(gamma * t, t_max)
    return float(calls)


def run_gmin_mc(
    N: int,
    beta: float = 0.95,
    gamma: float = 1.15,
    rng: np.random.Generator | None = None,
    trials: int = 1,
    v: int | None = None,
    hard_stop: float = HARD_STOP_ALPHA,
) -> np.ndarray:
    """Run trials of the classical control flow until the minimum is found.

    Returns one calls-to-solution value per trial; the starting position is
    drawn uniformly unless ``v`` is given.  Trials that hit the hard stop
    report ``inf``.
    """
    if rng is None:
        rng = np.random.default_rng()
    out = np.empty(trials, dtype=float)
    for i in range(trials):
        out[i] = _one_trial(N, beta, gamma, rng, v, hard_stop)
    return out


def survey_beta_gamma(
    beta_grid,
    gamma_grid,
    N: int,
    trials: int,
    seed: int = 0,
) -> list[tuple[float, float, int, int, RateFit]]:
    """Rate-parameter surface over a (beta, gamma) grid.

    Each grid point gets its own deterministic child stream, so results do
    not depend on evaluation order.
    """
    rows = []
    for i, beta in enumerate(beta_grid):
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"beta {beta} outside [0, 1]")
        for j, gamma in enumerate(gamma_grid):
            if not 1.0 < gamma < 4.0 / 3.0:
                raise ValueError(f"gamma {gamma} outside (1, 4/3)")
            rng = np.random.default_rng(np.random.SeedSequence([seed, i, j]))
            calls = run_gmin_mc(N, beta=beta, gamma=gamma, rng=rng, trials=trials)
            curve = estimate_success_curve(calls, N)
            fit = fit_rate_parameter(curve)
            rows.append((float(beta), float(gamma), N, trials, fit))
    return rows
