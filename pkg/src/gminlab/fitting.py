"""Success curves and rate-parameter fits.

The empirical success probability as a function of the effective oracle-call
budget T follows P = 1 - exp(-T^2 / (a^2 N)) asymptotically; fits linearize
this with sqrt(-ln(1-P)) against T/sqrt(N).  Small search spaces deviate from
the asymptotic form, so an effective rate parameter built from successive
differences is reported as well, with an error bar scaled by the trial count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SuccessCurve",
    "RateFit",
    "FitDomainError",
    "estimate_success_curve",
    "fit_rate_parameter",
    "synthetic_curve",
]

FIT_WINDOW = (0.2, 0.995)


class FitDomainError(ValueError):
    """Too few curve points inside the fit window."""


@dataclass(frozen=True)
class SuccessCurve:
    """Empirical P(T): fraction of trials solved within T effective calls."""

    T: np.ndarray
    P: np.ndarray
    M: int
    N: int

    def __post_init__(self) -> None:
        if len(self.T) != len(self.P):
            raise ValueError("T and P grids differ in length")
        if np.any((self.P < 0) | (self.P > 1)):
            raise ValueError("P outside [0, 1]")
        if np.any(np.diff(self.P) < 0):
            raise ValueError("success curve must be monotone nondecreasing")


@dataclass(frozen=True)
class RateFit:
    """Rate parameter a from the linearized fit plus the difference-based a_eff."""

    a: float
    a_err: float
    r2: float
    a_eff: float
    a_eff_err: float
    sigma_eff: float
    window: tuple[float, float] = FIT_WINDOW


def estimate_success_curve(calls_to_solution, N: int) -> SuccessCurve:
    """Step-function success curve on an integer call grid.

    ``calls_to_solution`` may contain inf for unsolved trials; those count in
    the denominator but never in the numerator.
    """
    calls = np.asarray(calls_to_solution, dtype=float)
    if calls.size == 0:
        raise ValueError("no trials")
    finite = calls[np.isfinite(calls)]
    t_max = int(finite.max()) if finite.size else 0
    grid = np.arange(t_max + 1)
    # P[T] = fraction of trials with calls <= T
    counts = np.bincount(finite.astype(int), minlength=t_max + 1)
    P = np.cumsum(counts) / calls.size
    return SuccessCurve(T=grid, P=P, M=calls.size, N=N)


def synthetic_curve(a: float, N: int, t_max: int | None = None, M: int = 10**6) -> SuccessCurve:
    """Exact curve P = 1 - exp(-T^2/(a^2 N)) on an integer grid (fit oracle)."""
    if t_max is None:
        t_max = int(np.ceil(3.0 * a * np.sqrt(N)))
    T = np.arange(t_max + 1)
    P = 1.0 - np.exp(-(T.astype(float) ** 2) / (a * a * N))
    return SuccessCurve(T=T, P=P, M=M, N=N)


def fit_rate_parameter(curve: SuccessCurve, window: tuple[float, float] = FIT_WINDOW) -> RateFit:
    """Fit the rate parameter over the window of usable probabilities.

    The straight-line fit through the origin of y = sqrt(-ln(1-P)) against
    x = T/sqrt(N) has slope 1/a.  a_eff inverts the mean of successive
    y-differences on the unit call grid, and its error bar is
    sqrt(N/M) * sigma_eff * a_eff^2.
    """
    lo, hi = window
    mask = (curve.P >= lo) & (curve.P <= hi)
    if mask.sum() < 5:
        raise FitDomainError(
            f"only {int(mask.sum())} curve points inside the window {window}; need at least 5"
        )
    T = curve.T[mask].astype(float)
    P = curve.P[mask]
    y = np.sqrt(-np.log1p(-P))
    x = T / np.sqrt(curve.N)

    slope = float(np.dot(x, y) / np.dot(x, x))
    resid = y - slope * x
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(y - y.mean(), y - y.mean()))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    slope_err = np.sqrt(ss_res / max(len(x) - 1, 1) / np.dot(x, x))
    a = 1.0 / slope
    a_err = float(slope_err / slope**2)

    diffs = np.diff(y) / np.diff(T)
    mean_diff = float(diffs.mean())
    if mean_diff <= 0:
        raise FitDomainError("success curve is flat inside the window")
    a_eff = 1.0 / (mean_diff * np.sqrt(curve.N))
    sigma_eff = float(diffs.std(ddof=1)) if len(diffs) > 1 else 0.0
    a_eff_err = float(np.sqrt(curve.N / curve.M) * sigma_eff * a_eff**2)
    return RateFit(a=float(a), a_err=a_err, r2=float(r2),
                   a_eff=float(a_eff), a_eff_err=a_eff_err, sigma_eff=sigma_eff,
                   window=window)
