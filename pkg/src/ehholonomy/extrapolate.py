"""Limit estimation along a schedule of mollifier widths.

The observables are defined as limits of the per-kappa values; the limits
themselves are only estimated here.  Plateau mode trusts the top of the
schedule; the Richardson modes fit an algebraic decay through the last
three samples.  The decay exponent is a numerical hypothesis, not a proved
rate, and is therefore configurable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["KappaSchedule", "LimitEstimate", "limit_estimate"]

MODES = ("plateau", "richardson-1/kappa", "richardson-1/kappa^2")

DEFAULT_VALUES = (5.0, 10.0, 20.0, 40.0, 60.0)


@dataclass(frozen=True)
class KappaSchedule:
    """Strictly increasing widths plus the extrapolation mode and tolerance."""

    values: tuple = DEFAULT_VALUES
    mode: str = "plateau"
    rel_tol: float = 0.02

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if len(values) < 3:
            raise ValueError("schedule needs at least 3 values")
        if any(v <= 0 for v in values):
            raise ValueError("schedule values must be positive")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("schedule must be strictly increasing")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class LimitEstimate:
    limit: complex
    err: float
    converged: bool


def _fit_decay(kappas: np.ndarray, values: np.ndarray, p: float) -> complex:
    """Least-squares fit of value = L + c * kappa^-p; returns L."""
    design = np.stack([np.ones_like(kappas), kappas**-p], axis=-1)
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    return complex(coeffs[0])


def limit_estimate(samples, mode: str = "plateau",
                   rel_tol: float = 0.02) -> LimitEstimate:
    """Estimate the large-kappa limit from (kappa, value) samples.

    Plateau: the last value, with the last successive difference as error.
    Richardson: fit L + c kappa^-p through the final three samples; the
    error combines the fit residual with the two-point solve from the last
    pair, so exact model data reports zero error.  Convergence compares the
    error against ``rel_tol`` relative to |L| (absolute when |L| < 1e-9).
    """
    samples = list(samples)
    if len(samples) < 3:
        raise ValueError("limit estimation needs at least 3 samples")
    kappas = np.array([float(k) for k, _ in samples])
    values = np.array([complex(v) for _, v in samples])
    if np.any(np.diff(kappas) <= 0):
        raise ValueError("samples must be ordered by increasing kappa")

    if mode == "plateau":
        limit = complex(values[-1])
        err = float(abs(values[-1] - values[-2]))
    elif mode in ("richardson-1/kappa", "richardson-1/kappa^2"):
        p = 1.0 if mode.endswith("kappa") else 2.0
        limit = _fit_decay(kappas[-3:], values[-3:], p)
        k1, k2 = kappas[-2], kappas[-1]
        c = (values[-2] - values[-1]) / (k1**-p - k2**-p)
        two_point = complex(values[-1] - c * k2**-p)
        err = float(abs(limit - two_point) + _residual(kappas[-3:], values[-3:], p))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    scale = abs(limit)
    converged = err < (rel_tol * scale if scale >= 1e-9 else rel_tol)
    return LimitEstimate(limit, err, bool(converged))


def _residual(kappas: np.ndarray, values: np.ndarray, p: float) -> float:
    design = np.stack([np.ones_like(kappas), kappas**-p], axis=-1)
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    fit = design @ coeffs
    return float(np.max(np.abs(fit - values)))
