"""Brute-force quadrature oracles for the closed-form kernel pairings.

These integrate the defining integrals directly (adaptive scipy quadrature
for the one-dimensional pairs, dense tensor Gauss-Legendre over a generous
box for the multi-dimensional overlaps) and never touch the closed forms
they are checking.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import dblquad

TAU = 2.0 * math.pi


def q_kernel(kappa: float, center: float, x):
    """The 1-d unit-normalized kernel, from its definition."""
    return (math.sqrt(kappa) / (2.0 * math.pi) ** 0.25) * np.exp(
        -(kappa**2) * (np.asarray(x) - center) ** 2 / 4.0
    )


def halfint_oracle(kappa: float, a: float, b: float, eps: float = 1e-10) -> float:
    """<q^a, inv(q^b)> by adaptive 2-d quadrature of the defining double integral.

    The odd antiderivative is half the signed integral against sign(x - t),
    so the double integral splits at the diagonal.
    """
    span = 12.0 / kappa
    lo = min(a, b) - span
    hi = max(a, b) + span

    def f(t, x):
        return q_kernel(kappa, a, x) * q_kernel(kappa, b, t)

    below, _ = dblquad(f, lo, hi, lambda x: lo, lambda x: x,
                       epsabs=eps, epsrel=eps)
    above, _ = dblquad(f, lo, hi, lambda x: x, lambda x: hi,
                       epsabs=eps, epsrel=eps)
    return 0.5 * (below - above)


def _gl_line(kappa: float, centers, n: int = 80):
    """Dense Gauss-Legendre grid covering the kernels around the given centers."""
    lo = min(centers) - 14.0 / kappa
    hi = max(centers) + 14.0 / kappa
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


def gauss_pair_oracle(kappa: float, a, b) -> float:
    """<p^a, p^b> in len(a) dimensions by dense tensor quadrature."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    total = 1.0
    for ai, bi in zip(a, b):
        x, w = _gl_line(kappa, (ai, bi))
        total *= float(np.sum(w * q_kernel(kappa, ai, x) * q_kernel(kappa, bi, x)))
    return total


def axis_inverted_oracle(kappa: float, a: float, b: float, side: str,
                         n: int = 120) -> float:
    """One inverted-axis factor by nested quadrature of the defining integrals.

    side "second": <q^a, inv(q^b)>; side "first": <inv(q^a), q^b>.  The odd
    antiderivative inv(q)(x) = int_{lo}^{x} q - (1/2) int q is evaluated by
    a fresh smooth Gauss-Legendre rule on [lo, x] per outer node, keeping
    spectral accuracy (no kink crosses any panel).
    """
    if side == "first":
        outer_center, inner_center = b, a
    elif side == "second":
        outer_center, inner_center = a, b
    else:
        raise ValueError(side)
    x, wx = _gl_line(kappa, (a, b), n)
    lo = min(a, b) - 14.0 / kappa
    u, wu = np.polynomial.legendre.leggauss(n)
    # cumulative integral of the inner kernel from lo to each outer node
    mid = 0.5 * (x[:, None] + lo) + 0.5 * (x[:, None] - lo) * u[None, :]
    cum = 0.5 * (x - lo) * np.sum(
        wu[None, :] * q_kernel(kappa, inner_center, mid), axis=1)
    total = float(np.sum(wx * q_kernel(kappa, inner_center, x)))
    inv_vals = cum - 0.5 * total
    return float(np.sum(wx * q_kernel(kappa, outer_center, x) * inv_vals))


def mixed_pair_oracle(kappa: float, x4, y4, time_inv: str = "none",
                      spatial_inv=None) -> float:
    """The 4-d pairing by per-axis brute-force quadrature of the definition."""
    x4 = np.asarray(x4, dtype=float)
    y4 = np.asarray(y4, dtype=float)
    inverted = {}
    if time_inv != "none":
        inverted[0] = time_inv
    if spatial_inv is not None:
        inverted[spatial_inv[0]] = spatial_inv[1]
    total = 1.0
    for axis in range(4):
        side = inverted.get(axis)
        if side is None:
            total *= gauss_pair_oracle(kappa, [x4[axis]], [y4[axis]])
        else:
            total *= axis_inverted_oracle(kappa, x4[axis], y4[axis], side)
    return total


def pairing_axis_oracle(kappa: float, x4, y4, k: int) -> float:
    """<p^x, p^y>_k from its definition: a 2-d overlap, a kappa-weighted
    inverted factor on axis k (second slot), and an inverted time factor
    (first slot)."""
    return kappa * mixed_pair_oracle(kappa, x4, y4, time_inv="first",
                                     spatial_inv=(k, "second"))
