"""Closed-form pairings of Gaussian mollifier kernels.

Every multi-dimensional pairing used by the observables factorizes over
coordinate axes into exactly two one-dimensional primitives:

* ``gauss1`` -- the overlap of two unit-normalized Gaussians,
* ``halfint`` -- the overlap of a Gaussian with the odd antiderivative
  of another (an erf profile).

The composite pairings (``pairing_axis``, ``dzero_pair``, ``mixed_pair``)
assemble products of these primitives, one factor per axis, with the sign
of each inverted-axis factor fixed by the integration-by-parts rule
``<inv(f), g> = -<f, inv(g)>``.  The signs and constants are locked by the
brute-force quadrature oracles in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

__all__ = [
    "KappaPoint",
    "gauss1",
    "halfint",
    "pairing_axis",
    "dzero_pair",
    "mixed_pair",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)

# exp(-x) is below 1e-300 past this point; flushed to exact zero to keep
# denormals out of the hot loops.
_FLUSH_EXPONENT = 690.0


def kappa_tilde_constant(kappa: float) -> float:
    """Volume-observable scaling constant derived from kappa."""
    return (
        (math.sqrt(math.pi) / 2.0)
        * (kappa / 4.0)
        * (kappa / SQRT_2PI) ** 2
        * (kappa**2 / (8.0 * math.pi)) ** 2
    )


@dataclass(frozen=True)
class KappaPoint:
    """A mollifier width kappa together with its derived scaling constants."""

    kappa: float
    bk: float = field(init=False)
    kappa_tilde: float = field(init=False)

    def __post_init__(self) -> None:
        if not (self.kappa > 0.0 and math.isfinite(self.kappa)):
            raise ValueError(f"kappa must be finite and positive, got {self.kappa}")
        object.__setattr__(self, "bk", self.kappa / (2.0 * math.sqrt(4.0 * math.pi)))
        object.__setattr__(self, "kappa_tilde", kappa_tilde_constant(self.kappa))


def _flushed_exp(neg_arg: np.ndarray) -> np.ndarray:
    """exp(-neg_arg) with underflow flushed to exact zero."""
    neg_arg = np.asarray(neg_arg, dtype=float)
    out = np.zeros_like(neg_arg)
    mask = neg_arg <= _FLUSH_EXPONENT
    if mask.all():
        return np.exp(-neg_arg)
    np.exp(-neg_arg, where=mask, out=out)
    return out


def gauss1(kappa: float, a, b):
    """Overlap <q^a, q^b> = exp(-kappa^2 (a-b)^2 / 8) of two 1-d kernels.

    Symmetric in (a, b); vectorizes over array arguments.
    """
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return _flushed_exp((kappa * kappa / 8.0) * d * d)


def halfint(kappa: float, a, b):
    """Overlap <q^a, inv(q^b)> of a kernel with the odd antiderivative of another.

    Closed form (sqrt(2 pi)/kappa) * erf(kappa (a-b) / (2 sqrt(2))); exactly
    antisymmetric in (a, b).  Validated against adaptive quadrature of the
    defining double integral in the tests.
    """
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return (SQRT_2PI / kappa) * erf(kappa * d / (2.0 * math.sqrt(2.0)))


def mixed_pair(x, y, kappa: float, time_inv: str = "none", spatial_inv=None):
    """Product-over-axes pairing of two 4-d kernels with optional inversions.

    ``x`` and ``y`` have shape (..., 4) with axis 0 the time coordinate.
    With no inversions this is exp(-kappa^2 |x-y|^2 / 8).  ``time_inv`` in
    {"none", "first", "second"} marks which slot carries the antiderivative
    on the time axis; ``spatial_inv`` is an optional ``(axis, side)`` pair
    with axis in {1, 2, 3} and side in {"first", "second"}.  A factor with
    the inversion on the first slot picks up a minus sign relative to
    ``halfint`` per the integration-by-parts rule.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != 4 or y.shape[-1] != 4:
        raise ValueError("mixed_pair expects points of shape (..., 4)")
    if time_inv not in ("none", "first", "second"):
        raise ValueError(f"invalid time_inv: {time_inv!r}")

    inverted = {}
    if time_inv != "none":
        inverted[0] = time_inv
    if spatial_inv is not None:
        axis, side = spatial_inv
        if axis not in (1, 2, 3):
            raise ValueError(f"spatial inversion axis must be 1..3, got {axis}")
        if side not in ("first", "second"):
            raise ValueError(f"invalid inversion side: {side!r}")
        if axis in inverted:
            raise ValueError(f"two inversions requested on axis {axis}")
        inverted[axis] = side

    plain_sq = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]))
    out = None
    for axis in range(4):
        xa = x[..., axis]
        ya = y[..., axis]
        side = inverted.get(axis)
        if side is None:
            d = xa - ya
            plain_sq = plain_sq + d * d
        else:
            factor = halfint(kappa, xa, ya)
            if side == "first":
                factor = -factor
            out = factor if out is None else out * factor
    gauss = _flushed_exp((kappa * kappa / 8.0) * plain_sq)
    return gauss if out is None else out * gauss


def dzero_pair(x, y, kappa: float):
    """Pairing <inv_time(p^x), p^y>: time axis inverted on the first slot.

    Equals -halfint(kappa, x0, y0) times the spatial Gaussian overlap
    exp(-kappa^2 |x_spatial - y_spatial|^2 / 8).
    """
    return mixed_pair(x, y, kappa, time_inv="first")


def pairing_axis(x, y, k: int, kappa: float):
    """Composite pairing <p^x, p^y>_k concentrating on axis-k plane crossings.

    Gaussian overlap on the two spatial axes other than ``k``, a
    kappa-weighted ``halfint`` on axis ``k`` (inversion on the second slot),
    and ``-halfint`` on the time axis (inversion on the first slot).
    """
    return kappa * mixed_pair(
        x, y, kappa, time_inv="first", spatial_inv=(k, "second")
    )
