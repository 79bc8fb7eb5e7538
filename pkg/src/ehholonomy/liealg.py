"""Irreducible su(2) representations and the holonomy traces built from them.

The two su(2) factors of the symmetry algebra act independently; every
exponent appearing in an observable is a complex scalar multiplying the
distinguished sum-of-generators element of one factor, so a representation
here is a single spin-j block together with the cached spectrum used by
the trace evaluator.
"""

from __future__ import annotations

import cmath
import math
import numbers
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "SpinRep",
    "ColoredRep",
    "AlgebraCoeff",
    "build_generators",
    "spectrum_iE",
    "trace_exp",
    "trace_exp_matrix_oracle",
    "commutator_pair_sum",
]

MAX_TWO_J = 50  # spins above j=25 overflow cosh-like trace sums at desk scale

# Cyclic pairs (i, j) whose commutators [e_i, e_j] sum to the full generator sum.
CYCLIC_PAIRS = ((2, 3), (3, 1), (1, 2))


def _two_j(j) -> int:
    """Validate and canonicalize a half-integer spin as the integer 2j."""
    if isinstance(j, numbers.Real):
        two_j = 2.0 * float(j)
        rounded = round(two_j)
        if abs(two_j - rounded) > 1e-9:
            raise ValueError(f"spin must be a half-integer, got {j}")
        if rounded < 0:
            raise ValueError(f"spin must be nonnegative, got {j}")
        if rounded > MAX_TWO_J:
            raise ValueError(f"spin {j} exceeds the supported cap {MAX_TWO_J / 2}")
        return int(rounded)
    raise ValueError(f"spin must be a real half-integer, got {j!r}")


@dataclass(frozen=True)
class SpinRep:
    """Spin-j representation data: generators and the cached real spectrum.

    ``generators[k]`` is the image of the k-th basis element; each is
    skew-Hermitian and the commutation table [g1, g2] = g3 (cyclic) holds.
    ``spectrum`` holds the ascending eigenvalues of i*(g1+g2+g3), a set
    symmetric under negation.
    """

    two_j: int
    dim: int
    generators: np.ndarray
    spectrum: np.ndarray

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def casimir(self) -> float:
        return self.j * (self.j + 1.0)


@lru_cache(maxsize=None)
def _build_cached(two_j: int) -> SpinRep:
    j = two_j / 2.0
    dim = two_j + 1
    m = np.arange(j, -j - 0.5, -1.0)  # weights in descending order
    jz = np.diag(m)
    raise_abs = np.sqrt(j * (j + 1.0) - m[1:] * (m[1:] + 1.0))
    jplus = np.zeros((dim, dim))
    jplus[np.arange(dim - 1), np.arange(1, dim)] = raise_abs
    jminus = jplus.T
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    gens = np.stack([-1j * jx, -1j * jy, -1j * jz.astype(complex)])
    spectrum = np.linalg.eigvalsh(jx + jy + jz)
    gens.flags.writeable = False
    spectrum.flags.writeable = False
    return SpinRep(two_j=two_j, dim=dim, generators=gens, spectrum=spectrum)


def build_generators(j) -> SpinRep:
    """Construct (and cache) the spin-j representation.

    Generators are -i times the standard angular-momentum matrices, which
    realizes the commutation table exactly up to float rounding.
    """
    return _build_cached(_two_j(j))


def spectrum_iE(rep: SpinRep) -> np.ndarray:
    """Ascending real eigenvalues of i times the summed generator.

    Equals {sqrt(3) * m : m = -j..j}; cached at construction because the
    trace evaluator runs inside quadrature loops.
    """
    return rep.spectrum


def trace_exp(j, theta: complex) -> complex:
    """Trace of exp(theta * F) in the spin-j representation.

    F is the summed generator; its eigenvalues are -i times the cached real
    spectrum, so the trace is sum_lambda exp(-i * theta * lambda).  The
    spectrum is symmetric under negation, hence the value is even in theta.
    """
    spectrum = build_generators(j).spectrum
    return complex(np.sum(np.exp(-1j * complex(theta) * spectrum)))


def trace_exp_matrix_oracle(j, theta: complex) -> complex:
    """Independent check path: dense matrix exponential followed by trace."""
    from scipy.linalg import expm

    rep = build_generators(j)
    total = rep.generators[0] + rep.generators[1] + rep.generators[2]
    return complex(np.trace(expm(complex(theta) * total)))


def commutator_pair_sum(rep: SpinRep) -> np.ndarray:
    """Sum of [g_i, g_j] over the cyclic pairs; equals g1 + g2 + g3."""
    g = rep.generators
    out = np.zeros_like(g[0])
    for i, j in CYCLIC_PAIRS:
        a, b = g[i - 1], g[j - 1]
        out = out + (a @ b - b @ a)
    return out


@dataclass(frozen=True)
class ColoredRep:
    """A pair of spins coloring one matter loop, one per su(2) factor."""

    jplus: float
    jminus: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "jplus", _two_j(self.jplus) / 2.0)
        object.__setattr__(self, "jminus", _two_j(self.jminus) / 2.0)

    @property
    def dim_plus(self) -> int:
        return int(round(2 * self.jplus)) + 1

    @property
    def dim_minus(self) -> int:
        return int(round(2 * self.jminus)) + 1

    @property
    def xi_plus(self) -> float:
        return self.jplus * (self.jplus + 1.0)

    @property
    def xi_minus(self) -> float:
        return self.jminus * (self.jminus + 1.0)

    def key(self) -> tuple[int, int]:
        """Hashable class label: doubled spins."""
        return (int(round(2 * self.jplus)), int(round(2 * self.jminus)))


@dataclass(frozen=True)
class AlgebraCoeff:
    """Coefficients of an algebra-valued result on the two distinguished directions."""

    cplus: complex
    cminus: complex

    def __post_init__(self) -> None:
        for name in ("cplus", "cminus"):
            v = complex(getattr(self, name))
            if not (cmath.isfinite(v)):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
