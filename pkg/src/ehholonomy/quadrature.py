"""Deterministic composite Gauss-Legendre quadrature over boxes in [0,1]^d.

Node grids are row-major tensor products, reductions run in a fixed chunk
order, and the optional thread pool only parallelizes integrand evaluation
over those fixed chunks -- results are bitwise identical for any worker
count.  A seeded Monte-Carlo mode exists purely as a cross-check oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from concurrent.futures import ThreadPoolExecutor

import numpy as np

__all__ = [
    "QuadSpec",
    "QuadResult",
    "QuadratureError",
    "integrate",
    "integrate_nested",
    "set_max_workers",
    "get_max_workers",
    "gl_panel_nodes",
    "tensor_nodes",
    "converge",
]

_CHUNK = 1 << 14  # fixed evaluation chunk; independent of worker count

_MAX_WORKERS = 1


def set_max_workers(n: int) -> None:
    """Cap the evaluation worker count (1 disables threading)."""
    global _MAX_WORKERS
    if n < 1:
        raise ValueError("worker count must be >= 1")
    _MAX_WORKERS = int(n)


def get_max_workers() -> int:
    return _MAX_WORKERS


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature configuration shared by every observable."""

    rule: str = "gauss-legendre-composite"
    base_panels: int = 1
    nodes_per_panel: int = 8
    kappa_scaling: float = 0.25
    rel_tol: float = 1e-3
    max_refinements: int = 4
    mc_samples: int = 1_000_000
    mc_seed: int = 20260809

    def __post_init__(self) -> None:
        if self.rule not in ("gauss-legendre-composite", "monte-carlo"):
            raise ValueError(f"unknown quadrature rule: {self.rule!r}")
        if self.base_panels < 1:
            raise ValueError("base_panels must be >= 1")
        if not (4 <= self.nodes_per_panel <= 16):
            raise ValueError("nodes_per_panel must lie in 4..16")
        if not (self.rel_tol > 0.0):
            raise ValueError("rel_tol must be positive")
        if self.max_refinements < 0:
            raise ValueError("max_refinements must be >= 0")

    def initial_panels(self, kappa: float) -> int:
        """Panels per unit length at width kappa: enough to resolve the Gaussian ridges."""
        return self.base_panels * max(1, math.ceil(self.kappa_scaling * kappa))


@dataclass(frozen=True)
class QuadResult:
    value: complex
    err_est: float
    trace: tuple
    converged: bool
    panels: int


class QuadratureError(RuntimeError):
    """Raised when refinement stalls; carries the trace and the best result."""

    def __init__(self, message: str, result: QuadResult):
        super().__init__(message)
        self.result = result
        self.trace = result.trace


def gl_panel_nodes(panels: int, nodes_per_panel: int, lo: float = 0.0, hi: float = 1.0):
    """Composite Gauss-Legendre nodes/weights on [lo, hi] with equal panels."""
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    width = (hi - lo) / panels
    starts = lo + width * np.arange(panels)
    nodes = (starts[:, None] + 0.5 * width * (x[None, :] + 1.0)).ravel()
    weights = np.broadcast_to(0.5 * width * w, (panels, nodes_per_panel)).ravel()
    return nodes, weights.copy()


def axis_nodes(panels: int, nodes_per_panel: int, domain):
    """Per-axis composite nodes/weights; panel counts scale with axis length.

    ``panels`` is the density per unit length, so sub-cells of a partition
    get the same resolution as the full box at the same setting.
    """
    out = []
    for lo, hi in domain:
        p = max(1, math.ceil(panels * (hi - lo) - 1e-12))
        out.append(gl_panel_nodes(p, nodes_per_panel, lo, hi))
    return out


def tensor_nodes(panels: int, nodes_per_panel: int, domain):
    """Row-major tensor-product grid over a box given as [(lo, hi), ...].

    The first coordinate varies slowest; flattening order is guaranteed so
    callers may reshape points back to the per-axis grids.
    """
    per_axis = axis_nodes(panels, nodes_per_panel, domain)
    grids = np.meshgrid(*[n for n, _ in per_axis], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    w = per_axis[0][1]
    for _, wi in per_axis[1:]:
        w = np.multiply.outer(w, wi)
    return pts, w.ravel()


def _eval_chunked(f, pts: np.ndarray) -> np.ndarray:
    """Evaluate f over fixed-size chunks, optionally in a thread pool.

    Chunk boundaries never depend on the worker count, so the concatenated
    result is bitwise identical for any pool size.
    """
    n = pts.shape[0]
    if n <= _CHUNK or _MAX_WORKERS == 1:
        return np.asarray(f(pts))
    chunks = [pts[i : i + _CHUNK] for i in range(0, n, _CHUNK)]
    with ThreadPoolExecutor(max_workers=_MAX_WORKERS) as pool:
        parts = list(pool.map(f, chunks))
    return np.concatenate([np.asarray(p) for p in parts], axis=0)


def _weighted_sum(values: np.ndarray, weights: np.ndarray):
    """Deterministic reduction: fixed-chunk partial sums combined in order."""
    prods = values * (weights if values.ndim == 1 else weights.reshape(
        weights.shape + (1,) * (values.ndim - 1)))
    n = prods.shape[0]
    if n <= _CHUNK:
        return prods.sum(axis=0)
    total = prods[0:_CHUNK].sum(axis=0)
    for i in range(_CHUNK, n, _CHUNK):
        total = total + prods[i : i + _CHUNK].sum(axis=0)
    return total


def converge(evaluate, spec: QuadSpec, kappa: float, label: str = "integral"):
    """Panel-doubling refinement driver shared by all quadrature entry points.

    ``evaluate(panels)`` returns ``(value, l1)`` where ``l1`` is the
    quadrature of the integrand's absolute value.  Successive values must
    approach within ``rel_tol`` relative to the value, with an absolute
    floor tied to the integrand scale ``l1`` so that integrals that vanish
    by symmetry (value << l1) converge once they hit rounding noise.
    """
    panels = spec.initial_panels(kappa)
    trace = []
    value, l1 = evaluate(panels)
    trace.append((panels, float(np.max(np.abs(np.atleast_1d(value))))))
    err = math.inf
    for _ in range(spec.max_refinements):
        panels *= 2
        new_value, l1 = evaluate(panels)
        diff = float(np.max(np.abs(np.atleast_1d(new_value - value))))
        scale = float(np.max(np.abs(np.atleast_1d(new_value))))
        trace.append((panels, diff))
        value, err = new_value, diff
        if diff <= max(spec.rel_tol * scale, 1e-13 * l1, 1e-250):
            return QuadResult(value, err, tuple(trace), True, panels)
    result = QuadResult(value, err, tuple(trace), False, panels)
    raise QuadratureError(
        f"{label}: no convergence after {spec.max_refinements} refinements "
        f"(last change {err:.3e})",
        result,
    )


def _mc_result(f, d: int, spec: QuadSpec, domain) -> QuadResult:
    rng = np.random.default_rng(spec.mc_seed)
    pts = rng.random((spec.mc_samples, d))
    volume = 1.0
    for axis, (lo, hi) in enumerate(domain):
        pts[:, axis] = lo + (hi - lo) * pts[:, axis]
        volume *= hi - lo
    vals = _eval_chunked(f, pts)
    mean = vals.mean(axis=0) * volume
    err = float(np.max(np.abs(vals.std(axis=0)))) * volume / math.sqrt(spec.mc_samples)
    value = complex(mean) if np.ndim(mean) == 0 else mean
    return QuadResult(value, err, ((spec.mc_samples, err),), True, 0)


def integrate(f, d: int, spec: QuadSpec, kappa: float, domain=None) -> QuadResult:
    """Integrate a vectorized callable over a box (default [0,1]^d).

    ``f`` maps an (n, d) array of points to an (n,) or (n, m) array of
    values; vector-valued integrands are reduced componentwise and the
    convergence test uses the worst component.
    """
    if not 1 <= d <= 4:
        raise ValueError("dimension must lie in 1..4")
    if domain is None:
        domain = [(0.0, 1.0)] * d
    if len(domain) != d:
        raise ValueError("domain length must match dimension")
    if spec.rule == "monte-carlo":
        return _mc_result(f, d, spec, domain)

    def evaluate(panels: int):
        pts, w = tensor_nodes(panels, spec.nodes_per_panel, domain)
        vals = _eval_chunked(f, pts)
        value = _weighted_sum(vals, w)
        l1 = float(np.max(np.atleast_1d(_weighted_sum(np.abs(vals), np.abs(w)))))
        return value, l1

    return converge(evaluate, spec, kappa, label=f"{d}-d integral")


def integrate_nested(
    f_inner,
    g_outer,
    spec: QuadSpec,
    kappa: float,
    outer_d: int = 3,
    inner_d: int = 2,
    outer_domain=None,
    inner_domain=None,
) -> QuadResult:
    """Outer quadrature of |inner integral| times an outer weight.

    ``f_inner(R, S)`` maps outer points R (nr, outer_d) and inner points
    S (ns, inner_d) to an (nr, ns) matrix of integrand samples; the inner
    nodes form a row-major tensor grid (see ``tensor_nodes``).  When the
    inner integrand is a 2-d tensor product, ``f_inner`` may instead return
    a factor pair ``(U, V)`` of shapes (nr, na, m) and (nr, nb, m) meaning
    sample[r, a*nb + b] = sum_j U[r, a, j] V[r, b, j]; the contraction with
    the inner weights is then performed factor-wise (the same quadrature
    sum, reassociated).  The absolute value is applied to each inner
    integral before outer weighting by ``g_outer(R)``.  Outer and inner
    grids refine together.
    """
    if outer_domain is None:
        outer_domain = [(0.0, 1.0)] * outer_d
    if inner_domain is None:
        inner_domain = [(0.0, 1.0)] * inner_d
    if spec.rule == "monte-carlo":
        return _mc_nested(f_inner, g_outer, spec, kappa, outer_d,
                          outer_domain, inner_domain)

    def evaluate(panels: int):
        R, w_r = tensor_nodes(panels, spec.nodes_per_panel, outer_domain)
        S, w_s = tensor_nodes(panels, spec.nodes_per_panel, inner_domain)
        inner_axes = axis_nodes(panels, spec.nodes_per_panel, inner_domain)
        chunk = max(1, (1 << 22) // max(1, S.shape[0]))
        total = 0.0
        l1 = 0.0
        for i in range(0, R.shape[0], chunk):
            Rc = R[i : i + chunk]
            out = f_inner(Rc, S)
            if isinstance(out, tuple):
                U, V = out
                w_a = inner_axes[0][1]
                w_b = inner_axes[1][1]
                us = np.einsum("raj,a->rj", U, w_a)
                vs = np.einsum("rbj,b->rj", V, w_b)
                inner = np.einsum("rj,rj->r", us, vs)
            else:
                inner = np.einsum("rs,s->r", np.asarray(out), w_s)
            g = np.asarray(g_outer(Rc), dtype=float)
            total = total + float(np.sum(np.abs(inner) * g * w_r[i : i + chunk]))
            l1 = l1 + float(np.sum(np.abs(inner) * np.abs(g) * w_r[i : i + chunk]))
        return total, l1

    return converge(evaluate, spec, kappa, label="nested integral")


def _mc_nested(f_inner, g_outer, spec, kappa, outer_d, outer_domain, inner_domain):
    """Monte-Carlo outer sampling with an accurate inner grid; oracle use only."""
    rng = np.random.default_rng(spec.mc_seed)
    R = rng.random((spec.mc_samples, outer_d))
    volume = 1.0
    for axis, (lo, hi) in enumerate(outer_domain):
        R[:, axis] = lo + (hi - lo) * R[:, axis]
        volume *= hi - lo
    panels = spec.initial_panels(kappa)
    S, w_s = tensor_nodes(panels, spec.nodes_per_panel, inner_domain)
    inner_axes = axis_nodes(panels, spec.nodes_per_panel, inner_domain)
    chunk = max(1, (1 << 22) // max(1, S.shape[0]))
    samples = np.empty(R.shape[0])
    for i in range(0, R.shape[0], chunk):
        Rc = R[i : i + chunk]
        out = f_inner(Rc, S)
        if isinstance(out, tuple):
            U, V = out
            us = np.einsum("raj,a->rj", U, inner_axes[0][1])
            vs = np.einsum("rbj,b->rj", V, inner_axes[1][1])
            inner = np.einsum("rj,rj->r", us, vs)
        else:
            inner = np.einsum("rs,s->r", np.asarray(out), w_s)
        samples[i : i + chunk] = np.abs(inner) * np.asarray(g_outer(Rc), dtype=float)
    value = float(samples.mean()) * volume
    err = float(samples.std()) * volume / math.sqrt(spec.mc_samples)
    return QuadResult(value, err, ((spec.mc_samples, err),), True, panels)
