"""Observable integrands: holonomy exponents and the three geometric functionals.

Every observable is a finite-dimensional integral of closed-form kernel
pairings over loop/surface/region parameter domains, evaluated at a fixed
mollifier width kappa.  The limits kappa -> infinity are estimated by the
extrapolation layer; this module never extrapolates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Hyperlink, Region, Surface, validate_timelike
from .kernels import KappaPoint, dzero_pair, mixed_pair, pairing_axis
from .liealg import AlgebraCoeff, ColoredRep, build_generators, trace_exp
from .quadrature import QuadSpec, converge, integrate, integrate_nested, tensor_nodes

__all__ = [
    "Scene",
    "SceneValidationError",
    "WilsonExponent",
    "wilson_exponent",
    "wilson_exponents",
    "lambda_kappa",
    "z_kappa",
    "z_kappa_full",
    "area_path_integral",
    "area_path_integral_full",
    "volume_path_integral",
    "volume_path_integral_full",
    "curvature_components",
    "curvature_path_integral",
    "curvature_path_integral_full",
]

CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))

_TINY = 1e-300


class SceneValidationError(ValueError):
    """A scene violates a structural precondition of an observable."""


@dataclass(frozen=True)
class Scene:
    """A colored matter hyperlink, an uncolored geometric one, and optional targets."""

    matter: Hyperlink
    geometric: Hyperlink
    charge: float = 1.0
    surface: Surface | None = None
    region: Region | None = None

    def __post_init__(self) -> None:
        if len(self.matter) and self.matter.colors is None:
            raise SceneValidationError("matter hyperlink must carry colors")
        if self.geometric.colors is not None:
            raise SceneValidationError("geometric hyperlink must be uncolored")

    @property
    def combined(self) -> Hyperlink:
        return Hyperlink(tuple(self.matter.loops) + tuple(self.geometric.loops))

    def color_classes(self) -> list[ColoredRep]:
        """Distinct colors in order of first appearance among matter loops."""
        seen: dict[tuple, ColoredRep] = {}
        for color in self.matter.colors or ():
            seen.setdefault(color.key(), color)
        return list(seen.values())

    def class_members(self) -> list[list[int]]:
        """Matter-loop indices grouped by color class (same order as color_classes)."""
        classes = self.color_classes()
        keys = [c.key() for c in classes]
        groups: list[list[int]] = [[] for _ in classes]
        for u, color in enumerate(self.matter.colors or ()):
            groups[keys.index(color.key())].append(u)
        return groups

    def validate(self, grid: int = 256, tol: float = 1e-6) -> None:
        """Structural checks shared by all observables; raises on violation."""
        violations = validate_timelike(self.combined, grid=grid, tol=tol)
        if violations:
            first = violations[0]
            raise SceneValidationError(
                f"hyperlink is not time-like at sampled resolution: {len(violations)} "
                f"violation(s), first {first.kind} between loop {first.loop_a} "
                f"(s={first.s_a:.4f}) and loop {first.loop_b} (s={first.s_b:.4f})"
            )
        if self.region is not None and len(self.matter):
            d = _min_distance(self._matter_samples(grid), self.region.sample_points())
            if d <= tol:
                raise SceneValidationError(
                    f"matter hyperlink touches the region (min distance {d:.3e})"
                )

    def _matter_samples(self, grid: int = 256) -> np.ndarray:
        s = np.arange(grid) / grid
        return np.concatenate(
            [loop.point_velocity(s)[0] for loop in self.matter.loops], axis=0
        )

    def _geometric_samples(self, grid: int = 256) -> np.ndarray:
        s = np.arange(grid) / grid
        return np.concatenate(
            [loop.point_velocity(s)[0] for loop in self.geometric.loops], axis=0
        )


def _min_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = a[:, None, :] - b[None, :, :]
    return float(np.sqrt(np.min(np.sum(d * d, axis=-1))))


@dataclass(frozen=True)
class WilsonExponent:
    """Per-matter-loop exponents on the plus branch; the minus branch negates."""

    thetas: tuple
    errs: tuple

    def max_real_leak(self) -> float:
        """Largest |Re theta| / |theta|; the exponents are purely imaginary for real charge."""
        worst = 0.0
        for t in self.thetas:
            if abs(t) > 0.0:
                worst = max(worst, abs(t.real) / abs(t))
        return worst


def _wilson_integrand(scene: Scene, u: int, kappa: float):
    loop_u = scene.matter.loops[u]

    def f(pts: np.ndarray) -> np.ndarray:
        y, vy = loop_u.point_velocity(pts[:, 0])
        total = np.zeros(pts.shape[0])
        for loop_v in scene.geometric.loops:
            rho, vrho = loop_v.point_velocity(pts[:, 1])
            cross = np.cross(vy[:, 1:], vrho[:, 1:])
            for k in (1, 2, 3):
                total = total + pairing_axis(y, rho, k, kappa) * cross[:, k - 1]
        return total

    return f


def wilson_exponent(scene: Scene, u: int, kappa: float, quad: QuadSpec) -> complex:
    """Holonomy exponent of matter loop ``u`` against the whole geometric hyperlink.

    Linear in the charge, antisymmetric under geometric orientation reversal,
    and additive over geometric components.
    """
    if not 0 <= u < len(scene.matter):
        raise IndexError(f"matter loop index {u} out of range")
    if len(scene.geometric) == 0 or scene.charge == 0.0:
        return 0.0j
    prefactor = 1j * scene.charge * kappa**3 / (16.0 * math.pi)
    result = integrate(_wilson_integrand(scene, u, kappa), 2, quad, kappa)
    return prefactor * complex(result.value)


def wilson_exponents(scene: Scene, kappa: float, quad: QuadSpec) -> WilsonExponent:
    """All matter-loop exponents at once, with quadrature error estimates."""
    thetas, errs = [], []
    prefactor = 1j * scene.charge * kappa**3 / (16.0 * math.pi)
    for u in range(len(scene.matter)):
        if len(scene.geometric) == 0 or scene.charge == 0.0:
            thetas.append(0.0j)
            errs.append(0.0)
            continue
        result = integrate(_wilson_integrand(scene, u, kappa), 2, quad, kappa)
        thetas.append(prefactor * complex(result.value))
        errs.append(abs(prefactor) * result.err_est)
    return WilsonExponent(tuple(thetas), tuple(errs))


def lambda_kappa(scene: Scene, v: int, sbar: float, kappa: float,
                 quad: QuadSpec | None = None) -> np.ndarray:
    """Coupling 3-vector at one geometric-loop point; a convergence diagnostic.

    Scaled by kappa it must decay to zero as kappa grows; the decay is
    driven by the spatial Gaussian in the time-inverted pairing.
    """
    if quad is None:
        quad = QuadSpec()
    if not 0 <= v < len(scene.geometric):
        raise IndexError(f"geometric loop index {v} out of range")
    rho_pt, _ = scene.geometric.loops[v].point_velocity(np.array([sbar]))
    prefactor = -1j * scene.charge * kappa**2 / (2.0 * math.sqrt(4.0 * math.pi))
    if scene.charge == 0.0 or len(scene.matter) == 0:
        return np.zeros(3, dtype=complex)

    def f(pts: np.ndarray) -> np.ndarray:
        out = np.zeros((pts.shape[0], 3))
        for loop in scene.matter.loops:
            y, vy = loop.point_velocity(pts[:, 0])
            out = out + dzero_pair(y, rho_pt, kappa)[:, None] * vy[:, 1:]
        return out

    result = integrate(f, 1, quad, kappa)
    return prefactor * np.asarray(result.value, dtype=complex)


def _zero_trace_factor(color: ColoredRep) -> float:
    return float(color.dim_plus + color.dim_minus)


def z_kappa_full(scene: Scene, kappa: float, quad: QuadSpec) -> tuple[complex, float]:
    exponents = wilson_exponents(scene, kappa, quad)
    factors = []
    for color, theta in zip(scene.matter.colors or (), exponents.thetas):
        factors.append(
            trace_exp(color.jplus, theta) + trace_exp(color.jminus, -theta)
        )
    z = complex(np.prod(factors)) if factors else 1.0 + 0.0j
    err = 0.0
    for u, (color, dtheta) in enumerate(zip(scene.matter.colors or (), exponents.errs)):
        if dtheta == 0.0:
            continue
        rest = abs(z) / max(abs(factors[u]), _TINY)
        lam = float(build_generators(color.jplus).spectrum[-1]
                    + build_generators(color.jminus).spectrum[-1])
        err += rest * abs(factors[u]) * lam * dtheta
    return z, err


def z_kappa(scene: Scene, kappa: float, quad: QuadSpec) -> complex:
    """Product over matter loops of the paired holonomy traces.

    With an empty geometric hyperlink this is exactly the product of
    representation dimension sums, independent of kappa.
    """
    return z_kappa_full(scene, kappa, quad)[0]


def _require_surface(scene: Scene) -> Surface:
    if scene.surface is None:
        raise SceneValidationError("this observable requires a surface in the scene")
    return scene.surface


def _area_preconditions(scene: Scene) -> list[tuple[object, ColoredRep, list[int]]]:
    surface = _require_surface(scene)
    if not surface.is_planar_x2x3():
        raise SceneValidationError(
            "area observable requires a surface parallel to the x2-x3 spatial plane"
        )
    classes = scene.color_classes()
    members = scene.class_members()
    labeled = []
    for cell in surface.partition:
        if cell.label is None:
            continue
        if not 0 <= cell.label < len(classes):
            raise SceneValidationError(
                f"partition label {cell.label} does not reference a color class "
                f"(scene has {len(classes)})"
            )
        labeled.append((cell, classes[cell.label], members[cell.label]))
    return labeled


def area_path_integral_full(scene: Scene, kappa: float,
                            quad: QuadSpec) -> tuple[complex, float]:
    surface = _require_surface(scene)
    labeled = _area_preconditions(scene)
    kp = KappaPoint(kappa)
    q = scene.charge

    p_plus = 0.0
    p_minus = 0.0
    p_err = 0.0
    for cell, color, members in labeled:
        if not members:
            continue
        loops = [scene.matter.loops[u] for u in members]

        def f_inner(T: np.ndarray, S: np.ndarray, loops=loops) -> np.ndarray:
            sigma, _, _ = surface.points_tangents(T)
            out = np.zeros((T.shape[0], S.shape[0]))
            for loop in loops:
                y, vy = loop.point_velocity(S[:, 0])
                pair = dzero_pair(y[None, :, :], sigma[:, None, :], kappa)
                out = out + q * kappa * vy[None, :, 1] * pair
            return out

        def g_outer(T: np.ndarray) -> np.ndarray:
            return surface.jacobian_matrix(T)[:, 2, 3]

        res = integrate_nested(f_inner, g_outer, quad, kappa, outer_d=2, inner_d=1,
                               outer_domain=cell.bounds())
        base = kp.bk**3 * float(res.value)
        p_plus += math.sqrt(color.xi_plus) * base
        p_minus += math.sqrt(color.xi_minus) * base
        p_err += kp.bk**3 * res.err_est * math.sqrt(
            max(color.xi_plus, color.xi_minus, 1.0))

    exponents = wilson_exponents(scene, kappa, quad)
    n = len(scene.matter)
    value = 1.0 + 0.0j
    for color, theta in zip(scene.matter.colors or (), exponents.thetas):
        bracket_plus = complex(p_plus) ** (1.0 / n) * trace_exp(color.jplus, theta)
        bracket_minus = (1j * p_minus) ** (1.0 / n) * trace_exp(color.jminus, -theta)
        value *= bracket_plus + bracket_minus
    rel = p_err / max(abs(p_plus), abs(p_minus), _TINY)
    return value, abs(value) * rel


def area_path_integral(scene: Scene, kappa: float, quad: QuadSpec) -> complex:
    """Surface functional at width kappa: piercing-weighted trace brackets.

    The surface partition groups parameter cells by matter color class;
    unlabeled cells contribute zero.  Fractional powers of the complex
    brackets take the principal branch.
    """
    return area_path_integral_full(scene, kappa, quad)[0]


def volume_path_integral_full(scene: Scene, kappa: float,
                              quad: QuadSpec) -> tuple[complex, float]:
    region = scene.region
    if region is None:
        raise SceneValidationError("volume observable requires a region in the scene")
    if len(scene.matter):
        d = _min_distance(scene._matter_samples(), region.sample_points())
        if d <= 1e-6:
            raise SceneValidationError(
                f"matter hyperlink touches the region (min distance {d:.3e})"
            )
    kp = KappaPoint(kappa)

    q_plus = 0.0
    q_minus = 0.0
    q_err = 0.0
    for cell in region.partition:
        for u, color in enumerate(scene.matter.colors or ()):
            loop = scene.matter.loops[u]

            def f_inner(R: np.ndarray, S: np.ndarray, loop=loop):
                # Inner nodes form a row-major (s, sbar) tensor grid; the two
                # 1-d factors are evaluated on their own axes and returned as
                # a factor pair for the tensor-product contraction.
                ns = S.shape[0]
                nb = int(np.argmax(S[:, 0] != S[0, 0])) or ns
                s_nodes = S[::nb, 0]
                sb_nodes = S[:nb, 1]
                rho4 = region.points4(R)
                y_s, vy_s = loop.point_velocity(s_nodes)
                y_sb, vy_sb = loop.point_velocity(sb_nodes)
                pair_k = np.stack(
                    [pairing_axis(y_s[None, :, :], rho4[:, None, :], k, kappa)
                     for k in (1, 2, 3)], axis=-1)  # (nr, na, 3)
                u_vec = np.cross(pair_k, vy_s[None, :, 1:])  # (P x y'(s))_j
                g = dzero_pair(y_sb[None, :, :], rho4[:, None, :], kappa)
                v_vec = g[:, :, None] * vy_sb[None, :, 1:]  # (nr, nb, 3)
                return u_vec, v_vec

            def g_outer(R: np.ndarray) -> np.ndarray:
                return np.full(R.shape[0], region.jacobian_det)

            res = integrate_nested(f_inner, g_outer, quad, kappa, outer_d=3,
                                   inner_d=2, outer_domain=cell.bounds())
            base = kp.kappa_tilde * float(res.value)
            q_plus += color.xi_plus * base
            q_minus += color.xi_minus * base
            q_err += kp.kappa_tilde * res.err_est * max(
                color.xi_plus, color.xi_minus, 1.0)

    exponents = wilson_exponents(scene, kappa, quad)
    n = len(scene.matter)
    value = 1.0 + 0.0j
    for color, theta in zip(scene.matter.colors or (), exponents.thetas):
        bracket = (complex(q_plus) ** (1.0 / n) * trace_exp(color.jplus, theta)
                   + complex(q_minus) ** (1.0 / n) * trace_exp(color.jminus, -theta))
        value *= bracket
    value *= scene.charge**2
    rel = q_err / max(abs(q_plus), abs(q_minus), _TINY)
    return value, abs(value) * rel


def volume_path_integral(scene: Scene, kappa: float, quad: QuadSpec) -> complex:
    """Region functional at width kappa; scales exactly as the squared charge."""
    return volume_path_integral_full(scene, kappa, quad)[0]


def _curvature_ints(scene: Scene, kappa: float, quad: QuadSpec):
    """Joint quadrature of the three curvature integrals (shared grids)."""
    surface = scene.surface
    loops = scene.geometric.loops

    def evaluate(panels: int) -> np.ndarray:
        T, w2 = tensor_nodes(panels, quad.nodes_per_panel, [(0.0, 1.0)] * 2)
        s_nodes, w1 = tensor_nodes(panels, quad.nodes_per_panel, [(0.0, 1.0)])
        s_nodes = s_nodes[:, 0]
        sigma, _, _ = surface.points_tangents(T)
        jac = surface.jacobian_matrix(T)
        n2 = T.shape[0]
        bracket_plain = np.zeros((n2, 3))
        bracket_tinv = np.zeros((n2, 3))
        b_dot = np.zeros(n2)
        sig = sigma[:, None, :]
        j_sigma = np.stack([jac[:, 2, 3], jac[:, 3, 1], jac[:, 1, 2]], axis=-1)
        for loop in loops:
            rho, vrho = loop.point_velocity(s_nodes)
            rho_b = rho[None, :, :]
            dz = dzero_pair(sig, rho_b, kappa)
            dot = np.einsum("tj,sj->ts", j_sigma, vrho[:, 1:])
            b_dot = b_dot + np.einsum("ts,s->t", dz * dot, w1)
            for c_idx, (i, j, k) in enumerate(CYCLIC):
                mp_j_plain = mixed_pair(sig, rho_b, kappa, spatial_inv=(j, "second"))
                mp_k_plain = mixed_pair(sig, rho_b, kappa, spatial_inv=(k, "second"))
                w_plain = vrho[:, k] * mp_j_plain - vrho[:, j] * mp_k_plain
                bracket_plain[:, c_idx] += np.einsum("ts,s->t", w_plain, w1)
                mp_j_t = mixed_pair(sig, rho_b, kappa, time_inv="first",
                                    spatial_inv=(j, "second"))
                mp_k_t = mixed_pair(sig, rho_b, kappa, time_inv="first",
                                    spatial_inv=(k, "second"))
                w_t = vrho[:, k] * mp_j_t - vrho[:, j] * mp_k_t
                bracket_tinv[:, c_idx] += np.einsum("ts,s->t", w_t, w1)
        k_vec = np.stack([jac[:, 0, 1], jac[:, 0, 2], jac[:, 0, 3]], axis=-1)
        int_a = float(np.einsum("tc,tc,t->", bracket_plain, k_vec, w2))
        int_b = float(np.dot(b_dot, w2))
        prod = (bracket_tinv[:, 0] * bracket_tinv[:, 1] * jac[:, 1, 2]
                + bracket_tinv[:, 1] * bracket_tinv[:, 2] * jac[:, 2, 3]
                + bracket_tinv[:, 2] * bracket_tinv[:, 0] * jac[:, 3, 1])
        int_c = float(np.dot(prod, w2))
        l1 = max(
            float(np.einsum("tc,tc,t->", np.abs(bracket_plain), np.abs(k_vec), w2)),
            float(np.dot(np.abs(b_dot), w2)),
            float(np.dot(np.abs(prod), w2)),
        )
        return np.array([int_a, int_b, int_c]), l1

    return converge(evaluate, quad, kappa, label="curvature integrals")


def curvature_components(scene: Scene, kappa: float,
                         quad: QuadSpec) -> tuple[complex, complex, complex, float]:
    """The three curvature pieces before assembly, plus a quadrature error.

    Returns (first piece on the plus direction, second piece, third piece).
    The first two are linear in the geometric velocities, the third
    bilinear; the plus/minus assembly is (a + b + c, -a - b + c).
    """
    surface = _require_surface(scene)
    if len(scene.geometric):
        d = _min_distance(scene._geometric_samples(), surface.sample_points())
        if d <= 1e-6:
            raise SceneValidationError(
                f"geometric hyperlink touches the surface (min distance {d:.3e})"
            )
    if len(scene.geometric) == 0:
        return 0.0j, 0.0j, 0.0j, 0.0
    res = _curvature_ints(scene, kappa, quad)
    int_a, int_b, int_c = (complex(v) for v in res.value)
    pre_ab = 1j * kappa**4 / (32.0 * math.pi * math.sqrt(4.0 * math.pi))
    pre_c = -(kappa**6) / (32.0 * math.pi**2)
    err = float(res.err_est) * max(abs(pre_ab), abs(pre_c))
    return -pre_ab * int_a, pre_ab * int_b, pre_c * int_c, err


def curvature_path_integral_full(scene: Scene, kappa: float, quad: QuadSpec):
    a_plus, b_scalar, c_scalar, q_err = curvature_components(scene, kappa, quad)
    z, z_err = z_kappa_full(scene, kappa, quad)
    cplus = a_plus + b_scalar + c_scalar
    cminus = -a_plus - b_scalar + c_scalar
    return AlgebraCoeff(cplus, cminus), z, q_err + z_err


def curvature_path_integral(scene: Scene, kappa: float,
                            quad: QuadSpec) -> tuple[AlgebraCoeff, complex]:
    """Surface-curvature functional: algebra coefficients plus the trace factor.

    The first two integrals are linear in the geometric velocities and flip
    sign under orientation reversal of every geometric loop; the third is
    bilinear and invariant.  An empty geometric hyperlink gives exactly
    (0, 0) with the dimension-sum trace factor.
    """
    coeff, z, _ = curvature_path_integral_full(scene, kappa, quad)
    return coeff, z
