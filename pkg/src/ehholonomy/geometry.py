"""Parametrized loops, hyperlinks, surfaces and regions in R x R^3.

Loops are truncated Fourier series, which closes them exactly and gives
exact derivatives.  Surfaces and regions come from a small shape library
under affine placement so Jacobians are analytic.  The time-like check is
grid-based: the continuous condition is not decidable from samples, so the
sampling resolution and tolerance are part of the contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FourierLoop",
    "Hyperlink",
    "Surface",
    "SurfaceCell",
    "Region",
    "RegionCell",
    "Violation",
    "eval_loop",
    "validate_timelike",
    "surface_jacobians",
    "reparametrize",
    "circle_loop",
]

TAU = 2.0 * math.pi


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FourierLoop:
    """A closed curve in R^4 given by truncated Fourier series per coordinate.

    ``constant`` has shape (4,); ``cos_coeffs``/``sin_coeffs`` have shape
    (4, M) for M harmonics.  ``orientation`` -1 traverses the same locus
    backwards: evaluation maps s to 1-s and negates the velocity.
    """

    constant: np.ndarray
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    orientation: int = 1

    def __post_init__(self) -> None:
        const = _readonly(np.asarray(self.constant, dtype=float).reshape(4))
        cos_c = np.atleast_2d(np.asarray(self.cos_coeffs, dtype=float))
        sin_c = np.atleast_2d(np.asarray(self.sin_coeffs, dtype=float))
        if cos_c.shape[0] != 4 or sin_c.shape[0] != 4 or cos_c.shape != sin_c.shape:
            raise ValueError("coefficient arrays must have shape (4, M)")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "constant", const)
        object.__setattr__(self, "cos_coeffs", _readonly(cos_c))
        object.__setattr__(self, "sin_coeffs", _readonly(sin_c))

    @property
    def harmonics(self) -> int:
        return self.cos_coeffs.shape[1]

    def point_velocity(self, s) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate position and velocity at parameters s in [0, 1].

        Returns arrays of shape (n, 4).  The series is evaluated exactly;
        closure x(0) = x(1) is automatic.
        """
        s = np.atleast_1d(np.asarray(s, dtype=float))
        u = 1.0 - s if self.orientation == -1 else s
        m = np.arange(1, self.harmonics + 1, dtype=float)
        ang = TAU * u[:, None] * m[None, :]
        c, sn = np.cos(ang), np.sin(ang)
        pts = self.constant[None, :] + np.einsum("nm,am->na", c, self.cos_coeffs)
        pts += np.einsum("nm,am->na", sn, self.sin_coeffs)
        dc = -TAU * m * sn
        ds = TAU * m * c
        vel = np.einsum("nm,am->na", dc, self.cos_coeffs)
        vel += np.einsum("nm,am->na", ds, self.sin_coeffs)
        if self.orientation == -1:
            vel = -vel
        return pts, vel

    def reversed(self) -> "FourierLoop":
        return FourierLoop(self.constant, self.cos_coeffs, self.sin_coeffs,
                           orientation=-self.orientation)

    def translated(self, offset) -> "FourierLoop":
        return FourierLoop(self.constant + np.asarray(offset, dtype=float),
                           self.cos_coeffs, self.sin_coeffs, self.orientation)


def eval_loop(loop: FourierLoop, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Point and velocity at a single parameter value."""
    pts, vel = loop.point_velocity(np.array([s], dtype=float))
    return pts[0], vel[0]


def circle_loop(center, axis_u, axis_v, radius: float = 1.0,
                orientation: int = 1) -> FourierLoop:
    """Round loop center + r cos(2 pi s) u + r sin(2 pi s) v (4-vectors)."""
    center = np.asarray(center, dtype=float).reshape(4)
    u = np.asarray(axis_u, dtype=float).reshape(4)
    v = np.asarray(axis_v, dtype=float).reshape(4)
    return FourierLoop(center, (radius * u)[:, None], (radius * v)[:, None],
                       orientation=orientation)


@dataclass(frozen=True)
class Violation:
    """One failed sample-pair check from the time-like validation."""

    kind: str  # "spatial-coincidence" | "time-degenerate-crossing"
    loop_a: int
    s_a: float
    loop_b: int
    s_b: float


@dataclass(frozen=True)
class Hyperlink:
    """A finite set of disjoint loops, optionally colored per loop."""

    loops: tuple
    colors: tuple | None = None

    def __post_init__(self) -> None:
        loops = tuple(self.loops)
        object.__setattr__(self, "loops", loops)
        if self.colors is not None:
            colors = tuple(self.colors)
            if len(colors) != len(loops):
                raise ValueError("one color per loop required")
            object.__setattr__(self, "colors", colors)

    def __len__(self) -> int:
        return len(self.loops)


def validate_timelike(h: Hyperlink, grid: int = 256, tol: float = 1e-6) -> list[Violation]:
    """Sample-grid check of the time-like hyperlink condition.

    Any two distinct samples must have positive spatial separation.  For
    samples on *different* loops, agreement of two spatial coordinates
    additionally forces a time separation; same-loop projection crossings
    are the deferred self-linking machinery and are not flagged.
    Violations are data, not errors; an empty list is a pass.
    """
    if grid < 16:
        raise ValueError("grid must be >= 16")
    if len(h) == 0:
        return []
    s = np.arange(grid) / grid
    pts = [loop.point_velocity(s)[0] for loop in h.loops]
    all_pts = np.concatenate(pts, axis=0)
    loop_ids = np.repeat(np.arange(len(h)), grid)
    s_all = np.tile(s, len(h))

    diff = all_pts[:, None, :] - all_pts[None, :, :]
    spatial_sq = np.sum(diff[:, :, 1:] ** 2, axis=-1)
    upper = np.triu(np.ones(spatial_sq.shape, dtype=bool), k=1)

    violations: list[Violation] = []
    close = upper & (spatial_sq <= tol * tol)
    for a, b in zip(*np.nonzero(close)):
        violations.append(Violation("spatial-coincidence", int(loop_ids[a]),
                                    float(s_all[a]), int(loop_ids[b]), float(s_all[b])))

    cross = upper & (loop_ids[:, None] != loop_ids[None, :])
    two_agree = np.sum(np.abs(diff[:, :, 1:]) <= tol, axis=-1) >= 2
    degenerate = cross & two_agree & (np.abs(diff[:, :, 0]) <= tol) & (spatial_sq > tol * tol)
    for a, b in zip(*np.nonzero(degenerate)):
        violations.append(Violation("time-degenerate-crossing", int(loop_ids[a]),
                                    float(s_all[a]), int(loop_ids[b]), float(s_all[b])))
    return violations


@dataclass(frozen=True)
class SurfaceCell:
    """Axis-aligned sub-rectangle of the parameter square, with optional label."""

    t_lo: float
    t_hi: float
    tbar_lo: float
    tbar_hi: float
    label: int | None = None

    def bounds(self):
        return [(self.t_lo, self.t_hi), (self.tbar_lo, self.tbar_hi)]

    @property
    def area(self) -> float:
        return (self.t_hi - self.t_lo) * (self.tbar_hi - self.tbar_lo)


def _check_partition(cells, dims: int, areas) -> None:
    if not cells:
        raise ValueError("partition must contain at least one cell")
    total = 0.0
    boxes = []
    for cell in cells:
        b = cell.bounds()
        for lo, hi in b:
            if not (0.0 <= lo < hi <= 1.0):
                raise ValueError(f"cell bounds {b} must nest in the unit box")
        boxes.append(b)
        total += areas(cell)
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            if all(boxes[i][d][0] < boxes[j][d][1] - 1e-12
                   and boxes[j][d][0] < boxes[i][d][1] - 1e-12 for d in range(dims)):
                raise ValueError(f"partition cells {i} and {j} overlap")
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"partition covers {total:.12f} of the unit box, expected 1")


@dataclass(frozen=True)
class Surface:
    """A parametrized surface patch from the shape library.

    kinds:
      * ``planar-rectangle``: origin + t e0 + tbar e1,
      * ``disk``: origin + t (cos(2 pi tbar) u + sin(2 pi tbar) v),
      * ``torus-patch``: spine circle of radius R in the (u, v) plane with a
        tube of radius r toward w.
    ``axes`` holds the frame 4-vectors (2 for rectangle/disk, 3 for torus).
    """

    kind: str
    origin: np.ndarray
    axes: np.ndarray
    partition: tuple = (SurfaceCell(0.0, 1.0, 0.0, 1.0, None),)
    major_radius: float = 1.0
    minor_radius: float = 0.25

    def __post_init__(self) -> None:
        if self.kind not in ("planar-rectangle", "disk", "torus-patch"):
            raise ValueError(f"unknown surface kind: {self.kind!r}")
        origin = _readonly(np.asarray(self.origin, dtype=float).reshape(4))
        axes = np.atleast_2d(np.asarray(self.axes, dtype=float))
        need = 3 if self.kind == "torus-patch" else 2
        if axes.shape != (need, 4):
            raise ValueError(f"{self.kind} needs {need} frame 4-vectors")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "axes", _readonly(axes))
        cells = tuple(self.partition)
        _check_partition(cells, 2, lambda c: c.area)
        object.__setattr__(self, "partition", cells)

    def points_tangents(self, that) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Positions and the two tangent vectors at parameters (n, 2)."""
        that = np.atleast_2d(np.asarray(that, dtype=float))
        t, tb = that[:, 0], that[:, 1]
        n = that.shape[0]
        if self.kind == "planar-rectangle":
            e0, e1 = self.axes
            pts = self.origin + t[:, None] * e0 + tb[:, None] * e1
            dt = np.broadcast_to(e0, (n, 4)).copy()
            dtb = np.broadcast_to(e1, (n, 4)).copy()
        elif self.kind == "disk":
            u, v = self.axes
            c, sn = np.cos(TAU * tb), np.sin(TAU * tb)
            radial = c[:, None] * u + sn[:, None] * v
            pts = self.origin + t[:, None] * radial
            dt = radial
            dtb = TAU * t[:, None] * (-sn[:, None] * u + c[:, None] * v)
        else:
            u, v, w = self.axes
            R, r = self.major_radius, self.minor_radius
            cp, sp = np.cos(TAU * t), np.sin(TAU * t)
            ct, st = np.cos(TAU * tb), np.sin(TAU * tb)
            spine = cp[:, None] * u + sp[:, None] * v
            pts = self.origin + (R + r * ct)[:, None] * spine + (r * st)[:, None] * w
            dt = TAU * (R + r * ct)[:, None] * (-sp[:, None] * u + cp[:, None] * v)
            dtb = TAU * r * (-st[:, None] * spine + ct[:, None] * w)
        return pts, dt, dtb

    def jacobian_matrix(self, that) -> np.ndarray:
        """Antisymmetric (n, 4, 4) array of the J_{ab} minors; exact antisymmetry."""
        _, dt, dtb = self.points_tangents(that)
        return dt[:, :, None] * dtb[:, None, :] - dtb[:, :, None] * dt[:, None, :]

    def is_planar_x2x3(self, tol: float = 1e-9) -> bool:
        """True when the image is parallel to the x2-x3 spatial plane."""
        probe = np.array([[0.3, 0.2], [0.7, 0.6], [0.1, 0.9], [0.5, 0.5]])
        _, dt, dtb = self.points_tangents(probe)
        return bool(np.all(np.abs(dt[:, :2]) < tol) and np.all(np.abs(dtb[:, :2]) < tol))

    def sample_points(self, per_axis: int = 24) -> np.ndarray:
        g = (np.arange(per_axis) + 0.5) / per_axis
        tt, bb = np.meshgrid(g, g, indexing="ij")
        pts, _, _ = self.points_tangents(np.stack([tt.ravel(), bb.ravel()], axis=-1))
        return pts


def surface_jacobians(surf: Surface, that) -> np.ndarray:
    """All six independent J_{ab} at one parameter point, as a 4x4 array."""
    return surf.jacobian_matrix(np.asarray(that, dtype=float).reshape(1, 2))[0]


@dataclass(frozen=True)
class RegionCell:
    """Axis-aligned sub-box of the parameter cube."""

    lo: tuple
    hi: tuple

    def bounds(self):
        return [(self.lo[d], self.hi[d]) for d in range(3)]

    @property
    def volume(self) -> float:
        return math.prod(self.hi[d] - self.lo[d] for d in range(3))


@dataclass(frozen=True)
class Region:
    """Affine image of the unit cube in the time-zero spatial slice."""

    origin: np.ndarray  # spatial 3-vector
    edges: np.ndarray   # (3, 3), columns are edge vectors
    partition: tuple = (RegionCell((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)),)

    def __post_init__(self) -> None:
        origin = _readonly(np.asarray(self.origin, dtype=float).reshape(3))
        edges = _readonly(np.asarray(self.edges, dtype=float).reshape(3, 3))
        if abs(float(np.linalg.det(edges))) <= 0.0:
            raise ValueError("region edge matrix must be invertible")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "edges", edges)
        cells = tuple(self.partition)
        _check_partition(cells, 3, lambda c: c.volume)
        object.__setattr__(self, "partition", cells)

    @property
    def jacobian_det(self) -> float:
        return abs(float(np.linalg.det(self.edges)))

    def points4(self, r) -> np.ndarray:
        """Map parameters (n, 3) to R^4 points on the time-zero slice."""
        r = np.atleast_2d(np.asarray(r, dtype=float))
        spatial = self.origin + r @ self.edges.T
        out = np.zeros((r.shape[0], 4))
        out[:, 1:] = spatial
        return out

    def sample_points(self, per_axis: int = 12) -> np.ndarray:
        g = (np.arange(per_axis) + 0.5) / per_axis
        a, b, c = np.meshgrid(g, g, g, indexing="ij")
        return self.points4(np.stack([a.ravel(), b.ravel(), c.ravel()], axis=-1))


def reparametrize(loop: FourierLoop, alpha: float = 0.15,
                  harmonics: int | None = None) -> FourierLoop:
    """Refit a loop under a smooth increasing warp of its parameter.

    The warp s -> s + alpha sin(2 pi s) / (2 pi) fixes the endpoints and
    keeps the derivative positive for |alpha| < 1.  The warped curve is
    re-fit as a Fourier series at doubled harmonic resolution, so the new
    loop traverses the same locus up to spectral truncation error.
    """
    if not abs(alpha) < 1.0:
        raise ValueError("warp amplitude must satisfy |alpha| < 1")
    if harmonics is None:
        harmonics = max(16, 2 * loop.harmonics)
    n = 8 * harmonics
    s = np.arange(n) / n
    warped = s + alpha * np.sin(TAU * s) / TAU
    pts, _ = loop.point_velocity(warped)
    spec = np.fft.rfft(pts, axis=0) / n
    const = spec[0].real
    cos_c = 2.0 * spec[1 : harmonics + 1].real.T
    sin_c = -2.0 * spec[1 : harmonics + 1].imag.T
    return FourierLoop(const, cos_c, sin_c, orientation=1)
