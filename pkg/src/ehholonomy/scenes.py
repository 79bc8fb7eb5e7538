"""Scene JSON schema, loaders with field-path diagnostics, and reference scenes.

Schema summary (all lengths dimensionless, spins stored as doubled
integers to avoid float half-integers, orientations as +-1):

    {
      "charge": 1.0,
      "matter": [
        {"color": {"jplus2": 1, "jminus2": 1},
         "orientation": 1,
         "constant": [t, x1, x2, x3],
         "cos": [[...], [...], [...], [...]],   # per-axis harmonic lists
         "sin": [[...], [...], [...], [...]]}
      ],
      "geometric": [ {"orientation": 1, "constant": [...], "cos": ..., "sin": ...} ],
      "surface": {"kind": "planar-rectangle" | "disk" | "torus-patch",
                  "origin": [4], "axes": [[4], ...],
                  "major_radius": 1.0, "minor_radius": 0.25,   # torus only
                  "partition": [{"t": [0,1], "tbar": [0,1], "label": 0 | null}]},
      "region": {"origin": [3], "edges": [[3],[3],[3]],
                 "partition": [{"lo": [0,0,0], "hi": [1,1,1]}]}
    }

Surface partition labels index the scene's distinct matter colors in order
of first appearance; unlabeled cells contribute nothing to the area
observable.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geometry import (
    FourierLoop,
    Hyperlink,
    Region,
    RegionCell,
    Surface,
    SurfaceCell,
    circle_loop,
)
from .integrands import Scene
from .liealg import ColoredRep

__all__ = [
    "SceneFormatError",
    "load_scene",
    "parse_scene",
    "scene_to_dict",
    "empty_geometric_scene",
    "hopf_pair_scene",
    "pierced_square_scene",
    "box_region_scene",
    "BUNDLED_SCENES",
]


class SceneFormatError(ValueError):
    """Malformed scene file; the message carries the offending field path."""


def _get(obj, key, path, expected=None, default=...):
    if not isinstance(obj, dict):
        raise SceneFormatError(f"{path}: expected an object")
    if key not in obj:
        if default is not ...:
            return default
        raise SceneFormatError(f"{path}.{key}: missing required field")
    val = obj[key]
    if expected is not None and not isinstance(val, expected):
        raise SceneFormatError(
            f"{path}.{key}: expected {expected.__name__ if hasattr(expected, '__name__') else expected}"
        )
    return val


def _vector(obj, key, path, length, default=...):
    raw = _get(obj, key, path, list, default)
    if raw is default and default is not ...:
        return raw
    if len(raw) != length or not all(isinstance(x, (int, float)) for x in raw):
        raise SceneFormatError(f"{path}.{key}: expected {length} numbers")
    return [float(x) for x in raw]


def _loop(obj, path, colored: bool):
    constant = _vector(obj, "constant", path, 4)
    cos_lists = _get(obj, "cos", path, list)
    sin_lists = _get(obj, "sin", path, list)
    if len(cos_lists) != 4 or len(sin_lists) != 4:
        raise SceneFormatError(f"{path}.cos/.sin: expected 4 per-axis lists")
    harmonics = max(
        [len(h) for h in cos_lists] + [len(h) for h in sin_lists] + [1]
    )

    def pad(lists, name):
        out = np.zeros((4, harmonics))
        for a, row in enumerate(lists):
            if not isinstance(row, list) or not all(
                isinstance(x, (int, float)) for x in row
            ):
                raise SceneFormatError(f"{path}.{name}[{a}]: expected a number list")
            out[a, : len(row)] = row
        return out

    orientation = _get(obj, "orientation", path, int, 1)
    if orientation not in (1, -1):
        raise SceneFormatError(f"{path}.orientation: expected 1 or -1")
    loop = FourierLoop(np.array(constant), pad(cos_lists, "cos"),
                       pad(sin_lists, "sin"), orientation=orientation)
    color = None
    if colored:
        cobj = _get(obj, "color", path, dict)
        jplus2 = _get(cobj, "jplus2", f"{path}.color", int)
        jminus2 = _get(cobj, "jminus2", f"{path}.color", int)
        if jplus2 < 0 or jminus2 < 0:
            raise SceneFormatError(f"{path}.color: doubled spins must be >= 0")
        color = ColoredRep(jplus2 / 2.0, jminus2 / 2.0)
    return loop, color


def _surface(obj, path):
    kind = _get(obj, "kind", path, str)
    origin = _vector(obj, "origin", path, 4)
    axes_raw = _get(obj, "axes", path, list)
    axes = [_vector({"a": a}, "a", f"{path}.axes[{i}]", 4)
            for i, a in enumerate(axes_raw)]
    cells = []
    for i, craw in enumerate(_get(obj, "partition", path, list)):
        cpath = f"{path}.partition[{i}]"
        t = _vector(craw, "t", cpath, 2)
        tbar = _vector(craw, "tbar", cpath, 2)
        label = _get(craw, "label", cpath, default=None)
        if label is not None and not isinstance(label, int):
            raise SceneFormatError(f"{cpath}.label: expected an integer or null")
        cells.append(SurfaceCell(t[0], t[1], tbar[0], tbar[1], label))
    kwargs = {}
    if kind == "torus-patch":
        kwargs["major_radius"] = float(_get(obj, "major_radius", path, (int, float), 1.0))
        kwargs["minor_radius"] = float(_get(obj, "minor_radius", path, (int, float), 0.25))
    try:
        return Surface(kind, np.array(origin), np.array(axes),
                       tuple(cells), **kwargs)
    except ValueError as exc:
        raise SceneFormatError(f"{path}: {exc}") from exc


def _region(obj, path):
    origin = _vector(obj, "origin", path, 3)
    edges_raw = _get(obj, "edges", path, list)
    if len(edges_raw) != 3:
        raise SceneFormatError(f"{path}.edges: expected 3 edge vectors")
    edges = np.array(
        [_vector({"e": e}, "e", f"{path}.edges[{i}]", 3) for i, e in enumerate(edges_raw)]
    ).T  # columns are edges
    cells = []
    for i, craw in enumerate(_get(obj, "partition", path, list)):
        cpath = f"{path}.partition[{i}]"
        lo = _vector(craw, "lo", cpath, 3)
        hi = _vector(craw, "hi", cpath, 3)
        cells.append(RegionCell(tuple(lo), tuple(hi)))
    try:
        return Region(np.array(origin), edges, tuple(cells))
    except ValueError as exc:
        raise SceneFormatError(f"{path}: {exc}") from exc


def parse_scene(data: dict) -> Scene:
    """Build a Scene from parsed JSON, reporting precise field paths on errors."""
    charge = float(_get(data, "charge", "scene", (int, float), 1.0))
    matter_raw = _get(data, "matter", "scene", list, [])
    geometric_raw = _get(data, "geometric", "scene", list, [])
    matter_loops, colors = [], []
    for i, lraw in enumerate(matter_raw):
        loop, color = _loop(lraw, f"scene.matter[{i}]", colored=True)
        matter_loops.append(loop)
        colors.append(color)
    geo_loops = [
        _loop(lraw, f"scene.geometric[{i}]", colored=False)[0]
        for i, lraw in enumerate(geometric_raw)
    ]
    surface = region = None
    if data.get("surface") is not None:
        surface = _surface(data["surface"], "scene.surface")
    if data.get("region") is not None:
        region = _region(data["region"], "scene.region")
    return Scene(
        matter=Hyperlink(tuple(matter_loops), tuple(colors) if colors else None),
        geometric=Hyperlink(tuple(geo_loops)),
        charge=charge,
        surface=surface,
        region=region,
    )


def load_scene(path: str | Path) -> Scene:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SceneFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise SceneFormatError(f"{path}: top level must be an object")
    return parse_scene(data)


def _loop_dict(loop: FourierLoop, color: ColoredRep | None = None) -> dict:
    out = {
        "orientation": loop.orientation,
        "constant": [float(x) for x in loop.constant],
        "cos": [[float(x) for x in row] for row in loop.cos_coeffs],
        "sin": [[float(x) for x in row] for row in loop.sin_coeffs],
    }
    if color is not None:
        out["color"] = {"jplus2": int(round(2 * color.jplus)),
                        "jminus2": int(round(2 * color.jminus))}
    return out


def scene_to_dict(scene: Scene) -> dict:
    out: dict = {"charge": scene.charge}
    out["matter"] = [
        _loop_dict(loop, color)
        for loop, color in zip(scene.matter.loops, scene.matter.colors or ())
    ]
    out["geometric"] = [_loop_dict(loop) for loop in scene.geometric.loops]
    if scene.surface is not None:
        s = scene.surface
        sd = {
            "kind": s.kind,
            "origin": [float(x) for x in s.origin],
            "axes": [[float(x) for x in row] for row in s.axes],
            "partition": [
                {"t": [c.t_lo, c.t_hi], "tbar": [c.tbar_lo, c.tbar_hi],
                 "label": c.label}
                for c in s.partition
            ],
        }
        if s.kind == "torus-patch":
            sd["major_radius"] = s.major_radius
            sd["minor_radius"] = s.minor_radius
        out["surface"] = sd
    if scene.region is not None:
        r = scene.region
        out["region"] = {
            "origin": [float(x) for x in r.origin],
            "edges": [[float(x) for x in r.edges[:, i]] for i in range(3)],
            "partition": [
                {"lo": list(c.lo), "hi": list(c.hi)} for c in r.partition
            ],
        }
    return out


# ---------------------------------------------------------------------------
# Bundled reference scenes
# ---------------------------------------------------------------------------

E0 = np.array([1.0, 0.0, 0.0, 0.0])
E1 = np.array([0.0, 1.0, 0.0, 0.0])
E2 = np.array([0.0, 0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 0.0, 1.0])


def empty_geometric_scene() -> Scene:
    """One matter loop colored (1/2, 0) and no geometric hyperlink.

    Every holonomy exponent vanishes, so the trace observable is exactly
    the dimension sum 2 + 1 = 3 at every kappa.
    """
    loop = circle_loop(np.zeros(4), E2, E3, radius=1.0)
    return Scene(
        matter=Hyperlink((loop,), (ColoredRep(0.5, 0.0),)),
        geometric=Hyperlink(()),
        charge=1.0,
    )


def hopf_pair_scene() -> Scene:
    """Linked matter/geometric circles with unit spatial clearance.

    The matter unit circle spans the x2-x3 plane at time 0; the geometric
    unit circle lies in the x1-x2 plane through the matter circle's center,
    displaced to time 0.3.  Their plane projections cross, and every
    crossing is separated in time, so the pair is time-like on the grid.
    """
    matter = circle_loop(np.zeros(4), E2, E3, radius=1.0)
    geometric = circle_loop(np.array([0.3, 0.0, 1.0, 0.0]), E1, -E2, radius=1.0)
    return Scene(
        matter=Hyperlink((matter,), (ColoredRep(0.5, 0.5),)),
        geometric=Hyperlink((geometric,)),
        charge=1.0,
    )


def pierced_square_scene(jplus: float = 0.5, jminus: float = 0.0) -> Scene:
    """A matter circle piercing a unit square in the x2-x3 plane exactly once.

    The circle sits in the x1-x2 plane at constant time 0.2, offset so that
    only one of its two crossings of the x1 = 0 plane lands inside the
    square.  The whole square is one partition cell labeled with the single
    color class.
    """
    loop = circle_loop(np.array([0.2, 0.0, 0.35, 0.0]), E1, E2, radius=0.3)
    surface = Surface(
        kind="planar-rectangle",
        origin=np.array([0.0, 0.0, -0.5, -0.5]),
        axes=np.array([E2, E3]),
        partition=(SurfaceCell(0.0, 1.0, 0.0, 1.0, label=0),),
    )
    return Scene(
        matter=Hyperlink((loop,), (ColoredRep(jplus, jminus),)),
        geometric=Hyperlink(()),
        charge=1.0,
        surface=surface,
    )


def box_region_scene(jplus: float = 0.5, jminus: float = 0.0,
                     charge: float = 1.0, offset=(0.0, 0.0, 0.0)) -> Scene:
    """A tilted matter circle passing spatially through a box region.

    The loop sits at time 0.25 while the region lives on the time-zero
    slice, so they are disjoint in R x R^3 even though an arc of the loop
    crosses the box spatially (where the volume integrand concentrates).
    The circle's plane is tilted against all coordinate planes: loops with
    a vanishing velocity component have identical profile functions in the
    two loop parameters and the volume integrand cancels exactly.
    """
    axis_a = np.array([0.0, 1.0, 1.0, 1.0]) / np.sqrt(3.0)
    axis_b = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0)
    loop = circle_loop(np.array([0.25, 0.0, 0.0, 0.0]), axis_a, axis_b, radius=1.0)
    off = np.asarray(offset, dtype=float)
    region = Region(
        origin=np.array([0.18, 0.18, 0.18]) + off,
        edges=0.8 * np.eye(3),
        partition=(
            RegionCell((0.0, 0.0, 0.0), (0.5, 1.0, 1.0)),
            RegionCell((0.5, 0.0, 0.0), (1.0, 1.0, 1.0)),
        ),
    )
    return Scene(
        matter=Hyperlink((loop,), (ColoredRep(jplus, jminus),)),
        geometric=Hyperlink(()),
        charge=charge,
        region=region,
    )


def curvature_demo_scene() -> Scene:
    """Hopf pair plus a time-tilted rectangle near the geometric loop.

    The surface extends in the time direction so that the time-column
    Jacobian minors are nonzero; a purely spatial surface would zero out
    the first curvature integral identically.
    """
    base = hopf_pair_scene()
    # Edges tilted against every coordinate plane so all Jacobian minors are
    # nonzero, and placed asymmetrically so no parity cancellation hides a term.
    surface = Surface(
        kind="planar-rectangle",
        origin=np.array([-0.5, 0.25, -0.3, -0.2]),
        axes=np.array([[1.0, 0.3, 0.5, 0.0], [0.0, 0.2, 0.1, 1.0]]),
        partition=(SurfaceCell(0.0, 1.0, 0.0, 1.0, None),),
    )
    return Scene(
        matter=base.matter,
        geometric=base.geometric,
        charge=base.charge,
        surface=surface,
    )


BUNDLED_SCENES = {
    "empty_geometric": empty_geometric_scene,
    "hopf_pair": hopf_pair_scene,
    "pierced_square": pierced_square_scene,
}


def write_bundled(directory: str | Path) -> list[Path]:
    """Write the three reference scene files; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, builder in BUNDLED_SCENES.items():
        path = directory / f"{name}.json"
        path.write_text(json.dumps(scene_to_dict(builder()), indent=2) + "\n")
        written.append(path)
    return written
