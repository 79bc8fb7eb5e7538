"""Command-line driver: scene loading, kappa sweeps, result emission.

One run evaluates one observable over a kappa schedule, writes per-kappa
rows plus a summary (CSV or JSON), and exits 0 when the limit estimate
converged, 2 when it did not (values are still written), and 1 on scene
or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import quadrature
from .extrapolate import KappaSchedule, limit_estimate
from .integrands import (
    Scene,
    SceneValidationError,
    area_path_integral_full,
    curvature_path_integral_full,
    lambda_kappa,
    volume_path_integral_full,
    wilson_exponents,
    z_kappa_full,
)
from .kernels import KappaPoint
from .liealg import trace_exp
from .quadrature import QuadratureError, QuadSpec
from .scenes import SceneFormatError, load_scene

__all__ = ["RunConfig", "ObservableResult", "run", "main"]

OBSERVABLES = ("wilson", "area", "volume", "curvature", "diagnostics")

DIAG_SBAR = (0.0, 0.25, 0.5, 0.75)


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs; built by the argument parser."""

    scene_path: Path
    observable: str
    schedule: KappaSchedule = KappaSchedule()
    quad: QuadSpec = QuadSpec()
    output_path: Path = Path("results.csv")
    format: str = "csv"
    threads: int = 1
    mc_check: bool = False

    def __post_init__(self) -> None:
        if self.observable not in OBSERVABLES:
            raise ValueError(f"observable must be one of {OBSERVABLES}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")


@dataclass
class ObservableResult:
    """Per-kappa values plus the limit estimate for one observable run."""

    observable: str
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return bool(self.summary.get("converged", False))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    if x is None:
        return ""
    return str(x)


def _evaluate(scene: Scene, observable: str, kappa: float, quad: QuadSpec) -> dict:
    start = time.perf_counter()
    kp = KappaPoint(kappa)
    row: dict = {"kappa": kappa, "bk": kp.bk}
    if observable == "wilson":
        value, err = z_kappa_full(scene, kappa, quad)
    elif observable == "area":
        value, err = area_path_integral_full(scene, kappa, quad)
    elif observable == "volume":
        value, err = volume_path_integral_full(scene, kappa, quad)
    elif observable == "curvature":
        coeff, z, err = curvature_path_integral_full(scene, kappa, quad)
        row.update(
            cplus_re=coeff.cplus.real, cplus_im=coeff.cplus.imag,
            cminus_re=coeff.cminus.real, cminus_im=coeff.cminus.imag,
            z_re=z.real, z_im=z.imag,
        )
        row["err_est"] = err
        row["wall_ms"] = (time.perf_counter() - start) * 1e3
        return row
    else:
        raise ValueError(observable)
    row.update(value_re=value.real, value_im=value.imag, err_est=err)
    row["wall_ms"] = (time.perf_counter() - start) * 1e3
    return row


def _diagnostics_rows(scene: Scene, schedule: KappaSchedule, quad: QuadSpec) -> list:
    rows = []
    for kappa in schedule.values:
        start = time.perf_counter()
        for v in range(len(scene.geometric)):
            for sbar in DIAG_SBAR:
                vec = lambda_kappa(scene, v, sbar, kappa, quad)
                rows.append({
                    "kappa": kappa,
                    "loop": v,
                    "sbar": sbar,
                    "kappa_lambda_norm": kappa * float(np.linalg.norm(vec)),
                    "wall_ms": (time.perf_counter() - start) * 1e3,
                })
    return rows


def _diagnostics_summary(rows: list, schedule: KappaSchedule) -> dict:
    by_kappa: dict[float, float] = {}
    for row in rows:
        k = row["kappa"]
        by_kappa[k] = max(by_kappa.get(k, 0.0), row["kappa_lambda_norm"])
    kappas = sorted(by_kappa)
    peaks = [by_kappa[k] for k in kappas]
    decreasing = all(b <= a for a, b in zip(peaks, peaks[1:]))
    top = peaks[-1] if peaks else 0.0
    return {
        "limit_re": 0.0,
        "limit_im": 0.0,
        "err": top,
        "converged": bool(decreasing and top < 1e-2),
    }


def _mc_check_summary(scene: Scene, kappa: float, quad: QuadSpec) -> dict:
    """Seeded Monte-Carlo re-evaluation of the holonomy exponents.

    The trace observable amplifies exponent noise exponentially, so the
    cross-check tolerance is meaningful on the exponents, not on their
    cosh-scale traces; the worst per-loop relative difference is reported.
    """
    mc_quad = QuadSpec(rule="monte-carlo", mc_samples=quad.mc_samples,
                       mc_seed=quad.mc_seed, base_panels=quad.base_panels,
                       nodes_per_panel=quad.nodes_per_panel,
                       kappa_scaling=quad.kappa_scaling, rel_tol=quad.rel_tol,
                       max_refinements=quad.max_refinements)
    gl = wilson_exponents(scene, kappa, quad)
    mc = wilson_exponents(scene, kappa, mc_quad)
    worst = 0.0
    for a, b in zip(gl.thetas, mc.thetas):
        scale = max(abs(a), 1e-300)
        worst = max(worst, abs(a - b) / scale)
    return {"mc_kappa": kappa, "mc_samples": quad.mc_samples,
            "mc_exponent_rel_diff": worst}


def run(config: RunConfig) -> tuple[int, ObservableResult]:
    """Execute one sweep; writes the artifact file and returns (exit code, result)."""
    quadrature.set_max_workers(config.threads)
    try:
        scene = load_scene(config.scene_path)
        scene.validate()
        result = ObservableResult(observable=config.observable)
        if config.observable == "diagnostics":
            if len(scene.geometric) == 0:
                raise SceneValidationError(
                    "diagnostics needs at least one geometric loop")
            result.rows = _diagnostics_rows(scene, config.schedule, config.quad)
            result.summary = _diagnostics_summary(result.rows, config.schedule)
        else:
            for kappa in config.schedule.values:
                row = _evaluate(scene, config.observable, kappa, config.quad)
                result.rows.append(row)
            result.summary = _summarize(result.rows, config)
            if config.mc_check:
                if config.observable != "wilson":
                    raise SceneValidationError(
                        "--mc-check is supported for the wilson observable only")
                k_mid = config.schedule.values[-3]
                result.summary.update(
                    _mc_check_summary(scene, k_mid, config.quad))
    except (SceneFormatError, SceneValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1, ObservableResult(observable=config.observable,
                                   warnings=[str(exc)])
    except QuadratureError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        for panels, diff in exc.trace:
            print(f"  panels={panels} change={diff}", file=sys.stderr)
        result.warnings.append(str(exc))
        result.summary = {"converged": False}
        _write(config, result)
        return 2, result

    _write(config, result)
    return (0 if result.converged else 2), result


def _summarize(rows: list, config: RunConfig) -> dict:
    mode, rel_tol = config.schedule.mode, config.schedule.rel_tol
    if config.observable == "curvature":
        summary = {}
        all_conv = True
        for name in ("cplus", "cminus"):
            samples = [(r["kappa"], complex(r[f"{name}_re"], r[f"{name}_im"]))
                       for r in rows]
            est = limit_estimate(samples, mode, rel_tol)
            summary[f"{name}_limit_re"] = est.limit.real
            summary[f"{name}_limit_im"] = est.limit.imag
            summary[f"{name}_err"] = est.err
            all_conv = all_conv and est.converged
        summary["converged"] = all_conv
        return summary
    samples = [(r["kappa"], complex(r["value_re"], r["value_im"])) for r in rows]
    est = limit_estimate(samples, mode, rel_tol)
    return {"limit_re": est.limit.real, "limit_im": est.limit.imag,
            "err": est.err, "converged": est.converged}


def _csv_columns(observable: str) -> list[str]:
    if observable == "curvature":
        return ["row", "kappa", "bk", "cplus_re", "cplus_im", "cminus_re",
                "cminus_im", "z_re", "z_im", "err_est", "wall_ms", "converged"]
    if observable == "diagnostics":
        return ["row", "kappa", "loop", "sbar", "kappa_lambda_norm",
                "wall_ms", "converged"]
    return ["row", "kappa", "bk", "value_re", "value_im", "err_est",
            "wall_ms", "converged"]


def _write(config: RunConfig, result: ObservableResult) -> None:
    path = config.output_path
    path.parent.mkdir(parents=True, exist_ok=True)
    if config.format == "json":
        payload = {
            "observable": result.observable,
            "scene": str(config.scene_path),
            "schedule": list(config.schedule.values),
            "mode": config.schedule.mode,
            "rel_tol": config.schedule.rel_tol,
            "rows": result.rows,
            "summary": result.summary,
            "warnings": result.warnings,
        }
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return
    columns = _csv_columns(result.observable)
    lines = [",".join(columns)]
    for row in result.rows:
        cells = ["k"] + [_fmt(row.get(c)) for c in columns[1:]]
        lines.append(",".join(cells))
    summary_row = {"converged": result.summary.get("converged")}
    if result.observable == "curvature":
        summary_row.update({
            "cplus_re": result.summary.get("cplus_limit_re"),
            "cplus_im": result.summary.get("cplus_limit_im"),
            "cminus_re": result.summary.get("cminus_limit_re"),
            "cminus_im": result.summary.get("cminus_limit_im"),
            "err_est": max(result.summary.get("cplus_err", 0.0),
                           result.summary.get("cminus_err", 0.0)),
        })
    elif result.observable == "diagnostics":
        summary_row.update({"kappa_lambda_norm": result.summary.get("err")})
    else:
        summary_row.update({
            "value_re": result.summary.get("limit_re"),
            "value_im": result.summary.get("limit_im"),
            "err_est": result.summary.get("err"),
        })
    cells = ["summary"] + [_fmt(summary_row.get(c)) for c in columns[1:]]
    lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def _parse_args(argv) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="ehholonomy",
        description="Evaluate regularized holonomy observables over a kappa schedule",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run one observable sweep")
    runp.add_argument("--scene", required=True, type=Path)
    runp.add_argument("--observable", required=True, choices=OBSERVABLES)
    runp.add_argument("--kappa", default="5,10,20,40,60",
                      help="comma-separated increasing schedule")
    runp.add_argument("--mode", default="plateau",
                      choices=("plateau", "richardson-1/kappa",
                               "richardson-1/kappa^2"))
    runp.add_argument("--limit-rel-tol", type=float, default=0.02,
                      help="relative tolerance for the limit convergence flag")
    runp.add_argument("--rel-tol", type=float, default=1e-3,
                      help="quadrature refinement tolerance")
    runp.add_argument("--quad-panels", type=int, default=1,
                      help="base panel count per unit length")
    runp.add_argument("--nodes-per-panel", type=int, default=8)
    runp.add_argument("--max-refinements", type=int, default=4)
    runp.add_argument("--out", type=Path, default=Path("results.csv"))
    runp.add_argument("--format", choices=("csv", "json"), default=None)
    runp.add_argument("--threads", type=int, default=1)
    runp.add_argument("--mc-check", action="store_true",
                      help="cross-check the wilson observable with seeded Monte-Carlo")
    runp.add_argument("--mc-samples", type=int, default=4_000_000)
    runp.add_argument("--mc-seed", type=int, default=20260809)
    args = parser.parse_args(argv)

    try:
        values = tuple(float(x) for x in args.kappa.split(","))
    except ValueError as exc:
        parser.error(f"--kappa: {exc}")
    fmt = args.format or ("json" if str(args.out).endswith(".json") else "csv")
    return RunConfig(
        scene_path=args.scene,
        observable=args.observable,
        schedule=KappaSchedule(values, args.mode, args.limit_rel_tol),
        quad=QuadSpec(base_panels=args.quad_panels,
                      nodes_per_panel=args.nodes_per_panel,
                      rel_tol=args.rel_tol,
                      max_refinements=args.max_refinements,
                      mc_samples=args.mc_samples,
                      mc_seed=args.mc_seed),
        output_path=args.out,
        format=fmt,
        threads=args.threads,
        mc_check=args.mc_check,
    )


def main(argv=None) -> int:
    try:
        config = _parse_args(argv if argv is not None else sys.argv[1:])
    except (ValueError, SceneFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    code, _ = run(config)
    return code


if __name__ == "__main__":
    sys.exit(main())
