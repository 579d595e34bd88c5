"""Command-line front end: ``dplab <command> --config FILE --out DIR [--svg]``.

Exit codes: 0 success, 1 numerical failure, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import __version__, acceptance, loop1d, thresholds
from .geometry import (ConstantPhi, CurveDomainError, MonotoneCurve, TabulatedPhi, interval_curve, sample_polyline,
                       spiral_curve)
from .moebius import Moebius, PoleError, map_polyline, pullback_strength
from .solver2d import (LFT_LABEL, MonotonicityError, assemble, build_crack_mesh,
                       estimate_critical_strength, lft_pullback_spectrum, lowest_eigenvalues)
from .sparse_eig import EigensolverError, LinearSolverError
from .svg import grid_heatmap, line_plot

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("threshold", "loop1d", "lft", "solve2d", "critical", "verify")

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "loop": {"n": 2048, "k": 2},
    "mesh": {"h": 1 / 32},
    "solver": {"k": 1, "tol": 1e-8, "nonneg_tol": 1e-6, "preconditioner": "amg"},
    "critical": {"L": 1.0, "tol_omega": 0.05},
    "verify": {"criteria": [1, 2, 3, 4, 5, 6, 7, 8]},
}
ROOT_TOL = loop1d.ROOT_TOL


class ConfigError(ValueError):
    pass


def load_schema() -> dict:
    text = resources.files("dplab").joinpath("schema/config.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _tag(value, module: str, tolerance: Optional[float]) -> Dict[str, Any]:
    return {"value": value, "module": module, "tolerance": tolerance}


# -- configuration -----------------------------------------------------------

def read_config(path: Optional[str], command: str) -> dict:
    if path is None:
        if command != "verify":
            raise ConfigError("--config is required for this command")
        raw: dict = {}
    else:
        text = Path(path).read_text(encoding="utf-8")  # OSError -> exit 3
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
    if raw.get("command", command) != command:
        raise ConfigError(f"config is for command {raw['command']!r}, not {command!r}")
    raw = dict(raw, command=command)
    validate(raw)
    return raw


def validate(cfg: dict):
    import jsonschema

    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            lines.append(f"  at {where}: {err.message}")
        raise ConfigError("config does not match the schema:\n" + "\n".join(lines))


def resolve(cfg: dict, seed: int) -> dict:
    """Fill defaults so reports echo every parameter that influenced the run."""
    out = copy.deepcopy(cfg)
    for section, values in DEFAULTS.items():
        if section in out or _needs(out["command"], section):
            merged = dict(values)
            merged.update(out.get(section, {}))
            out[section] = merged
    curve = out.get("curve")
    if curve is not None:
        if curve["kind"] == "interval":
            curve.setdefault("origin", [0.0, 0.0])
            curve.setdefault("angle", 0.0)
        elif curve["kind"] == "spiral":
            curve.setdefault("origin", [0.0, 0.0])
            curve.setdefault("slope", 1.0)
        elif curve["kind"] == "tabulated":
            curve.setdefault("origin", [0.0, 0.0])
    if out["command"] in ("solve2d", "critical") and "box" not in out["mesh"]:
        out["mesh"]["box"] = _default_box(out)
    out["seed"] = seed
    return out


def _needs(command: str, section: str) -> bool:
    return {"loop1d": {"loop"}, "solve2d": {"mesh", "solver"}, "critical": {"mesh", "critical", "solver"},
            "verify": {"verify"}}.get(command, set()).__contains__(section)


def _default_box(cfg: dict) -> List[float]:
    if cfg["command"] == "critical":
        L = cfg["critical"]["L"]
        return [-3.0, L + 3.0, -3.0, 3.0]
    xa, xb, y0 = _segment_from_curve(cfg)
    return [xa - 3.0, xb + 3.0, y0 - 3.0, y0 + 3.0]


def _complex(v) -> complex:
    return complex(v) if not isinstance(v, list) else complex(v[0], v[1])


def build_curve(spec: dict) -> Tuple[MonotoneCurve, Optional[Moebius]]:
    """Monotone curve (the preimage for ``arc``) and the LFT attached to it, if any."""
    kind = spec["kind"]
    if kind == "interval":
        return interval_curve(spec["length"], spec["origin"], spec["angle"]), None
    if kind == "spiral":
        return spiral_curve(spec["extent"], spec["slope"], spec["origin"]), None
    if kind == "tabulated":
        r, v, d = (np.asarray(spec[k], dtype=float) for k in ("breakpoints", "values", "derivatives"))
        try:
            phi = TabulatedPhi(r, v, d)
            return MonotoneCurve(spec["origin"], spec["extent"], phi), None
        except ValueError as exc:
            raise ConfigError(f"curve: {exc}") from exc
    if kind == "arc":
        try:
            return thresholds.arc_preimage(spec["R"], spec["eps"])
        except ValueError as exc:
            raise ConfigError(f"curve: {exc}") from exc
    raise ConfigError(f"unknown curve kind {kind!r}")


def _moebius_from(cfg: dict, default: Optional[Moebius]) -> Optional[Moebius]:
    if "lft" not in cfg:
        return default
    c = cfg["lft"]
    try:
        return Moebius(*(_complex(c[k]) for k in "abcd"))
    except ValueError as exc:
        raise ConfigError(f"lft: {exc}") from exc


def _segment_from_curve(cfg: dict) -> Tuple[float, float, float]:
    spec = cfg["curve"]
    if spec["kind"] == "interval":
        if spec.get("angle", 0.0) != 0.0:
            raise ConfigError("solve2d needs a horizontal interval (angle 0)")
        x0, y0 = spec.get("origin", [0.0, 0.0])
        return x0, x0 + spec["length"], y0
    if spec["kind"] == "arc":
        gamma, _ = thresholds.arc_preimage(spec["R"], spec["eps"])
        return gamma.origin.x, gamma.origin.x + gamma.extent, gamma.origin.y
    raise ConfigError("solve2d supports curve kinds 'interval' and 'arc'")


# -- outputs -----------------------------------------------------------------

def csv_text(header: List[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


class Outputs:
    def __init__(self):
        self.files: Dict[str, str] = {}
        self.table: List[Tuple[str, str]] = []

    def add(self, name: str, text: str):
        self.files[name] = text

    def row(self, key: str, value):
        self.table.append((key, f"{value:.10g}" if isinstance(value, float) else str(value)))


# -- commands ----------------------------------------------------------------

def cmd_threshold(cfg: dict, out: Outputs, svg: bool) -> dict:
    curve, M = build_curve(cfg["curve"])
    M = _moebius_from(cfg, M)
    try:
        rep = thresholds.threshold_report(curve, M)
    except CurveDomainError:
        raise
    except ValueError as exc:
        raise ConfigError(f"threshold: {exc}") from exc
    res: Dict[str, Any] = {
        "omega_star": _tag(rep.omega_star, "thresholds", thresholds.GOLDEN_RTOL),
        "provenance": rep.provenance,
    }
    out.row("omega_star", rep.omega_star)
    if rep.sup_sqrt_jacobian is not None:
        res["sup_sqrt_jacobian"] = _tag(rep.sup_sqrt_jacobian, "moebius", 1e-10)
        res["preimage_omega_star"] = _tag(thresholds.omega_star(curve), "thresholds", thresholds.GOLDEN_RTOL)
        out.row("sup sqrt(J)", rep.sup_sqrt_jacobian)
    if M is None and isinstance(curve.phi, ConstantPhi):
        upper = thresholds.interval_bound_state_threshold(curve.extent)
        res["bound_state_threshold"] = _tag(upper, "thresholds", 0.0)
        out.row("bound-state threshold", upper)
    if isinstance(cfg.get("omega"), (int, float)):
        verdict = thresholds.classify(curve, float(cfg["omega"]), M)
        res["verdict"] = {"tag": verdict.tag.value, "witness": verdict.witness, "module": "thresholds"}
        out.row("verdict", verdict.tag.value)
    out.add("pointwise_bound.csv", csv_text(["r", "bound"], zip(rep.radii.tolist(), rep.pointwise.tolist())))
    if svg:
        out.add("pointwise_bound.svg", line_plot(
            [(rep.radii, rep.pointwise, "#1f4e9c")], title="pointwise bound on the strength",
            xlabel="r", ylabel="1 / (2 pi r j(r))",
            hlines=[(rep.omega_star if M is None else thresholds.omega_star(curve), "#b22222")]))
    return res


def cmd_loop1d(cfg: dict, out: Outputs, svg: bool) -> dict:
    c = cfg["loop"]
    spec = loop1d.LoopSpec(c["d"], c["omega"])
    exact = loop1d.loop_negative_eigenvalues(spec)
    fe = loop1d.loop_fe_spectrum(spec, n=c["n"], k=c["k"], seed=cfg["seed"])
    res: Dict[str, Any] = {
        "coupling_d_omega": spec.coupling,
        "transcendental": _tag(exact.eigenvalues, "loop1d", ROOT_TOL),
        "fe": _tag(fe.eigenvalues, "loop1d", 1e-9),
        "fe_cells": c["n"],
    }
    notes = []
    if len(exact) == 0:
        notes.append("no negative eigenvalues (d * omega <= 1)")
    if spec.omega == 0.0:
        notes.append("omega = 0: Neumann conditions at both ends")
    res["notes"] = notes
    out.row("d * omega", spec.coupling)
    out.row("negative eigenvalue", exact.lowest if len(exact) else "none")
    out.row("FE lowest", fe.lowest)
    rows = [("transcendental", i, v) for i, v in enumerate(exact.eigenvalues.tolist())]
    rows += [("fe", i, v) for i, v in enumerate(fe.eigenvalues.tolist())]
    out.add("loop_spectrum.csv", csv_text(["method", "index", "eigenvalue"], rows))
    top = 2.0 * abs(spec.omega) if spec.omega != 0.0 else 1.0
    kappa = np.linspace(top / 400, top, 400)
    th = loop1d.theta(spec, kappa)
    out.add("theta.csv", csv_text(["kappa", "theta"], zip(kappa.tolist(), th.tolist())))
    if svg:
        markers = []
        if len(exact):
            k0 = math.sqrt(-exact.lowest)
            markers.append((k0, 1.0, "#b22222"))
        out.add("theta.svg", line_plot([(kappa, th, "#1f4e9c")], title="secular function",
                                       xlabel="kappa", ylabel="theta(kappa)",
                                       hlines=[(1.0, "#555555")], markers=markers))
    return res


def cmd_lft(cfg: dict, out: Outputs, svg: bool) -> dict:
    curve, M = build_curve(cfg["curve"])
    M = _moebius_from(cfg, M)
    if M is None:
        raise ConfigError("lft needs an 'arc' curve or an explicit 'lft' block")
    poly_g = sample_polyline(curve, thresholds.LFT_SAMPLES, include_endpoints=True)
    gstar = thresholds.omega_star(curve)
    value = thresholds.lft_threshold(gstar, M, poly_g)
    omega = cfg.get("omega", value)
    if not isinstance(omega, (int, float)):
        raise ConfigError("lft accepts a constant omega only")
    table = pullback_strength(M, poly_g, float(omega))
    image = map_polyline(M, poly_g)
    res = {
        "preimage_omega_star": _tag(gstar, "thresholds", thresholds.GOLDEN_RTOL),
        "omega_star": _tag(value, "thresholds", 1e-10),
        "sup_sqrt_jacobian": _tag(gstar / value, "moebius", 1e-10),
        "omega": float(omega),
        "max_pulled_back_strength": _tag(table.max, "moebius", 1e-12),
        "image_length": _tag(image.length, "moebius", 1e-6),
    }
    out.row("omega_star (image)", value)
    out.row("max pulled-back strength", table.max)
    rows = zip(table.arc_length.tolist(), table.points[:, 0].tolist(), table.points[:, 1].tolist(),
               table.values.tolist())
    out.add("pullback_strength.csv", csv_text(["s", "x", "y", "omega_tilde"], rows))
    if svg:
        out.add("pullback_strength.svg", line_plot(
            [(table.arc_length, table.values, "#1f4e9c")], title="pulled-back strength",
            xlabel="arc length on the preimage", ylabel="omega_tilde", hlines=[(gstar, "#b22222")]))
    return res


def _omega_for_mesh(cfg: dict, crack_x: np.ndarray):
    om = cfg["omega"]
    if isinstance(om, (int, float)):
        return float(om)
    x, v = np.asarray(om["x"], dtype=float), np.asarray(om["values"], dtype=float)
    if x.shape != v.shape:
        raise ConfigError("omega table: 'x' and 'values' differ in length")
    if np.any(np.diff(x) <= 0):
        raise ConfigError("omega table: 'x' must be strictly increasing")
    if x[0] > crack_x[0] + 1e-12 or x[-1] < crack_x[-1] - 1e-12:
        raise ConfigError("omega table does not cover the crack")
    return np.interp(crack_x, x, v)


def _mesh(cfg: dict, segment):
    m = cfg["mesh"]
    try:
        return build_crack_mesh(tuple(m["box"]), m["h"], segment)
    except ValueError as exc:
        raise ConfigError(f"mesh: {exc}") from exc


def cmd_solve2d(cfg: dict, out: Outputs, svg: bool) -> dict:
    s = cfg["solver"]
    segment = _segment_from_curve(cfg)
    mesh = _mesh(cfg, segment)
    if cfg["curve"]["kind"] == "arc":
        gamma, M = build_curve(cfg["curve"])
        if not isinstance(cfg["omega"], (int, float)):
            raise ConfigError("arc problems take a constant omega on the arc")
        # mesh was already validated by _mesh above
        rep = lft_pullback_spectrum(M, gamma, float(cfg["omega"]), tuple(cfg["mesh"]["box"]), cfg["mesh"]["h"],
                                    k=s["k"], tol=s["tol"], nonneg_tol=s["nonneg_tol"], seed=cfg["seed"])
    else:
        asm = assemble(mesh, _omega_for_mesh(cfg, mesh.crack_x))
        rep = lowest_eigenvalues(asm, k=s["k"], tol=s["tol"], nonneg_tol=s["nonneg_tol"],
                                 preconditioner=s["preconditioner"], seed=cfg["seed"])
    res: Dict[str, Any] = {
        "eigenvalues": _tag(rep.eigenvalues, "solver2d", s["tol"]),
        "verdict_numeric": {"tag": rep.verdict, "tolerance": rep.nonneg_tol, "module": "solver2d"},
        "label": rep.label,
        "unknowns": int(mesh.n_nodes - int(mesh.boundary.sum())),
        "segment": list(mesh.segment),
    }
    out.row("lambda1", rep.lambda1)
    out.row("verdict", rep.verdict)
    out.row("label", rep.label)
    if rep.label != LFT_LABEL and isinstance(cfg["omega"], (int, float)):
        L = mesh.crack_length
        res["strip_ground_state"] = _tag(thresholds.strip_ground_state(L, float(cfg["omega"])), "thresholds", 0.0)
        res["infinite_volume_note"] = "strip comparison value, an upper bound for the plane ground state"
    out.add("eigenvalues.csv", csv_text(["index", "eigenvalue", "residual"],
                                        zip(range(rep.eigenvalues.size), rep.eigenvalues.tolist(),
                                            rep.residual_norms.tolist())))
    if svg:
        grid = rep.ground_state[:mesh.n_grid_nodes].reshape(mesh.ny + 1, mesh.nx + 1)
        out.add("ground_state.svg", grid_heatmap(grid, mesh.box, segment=mesh.segment,
                                                 title=f"ground state, lambda1 = {rep.lambda1:.6g}"))
    return res


def cmd_critical(cfg: dict, out: Outputs, svg: bool) -> dict:
    c, m, s = cfg["critical"], cfg["mesh"], cfg["solver"]
    try:
        br = estimate_critical_strength(c["L"], tuple(m["box"]), m["h"], c["tol_omega"], tol=s["tol"],
                                        nonneg_tol=s["nonneg_tol"], seed=cfg["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    res = {
        "bracket": _tag([br.omega_lo, br.omega_hi], "solver2d", c["tol_omega"]),
        "lambda1_at_ends": _tag([br.lambda_lo, br.lambda_hi], "solver2d", s["tol"]),
        "lower_threshold": 1 / (2 * math.pi * c["L"]),
        "upper_threshold": math.pi / (2 * c["L"]),
        "note": "discretization-dependent estimate on the given box and mesh",
    }
    out.row("bracket", f"[{br.omega_lo:.6g}, {br.omega_hi:.6g}]")
    out.add("critical_samples.csv", csv_text(["omega", "lambda1"], sorted(br.samples)))
    if svg:
        om, lam = np.array(sorted(br.samples)).T
        out.add("critical_samples.svg", line_plot([(om, lam, "#1f4e9c")], title="ground state vs strength",
                                                  xlabel="omega", ylabel="lambda1",
                                                  hlines=[(0.0, "#555555")]))
    return res


def cmd_verify(cfg: dict, out: Outputs, svg: bool) -> dict:
    results = acceptance.run(cfg["verify"]["criteria"], seed=cfg["seed"], echo=print)
    summary = {
        "passed": all(r.passed for r in results),
        "criteria": [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
                     for r in results],
    }
    out.add("verify.json", json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    out.row("passed", f"{sum(r.passed for r in results)}/{len(results)}")
    return summary


HANDLERS = {"threshold": cmd_threshold, "loop1d": cmd_loop1d, "lft": cmd_lft,
            "solve2d": cmd_solve2d, "critical": cmd_critical, "verify": cmd_verify}


# -- driver ------------------------------------------------------------------

def _seed(cfg: dict) -> int:
    env = os.environ.get("DPLAB_SEED")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"DPLAB_SEED must be a non-negative integer, got {env!r}")
        if value < 0:
            raise ConfigError("DPLAB_SEED must be non-negative")
        return value
    return int(cfg.get("seed", 0))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dplab", description="Spectral thresholds for jump interactions on curves.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--svg", action="store_true", help="also write SVG plots")
    return p


def write_outputs(out_dir: Path, report: dict, outputs: Outputs, elapsed: float):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n",
                                         encoding="utf-8")
    for name, text in sorted(outputs.files.items()):
        with open(out_dir / name, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    (out_dir / "timing.json").write_text(json.dumps({"wall_time_s": round(elapsed, 3)}) + "\n",
                                         encoding="utf-8")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        raw = read_config(args.config, args.command)
        seed = _seed(raw)
        cfg = resolve(raw, seed)
        outputs = Outputs()
        results = HANDLERS[args.command](cfg, outputs, args.svg)
    except ConfigError as exc:
        print(f"dplab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"dplab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EigensolverError, LinearSolverError, MonotonicityError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"dplab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CurveDomainError, PoleError) as exc:
        print(f"dplab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    report = {
        "command": args.command,
        "config": cfg,
        "results": results,
        "provenance": {"version": __version__, "seed": cfg["seed"],
                       "tolerances": cfg.get("solver", {"root": ROOT_TOL})},
    }
    try:
        write_outputs(Path(args.out), report, outputs, time.perf_counter() - t0)
    except OSError as exc:
        print(f"dplab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    width = max((len(k) for k, _ in outputs.table), default=0)
    for key, value in outputs.table:
        print(f"{key.ljust(width)}  {value}")
    if args.command == "verify" and not results["passed"]:
        return EXIT_NUMERICAL
    return EXIT_OK


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
