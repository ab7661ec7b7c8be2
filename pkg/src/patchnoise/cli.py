"""Command line front end: ``patchnoise point|sweep|validate``.

Configuration is JSON (see :data:`CONFIG_KEYS`); flags override file
values and presets ``fig8``, ``fig10``, ``fig11`` reproduce the scaling
figures for the sphere, needle and disc.

Exit codes: 0 ok, 1 validation failure, 2 configuration error, 3 numerical
failure (non-convergence or a vanishing Lambda in the log-derivative).
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import geofactor
from .geofactor import EdgeSingularityError
from .geometry import (
    ConvergenceWarning,
    DomainError,
    HolePlane,
    InfinitePlane,
    OblateSpheroid,
    ProlateSpheroid,
    Sphere,
    disc,
    needle,
)
from .patchmodel import PatchModel
from .scaling import LogOfZeroError, alpha_at, lambda_at, sweep_alpha

CSV_HEADER = ["geometry", "mode", "patch", "backend", "D", "lambda", "alpha"]

CONFIG_KEYS = {
    "geometry": 'object: {"kind": plane|hole|sphere|prolate|oblate|needle|disc, "a", "xi0", "d_hole"}',
    "modes": "list of mode labels (or 'mode': single label)",
    "patches": "list of patch strings (IP, PP, theta=X, l0=N) or an object mode -> list",
    "grid": '{"min", "max", "points", "log": true}',
    "D": "distance for the point command",
    "backend": "auto|closed|spectral|quadrature",
    "rtol": "series convergence target",
    "edge_delta": "edge cutoff (hole s mode, disc)",
    "area_ratio": "A/N",
    "h": "log step of the derivative",
    "richardson": "Richardson levels",
    "lmax": "series length (null = adaptive)",
    "output": '{"csv": path, "svg": path}',
}

PRESETS = {
    "fig8": {
        "geometry": {"kind": "sphere", "a": 1.0},
        "modes": ["r", "theta"],
        "patches": {
            "r": ["IP", "PP", "theta=1e-1", "theta=1e-2", "theta=1e-3", "theta=1e-4"],
            # theta mode: no IP field; the single l = 1 term bounds it from below
            "theta": ["l0=1", "PP", "theta=1e-1", "theta=1e-2", "theta=1e-3", "theta=1e-4"],
        },
        "grid": {"min": 1e-4, "max": 1e2, "points": 41, "log": True},
    },
    "fig10": {
        "geometry": {"kind": "needle", "a": 1.0},
        "modes": ["xi", "eta"],
        "patches": {
            "xi": ["IP", "PP", "theta=0.4", "theta=0.04"],
            "eta": ["l0=1", "PP", "theta=0.4", "theta=0.04"],
        },
        "grid": {"min": 1e-2, "max": 1e3, "points": 41, "log": True},
    },
    "fig11": {
        "geometry": {"kind": "disc", "a": 1.0},
        "modes": ["xi", "eta"],
        "patches": {
            "xi": ["IP", "PP", "theta=0.4", "theta=0.04"],
            "eta": ["l0=1", "PP", "theta=0.4", "theta=0.04"],
        },
        "edge_delta": 0.1,
        "grid": {"min": 2e-2, "max": 1e2, "points": 36, "log": True},
    },
}

DEFAULTS = {
    "modes": None,
    "patches": ["IP", "PP"],
    "grid": {"min": 1e-2, "max": 1e2, "points": 21, "log": True},
    "D": 1.0,
    "backend": "auto",
    "rtol": 1e-8,
    "edge_delta": None,
    "area_ratio": 1.0,
    "h": 0.05,
    "richardson": 0,
    "lmax": None,
    "output": {},
}


DISC_EDGE_DELTA = 0.1


class ConfigError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


def build_geometry(spec):
    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = spec.get("kind")
    a = float(spec.get("a", 1.0))
    try:
        if kind == "plane":
            return InfinitePlane()
        if kind == "hole":
            return HolePlane(float(spec.get("d_hole", 1.0)))
        if kind == "sphere":
            return Sphere(a)
        if kind == "needle":
            return needle(a)
        if kind == "disc":
            return disc(a)
        if kind == "prolate":
            return ProlateSpheroid(a, float(spec["xi0"]))
        if kind == "oblate":
            return OblateSpheroid(a, float(spec["xi0"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad geometry {spec!r}: {exc}") from None
    raise ConfigError(f"unknown geometry kind {kind!r}")


@dataclass
class RunConfig:
    """Validated run configuration."""

    geometry: object
    modes: List[str]
    patches: Dict[str, List[PatchModel]]
    grid: np.ndarray
    D: float
    backend: str
    rtol: float
    edge_delta: Optional[float]
    area_ratio: float
    h: float
    richardson: int
    lmax: Optional[int]
    output: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        unknown = set(raw) - set(CONFIG_KEYS) - {"mode"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = copy.deepcopy(DEFAULTS)
        cfg.update(copy.deepcopy(raw))
        if "geometry" not in raw:
            raise ConfigError("config needs a geometry")
        g = build_geometry(cfg["geometry"])
        modes = cfg.get("modes") or ([cfg["mode"]] if "mode" in cfg else list(g.modes))
        try:
            modes = [g.check_mode(m).label for m in modes]
        except (ValueError, DomainError) as exc:
            raise ConfigError(str(exc)) from None
        an = float(cfg["area_ratio"])
        if not an > 0:
            raise ConfigError("area_ratio must be positive")
        raw_p = cfg["patches"]
        try:
            if isinstance(raw_p, dict):
                patches = {m: [PatchModel.parse(p, an) for p in raw_p[m]] for m in modes}
            else:
                patches = {m: [PatchModel.parse(p, an) for p in raw_p] for m in modes}
        except KeyError as exc:
            raise ConfigError(f"no patch list for mode {exc}") from None
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        gr = cfg["grid"]
        try:
            lo, hi, n = float(gr["min"]), float(gr["max"]), int(gr["points"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError("grid needs min, max and points") from None
        if not (0 < lo < hi) or n < 2:
            raise ConfigError("grid needs 0 < min < max and points >= 2")
        grid = np.geomspace(lo, hi, n) if gr.get("log", True) else np.linspace(lo, hi, n)
        delta = cfg["edge_delta"]
        if delta is not None:
            delta = float(delta)
            if not 0 < delta < 0.5:
                raise ConfigError("edge_delta must lie in (0, 0.5)")
        if delta is None and isinstance(g, OblateSpheroid) and g.xi0 == 0.0:
            # the library insists on an explicit cutoff; the front end uses the customary 0.1
            delta = DISC_EDGE_DELTA
        if delta is None and isinstance(g, HolePlane) and "s" in modes:
            raise ConfigError(f"{g.kind} with modes {modes} needs edge_delta")
        if cfg["backend"] not in ("auto", "closed", "spectral", "quadrature"):
            raise ConfigError(f"unknown backend {cfg['backend']!r}")
        h = float(cfg["h"])
        if not 0 < h <= 0.2:
            raise ConfigError("h must lie in (0, 0.2]")
        D = float(cfg["D"])
        if not D > 0:
            raise ConfigError("D must be positive")
        lmax = cfg["lmax"]
        return cls(g, modes, patches, grid, D, cfg["backend"], float(cfg["rtol"]), delta, an, h,
                   int(cfg["richardson"]), None if lmax is None else int(lmax), dict(cfg.get("output") or {}))


def _fmt(x) -> str:
    return "%.9g" % x


def _load_config(args) -> RunConfig:
    raw = {}
    if args.preset:
        raw = copy.deepcopy(PRESETS[args.preset])
    if args.config:
        try:
            with open(args.config) as fh:
                raw.update(json.load(fh))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
    if args.geometry:
        raw["geometry"] = json.loads(args.geometry) if args.geometry.startswith("{") else {"kind": args.geometry}
    if args.mode:
        raw["modes"] = args.mode
    if args.patch:
        raw["patches"] = args.patch
    if args.D is not None:
        raw["D"] = args.D
    if args.grid:
        raw["grid"] = {"min": args.grid[0], "max": args.grid[1], "points": int(args.grid[2]), "log": True}
    for key, val in (("edge_delta", args.delta), ("area_ratio", args.a_over_n), ("lmax", args.lmax),
                     ("h", args.h), ("backend", args.backend), ("richardson", args.richardson)):
        if val is not None:
            raw[key] = val
    out = dict(raw.get("output") or {})
    if args.out:
        out["csv"] = args.out
    if args.svg:
        out["svg"] = args.svg
    raw["output"] = out
    return RunConfig.from_dict(raw)


# ---------------------------------------------------------------------------
# point
# ---------------------------------------------------------------------------

def cmd_point(cfg: RunConfig, stream=None) -> int:
    stream = sys.stdout if stream is None else stream
    g = cfg.geometry
    for mode in cfg.modes:
        for patch in cfg.patches[mode]:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConvergenceWarning)
                res = lambda_at(g, mode, patch, cfg.D, cfg.backend, cfg.lmax, cfg.edge_delta, rtol=cfg.rtol)
            if not res.converged:
                raise NumericalFailure(f"series did not converge: residual {res.residual:.3g} at lmax={res.lmax}")
            try:
                a = alpha_at(g, mode, patch, cfg.D, cfg.h, cfg.richardson, cfg.backend, cfg.lmax, cfg.edge_delta,
                             rtol=cfg.rtol)
            except LogOfZeroError as exc:
                print(f"geometry={g.kind} mode={mode} patch={patch.label} backend={res.backend} "
                      f"D={_fmt(cfg.D)} lambda={_fmt(res.value)} units={res.units} alpha=nan", file=stream)
                raise NumericalFailure(str(exc)) from None
            print(f"geometry={g.kind} mode={mode} patch={patch.label} backend={res.backend} "
                  f"D={_fmt(cfg.D)} lambda={_fmt(res.value)} units={res.units} alpha={_fmt(a)}", file=stream)
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def run_sweep(cfg: RunConfig, threads=None):
    curves = []
    for mode in cfg.modes:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            curves.extend(sweep_alpha(cfg.geometry, mode, cfg.patches[mode], cfg.grid, cfg.h, cfg.richardson,
                                      cfg.backend, cfg.lmax, cfg.edge_delta, threads=threads, rtol=cfg.rtol))
    return curves


def curves_to_csv(curves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in curves:
        for D, lam, a in zip(c.D, c.lam, c.alpha):
            w.writerow([c.geometry, c.mode, c.patch, c.backend, _fmt(D), _fmt(lam), _fmt(a)])
    return buf.getvalue()


def curves_to_svg(curves, width=640, panel_height=360) -> str:
    """Log-x plots of alpha, one panel per mode.

    IP / PP bounds are solid, truncated curves dotted, alpha = 4 dashed.
    """
    modes = list(dict.fromkeys(c.mode for c in curves))
    ml, mr, mt, mb = 60, 110, 30, 40
    pw, ph = width - ml - mr, panel_height - mt - mb
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{panel_height * len(modes)}" '
           f'font-family="sans-serif" font-size="11">']
    for i, mode in enumerate(modes):
        sub = [c for c in curves if c.mode == mode]
        x0, y0 = ml, i * panel_height + mt
        lx = np.log10(np.concatenate([c.D for c in sub]))
        xa, xb = math.floor(lx.min()), math.ceil(lx.max())
        vals = np.concatenate([c.alpha[np.isfinite(c.alpha)] for c in sub] + [np.array([0.0, 4.0])])
        ya, yb = math.floor(vals.min()), math.ceil(vals.max())
        if yb == ya:
            yb = ya + 1

        def X(d):
            return x0 + (math.log10(d) - xa) / (xb - xa) * pw

        def Y(a):
            return y0 + ph - (a - ya) / (yb - ya) * ph

        out.append(f'<rect x="{x0}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
        for e in range(xa, xb + 1):
            out.append(f'<line x1="{X(10.0 ** e):.2f}" y1="{y0 + ph}" x2="{X(10.0 ** e):.2f}" y2="{y0 + ph + 4}" stroke="black"/>')
            out.append(f'<text x="{X(10.0 ** e):.2f}" y="{y0 + ph + 16}" text-anchor="middle">1e{e}</text>')
        for a in range(ya, yb + 1):
            out.append(f'<line x1="{x0 - 4}" y1="{Y(a):.2f}" x2="{x0}" y2="{Y(a):.2f}" stroke="black"/>')
            out.append(f'<text x="{x0 - 7}" y="{Y(a) + 4:.2f}" text-anchor="end">{a}</text>')
        out.append(f'<text x="{x0 + pw / 2:.1f}" y="{y0 + ph + 32}" text-anchor="middle">D</text>')
        out.append(f'<text x="{x0 - 40}" y="{y0 + ph / 2:.1f}" text-anchor="middle">alpha</text>')
        out.append(f'<text x="{x0 + pw / 2:.1f}" y="{y0 - 10}" text-anchor="middle">{sub[0].geometry}, {mode} mode</text>')
        if ya <= 4 <= yb:
            out.append(f'<line x1="{x0}" y1="{Y(4):.2f}" x2="{x0 + pw}" y2="{Y(4):.2f}" stroke="gray" stroke-dasharray="6,4"/>')
        for j, c in enumerate(sub):
            col = colors[j % len(colors)]
            dash = "" if c.patch in ("IP", "PP") else ' stroke-dasharray="2,3"'
            pts = " ".join(f"{X(d):.2f},{Y(a):.2f}" for d, a in zip(c.D, c.alpha) if np.isfinite(a))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.5"{dash}/>')
            ly = y0 + 14 + 16 * j
            out.append(f'<line x1="{x0 + pw + 8}" y1="{ly}" x2="{x0 + pw + 30}" y2="{ly}" stroke="{col}" stroke-width="1.5"{dash}/>')
            out.append(f'<text x="{x0 + pw + 34}" y="{ly + 4}">{c.patch}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_sweep(cfg: RunConfig, stream=None, threads=None) -> int:
    stream = sys.stdout if stream is None else stream
    curves = run_sweep(cfg, threads)
    bad = [(c.patch, c.mode, d) for c in curves for d, ok in zip(c.D, c.converged) if not ok]
    text = curves_to_csv(curves)
    path = cfg.output.get("csv")
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        stream.write(text)
    if cfg.output.get("svg"):
        with open(cfg.output["svg"], "w") as fh:
            fh.write(curves_to_svg(curves))
    if bad:
        p, m, d = bad[0]
        raise NumericalFailure(f"{len(bad)} grid points did not converge (first: {m} {p} D={d:.4g})")
    return 0


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

@dataclass
class Check:
    group: str
    name: str
    value: float
    expected: float
    tol: float
    relative: bool = True

    @property
    def deviation(self):
        diff = abs(self.value - self.expected)
        if self.relative:
            return diff / abs(self.expected) if self.expected != 0 else diff
        return diff

    @property
    def passed(self):
        return bool(np.isfinite(self.value)) and self.deviation <= self.tol


def _checks_plane():
    g = InfinitePlane()
    out = []
    for d in (0.5, 1.0, 4.0):
        for k in ("z", "x"):
            q = geofactor.lambda_quadrature(g, k, "PP", (0, 0, d)).value
            c = geofactor.lambda_closed(g, k, "PP", (0, 0, d)).value
            out.append(Check("plane", f"{k} PP d={d:g} quadrature vs closed", q, c, 1e-5))
            out.append(Check("plane", f"{k} IP d={d:g} quadrature", geofactor.lambda_quadrature(g, k, "IP", (0, 0, d)).value,
                             0.0, 1e-10, relative=False))
    z = geofactor.lambda_closed(g, "z", "PP", (0, 0, 3.0)).value
    x = geofactor.lambda_closed(g, "x", "PP", (0, 0, 3.0)).value
    out.append(Check("plane", "mode ratio z/x", z / x, 2.0, 1e-12))
    return out


def _checks_hole():
    out = []
    for d in (1.0, 2.0):
        g = HolePlane(d)
        for reg in ("IP", "PP"):
            q = geofactor.lambda_quadrature(g, "z", reg, (0, 0, 0)).value
            c = geofactor.lambda_closed(g, "z", reg, (0, 0, 0)).value
            out.append(Check("hole", f"z {reg} d={d:g} quadrature vs closed", q, c, 1e-4))
    g = HolePlane(1.0)
    for delta in (0.01, 0.001):
        q = geofactor.lambda_quadrature(g, "s", "PP", (0, 0, 0), edge_delta=delta).value
        c = geofactor.lambda_closed(g, "s", "PP", (0, 0, 0), edge_delta=delta).value
        out.append(Check("hole", f"s PP delta={delta:g} quadrature vs leading order", q, c, 1e-3, relative=False))
        out.append(Check("hole", f"s PP delta={delta:g} quadrature vs exact cutoff", q,
                         geofactor.hole_radial_pp_finite_delta(delta), 1e-6))
    return out


def _checks_sphere():
    g = Sphere(1.0)
    out = []
    for r in (1.5, 2.0, 5.0):
        pt = (0, 0, r)
        for k in ("r", "theta"):
            for reg in ("IP", "PP"):
                c = geofactor.lambda_closed(g, k, reg, pt).value
                s = geofactor.lambda_spectral(g, k, PatchModel.truncated(l0=60) if reg == "PP" else reg, pt).value
                q = geofactor.lambda_quadrature(g, k, reg, pt).value
                rel = c != 0.0
                tol = 1e-5 if rel else 1e-10
                out.append(Check("sphere", f"{k} {reg} r={r:g} spectral vs closed", s, c, tol, rel))
                out.append(Check("sphere", f"{k} {reg} r={r:g} quadrature vs closed", q, c, tol, rel))
    out.append(Check("sphere", "r PP r=2 l0=60 vs closed",
                     geofactor.lambda_spectral(g, "r", PatchModel.truncated(l0=60), (0, 0, 2)).value,
                     51.0 / (324.0 * math.pi), 1e-8))
    return out


def _checks_spheroid():
    out = []
    g = ProlateSpheroid(1.0, 1e3)
    s = Sphere(1e3)
    for k, ks in (("xi", "r"), ("eta", "theta")):
        for z in (1.5e3, 2e3, 5e3):
            v = geofactor.lambda_spectral(g, k, "PP", (0, 0, z)).value
            out.append(Check("spheroid", f"prolate xi0=1e3 {k} PP z={z:g} vs sphere", v,
                             geofactor.lambda_spectral(s, ks, "PP", (0, 0, z)).value, 1e-4))
    for xi0, d in ((1.5, 0.5), (1.01, 0.2)):
        g = ProlateSpheroid(1.0, xi0)
        pt = (0, 0, xi0 + d)
        for k in ("xi", "eta"):
            v = geofactor.lambda_spectral(g, k, "PP", pt).value
            out.append(Check("spheroid", f"prolate xi0={xi0:g} {k} PP spectral vs quadrature", v,
                             geofactor.lambda_quadrature(g, k, "PP", pt).value, 1e-5))
        v = geofactor.lambda_spectral(g, "xi", "IP", pt).value
        out.append(Check("spheroid", f"prolate xi0={xi0:g} xi IP spectral vs quadrature", v,
                         geofactor.lambda_quadrature(g, "xi", "IP", pt).value, 1e-5))
        out.append(Check("spheroid", f"prolate xi0={xi0:g} xi IP closed / spectral", v * 2.0,
                         geofactor.lambda_closed(g, "xi", "IP", pt).value, 1e-12))
    g = disc()
    for k in ("xi", "eta"):
        v = geofactor.lambda_spectral(g, k, "PP", (0, 0, 1.0), edge_delta=0.1).value
        out.append(Check("spheroid", f"disc {k} PP spectral vs quadrature", v,
                         geofactor.lambda_quadrature(g, k, "PP", (0, 0, 1.0), edge_delta=0.1).value, 1e-5))
    return out


VALIDATE_GROUPS = {
    "plane": _checks_plane,
    "hole": _checks_hole,
    "sphere": _checks_sphere,
    "spheroid": _checks_spheroid,
}


def run_checks(subset=None):
    groups = list(VALIDATE_GROUPS) if not subset else list(subset)
    for name in groups:
        if name not in VALIDATE_GROUPS:
            raise ConfigError(f"unknown validate group {name!r}; choose from {sorted(VALIDATE_GROUPS)}")
    checks = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        for name in groups:
            checks.extend(VALIDATE_GROUPS[name]())
    return checks


def cmd_validate(subset=None, stream=None) -> int:
    stream = sys.stdout if stream is None else stream
    checks = run_checks(subset)
    for c in checks:
        flag = "PASS" if c.passed else "FAIL"
        kind = "rel" if c.relative else "abs"
        print(f"{flag}  {c.group:<9} {c.name:<52} value={c.value:.10g} expected={c.expected:.10g} "
              f"dev={c.deviation:.2e} ({kind} tol {c.tol:g})", file=stream)
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed", file=stream)
    if failed:
        worst = max(failed, key=lambda c: c.deviation)
        print(f"worst deviation {worst.deviation:.3e} in {worst.group}: {worst.name}", file=stream)
        return 1
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="patchnoise", description="Patch-potential geometric factors and scaling exponents.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("point", "sweep", "validate"):
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON run configuration")
        s.add_argument("--preset", choices=sorted(PRESETS))
        s.add_argument("--out", help="CSV output path (default stdout)")
        s.add_argument("--svg", help="SVG output path")
        s.add_argument("--delta", type=float, help="edge cutoff")
        s.add_argument("--a-over-n", dest="a_over_n", type=float, help="A/N")
        s.add_argument("--lmax", type=int)
        s.add_argument("--h", type=float, help="log step for alpha")
        s.add_argument("--richardson", type=int)
        s.add_argument("--backend", choices=("auto", "closed", "spectral", "quadrature"))
        s.add_argument("--geometry", help="kind or JSON object")
        s.add_argument("--mode", action="append")
        s.add_argument("--patch", action="append")
        s.add_argument("--D", type=float)
        s.add_argument("--grid", nargs=3, type=float, metavar=("MIN", "MAX", "POINTS"))
        if name == "validate":
            s.add_argument("--subset", action="append", help="check group (repeatable)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.subset)
        cfg = _load_config(args)
        if args.command == "point":
            return cmd_point(cfg)
        return cmd_sweep(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalFailure, LogOfZeroError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (DomainError, EdgeSingularityError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
