"""Command-line interface: ``helixphase {simulate,sweep,verify,overlay}``.

Parameters come from the packaged defaults, then an optional ``--config``
file of ``key = value`` lines, then flags.  Exit codes: 0 success,
1 verification failure, 2 usage or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from importlib import resources

import numpy as np

from . import experiment as exp
from .analytic import (
    berry_phase,
    dynamical_phase,
    polarization_adiabatic,
    polarization_exact,
    topological_phase,
)
from .dynamics import MAX_TOTAL_STEPS, evolve
from .errors import DomainError, HelixPhaseError, NonConvergedError, NotCyclicError, ParseError
from .field import NEUTRON_GYROMAGNETIC_RATIO, HelicalFieldParams, adiabaticity_ratio, rotating_frame_params
from .phases import measure_topological_phase
from .verify import run_all

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

_FLOAT_KEYS = {"B0", "phi", "L", "v", "kappa", "tol", "phi_min", "phi_max"}
_INT_KEYS = {"turns", "steps", "max_steps", "phi_points", "jobs"}
_BOOL_KEYS = {"numeric", "degrees"}
_STR_KEYS = {"output", "scan"}
_ANGLE_KEYS = ("phi", "phi_min", "phi_max")
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _BOOL_KEYS | _STR_KEYS


class ConfigError(HelixPhaseError, ValueError):
    pass


def _convert(key: str, raw: str):
    try:
        if key in _FLOAT_KEYS:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError(raw)
            return value
        if key in _INT_KEYS:
            return int(raw)
        if key in _BOOL_KEYS:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from None
    return raw


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse flat ``key = value`` text; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw)
    return values


def default_config() -> dict:
    text = resources.files("helixphase").joinpath("data/default.cfg").read_text()
    return parse_config(text, "default.cfg")


def _to_radians(values: dict) -> dict:
    out = dict(values)
    for key in _ANGLE_KEYS:
        if key in out:
            out[key] = math.radians(out[key])
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge packaged defaults, the config file and flags (later wins)."""
    cfg = default_config()
    degrees = bool(getattr(args, "degrees", False))
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                user = parse_config(fh.read(), args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        degrees = degrees or user.pop("degrees", False)
        cfg.update(_to_radians(user) if degrees else user)
    flags = {k: v for k, v in vars(args).items() if k in KNOWN_KEYS and v is not None and k != "degrees"}
    cfg.update(_to_radians(flags) if degrees else flags)
    return cfg


def params_from(cfg: dict) -> HelicalFieldParams:
    try:
        return HelicalFieldParams(
            B0=cfg["B0"], phi=cfg["phi"], L=cfg["L"], v=cfg["v"],
            kappa=cfg.get("kappa", NEUTRON_GYROMAGNETIC_RATIO), turns=cfg.get("turns", 1),
        )
    except KeyError as exc:
        raise ConfigError(f"missing parameter {exc.args[0]}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def sweep_config_from(cfg: dict, numeric: bool | None = None) -> exp.SweepConfig:
    n = cfg.get("phi_points", exp.DEFAULT_PHI_POINTS)
    if n < 1:
        raise ConfigError("phi grid is empty")
    grid = np.linspace(cfg["phi_min"], cfg["phi_max"], n) if n > 1 else np.array([cfg["phi_min"]])
    try:
        return exp.SweepConfig(
            base=params_from(cfg),
            phi_grid=tuple(grid),
            steps_per_turn=cfg.get("steps", 4096),
            numeric_points=cfg.get("numeric", True) if numeric is None else numeric,
            tol=cfg.get("tol"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _emit(lines, out=None):
    out = out or sys.stdout
    for line in lines:
        print(line, file=out)


def _g(x) -> str:
    return "" if x is None else f"{x:.12g}"


def cmd_simulate(args) -> int:
    cfg = resolve(args)
    params = params_from(cfg)
    frame = rotating_frame_params(params)
    steps = cfg.get("steps", 4096)
    kw = dict(tol=cfg.get("tol"), max_steps=cfg.get("max_steps", MAX_TOTAL_STEPS))
    res = evolve(params, steps_per_turn=steps, **kw)
    m = measure_topological_phase(params, steps, tol=kw["tol"])
    up, down = m.up, m.down

    gamma = topological_phase(frame.theta, params.turns)
    g_berry = berry_phase(params.phi, params.turns)
    # Bloch loop pinned at the pole: fall back to the raw angle in (-2*pi, 0]
    g_num = m.anchored if m.anchored is not None else float(-np.mod(-m.raw, 2 * math.pi))
    _emit([
        f"B_T = {_g(frame.B)}",
        f"theta_rad = {_g(frame.theta)}",
        f"adiabaticity_r = {_g(adiabaticity_ratio(params))}",
        f"epsilon_rad = {_g(dynamical_phase(frame, params.T, params.kappa))}",
        f"gamma_berry_rad = {_g(g_berry)}",
        f"gamma_analytic_rad = {_g(gamma)}",
        f"gamma_numeric_rad = {_g(g_num)}",
        f"gamma_per_substate_analytic_rad = {_g(gamma / 2)}",
        f"geometric_up_rad = {_g(up.geometric_wrapped)}",
        f"geometric_down_rad = {_g(down.geometric_wrapped)}",
        f"P_z_exact = {_g(polarization_exact(params))}",
        f"P_z_adiabatic = {_g(polarization_adiabatic(params))}",
        f"P_z_numeric = {_g(res.polarization_z)}",
        f"richardson_error = {res.richardson_error:.3e}",
        f"steps = {res.steps}",
    ])
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = resolve(args)
    numeric = None if args.numeric is None else args.numeric
    config = sweep_config_from(cfg, numeric)
    jobs = cfg.get("jobs") or os.cpu_count() or 1
    if args.kind == "phase":
        rows = exp.sweep_topological_phase(config, jobs=jobs)
        text = exp.format_sweep_csv(rows)
        dead = {exp.FLAG_DEGENERATE, exp.FLAG_NUMERIC_FAILED}
        failed = all(row.flags & dead for row in rows)
    else:
        scan = exp.Scan(cfg.get("scan", "vary_phi"))
        values = None
        if args.values:
            try:
                values = [float(x) for x in args.values.split(",") if x.strip()]
            except ValueError:
                raise ConfigError(f"invalid --values {args.values!r}") from None
            if scan is exp.Scan.VARY_PHI and args.degrees:
                values = [math.radians(x) for x in values]
        try:
            rows = exp.sweep_polarization(config, scan, values, jobs=jobs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        text = exp.format_polarization_csv(rows, scan)
        failed = all(math.isnan(row.pz_exact) for row in rows)

    output = cfg.get("output", "-")
    if output == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {output}: {exc}") from None
        print(f"wrote {len(rows)} rows to {output}")
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_verify(args) -> int:
    checks = run_all(quick=args.quick, perturb_field=args.perturb_field)
    _emit(c.line() for c in checks)
    ok = all(c.passed for c in checks)
    print("ALL PASS" if ok else "FAILED")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_overlay(args) -> int:
    cfg = resolve(args)
    config = sweep_config_from(cfg, numeric=False)
    points = exp.load_experimental_points(args.data)
    if not points:
        raise ConfigError(f"{args.data}: no data points")
    rows = exp.sweep_topological_phase(config)
    summaries = exp.compare_overlay(rows, points, args.scale)
    for s in summaries:
        print(f"# scale = {s.scale:g}")
        print("solid_angle_sr,gamma_rad,residual_berry_rad,residual_nonadiabatic_rad")
        for p, rb, rn in zip(points, s.residuals_berry, s.residuals_nonadiabatic):
            print(f"{p.solid_angle:.12g},{p.gamma:.12g},{rb:.12g},{rn:.12g}")
        print(f"rms_berry = {s.rms_berry:.12g}")
        print(f"rms_nonadiabatic = {s.rms_nonadiabatic:.12g}")
    return EXIT_OK


def _physics_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="key = value configuration file")
    g.add_argument("--b0", "--B0", dest="B0", type=float, help="field magnitude (T)")
    g.add_argument("--phi", type=float, help="field cone angle")
    g.add_argument("--L", "--length", dest="L", type=float, help="helix pitch (m)")
    g.add_argument("--v", type=float, help="neutron velocity (m/s)")
    g.add_argument("--kappa", type=float, help="gyromagnetic ratio (rad/s/T)")
    g.add_argument("--turns", type=int)
    g.add_argument("--steps", type=int, help="coarse steps per turn")
    g.add_argument("--tol", type=float, help="Richardson error tolerance")
    g.add_argument("--max-steps", dest="max_steps", type=int)
    g.add_argument("--degrees", action="store_true", help="angles given in degrees")
    return p


def _grid_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("phi grid")
    g.add_argument("--phi-min", dest="phi_min", type=float)
    g.add_argument("--phi-max", dest="phi_max", type=float)
    g.add_argument("--phi-points", dest="phi_points", type=int)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="helixphase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    physics, grid = _physics_parent(), _grid_parent()

    p = sub.add_parser("simulate", parents=[physics], help="one parameter point")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[physics, grid], help="write a sweep CSV")
    p.add_argument("--kind", choices=("phase", "polarization"), default="phase")
    p.add_argument("--scan", choices=[s.value for s in exp.Scan])
    p.add_argument("--values", help="comma-separated scan values (polarization sweeps)")
    p.add_argument("--output", "-o", help="output path, '-' for stdout")
    p.add_argument("--jobs", type=int)
    p.add_argument("--numeric", dest="numeric", action="store_true", default=None)
    p.add_argument("--no-numeric", dest="numeric", action="store_false")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the self-check suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--perturb-field", dest="perturb_field", type=float, default=0.0,
                   help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("overlay", parents=[physics, grid], help="compare data with both curves")
    p.add_argument("--data", required=True, help="experimental CSV")
    p.add_argument("--scale", type=float, choices=(1.0, 0.5))
    p.set_defaults(func=cmd_overlay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NonConvergedError, NotCyclicError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ParseError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HelixPhaseError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
