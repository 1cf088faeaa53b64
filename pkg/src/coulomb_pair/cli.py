"""Equilibrium measures of an attractive/repellent charge pair above R^d.

Exit codes: 0 success, 1 internal error, 2 invalid (not admissible)
configuration, 3 failed verification, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from typing import Optional, Sequence

import numpy as np

from .field import WEAK_TOL, ChargeConfig, NotAdmissibleError, Q
from .measure import EquilibriumMeasure, equilibrium_measure, write_csv, write_samples_csv
from .oracle import FieldNotConfiningError, Schedule, minimize
from .verify import FrostmanGrid, frostman_check, measure_as_radial
from .potential import radial_potential_grid

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_VERIFY = 3
EXIT_USAGE = 64

PROFILE_HEADER = ["r", "density", "mass", "Q", "U_plus_Q"]

log = logging.getLogger("coulomb_pair")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def dumps(obj) -> str:
    # repr of a float is the shortest string that round-trips bit for bit
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False)


def profile_export(m: EquilibriumMeasure, radii, path_or_file) -> None:
    """CSV of r, density, mass, Q, U + Q on ``radii``."""
    radii = np.asarray(radii, dtype=float)
    U = radial_potential_grid(measure_as_radial(m), radii)
    q = np.asarray(Q(m.cfg, radii))
    cols = [radii, m.density(radii), m.mass_function(radii), q, U + q]
    write_csv(path_or_file, PROFILE_HEADER, cols)


def profile_grid(m: EquilibriumMeasure, rmax: float, n: int) -> np.ndarray:
    """Uniform grid on [0, rmax] with the support boundaries inserted."""
    r = np.linspace(0.0, rmax, n)
    extra = [b for b in (m.inner, m.outer) if 0.0 < b <= rmax]
    return np.unique(np.concatenate([r, extra]))


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with a ChargeConfig (or an object with a 'config' key)")
    p.add_argument("--d", type=int)
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--h1", type=float, help="defaults to h2 when omitted")
    p.add_argument("--h2", type=float)
    p.add_argument("--tol", type=float, default=WEAK_TOL, help="weak-admissibility band")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coulomb-pair", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="case, admissibility and support")
    _add_config_args(p)

    p = sub.add_parser("solve", help="radii, mass checks and boundary densities")
    _add_config_args(p)

    p = sub.add_parser("verify", help="Frostman check of the closed-form measure")
    _add_config_args(p)
    p.add_argument("--tol-eq", type=float, default=1e-6)
    p.add_argument("--n-support", type=int, default=200)
    p.add_argument("--n-off", type=int, default=100)

    p = sub.add_parser("sample", help="i.i.d. samples of the equilibrium measure")
    _add_config_args(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)

    p = sub.add_parser("simulate", help="weighted Fekete points by energy descent")
    _add_config_args(p)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--gtol", type=float, default=1e-5)
    p.add_argument("--max-iters", type=int, default=Schedule().max_iters)

    p = sub.add_parser("profile", help="radial profile r, density, mass, Q, U+Q")
    _add_config_args(p)
    p.add_argument("--rmax", type=float)
    p.add_argument("--n", type=int, default=300)
    return parser


def load_config(args) -> ChargeConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
        data.update(raw.get("config", raw))
    for key in ("d", "gamma1", "gamma2", "h1", "h2"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if "h1" not in data and "h2" in data:
        data["h1"] = data["h2"]
    missing = [k for k in ("d", "gamma1", "gamma2", "h1", "h2") if k not in data]
    if missing:
        raise UsageError(f"missing configuration values: {', '.join(missing)}")
    return ChargeConfig.from_dict(data)


class _Output:
    def __init__(self, path: Optional[str]):
        self.path = path
        self.fh = None

    def __enter__(self):
        self.fh = open(self.path, "w", newline="") if self.path else sys.stdout
        return self.fh

    def __exit__(self, *exc):
        if self.path:
            self.fh.close()
        return False


def _emit_json(args, payload) -> None:
    with _Output(args.out) as fh:
        fh.write(dumps(payload) + "\n")


def cmd_classify(args, cfg) -> int:
    regime = equilibrium_measure(cfg, args.tol).regime
    out = {"config": cfg.to_dict(), **regime.to_dict(),
           "support": {"inner": regime.support.inner, "outer": regime.support.outer}}
    if args.format == "csv":
        with _Output(args.out) as fh:
            fh.write("case,admissibility,support_type,inner,outer,r_c\n")
            r = regime.to_dict()
            vals = [r["case"], r["admissibility"], r["support_type"],
                    format(r["inner"], ".17g"),
                    r["outer"] if r["outer"] == "inf" else format(r["outer"], ".17g"),
                    "" if r["r_c"] is None else format(r["r_c"], ".17g")]
            fh.write(",".join(vals) + "\n")
    else:
        _emit_json(args, out)
    return EXIT_OK


def cmd_solve(args, cfg) -> int:
    m = equilibrium_measure(cfg, args.tol)
    bounds = [m.inner] + ([m.outer] if math.isfinite(m.outer) else [])
    out = {
        "config": cfg.to_dict(),
        "regime": m.regime.to_dict(),
        "mass_closed_form": m.mass_function(m.outer),
        "mass_quadrature": m.quadrature_mass(),
        "boundary_density": {format(b, ".17g"): m.density(b) for b in bounds},
        "density_scale": m.density_scale,
    }
    _emit_json(args, out)
    return EXIT_OK


def cmd_verify(args, cfg) -> int:
    m = equilibrium_measure(cfg, args.tol)
    grid = FrostmanGrid(n_support=args.n_support, n_off=args.n_off)
    report = frostman_check(m, args.tol_eq, grid)
    if args.format == "csv":
        with _Output(args.out) as fh:
            report.write_csv(cfg, fh)
    else:
        _emit_json(args, {"config": cfg.to_dict(), **report.to_dict()})
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_sample(args, cfg) -> int:
    m = equilibrium_measure(cfg, args.tol)
    pts = m.sample(args.n, args.seed)
    if args.format == "csv":
        with _Output(args.out) as fh:
            write_samples_csv(fh, pts)
    else:
        _emit_json(args, {"config": cfg.to_dict(), "seed": args.seed, "points": pts.tolist()})
    return EXIT_OK


def cmd_simulate(args, cfg) -> int:
    opts = Schedule(gtol=args.gtol, max_iters=args.max_iters)
    res = minimize(cfg, args.n, args.seed, opts, tol=args.tol)
    if args.format == "csv":
        with _Output(args.out) as fh:
            res.write_points_csv(fh)
    else:
        _emit_json(args, {"config": cfg.to_dict(), "seed": args.seed, **res.to_dict()})
    return EXIT_OK


def cmd_profile(args, cfg) -> int:
    m = equilibrium_measure(cfg, args.tol)
    rmax = args.rmax
    if rmax is None:
        rmax = 1.5 * m.outer if math.isfinite(m.outer) else 10.0 * max(m.inner, cfg.h2)
    radii = profile_grid(m, rmax, args.n)
    if args.format == "json":
        U = radial_potential_grid(measure_as_radial(m), radii)
        q = np.asarray(Q(cfg, radii))
        _emit_json(args, {"config": cfg.to_dict(), "r": radii.tolist(),
                          "density": m.density(radii).tolist(),
                          "mass": m.mass_function(radii).tolist(),
                          "Q": q.tolist(), "U_plus_Q": (U + q).tolist()})
    else:
        with _Output(args.out) as fh:
            profile_export(m, radii, fh)
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "sample": cmd_sample,
    "simulate": cmd_simulate,
    "profile": cmd_profile,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args)
    except UsageError as exc:
        if str(exc).startswith("missing"):
            sys.stderr.write(f"coulomb-pair: error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except ValueError as exc:
        sys.stderr.write(f"coulomb-pair: invalid configuration: {exc}\n")
        return EXIT_INVALID
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args, cfg)
    except (NotAdmissibleError, FieldNotConfiningError) as exc:
        sys.stderr.write(f"coulomb-pair: not admissible: {exc}\n")
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - mapped to the internal-error exit code
        log.debug("internal error", exc_info=True)
        sys.stderr.write(f"coulomb-pair: error: {exc}\n")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
