"""Command-line front end.

Every subcommand reads a JSON config holding the physical parameters, either
as a flat object or under a "params" key next to an optional "options" object
whose keys mirror the command's long flags.  Exit codes: 0 success, 2 invalid
input, 3 numerical fault or failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import dispersion, dno_operators, functionals, params, profile, reduced_dynamics, spatial_linear, spectral, stability
from .errors import NumericalFault, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_FAULT = 0, 2, 3

SCHEMA = """config schema (JSON):
  {"params": {"rho_plus": .., "rho_minus": .., "d_plus": .., "d_minus": ..,
              "omega_plus": .., "omega_minus": .., "sigma": .., "g": .., "c": ..},
   "options": {<long flag name with underscores>: value, ...}}
  A flat object with only the nine parameter keys is also accepted.
  Constraints: 0 < rho_plus <= rho_minus, depths > 0, sigma > 0, g > 0, c != 0.
exit codes: 0 success, 2 invalid input, 3 numerical fault or failed check.
environment: IWAVE_THREADS caps worker threads for sweep and verify."""


# -- serialization ---------------------------------------------------------

def _json_value(v, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "null" if not math.isfinite(v) else format(v, ".17g")
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v[k], indent, level + 1)}" for k in sorted(v, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        if len(v) == 0:
            return "[]"
        items = [pad + _json_value(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(v, "value"):
        return _json_value(v.value, indent, level)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, 17 significant digits, non-finite as null."""
    return _json_value(obj, 2, 0) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _emit(text: str, dest: str | None) -> None:
    if dest is None:
        return
    if dest == "-":
        sys.stdout.write(text)
    else:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- config ----------------------------------------------------------------

def load_config(path: str | None) -> tuple[params.PhysicalParams | None, dict]:
    if path is None:
        return None, {}
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"config: cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ValidationError("config: top level must be an object")
    if "params" in raw or "options" in raw:
        extra = set(raw) - {"params", "options"}
        if extra:
            raise ValidationError(f"config: unknown keys {sorted(extra)}")
        body, options = raw.get("params"), raw.get("options", {})
        if not isinstance(options, dict):
            raise ValidationError("config.options: must be an object")
    else:
        body, options = raw, {}
    if not isinstance(body, dict):
        raise ValidationError("config.params: must be an object")
    return params.PhysicalParams.from_mapping(body), options


def _apply_options(args: argparse.Namespace, options: dict, parser: argparse.ArgumentParser) -> None:
    """Fill flags the user did not pass from the config's options object."""
    defaults = {a.dest: a.default for a in parser._actions}
    allowed = set(defaults) - {"help", "command", "config", "config_flag", "handler"}
    for key, value in options.items():
        if key not in allowed:
            raise ValidationError(f"config.options.{key}: unknown option for this command")
        if isinstance(value, float) and not math.isfinite(value):
            raise ValidationError(f"config.options.{key}: must be finite")
        if getattr(args, key) == defaults[key]:
            setattr(args, key, value)


def _require_params(p):
    if p is None:
        raise ValidationError("config: this command needs physical parameters")
    return p


def _threads() -> int:
    raw = os.environ.get("IWAVE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValidationError(f"IWAVE_THREADS: expected an integer, got {raw!r}") from exc
    if n < 1:
        raise ValidationError("IWAVE_THREADS: must be at least 1")
    return n


# -- commands --------------------------------------------------------------

def cmd_critical(p, args) -> int:
    q = params.nondim(p)
    out = {
        "alpha": q.alpha, "beta": q.beta, "alpha0": q.alpha0, "beta0": q.beta0, "beta_star": q.beta_star,
        "frak_A": q.frak_A, "frak_B": q.frak_B, "K": q.coeff_K, "epsilon": q.epsilon,
        "varrho": q.varrho, "d_ratio": q.d_ratio,
    }
    _emit(dumps(out), args.json)
    return EXIT_OK


def cmd_dispersion(p, args) -> int:
    q = params.nondim(p)
    roots = dispersion.find_roots(q, args.kmax)
    curve = dispersion.curve(q, args.kmax, args.samples)
    _emit(csv_text(["k", "residual"], zip(curve.k_samples, curve.residuals)), args.out)
    _emit(dumps({"kmax": args.kmax, "roots": roots, "alpha": q.alpha, "beta": q.beta}), args.json)
    return EXIT_OK


def cmd_profile(p, args) -> int:
    if args.epsilon is not None:
        p = profile.at_epsilon(p, args.epsilon)
    grid = profile.default_grid(p, args.points)
    wp = profile.leading_order(p, grid)
    _emit(csv_text(["x", "eta"], zip(wp.x_grid, wp.eta)), args.out)
    _emit(dumps(wp.metadata()), args.json)
    return EXIT_OK


def cmd_classify(p, args) -> int:
    rep = stability.classify(p, frozen_alpha0=args.frozen_alpha0)
    _emit(dumps(rep.to_dict()), args.json)
    return EXIT_OK


def cmd_spectrum(p, args) -> int:
    if args.operator == "limiting":
        res = spectral.limiting_spectrum(args.L, args.M)
        out = res.to_dict()
        if p is not None:
            out["scaled_estimate"] = spectral.scaled_spectrum_estimate(p)
    else:
        out = spectral.qc0_spectrum(_require_params(p)).to_dict()
        out["tau_star"] = out["essential_edge"]
    _emit(dumps(out), args.json)
    return EXIT_OK


def cmd_reduce(p, args) -> int:
    sys_ = reduced_dynamics.ReducedSystem.from_params(params.nondim(p))
    X0, X1 = -args.span, args.span
    if args.mode == "integrate":
        start = reduced_dynamics.homoclinic(X0, sys_)
        table = reduced_dynamics.integrate(start, sys_, (X0, X1), args.step)
    else:
        X = np.linspace(X0, X1, int(round((X1 - X0) / args.step)) + 1)
        Q, P = reduced_dynamics.homoclinic(X, sys_)
        H = 0.5 * P**2 - 0.5 * Q**2 - 0.5 * sys_.K * Q**3
        table = np.column_stack([X, Q, P, H])
    _emit(csv_text(["X", "Q", "P", "H"], table), args.out)
    return EXIT_OK


def cmd_verify(p, args) -> int:
    from . import verification

    suites = verification.SUITES if args.suite == "all" else (args.suite,)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda s: verification.run_suite(s, p), suites))
    entries = [e for r in results for e in r]
    ok = all(e["passed"] for e in entries)
    _emit(dumps({"passed": ok, "entries": entries}), args.json)
    return EXIT_OK if ok else EXIT_FAULT


def cmd_sweep(p, args) -> int:
    grid = None
    if args.grid is not None:
        try:
            with open(args.grid, encoding="utf-8") as fh:
                grid = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"grid: cannot read {args.grid}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"grid: malformed JSON: {exc.msg}") from exc
        if not isinstance(grid, dict):
            raise ValidationError("grid: must be an object")
    tables = ("stability", "instability") if args.table == "both" else (args.table,)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        parts = list(pool.map(
            lambda t: stability.regime_sweep(grid, tables=(t,), frozen_alpha0=args.frozen_alpha0), tables))
    rows = [r for part in parts for r in part.rows]
    header = ["table", "row", "varrho", "d_ratio", "r", "c_sign", "status", "expected", "verdict", "m", "m_prime",
              "match"]
    _emit(csv_text(header, ([getattr(r, h) for h in header] for r in rows)), args.out)
    _emit(dumps(stability.SweepResult(rows).summary()), args.json)
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def _positive_float(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text!r}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iwave",
        description="Small-amplitude internal solitary waves with constant vorticity: existence and stability checks.",
        epilog=SCHEMA,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text, config_required=True):
        sp = sub.add_parser(name, help=help_text, description=help_text, epilog=SCHEMA,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("config", nargs="?", help="JSON config path")
        sp.add_argument("--config", dest="config_flag", help="JSON config path (alternative to the positional)")
        sp.add_argument("--json", default="-", help="where to write the JSON result ('-' for stdout)")
        sp.set_defaults(handler=handler, config_required=config_required)
        return sp

    add("critical", cmd_critical, "Print the dimensionless groups and critical values.")

    sp = add("dispersion", cmd_dispersion, "Real roots and samples of the dispersion residual.")
    sp.add_argument("--kmax", type=_positive_float, default=20.0)
    sp.add_argument("--samples", type=_positive_int, default=512)
    sp.add_argument("--out", default=None, help="CSV of (k, residual); '-' for stdout")

    sp = add("profile", cmd_profile, "Leading-order solitary-wave profile.")
    sp.add_argument("--epsilon", type=_positive_float, default=None,
                    help="set alpha = alpha0 + epsilon^2 by adjusting g")
    sp.add_argument("--points", type=_positive_int, default=profile.DEFAULT_POINTS)
    sp.add_argument("--out", default=None, help="CSV of (x, eta); '-' for stdout")

    sp = add("classify", cmd_classify, "Stability report from the sign of m'(c).")
    sp.add_argument("--frozen-alpha0", action="store_true", help="hold alpha0 fixed when differentiating in c")

    sp = add("spectrum", cmd_spectrum, "Spectrum of the flat or the limiting linearized operator.",
             config_required=False)
    sp.add_argument("--operator", choices=("qc0", "limiting"), default="limiting")
    sp.add_argument("--L", type=_positive_float, default=spectral.MIN_L)
    sp.add_argument("--M", type=_positive_int, default=spectral.MIN_M)

    sp = add("reduce", cmd_reduce, "Reduced planar system: homoclinic or RK4 trajectory.")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--integrate", dest="mode", action="store_const", const="integrate")
    mode.add_argument("--homoclinic", dest="mode", action="store_const", const="homoclinic")
    sp.set_defaults(mode="homoclinic")
    sp.add_argument("--span", type=_positive_float, default=15.0)
    sp.add_argument("--step", type=_positive_float, default=1e-2)
    sp.add_argument("--out", default="-", help="CSV of (X, Q, P, H); '-' for stdout")

    sp = add("verify", cmd_verify, "Run verification suites and print a pass/fail ledger.")
    sp.add_argument("--suite", choices=("operators", "jordan", "dprime", "all"), default="all")

    sp = add("sweep", cmd_sweep, "Regime-table sweep of stability verdicts.", config_required=False)
    sp.add_argument("--grid", default=None, help="JSON file overriding the default sweep grid")
    sp.add_argument("--table", choices=("stability", "instability", "both"), default="both")
    sp.add_argument("--frozen-alpha0", action="store_true")
    sp.add_argument("--out", default=None, help="CSV regime table; '-' for stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        if args.config and args.config_flag:
            raise ValidationError("config: give either the positional path or --config, not both")
        path = args.config or args.config_flag
        if path is None and args.config_required:
            raise ValidationError("config: a config path is required")
        p, options = load_config(path)
        _apply_options(args, options, sub)
        if getattr(args, "out", None) == "-" and args.json == "-" and args.command != "reduce":
            args.json = None
        if args.config_required:
            _require_params(p)
        return args.handler(p, args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFault as exc:
        print(f"numerical fault: {exc}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
