"""monomial-lab command line.

    monomial-lab classify    --family cubic
    monomial-lab residual    --family cubic --fn "poly:0,0,0,1" --grid -5,5,21
    monomial-lab gp-degree   --fn "poly:1,0,0,1"
    monomial-lab chain-verify --family quartic --fn "poly:0,0,0,0,1"
    monomial-lab stabilize   --family cubic --fn "poly:0,0,0,1 + sin:amp=0.01,freq=1" --psi const:0.18
    monomial-lab sweep       --config sweep.cfg

Exit status: 0 success, 1 certification failure or domain error,
2 usage error. Errors are written to stderr as a JSON object.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from fractions import Fraction

from . import serialize
from .difference import gp_degree_probe, verify_elimination_chain
from .equation import EquationFamily, classify, preset, PRESETS, residual_stats
from .errors import InvalidFamily, ModeError, MonomialLabError, ParseError
from .fnspec import (FunctionSpec, Scale, build_function, is_decimal, parse_function_spec,
                     print_function_spec, required_mode)
from .functions import EXACT, FLOAT, coerce, linear_grid, pairs
from .stability import DIAGONAL, GENERAL, ControlFunction, stabilize

SWEEP_COLUMNS = ["family", "fn_spec", "psi", "eps", "branch_i", "L", "iterations",
                 "bound_at_ref", "measured_error", "pass"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--family", help="preset name or a,b,c1,c2,c3,c4,c5,c6")
    p.add_argument("--fn", help="function spec, e.g. 'poly:0,0,0,1 + sin:amp=0.01,freq=1'")
    p.add_argument("--psi", default="auto", help="const:DELTA | power:P,W | auto")
    p.add_argument("--grid", default="-5,5,101", help="lo,hi,n")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=["exact", "float", "auto"], default="auto")
    p.add_argument("--out", choices=["json", "csv"], default=None)
    p.add_argument("--config", help="flat key=value file; flags override it")


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    defaults = dict(defaults or {})
    parser = _Parser(prog="monomial-lab")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    seen = set()
    for name in ("classify", "residual", "gp-degree", "chain-verify", "stabilize", "sweep"):
        p = sub.add_parser(name)
        _common(p)
        if name == "gp-degree":
            p.add_argument("--trials", type=int, default=20)
        if name == "chain-verify":
            p.add_argument("--h", default="1,2,3,4,5")
            p.add_argument("--samples", default=None, help="x:y;x:y;...")
        if name in ("stabilize", "sweep"):
            p.add_argument("--variant", choices=[GENERAL, DIAGONAL], default=GENERAL)
        if name == "sweep":
            p.add_argument("--eps", default="1/10,1/100,1/1000")
            p.add_argument("--perturb", default="sin:amp=1,freq=1",
                           help="unit perturbation added as eps * perturb")
        dests = {a.dest for a in p._actions} - {"help", "config"}
        seen |= dests
        # string defaults go through each option's type conversion
        p.set_defaults(**{k: v for k, v in defaults.items() if k in dests})
    unknown = set(defaults) - seen
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    return parser


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _join_negative_values(argv):
    """Rewrite ``--grid -5,5,11`` as ``--grid=-5,5,11`` so argparse keeps the value."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok.startswith("--") and "=" not in tok and nxt[:1] == "-" and nxt[1:2].isdigit():
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _parse_args(argv):
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    path = _config_path(argv)
    defaults = read_config(path) if path else {}
    args = build_parser(defaults).parse_args(argv)
    # argparse does not check choices on config-supplied defaults
    allowed = {"mode": ("exact", "float", "auto"), "out": ("json", "csv", None),
               "variant": (GENERAL, DIAGONAL)}
    for key, choices in allowed.items():
        if hasattr(args, key) and getattr(args, key) not in choices:
            raise UsageError(f"invalid {key} {getattr(args, key)!r}")
    if args.seed is None:
        try:
            args.seed = int(os.environ.get("MONOMIAL_LAB_SEED", "0"))
        except ValueError:
            raise UsageError("MONOMIAL_LAB_SEED must be an integer") from None
    return args


def parse_family(text: str | None) -> tuple[EquationFamily, list]:
    if not text:
        raise UsageError("--family is required")
    if text in PRESETS:
        return preset(text), []
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 8:
        raise UsageError("--family needs a preset name or 8 comma-separated numbers")
    try:
        values = [Fraction(s) for s in parts]
    except ValueError as exc:
        raise UsageError(f"bad family literal: {exc}") from None
    return EquationFamily(*values), parts


def parse_psi(text: str):
    kind, _, rest = text.partition(":")
    try:
        if kind == "auto":
            return "auto", []
        if kind == "const":
            return ControlFunction.constant(Fraction(rest)), [rest]
        if kind == "power":
            p, w = (s.strip() for s in rest.split(","))
            return ControlFunction.power(Fraction(p), Fraction(w)), [p, w]
    except ValueError as exc:
        raise UsageError(f"bad --psi {text!r}: {exc}") from None
    raise UsageError(f"bad --psi {text!r}: expected const:D, power:P,W or auto")


def _psi_in_mode(psi, mode):
    if psi.kind == "constant":
        return ControlFunction("constant", (coerce(psi.params[0], mode),), grid_only=psi.grid_only)
    if psi.kind == "power":
        p, w = psi.params
        p = int(p) if p.denominator == 1 else float(p)
        return ControlFunction("power", (p, coerce(w, mode)))
    return psi


def parse_grid(text: str):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 3:
        raise UsageError("--grid needs lo,hi,n")
    try:
        lo, hi, n = Fraction(parts[0]), Fraction(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad --grid: {exc}") from None
    if n < 2 or not lo < hi:
        raise UsageError("--grid needs n >= 2 and lo < hi")
    return (lo, hi, n), parts[:2]


def resolve_mode(requested: str, spec: FunctionSpec | None, literals) -> str:
    need = FLOAT if any(is_decimal(s) for s in literals) else EXACT
    if spec is not None and required_mode(spec) == FLOAT:
        need = FLOAT
    if requested == "auto":
        return need
    if requested == EXACT and need == FLOAT:
        raise UsageError("exact mode requested but inputs contain decimals or sin/cos terms")
    return requested


class Run:
    """Parsed inputs of one invocation, all in a single mode."""

    def __init__(self, args, need_family=True, need_fn=True):
        self.args = args
        self.family, fam_lits = parse_family(args.family) if need_family else (None, [])
        if need_fn and not args.fn:
            raise UsageError("--fn is required")
        self.spec = parse_function_spec(args.fn) if args.fn else None
        self.psi, psi_lits = parse_psi(args.psi)
        (lo, hi, n), grid_lits = parse_grid(args.grid)
        extra = getattr(args, "_extra_literals", [])
        self.mode = resolve_mode(args.mode, self.spec, fam_lits + psi_lits + grid_lits + extra)
        self.grid = linear_grid(lo, hi, n, self.mode)
        self.f = build_function(self.spec, self.mode) if self.spec else None

    def psi_for(self, f=None):
        if self.psi == "auto":
            return ControlFunction.auto(self.family, f or self.f, self.grid)
        return _psi_in_mode(self.psi, self.mode)


def cmd_classify(args):
    F, _ = parse_family(args.family)
    return serialize.classification_to_json(classify(F)), EXIT_OK


def cmd_residual(args):
    run = Run(args)
    stats = residual_stats(run.family, run.f, pairs(run.grid))
    out = serialize.to_jsonable(stats)
    out["mode"] = run.mode
    return out, EXIT_OK


def cmd_gp_degree(args):
    run = Run(args, need_family=False)
    tol = args.tol if args.tol is not None else 1e-9
    d = gp_degree_probe(run.f, max_n=args.max_n or 6, trials=args.trials, tol=tol, seed=args.seed)
    out = {"degree": d, "class": "GP" if d is not None else "NotGP", "seed": args.seed}
    return out, EXIT_OK


def _parse_samples(text):
    out = []
    for chunk in text.split(";"):
        if chunk.strip():
            x, _, y = chunk.partition(":")
            out.append((Fraction(x.strip()), Fraction(y.strip())))
    return out


def cmd_chain_verify(args):
    run = Run(args)
    try:
        h = [Fraction(s) for s in args.h.split(",")]
        if args.samples:
            samples = _parse_samples(args.samples)
        else:
            rng = random.Random(args.seed)
            samples = [(Fraction(rng.randint(-40, 40), 8), Fraction(rng.randint(-40, 40), 8))
                       for _ in range(10)]
    except ValueError as exc:
        raise UsageError(f"bad --h/--samples: {exc}") from None
    report = verify_elimination_chain(run.family, run.f, h, samples)
    out = serialize.to_jsonable(report)
    out["passed"] = report.passed
    return out, EXIT_OK if report.passed else EXIT_FAIL


def _stabilize(run, f, psi):
    args = run.args
    tol = args.tol if args.tol is not None else 1e-10
    return stabilize(run.family, f, psi, run.grid, tol=tol, max_n=args.max_n,
                     variant=args.variant)


def cmd_stabilize(args):
    run = Run(args)
    report = _stabilize(run, run.f, run.psi_for())
    out = serialize.to_jsonable(report)
    out["pass"] = report.certified
    return out, EXIT_OK if report.certified else EXIT_FAIL


def _fmt(v):
    v = serialize.num_out(v)
    return "true" if v is True else "false" if v is False else str(v) if not isinstance(v, float) else repr(v)


def cmd_sweep(args):
    eps_texts = [s.strip() for s in args.eps.split(",") if s.strip()]
    if not eps_texts:
        raise UsageError("--eps needs at least one value")
    perturb = parse_function_spec(args.perturb)
    args._extra_literals = eps_texts
    run = Run(args)
    base = run.spec
    # mode must also cover the perturbation
    if run.mode == EXACT and required_mode(perturb) == FLOAT:
        if args.mode == EXACT:
            raise UsageError("exact mode requested but --perturb needs float mode")
        run.mode = FLOAT
        run.grid = [float(x) for x in run.grid]
    rows = []
    all_pass = True
    for eps in eps_texts:
        spec = FunctionSpec(base.terms + (Scale(perturb, eps),))
        f = build_function(spec, run.mode)
        if run.psi == "auto":
            psi = ControlFunction.auto(run.family, f, run.grid)
        else:
            scale = Fraction(eps)
            if run.psi.kind == "constant":
                psi = ControlFunction.constant(run.psi.params[0] * scale)
            else:
                psi = ControlFunction.power(run.psi.params[0], run.psi.params[1] * scale)
            psi = _psi_in_mode(psi, run.mode)
        report = _stabilize(run, f, psi)
        errors = [abs(a - b) for a, b in zip(report.f_values, report.T_values)]
        ref = max(range(len(errors)), key=lambda k: (errors[k], -k))
        all_pass = all_pass and report.certified
        rows.append([args.family, print_function_spec(spec), psi.describe(), eps,
                     report.branch.i, report.branch.L, report.iterations,
                     report.bound_values[ref], report.measured_error, report.certified])
    code = EXIT_OK if all_pass else EXIT_FAIL
    if args.out == "json":
        return [dict(zip(SWEEP_COLUMNS, map(serialize.num_out, row))) for row in rows], code
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue(), code


COMMANDS = {
    "classify": cmd_classify,
    "residual": cmd_residual,
    "gp-degree": cmd_gp_degree,
    "chain-verify": cmd_chain_verify,
    "stabilize": cmd_stabilize,
    "sweep": cmd_sweep,
}


def _error(kind, message, code, **extra):
    payload = {"error": kind, "message": message, **extra}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = _parse_args(argv)
        result, code = COMMANDS[args.command](args)
    except UsageError as exc:
        return _error("UsageError", str(exc), EXIT_USAGE)
    except ParseError as exc:
        return _error("ParseError", str(exc), EXIT_USAGE, pos=exc.pos, expected=list(exc.expected))
    except (InvalidFamily, ModeError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_USAGE)
    except MonomialLabError as exc:
        return _error(type(exc).__name__, str(exc), EXIT_FAIL)
    except OSError as exc:
        return _error("OSError", str(exc), EXIT_USAGE)
    if isinstance(result, str):
        sys.stdout.write(result)
    else:
        sys.stdout.write(json.dumps(result, sort_keys=True, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
