"""Command-line front end: ``power``, ``orbit``, ``scan`` and ``bench``.

Every subcommand accepts ``--config FILE`` with one ``key=value`` per line
(``#`` starts a comment). Keys are flag names with or without the leading
dashes; explicit flags override the file, and unknown keys are an error.

Exit codes: 0 success, 1 runtime/I-O failure, 2 bad arguments. ``orbit``
additionally returns 3 for an existing but unstable orbit and 4 when the
orbit does not exist.
"""

from __future__ import annotations

import argparse
import re
import sys
import warnings

import numpy as np

from . import gamma_power
from .bench_harness import ALGORITHMS, EXTRA_ALGORITHMS, BenchSpec, run_bench, write_bench_csv
from .dense_linalg import power_bruteforce, power_by_diagonalization
from .errors import IllConditionedWarning, InvalidArgumentError, PWLError
from .normal_form import PWLMap, SymbolWord, make_normal_matrix
from .orbit_analysis import classify_orbit, fixed_points
from .region_scanner import Axis, ScanSpec, scan, write_scan_csv

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_UNSTABLE = 3
EXIT_MISSING = 4


class UsageError(Exception):
    pass


def fmt(v) -> str:
    return format(float(v), ".17g")


def float_list(text: str) -> list:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def int_list(text: str) -> list:
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def grid_range(text: str):
    """``a:b:steps`` -> ``(a, b, steps)``."""
    parts = str(text).split(":")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError) as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi:steps, got {text!r}") from exc
    if len(parts) != 3 or steps < 2:
        raise argparse.ArgumentTypeError(f"expected lo:hi:steps with steps >= 2, got {text!r}")
    return lo, hi, steps


def key_value(text: str):
    if "=" not in str(text):
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    k, v = str(text).split("=", 1)
    try:
        return k.strip(), float(v)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"value for {k!r} is not a number") from exc


def read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_config(p):
    p.add_argument("--config", metavar="FILE", help="key=value defaults; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pwl-orbits", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("power", help="M^n of a normal-form matrix")
    _add_config(p)
    p.add_argument("--dim", type=int, help="matrix dimension N")
    p.add_argument("--rho", type=float_list, help="r1,...,rN")
    p.add_argument("--n", type=int, help="power (>= 1)")
    p.add_argument("--method", choices=("gamma", "brute", "diag"), default="gamma")
    p.set_defaults(func=cmd_power, required=("dim", "rho", "n"))

    p = sub.add_parser("orbit", help="existence and stability of one periodic orbit")
    _add_config(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--left", type=float_list, help="rho of M_L")
    p.add_argument("--right", type=float_list, help="rho of M_R")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--word", help="run-length word such as L2R1; L1 or R1 for fixed points")
    p.set_defaults(func=cmd_orbit, required=("dim", "left", "right", "word"))

    p = sub.add_parser("scan", help="two-parameter existence/stability sweep to CSV")
    _add_config(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--x-param")
    p.add_argument("--x-range", type=grid_range, metavar="LO:HI:STEPS")
    p.add_argument("--y-param")
    p.add_argument("--y-range", type=grid_range, metavar="LO:HI:STEPS")
    p.add_argument("--fix", type=key_value, action="append", default=None, metavar="NAME=VALUE")
    p.add_argument("--family", help="comma-separated words, e.g. L1R1,L2R1")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--threads", type=int, default=None, help="worker processes (env PWL_ORBIT_THREADS)")
    p.add_argument("--out", help="output CSV path, - for stdout")
    p.set_defaults(
        func=cmd_scan,
        required=("dim", "x_param", "x_range", "y_param", "y_range", "family", "out"),
    )

    p = sub.add_parser("bench", help="time gamma vs brute force vs diagonalisation")
    _add_config(p)
    p.add_argument("--mode", choices=("dim", "power"), default="dim")
    p.add_argument("--values", type=int_list, default=[5, 10, 20, 50])
    p.add_argument("--fixed", type=int, default=10, help="power (mode dim) or dimension (mode power)")
    p.add_argument("--batch", type=int, default=100)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--squaring", action="store_true", help="add a binary-exponentiation line")
    p.add_argument("--out", help="output CSV path, - for stdout")
    p.set_defaults(func=cmd_bench, required=("out",))
    return parser


_NEGATIVE = re.compile(r"^-(\d|\.\d)")


def _glue_negative_values(argv):
    # argparse reads "--right -3,0" as two options; rewrite to "--right=-3,0"
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def parse_args(argv):
    argv = _glue_negative_values(list(argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions} - {"help", "config"}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        for action in sub._actions:
            if action.dest in cfg and isinstance(action, argparse._AppendAction):
                try:
                    cfg[action.dest] = [action.type(v) for v in cfg[action.dest].split(";")]
                except argparse.ArgumentTypeError as exc:
                    raise UsageError(str(exc)) from exc
            elif action.dest in cfg and action.const is True:
                cfg[action.dest] = cfg[action.dest].lower() in ("1", "true", "yes")
        sub.set_defaults(**cfg)
        # string defaults go through each action's type, so re-parse
        args = parser.parse_args(argv)
        for action in sub._actions:
            val = getattr(args, action.dest, None)
            if action.choices is not None and val is not None and val not in action.choices:
                raise UsageError(f"{action.dest}: {val!r} not in {sorted(action.choices)}")
    missing = [d for d in args.required if getattr(args, d, None) is None]
    if missing:
        flags = ", ".join("--" + d.replace("_", "-") for d in missing)
        raise UsageError(f"{args.command}: missing required option(s): {flags}")
    return args


def _matrix(dim, rho, what="--rho"):
    if len(rho) != dim:
        raise UsageError(f"{what} needs {dim} values, got {len(rho)}")
    return make_normal_matrix(dim, rho)


def _print_rows(mat, out):
    for row in np.atleast_2d(mat):
        print(",".join(fmt(v) for v in row), file=out)


def cmd_power(args, out=None) -> int:
    out = out or sys.stdout
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    m = _matrix(args.dim, args.rho)
    if args.method == "gamma":
        res = gamma_power.power(m, args.n)
    elif args.method == "brute":
        res = power_bruteforce(m.materialize(), args.n)
    else:
        res = power_by_diagonalization(m, args.n)
    if not np.all(np.isfinite(res)):
        print(f"error: power {args.n} overflowed", file=sys.stderr)
        return EXIT_FAIL
    _print_rows(res, out)
    return EXIT_OK


def _word(text):
    text = text.strip()
    if text in ("L1", "R1", "L", "R"):
        return SymbolWord(((text[0], 1),))
    return SymbolWord.parse(text)


def _fmt_opt(v):
    return "" if v is None else fmt(v)


def _fmt_bool(v):
    return "" if v is None else str(int(bool(v)))


def cmd_orbit(args, out=None) -> int:
    out = out or sys.stdout
    try:
        word = _word(args.word)
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from exc
    pwl = PWLMap(
        _matrix(args.dim, args.left, "--left"), _matrix(args.dim, args.right, "--right"), args.mu
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        if word.period == 1:
            rec = next(r for r in fixed_points(pwl) if r.word == word)
        else:
            rec = classify_orbit(pwl, word)
    lines = [
        ("word", str(rec.word)),
        ("exists", _fmt_bool(rec.exists)),
        ("candidate", "" if rec.candidate is None else ",".join(fmt(v) for v in rec.candidate)),
        ("points", ";".join(",".join(fmt(v) for v in p) for p in rec.points) if rec.exists else ""),
        ("trace", _fmt_opt(rec.trace)),
        ("det", _fmt_opt(rec.det)),
        ("spectral_radius", _fmt_opt(rec.spectral_radius)),
        ("stable", _fmt_bool(rec.stable) if rec.exists else ""),
        ("jury_stable", _fmt_bool(rec.jury_stable)),
        ("border_marginal", _fmt_bool(rec.border_marginal) if rec.exists else ""),
        ("primitive", _fmt_bool(rec.primitive)),
        ("reason", rec.reason),
    ]
    for k, v in lines:
        print(f"{k}={v}", file=out)
    if not rec.exists:
        return EXIT_MISSING
    return EXIT_OK if rec.stable else EXIT_UNSTABLE


def _open_out(path):
    return sys.stdout if path == "-" else open(path, "w", encoding="utf-8", newline="")


def cmd_scan(args) -> int:
    try:
        spec = ScanSpec(
            dim=args.dim,
            x_axis=Axis(args.x_param, *args.x_range),
            y_axis=Axis(args.y_param, *args.y_range),
            fixed=dict(args.fix or []),
            family=tuple(w for w in args.family.split(",") if w.strip()),
            mu=args.mu,
        )
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from exc
    result = scan(spec, threads=args.threads)
    try:
        fh = _open_out(args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        write_scan_csv(result, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_bench(args) -> int:
    algos = ALGORITHMS + (EXTRA_ALGORITHMS if args.squaring else ())
    try:
        spec = BenchSpec(
            mode=args.mode,
            values=tuple(args.values),
            fixed=args.fixed,
            batch=args.batch,
            repeats=args.repeats,
            seed=args.seed,
            warmup=args.warmup,
            algorithms=algos,
        )
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from exc
    try:
        fh = _open_out(args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        write_bench_csv(run_bench(spec), fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else list(argv))
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except PWLError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
