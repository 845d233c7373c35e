"""Command-line entry point; every result is JSON (or CSV) on stdout.

Exit codes: 0 success, 1 not critical (``critical``), 2 decider
disagreement (``critical``), 64 usage/parse error, 65 precondition not met,
66 unreadable file, 70 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

import numpy as np

from .classify import (
    classify_point,
    descent_direction,
    spurious_witness,
    theorem1_predicate,
    verify_descent,
)
from .core import (
    InternalError,
    PreconditionViolated,
    load_instance,
    load_point,
    to_rational,
)
from .criticality import (
    is_critical_closed_form,
    is_critical_directional,
    is_critical_lp,
)
from .landscape import FuzzConfig, Schedule, fuzz_equivalence, grid_sample, run_descent
from .subdiff import roots, step_alpha, step_beta

EX_OK, EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_SOFTWARE = 0, 64, 65, 66, 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let values such as "-1,2,3" or "-2:2" follow a flag without "="
        self._negative_number_matcher = re.compile(r"^-[\d.][\d.,:/eE+-]*$")

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


def _rational(text: str) -> Fraction:
    try:
        return to_rational(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an exact rational (use p/q)") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(a) for a in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc


def _ranges(text: str) -> list[tuple[float, float]]:
    out = []
    for part in text.split(","):
        lo, sep, hi = part.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"range {part!r} must look like lo:hi")
        try:
            out.append((float(lo), float(hi)))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad range {part!r}") from exc
    return out


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load(args, need_point=True):
    inst = load_instance(args.instance)
    p = load_point(args.point, inst) if need_point else None
    return inst, p


# --- subcommands ---------------------------------------------------------------

_METHODS = {
    "lp": is_critical_lp,
    "dir": is_critical_directional,
    "closed": is_critical_closed_form,
}


def cmd_critical(args) -> int:
    inst, p = _load(args)
    names = list(_METHODS) if args.method == "all" else [args.method]
    verdicts = [_METHODS[name](inst, p) for name in names]
    flags = {v.is_critical for v in verdicts}
    _emit({"verdicts": [v.to_json() for v in verdicts], "agree": len(flags) == 1})
    if len(flags) != 1:
        return 2
    return 0 if flags.pop() else 1


def cmd_classify(args) -> int:
    inst, p = _load(args)
    _emit(classify_point(inst, p).to_json())
    return EX_OK


def cmd_descend(args) -> int:
    inst, p = _load(args)
    plan = descent_direction(inst, p)
    t = args.t if args.t is not None else plan.valid_step_bound
    ok = verify_descent(inst, p, plan, t)
    _emit({"plan": plan.to_json(), "t": str(t), "identity_holds": ok})
    if ok:
        return EX_OK
    # beyond the step bound the identity may legitimately fail
    return 1 if t > plan.valid_step_bound else EX_SOFTWARE


def _step_json(sf) -> dict:
    out = sf.to_json()
    out["roots"] = roots(sf).to_json()
    out["jumps"] = [
        {"at": str(t), "interval": [str(iv.lo), str(iv.hi)]} for t, iv in sf.jumps
    ]
    out["monotone"] = sf.is_monotone
    return out


def cmd_steps(args) -> int:
    inst, p = _load(args)
    _emit({"alpha": _step_json(step_alpha(inst, p)), "beta": _step_json(step_beta(inst, p))})
    return EX_OK


def cmd_sample(args) -> int:
    inst = load_instance(args.instance)
    base = None
    if args.point:
        bp = load_point(args.point, inst)
        base = np.array([float(a) for a in bp.x + bp.y])
    axes = [a.strip() for a in args.axes.split(",")]
    try:
        grid = grid_sample(inst, axes, args.range, args.res, base)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "csv":
        sys.stdout.write(grid.to_csv())
    else:
        _emit(grid.to_json())
    return EX_OK


def cmd_simulate(args) -> int:
    inst = load_instance(args.instance)
    if args.init is not None:
        init = np.array(args.init)
        if init.size != inst.m + inst.n:
            raise UsageError(f"--init needs {inst.m + inst.n} values")
    else:
        init = np.random.default_rng(args.seed).uniform(-5, 5, inst.m + inst.n)
    if args.iters <= 0:
        raise UsageError("--iters must be positive")
    trace = run_descent(inst, init, Schedule(args.schedule, args.c), args.iters)
    _emit(trace.to_json(every=args.every))
    return EX_OK


def cmd_fuzz(args) -> int:
    try:
        cfg = FuzzConfig(
            num_instances=args.count,
            m_range=(1, args.mmax),
            n_range=(1, args.nmax),
            points_per_instance=args.points,
            seed=args.seed,
            workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = fuzz_equivalence(cfg)
    _emit(report.to_json())
    return EX_OK if report.ok else EX_SOFTWARE


def cmd_theorem(args) -> int:
    inst = load_instance(args.instance)
    out = {"no_spurious": theorem1_predicate(inst.M)}
    w = spurious_witness(inst)
    if w is not None:
        out["witness"] = w.to_json()
    _emit(out)
    return EX_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rank1-landscape", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_files(name, help, point=True):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--instance", required=True, help="instance JSON file")
        if point:
            sp.add_argument("--point", required=True, help="point JSON file (x, y)")
        return sp

    sp = with_files("critical", "decide criticality")
    sp.add_argument("--method", choices=["lp", "dir", "closed", "all"], default="all")
    sp.set_defaults(func=cmd_critical)

    sp = with_files("classify", "global min / spurious min / saddle")
    sp.set_defaults(func=cmd_classify)

    sp = with_files("descend", "descent direction at a saddle")
    sp.add_argument("--t", type=_rational, default=None, help="step to verify (p/q)")
    sp.set_defaults(func=cmd_descend)

    sp = with_files("steps", "step functions of the alpha/beta sections")
    sp.set_defaults(func=cmd_steps)

    sp = with_files("sample", "grid of objective values", point=False)
    sp.add_argument("--point", help="base point for coordinates not on an axis")
    sp.add_argument("--axes", required=True, help="e.g. x1,x2 or x1,x2,y1")
    sp.add_argument("--range", required=True, type=_ranges,
                    help="lo:hi per axis, comma separated, e.g. -2:2,-2:2")
    sp.add_argument("--res", type=int, default=41)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_sample)

    sp = with_files("simulate", "subgradient descent run", point=False)
    sp.add_argument("--init", type=_floats, help="comma separated x then y (floats)")
    sp.add_argument("--iters", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--schedule", choices=["diminishing", "constant"], default="diminishing")
    sp.add_argument("--c", type=float, default=0.1)
    sp.add_argument("--every", type=int, default=1, help="keep every k-th iterate")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("fuzz", help="cross-check deciders on random instances")
    sp.add_argument("--count", type=int, default=500)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--mmax", type=int, default=4)
    sp.add_argument("--nmax", type=int, default=4)
    sp.add_argument("--points", type=int, default=20)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_fuzz)

    sp = with_files("theorem", "does M admit spurious local minima?", point=False)
    sp.set_defaults(func=cmd_theorem)
    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EX_USAGE
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_NOINPUT
    except PreconditionViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATAERR
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EX_SOFTWARE
    except (UsageError, ValueError, TypeError, ZeroDivisionError) as exc:
        # malformed JSON, floats, rank >= 2 and shape errors all land here
        print(f"error: {exc}", file=sys.stderr)
        return EX_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
