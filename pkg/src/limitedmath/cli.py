"""Command-line front end.

Exit codes: 0 success or decision reached, 1 trap (or a law expectation not
met, or a run that never decided), 2 usage or parse error. ``--porcelain``
switches every command to line-delimited ``key=value`` records.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import laws as lawmod
from .core import (
    DEFAULT_ENUMERATION_CAP,
    MAX_BITS,
    BoundaryPolicy,
    LMValue,
    NumericContext,
    in_grid,
    mapping_status,
    parse_rational,
    render_rational,
    value_map,
)
from .errors import (
    BoundaryError,
    BudgetExhausted,
    CapExceededError,
    ExprSyntaxError,
    NonDifferentiableFragment,
    TrapError,
)
from .expr import (
    EvalMode,
    FuncDef,
    eval_mapped,
    grid_finite_difference,
    mapped_derivative,
    parse_expr,
)
from .q88 import Q88, RoundingMode, q88_add, q88_from_rational, q88_mul
from .vm import (
    DEFAULT_STATE_CAP,
    Cycle,
    Halted,
    decide_termination,
    parse_program,
    run,
    state_space_size,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _bits(text: str) -> int:
    try:
        b = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 1 <= b <= MAX_BITS:
        raise argparse.ArgumentTypeError(f"bits must be in [1, {MAX_BITS}]")
    return b


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(args, human: str, record: str) -> None:
    print(record if args.porcelain else human)


def _trap_record(exc: BoundaryError) -> str:
    return f"status=trap op={exc.op} value={render_rational(exc.value)} bound={exc.bound}"


def _grid_value(ctx: NumericContext, x: Fraction, what: str) -> LMValue:
    if not in_grid(ctx, x):
        raise UsageError(f"{what} = {render_rational(x)} is not a grid point of N_{ctx.M}")
    return value_map(ctx, x)


def cmd_map(args) -> int:
    ctx = NumericContext(args.bits)
    v = value_map(ctx, args.value)
    status = mapping_status(ctx, args.value)
    _emit(args, f"{v} ({status})", f"value={v} status={status}")
    return EXIT_OK


def _bindings(ctx: NumericContext, items) -> dict:
    env = {}
    for item in items:
        name, sep, text = item.partition("=")
        if not sep or not name.isidentifier():
            raise UsageError(f"binding must look like name=value, got {item!r}")
        try:
            x = parse_rational(text)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        env[name] = _grid_value(ctx, x, name)
    return env


def cmd_eval(args) -> int:
    ctx = NumericContext(args.bits)
    policy = BoundaryPolicy(args.policy)
    e = parse_expr(args.expression)
    env = _bindings(ctx, args.bindings)
    modes = list(EvalMode) if args.compare_modes else [EvalMode(args.mode)]
    status = EXIT_OK
    for mode in modes:
        label = "snap-at-end" if mode is EvalMode.SNAP_AT_END else "snap-each-step"
        try:
            v = eval_mapped(ctx, policy, mode, e, env)
        except BoundaryError as exc:
            status = EXIT_FAIL
            if args.porcelain:
                print(f"mode={mode.value} {_trap_record(exc)}")
            else:
                print(f"trap ({label}): {exc}", file=sys.stderr)
            continue
        human = f"{label}: {v}" if args.compare_modes else str(v)
        _emit(args, human, f"mode={mode.value} value={v}")
    return status


def cmd_laws(args) -> int:
    ctx = NumericContext(args.bits)
    names = [args.only] if args.only else list(lawmod.LAWS)
    reports = [lawmod.CHECKS[name](ctx, cap=args.cap) for name in names]
    for i, r in enumerate(reports):
        if args.porcelain:
            for line in lawmod.porcelain_records(r):
                print(line)
        else:
            if i:
                print()
            print(lawmod.render_report(r, limit=args.limit))
    return EXIT_OK if all(r.expectation_met for r in reports) else EXIT_FAIL


def _q88_operand(text: str, raw: bool) -> Q88:
    if raw:
        try:
            return Q88(int(text))
        except ValueError as exc:
            raise UsageError(f"bad raw operand {text!r}: {exc}") from None
    try:
        x = parse_rational(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    q = q88_from_rational(x)
    if q.value != x:
        print(f"note: {text} is not a multiple of 1/256; floored to {q}", file=sys.stderr)
    return q


def cmd_q88(args) -> int:
    mode = RoundingMode(args.round)
    try:
        x = _q88_operand(args.x, args.raw)
        y = _q88_operand(args.y, args.raw)
        r = q88_add(x, y) if args.op == "add" else q88_mul(x, y, mode)
    except TrapError as exc:
        if args.porcelain:
            print(f"status=trap op={exc.op} wide={exc.wide}")
        else:
            print(f"trap: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(args, str(r), f"value={r.decimal()} raw={r.raw}")
    return EXIT_OK


def cmd_deriv(args) -> int:
    ctx = NumericContext(args.bits)
    f = FuncDef(args.var, parse_expr(args.function))
    sat = BoundaryPolicy.SATURATE
    if args.sweep:
        n = ctx.max_numerator
        start = args.start
        stop = min(start + args.count, n)
        if start < -n or start >= stop:
            raise UsageError(f"sweep start {start} leaves no points below the top of the grid")
        rows = []
        for k in range(start, stop):
            x = LMValue(k, ctx)
            rows.append((x, mapped_derivative(ctx, f, x, sat), grid_finite_difference(ctx, f, x, sat)))
        zeros = sum(1 for _, _, g in rows if g.k == 0)
        distinct = len({m.k for _, m, _ in rows})
        if args.porcelain:
            for x, m, g in rows:
                print(f"x={x} mapped={m} naive={g}")
            print(f"points={len(rows)} mapped_distinct={distinct} naive_zeros={zeros}")
        else:
            print(f"{'x':>12} {'mapped':>12} {'naive':>12}")
            for x, m, g in rows:
                print(f"{str(x):>12} {str(m):>12} {str(g):>12}")
            print(f"{len(rows)} points, {distinct} distinct mapped values, {zeros} naive zeros")
        return EXIT_OK
    if args.point is None:
        raise UsageError("give a point or --sweep")
    x = _grid_value(ctx, args.point, args.var)
    m = mapped_derivative(ctx, f, x, sat)
    record = f"x={x} mapped={m} mapped_value={render_rational(m.value)}"
    human = f"{render_rational(m.value)} mapped ({m})"
    if args.naive:
        g = grid_finite_difference(ctx, f, x, sat)
        record += f" naive={g} naive_value={render_rational(g.value)}"
        human += f"\n{render_rational(g.value)} naive ({g})"
    _emit(args, human, record)
    return EXIT_OK


def _init_regs(prog, text):
    if text is None:
        return prog.initial_state()
    try:
        regs = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"--init expects comma-separated integer numerators, got {text!r}") from None
    try:
        return prog.initial_state(regs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _outcome(args, out) -> int:
    if isinstance(out, Halted):
        human = f"HALTED steps={out.steps}"
        record = f"outcome=halted steps={out.steps} {out.final}"
        status = EXIT_OK
    elif isinstance(out, Cycle):
        human = f"CYCLE prefix={out.prefix_len} period={out.period}"
        record = f"outcome=cycle prefix={out.prefix_len} period={out.period}"
        status = EXIT_OK
    else:
        c = out.cause
        human = f"TRAPPED steps={out.steps} ({c})"
        record = f"outcome=trapped steps={out.steps} op={c.op} value={render_rational(c.value)} bound={c.bound}"
        status = EXIT_FAIL
    _emit(args, human, record)
    return status


def cmd_vm(args) -> int:
    try:
        with open(args.program) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.program}: {exc.strerror}") from None
    prog = parse_program(text)
    if args.action == "size":
        size = state_space_size(prog)
        _emit(args, str(size), f"size={size}")
        return EXIT_OK
    init = _init_regs(prog, args.init)
    try:
        if args.action == "decide":
            out = decide_termination(prog, init, step_budget=args.budget, cap=args.cap)
        else:
            out = run(prog, init, max_steps=args.max_steps)
    except BudgetExhausted as exc:
        _emit(args, f"UNDECIDED steps={exc.steps}", f"outcome=undecided steps={exc.steps}")
        return EXIT_FAIL
    return _outcome(args, out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--porcelain", action="store_true", help="emit key=value records")

    bits = argparse.ArgumentParser(add_help=False)
    bits.add_argument("--bits", "-b", type=_bits, default=8, help="bit parameter b; M = 2**b - 1 (default 8)")

    parser = argparse.ArgumentParser(prog="limitedmath", description="Bounded arithmetic semantics toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map", parents=[common, bits], help="map a rational onto the grid")
    p.add_argument("value", type=_rational)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("eval", parents=[common, bits], help="evaluate an expression")
    p.add_argument("--policy", choices=[x.value for x in BoundaryPolicy], default="saturate")
    p.add_argument("--mode", choices=[x.value for x in EvalMode], default="end",
                   help="end: map once at the root; step: map after every operation")
    p.add_argument("--compare-modes", action="store_true", help="print both evaluation modes")
    p.add_argument("expression")
    p.add_argument("bindings", nargs="*", metavar="NAME=VALUE")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("laws", parents=[common, bits], help="check algebraic laws exhaustively")
    p.add_argument("--only", choices=lawmod.LAWS)
    p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP, help="maximum operand tuples per law")
    p.add_argument("--limit", type=int, default=10, help="counterexamples shown per law")
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("q88", parents=[common], help="Q8.8 fixed-point arithmetic")
    p.add_argument("op", choices=["add", "mul"])
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--round", choices=[x.value for x in RoundingMode], default="truncate")
    p.add_argument("--raw", action="store_true", help="operands are raw 16-bit integers")
    p.set_defaults(func=cmd_q88)

    p = sub.add_parser("deriv", parents=[common, bits], help="mapped derivative vs grid differencing")
    p.add_argument("function")
    p.add_argument("point", nargs="?", type=_rational)
    p.add_argument("--var", default="x")
    p.add_argument("--naive", action="store_true", help="also print the grid finite difference")
    p.add_argument("--sweep", action="store_true", help="tabulate over consecutive grid points")
    p.add_argument("--start", type=int, default=0, help="first sweep numerator k")
    p.add_argument("--count", type=int, default=100, help="number of sweep points")
    p.set_defaults(func=cmd_deriv)

    p = sub.add_parser("vm", parents=[common], help="run or decide a register-machine program")
    p.add_argument("action", choices=["run", "decide", "size"])
    p.add_argument("program")
    p.add_argument("--init", help="comma-separated initial register numerators (use --init=-1,1 for negatives)")
    p.add_argument("--budget", type=int, help="step budget for decide")
    p.add_argument("--cap", type=int, default=DEFAULT_STATE_CAP, help="state-space cap for decide")
    p.add_argument("--max-steps", type=int, default=10_000, help="step limit for run")
    p.set_defaults(func=cmd_vm)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except (UsageError, ExprSyntaxError, NonDifferentiableFragment, CapExceededError,
            NameError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZeroDivisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (TrapError, BoundaryError) as exc:
        print(f"trap: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:
        # Reader went away (e.g. piped into head); silence the flush at exit.
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
