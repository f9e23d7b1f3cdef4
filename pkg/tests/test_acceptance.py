"""Exit criteria. Each test is one criterion; the conftest prints a PASS/FAIL line per test."""

import random
import time
from fractions import Fraction
from itertools import product

import pytest

from limitedmath.cli import main
from limitedmath.core import (
    BoundaryPolicy,
    LMValue,
    context_new,
    enumerate_domain,
    in_grid,
    lm_add,
    lm_mul,
    value_map,
)
from limitedmath.errors import CardinalityError, TrapError
from limitedmath.expr import (
    compose,
    grid_finite_difference,
    map_function,
    mapped_derivative,
    parse_function,
)
from limitedmath.laws import check_associativity_add, check_commutativity
from limitedmath.q88 import Q88, RAW_MAX, RAW_MIN, RoundingMode, q88_add, q88_mul, q88_oracle_check
from limitedmath.sets import set_card, set_insert, set_new
from limitedmath.vm import (
    HALT,
    Cycle,
    Halted,
    Instr,
    Program,
    Trapped,
    decide_termination,
    state_space_size,
    step,
)

from oracles import first_repeat, naive_fd_linear, phi, poly_compose, poly_eval, poly_text, vm_trajectory

SAT, TRAP = BoundaryPolicy.SATURATE, BoundaryPolicy.TRAP

# Frozen from the brute-force floor(0.3k) oracle before the build: k = 0..99.
NAIVE_ZEROS_K0_99 = 70


def _random_rational(rng, M):
    den = rng.randint(1, 1000)
    num = rng.randint(-2 * M * den - 5, 2 * M * den + 5)
    return Fraction(num, den)


def test_criterion_01_value_map_conformance():
    rng = random.Random(1)
    start = time.perf_counter()
    for b in (1, 2, 3, 8):
        ctx = context_new(b)
        M = ctx.M
        xs = [_random_rational(rng, M) for _ in range(10_000)]
        mapped = [value_map(ctx, x) for x in xs]
        for x, v in zip(xs, mapped):
            assert abs(v.k) <= ctx.max_numerator and in_grid(ctx, v.value)
            assert value_map(ctx, v.value) == v
            if -M < x < M:
                assert 0 <= x - v.value < Fraction(1, M)
        grid_pts = [LMValue(rng.randint(-ctx.max_numerator, ctx.max_numerator), ctx) for _ in range(1000)]
        assert all(value_map(ctx, g.value) == g for g in grid_pts)
        order = sorted(range(len(xs)), key=xs.__getitem__)
        for i, j in zip(order, order[1:]):
            assert mapped[i] <= mapped[j]
    assert time.perf_counter() - start < 5.0


@pytest.mark.parametrize("b", [1, 2, 3])
def test_criterion_02_associativity_counterexample(b):
    ctx = context_new(b)
    M2 = ctx.max_numerator
    m, neg = ctx.value(M2), ctx.value(-M2)
    assert lm_add(SAT, lm_add(SAT, m, m), neg) == ctx.value(0)
    assert lm_add(SAT, m, lm_add(SAT, m, neg)) == m


def test_criterion_03_in_range_law_preservation():
    start = time.perf_counter()
    for b in (1, 2):
        ctx = context_new(b)
        dom = enumerate_domain(ctx)
        scanned = 0
        for x, y, z in product(dom, repeat=3):
            if not (in_grid(ctx, x.value + y.value) and in_grid(ctx, y.value + z.value)
                    and in_grid(ctx, x.value + y.value + z.value)):
                continue
            scanned += 1
            assert lm_add(SAT, lm_add(SAT, x, y), z) == lm_add(SAT, x, lm_add(SAT, y, z))
            assert lm_add(SAT, x, y) == lm_add(SAT, y, x)
        assert scanned > 0
    assert time.perf_counter() - start < 1.0
    for b in (1, 2):
        assert check_associativity_add(context_new(b)).in_range_holds
        assert check_commutativity(context_new(b)).holds_universally


def test_criterion_04_in_range_equivalence():
    for b in (1, 2, 3, 4):
        ctx = context_new(b)
        dom = enumerate_domain(ctx)
        for x in dom:
            for y in dom:
                s = x.value + y.value
                if abs(s) <= ctx.M:
                    assert lm_add(SAT, x, y).value == s
                p = x.value * y.value
                if in_grid(ctx, p):
                    assert lm_mul(SAT, x, y).value == p


def test_criterion_05_composition_associativity():
    rng = random.Random(5)
    ctx = context_new(2)
    M = ctx.M
    dom = enumerate_domain(ctx)

    def poly():
        return [Fraction(rng.randint(-9, 9), M) for _ in range(rng.randint(1, 4))]

    for _ in range(100):
        cf, cg, ch = poly(), poly(), poly()
        f, g, h = (parse_function(poly_text(c)) for c in (cf, cg, ch))
        left = map_function(ctx, SAT, compose(compose(f, g), h))
        right = map_function(ctx, SAT, compose(f, compose(g, h)))
        whole = poly_compose(cf, poly_compose(cg, ch))
        for x in dom:
            assert left(x) == right(x)
            assert left(x).value == phi(M, poly_eval(whole, x.value))


def test_criterion_06_derivative_pathology():
    ctx = context_new(8)
    f = parse_function("0.3*x")
    points = [ctx.value(k) for k in range(100)]
    mapped = {mapped_derivative(ctx, f, x) for x in points}
    assert mapped == {ctx.value(76)}
    naive = [grid_finite_difference(ctx, f, x) for x in points]
    zeros = sum(1 for v in naive if v.k == 0)
    oracle_zeros = sum(1 for k in range(100) if naive_fd_linear(255, Fraction(3, 10), k) == 0)
    assert zeros == oracle_zeros == NAIVE_ZEROS_K0_99
    assert zeros >= 25


def test_criterion_07_q88_differential():
    rng = random.Random(7)
    assert q88_mul(Q88(1), Q88(128), RoundingMode.TRUNCATE).raw == 0
    assert q88_mul(Q88(1), Q88(128), RoundingMode.SYMMETRIC).raw == 1
    with pytest.raises(TrapError):
        q88_add(Q88(25600), Q88(25600))
    assert q88_oracle_check(Q88(25600), Q88(25600), "add")
    start = time.perf_counter()
    for op in ("add", "mul"):
        for mode in RoundingMode:
            for i in range(100_000):
                # Alternate full-range operands with small ones so both paths get traffic.
                lim = (RAW_MIN, RAW_MAX) if i % 2 else (-4096, 4096)
                x, y = Q88(rng.randint(*lim)), Q88(rng.randint(*lim))
                assert q88_oracle_check(x, y, op, mode)
    assert time.perf_counter() - start < 10.0


_OPS = ["LOADI", "MOV", "ADD", "MUL", "NEG", "JMP", "JSGN", "HALT"]


def _random_program(rng):
    n_regs, n = rng.randint(1, 2), rng.randint(1, 6)
    instrs = []
    for _ in range(n):
        op = rng.choice(_OPS)
        r = lambda: rng.randrange(n_regs)  # noqa: E731
        t = lambda: rng.randrange(n + 1)  # noqa: E731
        args = {"LOADI": lambda: (r(), rng.randint(-1, 1)), "MOV": lambda: (r(), r()),
                "ADD": lambda: (r(), r(), r()), "MUL": lambda: (r(), r(), r()),
                "NEG": lambda: (r(), r()), "JMP": lambda: (t(),),
                "JSGN": lambda: (r(), t(), t(), t()), "HALT": lambda: ()}[op]()
        instrs.append(Instr(op, args))
    policy = rng.choice([SAT, TRAP])
    return Program(tuple(instrs), n_regs, context_new(1), policy)


def _replay(p, s, n):
    for _ in range(n):
        s = step(p, s)
        if s is HALT:
            return HALT
    return s


def test_criterion_08_termination_or_cycle():
    rng = random.Random(8)
    seen = set()
    for _ in range(1000):
        p = _random_program(rng)
        init = p.initial_state([rng.randint(-1, 1) for _ in range(p.regs)])
        size = state_space_size(p)
        out = decide_termination(p, init, step_budget=size + 1)
        seen.add(type(out))
        if isinstance(out, Cycle):
            assert out.period >= 1 and out.prefix_len + out.period <= size
            at_prefix = _replay(p, init, out.prefix_len)
            assert _replay(p, at_prefix, out.period) == at_prefix
            assert all(_replay(p, at_prefix, q) != at_prefix for q in range(1, out.period))
        elif isinstance(out, Halted):
            assert out.steps <= size
            assert _replay(p, init, out.steps - 1) == out.final
            assert step(p, out.final) is HALT
        else:
            assert isinstance(out, Trapped) and out.steps <= size
        raw = [(i.op, *i.args) for i in p.instructions]
        states, end = vm_trajectory(1, raw, init.regs, p.policy.value, size + 1)
        if end == "open":
            assert out == Cycle(*first_repeat(states))
    assert seen == {Cycle, Halted, Trapped}


def test_criterion_09_bounded_set_capacity():
    c1 = context_new(1)
    s = set_insert(set_new(c1), c1.value(-1))
    with pytest.raises(CardinalityError):
        set_insert(s, c1.value(0))
    c3 = context_new(2)
    s = set_new(c3)
    for k in range(9):
        s = set_insert(s, c3.value(k))
    assert set_card(s) == 9
    with pytest.raises(CardinalityError):
        set_insert(s, c3.value(9))


def _fields(line):
    return dict(part.split("=", 1) for part in line.split())


# (argv, human stdout, exit code, porcelain check)
CLI_CASES = [
    (["map", "--bits", "8", "0.3"], "76/255 (quantized)", 0, {"value": "76/255", "status": "quantized"}),
    (["map", "--bits", "1", "5"], "1/1 (saturated)", 0, {"value": "1/1", "status": "saturated"}),
    (["map", "--bits", "8", "76/255"], "76/255 (exact)", 0, {"value": "76/255", "status": "exact"}),
    (["eval", "--bits", "1", "--mode", "end", "(x+y)+z", "x=1", "y=1", "z=-1"], "1/1", 0, {"value": "1/1"}),
    (["eval", "--bits", "1", "--mode", "step", "(x+y)+z", "x=1", "y=1", "z=-1"], "0/1", 0, {"value": "0/1"}),
    (["eval", "--bits", "1", "--policy", "trap", "x+y", "x=1", "y=1"], "", 1, {"status": "trap"}),
    (["q88", "mul", "1.5", "2.0"], "3.0 (raw 768)", 0, {"value": "3.0", "raw": "768"}),
    (["q88", "add", "100", "100"], "", 1, {"status": "trap", "wide": "51200"}),
    (["q88", "mul", "--round", "symmetric", "0.00390625", "0.5"], "0.00390625 (raw 1)", 0,
     {"value": "0.00390625", "raw": "1"}),
    (["deriv", "--bits", "8", "x*x", "1"], "2/1 mapped (510/255)", 0, {"mapped_value": "2/1", "mapped": "510/255"}),
    (["deriv", "--bits", "8", "abs(x)", "0"], "", 2, None),
    (["laws", "--bits", "5"], "", 2, None),
]


def _run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_criterion_10_cli_contract(capsys, program_dir):
    cases = CLI_CASES + [
        (["vm", "decide", str(program_dir / "loop.lmvm")], "CYCLE prefix=0 period=1", 0,
         {"outcome": "cycle", "prefix": "0", "period": "1"}),
        (["vm", "decide", str(program_dir / "halt.lmvm")], "HALTED steps=2", 0,
         {"outcome": "halted", "steps": "2"}),
        (["vm", "size", str(program_dir / "counter.lmvm")], "9", 0, {"size": "9"}),
    ]
    for argv, human, code, record in cases:
        got_code, out, err = _run(capsys, argv)
        assert got_code == code, argv
        assert out.strip() == human, argv
        got_code, out, _ = _run(capsys, argv + ["--porcelain"])
        assert got_code == code, argv
        if record is not None:
            got = _fields(out.strip().splitlines()[0])
            assert {k: got.get(k) for k in record} == record, argv

    code, out, _ = _run(capsys, ["laws", "--bits", "1", "--porcelain"])
    assert code == 0
    lines = out.splitlines()
    summary = {_fields(l)["law"]: _fields(l) for l in lines if "universe=" in l}
    assert summary["associativity"]["universal"] == "FAIL"
    assert summary["associativity"]["in_range"] == "PASS"
    assert "law=associativity x=1/1 y=1/1 z=-1/1 left=0/1 right=1/1" in lines
    code, out, _ = _run(capsys, ["laws", "--bits", "1"])
    assert code == 0 and "x=1/1 y=1/1 z=-1/1" in out

    code, out, _ = _run(capsys, ["laws", "--bits", "2", "--only", "commutativity", "--porcelain"])
    assert code == 0 and _fields(out.splitlines()[0])["universal"] == "PASS"

    code, out, _ = _run(capsys, ["deriv", "--bits", "8", "0.3*x", "--sweep", "--porcelain"])
    assert code == 0
    rows = [_fields(l) for l in out.splitlines() if l.startswith("x=")]
    assert len(rows) >= 100
    assert {r["mapped"] for r in rows} == {"76/255"}
    assert sum(r["naive"] == "0/255" for r in rows) == NAIVE_ZEROS_K0_99
