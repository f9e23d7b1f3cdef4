"""Classical expressions over exact rationals and their bounded evaluation.

Expressions are evaluated exactly and mapped onto the grid once, at the root
(``SNAP_AT_END``). ``SNAP_EACH_STEP`` maps after every node instead; it exists
so the failure modes of intermediate quantization can be executed and compared.
"""

from __future__ import annotations

import ast
import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .core import (
    BoundaryPolicy,
    LMValue,
    NumericContext,
    apply_policy,
)
from .errors import BoundaryError, ContextMismatchError, ExprSyntaxError, NonDifferentiableFragment


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    def __str__(self):
        v = self.value
        if v.denominator == 1 and v >= 0:
            return str(v.numerator)
        return f"({v.numerator}/{v.denominator})" if v.denominator != 1 else f"({v.numerator})"


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def __str__(self):
        return f"-({self.arg})"


@dataclass(frozen=True)
class Abs(Expr):
    arg: Expr

    def __str__(self):
        return f"abs({self.arg})"


@dataclass(frozen=True)
class BinOp(Expr):
    left: Expr
    right: Expr
    symbol = "?"

    def __str__(self):
        return f"({self.left} {self.symbol} {self.right})"


class Add(BinOp):
    symbol = "+"


class Sub(BinOp):
    symbol = "-"


class Mul(BinOp):
    symbol = "*"


class Div(BinOp):
    symbol = "/"


class Min(BinOp):
    def __str__(self):
        return f"min({self.left}, {self.right})"


class Max(BinOp):
    def __str__(self):
        return f"max({self.left}, {self.right})"


def free_vars(e: Expr) -> frozenset[str]:
    match e:
        case Const():
            return frozenset()
        case Var(name):
            return frozenset({name})
        case Neg(a) | Abs(a):
            return free_vars(a)
        case BinOp(a, b):
            return free_vars(a) | free_vars(b)
    raise TypeError(f"not an expression: {e!r}")


def node_name(e: Expr) -> str:
    return type(e).__name__.lower()


def _combine(e: Expr, a: Fraction, b: Fraction | None = None) -> Fraction:
    match e:
        case Neg():
            return -a
        case Abs():
            return abs(a)
        case Add():
            return a + b
        case Sub():
            return a - b
        case Mul():
            return a * b
        case Div():
            if b == 0:
                raise ZeroDivisionError(f"division by zero in {e}")
            return a / b
        case Min():
            return min(a, b)
        case Max():
            return max(a, b)
    raise TypeError(f"not an operator node: {e!r}")


def eval_classical(e: Expr, env: Mapping[str, Fraction]) -> Fraction:
    """Exact value of ``e`` under ordinary field semantics."""
    match e:
        case Const(v):
            return v
        case Var(name):
            try:
                return Fraction(env[name])
            except KeyError:
                raise NameError(f"unbound variable {name!r}") from None
        case Neg(a) | Abs(a):
            return _combine(e, eval_classical(a, env))
        case BinOp(a, b):
            return _combine(e, eval_classical(a, env), eval_classical(b, env))
    raise TypeError(f"not an expression: {e!r}")


class EvalMode(enum.Enum):
    SNAP_AT_END = "end"
    SNAP_EACH_STEP = "step"


def _check_env(ctx: NumericContext, env: Mapping[str, LMValue]) -> None:
    for name, v in env.items():
        if v.context != ctx:
            raise ContextMismatchError(f"binding {name} belongs to {v.context}, not {ctx}")


def eval_mapped(
    ctx: NumericContext,
    policy: BoundaryPolicy,
    mode: EvalMode,
    e: Expr,
    env: Mapping[str, LMValue],
) -> LMValue:
    _check_env(ctx, env)
    if mode is EvalMode.SNAP_AT_END:
        exact = eval_classical(e, {name: v.value for name, v in env.items()})
        return apply_policy(ctx, policy, node_name(e), exact)

    def walk(node: Expr) -> LMValue:
        match node:
            case Const(v):
                exact = v
            case Var(name):
                if name not in env:
                    raise NameError(f"unbound variable {name!r}")
                return env[name]
            case Neg(a) | Abs(a):
                exact = _combine(node, walk(a).value)
            case BinOp(a, b):
                exact = _combine(node, walk(a).value, walk(b).value)
            case _:
                raise TypeError(f"not an expression: {node!r}")
        return apply_policy(ctx, policy, node_name(node), exact)

    return walk(e)


@dataclass(frozen=True)
class FuncDef:
    param: str
    body: Expr

    def __post_init__(self):
        extra = free_vars(self.body) - {self.param}
        if extra:
            raise ValueError(f"free variables {sorted(extra)} besides parameter {self.param!r}")

    def __call__(self, x) -> Fraction:
        return eval_classical(self.body, {self.param: Fraction(x)})

    def __str__(self):
        return f"{self.param} -> {self.body}"


def map_function(
    ctx: NumericContext, policy: BoundaryPolicy, f: FuncDef
) -> Callable[[LMValue], LMValue]:
    """The bounded counterpart of ``f``: ``x -> value_map(f(x))``."""

    def mapped(x: LMValue) -> LMValue:
        return eval_mapped(ctx, policy, EvalMode.SNAP_AT_END, f.body, {f.param: x})

    mapped.__name__ = f"mapped_{f.param}"
    return mapped


def substitute(e: Expr, name: str, replacement: Expr) -> Expr:
    match e:
        case Var(n) if n == name:
            return replacement
        case Const() | Var():
            return e
        case Neg(a) | Abs(a):
            return type(e)(substitute(a, name, replacement))
        case BinOp(a, b):
            return type(e)(substitute(a, name, replacement), substitute(b, name, replacement))
    raise TypeError(f"not an expression: {e!r}")


def compose(f: FuncDef, g: FuncDef) -> FuncDef:
    """Classical composition ``f o g``; map it with map_function afterwards."""
    return FuncDef(g.param, substitute(f.body, f.param, g.body))


# Smart constructors used by the differentiator to keep results small.

def _is_const(e: Expr, v=None) -> bool:
    return isinstance(e, Const) and (v is None or e.value == v)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Add(a, b)


def _neg(a: Expr) -> Expr:
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return _neg(b)
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    return Sub(a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return Const(0)
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return Mul(a, b)


def _diff(e: Expr, x: str) -> Expr:
    match e:
        case Const():
            return Const(0)
        case Var(name):
            return Const(1 if name == x else 0)
        case Neg(a):
            return _neg(_diff(a, x))
        case Add(a, b):
            return _add(_diff(a, x), _diff(b, x))
        case Sub(a, b):
            return _sub(_diff(a, x), _diff(b, x))
        case Mul(a, b):
            return _add(_mul(_diff(a, x), b), _mul(a, _diff(b, x)))
    raise NonDifferentiableFragment(
        f"{node_name(e)} is outside the polynomial fragment (const, var, neg, add, sub, mul)"
    )


def derivative_symbolic(f: FuncDef) -> FuncDef:
    return FuncDef(f.param, _diff(f.body, f.param))


def mapped_derivative(
    ctx: NumericContext,
    f: FuncDef,
    x: LMValue,
    policy: BoundaryPolicy = BoundaryPolicy.SATURATE,
) -> LMValue:
    """Map the exact derivative value ``f'(x)`` onto the grid once."""
    if x.context != ctx:
        raise ContextMismatchError(f"point belongs to {x.context}, not {ctx}")
    fprime = derivative_symbolic(f)
    return apply_policy(ctx, policy, "derivative", fprime(x.value))


def grid_finite_difference(
    ctx: NumericContext,
    f: FuncDef,
    x: LMValue,
    policy: BoundaryPolicy = BoundaryPolicy.SATURATE,
) -> LMValue:
    """Forward difference of the already-mapped ``f`` over one grid step.

    This is the naive operator that loses small slopes to quantization; it is
    provided to contrast with :func:`mapped_derivative`.
    """
    if x.context != ctx:
        raise ContextMismatchError(f"point belongs to {x.context}, not {ctx}")
    if x.k >= ctx.max_numerator:
        raise BoundaryError("finite-difference", x.value + Fraction(1, ctx.M), ctx.M)
    fm = map_function(ctx, policy, f)
    step = LMValue(x.k + 1, ctx)
    quotient = (fm(step).value - fm(x).value) * ctx.M
    return apply_policy(ctx, policy, "finite-difference", quotient)


_BINOPS = {ast.Add: Add, ast.Sub: Sub, ast.Mult: Mul, ast.Div: Div}
_CALLS = {"abs": (Abs, 1), "min": (Min, 2), "max": (Max, 2)}


def _number(node: ast.AST, text: str) -> Fraction | None:
    if isinstance(node, ast.Constant) and type(node.value) in (int, float):
        return Fraction(ast.get_source_segment(text, node).replace("_", ""))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        inner = _number(node.operand, text)
        return None if inner is None else -inner
    return None


def parse_expr(text: str) -> Expr:
    """Parse infix expression text.

    Supports ``+ - * /``, unary minus, ``abs``, ``min``, ``max``, identifiers,
    parentheses and exact literals: ``0.3`` is 3/10 and ``p/q`` with integer
    ``p`` and ``q`` is a single rational constant.
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExprSyntaxError(f"cannot parse {text!r}: {exc.msg}") from None
    return _convert(tree.body, text.strip())


def _convert(node: ast.AST, text: str) -> Expr:
    literal = _number(node, text)
    if literal is not None:
        return Const(literal)
    match node:
        case ast.Name(id=name):
            return Var(name)
        case ast.UnaryOp(op=ast.USub(), operand=arg):
            return Neg(_convert(arg, text))
        case ast.UnaryOp(op=ast.UAdd(), operand=arg):
            return _convert(arg, text)
        case ast.BinOp(left=left, op=op, right=right) if type(op) in _BINOPS:
            if isinstance(op, ast.Div):
                p, q = _number(left, text), _number(right, text)
                if p is not None and q is not None and p.denominator == q.denominator == 1 and q > 0:
                    return Const(p / q)
            return _BINOPS[type(op)](_convert(left, text), _convert(right, text))
        case ast.Call(func=ast.Name(id=fname), args=args, keywords=[]) if fname in _CALLS:
            cls, arity = _CALLS[fname]
            if len(args) != arity:
                raise ExprSyntaxError(f"{fname} takes {arity} argument(s), got {len(args)}")
            return cls(*(_convert(a, text) for a in args))
    segment = ast.get_source_segment(text, node) or type(node).__name__
    raise ExprSyntaxError(f"unsupported syntax: {segment!r}")


def parse_function(text: str, param: str = "x") -> FuncDef:
    return FuncDef(param, parse_expr(text))
