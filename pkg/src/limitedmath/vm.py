"""A bounded-memory register machine over grid values.

The global state is ``(pc, registers)`` with every register holding a grid
numerator, so a program has finitely many states and each run from a fixed
start either halts, traps, or revisits a state and cycles forever.
:func:`decide_termination` tells which by recording every visited state.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    BoundaryPolicy,
    LMValue,
    NumericContext,
    lm_add,
    lm_mul,
)
from .errors import BoundaryError, BudgetExhausted, CapExceededError

#: States beyond this count are not decided without an explicit step budget.
DEFAULT_STATE_CAP = 10**8

# opcode -> operand kinds; "r" register, "k" numerator, "t" jump target
OPCODES = {
    "LOADI": "rk",
    "MOV": "rr",
    "ADD": "rrr",
    "MUL": "rrr",
    "NEG": "rr",
    "JMP": "t",
    "JSGN": "rttt",
    "HALT": "",
}


@dataclass(frozen=True)
class Instr:
    op: str
    args: tuple = ()

    def __post_init__(self):
        if self.op not in OPCODES:
            raise ValueError(f"unknown opcode {self.op!r}")
        if len(self.args) != len(OPCODES[self.op]):
            raise ValueError(f"{self.op} takes {len(OPCODES[self.op])} operands, got {len(self.args)}")

    def __str__(self):
        parts = [f"r{a}" if kind == "r" else str(a) for kind, a in zip(OPCODES[self.op], self.args)]
        return f"{self.op} {', '.join(parts)}".rstrip()


@dataclass(frozen=True)
class Program:
    instructions: tuple
    regs: int
    context: NumericContext
    policy: BoundaryPolicy = BoundaryPolicy.SATURATE

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self.regs < 1:
            raise ValueError("a program needs at least one register")
        n = len(self.instructions)
        bound = self.context.max_numerator
        for i, ins in enumerate(self.instructions):
            for kind, a in zip(OPCODES[ins.op], ins.args):
                if kind == "r" and not 0 <= a < self.regs:
                    raise ValueError(f"instruction {i}: register r{a} out of range (R={self.regs})")
                if kind == "t" and not 0 <= a <= n:
                    raise ValueError(f"instruction {i}: jump target {a} outside [0, {n}]")
                if kind == "k" and abs(a) > bound:
                    raise ValueError(f"instruction {i}: constant {a} outside [-{bound}, {bound}]")

    def __len__(self):
        return len(self.instructions)

    def initial_state(self, regs=None) -> VMState:
        regs = tuple(regs) if regs is not None else (0,) * self.regs
        if len(regs) != self.regs:
            raise ValueError(f"expected {self.regs} register values, got {len(regs)}")
        bound = self.context.max_numerator
        if any(abs(k) > bound for k in regs):
            raise ValueError(f"register numerators must lie in [-{bound}, {bound}]")
        return VMState(0, regs)

    def render(self) -> str:
        header = [f"#bits {self.context.bits}", f"#regs {self.regs}", f"#policy {self.policy.value}"]
        return "\n".join(header + [str(i) for i in self.instructions]) + "\n"


@dataclass(frozen=True)
class VMState:
    pc: int
    regs: tuple

    def __str__(self):
        return f"pc={self.pc} regs={','.join(map(str, self.regs))}"


class _Halt(enum.Enum):
    HALT = "HALT"


HALT = _Halt.HALT


@dataclass(frozen=True)
class Halted:
    steps: int
    final: VMState


@dataclass(frozen=True)
class Cycle:
    prefix_len: int
    period: int


@dataclass(frozen=True)
class Trapped:
    steps: int
    cause: BoundaryError


RunOutcome = Union[Halted, Cycle, Trapped]


def state_space_size(p: Program) -> int:
    return (len(p) + 1) * p.context.domain_size ** p.regs


def step(p: Program, s: VMState) -> Union[VMState, _Halt]:
    """One transition. Raises BoundaryError when a trap-policy operation overflows."""
    if s.pc >= len(p):
        return HALT
    ins = p.instructions[s.pc]
    op, a = ins.op, ins.args
    regs = list(s.regs)
    nxt = s.pc + 1
    ctx = p.context
    if op == "HALT":
        return HALT
    elif op == "LOADI":
        regs[a[0]] = a[1]
    elif op == "MOV":
        regs[a[0]] = regs[a[1]]
    elif op == "NEG":
        regs[a[0]] = -regs[a[1]]
    elif op in ("ADD", "MUL"):
        fn = lm_add if op == "ADD" else lm_mul
        regs[a[0]] = fn(p.policy, LMValue(regs[a[1]], ctx), LMValue(regs[a[2]], ctx)).k
    elif op == "JMP":
        nxt = a[0]
    elif op == "JSGN":
        k = regs[a[0]]
        nxt = a[1] if k < 0 else a[2] if k == 0 else a[3]
    return VMState(nxt, tuple(regs))


def decide_termination(
    p: Program,
    init: Optional[VMState] = None,
    step_budget: Optional[int] = None,
    cap: int = DEFAULT_STATE_CAP,
) -> RunOutcome:
    """Run until HALT, a trap, or the first revisited state.

    Under the cap a decision is reached within ``state_space_size(p) + 1``
    steps. Above it a ``step_budget`` is required, and running out of budget
    raises :class:`BudgetExhausted`.
    """
    size = state_space_size(p)
    if step_budget is None:
        if size > cap:
            raise CapExceededError(f"state space has {size} states, cap is {cap}; pass a step budget")
        step_budget = size + 1
    s = init if init is not None else p.initial_state()
    seen = {s: 0}
    for i in range(1, step_budget + 1):
        try:
            nxt = step(p, s)
        except BoundaryError as exc:
            return Trapped(i, exc)
        if nxt is HALT:
            return Halted(i, s)
        first = seen.setdefault(nxt, i)
        if first != i:
            return Cycle(first, i - first)
        s = nxt
    raise BudgetExhausted(step_budget)


def run(p: Program, init: Optional[VMState] = None, max_steps: int = 10_000) -> Union[Halted, Trapped]:
    """Plain simulation without cycle detection."""
    s = init if init is not None else p.initial_state()
    for i in range(1, max_steps + 1):
        try:
            nxt = step(p, s)
        except BoundaryError as exc:
            return Trapped(i, exc)
        if nxt is HALT:
            return Halted(i, s)
        s = nxt
    raise BudgetExhausted(max_steps)


_REG = re.compile(r"r(\d+)$", re.IGNORECASE)


def _operand(kind: str, tok: str, lineno: int) -> int:
    if kind == "r":
        m = _REG.match(tok)
        if not m:
            raise ValueError(f"line {lineno}: expected a register like r0, got {tok!r}")
        return int(m.group(1))
    try:
        return int(tok)
    except ValueError:
        raise ValueError(f"line {lineno}: expected an integer, got {tok!r}") from None


def parse_program(text: str) -> Program:
    """Parse the line-oriented program format.

    Header lines ``#bits N``, ``#regs R`` and ``#policy saturate|trap`` set
    the context (defaults: 1 bit, 1 register, saturate). ``;`` starts a
    comment. Jump targets are 0-based instruction indices.
    """
    bits, regs, policy = 1, 1, BoundaryPolicy.SATURATE
    instrs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].partition(" ")
            val = val.strip()
            try:
                if key == "bits":
                    bits = int(val)
                elif key == "regs":
                    regs = int(val)
                elif key == "policy":
                    policy = BoundaryPolicy(val.lower())
                else:
                    raise ValueError(f"unknown header #{key}")
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            continue
        op, _, rest = line.partition(" ")
        op = op.upper()
        if op not in OPCODES:
            raise ValueError(f"line {lineno}: unknown opcode {op!r}")
        toks = [t for t in re.split(r"[,\s]+", rest.strip()) if t]
        kinds = OPCODES[op]
        if len(toks) != len(kinds):
            raise ValueError(f"line {lineno}: {op} takes {len(kinds)} operands, got {len(toks)}")
        instrs.append(Instr(op, tuple(_operand(k, t, lineno) for k, t in zip(kinds, toks))))
    return Program(tuple(instrs), regs, NumericContext(bits), policy)
