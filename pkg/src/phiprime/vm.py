"""Eight-opcode stack VM used as the substrate for program enumeration.

Every byte string is a program. Opcodes::

    0 NOP
    1 PUSH imm8     push the next code byte
    2 DUP
    3 DROP
    4 ADD           wraps modulo 2**32
    5 JZ imm8       pop v; jump to imm8 if v == 0, else fall through
    6 EMIT          pop v; append v & 0xFF to the output
    7 HALT

Any other byte, a missing operand, a stack underflow/overflow, an output
overflow or a program counter past the end halts the machine with the
invalid-output marker set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

NOP, PUSH, DUP, DROP, ADD, JZ, EMIT, HALT = range(8)
OPCODES = {"NOP": NOP, "PUSH": PUSH, "DUP": DUP, "DROP": DROP, "ADD": ADD, "JZ": JZ, "EMIT": EMIT, "HALT": HALT}

STACK_LIMIT = 256
OUTPUT_LIMIT = 1 << 16
WORD_MASK = 0xFFFFFFFF

RUNNING, HALTED, INVALID = 0, 1, 2


@dataclass(frozen=True)
class Program:
    code: bytes = b""

    def __post_init__(self):
        object.__setattr__(self, "code", bytes(self.code))


@dataclass
class VMState:
    program: Program
    counter: int = 0
    stack: list = field(default_factory=list)
    out: bytearray = field(default_factory=bytearray)
    status: int = RUNNING
    steps: int = 0

    @property
    def halted(self) -> bool:
        return self.status != RUNNING

    @property
    def invalid(self) -> bool:
        return self.status == INVALID


def vm_step(state: VMState) -> VMState:
    """Execute one instruction in place and return the same state."""
    if state.status != RUNNING:
        raise ValueError("vm_step on a halted machine")
    state.steps += 1
    code = state.program.code
    pc = state.counter
    stack = state.stack
    if pc >= len(code):
        state.status = INVALID
        return state
    op = code[pc]
    if op == NOP:
        state.counter = pc + 1
    elif op == PUSH or op == JZ:
        if pc + 1 >= len(code):
            state.status = INVALID
            return state
        arg = code[pc + 1]
        if op == PUSH:
            if len(stack) >= STACK_LIMIT:
                state.status = INVALID
                return state
            stack.append(arg)
            state.counter = pc + 2
        else:
            if not stack:
                state.status = INVALID
                return state
            state.counter = arg if stack.pop() == 0 else pc + 2
    elif op == DUP:
        if not stack or len(stack) >= STACK_LIMIT:
            state.status = INVALID
            return state
        stack.append(stack[-1])
        state.counter = pc + 1
    elif op == DROP:
        if not stack:
            state.status = INVALID
            return state
        stack.pop()
        state.counter = pc + 1
    elif op == ADD:
        if len(stack) < 2:
            state.status = INVALID
            return state
        b = stack.pop()
        stack[-1] = (stack[-1] + b) & WORD_MASK
        state.counter = pc + 1
    elif op == EMIT:
        if not stack or len(state.out) >= OUTPUT_LIMIT:
            state.status = INVALID
            return state
        state.out.append(stack.pop() & 0xFF)
        state.counter = pc + 1
    elif op == HALT:
        state.status = HALTED
    else:
        state.status = INVALID
    return state


def run(program: Program, max_steps: int) -> VMState:
    state = VMState(program)
    while state.status == RUNNING and state.steps < max_steps:
        vm_step(state)
    return state


def assemble(ops) -> Program:
    """Assemble ``[("PUSH", 65), "EMIT", "HALT"]``-style listings."""
    code = bytearray()
    for op in ops:
        if isinstance(op, tuple):
            name, arg = op
            code += bytes((OPCODES[name], arg))
        else:
            code.append(OPCODES[op])
    return Program(bytes(code))


def emitter(payload: bytes) -> Program:
    """Straight-line program that writes ``payload`` and halts (2 steps per byte + 1)."""
    code = bytearray()
    for b in payload:
        code += bytes((PUSH, b, EMIT))
    code.append(HALT)
    return Program(bytes(code))


LOOP_FOREVER = assemble([("PUSH", 0), ("JZ", 0)])
