"""Trusted proof checker.

Deliberately independent of :mod:`phiprime.prover`: it walks the proof list
itself and relies on nothing but statement equality, so prover soundness
tests built on it are not circular.

Wire format, one step per line::

    <index>: <statement> ; <justification>

with justifications ``Axiom(k)`` (0-based index into the axiom list),
``MP(i,j)`` (step j is ``step i => this``) and ``Top`` (the constant T).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .statement import TRUE, Implies, ParseError, Statement, negate, parse, to_text

BAD_AXIOM = "BadAxiom"
BAD_MP = "BadMP"
WRONG_TARGET = "WrongTarget"
WRONG_TAIL = "WrongTail"

DECISION_POSITIVE = 0x00
DECISION_NEGATIVE = 0x01


@dataclass(frozen=True)
class Axiom:
    index: int

    def __str__(self):
        return f"Axiom({self.index})"


@dataclass(frozen=True)
class MP:
    minor: int
    major: int

    def __str__(self):
        return f"MP({self.minor},{self.major})"


@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "Top"


Justification = Union[Axiom, MP, Top]


@dataclass(frozen=True)
class Proof:
    steps: tuple  # of (Statement, Justification)
    target: Statement
    d_prime: Statement

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def negative(self) -> bool:
        return self.d_prime != self.target

    def statements(self) -> list[Statement]:
        return [s for s, _ in self.steps]

    def chain_view(self) -> list[Statement]:
        """Display form ``p[0] = S, ..., p[I-1] = d'`` with the target prepended."""
        return [self.target] + self.statements()

    def to_text(self) -> str:
        return "".join(f"{i}: {to_text(s)} ; {j}\n" for i, (s, j) in enumerate(self.steps))


@dataclass(frozen=True)
class Valid:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class Invalid:
    step_index: int
    reason: str

    def __bool__(self):
        return False


_LINE_RE = re.compile(r"(\d+): (.+) ; (Axiom\((\d+)\)|MP\((\d+),(\d+)\)|Top)")


def parse_proof(text: str, target: Statement) -> Proof:
    """Parse the line format; raises ``ValueError`` on any deviation."""
    steps = []
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError("empty proof")
    for i, line in enumerate(lines):
        m = _LINE_RE.fullmatch(line)
        if not m or int(m.group(1)) != i:
            raise ValueError(f"bad proof line {i}: {line!r}")
        try:
            stmt = parse(m.group(2))
        except ParseError as exc:
            raise ValueError(f"bad statement on proof line {i}: {exc}") from None
        if m.group(4) is not None:
            just = Axiom(int(m.group(4)))
        elif m.group(5) is not None:
            just = MP(int(m.group(5)), int(m.group(6)))
        else:
            just = Top()
        steps.append((stmt, just))
    return Proof(tuple(steps), target, steps[-1][0])


def _check_steps(axioms, steps) -> Optional[Invalid]:
    n_ax = len(axioms)
    for idx, (stmt, just) in enumerate(steps):
        if isinstance(just, Axiom):
            if not (0 <= just.index < n_ax) or axioms[just.index] != stmt:
                return Invalid(idx, BAD_AXIOM)
        elif isinstance(just, MP):
            i, j = just.minor, just.major
            if not (0 <= i < idx and 0 <= j < idx):
                return Invalid(idx, BAD_MP)
            if steps[j][0] != Implies(steps[i][0], stmt):
                return Invalid(idx, BAD_MP)
        elif isinstance(just, Top):
            if stmt != TRUE:
                return Invalid(idx, BAD_AXIOM)
        else:
            return Invalid(idx, BAD_AXIOM)
    return None


def verify(F, S: Statement, p: Proof) -> Union[Valid, Invalid]:
    """Check ``p`` against system ``F`` as a proof deciding ``S``."""
    steps = p.steps
    last = len(steps) - 1
    bad = _check_steps(F.axioms, steps)
    if bad is not None:
        return bad
    if last < 0:
        return Invalid(0, WRONG_TAIL)
    if p.target != S:
        return Invalid(last, WRONG_TARGET)
    tail = steps[last][0]
    if tail != p.d_prime or p.d_prime not in (S, negate(S)):
        return Invalid(last, WRONG_TAIL)
    return Valid()


def con_proof(F, claimed: Statement, p: Proof, declared_negative: bool | None = None) -> bool:
    """Acceptance gate: ``p`` verifies and decides ``claimed`` with the declared polarity."""
    if not verify(F, claimed, p):
        return False
    if declared_negative is None:
        return True
    return p.negative == declared_negative


@dataclass(frozen=True)
class GateResult:
    accepted: bool
    cost: int
    proof: Optional[Proof] = None
    negative: Optional[bool] = None


def serialize_candidate(p: Proof, negative: bool | None = None) -> bytes:
    """Candidate output bytes: decision byte, then the proof text."""
    neg = p.negative if negative is None else negative
    return bytes((DECISION_NEGATIVE if neg else DECISION_POSITIVE,)) + p.to_text().encode()


def gate_output(F, S: Statement, out: bytes) -> GateResult:
    """Deserialize a candidate's output and run it through :func:`con_proof`.

    The cost is one unit per proof step validated; an output that does not
    deserialize costs one unit.
    """
    if len(out) < 2 or out[0] not in (DECISION_POSITIVE, DECISION_NEGATIVE):
        return GateResult(False, 1)
    negative = out[0] == DECISION_NEGATIVE
    try:
        p = parse_proof(out[1:].decode("utf-8"), S)
    except (UnicodeDecodeError, ValueError):
        return GateResult(False, 1)
    res = verify(F, S, p)
    if not res:
        cost = res.step_index + 1
        return GateResult(False, cost, p, negative)
    ok = p.negative == negative
    return GateResult(ok, p.length, p, negative)
