"""Unprovability ladders and the degrees built on them.

``box_step`` is purely syntactic: it wraps a statement's Gödel number in an
``unprov(...)`` meta-atom. Whether a rung is decidable is left entirely to
the prover, so a rung is only ever decided when the corpus itself carries
the relevant independence facts.

Iterating the reachability degree needs its result re-embedded as a
statement; each computed degree is reflected into the system as the axiom
``deg(code)=n`` and recorded in the outcome's ``reflections``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .prover import Decided, Exhausted, TraceMeter, prove
from .statement import MetaDegreeEq, MetaUnprov, Statement, encode_statement, to_text


@dataclass(frozen=True)
class DegreeOutcome:
    degree: Optional[int]  # None when exhausted
    ladder: tuple
    meters: tuple  # steps spent per rung
    k_budget: int
    reflections: tuple = ()
    fuel_per_rung: int = 0

    @property
    def exhausted(self) -> bool:
        return self.degree is None

    @property
    def total_steps(self) -> int:
        return sum(self.meters)

    def to_json(self) -> dict:
        rec = {
            "subject": to_text(self.ladder[0]),
            "ladder": [to_text(s) for s in self.ladder],
            "fuel_per_rung": self.fuel_per_rung,
            "meters": list(self.meters),
            "k_budget": self.k_budget,
            "reflections": [to_text(s) for s in self.reflections],
        }
        if self.degree is None:
            rec["exhausted"] = True
        else:
            rec["degree"] = self.degree
        return rec


def box_step(F, s: Statement) -> Statement:
    return MetaUnprov(encode_statement(s))


def box_iter(F, s: Statement, n: int) -> Statement:
    if n < 0:
        raise ValueError("n must be >= 0")
    for _ in range(n):
        s = box_step(F, s)
    return s


def reachability_degree(F, s: Statement, fuel: int, n_max: int, backend=None) -> DegreeOutcome:
    """Least ``n <= n_max`` whose n-th unprovability rung the prover decides within ``fuel``."""
    if fuel < 1 or n_max < 0:
        raise ValueError("need fuel >= 1 and n_max >= 0")
    ladder = []
    meters = []
    rung = s
    for n in range(n_max + 1):
        if n:
            rung = box_step(F, rung)
        ladder.append(rung)
        out = prove(F, rung, fuel=fuel, backend=backend)
        meters.append(out.meter.steps)
        if isinstance(out, Decided):
            return DegreeOutcome(n, tuple(ladder), tuple(meters), n_max, fuel_per_rung=fuel)
    return DegreeOutcome(None, tuple(ladder), tuple(meters), n_max, fuel_per_rung=fuel)


def unknowability_degree(F, s: Statement, fuel: int, k_max: int, n_max: int = 4, backend=None) -> DegreeOutcome:
    """Number of reachability-degree applications until a degree of 0 comes out.

    Each application after the first is taken on ``deg(code)=n`` for the
    previous subject, with that fact reflected into the system first.
    """
    if fuel < 1 or k_max < 1:
        raise ValueError("need fuel >= 1 and k_max >= 1")
    subjects = [s]
    meters = []
    reflections: list[Statement] = []
    system = F
    subject = s
    for k in range(1, k_max + 1):
        r = reachability_degree(system, subject, fuel, n_max, backend=backend)
        meters.append(r.total_steps)
        if r.degree is None:
            break
        if r.degree == 0:
            return DegreeOutcome(k, tuple(subjects), tuple(meters), k_max, tuple(reflections), fuel)
        fact = MetaDegreeEq(encode_statement(subject), r.degree)
        reflections.append(fact)
        system = F.extend(reflections)
        subject = fact
        subjects.append(subject)
    return DegreeOutcome(None, tuple(subjects), tuple(meters), k_max, tuple(reflections), fuel)


@dataclass(frozen=True)
class PhiResult:
    """The degree-target prover's answer: ``n`` plus the decided final rung."""
    n: Optional[int]
    outcome: object
    system: object
    degree: DegreeOutcome
    meter: TraceMeter = field(default_factory=TraceMeter)


def phi(F, S: Statement, fuel: int, k_max: int = 4, n_max: int = 4, backend=None) -> PhiResult:
    """Prover configured with ``prepare(S) := f(F, S)``.

    The prepared target is the subject on which the unknowability ladder
    reached degree 0; it is then decided over the system extended with the
    reflected degree facts, so the returned proof is kernel-checkable.
    """
    deg = unknowability_degree(F, S, fuel, k_max, n_max, backend=backend)
    system = F.extend(deg.reflections) if deg.reflections else F
    if deg.exhausted:
        return PhiResult(None, Exhausted(TraceMeter(fuel)), system, deg, TraceMeter(deg.total_steps))
    final = deg.ladder[-1]
    out = prove(system, S, fuel=fuel, prepare=lambda _s: final, backend=backend)
    total = deg.total_steps + out.meter.steps
    n = deg.degree if isinstance(out, Decided) else None
    return PhiResult(n, out, system, deg, TraceMeter(total))
