"""Formal systems F(L, D, A) and the corpus file format.

Corpus files are UTF-8 text, one directive per line::

    # comment
    name tiny
    fuel 10000
    axiom a => b

D is fixed to implicational chaining (ground modus ponens), so a system is
fully described by its ordered, duplicate-free axiom list.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from functools import cached_property

from .statement import ParseError, Statement, parse, to_text

log = logging.getLogger(__name__)

DEFAULT_FUEL = 10_000
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.-]*")


class LoadError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class FormalSystem:
    axioms: tuple[Statement, ...]
    name: str = "anonymous"
    fuel_default: int = DEFAULT_FUEL
    rule_mode: str = "implicational-chaining"
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(set(self.axioms)) != len(self.axioms):
            raise ValueError("axiom list must be duplicate-free")

    @classmethod
    def from_axioms(cls, axioms, name: str = "anonymous", fuel_default: int = DEFAULT_FUEL) -> "FormalSystem":
        """Build a system, dropping repeated axioms (first occurrence wins)."""
        seen = set()
        kept = []
        for ax in axioms:
            if isinstance(ax, str):
                ax = parse(ax)
            if ax not in seen:
                seen.add(ax)
                kept.append(ax)
        return cls(tuple(kept), name=name, fuel_default=fuel_default)

    def extend(self, extra, name: str | None = None) -> "FormalSystem":
        return FormalSystem.from_axioms(list(self.axioms) + list(extra), name=name or self.name,
                                        fuel_default=self.fuel_default)

    @cached_property
    def axiom_index(self) -> dict[Statement, int]:
        return {ax: i for i, ax in enumerate(self.axioms)}

    @cached_property
    def universe(self):
        from .prover import Universe
        return Universe(self)

    def to_corpus(self) -> str:
        lines = [f"name {self.name}", f"fuel {self.fuel_default}"]
        lines += [f"axiom {to_text(ax)}" for ax in self.axioms]
        return "\n".join(lines) + "\n"


def load_system(corpus_text: str) -> FormalSystem:
    axioms = []
    seen = set()
    warnings = []
    name = "anonymous"
    fuel = DEFAULT_FUEL
    for lineno, raw in enumerate(corpus_text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        directive, _, rest = line.partition(" ")
        rest = rest.strip()
        if directive == "axiom":
            try:
                ax = parse(rest)
            except ParseError as exc:
                raise LoadError(lineno, str(exc)) from None
            if ax in seen:
                msg = f"line {lineno}: duplicate axiom {to_text(ax)}"
                log.warning(msg)
                warnings.append(msg)
                continue
            seen.add(ax)
            axioms.append(ax)
        elif directive == "name":
            if not _NAME_RE.fullmatch(rest):
                raise LoadError(lineno, f"bad name {rest!r}")
            name = rest
        elif directive == "fuel":
            if not rest.isdigit() or int(rest) < 1:
                raise LoadError(lineno, f"fuel must be a positive natural, got {rest!r}")
            fuel = int(rest)
        else:
            raise LoadError(lineno, f"unknown directive {directive!r}")
    return FormalSystem(tuple(axioms), name=name, fuel_default=fuel, warnings=tuple(warnings))


def load_system_file(path) -> FormalSystem:
    with open(path, encoding="utf-8") as fh:
        return load_system(fh.read())


@dataclass(frozen=True)
class NoContradictionFound:
    fuel_used: int


@dataclass(frozen=True)
class ContradictionWitness:
    statement: Statement
    proof_pos: object
    proof_neg: object
    fuel_used: int = 0


def bounded_consistency_probe(F: FormalSystem, fuel: int, backend=None):
    """Saturate for at most ``fuel`` steps looking for a statement derived in both polarities."""
    from .prover import saturate
    from .statement import Not, negate

    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    state = saturate(F, fuel=fuel, backend=backend, stop_on_clash=True)
    clash = state.clash()
    if clash is None:
        return NoContradictionFound(state.meter.steps)
    pos = clash.inner if isinstance(clash, Not) else clash
    neg = negate(pos)
    return ContradictionWitness(pos, state.proof_of(pos), state.proof_of(neg), state.meter.steps)
