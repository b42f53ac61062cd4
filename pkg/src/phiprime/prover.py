"""The canonical saturation prover.

``ts`` holds statements proved true, ``fs`` statements proved false; a
statement enters ``fs`` exactly when its negation enters ``ts``. The prover
expands the frontier breadth-first, querying both banks for the prepared
target after every layer. Every pop, rule-application attempt and bank query
costs one step of fuel.

The loop runs in an integer kernel (:mod:`phiprime._core`); this module maps
statements to kernel ids and kernel logs back to proofs and graphs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from . import _core
from .proofcheck import MP, Axiom, Proof, Top
from .statement import FALSE, TRUE, Implies, Statement, negate, subterms, to_text


class NotDecided(ValueError):
    pass


class HookDiverged(RuntimeError):
    """Raised by a prepare hook that could not produce a target within its own budget."""


class Universe:
    """Interning of every statement the prover can ever touch for a system.

    Derivations only ever produce consequents of implications, so the closed
    set is: all subterms of the axioms, T, F, and the negations of those.
    """

    def __init__(self, F):
        self.stmts: list[Statement] = []
        self.ids: dict[Statement, int] = {}
        for ax in F.axioms:
            for s in subterms(ax):
                self._intern(s)
        self.true_id = self._intern(TRUE)
        self.false_id = self._intern(FALSE)
        for i in range(len(self.stmts)):
            self._intern(negate(self.stmts[i]))
        n = len(self.stmts)
        self.is_impl = [0] * n
        self.lhs = [-1] * n
        self.rhs = [-1] * n
        self.neg = [0] * n
        for i, s in enumerate(self.stmts):
            if isinstance(s, Implies):
                self.is_impl[i] = 1
                self.lhs[i] = self.ids[s.lhs]
                self.rhs[i] = self.ids[s.rhs]
            self.neg[i] = self.ids[negate(s)]
        self.axiom_ids = [self.ids[ax] for ax in F.axioms]

    def _intern(self, s: Statement) -> int:
        i = self.ids.get(s)
        if i is None:
            i = len(self.stmts)
            self.ids[s] = i
            self.stmts.append(s)
        return i

    def lookup(self, s: Statement) -> int:
        return self.ids.get(s, -1)

    def __len__(self):
        return len(self.stmts)


@dataclass(frozen=True)
class TraceMeter:
    steps: int = 0


@dataclass(frozen=True)
class Decided:
    d_prime: Statement
    proof: Proof
    meter: TraceMeter

    decided = True


@dataclass(frozen=True)
class Exhausted:
    meter: TraceMeter

    decided = False


ProverOutcome = Union[Decided, Exhausted]


@dataclass(frozen=True)
class DeductionGraph:
    nodes: tuple  # canonical statements; position is the node id
    edges: tuple  # (source id, derived id, justification tag)
    roots: tuple  # ids of axioms and the constants

    def index(self, s: Statement) -> int:
        return self.nodes.index(s)

    def to_dot(self) -> str:
        lines = ["digraph deductions {"]
        for i, s in enumerate(self.nodes):
            shape = "box" if i in self.roots else "ellipse"
            lines.append(f"  n{i} [label={json.dumps(to_text(s))}, shape={shape}];")
        for src, dst, tag in self.edges:
            lines.append(f"  n{src} -> n{dst} [label={json.dumps(tag)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json_lines(self) -> str:
        incoming: dict[int, list] = {}
        for src, dst, tag in self.edges:
            incoming.setdefault(dst, []).append([src, tag])
        roots = set(self.roots)
        out = []
        for i, s in enumerate(self.nodes):
            rec = {"id": i, "statement": to_text(s), "root": i in roots, "in": incoming.get(i, [])}
            out.append(json.dumps(rec, sort_keys=True))
        return "\n".join(out) + "\n"


def _polarity_first(S: Statement, d: Optional[Statement]) -> bool:
    if d is None or d == S:
        return True
    if d == negate(S):
        return False
    raise ValueError("polarity hint must be S or !S")


class ProverState:
    """A resumable run of the prover over one system and one (prepared) target.

    ``advance(k)`` consumes at most ``k`` steps, which is what the dovetailing
    scheduler needs; ``run()`` goes to completion.
    """

    def __init__(self, F, check: Optional[Statement], ts_first: bool = True, fuel: Optional[int] = None,
                 backend: Optional[str] = None):
        self.F = F
        self.universe = U = F.universe
        self.check = check
        self.fuel = F.fuel_default if fuel is None else fuel
        if self.fuel < 1:
            raise ValueError("fuel must be >= 1")
        if check is None:
            has_target, t, tn = False, -1, -1
        else:
            has_target, t, tn = True, U.lookup(check), U.lookup(negate(check))
        mod = _core.get_backend(backend)
        self.kernel = mod.SatKernel(U.is_impl, U.lhs, U.rhs, U.neg, U.axiom_ids, U.true_id,
                                    has_target, t, tn, ts_first, self.fuel)
        self._proof_cache: dict[int, Proof] = {}

    # ---------------------------------------------------------------- run
    @property
    def meter(self) -> TraceMeter:
        return TraceMeter(self.kernel.steps)

    @property
    def running(self) -> bool:
        return self.kernel.status == _core.ST_RUNNING

    @property
    def decided(self) -> bool:
        return self.kernel.status == _core.ST_DECIDED

    @property
    def saturated(self) -> bool:
        return self.kernel.status == _core.ST_SATURATED

    def advance(self, k: int) -> int:
        return self.kernel.advance(k)

    def run(self) -> ProverOutcome:
        k = self.kernel
        while k.status == _core.ST_RUNNING:
            k.advance(self.fuel)
        return self.outcome()

    def outcome(self) -> ProverOutcome:
        k = self.kernel
        if k.status == _core.ST_DECIDED:
            stmt = self.universe.stmts[k.decided]
            proof = self.proof_of(stmt, target=self.check)
            return Decided(stmt, proof, self.meter)
        if k.status == _core.ST_RUNNING:
            raise NotDecided("prover still running")
        return Exhausted(self.meter)

    # ---------------------------------------------------------------- banks
    def in_ts(self, s: Statement) -> bool:
        i = self.universe.lookup(s)
        return i >= 0 and self.kernel.in_ts(i)

    def in_fs(self, s: Statement) -> bool:
        return self.in_ts(negate(s))

    @property
    def ts(self) -> list[Statement]:
        st = self.universe.stmts
        return [st[i] for i in self.kernel.ts_order()]

    @property
    def fs(self) -> list[Statement]:
        return [negate(s) for s in self.ts]

    @property
    def pushes(self) -> int:
        return self.kernel.pushes

    @property
    def frontier(self) -> list[Statement]:
        st = self.universe.stmts
        return [st[i] for i in self.kernel.frontier()]

    def clash(self) -> Optional[Statement]:
        """First statement whose insertion put both polarities in ``ts`` (``ts`` and ``fs`` overlap)."""
        c = self.kernel.clash
        return None if c < 0 else self.universe.stmts[c]

    # ---------------------------------------------------------------- proofs
    def proof_of(self, s: Statement, target: Optional[Statement] = None) -> Proof:
        """Reconstruct the first-stored derivation of ``s`` (must be in ``ts``)."""
        U = self.universe
        root = U.lookup(s)
        if root < 0 or not self.kernel.in_ts(root):
            raise KeyError(f"{to_text(s)} is not in ts")
        if target is None:
            target = s
        pos: dict[int, int] = {}
        steps = []
        stack = [(root, False)]
        while stack:
            q, ready = stack.pop()
            if q in pos:
                continue
            kind, a, b = self.kernel.justification(q)
            if kind == _core.J_MP and not ready:
                stack.append((q, True))
                stack.append((b, False))
                stack.append((a, False))
                continue
            if kind == _core.J_AXIOM:
                just = Axiom(a)
            elif kind == _core.J_TOP:
                just = Top()
            elif kind == _core.J_MP:
                just = MP(pos[a], pos[b])
            else:
                raise AssertionError(f"statement {q} has no justification")
            pos[q] = len(steps)
            steps.append((U.stmts[q], just))
        return Proof(tuple(steps), target, s)

    # ---------------------------------------------------------------- graph
    def graph_snapshot(self) -> DeductionGraph:
        U = self.universe
        k = self.kernel
        order = k.ts_order()
        n_init = len(U.axiom_ids) + (0 if U.true_id in U.axiom_ids else 1)
        if not k.in_ts(U.false_id):
            order = order[:n_init] + [U.false_id] + order[n_init:]
        node_of = {q: i for i, q in enumerate(order)}
        roots = tuple(sorted({node_of[a] for a in U.axiom_ids} | {node_of[U.true_id], node_of[U.false_id]}))
        edges = tuple((node_of[a], node_of[q], f"MP({node_of[r]})") for a, q, r in k.edge_list())
        return DeductionGraph(tuple(U.stmts[q] for q in order), edges, roots)


def start(F, S: Statement, d: Optional[Statement] = None, fuel: Optional[int] = None,
          prepare: Optional[Callable[[Statement], Statement]] = None,
          backend: Optional[str] = None) -> ProverState:
    check = S if prepare is None else prepare(S)
    ts_first = _polarity_first(S, d)
    return ProverState(F, check, ts_first=ts_first, fuel=fuel, backend=backend)


def prove(F, S: Statement, d: Optional[Statement] = None, fuel: Optional[int] = None,
          prepare: Optional[Callable[[Statement], Statement]] = None,
          backend: Optional[str] = None) -> ProverOutcome:
    """Decide ``prepare(S)`` within ``fuel`` steps.

    ``d`` (``S`` or ``!S``) only chooses which bank is queried first. A
    ``prepare`` hook that raises :class:`HookDiverged` yields ``Exhausted``.
    """
    fuel = F.fuel_default if fuel is None else fuel
    try:
        state = start(F, S, d, fuel, prepare, backend)
    except HookDiverged:
        return Exhausted(TraceMeter(fuel))
    return state.run()


def saturate(F, fuel: Optional[int] = None, backend: Optional[str] = None,
             stop_on_clash: bool = False) -> ProverState:
    """Targetless saturation to fixpoint (or fuel)."""
    state = ProverState(F, None, fuel=fuel, backend=backend)
    state.kernel.advance(state.fuel, stop_on_clash)
    return state


def saturate_step(state: ProverState, F=None) -> ProverState:
    """Pop one frontier statement and apply every applicable implication to it."""
    if not state.frontier:
        raise ValueError("saturate_step needs a non-empty frontier")
    state.kernel.expand_next()
    return state


def graph_snapshot(state: ProverState) -> DeductionGraph:
    return state.graph_snapshot()


def extract_chain(outcome: ProverOutcome, S: Optional[Statement] = None) -> Proof:
    if not isinstance(outcome, Decided):
        raise NotDecided("outcome is not Decided")
    p = outcome.proof
    if S is not None and p.target != S:
        raise ValueError("outcome decides a different statement")
    return p
