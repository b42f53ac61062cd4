"""Seeded scenario generation for the optimality-bound sweep.

Scenario ``i`` under seed ``s`` is built from ``random.Random(f"{s}:{i}")``:

* a goal chain whose proof has a drawn length ``L`` in 1..40 (2 is not
  realizable by any proof and is skipped). Rungs are ``x => y`` (two proof
  steps) or, once, ``x => (w => y)`` reusing an earlier chain statement
  ``w`` (three proof steps) to reach even lengths; half the goals are
  refuted (the last rung concludes ``!goal``);
* a winner index drawn from 2..200, where the program that prints the
  chain's proof is planted;
* up to three decoys at other indices: a non-terminating loop, the right
  proof with the wrong decision byte, or a truncated proof;
* distractor chains that the prover must expand every layer, scaled until
  the prover alone is slower than the planted program (except at length 1,
  where the goal is an axiom and the prover always answers first).
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass

from .proofcheck import serialize_candidate
from .prover import Decided, prove
from .search import bound_report, phi_prime
from .statement import Atom, Implies, MetaUnprov, Not, Statement, encode_statement
from .system import FormalSystem
from .vm import LOOP_FOREVER, emitter

CSV_FIELDS = ("scenario", "phi_steps", "phi_prime_steps", "winner_id", "e", "phi_C", "bound", "holds")


@dataclass
class Scenario:
    index: int
    system: FormalSystem
    goal: Statement
    proof_length: int
    winner_index: int
    plants: list
    fuel: int


def _chain_axioms(rng: random.Random, length: int, tag: str):
    """Axioms whose shortest proof of the goal has exactly ``length`` steps."""
    goal = Atom(f"g{tag}")
    negative = rng.random() < 0.5
    x = [Atom(f"x{tag}_{k}") for k in range(length + 1)]
    axioms = [x[0]]
    if length == 1:
        axioms = [Not(goal) if negative else goal]
        return axioms, goal
    n3 = 1 if length % 2 == 0 else 0
    n2 = (length - 1 - 3 * n3) // 2
    rungs = [2] * n2
    if n3:
        rungs.insert(rng.randrange(1, n2 + 1) if n2 else 0, 3)
    proved = [x[0]]
    for k, kind in enumerate(rungs):
        last = k == len(rungs) - 1
        nxt = (Not(goal) if negative else goal) if last else x[k + 1]
        cur = proved[-1]
        if kind == 2:
            axioms.append(Implies(cur, nxt))
        else:
            w = proved[rng.randrange(len(proved) - 1)] if len(proved) > 1 else None
            if w is None:
                # first rung: the extra premise is a fresh fact
                w = Atom(f"w{tag}")
                axioms.append(w)
                axioms.append(Implies(cur, Implies(w, nxt)))
            else:
                axioms.append(Implies(cur, Implies(w, nxt)))
        proved.append(nxt)
    return axioms, goal


def _distractors(width: int, depth: int, tag: str):
    axioms = []
    for j in range(width):
        nodes = [Atom(f"d{tag}_{j}_{k}") for k in range(depth + 1)]
        axioms.append(nodes[0])
        axioms.extend(Implies(a, b) for a, b in zip(nodes, nodes[1:]))
    return axioms


def make_scenario(seed: int, index: int, plants_override=None, backend=None) -> Scenario:
    rng = random.Random(f"{seed}:{index}")
    length = rng.choice([n for n in range(1, 41) if n != 2])
    winner = rng.randint(2, 200)
    tag = str(index)
    chain, goal = _chain_axioms(rng, length, tag)
    base = FormalSystem.from_axioms(chain, name=f"scenario{index}")
    out = prove(base, goal, fuel=10**6, backend=backend)
    assert isinstance(out, Decided), "generated chain must be provable"
    proof = out.proof
    payload = serialize_candidate(proof)
    plant = emitter(payload)
    e_plant = (len(plant.code) + 1) // 3 * 2 + 1 + proof.length

    plants = [(winner, plant)]
    taken = {winner}
    for kind in rng.sample(["loop", "mismatch", "truncated"], rng.randint(0, 3)):
        idx = rng.randint(2, winner + e_plant)
        while idx in taken:
            idx += 1
        taken.add(idx)
        if kind == "loop":
            plants.append((idx, LOOP_FOREVER))
        elif kind == "mismatch":
            plants.append((idx, emitter(serialize_candidate(proof, negative=not proof.negative))))
        else:
            plants.append((idx, emitter(payload[: max(2, len(payload) // 2)])))
    if plants_override is not None:
        plants = list(plants_override)

    # every live program costs at most one collective step per sweep
    horizon = winner + e_plant
    loops = sum(1 for _, p in plants if p == LOOP_FOREVER)
    need = 2 * (e_plant + 3 * horizon + loops * horizon) + 64
    depth = max(2, _depth_of(proof) + 1)
    width = max(1, need // (2 * depth + 2))
    while True:
        system = FormalSystem.from_axioms(chain + _distractors(width, depth, tag), name=f"scenario{index}")
        solo = prove(system, goal, fuel=10**8, backend=backend)
        # a goal that is itself an axiom is decided at the first query, so
        # no amount of distraction lets a program win there
        if solo.meter.steps > need or length == 1:
            break
        width *= 2
    return Scenario(index, system, goal, proof.length, winner, plants, fuel=4 * solo.meter.steps + 1000)


def _depth_of(proof) -> int:
    depth = []
    for _, j in proof.steps:
        if hasattr(j, "minor"):
            depth.append(1 + max(depth[j.minor], depth[j.major]))
        else:
            depth.append(0)
    return max(depth)


def run_scenario(sc: Scenario, backend=None, exact: bool = False):
    res = phi_prime(sc.system, sc.goal, sc.fuel, plants=sc.plants, backend=backend, exact=exact)
    return res, bound_report(res)


def independence_variants(seed: int, count: int = 20):
    """TINY-like systems with injected ``unprov`` facts for undecided atoms.

    Returns ``(system, subject)`` pairs where ``subject`` is not decidable
    from the chain but its first unprovability rung is an axiom.
    """
    out = []
    for i in range(count):
        rng = random.Random(f"ind:{seed}:{i}")
        n = rng.randint(2, 6)
        atoms = [Atom(f"p{k}") for k in range(n)]
        axioms = [atoms[0]] + [Implies(a, b) for a, b in zip(atoms, atoms[1:])]
        if rng.random() < 0.5:
            axioms.append(Not(Atom("r")))
        hidden = Atom(f"q{rng.randint(0, 99)}")
        box = MetaUnprov(encode_statement(hidden))
        depth = rng.randint(1, 2)
        if depth == 2:
            box = MetaUnprov(encode_statement(box))
        axioms.append(box)
        rng.shuffle(axioms)
        subject = hidden if rng.random() < 0.7 else rng.choice(atoms)
        out.append((FormalSystem.from_axioms(axioms, name=f"ind{i}"), subject))
    return out


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def bench_rows(seed: int, n: int, plants_override=None, backend=None):
    rows = []
    reports = []
    for i in range(n):
        sc = make_scenario(seed, i, plants_override, backend)
        _, rep = run_scenario(sc, backend)
        reports.append((sc, rep))
        rows.append((i, rep.phi_steps, rep.phi_prime_steps, rep.winner_id, rep.e, rep.phi_C, rep.bound,
                     "true" if rep.holds else "false"))
    return rows, reports
