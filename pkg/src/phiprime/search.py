"""Dovetailed search over Gödel-numbered programs with the prover running alongside.

Schedule: sweep ``t`` (from 1) first spawns program ``t`` (``decode(t)``
unless a plant sits at that index), then grants one step to every live
program in id order. Before each grant the prover gets one step, so the
prover and the collective of programs alternate. A program spawned at sweep
``s`` has therefore run exactly ``t - s`` steps when sweep ``t`` starts.

A program that halts has its output checked by the proof kernel; the check
costs one scheduled step per proof step validated, so a candidate's total
charge is ``e = run steps + verification steps``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import _core
from .proofcheck import GateResult, gate_output, verify
from .prover import Decided, ProverState, start
from .statement import Statement, decode, to_text
from .vm import HALTED, INVALID, Program


class AllHaltedBeforeTarget(RuntimeError):
    pass


class NotTerminated(ValueError):
    pass


class LedgerViolation(AssertionError):
    pass


# ------------------------------------------------------------------ generic dovetail

class CountdownTask:
    """Test/demo task: halts after ``n`` steps, with the given validity."""

    def __init__(self, n: int, valid: bool = True):
        self.n = n
        self.valid = valid
        self.steps = 0

    def step(self):
        self.steps += 1
        if self.steps >= self.n:
            return self.valid
        return None


@dataclass
class DovetailResult:
    completions: list  # (task index, global step, valid) in completion order
    task_steps: list
    total_steps: int
    winners: list


def dovetail(tasks, c: int) -> DovetailResult:
    """Round-robin single-stepping; halts once ``c`` tasks halted validly.

    A task's ``step()`` returns ``None`` while running and ``True``/``False``
    (valid/invalid) on the step it halts. Halted tasks are skipped.
    """
    m = len(tasks)
    if not 1 <= c <= m:
        raise ValueError("need 1 <= c <= number of tasks")
    live = list(range(m))
    steps = [0] * m
    total = 0
    completions = []
    winners = []
    while live:
        still = []
        for i in live:
            res = tasks[i].step()
            steps[i] += 1
            total += 1
            if res is None:
                still.append(i)
                continue
            completions.append((i, total, bool(res)))
            if res:
                winners.append(i)
                if len(winners) == c:
                    return DovetailResult(completions, steps, total, winners)
        live = still
    raise AllHaltedBeforeTarget(f"only {len(winners)} of {c} tasks halted validly")


# ------------------------------------------------------------------ phi' search

@dataclass(frozen=True)
class BoundReport:
    phi_steps: int
    phi_decided: bool
    phi_prime_steps: int
    winner_id: int
    winner_steps: int
    verify_steps: int
    e: int
    phi_C: int
    triangular: int
    bound: int
    holds: bool
    tight_holds: bool
    decision: str
    R: str
    R_size: int
    plants: tuple = ()

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass
class _Task:
    id: int
    slot: int
    spawn_sweep: int
    steps: int = 0
    run_steps: int = 0
    remaining: int = -1  # verification grants left; -1 while the VM runs
    gate: Optional[GateResult] = None


@dataclass
class SweepRecord:
    sweep: int
    live: int
    phi_steps: int
    collective_steps: int


@dataclass
class SearchResult:
    F: object
    S: Statement
    terminated: bool
    winner_id: Optional[int]
    phi_steps_in_search: int
    collective_steps: int
    phi_state: ProverState
    winner: Optional[_Task] = None
    phi_outcome: Optional[Decided] = None
    halted_invalid: list = field(default_factory=list)
    sweeps: int = 0
    ledger: list = field(default_factory=list)
    plants: tuple = ()

    @property
    def phi_prime_steps(self) -> int:
        return self.phi_steps_in_search + self.collective_steps


def _check_ledger(t, tasks_live, phi_running, phi_steps, collective):
    for task in tasks_live:
        if task.steps != t - task.spawn_sweep:
            raise LedgerViolation(f"sweep {t}: program {task.id} ran {task.steps} steps, expected {t - task.spawn_sweep}")
    if phi_running and phi_steps != collective:
        raise LedgerViolation(f"sweep {t}: prover {phi_steps} vs collective {collective}")


def phi_prime(F, S: Statement, fuel: int, plants=(), max_steps: Optional[int] = None,
              backend: Optional[str] = None, exact: bool = False, check_ledger: bool = True,
              record_sweeps: bool = False) -> SearchResult:
    """Dovetail the prover against every enumerated program; stop at the first verified answer.

    ``fuel`` bounds the prover; ``max_steps`` (default ``2 * fuel``) bounds the
    whole search. ``exact=True`` forces the per-grant path instead of batched
    sweeps (results are identical; used to cross-check the fast path).
    """
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    plant_map: dict[int, bytes] = {}
    for idx, prog in plants:
        if idx in plant_map or idx < 1:
            raise ValueError(f"bad or duplicate plant index {idx}")
        plant_map[idx] = prog.code if isinstance(prog, Program) else bytes(prog)
    max_steps = 2 * fuel if max_steps is None else max_steps
    mod = _core.get_backend(backend)
    pool = mod.VMPool()
    phi = start(F, S, fuel=fuel, backend=backend)
    phi_steps = 0
    collective = 0
    live: list[_Task] = []
    halted_invalid: list[int] = []
    ledger: list[SweepRecord] = []
    t = 0

    def finish(winner_id, winner=None):
        res = SearchResult(F, S, True, winner_id, phi_steps, collective, phi, winner,
                           halted_invalid=halted_invalid, sweeps=t, ledger=ledger, plants=tuple(sorted(plant_map)))
        if winner_id == 0:
            res.phi_outcome = phi.outcome()
        return res

    while True:
        t += 1
        code = plant_map.get(t)
        if code is None:
            code = decode(t)
        live.append(_Task(t, pool.add(code), t))
        if check_ledger:
            _check_ledger(t, live, phi.running, phi_steps, collective)
        if record_sweeps:
            ledger.append(SweepRecord(t, len(live), phi_steps, collective))
        n = len(live)
        if exact or phi_steps + collective + 2 * n > max_steps:
            # per-grant path
            for g, task in enumerate(live):
                if phi.running:
                    if phi_steps + collective >= max_steps:
                        return _exhausted(F, S, phi, phi_steps, collective, halted_invalid, t, ledger, plant_map)
                    phi.advance(1)
                    phi_steps += 1
                    if phi.decided:
                        return finish(0)
                if phi_steps + collective >= max_steps:
                    return _exhausted(F, S, phi, phi_steps, collective, halted_invalid, t, ledger, plant_map)
                collective += 1
                task.steps += 1
                if task.remaining < 0:
                    status = pool.step(task.slot)
                    task.run_steps += 1
                    if status == INVALID:
                        halted_invalid.append(task.id)
                    elif status == HALTED:
                        task.gate = gate_output(F, S, pool.output(task.slot))
                        task.remaining = task.gate.cost
                else:
                    task.remaining -= 1
                    if task.remaining == 0:
                        if task.gate.accepted:
                            return finish(task.id, task)
                        halted_invalid.append(task.id)
            live = [x for x in live if x.remaining != 0 and not _vm_invalid(pool, x)]
            continue

        # batched sweep: prover first, then every VM, then resolve grant order
        k = phi.advance(n) if phi.running else 0
        g_phi = k - 1 if phi.decided else n
        running = [x for x in live if x.remaining < 0]
        halted = pool.step_many([x.slot for x in running])
        halted_at = {running[pos].id: st for pos, st in halted}
        g_win = n
        events = []
        for g, task in enumerate(live):
            st = halted_at.get(task.id)
            if task.remaining < 0:
                if st == INVALID:
                    events.append((g, task, "invalid"))
                elif st == HALTED:
                    events.append((g, task, "halted"))
            elif task.remaining == 1:
                if task.gate.accepted:
                    g_win = min(g_win, g)
                events.append((g, task, "done"))
        if g_phi < n and g_phi <= g_win:
            phi_steps += k
            collective += g_phi
            for g, task, kind in events:
                if g < g_phi:
                    _apply(task, kind, halted_invalid, F, S, pool)
            return finish(0)
        if g_win < n:
            phi_steps += min(k, g_win + 1)
            collective += g_win + 1
            for g, task, kind in events:
                if g < g_win:
                    _apply(task, kind, halted_invalid, F, S, pool)
            winner = live[g_win]
            winner.steps += 1
            return finish(winner.id, winner)
        phi_steps += k
        collective += n
        for task in live:
            task.steps += 1
            if task.remaining < 0:
                task.run_steps += 1
            else:
                task.remaining -= 1
        for g, task, kind in events:
            _apply(task, kind, halted_invalid, F, S, pool, counted=True)
        live = [x for x in live if x.remaining != 0 and not _vm_invalid(pool, x)]


def _vm_invalid(pool, task) -> bool:
    return task.remaining < 0 and pool.status(task.slot) == INVALID


def _apply(task, kind, halted_invalid, F, S, pool, counted=False):
    if kind == "invalid":
        halted_invalid.append(task.id)
    elif kind == "halted":
        task.gate = gate_output(F, S, pool.output(task.slot))
        task.remaining = task.gate.cost
    else:
        halted_invalid.append(task.id)
        if not counted:
            task.remaining = 0


def _exhausted(F, S, phi, phi_steps, collective, halted_invalid, t, ledger, plant_map):
    return SearchResult(F, S, False, None, phi_steps, collective, phi, halted_invalid=halted_invalid,
                        sweeps=t, ledger=ledger, plants=tuple(sorted(plant_map)))


def bound_report(result: SearchResult) -> BoundReport:
    """Step accounting and optimality bound for a terminated search."""
    if not result.terminated:
        raise NotTerminated("search ran out of budget")
    phi = result.phi_state
    if phi.running:
        phi.run()
    phi_decided = phi.decided
    phi_steps = phi.meter.steps
    if result.winner_id == 0:
        proof = result.phi_outcome.proof
        winner_steps, verify_steps = phi_steps, 0
    else:
        w = result.winner
        proof = w.gate.proof
        winner_steps, verify_steps = w.run_steps, w.gate.cost
    if not verify(result.F, result.S, proof):
        raise AssertionError("search returned a proof the kernel rejects")
    e = winner_steps + verify_steps
    phi_C = result.winner_id + e
    triangular = phi_C * (phi_C + 1) // 2
    quad = (1 + phi_C) ** 2
    bound = min(2 * phi_steps, quad) if phi_decided else quad
    pps = result.phi_prime_steps
    return BoundReport(
        phi_steps=phi_steps,
        phi_decided=phi_decided,
        phi_prime_steps=pps,
        winner_id=result.winner_id,
        winner_steps=winner_steps,
        verify_steps=verify_steps,
        e=e,
        phi_C=phi_C,
        triangular=triangular,
        bound=bound,
        holds=pps <= bound,
        tight_holds=pps <= 2 * triangular,
        decision=to_text(proof.d_prime),
        R=proof.to_text(),
        R_size=proof.length,
        plants=result.plants,
    )
