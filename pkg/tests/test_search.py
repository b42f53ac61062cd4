import random

import pytest
from hypothesis import given, settings, strategies as st

from phiprime import _core
from phiprime.proofcheck import serialize_candidate, verify
from phiprime.prover import prove
from phiprime.search import (
    AllHaltedBeforeTarget, CountdownTask, NotTerminated, SearchResult, bound_report, dovetail,
    phi_prime,
)
from phiprime.statement import Atom, decode
from phiprime.system import FormalSystem
from phiprime.vm import HALTED, INVALID, LOOP_FOREVER, RUNNING, Program, VMState, assemble, emitter, run, vm_step

BACKENDS = sorted(_core.BACKENDS)
c = Atom("c")


# ------------------------------------------------------------------ VM

class TestVM:
    def test_halt(self):
        s = run(assemble(["HALT"]), 10)
        assert s.status == HALTED and s.steps == 1 and s.out == b""

    def test_emit(self):
        s = run(assemble([("PUSH", 65), "EMIT", "HALT"]), 10)
        assert s.status == HALTED and s.out == b"A" and s.steps == 3

    def test_loop_runs_a_million_steps(self):
        s = run(LOOP_FOREVER, 10 ** 6)
        assert s.status == RUNNING and s.steps == 10 ** 6

    @pytest.mark.parametrize("code", [b"", b"\x08", b"\x01", b"\x03", b"\x04", b"\x01\x01\x04", b"\x06", b"\x05\x00", b"\x00"])
    def test_invalid(self, code):
        s = run(Program(code), 10)
        assert s.status == INVALID

    def test_add_wraps(self):
        code = assemble([("PUSH", 255)] + [("PUSH", 255), "ADD"] * 3 + ["EMIT", "HALT"])
        assert run(code, 100).out == bytes([(255 * 4) & 0xFF])

    def test_stack_limit(self):
        s = run(Program(b"\x01\x07" + b"\x02" * 300), 1000)
        assert s.status == INVALID and len(s.stack) == 256

    def test_halted_is_absorbing(self):
        s = run(assemble(["HALT"]), 5)
        with pytest.raises(ValueError):
            vm_step(s)

    def test_emitter_step_count(self):
        s = run(emitter(b"xyz"), 100)
        assert s.out == b"xyz" and s.steps == 7

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_pool_matches_reference(self, backend):
        rng = random.Random(5)
        pool = _core.get_backend(backend).VMPool()
        programs = [decode(rng.randint(1, 10 ** 9)) for _ in range(200)] + [LOOP_FOREVER.code, emitter(b"hi").code]
        for code in programs:
            slot = pool.add(code)
            ref = VMState(Program(code))
            for _ in range(40):
                if ref.status != RUNNING:
                    break
                vm_step(ref)
                assert pool.step(slot) == ref.status
            assert pool.steps(slot) == ref.steps
            assert pool.output(slot) == bytes(ref.out)
            assert pool.counter(slot) == ref.counter
            assert list(pool.stack(slot)) == ref.stack


# ------------------------------------------------------------------ generic dovetail

class TestDovetail:
    def test_golden_trace(self):
        res = dovetail([CountdownTask(3), CountdownTask(1), CountdownTask(2)], 1)
        assert res.winners == [1]
        assert res.completions == [(1, 2, True)]
        assert res.task_steps == [1, 1, 0]
        assert res.total_steps == 2

    def test_all_must_halt(self):
        res = dovetail([CountdownTask(3), CountdownTask(1), CountdownTask(2)], 3)
        assert res.task_steps == [3, 1, 2]
        assert [i for i, _, _ in res.completions] == [1, 2, 0]
        assert res.total_steps == 6

    def test_single(self):
        assert dovetail([CountdownTask(7)], 1).total_steps == 7

    def test_not_enough_valid(self):
        with pytest.raises(AllHaltedBeforeTarget):
            dovetail([CountdownTask(1, valid=False), CountdownTask(2)], 2)
        with pytest.raises(ValueError):
            dovetail([CountdownTask(1)], 2)


# ------------------------------------------------------------------ phi'

def c_plant(tiny, negative=None):
    p = prove(tiny, c, fuel=1000).proof
    return emitter(serialize_candidate(p, negative=negative))


class TestPhiPrime:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_prover_wins_without_plants(self, tiny, backend):
        res = phi_prime(tiny, c, 10_000, backend=backend)
        rep = bound_report(res)
        assert rep.winner_id == 0 and rep.holds
        assert rep.phi_prime_steps <= 2 * rep.phi_steps
        assert rep.phi_steps == prove(tiny, c, fuel=10_000).meter.steps
        assert rep.decision == "c" and rep.R_size == 5

    def test_golden_no_plants(self, tiny):
        rep = bound_report(phi_prime(tiny, c, 10_000))
        assert (rep.phi_steps, rep.phi_prime_steps, rep.bound) == (13, 25, 26)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_plant_wins(self, tiny, backend):
        plant = c_plant(tiny)
        res = phi_prime(tiny, c, 10, plants=[(5, plant)], max_steps=10 ** 6, backend=backend)
        rep = bound_report(res)
        assert rep.winner_id == 5 and rep.holds
        assert rep.verify_steps == 5
        assert rep.winner_steps == (len(plant.code) - 1) // 3 * 2 + 1
        assert rep.e == rep.winner_steps + rep.verify_steps
        assert rep.phi_C == 5 + rep.e
        assert rep.bound == (1 + rep.phi_C) ** 2
        assert rep.plants == (5,)
        # golden values for this fixture
        assert (rep.phi_prime_steps, rep.e, rep.phi_C, rep.bound) == (382, 184, 189, 36100)

    def test_polarity_mismatch_rejected(self, tiny):
        res = phi_prime(tiny, c, 10_000, plants=[(2, c_plant(tiny, negative=True))])
        assert res.winner_id == 0
        res = phi_prime(tiny, c, 10, plants=[(2, c_plant(tiny, negative=True))], max_steps=10 ** 5)
        assert 2 in res.halted_invalid and not res.terminated

    def test_exhausted_report_raises(self, tiny):
        res = phi_prime(tiny, Atom("e"), 50)
        assert not res.terminated
        assert res.phi_prime_steps == 100
        with pytest.raises(NotTerminated):
            bound_report(res)

    def test_plant_validation(self, tiny):
        with pytest.raises(ValueError):
            phi_prime(tiny, c, 10, plants=[(3, LOOP_FOREVER), (3, LOOP_FOREVER)])
        with pytest.raises(ValueError):
            phi_prime(tiny, c, 0)

    def test_collective_is_triangular_when_nothing_halts(self, tiny):
        T = 40
        plants = [(i, LOOP_FOREVER) for i in range(1, T + 1)]
        res = phi_prime(tiny, Atom("e"), 10 ** 6, plants=plants, max_steps=T * T, record_sweeps=True)
        for rec in res.ledger[:T]:
            assert rec.collective_steps == rec.sweep * (rec.sweep - 1) // 2
            assert rec.phi_steps == rec.collective_steps

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_batched_equals_exact(self, tiny, backend):
        plants = [(5, c_plant(tiny)), (3, LOOP_FOREVER), (9, c_plant(tiny, negative=True))]
        fast = phi_prime(tiny, c, 10, plants=plants, max_steps=10 ** 6, backend=backend)
        slow = phi_prime(tiny, c, 10, plants=plants, max_steps=10 ** 6, backend=backend, exact=True)
        assert bound_report(fast) == bound_report(slow)
        assert fast.halted_invalid == slow.halted_invalid

    def test_deterministic_json(self, tiny):
        a = bound_report(phi_prime(tiny, c, 10, plants=[(5, c_plant(tiny))], max_steps=10 ** 6)).to_json()
        b = bound_report(phi_prime(tiny, c, 10, plants=[(5, c_plant(tiny))], max_steps=10 ** 6)).to_json()
        assert a == b


def test_bound_report_arithmetic(tiny):
    res = phi_prime(tiny, c, 10_000)
    rep = bound_report(res)
    # winner = the prover: the 2 * phi_steps term governs
    assert rep.bound == min(2 * rep.phi_steps, (1 + rep.phi_C) ** 2) == 2 * rep.phi_steps

    class FakeGate:
        proof = prove(tiny, c, fuel=1000).proof
        cost = 9

    class FakeTask:
        run_steps = 20
        gate = FakeGate

    fake = SearchResult(tiny, c, True, 5, 0, 0, res.phi_state, winner=FakeTask)
    rep = bound_report(fake)
    assert (rep.e, rep.phi_C, rep.triangular) == (29, 34, 595)
    assert (1 + rep.phi_C) ** 2 == 1225
    assert rep.bound == min(2 * rep.phi_steps, 1225)


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_adversarial_plants_never_return_bad_proofs(seed):
    rng = random.Random(seed)
    F = FormalSystem.from_axioms(["a", "a => b", "b => c", "!d"])
    good = prove(F, c, fuel=1000).proof
    text = serialize_candidate(good)
    plants = []
    for idx in rng.sample(range(2, 60), 6):
        kind = rng.randrange(5)
        if kind == 0:
            out = serialize_candidate(good, negative=True)
        elif kind == 1:
            out = text[: rng.randrange(1, len(text))]
        elif kind == 2:
            b = bytearray(text)
            b[rng.randrange(1, len(b))] = rng.randrange(256)
            out = bytes(b)
        elif kind == 3:
            out = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 40)))
        else:
            out = text
        plants.append((idx, emitter(out)))
    res = phi_prime(F, c, 10 ** 5, plants=plants)
    rep = bound_report(res)  # re-verifies the returned proof
    assert rep.holds
    if res.winner_id:
        assert res.winner.gate.accepted
        assert verify(F, c, res.winner.gate.proof)
        assert not res.winner.gate.negative
