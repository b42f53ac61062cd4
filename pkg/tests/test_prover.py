import random

import pytest
from hypothesis import given, settings, strategies as st

from phiprime import _core
from phiprime.proofcheck import MP, Axiom, Top, verify
from phiprime.prover import (
    Decided, Exhausted, HookDiverged, NotDecided, ProverState, extract_chain, graph_snapshot, prove, saturate,
    saturate_step, start,
)
from phiprime.statement import FALSE, TRUE, Atom, Implies, Not, negate
from phiprime.system import FormalSystem

from conftest import closure, oracle_check, oracle_decision, random_consistent_corpus

BACKENDS = sorted(_core.BACKENDS)
a, b, c, d, e = (Atom(x) for x in "abcde")


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


class TestProveExamples:
    def test_chain(self, tiny, backend):
        out = prove(tiny, c, c, 10_000, backend=backend)
        assert isinstance(out, Decided)
        assert out.d_prime == c
        assert out.proof.length == 5
        assert out.meter.steps <= 10_000
        assert out.proof.statements() == [a, Implies(a, b), b, Implies(b, c), c]
        assert verify(tiny, c, out.proof)

    def test_refuted_axiom(self, tiny, backend):
        out = prove(tiny, d, d, 10_000, backend=backend)
        assert out.d_prime == Not(d)
        assert out.proof.steps == ((Not(d), Axiom(3)),)

    def test_unknown_exhausts(self, tiny, backend):
        out = prove(tiny, e, e, 1000, backend=backend)
        assert isinstance(out, Exhausted)
        assert out.meter.steps == 1000

    def test_constant(self, tiny, backend):
        out = prove(tiny, TRUE, fuel=10, backend=backend)
        assert out.proof.steps == ((TRUE, Top()),)
        out = prove(tiny, FALSE, fuel=10, backend=backend)
        assert out.d_prime is TRUE and verify(tiny, FALSE, out.proof)

    def test_hint_orders_queries_only(self, backend):
        F = FormalSystem.from_axioms(["a", "!a"])
        assert prove(F, a, a, 10, backend=backend).d_prime == a
        assert prove(F, a, Not(a), 10, backend=backend).d_prime == Not(a)

    def test_bad_hint_and_fuel(self, tiny):
        with pytest.raises(ValueError):
            prove(tiny, c, d, 10)
        with pytest.raises(ValueError):
            prove(tiny, c, fuel=0)

    def test_prepare_hook(self, tiny):
        out = prove(tiny, e, fuel=100, prepare=lambda s: b)
        assert out.d_prime == b and out.proof.target == b

        def diverge(s):
            raise HookDiverged()

        out = prove(tiny, c, fuel=100, prepare=diverge)
        assert isinstance(out, Exhausted) and out.meter.steps == 100


class TestSaturateStep:
    def test_single_modus_ponens(self, tiny):
        st = start(tiny, e, fuel=100)
        assert st.frontier[0] == a
        saturate_step(st)
        assert st.in_ts(b)
        g = graph_snapshot(st)
        assert (g.index(a), g.index(b), f"MP({g.index(Implies(a, b))})") in g.edges

    def test_already_expanded_adds_nothing(self):
        F = FormalSystem.from_axioms(["b", "a => b", "a"])
        st = start(F, e, fuel=100)
        while st.frontier:
            saturate_step(st)
        before = graph_snapshot(st)
        assert st.frontier == []
        with pytest.raises(ValueError):
            saturate_step(st)
        assert graph_snapshot(st) == before
        assert len(set(before.nodes)) == len(before.nodes)

    def test_graph_after_proving_c(self, tiny):
        st = start(tiny, c, fuel=10_000)
        st.run()
        nodes = set(graph_snapshot(st).nodes)
        assert {a, b, c, Implies(a, b), Implies(b, c), Not(d)} <= nodes

    def test_fresh_graph(self, tiny):
        g = graph_snapshot(start(tiny, c, fuel=10))
        assert set(g.nodes) == set(tiny.axioms) | {TRUE, FALSE}
        assert g.edges == ()

    def test_graph_deterministic(self, tiny, backend):
        g1 = graph_snapshot(saturate(tiny, 100, backend=backend))
        g2 = graph_snapshot(saturate(tiny, 100, backend=backend))
        assert g1 == g2
        assert g1.to_dot() == g2.to_dot()
        assert g1.to_json_lines() == g2.to_json_lines()


class TestExtract:
    def test_chain(self, tiny):
        p = extract_chain(prove(tiny, c, fuel=1000), c)
        assert p.statements()[-1] == c
        assert all(isinstance(j, (Axiom, MP)) for _, j in p.steps)
        assert p.chain_view()[0] == c

    def test_refuted(self, tiny):
        p = extract_chain(prove(tiny, d, fuel=1000))
        assert p.length == 1 and isinstance(p.steps[0][1], Axiom)

    def test_exhausted_raises(self, tiny):
        with pytest.raises(NotDecided):
            extract_chain(prove(tiny, e, fuel=10))


class TestBanks:
    def test_initial_banks(self, tiny):
        st = start(tiny, e, fuel=10)
        assert set(tiny.axioms) | {TRUE} <= set(st.ts)
        assert FALSE in st.fs and Not(a) in st.fs and d in st.fs

    def test_fs_is_refuted_set(self, tiny):
        st = saturate(tiny, 1000)
        assert set(st.fs) == {negate(s) for s in st.ts}
        assert st.saturated
        assert set(st.ts) == closure(tiny.axioms)


def _symmetry_corpora():
    rng = random.Random(11)
    return [random_consistent_corpus(rng, n_atoms=6, max_axioms=12) for _ in range(40)]


def test_complementary_goals_get_complementary_decisions():
    for F in _symmetry_corpora():
        for name in "abcdef":
            S = Atom(name)
            p, n = prove(F, S, fuel=10_000), prove(F, negate(S), fuel=10_000)
            assert p.decided == n.decided
            if p.decided:
                # S refuted exactly when !S is affirmed, and the other way round
                assert p.d_prime == n.d_prime
                assert p.proof.negative != n.proof.negative


def test_exhaustion_is_symmetric_under_negation():
    for F in _symmetry_corpora():
        for name in "abcdef":
            S = Atom(name)
            p, n = prove(F, S, fuel=2000), prove(F, negate(S), fuel=2000)
            assert isinstance(p, Exhausted) == isinstance(n, Exhausted)


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.integers(1, 400))
def test_against_oracle(seed, fuel):
    rng = random.Random(seed)
    F = random_consistent_corpus(rng, n_atoms=8, max_axioms=20)
    for name in "abcdefgh":
        S = Atom(name) if rng.random() < 0.5 else Not(Atom(name))
        outs = [prove(F, S, fuel=fuel, backend=be) for be in BACKENDS]
        assert len(set(outs)) == 1  # backends agree, meters included
        out = outs[0]
        assert out.meter.steps <= fuel
        if isinstance(out, Decided):
            assert out.d_prime == oracle_decision(F.axioms, S)
            assert verify(F, S, out.proof)
            assert oracle_check(F.axioms, S, out.proof.to_text())
        else:
            assert out.meter.steps == fuel
        big = prove(F, S, fuel=100_000)
        assert (big.d_prime if big.decided else None) == oracle_decision(F.axioms, S)


def test_meter_is_monotone_and_resumable(tiny):
    st = ProverState(tiny, c, fuel=50)
    seen = 0
    while st.running:
        st.advance(1)
        assert st.meter.steps == seen + 1
        seen += 1
    assert st.outcome() == prove(tiny, c, fuel=50)


def test_breadth_first_gives_shortest_chain():
    F = FormalSystem.from_axioms(["a", "a => x1", "x1 => x2", "x2 => g", "a => g"])
    out = prove(F, Atom("g"), fuel=1000)
    assert out.proof.length == 3


def test_nested_rule_and_derived_rules():
    F = FormalSystem.from_axioms(["a => (b => c)", "b", "a"])
    out = prove(F, c, fuel=1000)
    assert verify(F, c, out.proof)
    assert out.proof.length == 5


def test_backend_selection():
    assert _core.get_backend("python") is _core._pycore
    with pytest.raises(ValueError):
        _core.get_backend("fortran")


def test_fallback_selected_without_extension():
    import subprocess
    import sys

    code = (
        "import sys; sys.modules['phiprime._core._ccore'] = None\n"
        "from phiprime import _core\n"
        "from phiprime.prover import prove\n"
        "from phiprime.system import FormalSystem\n"
        "from phiprime.statement import Atom\n"
        "assert _core.BACKEND == 'python' and sorted(_core.BACKENDS) == ['python']\n"
        "F = FormalSystem.from_axioms(['a', 'a => b', 'b => c', '!d'])\n"
        "print(prove(F, Atom('c'), fuel=100).meter.steps)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "13"
