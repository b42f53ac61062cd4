"""Shared fixtures, hypothesis strategies and the reference oracles.

The oracles here are deliberately naive and share no code with the engine:
``closure`` is a fixpoint loop over Python sets, and ``oracle_check`` is a
one-pass proof walker over the printed text.
"""

import random

import pytest
from hypothesis import settings, strategies as st

from phiprime.statement import FALSE, TRUE, Atom, Implies, MetaDegreeEq, MetaUnprov, Not, negate, parse
from phiprime.system import FormalSystem, load_system

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

TINY_TEXT = "name tiny\naxiom a\naxiom a => b\naxiom b => c\naxiom !d\n"
# e has Gödel number 16
TINY_IND_TEXT = TINY_TEXT.replace("name tiny", "name tiny_ind") + "axiom unprov(16)\n"


@pytest.fixture
def tiny():
    return load_system(TINY_TEXT)


@pytest.fixture
def tiny_ind():
    return load_system(TINY_IND_TEXT)


# ------------------------------------------------------------------ oracles

def closure(axioms):
    """Everything derivable by modus ponens from ``axioms`` plus T."""
    known = set(axioms) | {TRUE}
    changed = True
    while changed:
        changed = False
        for s in list(known):
            if isinstance(s, Implies) and s.lhs in known and s.rhs not in known:
                known.add(s.rhs)
                changed = True
    return known


def oracle_decision(axioms, S):
    """``S``, ``!S`` or ``None`` according to the fixpoint (consistent systems only)."""
    c = closure(axioms)
    if S in c:
        return S
    if negate(S) in c:
        return negate(S)
    return None


def oracle_check(axioms, S, text):
    """Independent single-pass checker over the serialized proof text."""
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        return False
    seen = []
    for i, line in enumerate(lines):
        head, _, rest = line.partition(": ")
        if head != str(i):
            return False
        stmt_text, _, just = rest.rpartition(" ; ")
        s = parse(stmt_text)
        if just == "Top":
            ok = s == TRUE
        elif just.startswith("Axiom(") and just.endswith(")"):
            k = int(just[6:-1])
            ok = 0 <= k < len(axioms) and axioms[k] == s
        elif just.startswith("MP(") and just.endswith(")"):
            a, b = (int(x) for x in just[3:-1].split(","))
            ok = a < i and b < i and seen[b] == Implies(seen[a], s)
        else:
            ok = False
        if not ok:
            return False
        seen.append(s)
    return seen[-1] in (S, negate(S))


# ------------------------------------------------------------------ strategies

ATOM_NAMES = [chr(c) for c in range(ord("a"), ord("a") + 12)]


@st.composite
def statements(draw, depth=3, atoms=ATOM_NAMES, meta=True):
    leaves = [st.sampled_from(atoms).map(Atom), st.sampled_from([TRUE, FALSE])]
    if meta:
        leaves.append(st.integers(1, 60).map(lambda n: MetaUnprov(_small_code(n))))
        leaves.append(st.tuples(st.integers(1, 60), st.integers(0, 5)).map(
            lambda t: MetaDegreeEq(_small_code(t[0]), t[1])))
    base = st.one_of(*leaves)

    def extend(children):
        return st.one_of(children.map(negate), st.tuples(children, children).map(lambda p: Implies(*p)))

    return draw(st.recursive(base, extend, max_leaves=2 ** depth))


def _small_code(n):
    from phiprime.statement import encode_statement
    return encode_statement(Atom(ATOM_NAMES[n % len(ATOM_NAMES)] * (1 + n // len(ATOM_NAMES))))


def random_consistent_corpus(rng: random.Random, n_atoms=12, max_axioms=30):
    """Random Horn-like corpus whose fixpoint contains no statement in both polarities."""
    atoms = [Atom(n) for n in ATOM_NAMES[:n_atoms]]
    lits = atoms + [Not(a) for a in atoms]
    while True:
        axioms = []
        for _ in range(rng.randint(1, max_axioms)):
            r = rng.random()
            if r < 0.3:
                axioms.append(rng.choice(lits))
            elif r < 0.85:
                axioms.append(Implies(rng.choice(lits), rng.choice(lits)))
            else:
                axioms.append(Implies(rng.choice(lits), Implies(rng.choice(lits), rng.choice(lits))))
        F = FormalSystem.from_axioms(axioms)
        c = closure(F.axioms)
        if not any(negate(s) in c for s in c):
            return F


# ------------------------------------------------------------------ proof mutations

def _mutate_statement(rng, s):
    """Change one token of ``s``: rename an atom, toggle a ``!`` or swap a constant."""
    from phiprime.statement import subterms

    subs = list(subterms(s))
    target = rng.choice(subs)

    def rebuild(x):
        if x is target:
            r = rng.random()
            if isinstance(x, Atom) and r < 0.6:
                return Atom(rng.choice([n for n in ATOM_NAMES + ["zz"] if n != x.name]))
            if x in (TRUE, FALSE) and r < 0.6:
                return negate(x) if rng.random() < 0.5 else Atom("zz")
            return negate(x)
        if isinstance(x, Not):
            return negate(rebuild(x.inner))
        if isinstance(x, Implies):
            return Implies(rebuild(x.lhs), rebuild(x.rhs))
        return x

    return rebuild(s)


def mutate_proof(rng, p):
    """One single-token mutation of a proof: a statement token or a justification index."""
    from phiprime.proofcheck import MP, Axiom, Proof

    steps = list(p.steps)
    k = rng.randrange(len(steps))
    stmt, just = steps[k]
    if rng.random() < 0.5:
        if isinstance(just, Axiom):
            n = just.index
            just = Axiom(rng.choice([x for x in (n - 2, n - 1, n + 1, n + 2) if x >= 0]))
        elif isinstance(just, MP):
            i, j = just.minor, just.major
            if rng.random() < 0.5:
                i = rng.choice([x for x in range(k + 1) if x != i])
            else:
                j = rng.choice([x for x in range(k + 1) if x != j])
            just = MP(i, j)
        else:
            stmt = _mutate_statement(rng, stmt)
    else:
        stmt = _mutate_statement(rng, stmt)
    steps[k] = (stmt, just)
    d_prime = steps[-1][0]
    return Proof(tuple(steps), p.target, d_prime)


# ------------------------------------------------------------------ acceptance report

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
