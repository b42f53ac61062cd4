"""Compare the compiled and pure-Python kernels on the same workloads.

    python3 benchmarks/bench_core.py [--repeat 3]

Each workload is run on both backends; the results are checked to agree
before timings are reported.
"""

import argparse
import time

from phiprime import _core
from phiprime.bench import make_scenario, run_scenario
from phiprime.prover import saturate
from phiprime.statement import Atom, Implies
from phiprime.system import FormalSystem
from phiprime.vm import LOOP_FOREVER


def wide_chain(width=200, depth=30):
    axioms = []
    for j in range(width):
        nodes = [Atom(f"n{j}_{k}") for k in range(depth + 1)]
        axioms.append(nodes[0])
        axioms.extend(Implies(a, b) for a, b in zip(nodes, nodes[1:]))
    return FormalSystem.from_axioms(axioms, name="wide")


WIDE = wide_chain()
WIDE.universe  # interning is shared Python work; keep it out of the timings


def w_saturate(backend):
    st = saturate(WIDE, fuel=10**7, backend=backend)
    return st.meter.steps, len(st.ts)


def w_vm(backend):
    pool = _core.get_backend(backend).VMPool()
    slots = [pool.add(LOOP_FOREVER.code) for _ in range(64)]
    for _ in range(5000):
        pool.step_many(slots)
    return sum(pool.steps(s) for s in slots)


def w_search(backend):
    out = []
    for i in range(5):
        sc = make_scenario(1, i, backend=backend)
        _, rep = run_scenario(sc, backend=backend)
        out.append((rep.phi_prime_steps, rep.winner_id))
    return out


WORKLOADS = {"saturate": w_saturate, "vm": w_vm, "search": w_search}


def timed(fn, backend, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(backend)
        best = min(best, time.perf_counter() - t0)
    return result, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "cython" not in _core.BACKENDS:
        print("compiled core not built; only the python backend is available")
        return
    print(f"{'workload':<10} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, fn in WORKLOADS.items():
        rp, tp = timed(fn, "python", args.repeat)
        rc, tc = timed(fn, "cython", args.repeat)
        assert rp == rc, f"{name}: backends disagree"
        print(f"{name:<10} {tp:>10.3f} {tc:>10.3f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
