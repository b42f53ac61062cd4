"""``phiprime`` command-line entry point.

Exit codes (stable):

====  ==========================================================
0     success / decided true / bound holds / no contradiction
1     decided false / bound violated / contradiction found
2     exhausted (fuel or step budget ran out)
10    malformed plants file
11    corpus could not be read or loaded
12    statement does not parse
13    invalid option value or combination
14    command-line syntax error
====  ==========================================================
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import _core
from .bench import CSV_FIELDS, bench_rows, rows_to_csv
from .degrees import reachability_degree, unknowability_degree
from .prover import Decided, graph_snapshot, prove, saturate, start
from .search import bound_report, phi_prime
from .statement import ParseError, negate, parse, to_text
from .system import ContradictionWitness, LoadError, bounded_consistency_probe, load_system
from .vm import Program, emitter

EXIT_PLANTS = 10
EXIT_CORPUS = 11
EXIT_STATEMENT = 12
EXIT_OPTION = 13
EXIT_SYNTAX = 14

FORMATS = {
    "prove": ("text", "json"),
    "degree": ("json", "text"),
    "search": ("json", "text"),
    "bench": ("csv", "json"),
    "export-graph": ("dot", "json"),
    "check-consistency": ("text", "json"),
}


class UsageError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_SYNTAX, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="phiprime", description="Bounded prover, degree ladders and dovetailed proof search.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, statement=True, fmt=None):
        sp.add_argument("--corpus", required=True,
                        help="corpus file, or the name of a bundled corpus (tiny, tiny_ind)")
        if statement:
            sp.add_argument("--statement", required=True)
        sp.add_argument("--fuel", type=int, default=None, help="step budget (default: the corpus fuel)")
        sp.add_argument("--format", default=FORMATS[fmt][0], help="/".join(FORMATS[fmt]))
        sp.add_argument("--backend", choices=sorted(_core.BACKENDS), default=None)

    sp = sub.add_parser("prove", help="decide a statement")
    common(sp, fmt="prove")
    sp.add_argument("--hint", default=None, help="expected decision, S or !S (bank query order only)")

    sp = sub.add_parser("degree", help="degree of reachability or unknowability")
    common(sp, fmt="degree")
    sp.add_argument("--kind", choices=("unknowability", "reachability"), default="unknowability")
    sp.add_argument("--n-max", type=int, default=4)
    sp.add_argument("--k-max", type=int, default=4)

    sp = sub.add_parser("search", help="dovetailed search with a bound report")
    common(sp, fmt="search")
    sp.add_argument("--plants", default=None, help="JSON plants file")
    sp.add_argument("--max-steps", type=int, default=None)

    sp = sub.add_parser("bench", help="seeded bound sweep, one CSV row per scenario")
    sp.add_argument("--scenarios", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--plants", default=None, help="replace every scenario's plants with these")
    sp.add_argument("--corpus", default=None, help="run a single scenario on this corpus instead")
    sp.add_argument("--statement", default=None)
    sp.add_argument("--fuel", type=int, default=None)
    sp.add_argument("--format", default="csv", help="/".join(FORMATS["bench"]))
    sp.add_argument("--backend", choices=sorted(_core.BACKENDS), default=None)

    sp = sub.add_parser("export-graph", help="deduction graph as DOT or JSON lines")
    common(sp, statement=False, fmt="export-graph")
    sp.add_argument("--statement", default=None, help="stop once this statement is decided")

    sp = sub.add_parser("check-consistency", help="bounded contradiction probe")
    common(sp, statement=False, fmt="check-consistency")
    return p


# ------------------------------------------------------------------ loading helpers

def load_corpus(ref: str):
    path = Path(ref)
    try:
        if path.exists():
            text = path.read_text(encoding="utf-8")
        else:
            stem = path.name[:-3] if path.name.endswith(".fs") else path.name
            res = resources.files("phiprime") / "corpora" / f"{stem}.fs"
            if not res.is_file():
                raise UsageError(EXIT_CORPUS, f"corpus not found: {ref}")
            text = res.read_text(encoding="utf-8")
        return load_system(text)
    except LoadError as exc:
        raise UsageError(EXIT_CORPUS, f"{ref}: {exc}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(EXIT_CORPUS, f"{ref}: {exc}") from None


def parse_statement(text: str):
    try:
        return parse(text)
    except ParseError as exc:
        raise UsageError(EXIT_STATEMENT, f"statement {text!r}: {exc}") from None


def load_plants(path: str):
    """Plants file: JSON list of ``{"index": n, "program": "<hex>"}`` or
    ``{"index": n, "candidate": {"negative": bool, "proof": "<proof text>"}}``.

    A candidate entry is compiled into the program that prints it.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise UsageError(EXIT_PLANTS, f"plants file {path}: {exc}") from None
    if isinstance(data, dict) and set(data) == {"plants"}:
        data = data["plants"]
    if not isinstance(data, list):
        raise UsageError(EXIT_PLANTS, "plants file must hold a JSON list")
    plants = []
    seen = set()
    for n, entry in enumerate(data):
        bad = UsageError(EXIT_PLANTS, f"plants file entry {n} is malformed")
        if not isinstance(entry, dict) or len(entry) != 2 or "index" not in entry:
            raise bad
        idx = entry["index"]
        if type(idx) is not int or idx < 1 or idx in seen:
            raise bad
        seen.add(idx)
        if "program" in entry:
            try:
                code = bytes.fromhex(entry["program"])
            except (TypeError, ValueError):
                raise bad from None
            prog = Program(code)
        elif "candidate" in entry:
            cand = entry["candidate"]
            if (not isinstance(cand, dict) or set(cand) != {"negative", "proof"}
                    or type(cand["negative"]) is not bool or not isinstance(cand["proof"], str)):
                raise bad
            prog = emitter(bytes([1 if cand["negative"] else 0]) + cand["proof"].encode("utf-8"))
        else:
            raise bad
        plants.append((idx, prog))
    return plants


def _check_common(args):
    fmts = FORMATS[args.command]
    if args.format not in fmts:
        raise UsageError(EXIT_OPTION, f"--format for {args.command} must be one of {', '.join(fmts)}")
    if getattr(args, "fuel", None) is not None and args.fuel < 1:
        raise UsageError(EXIT_OPTION, "--fuel must be >= 1")


# ------------------------------------------------------------------ commands

def cmd_prove(args, out) -> int:
    F = load_corpus(args.corpus)
    S = parse_statement(args.statement)
    d = None
    if args.hint is not None:
        d = parse_statement(args.hint)
        if d not in (S, negate(S)):
            raise UsageError(EXIT_OPTION, "--hint must be the statement or its negation")
    fuel = args.fuel or F.fuel_default
    res = prove(F, S, d=d, fuel=fuel, backend=args.backend)
    if isinstance(res, Decided):
        code = 1 if res.proof.negative else 0
        if args.format == "json":
            rec = {"statement": to_text(S), "decision": to_text(res.d_prime), "steps": res.meter.steps,
                   "fuel": fuel, "proof": res.proof.to_text().splitlines()}
            out.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            out.write(f"decision: {to_text(res.d_prime)}\nsteps: {res.meter.steps}\nproof:\n{res.proof.to_text()}")
        return code
    if args.format == "json":
        rec = {"statement": to_text(S), "exhausted": True, "steps": res.meter.steps, "fuel": fuel}
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    else:
        out.write(f"exhausted after {res.meter.steps} steps\n")
    return 2


def cmd_degree(args, out) -> int:
    F = load_corpus(args.corpus)
    S = parse_statement(args.statement)
    if args.n_max < 0 or args.k_max < 1:
        raise UsageError(EXIT_OPTION, "need --n-max >= 0 and --k-max >= 1")
    fuel = args.fuel or F.fuel_default
    if args.kind == "reachability":
        res = reachability_degree(F, S, fuel, args.n_max, backend=args.backend)
    else:
        res = unknowability_degree(F, S, fuel, args.k_max, args.n_max, backend=args.backend)
    rec = res.to_json()
    rec["kind"] = args.kind
    if args.format == "json":
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    else:
        val = "exhausted" if res.exhausted else str(res.degree)
        out.write(f"{args.kind} degree of {rec['subject']}: {val}\n")
        for rung, steps in zip(rec["ladder"], rec["meters"]):
            out.write(f"  {rung}  ({steps} steps)\n")
        for fact in rec["reflections"]:
            out.write(f"  reflected: {fact}\n")
    return 2 if res.exhausted else 0


def cmd_search(args, out) -> int:
    F = load_corpus(args.corpus)
    S = parse_statement(args.statement)
    plants = load_plants(args.plants) if args.plants else []
    if args.max_steps is not None and args.max_steps < 1:
        raise UsageError(EXIT_OPTION, "--max-steps must be >= 1")
    fuel = args.fuel or F.fuel_default
    res = phi_prime(F, S, fuel, plants=plants, max_steps=args.max_steps, backend=args.backend)
    if not res.terminated:
        rec = {"terminated": False, "phi_prime_steps": res.phi_prime_steps}
        if args.format == "json":
            out.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            out.write(f"search exhausted after {res.phi_prime_steps} steps\n")
        return 2
    rep = bound_report(res)
    if args.format == "json":
        out.write(rep.to_json() + "\n")
    else:
        who = "prover" if rep.winner_id == 0 else f"program {rep.winner_id}"
        out.write(f"winner: {who}\ndecision: {rep.decision}\n"
                  f"phi_prime_steps: {rep.phi_prime_steps}\nbound: {rep.bound}\nholds: {str(rep.holds).lower()}\n")
    return 0 if rep.holds else 1


def cmd_bench(args, out) -> int:
    if args.format not in FORMATS["bench"]:
        raise UsageError(EXIT_OPTION, "--format for bench must be csv or json")
    if args.scenarios < 0:
        raise UsageError(EXIT_OPTION, "--scenarios must be >= 0")
    plants = load_plants(args.plants) if args.plants else None
    if args.corpus is not None:
        if args.statement is None:
            raise UsageError(EXIT_OPTION, "--corpus needs --statement")
        F = load_corpus(args.corpus)
        S = parse_statement(args.statement)
        fuel = args.fuel or F.fuel_default
        res = phi_prime(F, S, fuel, plants=plants or [], backend=args.backend)
        if not res.terminated:
            raise UsageError(EXIT_OPTION, "search did not terminate; raise --fuel")
        rep = bound_report(res)
        rows = [(0, rep.phi_steps, rep.phi_prime_steps, rep.winner_id, rep.e, rep.phi_C, rep.bound,
                 "true" if rep.holds else "false")]
    else:
        rows, _ = bench_rows(args.seed, args.scenarios, plants_override=plants, backend=args.backend)
    if args.format == "csv":
        out.write(rows_to_csv(rows))
    else:
        for r in rows:
            rec = dict(zip(CSV_FIELDS, r))
            rec["holds"] = rec["holds"] == "true"
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    return 0 if all(r[-1] == "true" for r in rows) else 1


def cmd_export_graph(args, out) -> int:
    F = load_corpus(args.corpus)
    fuel = args.fuel or F.fuel_default
    if args.statement is not None:
        state = start(F, parse_statement(args.statement), fuel=fuel, backend=args.backend)
        state.run()
    else:
        state = saturate(F, fuel=fuel, backend=args.backend)
    g = graph_snapshot(state)
    out.write(g.to_dot() if args.format == "dot" else g.to_json_lines())
    return 0


def cmd_check_consistency(args, out) -> int:
    F = load_corpus(args.corpus)
    fuel = args.fuel or F.fuel_default
    res = bounded_consistency_probe(F, fuel, backend=args.backend)
    found = isinstance(res, ContradictionWitness)
    if args.format == "json":
        rec = {"contradiction": found, "fuel_used": res.fuel_used}
        if found:
            rec["statement"] = to_text(res.statement)
            rec["proof_pos"] = res.proof_pos.to_text().splitlines()
            rec["proof_neg"] = res.proof_neg.to_text().splitlines()
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    elif found:
        out.write(f"contradiction on {to_text(res.statement)} after {res.fuel_used} steps\n"
                  f"proof of {to_text(res.statement)}:\n{res.proof_pos.to_text()}"
                  f"proof of {to_text(res.proof_neg.target)}:\n{res.proof_neg.to_text()}")
    else:
        out.write(f"no contradiction found within {fuel} steps ({res.fuel_used} used)\n")
    return 1 if found else 0


COMMANDS = {
    "prove": cmd_prove,
    "degree": cmd_degree,
    "search": cmd_search,
    "bench": cmd_bench,
    "export-graph": cmd_export_graph,
    "check-consistency": cmd_check_consistency,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_SYNTAX
    try:
        _check_common(args)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"phiprime: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
