"""Command-line driver.

Every subcommand prints one JSON report on standard output and a short
human-readable summary on standard error.  Exit status: 0 when the property
holds or synthesis succeeded, 1 when it is refuted, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .automaton import ObjectiveKind, normalize_dfa, parse_dfa
from .dot import document_to_dot
from .errors import ChromemError
from .games import (
    check_memory_sufficient_on_arena,
    gen_incomparability_arena,
    gen_progress_arena,
    random_arena,
)
from .hardness import graph_to_dfa, parse_graph
from .memory import (
    MemoryStructure,
    check_progress_consistency,
    check_strong_monotony,
    parse_memory,
)
from .preorder import compute_preorder, max_antichain, min_chain_cover, quotient_dfa
from .synth import synth_reach_min, synth_safe_min

EXIT_HOLDS, EXIT_REFUTED, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        print(json.dumps({"verdict": "error",
                          "error": {"code": "cli.UsageError", "message": message}}))
        sys.exit(EXIT_USAGE)


def _read(path):
    with open(path) as fh:
        return fh.read()


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _load_dfa(path, quotient=False):
    raw = parse_dfa(_read(path))
    d = normalize_dfa(raw)
    info = {"input_states": raw.size, "states": d.size}
    p = compute_preorder(d)
    if quotient:
        d = quotient_dfa(d, p)
        p = compute_preorder(d)
        info["quotient_states"] = d.size
    return d, p, info


def _load_memory(path, d):
    m = parse_memory(_read(path))
    if set(m.alphabet) == set(d.alphabet) and tuple(m.alphabet) != tuple(d.alphabet):
        doc = m.to_json()
        m = MemoryStructure.from_transitions(doc["states"], d.alphabet, doc["initial"],
                                             doc["transitions"])
    return m


def _names(d, qs):
    return [d.states[q] for q in sorted(qs)]


def _say(args, text):
    if not args.quiet:
        print(text, file=sys.stderr)


# ----------------------------------------------------------------- subcommands

def cmd_analyze(args):
    d, p, info = _load_dfa(args.dfa, args.quotient)
    anti = max_antichain(p)
    cover = min_chain_cover(p)
    report = {
        "verdict": "analyzed",
        "automaton": info,
        "states": list(d.states),
        "leq": [[int(x) for x in row] for row in p.leq],
        "classes": [_names(d, c) for c in p.classes()],
        "max_antichain": _names(d, anti),
        "chain_cover": [_names(d, c) for c in cover],
        "incomparable_pairs": [
            {"pair": [d.states[a], d.states[b]],
             "separations": [p.separating_word(a, b).to_json(), p.separating_word(b, a).to_json()]}
            for a, b in p.incomparable_pairs()],
    }
    if args.quotient:
        report["quotient"] = d.to_json()
    width = max(len(s) for s in d.states)
    rows = ["  " + " " * width + " " + " ".join(s[:1] for s in d.states)]
    for s, row in zip(d.states, p.leq):
        rows.append("  " + s.ljust(width) + " " + " ".join("x" if x else "." for x in row))
    _say(args, "reach preorder (row <= column):\n" + "\n".join(rows))
    _say(args, f"max antichain ({len(anti)}): {report['max_antichain']}")
    _say(args, f"chain cover ({len(cover)}): {report['chain_cover']}")
    return EXIT_HOLDS, report


def _warnings(m):
    return [f"memory state {m.states[x]!r} is unreachable; its co-reachable set is empty"
            for x in m.unreachable_states()]


def cmd_check(args):
    kind = ObjectiveKind(args.kind)
    d, p, info = _load_dfa(args.dfa)
    p = p.for_kind(kind)
    m = _load_memory(args.mem, d)
    report = {"kind": kind.value, "automaton": info, "memory_states": m.size,
              "warnings": _warnings(m)}
    for w in report["warnings"]:
        _say(args, "warning: " + w)
    sm = check_strong_monotony(d, m, p)
    if not sm.holds:
        report.update(verdict="not-strongly-monotone", witness=sm.to_json(d, m))
        _say(args, f"refuted: {sm.w1} and {sm.w2} both reach memory state "
                   f"{m.states[sm.memory]} but lead to incomparable states")
        return EXIT_REFUTED, report
    report["gamma"] = {m.states[i]: _names(d, g) for i, g in enumerate(sm.detail)}
    if kind is ObjectiveKind.REACH:
        pc = check_progress_consistency(d, m, p)
        if not pc.holds:
            report.update(verdict="not-progress-consistent", witness=pc.to_json(d, m))
            _say(args, f"refuted: after {pc.w1}, the memory cycle {pc.w2} improves "
                       f"{d.states[pc.q1]} to {d.states[pc.q2]} but never wins")
            return EXIT_REFUTED, report
        report["verdict"] = "strongly-monotone-and-progress-consistent"
    else:
        report["verdict"] = "strongly-monotone"
    _say(args, f"holds: {report['verdict']}")
    return EXIT_HOLDS, report


def cmd_synth(args):
    kind = ObjectiveKind(args.kind)
    d, p, info = _load_dfa(args.dfa, args.quotient)
    opts = {"max_k": args.max_k, "dimacs_dir": args.dimacs, "solver_cmd": args.solver_cmd}
    if kind is ObjectiveKind.SAFE:
        res = synth_safe_min(d, p.for_kind(kind), **opts)
    else:
        res = synth_reach_min(d, p, **opts)
    report = {"kind": kind.value, "automaton": info}
    if res is None:
        report["verdict"] = "no-memory-within-bound"
        _say(args, f"no suitable memory with at most {args.max_k} states")
        return EXIT_REFUTED, report
    report.update(verdict="synthesized", k=res.k, memory=res.memory.to_json(),
                  certificate=res.certificate_json(d), stats=res.stats)
    if args.output:
        _write(args.output, res.memory.dumps() + "\n")
    _say(args, f"minimal memory for {kind.value}: {res.k} state(s)")
    return EXIT_HOLDS, report


def _verify_one(job):
    a, d, m, kind = job
    res = check_memory_sufficient_on_arena(a, d, m, kind)
    return res.holds


def cmd_verify(args):
    kind = ObjectiveKind(args.kind)
    d, p, info = _load_dfa(args.dfa)
    p = p.for_kind(kind)
    m = _load_memory(args.mem, d)
    rng = random.Random(args.seed)
    arenas = []
    for _ in range(args.arenas):
        n = rng.randint(1, args.max_vertices)
        b = rng.randint(1, args.branching)
        arenas.append(random_arena(n, b, d.alphabet, rng.randrange(2 ** 31)))
    jobs = [(a, d, m, kind) for a in arenas]
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            verdicts = list(ex.map(_verify_one, jobs))
    else:
        verdicts = [_verify_one(j) for j in jobs]
    refuted = [i for i, ok in enumerate(verdicts) if not ok]
    report = {"kind": kind.value, "automaton": info, "seed": args.seed,
              "random_arenas": len(arenas), "random_refuted": len(refuted)}
    if refuted:
        report["first_refuting_arena"] = arenas[refuted[0]].to_json()
    if args.from_witness:
        gen = []
        sm = check_strong_monotony(d, m, p)
        if not sm.holds:
            gen.append(("incomparability", gen_incomparability_arena(sm, p, d)))
        elif kind is ObjectiveKind.REACH:
            pc = check_progress_consistency(d, m, p)
            if not pc.holds:
                gen.append(("progress", gen_progress_arena(pc, p, d)))
        report["witness_arenas"] = []
        for label, a in gen:
            ok = check_memory_sufficient_on_arena(a, d, m, kind).holds
            report["witness_arenas"].append({"construction": label, "arena": a.to_json(),
                                             "memory_suffices": ok})
            if not ok:
                refuted.append(label)
    report["verdict"] = "refuted" if refuted else "sufficient-on-all-arenas"
    _say(args, f"{report['verdict']}: {len(refuted)} refuting arena(s)")
    return (EXIT_REFUTED if refuted else EXIT_HOLDS), report


def cmd_reduce_ham(args):
    g = parse_graph(_read(args.graph))
    d = graph_to_dfa(g)
    if args.output:
        _write(args.output, d.dumps() + "\n")
    report = {"verdict": "generated", "n": g.n, "m": g.m, "target_k": g.n + g.m + 1,
              "states": d.size, "colours": len(d.alphabet), "dfa": d.to_json()}
    _say(args, f"reduction automaton: {d.size} states, {len(d.alphabet)} colours; "
               f"Hamiltonian iff {g.n + g.m + 1} chains suffice")
    return EXIT_HOLDS, report


def cmd_export_dot(args):
    dot = document_to_dot(_read(args.file))
    if args.output:
        _write(args.output, dot)
        return EXIT_HOLDS, {"verdict": "exported", "output": args.output}
    sys.stdout.write(dot)
    return EXIT_HOLDS, None


# ----------------------------------------------------------------- entry point

def build_parser():
    ap = _Parser(prog="chromem", description="Chromatic memory requirements of regular objectives.")
    ap.add_argument("-q", "--quiet", action="store_true", help="no summary on standard error")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("analyze", help="preorder, classes, antichain and chain cover")
    s.add_argument("dfa")
    s.add_argument("--quotient", action="store_true", help="collapse equivalent states first")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("check", help="check a memory structure")
    s.add_argument("--kind", choices=["safe", "reach"], required=True)
    s.add_argument("dfa")
    s.add_argument("mem")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("synth", help="synthesize a minimal memory structure")
    s.add_argument("--kind", choices=["safe", "reach"], required=True)
    s.add_argument("dfa")
    s.add_argument("-o", "--output")
    s.add_argument("--dimacs", metavar="DIR", help="dump every SAT instance and its solution here")
    s.add_argument("--solver-cmd", help="external DIMACS solver command (with --dimacs)")
    s.add_argument("--max-k", type=int)
    s.add_argument("--quotient", action="store_true")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("verify", help="play the memory on random and generated arenas")
    s.add_argument("--kind", choices=["safe", "reach"], required=True)
    s.add_argument("dfa")
    s.add_argument("mem")
    s.add_argument("--arenas", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-vertices", type=int, default=5)
    s.add_argument("--branching", type=int, default=3)
    s.add_argument("--from-witness", action="store_true")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("reduce-ham", help="Hamiltonian-cycle reduction automaton")
    s.add_argument("graph")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_reduce_ham)

    s = sub.add_parser("export-dot", help="Graphviz rendering of an automaton, memory or arena")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_export_dot)
    return ap


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        code, report = args.func(args)
    except ChromemError as exc:
        code, report = EXIT_USAGE, {"verdict": "error",
                                    "error": {"code": exc.code, "message": str(exc)}}
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
    except OSError as exc:
        code, report = EXIT_USAGE, {"verdict": "error",
                                    "error": {"code": "cli.IOError", "message": str(exc)}}
        print(f"error: {exc}", file=sys.stderr)
    if report is not None:
        report = {"command": argv, **report}
        report.setdefault("stats", {})["seconds"] = round(time.perf_counter() - t0, 6)
        out.write(json.dumps(report, indent=2) + "\n")
    return code


def main():
    sys.exit(run())
