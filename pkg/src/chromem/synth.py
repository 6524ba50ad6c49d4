"""Minimal memory synthesis.

Safety: search for a monotone decomposition with k sets, k growing from the
antichain lower bound.  Reachability: search for transition functions whose
co-reachable sets are chains, and refine with progress-consistency
counterexamples until the check passes.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .automaton import Dfa, ObjectiveKind
from .errors import SearchSpaceTooLarge
from .memory import (
    MemoryStructure,
    MonotoneDecomposition,
    _names,
    check_progress_consistency,
    check_strong_monotony,
    iter_pc_violations,
    coreachable_sets,
    memory_from_decomposition,
)
from .preorder import PrefixPreorder, max_antichain
from .sat import CnfInstance, DimacsBridge

__all__ = [
    "MonotoneDecomposition", "SynthesisResult", "universal_states", "encode_decomposition",
    "encode_memory_sm", "decode_decomposition", "decode_memory", "blocking_clause",
    "relocated_lemmas",
    "synth_safe_min", "synth_reach_min", "enumerate_memories_bruteforce", "bruteforce_min",
]


@dataclass
class SynthesisResult:
    kind: ObjectiveKind
    k: int
    memory: MemoryStructure
    decomposition: MonotoneDecomposition
    transcript: list = field(default_factory=list)  # PC checks performed (reach only)
    stats: dict = field(default_factory=dict)

    def certificate_json(self, d: Dfa) -> dict:
        out = {"decomposition": self.decomposition.to_json(d)}
        if self.kind is ObjectiveKind.REACH:
            out["progress_checks"] = self.transcript
        return out


def universal_states(d: Dfa, p: PrefixPreorder) -> frozenset:
    """Largest set of states that are comparable to every state and closed under transitions.

    Such states can join every chain of a decomposition without breaking it,
    so the encodings leave them out and add them back when decoding.
    """
    u = {q for q in range(d.size) if all(p.comparable(q, r) for r in range(d.size))}
    changed = True
    while changed:
        changed = False
        for q in sorted(u):
            if any(t not in u for t in d.delta[q]):
                u.discard(q)
                changed = True
    return frozenset(u)


def _incomparable(p, states):
    states = sorted(states)
    return [(a, b) for i, a in enumerate(states) for b in states[i + 1:] if not p.comparable(a, b)]


# ----------------------------------------------------------------- decomposition view

def encode_decomposition(d: Dfa, p: PrefixPreorder, k: int, *, symmetry: bool = True) -> CnfInstance:
    """CNF whose models are monotone decompositions with k sets.

    ``x[q,i]``: state q belongs to set i.  ``z[i,c,j]``: the image of set i under
    colour c is included in set j.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    u = universal_states(d, p)
    free = [q for q in range(d.size) if q not in u]
    cnf = CnfInstance()
    S, C = d.states, d.alphabet

    def x(q, i):
        return cnf.var(("x", q, i), f"x[{S[q]},{i}]")

    def z(i, c, j):
        return cnf.var(("z", i, c, j), f"z[{i},{C[c]},{j}]")

    for q in free:
        cnf.add([x(q, i) for i in range(k)])
    bad = _incomparable(p, free)
    for i in range(k):
        for a, b in bad:
            cnf.add([-x(a, i), -x(b, i)])
    for c in range(len(C)):
        movers = [q for q in free if d.delta[q][c] not in u]
        if not movers:
            continue
        for i in range(k):
            cnf.add([z(i, c, j) for j in range(k)])
            for j in range(k):
                for q in movers:
                    cnf.add([-z(i, c, j), -x(q, i), x(d.delta[q][c], j)])

    if symmetry:
        # antichain members lie in distinct sets; pin as many as there are sets
        anchors = [q for q in max_antichain(p) if q not in u]
        for j, a in enumerate(anchors[:k]):
            cnf.add([x(a, j)])
        # remaining sets ordered by their smallest member
        for i in range(len(anchors) + 1, k):
            for pos, q in enumerate(free):
                cnf.add([-x(q, i)] + [x(r, i - 1) for r in free[:pos + 1]])
    return cnf


def decode_decomposition(cnf: CnfInstance, model: set, d: Dfa, p: PrefixPreorder,
                         k: int) -> MonotoneDecomposition:
    u = universal_states(d, p)
    sets = []
    for i in range(k):
        members = {q for q in range(d.size) if q not in u
                   and cnf.names.get(("x", q, i)) in model}
        sets.append(frozenset(members | u))
    return MonotoneDecomposition(tuple(sets))


# ----------------------------------------------------------------- transition view

def encode_memory_sm(d: Dfa, p: PrefixPreorder, k: int, *, symmetry: bool = True,
                     bfs_symmetry: bool = False) -> CnfInstance:
    """CNF whose models are k-state memories with chain co-reachable sets.

    ``t[m,c,m']``: update(m, c) = m'.  ``r[m,q]``: (m, q) is reachable (an
    over-approximation closed under the product transitions).  Memory state 0
    is initial.  ``bfs_symmetry`` adds BFS-canonical numbering constraints, which
    also force every memory state to be reachable.  Otherwise ``symmetry`` places
    the members of a maximum antichain in consecutive memory states.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    u = universal_states(d, p)
    free = [q for q in range(d.size) if q not in u]
    cnf = CnfInstance()
    S, C = d.states, d.alphabet
    ncol = len(C)

    def t(m, c, m2):
        return cnf.var(("t", m, c, m2), f"t[m{m + 1},{C[c]},m{m2 + 1}]")

    def r(m, q):
        return cnf.var(("r", m, q), f"r[m{m + 1},{S[q]}]")

    for m in range(k):
        for c in range(ncol):
            cnf.add([t(m, c, m2) for m2 in range(k)])
            for a in range(k):
                for b in range(a + 1, k):
                    cnf.add([-t(m, c, a), -t(m, c, b)])
    cnf.add([r(0, d.initial)])
    for m in range(k):
        for q in range(d.size):
            for c in range(ncol):
                nq = d.delta[q][c]
                for m2 in range(k):
                    cnf.add([-r(m, q), -t(m, c, m2), r(m2, nq)])
    bad = _incomparable(p, free)
    for m in range(k):
        for a, b in bad:
            cnf.add([-r(m, a), -r(m, b)])
    if bfs_symmetry and k > 1:
        _bfs_canonical(cnf, k, ncol, t)
    elif symmetry:
        _antichain_slots(cnf, [q for q in max_antichain(p) if q not in u], k, r)
    return cnf


def _antichain_slots(cnf, anchors, k, r):
    """Antichain members sit in pairwise distinct memory states, at most one of them
    in the initial state.  Renaming the other states lets the rest occupy 1, 2, ...
    in order, skipping back one slot once a member has been seen in state 0."""
    for j, a in enumerate(anchors):
        before = [r(0, b) for b in anchors[:j]]
        clause = [r(0, a)] + before
        if j + 1 < k:
            clause.append(r(j + 1, a))
        cnf.add(clause)
        for lit in before:
            clause = [-lit, r(0, a)]
            if j < k:
                clause.append(r(j, a))
            cnf.add(clause)


def _bfs_canonical(cnf, k, ncol, t):
    """Memory states numbered in BFS order from state 0, letters in alphabet order."""
    def e(i, j):
        return cnf.var(("e", i, j), f"e[m{i + 1},m{j + 1}]")

    def par(j, i):
        return cnf.var(("p", j, i), f"p[m{j + 1},m{i + 1}]")

    def f(i, c, j):
        return cnf.var(("f", i, c, j), f"f[m{i + 1},{c},m{j + 1}]")

    for i in range(k):
        for j in range(i + 1, k):
            # e: some transition from i to j
            ts = [t(i, c, j) for c in range(ncol)]
            cnf.add([-e(i, j)] + ts)
            for lit in ts:
                cnf.add([e(i, j), -lit])
            # f: c is the smallest colour leading from i to j
            for c in range(ncol):
                earlier = [t(i, c2, j) for c2 in range(c)]
                cnf.add([-f(i, c, j), t(i, c, j)])
                for lit in earlier:
                    cnf.add([-f(i, c, j), -lit])
                cnf.add([f(i, c, j), -t(i, c, j)] + earlier)
    for j in range(1, k):
        # parent of j is the smallest state with an edge into j
        cnf.add([par(j, i) for i in range(j)])
        for i in range(j):
            cnf.add([-par(j, i), e(i, j)])
            for i2 in range(i):
                cnf.add([-par(j, i), -e(i2, j)])
            cnf.add([par(j, i), -e(i, j)] + [e(i2, j) for i2 in range(i)])
    for j in range(1, k - 1):
        for i in range(j):
            for i2 in range(i):
                cnf.add([-par(j, i), -par(j + 1, i2)])
            for c in range(ncol):
                for c2 in range(c):
                    cnf.add([-par(j, i), -par(j + 1, i), -f(i, c, j), -f(i, c2, j + 1)])


def decode_memory(cnf: CnfInstance, model: set, d: Dfa, k: int) -> MemoryStructure:
    update = []
    for m in range(k):
        row = []
        for c in range(len(d.alphabet)):
            row.append(next(m2 for m2 in range(k) if cnf.names[("t", m, c, m2)] in model))
        update.append(tuple(row))
    return MemoryStructure(_names(k), d.alphabet, 0, tuple(update))


def blocking_clause(cnf: CnfInstance, mem: MemoryStructure, w) -> list:
    """Clause ruling out the progress-consistency violation ``w`` in any model.

    It says: (w.memory, w.q1) is not reachable, or the cycle word ``w2`` does not
    follow the same memory transitions from ``w.memory``.  Every model built
    from a memory with that violation falsifies it, while models of sufficient
    memories with exact reachability satisfy it.
    """
    lits = [-cnf.names[("r", w.memory, w.q1)]]
    m = w.memory
    for col in w.w2:
        c = mem.color_index[col]
        m2 = mem.update[m][c]
        lit = -cnf.names[("t", m, c, m2)]
        if lit not in lits:
            lits.append(lit)
        m = m2
    return lits


def relocated_lemmas(cnf: CnfInstance, mem: MemoryStructure, w, k: int, tag: int) -> list:
    """The same violation pattern placed at every other memory state.

    ``y[s,j,a]`` holds when reading the first j letters of ``w2`` from state s
    may end in a; the lemma forbids returning to s while (s, q1) is reachable.
    """
    clauses = []
    word = [mem.color_index[c] for c in w.w2]
    for s in range(k):
        if s == w.memory:
            continue

        def y(j, a, s=s):
            return cnf.var(("y", tag, s, j, a), f"y[{tag},m{s + 1},{j},m{a + 1}]")

        for j, c in enumerate(word):
            for a in (range(k) if j else (s,)):
                for b in range(k):
                    pre = [-y(j, a)] if j else []
                    clauses.append(pre + [-cnf.names[("t", a, c, b)], y(j + 1, b)])
        clauses.append([-cnf.names[("r", s, w.q1)], -y(len(word), s)])
    return clauses


def _full_block(cnf, mem):
    return [-cnf.names[("t", m, c, mem.update[m][c])]
            for m in range(mem.size) for c in range(len(mem.alphabet))]


# ----------------------------------------------------------------- backends

class _Session:
    """Incremental built-in solving, or re-solving through a DIMACS bridge."""

    def __init__(self, cnf: CnfInstance, bridge: DimacsBridge | None, name: str):
        self.cnf, self.bridge, self.name = cnf, bridge, name
        self.solver = None if bridge else cnf.solver()
        self.calls = 0

    def add(self, clause):
        self.cnf.add(clause)
        if self.solver is not None:
            self.solver.add_clause(clause)

    def solve(self):
        self.calls += 1
        if self.bridge is not None:
            return self.bridge.solve(self.cnf, f"{self.name}_{self.calls}")
        if self.solver.solve():
            return True, self.solver.model()
        return False, set()

    @property
    def conflicts(self):
        return self.solver.conflicts if self.solver is not None else None


def _bridge(dimacs_dir, solver_cmd):
    return DimacsBridge(dimacs_dir, solver_cmd) if dimacs_dir else None


# ----------------------------------------------------------------- synthesis

def synth_safe_min(d: Dfa, p: PrefixPreorder, *, max_k: int | None = None,
                   dimacs_dir: str | None = None, solver_cmd: str | None = None):
    """Smallest memory making every co-reachable set a chain, or None beyond ``max_k``."""
    t0 = time.perf_counter()
    bridge = _bridge(dimacs_dir, solver_cmd)
    lower = max(1, len(max_antichain(p)))
    upper = d.size if max_k is None else min(d.size, max_k)
    per_k = []
    for k in range(lower, upper + 1):
        t1 = time.perf_counter()
        cnf = encode_decomposition(d, p, k)
        session = _Session(cnf, bridge, f"safe_k{k}")
        sat, model = session.solve()
        per_k.append({"k": k, "sat": sat, "vars": cnf.nvars, "clauses": len(cnf.clauses),
                      "conflicts": session.conflicts,
                      "seconds": round(time.perf_counter() - t1, 6)})
        if not sat:
            continue
        dec = decode_decomposition(cnf, model, d, p, k)
        mem = memory_from_decomposition(dec, d, p)
        if not check_strong_monotony(d, mem, p).holds:
            raise AssertionError("decoded decomposition does not yield a monotone memory")
        stats = {"lower_bound": lower, "per_k": per_k,
                 "seconds": round(time.perf_counter() - t0, 6)}
        return SynthesisResult(ObjectiveKind.SAFE, k, mem, dec, [], stats)
    return None


def _gamma_decomposition(d, mem):
    return MonotoneDecomposition(tuple(g for g in coreachable_sets(d, mem) if g))


def _pc_entry(d, mem, verdict):
    if verdict.holds:
        return {"memory_size": mem.size, "verdict": "progress-consistent"}
    return {"memory_size": mem.size, "verdict": "refuted", "witness": verdict.to_json(d, mem)}


def synth_reach_min(d: Dfa, p: PrefixPreorder, *, max_k: int | None = None,
                    dimacs_dir: str | None = None, solver_cmd: str | None = None,
                    safe: SynthesisResult | None = None):
    """Smallest memory that is strongly monotone and progress-consistent for reachability."""
    t0 = time.perf_counter()
    p = p.for_kind(ObjectiveKind.REACH)
    bridge = _bridge(dimacs_dir, solver_cmd)
    if safe is None:
        safe = synth_safe_min(d, p, max_k=max_k, dimacs_dir=dimacs_dir, solver_cmd=solver_cmd)
    if safe is None:
        return None
    transcript, per_k = [], []
    iterations = 0

    def done(k, mem):
        stats = {"safe_k": safe.k, "per_k": per_k, "cegar_iterations": iterations,
                 "seconds": round(time.perf_counter() - t0, 6)}
        return SynthesisResult(ObjectiveKind.REACH, k, mem, _gamma_decomposition(d, mem),
                               transcript, stats)

    # the safety optimum is often already progress-consistent
    verdict = check_progress_consistency(d, safe.memory, p)
    transcript.append(_pc_entry(d, safe.memory, verdict))
    if verdict.holds:
        return done(safe.k, safe.memory)

    upper = d.size if max_k is None else min(d.size, max_k)
    for k in range(safe.k, upper + 1):
        t1 = time.perf_counter()
        cnf = encode_memory_sm(d, p, k, bfs_symmetry=True)
        session = _Session(cnf, bridge, f"reach_k{k}")
        seen = set()
        rounds = lemmas = 0
        while True:
            sat, model = session.solve()
            if not sat:
                break
            rounds += 1
            iterations += 1
            mem = decode_memory(cnf, model, d, k)
            if not check_strong_monotony(d, mem, p).holds:
                raise AssertionError("decoded memory is not strongly monotone")
            verdict = check_progress_consistency(d, mem, p)
            transcript.append(_pc_entry(d, mem, verdict))
            if verdict.holds:
                per_k.append({"k": k, "sat": True, "cegar_rounds": rounds,
                              "seconds": round(time.perf_counter() - t1, 6)})
                return done(k, mem)
            key = (verdict.memory, verdict.q1, verdict.q2, verdict.w1, verdict.w2)
            if key in seen:
                session.add(_full_block(cnf, mem))
                continue
            seen.add(key)
            # refine with every violation of this memory, not only the first one
            for w in iter_pc_violations(d, mem, p):
                lemmas += 1
                session.add(blocking_clause(cnf, mem, w))
                for clause in relocated_lemmas(cnf, mem, w, k, lemmas):
                    session.add(clause)
                seen.add((w.memory, w.q1, w.q2, w.w1, w.w2))
        per_k.append({"k": k, "sat": False, "cegar_rounds": rounds,
                      "seconds": round(time.perf_counter() - t1, 6)})
    return None


# ----------------------------------------------------------------- exhaustive oracle

def enumerate_memories_bruteforce(d: Dfa, p: PrefixPreorder, k: int, kind,
                                  budget: int = 10 ** 7):
    """First k-state memory (in canonical enumeration order) passing the checks for ``kind``.

    Memories are generated with states numbered in order of first use, which
    visits each initially connected structure once up to renaming.  Partial
    update tables are abandoned as soon as a co-reachable set stops being a
    chain.  ``budget`` caps the number of search nodes.
    """
    kind = ObjectiveKind(kind)
    ncol = len(d.alphabet)
    n = d.size
    inc = [sum(1 << r for r in range(n) if not p.comparable(q, r)) for q in range(n)]
    table = [[None] * ncol for _ in range(k)]
    mask = [0] * k
    pr = p.for_kind(ObjectiveKind.REACH) if kind is ObjectiveKind.REACH else p
    nodes = 0

    def add(pairs, undo):
        stack = list(pairs)
        while stack:
            m, q = stack.pop()
            bit = 1 << q
            if mask[m] & bit:
                continue
            if mask[m] & inc[q]:
                return False
            mask[m] |= bit
            undo.append((m, bit))
            for c in range(ncol):
                m2 = table[m][c]
                if m2 is not None:
                    stack.append((m2, d.delta[q][c]))
        return True

    def rollback(undo):
        for m, bit in undo:
            mask[m] &= ~bit

    def members(m):
        return [q for q in range(n) if mask[m] >> q & 1]

    def search(pos, used):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchSpaceTooLarge(f"more than {budget} search nodes for k={k}")
        if pos == k * ncol:
            if used < k:
                return None
            mem = MemoryStructure(_names(k), d.alphabet, 0, tuple(map(tuple, table)))
            if kind is ObjectiveKind.REACH and not check_progress_consistency(d, mem, pr).holds:
                return None
            return mem
        m, c = divmod(pos, ncol)
        if m >= used:
            return None  # state m is never entered
        for target in range(min(k, used + 1)):
            table[m][c] = target
            undo = []
            if add([(target, d.delta[q][c]) for q in members(m)], undo):
                found = search(pos + 1, max(used, target + 1))
                if found is not None:
                    return found
            rollback(undo)
            table[m][c] = None
        return None

    undo = []
    add([(0, d.initial)], undo)
    return search(0, 1)


def bruteforce_min(d: Dfa, p: PrefixPreorder, kind, budget: int = 10 ** 7):
    """Smallest k with a memory found by the exhaustive oracle, and that memory."""
    for k in range(1, d.size + 1):
        mem = enumerate_memories_bruteforce(d, p, k, kind, budget)
        if mem is not None:
            return k, mem
    raise AssertionError("the automaton itself should always serve as a memory")
