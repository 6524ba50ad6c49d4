"""Chromatic memory structures and the two sufficiency checks.

A memory structure is updated by colours only.  Strong monotony asks every
co-reachable set to be a chain; progress consistency forbids memory cycles
that strictly improve the automaton state without ever winning.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .automaton import (
    Dfa,
    ObjectiveKind,
    _index,
    _table,
    _triples,
    load_document,
    path_witness,
    reachable,
)
from .errors import AlphabetMismatch, InvalidDecomposition, NotNormalized, UnknownSymbol
from .preorder import PrefixPreorder, compute_preorder


@dataclass(frozen=True)
class MemoryStructure:
    states: tuple
    alphabet: tuple
    initial: int
    update: tuple  # update[m][c] -> m'

    @classmethod
    def from_transitions(cls, states, alphabet, initial, transitions) -> "MemoryStructure":
        states, alphabet = tuple(states), tuple(alphabet)
        sidx, cidx = _index(states, "state"), _index(alphabet, "colour")
        table = _table(states, alphabet, sidx, cidx, transitions)
        if initial not in sidx:
            raise UnknownSymbol(f"unknown initial memory state {initial!r}")
        return cls(states, alphabet, sidx[initial], table)

    @property
    def table(self):
        return self.update

    @property
    def size(self) -> int:
        return len(self.states)

    @cached_property
    def color_index(self) -> dict:
        return {c: i for i, c in enumerate(self.alphabet)}

    def run(self, m: int, word) -> int:
        ci = self.color_index
        for c in word:
            m = self.update[m][ci[c]]
        return m

    def unreachable_states(self) -> list:
        seen = set(reachable(self.update, self.initial))
        return [m for m in range(self.size) if m not in seen]

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "alphabet": list(self.alphabet),
            "initial": self.states[self.initial],
            "transitions": _triples(self.states, self.alphabet, self.update),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def parse_memory(text: str) -> MemoryStructure:
    doc = load_document(text, ("states", "alphabet", "initial", "transitions"))
    return MemoryStructure.from_transitions(doc["states"], doc["alphabet"], doc["initial"],
                                            doc["transitions"])


def _names(k):
    return tuple(f"m{i + 1}" for i in range(k))


def trivial_memory(alphabet) -> MemoryStructure:
    alphabet = tuple(alphabet)
    return MemoryStructure(_names(1), alphabet, 0, ((0,) * len(alphabet),))


def memory_from_dfa(d: Dfa) -> MemoryStructure:
    """The automaton itself used as a memory, finals dropped."""
    return MemoryStructure(d.states, d.alphabet, d.initial, d.delta)


def _same_alphabet(d: Dfa, m: MemoryStructure):
    if tuple(d.alphabet) != tuple(m.alphabet):
        raise AlphabetMismatch(
            f"memory alphabet {list(m.alphabet)} differs from automaton alphabet {list(d.alphabet)}")


# ----------------------------------------------------------------- results

@dataclass(frozen=True)
class Ok:
    """Positive verdict; ``detail`` carries whatever the check computed along the way."""
    detail: object = None
    holds = True


@dataclass(frozen=True)
class SmWitness:
    memory: int
    q1: int
    q2: int
    w1: tuple
    w2: tuple
    holds = False

    def replay(self, d: Dfa, m: MemoryStructure, p: PrefixPreorder) -> bool:
        return (m.run(m.initial, self.w1) == self.memory == m.run(m.initial, self.w2)
                and d.run(d.initial, self.w1) == self.q1
                and d.run(d.initial, self.w2) == self.q2
                and not p.comparable(self.q1, self.q2))

    def to_json(self, d: Dfa, m: MemoryStructure) -> dict:
        return {"type": "SmWitness", "memory": m.states[self.memory],
                "q1": d.states[self.q1], "q2": d.states[self.q2],
                "w1": list(self.w1), "w2": list(self.w2)}


@dataclass(frozen=True)
class PcWitness:
    memory: int
    q1: int
    q2: int
    w1: tuple
    w2: tuple
    holds = False

    def replay(self, d: Dfa, m: MemoryStructure, p: PrefixPreorder) -> bool:
        return (m.run(m.initial, self.w1) == self.memory
                and d.run(d.initial, self.w1) == self.q1
                and len(self.w2) > 0
                and m.run(self.memory, self.w2) == self.memory
                and d.run(self.q1, self.w2) == self.q2
                and d.run(self.q2, self.w2) == self.q2
                and p.lt(self.q1, self.q2)
                and _losing_forever(d, p.kind, self.q2))

    def to_json(self, d: Dfa, m: MemoryStructure) -> dict:
        return {"type": "PcWitness", "memory": m.states[self.memory],
                "q1": d.states[self.q1], "q2": d.states[self.q2],
                "w1": list(self.w1), "w2": list(self.w2)}


def _losing_forever(d: Dfa, kind, q2) -> bool:
    """Whether a word that keeps returning to ``q2`` loses: it never meets the final
    state under reachability, and has already met it under safety."""
    fin = d.final
    if ObjectiveKind(kind) is ObjectiveKind.REACH:
        return q2 != fin
    return fin is not None and q2 == fin


# ----------------------------------------------------------------- checks

def coreachable_sets(d: Dfa, m: MemoryStructure) -> tuple:
    """Gamma sets as a tuple of frozensets indexed by memory state."""
    _same_alphabet(d, m)
    k = len(d.alphabet)
    start = (m.initial, d.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        mm, q = queue.popleft()
        for c in range(k):
            nxt = (m.update[mm][c], d.delta[q][c])
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    gamma = [set() for _ in range(m.size)]
    for mm, q in seen:
        gamma[mm].add(q)
    return tuple(frozenset(g) for g in gamma)


def _access(d, m, mm, q):
    return path_witness([(m, m.initial, mm), (d, d.initial, q)])


def check_strong_monotony(d: Dfa, m: MemoryStructure, p: PrefixPreorder):
    """Ok (detail = Gamma sets) when every co-reachable set is a chain, else an SmWitness."""
    gamma = coreachable_sets(d, m)
    for mm, g in enumerate(gamma):
        states = sorted(g)
        for i, q1 in enumerate(states):
            for q2 in states[i + 1:]:
                if not p.comparable(q1, q2):
                    return SmWitness(mm, q1, q2, _access(d, m, mm, q1), _access(d, m, mm, q2))
    return Ok(gamma)


def _cycle_pairs(d: Dfa):
    """Pairs (q1, q2) such that some word leads q1 to q2 and q2 back to itself."""
    k = len(d.alphabet)
    rev = {}
    for a in range(d.size):
        for b in range(d.size):
            for c in range(k):
                rev.setdefault((d.delta[a][c], d.delta[b][c]), []).append((a, b))
    good = set()
    for q2 in range(d.size):
        seen = {(q2, q2)}
        queue = deque(seen)
        while queue:
            node = queue.popleft()
            for prev in rev.get(node, ()):
                if prev not in seen:
                    seen.add(prev)
                    queue.append(prev)
        good.update((a, q2) for a, b in seen if b == q2)
    return good


def iter_pc_violations(d: Dfa, m: MemoryStructure, p: PrefixPreorder):
    """All progress-consistency violations, one per (m, q1, q2), in scan order."""
    if not d.is_normalized():
        raise NotNormalized("progress consistency expects a normalized automaton")
    gamma = coreachable_sets(d, m)
    candidates = None
    for mm, g in enumerate(gamma):
        for q1 in sorted(g):
            for q2 in range(d.size):
                if not p.lt(q1, q2) or not _losing_forever(d, p.kind, q2):
                    continue
                if candidates is None:
                    candidates = _cycle_pairs(d)
                if (q1, q2) not in candidates:
                    continue
                w2 = path_witness([(m, mm, mm), (d, q1, q2), (d, q2, q2)], require_nonempty=True)
                if w2 is not None:
                    yield PcWitness(mm, q1, q2, _access(d, m, mm, q1), w2)


def check_progress_consistency(d: Dfa, m: MemoryStructure, p: PrefixPreorder):
    """Ok when no memory cycle strictly improves the automaton state while losing forever.

    With the reachability preorder the improved state must avoid the final state;
    with the safety preorder it must be the final state, which nothing lies
    strictly below, so the safety check always succeeds.
    """
    for w in iter_pc_violations(d, m, p):
        return w
    return Ok(coreachable_sets(d, m))


# ----------------------------------------------------------------- decompositions

@dataclass(frozen=True)
class MonotoneDecomposition:
    sets: tuple  # tuple of frozensets of state indices

    @property
    def k(self) -> int:
        return len(self.sets)

    def image(self, d: Dfa, i: int, c: int) -> frozenset:
        return frozenset(d.delta[q][c] for q in self.sets[i])

    def target(self, d: Dfa, i: int, c: int):
        """Lowest index j with delta(set i, c) contained in set j, or None."""
        img = self.image(d, i, c)
        return next((j for j, s in enumerate(self.sets) if img <= s), None)

    def validate(self, d: Dfa, p: PrefixPreorder):
        covered = frozenset().union(*self.sets) if self.sets else frozenset()
        missing = [d.states[q] for q in range(d.size) if q not in covered]
        if missing:
            raise InvalidDecomposition(f"states not covered: {missing}")
        for i, s in enumerate(self.sets):
            if not p.is_chain(s):
                raise InvalidDecomposition(f"set {i} is not a chain")
            for c, col in enumerate(d.alphabet):
                if self.target(d, i, c) is None:
                    raise InvalidDecomposition(f"image of set {i} under {col!r} fits in no set")

    def to_json(self, d: Dfa) -> list:
        return [[d.states[q] for q in sorted(s)] for s in self.sets]


def memory_from_decomposition(dec: MonotoneDecomposition, d: Dfa,
                              p: PrefixPreorder | None = None) -> MemoryStructure:
    if p is None:
        p = compute_preorder(d)
    dec.validate(d, p)
    init = next(i for i, s in enumerate(dec.sets) if d.initial in s)
    update = tuple(tuple(dec.target(d, i, c) for c in range(len(d.alphabet)))
                   for i in range(dec.k))
    return MemoryStructure(_names(dec.k), d.alphabet, init, update)
