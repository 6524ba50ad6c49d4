"""Prefix preorder on automaton states, antichains and chain covers.

``q1 <= q2`` holds when every winning continuation from ``q1`` also wins from
``q2``.  It is computed once for the reachability objective; the safety
preorder is its transpose.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product

import networkx as nx
from networkx.algorithms import bipartite

from .automaton import Dfa, ObjectiveKind
from .errors import NotNormalized


@dataclass(frozen=True)
class SeparationWitness:
    """``stem . pump^omega`` wins from the first state of the pair and loses from the second.

    For the reachability preorder the stem drives the first state into the
    final state while the second lands on a final-free cycle spelled by ``pump``;
    in the safety preorder the roles are swapped.
    """
    stem: tuple
    pump: tuple

    def to_json(self):
        return {"stem": list(self.stem), "pump": list(self.pump)}


@dataclass(frozen=True)
class PrefixPreorder:
    dfa: Dfa
    kind: ObjectiveKind
    leq: tuple
    witnesses: dict = field(repr=False)

    def le(self, q1, q2) -> bool:
        return self.leq[q1][q2]

    def lt(self, q1, q2) -> bool:
        return self.leq[q1][q2] and not self.leq[q2][q1]

    def equivalent(self, q1, q2) -> bool:
        return self.leq[q1][q2] and self.leq[q2][q1]

    def comparable(self, q1, q2) -> bool:
        return self.leq[q1][q2] or self.leq[q2][q1]

    def is_chain(self, states) -> bool:
        states = sorted(states)
        return all(self.comparable(a, b) for i, a in enumerate(states) for b in states[i + 1:])

    def incomparable_pairs(self):
        n = len(self.leq)
        return [(a, b) for a in range(n) for b in range(a + 1, n) if not self.comparable(a, b)]

    def separating_word(self, q1, q2) -> SeparationWitness:
        return self.witnesses[(q1, q2)]

    def transpose(self) -> "PrefixPreorder":
        other = ObjectiveKind.SAFE if self.kind is ObjectiveKind.REACH else ObjectiveKind.REACH
        n = len(self.leq)
        leq = tuple(tuple(self.leq[b][a] for b in range(n)) for a in range(n))
        return PrefixPreorder(self.dfa, other, leq,
                              {(a, b): w for (b, a), w in self.witnesses.items()})

    def for_kind(self, kind) -> "PrefixPreorder":
        return self if ObjectiveKind(kind) is self.kind else self.transpose()

    def classes(self):
        """Equivalence classes as sorted index tuples, ordered by smallest member."""
        seen, out = set(), []
        for q in range(len(self.leq)):
            if q in seen:
                continue
            cls = tuple(r for r in range(len(self.leq)) if self.equivalent(q, r))
            seen.update(cls)
            out.append(cls)
        return out


def escape_states(d: Dfa):
    """Non-final states admitting an infinite path that never meets the final state."""
    fin = d.final
    alive = {q for q in range(d.size) if q != fin}
    changed = True
    while changed:
        changed = False
        for q in sorted(alive):
            if not any(t in alive for t in d.delta[q]):
                alive.discard(q)
                changed = True
    return alive


def _bfs_word(d: Dfa, start, allowed, goal):
    """Shortest alphabet-minimal nonempty word from ``start`` staying inside ``allowed``
    and ending in a state satisfying ``goal``; returns (word, end)."""
    parent = {}
    queue = deque()
    for c, t in enumerate(d.delta[start]):
        if t in allowed and t not in parent:
            parent[t] = (None, c)
            queue.append(t)
    while queue:
        q = queue.popleft()
        if goal(q):
            word, node = [], q
            while node is not None:
                prev, c = parent[node]
                word.append(d.alphabet[c])
                node = prev
            return tuple(reversed(word)), q
        for c, t in enumerate(d.delta[q]):
            if t in allowed and t not in parent:
                parent[t] = (q, c)
                queue.append(t)
    return None, None


def _lasso_from(d: Dfa, p, esc):
    """Shortest route from ``p`` to a final-free cycle, and the cycle itself."""
    cycle_of = {}
    for r in esc:
        word, _ = _bfs_word(d, r, esc, lambda q, r=r: q == r)
        if word is not None:
            cycle_of[r] = word
    if p in cycle_of:
        return (), cycle_of[p]
    # BFS for the nearest cyclic state, letters in alphabet order
    word, r = _bfs_word(d, p, esc, lambda q: q in cycle_of)
    return word, cycle_of[r]


def compute_preorder(d: Dfa) -> PrefixPreorder:
    """Reachability prefix preorder of a normalized automaton, with separation witnesses."""
    if not d.is_normalized():
        raise NotNormalized("compute_preorder expects a normalized automaton")
    n, k = d.size, len(d.alphabet)
    fin = d.final
    if fin is None:
        leq = tuple(tuple(True for _ in range(n)) for _ in range(n))
        return PrefixPreorder(d, ObjectiveKind.REACH, leq, {})

    esc = escape_states(d)
    rev = [[[] for _ in range(k)] for _ in range(n)]
    for q in range(n):
        for c, t in enumerate(d.delta[q]):
            rev[t][c].append(q)

    # backward BFS on the pair product from the separating configurations
    dist = {(fin, p): 0 for p in sorted(esc)}
    queue = deque(dist)
    while queue:
        a, b = queue.popleft()
        for c in range(k):
            for pa, pb in product(rev[a][c], rev[b][c]):
                if (pa, pb) not in dist:
                    dist[(pa, pb)] = dist[(a, b)] + 1
                    queue.append((pa, pb))

    leq = tuple(tuple((a, b) not in dist for b in range(n)) for a in range(n))
    lassos = {}
    witnesses = {}
    for (q1, q2), dd in dist.items():
        a, b, stem = q1, q2, []
        while dd:
            for c in range(k):
                nxt = (d.delta[a][c], d.delta[b][c])
                if dist.get(nxt) == dd - 1:
                    stem.append(d.alphabet[c])
                    a, b = nxt
                    dd -= 1
                    break
        if b not in lassos:
            lassos[b] = _lasso_from(d, b, esc)
        extra, pump = lassos[b]
        witnesses[(q1, q2)] = SeparationWitness(tuple(stem) + extra, pump)
    return PrefixPreorder(d, ObjectiveKind.REACH, leq, witnesses)


def _strict_matching(p: PrefixPreorder, reps):
    """Maximum matching of the bipartite split of the strict order on ``reps``."""
    g = nx.Graph()
    left = [("L", r) for r in reps]
    g.add_nodes_from(left, bipartite=0)
    g.add_nodes_from((("R", r) for r in reps), bipartite=1)
    for a in reps:
        for b in reps:
            if a != b and p.lt(a, b):
                g.add_edge(("L", a), ("R", b))
    match = bipartite.hopcroft_karp_matching(g, top_nodes=left)
    return {a: match[("L", a)][1] for a in reps if ("L", a) in match}


def _width(p: PrefixPreorder, reps) -> int:
    return len(reps) - len(_strict_matching(p, reps))


def max_antichain(p: PrefixPreorder) -> tuple:
    """Largest antichain, one representative per class, lexicographically smallest."""
    reps = [cls[0] for cls in p.classes()]
    target = _width(p, reps)
    chosen = []
    for x in reps:
        if len(chosen) == target:
            break
        if any(p.comparable(x, y) for y in chosen):
            continue
        rest = [r for r in reps
                if r > x and not p.comparable(r, x) and all(not p.comparable(r, y) for y in chosen)]
        if len(chosen) + 1 + _width(p, rest) == target:
            chosen.append(x)
    return tuple(chosen)


def min_chain_cover(p: PrefixPreorder) -> list:
    """Fewest chains covering every state; equivalent states share a chain."""
    classes = p.classes()
    members = {cls[0]: cls for cls in classes}
    reps = list(members)
    succ = _strict_matching(p, reps)
    has_pred = set(succ.values())
    chains = []
    for r in reps:
        if r in has_pred:
            continue
        chain, node = [], r
        while node is not None:
            chain.extend(members[node])
            node = succ.get(node)
        chains.append(tuple(sorted(chain)))
    return sorted(chains)


def quotient_dfa(d: Dfa, p: PrefixPreorder) -> Dfa:
    """Collapse each equivalence class onto its smallest member."""
    classes = p.classes()
    cls_of = {q: i for i, cls in enumerate(classes) for q in cls}
    delta = tuple(tuple(cls_of[t] for t in d.delta[cls[0]]) for cls in classes)
    finals = frozenset(cls_of[f] for f in d.finals)
    return Dfa(tuple(d.states[cls[0]] for cls in classes), d.alphabet,
               cls_of[d.initial], finals, delta)
