"""Hamiltonian-cycle instances as monotone-decomposition problems.

``graph_to_dfa`` builds an automaton whose smallest monotone decomposition
has |V| + |E| + 1 sets exactly when the graph has a Hamiltonian cycle.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations

from .automaton import Dfa, _index, load_document
from .errors import DuplicateIdentifier, EmptyGraph, GraphTooLarge, MalformedDocument, UnknownSymbol

MAX_BRUTEFORCE_VERTICES = 10


@dataclass(frozen=True)
class DirectedGraph:
    vertices: tuple
    edges: tuple  # (src index, dst index) pairs in declaration order

    @classmethod
    def from_lists(cls, vertices, edges) -> "DirectedGraph":
        vertices = tuple(vertices)
        idx = _index(vertices, "vertex")
        out, seen = [], set()
        for e in edges:
            if not isinstance(e, (list, tuple)) or len(e) != 2:
                raise MalformedDocument(f"edge {e!r} is not a [src, dst] pair")
            for v in e:
                if v not in idx:
                    raise UnknownSymbol(f"edge {list(e)!r} uses undeclared vertex {v!r}")
            pair = (idx[e[0]], idx[e[1]])
            if pair in seen:
                raise DuplicateIdentifier(f"duplicate edge {list(e)!r}")
            seen.add(pair)
            out.append(pair)
        return cls(vertices, tuple(out))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": [[self.vertices[a], self.vertices[b]] for a, b in self.edges]}


def parse_graph(text: str) -> DirectedGraph:
    doc = load_document(text, ("vertices", "edges"))
    return DirectedGraph.from_lists(doc["vertices"], doc["edges"])


def graph_to_dfa(g: DirectedGraph) -> Dfa:
    """The reduction automaton.

    States, in order: ``q_init``, the cycle-graph vertices ``vC1..vCn`` and edges
    ``eC1..eCn``, the graph vertices, the graph edges ``e1..em``, then ``bot``
    and ``top``.  Colours: ``in``, ``out`` and one ``a_<state>`` per cycle or
    graph vertex and edge.  ``top`` is the only final state.
    """
    n, m = g.n, g.m
    if n == 0:
        raise EmptyGraph("the reduction needs at least one vertex")
    vc = [f"vC{i + 1}" for i in range(n)]
    ec = [f"eC{i + 1}" for i in range(n)]
    vs = list(g.vertices)
    es = [f"e{i + 1}" for i in range(m)]
    states = ["q_init"] + vc + ec + vs + es + ["bot", "top"]
    if len(set(states)) != len(states):
        clash = sorted({s for s in states if states.count(s) > 1})
        raise DuplicateIdentifier(f"vertex names clash with reduction state names: {clash}")
    letters = vc + ec + vs + es
    alphabet = ["in", "out"] + [f"a_{z}" for z in letters]
    ends = {}  # edge-like state -> (in target, out target)
    for i in range(n):
        ends[ec[i]] = (vc[i], vc[(i + 1) % n])
    for i, (a, b) in enumerate(g.edges):
        ends[es[i]] = (vs[a], vs[b])
    group = {}
    for z in vc:
        group[z] = "VC"
    for z in ec:
        group[z] = "EC"
    for z in vs:
        group[z] = "V"
    for z in es:
        group[z] = "E"

    t = []
    for s in ("q_init", "bot", "top"):
        t += [(s, "in", s), (s, "out", s)]
    for z in letters:
        t += [(z, "in", z), (z, "out", z)] if z not in ends else \
             [(z, "in", ends[z][0]), (z, "out", ends[z][1])]
        for z2 in letters:
            wins = z == z2 or (group[z] == "V" and group[z2] == "VC") \
                or (group[z] == "E" and group[z2] == "EC")
            t.append((z, f"a_{z2}", "top" if wins else "bot"))
    for z in letters:
        t += [("q_init", f"a_{z}", z), ("bot", f"a_{z}", "bot"), ("top", f"a_{z}", "top")]
    return Dfa.from_transitions(states, alphabet, "q_init", ["top"], t)


def hamiltonian_bruteforce(g: DirectedGraph):
    """First Hamiltonian cycle as a tuple of vertex names, starting at the first vertex.

    Cycles are tried in lexicographic order of vertex indices; None if there is none.
    """
    n = g.n
    if n == 0:
        raise EmptyGraph("empty graph")
    if n > MAX_BRUTEFORCE_VERTICES:
        raise GraphTooLarge(f"{n} vertices exceeds the brute-force limit of {MAX_BRUTEFORCE_VERTICES}")
    edges = set(g.edges)
    for rest in permutations(range(1, n)):
        order = (0,) + rest
        if all((order[i], order[(i + 1) % n]) in edges for i in range(n)):
            return tuple(g.vertices[v] for v in order)
    return None


def random_graph(n: int, m: int, seed: int, self_loops: bool = False,
                 planted: bool = False) -> DirectedGraph:
    """m distinct random directed edges over vertices v1..vn.

    With ``planted`` the edges include a random Hamiltonian cycle (when m >= n).
    """
    rng = random.Random(seed)
    pairs = [(a, b) for a in range(n) for b in range(n) if self_loops or a != b]
    chosen = []
    if planted and n > 1 and m >= n:
        order = list(range(n))
        rng.shuffle(order)
        chosen = [(order[i], order[(i + 1) % n]) for i in range(n)]
    rest = [pr for pr in pairs if pr not in chosen]
    chosen += rng.sample(rest, max(0, min(m - len(chosen), len(rest))))
    names = [f"v{i + 1}" for i in range(n)]
    return DirectedGraph.from_lists(names, [(names[a], names[b]) for a, b in chosen])
