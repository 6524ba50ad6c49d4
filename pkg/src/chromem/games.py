"""Exact game solving on finite arenas.

Positions of the product game are (vertex, automaton state) pairs; the
objective is to reach (or avoid) the final state.  Besides the classical
attractor solver this module decides whether some strategy driven by a given
memory structure wins from every winning vertex, and builds the small arenas
on which a memory that fails one of the two checks must lose.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .automaton import Dfa, ObjectiveKind, _index, load_document
from .errors import (
    AlphabetMismatch,
    ColorNotInAlphabet,
    DanglingVertex,
    DuplicateIdentifier,
    InvalidWitness,
    MalformedDocument,
    SearchSpaceTooLarge,
    UnknownSymbol,
)
from .memory import MemoryStructure, Ok, PcWitness, SmWitness
from .preorder import PrefixPreorder

NODE_BUDGET = 10 ** 6


@dataclass(frozen=True)
class Arena:
    vertices: tuple
    owners: tuple  # 1 or 2 per vertex
    edges: tuple   # (src index, colour label, dst index)

    def __post_init__(self):
        for v, ow in enumerate(self.owners):
            if ow not in (1, 2):
                raise MalformedDocument(f"vertex {self.vertices[v]!r} has owner {ow!r}; expected 1 or 2")
        has_out = {s for s, _, _ in self.edges}
        for v, name in enumerate(self.vertices):
            if v not in has_out:
                raise DanglingVertex(f"vertex {name!r} has no outgoing edge")

    @classmethod
    def from_lists(cls, vertices, edges) -> "Arena":
        """``vertices``: (id, owner) pairs; ``edges``: (src, colour, dst) triples."""
        names = tuple(v for v, _ in vertices)
        idx = _index(names, "vertex")
        out = []
        for e in edges:
            if not isinstance(e, (list, tuple)) or len(e) != 3:
                raise MalformedDocument(f"edge {e!r} is not a [src, colour, dst] triple")
            src, col, dst = e
            for v in (src, dst):
                if v not in idx:
                    raise UnknownSymbol(f"edge {list(e)!r} uses undeclared vertex {v!r}")
            if not isinstance(col, str) or not col:
                raise MalformedDocument(f"edge {list(e)!r} has an invalid colour")
            out.append((idx[src], col, idx[dst]))
        return cls(names, tuple(ow for _, ow in vertices), tuple(out))

    @property
    def size(self) -> int:
        return len(self.vertices)

    @cached_property
    def out_edges(self) -> tuple:
        out = [[] for _ in self.vertices]
        for i, (s, _, _) in enumerate(self.edges):
            out[s].append(i)
        return tuple(tuple(x) for x in out)

    def colors(self) -> set:
        return {c for _, c, _ in self.edges}

    def to_json(self) -> dict:
        return {"vertices": [{"id": v, "owner": ow} for v, ow in zip(self.vertices, self.owners)],
                "edges": [[self.vertices[s], c, self.vertices[t]] for s, c, t in self.edges]}


def parse_arena(text: str) -> Arena:
    doc = load_document(text, ("vertices", "edges"))
    verts = []
    for v in doc["vertices"]:
        if not isinstance(v, dict) or "id" not in v or "owner" not in v:
            raise MalformedDocument(f"vertex entry {v!r} needs 'id' and 'owner'")
        verts.append((v["id"], v["owner"]))
    if len({v for v, _ in verts}) != len(verts):
        raise DuplicateIdentifier("duplicate vertex id")
    return Arena.from_lists(verts, doc["edges"])


def _check_colors(a: Arena, d: Dfa):
    extra = sorted(a.colors() - set(d.alphabet))
    if extra:
        raise ColorNotInAlphabet(f"arena colours {extra} are not in the automaton alphabet")


# ----------------------------------------------------------------- solving

def _product_moves(a: Arena, d: Dfa):
    """succ[(v, q)] = list of (edge index, (v', q'))."""
    ci = d.color_index
    succ = {}
    for v in range(a.size):
        for q in range(d.size):
            succ[(v, q)] = [(e, (a.edges[e][2], d.delta[q][ci[a.edges[e][1]]]))
                            for e in a.out_edges[v]]
    return succ


def _attractor(a: Arena, succ, target, player):
    """Positions from which ``player`` forces a visit to ``target``, with a rank-decreasing
    choice for that player's positions."""
    preds = {pos: [] for pos in succ}
    for pos, moves in succ.items():
        for e, nxt in moves:
            preds[nxt].append((pos, e))
    count = {pos: len(moves) for pos, moves in succ.items()}
    attr = set(target)
    choice = {}
    queue = deque(sorted(target))
    while queue:
        pos = queue.popleft()
        for prev, e in preds[pos]:
            if prev in attr:
                continue
            if a.owners[prev[0]] == player:
                attr.add(prev)
                choice[prev] = e
                queue.append(prev)
            else:
                count[prev] -= 1
                if count[prev] == 0:
                    attr.add(prev)
                    queue.append(prev)
    return attr, choice


def solve_game(a: Arena, d: Dfa, kind):
    """Winning positions of Player 1 and a uniform optimal strategy.

    The strategy is a dict (vertex, automaton state) -> edge index over Player 1
    vertices, i.e. it uses the automaton as memory.
    """
    kind = ObjectiveKind(kind)
    _check_colors(a, d)
    succ = _product_moves(a, d)
    fin = d.final
    target = {pos for pos in succ if pos[1] == fin} if fin is not None else set()
    table = {}
    if kind is ObjectiveKind.REACH:
        win, choice = _attractor(a, succ, target, 1)
        for pos in succ:
            if a.owners[pos[0]] == 1:
                table[pos] = choice.get(pos, a.out_edges[pos[0]][0])
    else:
        lose, _ = _attractor(a, succ, target, 2)
        win = set(succ) - lose
        for pos in succ:
            if a.owners[pos[0]] == 1:
                safe = [e for e, nxt in succ[pos] if nxt not in lose]
                table[pos] = safe[0] if safe else a.out_edges[pos[0]][0]
    return frozenset(win), table


@dataclass(frozen=True)
class NoOptimalStrategyBasedOnM:
    required: tuple  # arena vertices that must be won from
    explored: int
    holds = False


def _closure(a, d, m, table, starts, ci):
    """Product positions (v, memory, q) reachable from ``starts`` under a partial table.

    Player 1 positions without a table entry are left unexpanded and reported as open.
    """
    fin = d.final
    seen = set(starts)
    order = list(starts)
    opened = []
    edges_of = {}
    i = 0
    while i < len(order):
        pos = order[i]
        i += 1
        v, mm, q = pos
        if q == fin:
            edges_of[pos] = ()
            continue
        if a.owners[v] == 1:
            e = table.get((v, mm))
            if e is None:
                opened.append((v, mm))
                edges_of[pos] = ()
                continue
            moves = (e,)
        else:
            moves = a.out_edges[v]
        nxts = []
        for e in moves:
            _, col, dst = a.edges[e]
            c = ci[col]
            nxt = (dst, m.update[mm][c], d.delta[q][c])
            nxts.append(nxt)
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
        edges_of[pos] = nxts
    return order, edges_of, opened


def _has_cycle(order, edges_of):
    color = {}
    for root in order:
        if root in color:
            continue
        color[root] = 1
        stack = [(root, iter(edges_of[root]))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
            elif color.get(nxt) == 1:
                return True
            elif nxt not in color:
                color[nxt] = 1
                stack.append((nxt, iter(edges_of[nxt])))
    return False


def verify_table(a: Arena, d: Dfa, m: MemoryStructure, kind, table, starts=None) -> bool:
    """Whether the strategy given by a complete table wins from all ``starts`` vertices.

    ``starts`` defaults to every vertex v with (v, q_init) winning.
    """
    kind = ObjectiveKind(kind)
    if starts is None:
        win, _ = solve_game(a, d, kind)
        starts = [v for v in range(a.size) if (v, d.initial) in win]
    init = [(v, m.initial, d.initial) for v in starts]
    order, edges_of, opened = _closure(a, d, m, table, init, d.color_index)
    if opened:
        raise ValueError("table does not cover every reachable Player 1 position")
    return _winning(d, kind, order, edges_of)


def _winning(d, kind, order, edges_of):
    fin = d.final
    if not order:
        return True
    if kind is ObjectiveKind.SAFE:
        return all(q != fin for _, _, q in order)
    return fin is not None and not _has_cycle([p for p in order if p[2] != fin], edges_of)


def check_memory_sufficient_on_arena(a: Arena, d: Dfa, m: MemoryStructure, kind,
                                     budget: int = NODE_BUDGET):
    """Ok(table) if some strategy based on ``m`` wins from every winning vertex.

    Choices are fixed one (vertex, memory) pair at a time, in the order the
    pairs are first met, and a branch is dropped as soon as it reaches a losing
    position or (for reachability) closes a cycle avoiding the final state.
    """
    kind = ObjectiveKind(kind)
    _check_colors(a, d)
    if tuple(m.alphabet) != tuple(d.alphabet):
        raise AlphabetMismatch("memory and automaton alphabets differ")
    win, _ = solve_game(a, d, kind)
    required = tuple(v for v in range(a.size) if (v, d.initial) in win)
    starts = [(v, m.initial, d.initial) for v in required]
    ci = d.color_index
    table = {}
    nodes = 0

    def search():
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchSpaceTooLarge(f"more than {budget} strategy search nodes", module="games")
        order, edges_of, opened = _closure(a, d, m, table, starts, ci)
        if any((v, q) not in win for v, _, q in order):
            return False
        if kind is ObjectiveKind.REACH:
            inner = [p for p in order if p[2] != d.final]
            if _has_cycle(inner, edges_of):
                return False
        if not opened:
            return True
        v, mm = opened[0]
        for e in a.out_edges[v]:
            table[(v, mm)] = e
            if search():
                return True
        del table[(v, mm)]
        return False

    if search():
        full = dict(table)
        for v in range(a.size):
            if a.owners[v] == 1:
                for mm in range(m.size):
                    full.setdefault((v, mm), a.out_edges[v][0])
        return Ok(full)
    return NoOptimalStrategyBasedOnM(required, nodes)


# ----------------------------------------------------------------- counterexample arenas

class _Builder:
    def __init__(self):
        self.vertices = []
        self.edges = []

    def vertex(self, name, owner=1):
        self.vertices.append((name, owner))
        return name

    def spell(self, start, word, end, prefix):
        """Chain of fresh vertices from ``start`` reading ``word`` and ending in ``end``."""
        cur = start
        for i, col in enumerate(word):
            nxt = end if i == len(word) - 1 else self.vertex(f"{prefix}{i + 1}")
            self.edges.append((cur, col, nxt))
            cur = nxt

    def lasso(self, start, stem, pump, prefix):
        """From ``start`` read ``stem`` then loop on ``pump`` forever."""
        if not stem:
            stem = pump  # keep the loop away from the branching vertex
        loop = self.vertex(f"{prefix}_loop")
        self.spell(start, stem, loop, f"{prefix}_x")
        self.spell(loop, pump, loop, f"{prefix}_y")

    def arena(self):
        return Arena.from_lists(self.vertices, self.edges)


def gen_incomparability_arena(w: SmWitness, p: PrefixPreorder, d: Dfa) -> Arena:
    """Two entries reading w1 and w2 into a shared choice vertex ``v``; from ``v`` one
    branch wins only after w1 and the other only after w2."""
    ok = (d.run(d.initial, w.w1) == w.q1 and d.run(d.initial, w.w2) == w.q2
          and not p.comparable(w.q1, w.q2))
    if not ok:
        raise InvalidWitness("witness does not replay to an incomparable pair")
    b = _Builder()
    v = b.vertex("v")
    for tag, word in (("s1", w.w1), ("s2", w.w2)):
        if word:
            b.spell(b.vertex(tag), word, v, f"{tag}_")
    for tag, (qa, qb) in (("b1", (w.q1, w.q2)), ("b2", (w.q2, w.q1))):
        sep = p.separating_word(qa, qb)
        b.lasso(v, sep.stem, sep.pump, tag)
    return b.arena()


def gen_progress_arena(w: PcWitness, p: PrefixPreorder, d: Dfa) -> Arena:
    """An entry reading w1 into ``v``, a loop on ``v`` reading w2, and an exit that wins
    only once the loop has been taken."""
    pr = p.for_kind(ObjectiveKind.REACH)
    ok = (len(w.w2) > 0 and d.run(d.initial, w.w1) == w.q1
          and d.run(w.q1, w.w2) == w.q2 and d.run(w.q2, w.w2) == w.q2
          and pr.lt(w.q1, w.q2) and w.q2 != d.final)
    if not ok:
        raise InvalidWitness("witness does not replay to a losing progress cycle")
    b = _Builder()
    v = b.vertex("v")
    if w.w1:
        b.spell(b.vertex("s"), w.w1, v, "s_")
    b.spell(v, w.w2, v, "c_")
    sep = pr.separating_word(w.q2, w.q1)
    b.lasso(v, sep.stem, sep.pump, "x")
    return b.arena()


def random_arena(n_vertices: int, branching: int, alphabet, seed: int) -> Arena:
    if n_vertices < 1 or branching < 1:
        raise ValueError("need at least one vertex and one edge per vertex")
    rng = random.Random(seed)
    alphabet = list(alphabet)
    names = [f"v{i}" for i in range(n_vertices)]
    owners = [1 if rng.random() < 0.5 else 2 for _ in names]
    edges = [(s, rng.choice(alphabet), rng.choice(names)) for s in names for _ in range(branching)]
    return Arena.from_lists(list(zip(names, owners)), edges)
