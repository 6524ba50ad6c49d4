"""Deterministic complete automata over a colour alphabet.

States and colours are strings in files and dense integer indices in memory;
indices follow declaration order.  Words handed across module boundaries are
tuples of colour labels.
"""
from __future__ import annotations

import enum
import json
import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    AlphabetMismatch,
    DuplicateIdentifier,
    MalformedDocument,
    MissingTransition,
    UnknownSymbol,
)

Word = tuple  # tuple[str, ...]


class ObjectiveKind(str, enum.Enum):
    REACH = "reach"
    SAFE = "safe"


@dataclass(frozen=True)
class Dfa:
    states: tuple
    alphabet: tuple
    initial: int
    finals: frozenset
    delta: tuple  # delta[q][c] -> q'

    def __post_init__(self):
        n, k = len(self.states), len(self.alphabet)
        if not n or not k:
            raise MalformedDocument("automaton needs at least one state and one colour")
        if len(self.delta) != n or any(len(row) != k for row in self.delta):
            raise MissingTransition("transition table does not cover states x alphabet")
        if not 0 <= self.initial < n:
            raise UnknownSymbol(f"initial state index {self.initial} out of range")
        if any(not 0 <= q < n for q in self.finals):
            raise UnknownSymbol("final state index out of range")
        if any(not 0 <= t < n for row in self.delta for t in row):
            raise UnknownSymbol("transition target out of range")

    @classmethod
    def from_transitions(cls, states, alphabet, initial, finals, transitions) -> "Dfa":
        """Build from labels; ``transitions`` is an iterable of (src, colour, dst) triples."""
        states, alphabet = tuple(states), tuple(alphabet)
        sidx, cidx = _index(states, "state"), _index(alphabet, "colour")
        table = _table(states, alphabet, sidx, cidx, transitions)
        if initial not in sidx:
            raise UnknownSymbol(f"unknown initial state {initial!r}")
        for f in finals:
            if f not in sidx:
                raise UnknownSymbol(f"unknown final state {f!r}")
        return cls(states, alphabet, sidx[initial], frozenset(sidx[f] for f in finals), table)

    @property
    def table(self):
        return self.delta

    @property
    def size(self) -> int:
        return len(self.states)

    @cached_property
    def state_index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def color_index(self) -> dict:
        return {c: i for i, c in enumerate(self.alphabet)}

    @property
    def final(self):
        """The unique final state, or None when the language is empty."""
        if len(self.finals) > 1:
            raise ValueError("automaton has several final states; normalize it first")
        return next(iter(self.finals), None)

    def run(self, q: int, word: Iterable[str]) -> int:
        ci = self.color_index
        for c in word:
            q = self.delta[q][ci[c]]
        return q

    def accepts(self, word: Iterable[str]) -> bool:
        return self.run(self.initial, word) in self.finals

    def is_normalized(self) -> bool:
        if len(self.finals) > 1:
            return False
        for f in self.finals:
            if any(t != f for t in self.delta[f]):
                return False
        return len(reachable(self.delta, self.initial)) == self.size

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "alphabet": list(self.alphabet),
            "initial": self.states[self.initial],
            "finals": [self.states[q] for q in sorted(self.finals)],
            "transitions": _triples(self.states, self.alphabet, self.delta),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _index(labels: Sequence[str], what: str) -> dict:
    out = {}
    for i, s in enumerate(labels):
        if not isinstance(s, str) or not s:
            raise MalformedDocument(f"{what} identifiers must be nonempty strings, got {s!r}")
        if what == "colour" and any(ch.isspace() for ch in s):
            raise MalformedDocument(f"colour {s!r} contains whitespace")
        if s in out:
            raise DuplicateIdentifier(f"duplicate {what} {s!r}")
        out[s] = i
    return out


def _table(states, alphabet, sidx, cidx, transitions):
    table = [[None] * len(alphabet) for _ in states]
    for triple in transitions:
        if not isinstance(triple, (list, tuple)) or len(triple) != 3:
            raise MalformedDocument(f"transition {triple!r} is not a [src, colour, dst] triple")
        src, col, dst = triple
        for name, pool in ((src, sidx), (dst, sidx)):
            if name not in pool:
                raise UnknownSymbol(f"transition {triple!r} uses undeclared state {name!r}")
        if col not in cidx:
            raise UnknownSymbol(f"transition {triple!r} uses undeclared colour {col!r}")
        row = table[sidx[src]]
        if row[cidx[col]] is not None:
            raise DuplicateIdentifier(f"two transitions for ({src!r}, {col!r})")
        row[cidx[col]] = sidx[dst]
    for q, row in enumerate(table):
        for c, t in enumerate(row):
            if t is None:
                raise MissingTransition(f"no transition for ({states[q]!r}, {alphabet[c]!r})")
    return tuple(tuple(row) for row in table)


def _triples(states, alphabet, table):
    return [[states[q], alphabet[c], states[t]]
            for q, row in enumerate(table) for c, t in enumerate(row)]


def load_document(text: str, fields: Sequence[str]) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedDocument("top-level JSON value must be an object")
    missing = [f for f in fields if f not in doc]
    if missing:
        raise MalformedDocument(f"missing field(s): {', '.join(missing)}")
    for f in fields:
        if f != "initial" and not isinstance(doc[f], list):
            raise MalformedDocument(f"field {f!r} must be an array")
    return doc


def parse_dfa(text: str) -> Dfa:
    doc = load_document(text, ("states", "alphabet", "initial", "finals", "transitions"))
    finals = doc["finals"]
    if len(set(finals)) != len(finals):
        raise DuplicateIdentifier("duplicate final state")
    return Dfa.from_transitions(doc["states"], doc["alphabet"], doc["initial"],
                                finals, doc["transitions"])


def reachable(table, start: int) -> list:
    """States reachable from ``start`` in BFS order (letters in alphabet order)."""
    seen = {start}
    order = [start]
    queue = deque(order)
    while queue:
        q = queue.popleft()
        for t in table[q]:
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    return order


def normalize_dfa(d: Dfa) -> Dfa:
    """Merge the final states into one absorbing state and trim unreachable states.

    The merged state keeps the name of the lowest-index final state.  Surviving
    states keep their relative order.
    """
    fin = min(d.finals) if d.finals else None
    k = len(d.alphabet)
    table = []
    for q, row in enumerate(d.delta):
        if fin is not None and q in d.finals:
            table.append((fin,) * k)
        else:
            table.append(tuple(fin if t in d.finals else t for t in row))
    start = fin if d.initial in d.finals else d.initial
    keep = sorted(reachable(table, start))
    new = {q: i for i, q in enumerate(keep)}
    return Dfa(
        tuple(d.states[q] for q in keep),
        d.alphabet,
        new[start],
        frozenset({new[fin]}) if fin is not None and fin in new else frozenset(),
        tuple(tuple(new[t] for t in table[q]) for q in keep),
    )


def path_witness(components, require_nonempty: bool = False):
    """Shortest word leading every component from its source to its target.

    ``components`` is a sequence of ``(system, src, dst)`` where ``system`` exposes
    ``alphabet`` and ``table``.  Among shortest words the one minimal in alphabet
    order is returned, or None when no word exists.
    """
    components = list(components)
    if not components:
        raise ValueError("path_witness needs at least one component")
    alphabet = components[0][0].alphabet
    for system, _, _ in components[1:]:
        if tuple(system.alphabet) != tuple(alphabet):
            raise AlphabetMismatch("components do not share the same alphabet")
    tables = [system.table for system, _, _ in components]
    source = tuple(src for _, src, _ in components)
    target = tuple(dst for _, _, dst in components)
    if source == target and not require_nonempty:
        return ()

    k = len(alphabet)
    parent = {}
    queue = deque()
    # seed with words of length one so that the empty word is never returned here
    for c in range(k):
        nxt = tuple(tab[s][c] for tab, s in zip(tables, source))
        if nxt not in parent:
            parent[nxt] = (None, c)
            queue.append(nxt)
    while queue:
        node = queue.popleft()
        if node == target:
            word = []
            while node is not None:
                prev, c = parent[node]
                word.append(alphabet[c])
                node = prev
            return tuple(reversed(word))
        for c in range(k):
            nxt = tuple(tab[s][c] for tab, s in zip(tables, node))
            if nxt not in parent:
                parent[nxt] = (node, c)
                queue.append(nxt)
    return None


def random_dfa(n_states: int, alphabet: Sequence[str], seed: int, n_finals: int = 1) -> Dfa:
    """Uniformly random complete automaton, normalized (so possibly smaller than requested)."""
    rng = random.Random(seed)
    states = [f"q{i}" for i in range(n_states)]
    table = [[rng.randrange(n_states) for _ in alphabet] for _ in states]
    finals = frozenset(rng.sample(range(n_states), min(n_finals, n_states)))
    d = Dfa(tuple(states), tuple(alphabet), 0, finals, tuple(map(tuple, table)))
    return normalize_dfa(d)
