"""Graphviz rendering of automata, memory structures and arenas."""
from __future__ import annotations

import json

from .automaton import Dfa


def _q(s: str) -> str:
    return json.dumps(s)


def _grouped(triples):
    """Merge parallel transitions into one edge labelled with all their colours."""
    labels = {}
    for src, col, dst in triples:
        labels.setdefault((src, dst), []).append(col)
    return [(s, t, ",".join(cols)) for (s, t), cols in labels.items()]


def _machine(name, states, initial, finals, triples):
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for s in states:
        periph = ", peripheries=2" if s in finals else ""
        lines.append(f"  {_q(s)} [shape=diamond{periph}];")
    lines.append(f"  __start -> {_q(initial)};")
    for s, t, lab in _grouped(triples):
        lines.append(f"  {_q(s)} -> {_q(t)} [label={_q(lab)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dfa_to_dot(d: Dfa) -> str:
    doc = d.to_json()
    return _machine("dfa", doc["states"], doc["initial"], set(doc["finals"]), doc["transitions"])


def memory_to_dot(m) -> str:
    doc = m.to_json()
    return _machine("memory", doc["states"], doc["initial"], set(), doc["transitions"])


def arena_to_dot(a) -> str:
    lines = ["digraph arena {", "  rankdir=LR;"]
    for v, owner in zip(a.vertices, a.owners):
        shape = "circle" if owner == 1 else "square"
        lines.append(f"  {_q(v)} [shape={shape}];")
    for s, c, t in a.edges:
        lines.append(f"  {_q(a.vertices[s])} -> {_q(a.vertices[t])} [label={_q(c)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def document_to_dot(text: str) -> str:
    """Render whichever of the three JSON formats ``text`` holds."""
    from .automaton import load_document, parse_dfa
    from .errors import MalformedDocument
    from .games import parse_arena
    from .memory import parse_memory

    doc = load_document(text, ())
    if "vertices" in doc and "edges" in doc:
        return arena_to_dot(parse_arena(text))
    if "finals" in doc:
        return dfa_to_dot(parse_dfa(text))
    if "transitions" in doc:
        return memory_to_dot(parse_memory(text))
    raise MalformedDocument("document is neither an automaton, a memory structure nor an arena")
