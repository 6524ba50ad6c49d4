"""Small hand-built automata and memories used throughout the tests and docs."""
from __future__ import annotations

from .automaton import Dfa
from .memory import MemoryStructure


def _loops(state, letters, target=None):
    return [(state, c, target or state) for c in letters]


def abcd_dfa() -> Dfa:
    """Reach a and b in any order, then c and d in any order."""
    t = []
    t += [("q_init", "a", "q_a"), ("q_init", "b", "q_b")] + _loops("q_init", "cd")
    t += [("q_a", "b", "q_ab")] + _loops("q_a", "acd")
    t += [("q_b", "a", "q_ab")] + _loops("q_b", "bcd")
    t += [("q_ab", "c", "q_c"), ("q_ab", "d", "q_d")] + _loops("q_ab", "ab")
    t += [("q_c", "d", "q_cd")] + _loops("q_c", "abc")
    t += [("q_d", "c", "q_cd")] + _loops("q_d", "abd")
    t += _loops("q_cd", "abcd")
    states = ["q_init", "q_a", "q_b", "q_ab", "q_c", "q_d", "q_cd"]
    return Dfa.from_transitions(states, "abcd", "q_init", ["q_cd"], t)


def abcd_memory() -> MemoryStructure:
    t = [("m1", "b", "m2")] + _loops("m1", "acd")
    t += [("m2", "c", "m3")] + _loops("m2", "abd")
    t += [("m3", "d", "m2")] + _loops("m3", "abc")
    return MemoryStructure.from_transitions(["m1", "m2", "m3"], "abcd", "m1", t)


def ab_dfa() -> Dfa:
    """See an a, then a b."""
    t = [("q_init", "a", "q_a"), ("q_init", "b", "q_init"),
         ("q_a", "a", "q_a"), ("q_a", "b", "q_ab")] + _loops("q_ab", "ab")
    return Dfa.from_transitions(["q_init", "q_a", "q_ab"], "ab", "q_init", ["q_ab"], t)


def ab_memory() -> MemoryStructure:
    t = [("m1", "a", "m2"), ("m1", "b", "m1")] + _loops("m2", "ab")
    return MemoryStructure.from_transitions(["m1", "m2"], "ab", "m1", t)


def ababa_dfa() -> Dfa:
    """See the alternating pattern a, b, a, b, a as a subsequence."""
    chain = ["q_init", "q_a", "q_ab", "q_aba", "q_abab", "q_fin"]
    t = []
    for i, q in enumerate(chain[:-1]):
        step = "a" if i % 2 == 0 else "b"
        stay = "b" if step == "a" else "a"
        t += [(q, step, chain[i + 1]), (q, stay, q)]
    t += _loops("q_fin", "ab")
    return Dfa.from_transitions(chain, "ab", "q_init", ["q_fin"], t)


def last_letter_memory() -> MemoryStructure:
    """Remembers whether the last colour seen was a; starts as if it were b."""
    t = [("m_b", "a", "m_a"), ("m_b", "b", "m_b"), ("m_a", "a", "m_a"), ("m_a", "b", "m_b")]
    return MemoryStructure.from_transitions(["m_b", "m_a"], "ab", "m_b", t)


def one_vertex_arena():
    """A single Player 1 vertex with an a-loop and a b-loop."""
    from .games import Arena
    return Arena.from_lists([("v", 1)], [("v", "a", "v"), ("v", "b", "v")])


def chord_graph():
    """Four vertices on a directed cycle plus the chord v2 -> v4."""
    from .hardness import DirectedGraph
    return DirectedGraph.from_lists(
        ["v1", "v2", "v3", "v4"],
        [("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v1"), ("v2", "v4")])


FIXTURES = {
    "abcd": abcd_dfa,
    "ab": ab_dfa,
    "ababa": ababa_dfa,
}
