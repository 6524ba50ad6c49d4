import re

from chromem.dot import arena_to_dot, dfa_to_dot, document_to_dot, memory_to_dot
from chromem.fixtures import ab_dfa, ab_memory, abcd_dfa, one_vertex_arena
from chromem.games import Arena

from oracles import DATA


def test_dfa_states_are_diamonds():
    dot = dfa_to_dot(abcd_dfa())
    assert dot.count("shape=diamond") == 7
    assert '"q_cd" [shape=diamond, peripheries=2];' in dot
    assert "__start -> \"q_init\";" in dot


def test_parallel_transitions_share_an_edge():
    dot = dfa_to_dot(ab_dfa())
    assert '"q_ab" -> "q_ab" [label="a,b"];' in dot


def test_memory_has_no_double_border():
    dot = memory_to_dot(ab_memory())
    assert dot.startswith("digraph memory {")
    assert "peripheries" not in dot


def test_arena_owner_shapes():
    a = Arena.from_lists([("v", 1), ("w", 2)], [("v", "a", "w"), ("w", "b", "v")])
    dot = arena_to_dot(a)
    assert '"v" [shape=circle];' in dot and '"w" [shape=square];' in dot
    assert len(re.findall(r"->", arena_to_dot(one_vertex_arena()))) == 2


def test_document_dispatch():
    for name, head in (("abcd.json", "digraph dfa"), ("abcd_mem3.json", "digraph memory"),
                       ("one_vertex_arena.json", "digraph arena")):
        assert document_to_dot((DATA / name).read_text()).startswith(head)
