import itertools

import pytest

from chromem.automaton import Dfa, ObjectiveKind
from chromem.errors import NotNormalized
from chromem.fixtures import ab_dfa, abcd_dfa, ababa_dfa, chord_graph
from chromem.hardness import graph_to_dfa
from chromem.preorder import compute_preorder, max_antichain, min_chain_cover, quotient_dfa

from oracles import interesting_dfa, max_antichain_size, preorder_oracle, wins_reach


def names(d, pairs):
    return {frozenset((d.states[a], d.states[b])) for a, b in pairs}


def test_abcd_incomparable_pairs():
    d = abcd_dfa()
    p = compute_preorder(d)
    assert names(d, p.incomparable_pairs()) == {frozenset({"q_a", "q_b"}), frozenset({"q_c", "q_d"})}
    top = d.state_index["q_cd"]
    for q in range(d.size):
        assert p.le(q, top)
        if q != top:
            assert p.lt(q, top)
    # every other distinct pair is strictly ordered
    for a, b in itertools.combinations(range(d.size), 2):
        if p.comparable(a, b):
            assert not p.equivalent(a, b)


def test_total_orders():
    for d in (ab_dfa(), ababa_dfa()):
        p = compute_preorder(d)
        assert p.incomparable_pairs() == []
        # the chain in declaration order is increasing
        for a in range(d.size - 1):
            assert p.lt(a, a + 1)


def test_requires_normalized():
    d = Dfa.from_transitions(["s", "f"], ["a"], "s", ["f"], [("s", "a", "f"), ("f", "a", "s")])
    with pytest.raises(NotNormalized):
        compute_preorder(d)


def test_no_final_state_is_all_equivalent():
    d = Dfa.from_transitions(["s", "t"], ["a"], "s", [], [("s", "a", "t"), ("t", "a", "s")])
    p = compute_preorder(d)
    assert all(all(row) for row in p.leq)


def test_unavoidable_final_is_equivalent_to_final():
    d = Dfa.from_transitions(["s", "t", "f"], ["a", "b"], "s", ["f"],
                             [("s", "a", "t"), ("s", "b", "s"), ("t", "a", "f"), ("t", "b", "f"),
                              ("f", "a", "f"), ("f", "b", "f")])
    p = compute_preorder(d)
    assert p.equivalent(1, 2)
    assert p.lt(0, 1)
    assert p.classes() == [(0,), (1, 2)]


def test_safe_preorder_is_transpose():
    d = abcd_dfa()
    p = compute_preorder(d)
    s = p.for_kind(ObjectiveKind.SAFE)
    assert s.kind is ObjectiveKind.SAFE
    for a in range(d.size):
        for b in range(d.size):
            assert s.le(a, b) == p.le(b, a)
    assert s.transpose().leq == p.leq


def _check_witness(d, p, q1, q2):
    w = p.separating_word(q1, q2)
    fin = d.final
    assert len(w.pump) > 0
    if p.kind is ObjectiveKind.REACH:
        good, bad = q1, q2
    else:
        good, bad = q2, q1
    assert wins_reach(d, good, w.stem, w.pump)
    assert not wins_reach(d, bad, w.stem, w.pump)
    # stem lands the good side on the final state, the bad side on a final-free pump cycle
    assert d.run(good, w.stem) == fin
    end = d.run(bad, w.stem)
    assert end != fin and d.run(end, w.pump) == end


def test_witnesses_replay_abcd():
    d = abcd_dfa()
    p = compute_preorder(d)
    for kind in ObjectiveKind:
        pk = p.for_kind(kind)
        for a in range(d.size):
            for b in range(d.size):
                if not pk.le(a, b):
                    _check_witness(d, pk, a, b)


@pytest.mark.parametrize("seed", range(50))
def test_random_against_oracle(seed):
    d = interesting_dfa(seed)
    p = compute_preorder(d)
    assert [list(r) for r in p.leq] == preorder_oracle(d)
    n = d.size
    for a in range(n):
        assert p.le(a, a)
        if d.final is not None:
            assert p.le(a, d.final)
        for b in range(n):
            if p.le(a, b):
                for c in range(len(d.alphabet)):
                    assert p.le(d.delta[a][c], d.delta[b][c])
                for c in range(n):
                    if p.le(b, c):
                        assert p.le(a, c)
            else:
                _check_witness(d, p, a, b)


# ----------------------------------------------------------------- antichains and chains

def test_abcd_antichain_and_cover():
    d = abcd_dfa()
    p = compute_preorder(d)
    anti = max_antichain(p)
    assert [d.states[q] for q in anti] == ["q_a", "q_b"]
    cover = min_chain_cover(p)
    assert len(cover) == 2
    assert sorted(q for c in cover for q in c) == list(range(d.size))
    assert all(p.is_chain(c) for c in cover)


def test_total_order_single_chain():
    d = ab_dfa()
    p = compute_preorder(d)
    assert len(max_antichain(p)) == 1
    assert min_chain_cover(p) == [tuple(range(d.size))]


def test_reduction_antichain():
    g = chord_graph()
    d = graph_to_dfa(g)
    p = compute_preorder(d)
    anti = max_antichain(p)
    assert len(anti) == g.n + g.m + 1 == 10
    expected = {"q_init"} | set(g.vertices) | {f"e{i + 1}" for i in range(g.m)}
    ix = d.state_index
    assert all(not p.comparable(ix[a], ix[b]) for a, b in itertools.combinations(expected, 2))
    # ties go to the lexicographically smallest index set
    assert [d.states[q] for q in anti] == ["q_init", "vC1", "vC2", "vC3", "vC4",
                                           "e1", "e2", "e3", "e4", "e5"]


@pytest.mark.parametrize("seed", range(50))
def test_dilworth_random(seed):
    d = interesting_dfa(1000 + seed)
    p = compute_preorder(d)
    anti = max_antichain(p)
    assert all(not p.comparable(a, b) for a, b in itertools.combinations(anti, 2))
    assert len(anti) == max_antichain_size(p)
    cover = min_chain_cover(p)
    assert len(cover) == len(anti)
    assert sorted(q for c in cover for q in c) == list(range(d.size))
    assert all(p.is_chain(c) for c in cover)


def test_quotient_collapses_equivalent_states():
    d = Dfa.from_transitions(["s", "t", "f"], ["a", "b"], "s", ["f"],
                             [("s", "a", "t"), ("s", "b", "s"), ("t", "a", "f"), ("t", "b", "f"),
                              ("f", "a", "f"), ("f", "b", "f")])
    q = quotient_dfa(d, compute_preorder(d))
    assert q.size == 2
    assert q.is_normalized()
    # same winning infinite words, compared on lassos
    words = [w for n in range(4) for w in itertools.product("ab", repeat=n)]
    for stem in words:
        for pump in words:
            if pump:
                assert wins_reach(d, 0, stem, pump) == wins_reach(q, 0, stem, pump)
