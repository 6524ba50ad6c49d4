import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from chromem.automaton import Dfa, normalize_dfa, parse_dfa, path_witness, random_dfa, reachable
from chromem.errors import (
    AlphabetMismatch,
    DuplicateIdentifier,
    MalformedDocument,
    MissingTransition,
    UnknownSymbol,
)
from chromem.fixtures import abcd_dfa, ababa_dfa, last_letter_memory

from oracles import DATA


def abcd_doc():
    return json.loads((DATA / "abcd.json").read_text())


def test_parse_abcd():
    d = parse_dfa((DATA / "abcd.json").read_text())
    assert d.size == 7
    assert len(d.alphabet) == 4
    assert {d.states[q] for q in d.finals} == {"q_cd"}
    assert d == abcd_dfa()


def test_single_state_no_finals():
    text = json.dumps({"states": ["s"], "alphabet": ["x"], "initial": "s", "finals": [],
                       "transitions": [["s", "x", "s"]]})
    d = parse_dfa(text)
    assert d.size == 1 and d.finals == frozenset()
    assert normalize_dfa(d).final is None


def test_missing_transition():
    doc = abcd_doc()
    doc["transitions"] = [t for t in doc["transitions"] if t[:2] != ["q_a", "b"]]
    with pytest.raises(MissingTransition):
        parse_dfa(json.dumps(doc))


@pytest.mark.parametrize("mutate, error", [
    (lambda doc: doc["transitions"].append(["q_a", "z", "q_a"]), UnknownSymbol),
    (lambda doc: doc["transitions"].append(["nowhere", "a", "q_a"]), UnknownSymbol),
    (lambda doc: doc.update(initial="nowhere"), UnknownSymbol),
    (lambda doc: doc["states"].append("q_a"), DuplicateIdentifier),
    (lambda doc: doc["alphabet"].append("a"), DuplicateIdentifier),
    (lambda doc: doc["transitions"].append(["q_a", "b", "q_b"]), DuplicateIdentifier),
    (lambda doc: doc.pop("finals"), MalformedDocument),
    (lambda doc: doc["transitions"].append(["q_a", "b"]), MalformedDocument),
])
def test_parse_errors(mutate, error):
    doc = abcd_doc()
    mutate(doc)
    with pytest.raises(error):
        parse_dfa(json.dumps(doc))


def test_not_json():
    with pytest.raises(MalformedDocument):
        parse_dfa("{not json")


def test_error_codes_are_module_qualified():
    with pytest.raises(MissingTransition) as info:
        Dfa.from_transitions(["s"], ["x"], "s", [], [])
    assert info.value.code == "automaton.MissingTransition"


def test_serialization_round_trip_and_field_order():
    d = abcd_dfa()
    doc = json.loads(d.dumps())
    assert list(doc) == ["states", "alphabet", "initial", "finals", "transitions"]
    assert parse_dfa(d.dumps()) == d


def test_normalize_is_identity_on_abcd():
    assert normalize_dfa(abcd_dfa()) == abcd_dfa()


def test_normalize_redirects_final_exit():
    d = Dfa.from_transitions(["s", "f", "t"], ["a", "b"], "s", ["f"],
                             [("s", "a", "f"), ("s", "b", "t"), ("f", "a", "t"), ("f", "b", "f"),
                              ("t", "a", "t"), ("t", "b", "t")])
    n = normalize_dfa(d)
    f = n.state_index["f"]
    assert n.delta[f] == (f, f)
    assert n.finals == frozenset({f})


def test_normalize_merges_finals_into_lowest():
    d = Dfa.from_transitions(["s", "f1", "f2"], ["a", "b"], "s", ["f2", "f1"],
                             [("s", "a", "f1"), ("s", "b", "f2"), ("f1", "a", "s"),
                              ("f1", "b", "f1"), ("f2", "a", "f2"), ("f2", "b", "s")])
    n = normalize_dfa(d)
    assert n.states == ("s", "f1")
    assert n.delta == ((1, 1), (1, 1))


def _accepts_some_prefix(d, word):
    """Whether some prefix of ``word`` reaches a final state (the reachability reading)."""
    q = d.initial
    if q in d.finals:
        return True
    for c in word:
        q = d.delta[q][d.color_index[c]]
        if q in d.finals:
            return True
    return False


def test_normalize_drops_unreachable_and_keeps_objective():
    # 8 states, states 6 and 7 only point into the rest and are never entered
    rng = random.Random(11)
    alphabet = ("a", "b")
    for _ in range(10000):
        table = [[rng.randrange(6) for _ in alphabet] for _ in range(8)]
        finals = frozenset({rng.randrange(1, 6)})
        d = Dfa(tuple(f"q{i}" for i in range(8)), alphabet, 0, finals, tuple(map(tuple, table)))
        n = normalize_dfa(d)
        if n.size == 6:
            break
    assert len(reachable(d.delta, 0)) == 6
    assert n.size == 6
    for length in range(13):
        for w in itertools.product(alphabet, repeat=length):
            assert _accepts_some_prefix(d, w) == _accepts_some_prefix(n, w)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(1, 3), st.integers(0, 10 ** 6), st.integers(0, 3))
def test_normalize_properties(n, ncol, seed, nfin):
    rng = random.Random(seed)
    alphabet = tuple("abc"[:ncol])
    table = tuple(tuple(rng.randrange(n) for _ in alphabet) for _ in range(n))
    finals = frozenset(rng.sample(range(n), min(nfin, n)))
    d = Dfa(tuple(f"q{i}" for i in range(n)), alphabet, 0, finals, table)
    norm = normalize_dfa(d)
    assert norm.is_normalized()
    assert normalize_dfa(norm) == norm
    for length in range(2 * n + 1 if ncol < 3 else n + 2):
        for w in itertools.product(alphabet, repeat=length):
            assert _accepts_some_prefix(d, w) == _accepts_some_prefix(norm, w)


def test_random_dfa_is_normalized_and_deterministic():
    a = random_dfa(6, "ab", 3)
    assert a.is_normalized()
    assert a == random_dfa(6, "ab", 3)


# ----------------------------------------------------------------- path_witness

def _bfs_oracle(d, src, dst, max_len=8):
    for length in range(max_len + 1):
        for w in itertools.product(d.alphabet, repeat=length):
            if d.run(src, w) == dst:
                return w
    return None


def test_path_witness_abcd():
    d = abcd_dfa()
    ix = d.state_index
    assert path_witness([(d, ix["q_init"], ix["q_ab"])]) == ("a", "b")
    assert _bfs_oracle(d, ix["q_init"], ix["q_ab"]) == ("a", "b")


def test_path_witness_empty_word():
    d = abcd_dfa()
    assert path_witness([(d, 3, 3)]) == ()
    assert path_witness([(d, 3, 3), (d, 0, 0)]) == ()
    assert path_witness([(d, 0, 0)], require_nonempty=True) == ("c",)


def test_path_witness_with_memory():
    d, m = ababa_dfa(), last_letter_memory()
    ma = m.states.index("m_a")
    mb = m.states.index("m_b")
    assert path_witness([(m, ma, ma), (d, d.state_index["q_init"], d.state_index["q_a"])]) == ("a",)
    # every word reaching q_a from q_init ends in a, so the memory cannot sit in m_b
    assert path_witness([(m, mb, mb), (d, d.state_index["q_init"], d.state_index["q_a"])],
                        require_nonempty=True) is None


def test_path_witness_absent():
    d = abcd_dfa()
    ix = d.state_index
    assert path_witness([(d, ix["q_cd"], ix["q_init"])]) is None


def test_path_witness_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        path_witness([(abcd_dfa(), 0, 0), (ababa_dfa(), 0, 0)])


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_path_witness_matches_bfs(seed):
    rng = random.Random(seed)
    d = random_dfa(rng.randint(2, 6), "ab", seed)
    src, dst = rng.randrange(d.size), rng.randrange(d.size)
    w = path_witness([(d, src, dst)], require_nonempty=True)
    expect = next((w2 for n in range(1, 8) for w2 in itertools.product(d.alphabet, repeat=n)
                   if d.run(src, w2) == dst), None)
    assert w == expect
    if w is not None:
        assert d.run(src, w) == dst
