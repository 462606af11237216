import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shufflecheck.automata import (
    EmptyLanguage,
    Letter,
    accepts,
    complete,
    equivalent,
    grave,
    includes,
    is_prefix_closed,
    language_upto,
    normalize,
    parse_automaton,
    parse_letter,
    product,
    serialize_automaton,
    word,
)
from conftest import mk_dfa


def test_parse_serialize_roundtrip(single_ab):
    text = serialize_automaton(single_ab)
    again = parse_automaton(text)
    assert equivalent(single_ab, again)
    assert again.kind == "dfa"


def test_parse_comments_and_semiautomaton():
    text = """
# constraint
kind: semiautomaton
alphabet: a b
states: 1 2
initial: 1
trans: 1 a 2  # open
trans: 2 b 1
"""
    a = parse_automaton(text)
    assert a.is_semiautomaton
    assert a.effective_finals() == a.states


def test_parse_letter_forms():
    assert parse_letter("a") == Letter("a")
    assert parse_letter("a@2") == Letter("a", 2)
    assert parse_letter("^c") == Letter("c", None, "checked")
    assert str(parse_letter("^b@3")) == "^b@3"


def test_normalize_trims_dead_states():
    a = mk_dfa("ab", [("1", "a", "2"), ("1", "b", "3")], "1", ["2"])
    n = normalize(a)
    assert "3" not in n.states
    assert accepts(n, word("a"))


def test_normalize_empty_language_raises():
    a = mk_dfa("ab", [], "1", ["2"])
    with pytest.raises(EmptyLanguage):
        normalize(a)


def test_includes_shortest_witness_by_declaration_order(ring3, ring9):
    assert includes(ring9, ring3) is True
    w = includes(ring3, ring9)
    assert w is not True
    # shortest word in the big ring missing from the small one
    assert w == word("aba")


def test_prefix_closed(alt, single_ab):
    assert is_prefix_closed(alt)
    assert not is_prefix_closed(single_ab)
    assert is_prefix_closed(grave(single_ab))


def test_product_intersects(ring3, ring9):
    p = product(ring3, ring9)
    assert equivalent(p, ring3)


def test_complete_adds_sink(alt):
    c = complete(alt)
    assert all((q, a) in c.delta for q in c.states for a in c.alphabet)
    assert equivalent(normalize(c), alt)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from("ab"), max_size=6))
def test_accepts_matches_enumeration(chars):
    a = mk_dfa("ab", [("1", "a", "2"), ("2", "b", "1")], "1", ["1", "2"])
    w = word("".join(chars))
    assert accepts(a, w) == (w in set(language_upto(a, 6)))


def test_language_upto_order(ring3):
    ws = language_upto(ring3, 3)
    lengths = [len(w) for w in ws]
    assert lengths == sorted(lengths)
    assert ws[0] == ()
