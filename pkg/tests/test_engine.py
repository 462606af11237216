import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shufflecheck.automata import grave, word
from shufflecheck.engine import (
    Computation,
    CounterVector,
    NotAComputation,
    ZERO,
    elementary_automaton,
    elementary_vector_states,
    engine_for,
    parse_transition,
    parse_vector,
    pre_shuffle_member,
    shuffle_member,
    sigma_core,
    validate_in_shuffle,
)
from shufflecheck.oracle import iterated_shuffle_upto
from conftest import mk_dfa, random_dfa


def tset(*texts):
    return frozenset(parse_transition(t) for t in texts)


# --- vectors -----------------------------------------------------------

@given(
    st.dictionaries(st.sampled_from("pqr"), st.integers(0, 4), max_size=3),
    st.dictionaries(st.sampled_from("pqr"), st.integers(0, 4), max_size=3),
)
def test_vector_add_sub_inverse(m1, m2):
    f, g = CounterVector.make(m1), CounterVector.make(m2)
    assert f.add(g).sub(g) == f
    assert f.add(g).norm == f.norm + g.norm
    assert f.add(g).geq(f)


def test_vector_sub_clips_to_none():
    f = CounterVector.make({"q": 1})
    assert f.sub(CounterVector.make({"q": 2})) is None
    assert f.sub(f) == ZERO


def test_parse_vector_roundtrip():
    for text in ["(0)", "(II:1)", "(II:2 III:1)"]:
        assert str(parse_vector(text)) == text


# --- core and shift law ------------------------------------------------

def test_core_two_start(two_start):
    assert sigma_core(two_start) == tset(
        "(0) a (II:1) [start]",
        "(0) b (II:1) [start]",
        "(II:1) c (0) [end]",
    )


def test_core_ring3(ring3):
    core = sigma_core(ring3)
    # every state accepting: each inner step has an end twin
    kinds = {}
    for t in core:
        kinds.setdefault(str(t.letter), set()).add(t.kind)
    assert kinds["b"] == {"inner", "end"}
    assert kinds["c"] == {"inner", "end"}
    assert kinds["a"] >= {"start", "start_end"}


def test_core_sources_are_occupiable(single_abc):
    eng = engine_for(single_abc)
    for t in eng.sigma_core():
        assert set(t.source.support()) <= set(eng.component_states)


def test_shift_law_reconstructs_successors(rng):
    # every transition from an occupiable vector is a shifted core entry,
    # and every non-negative shift of a core entry is a transition
    for _ in range(25):
        P = random_dfa(rng, max_states=4)
        eng = engine_for(P)
        comp = sorted(eng.component_states)
        for _ in range(8):
            counts = {q: rng.randint(0, 2) for q in comp}
            f = CounterVector.make(counts)
            for a in P.alphabet:
                got = eng.successors(f, a)
                expected = set()
                for t in eng.sigma_core():
                    if t.letter != a:
                        continue
                    h = f.sub(t.source)
                    if h is not None:
                        expected.add(t.shift(h))
                assert got == expected


def test_computation_validates_chaining():
    steps = tset("(0) a (II:1) [start]") | tset("(II:1) b (0) [end]")
    start = next(t for t in steps if t.kind == "start")
    end = next(t for t in steps if t.kind == "end")
    c = Computation([start, end])
    assert c.final == ZERO
    assert [str(a) for a in c.label()] == ["a", "b"]
    with pytest.raises(NotAComputation):
        Computation([end])


# --- membership against the oracle -------------------------------------

def test_membership_small_golden(single_ab):
    assert shuffle_member(single_ab, word("ab"))
    assert shuffle_member(single_ab, word("aabb"))
    assert shuffle_member(single_ab, word("abab"))
    assert not shuffle_member(single_ab, word("ba"))
    assert not shuffle_member(single_ab, word("a"))
    assert pre_shuffle_member(single_ab, word("a"))
    assert pre_shuffle_member(single_ab, word("aab"))
    assert not pre_shuffle_member(single_ab, word("b"))


def test_membership_matches_oracle(rng):
    from itertools import product as iproduct

    from shufflecheck.automata import Letter, normalize, EmptyLanguage

    done = 0
    while done < 20:
        P = random_dfa(rng, max_states=4)
        try:
            P = normalize(P)
        except EmptyLanguage:
            continue
        members = set(iterated_shuffle_upto(P, 6))
        pre_members = set(iterated_shuffle_upto(grave(P), 6))
        for n in range(0, 7):
            for chars in iproduct("ab", repeat=n):
                w = tuple(Letter(c) for c in chars)
                assert shuffle_member(P, w) == (w in members)
                assert pre_shuffle_member(P, w) == (w in pre_members)
        done += 1


# --- single-component tracker ------------------------------------------

def test_elementary_automaton_shape(single_ab):
    e = elementary_automaton(single_ab)
    assert e.initial == "open"
    assert "closed" in e.states
    assert elementary_vector_states(single_ab) == frozenset(
        [ZERO, CounterVector.unit("II")]
    )


def test_elementary_matches_core(two_start):
    eng = engine_for(two_start)
    # all core entries are reachable while tracking one component here
    assert eng.core_elementary() == eng.sigma_core()


def test_validate_in_shuffle(two_start):
    good = parse_transition("(II:1) c (0) [end]")
    assert validate_in_shuffle(two_start, good)
    bad = parse_transition("(II:1) c (II:1) [start_end]")
    assert not validate_in_shuffle(two_start, bad)
