import pytest
from hypothesis import given
from hypothesis import strategies as st

from shufflecheck.automata import equivalent, language_upto
from shufflecheck.engine import CounterVector, ZERO
from shufflecheck.segments import (
    InitialSegment,
    NotCompatible,
    check_phi_gamma_omega,
    is_initial_segment,
    l_of_segment,
    partial_powerset,
)
from conftest import mk_dfa


def vec(**counts):
    return CounterVector.make(counts)


def test_is_initial_segment():
    assert is_initial_segment({ZERO})
    assert is_initial_segment({ZERO, vec(II=1)})
    assert not is_initial_segment({vec(II=1)})  # missing the zero vector
    assert not is_initial_segment(set())


@given(st.integers(0, 4))
def test_norm_balls_are_segments(n):
    seg = InitialSegment.norm_ball(n)
    assert ZERO in seg
    f = vec(II=n)
    assert f in seg
    assert vec(II=n + 1) not in seg


def test_explicit_segment_rejects_non_closed():
    with pytest.raises(ValueError):
        InitialSegment.explicit([vec(II=2)])


def test_powerset_golden(single_abc):
    seg = InitialSegment.explicit(
        [ZERO, vec(II=1), vec(III=1), vec(II=1, III=1)]
    )
    res = partial_powerset(single_abc, seg)
    assert res.compatible
    assert len(res.automaton.states) == 4
    d = {(q, str(a)): p for (q, a), p in res.automaton.delta.items()}
    assert d[("{(0)}", "a")] == "{(II:1)}"
    assert d[("{(II:1)}", "b")] == "{(III:1)}"
    assert d[("{(III:1)}", "c")] == "{(0)}"
    assert d[("{(III:1)}", "a")] == "{(II:1 III:1)}"
    assert d[("{(II:1 III:1)}", "c")] == "{(II:1)}"
    assert len(d) == 5


def test_powerset_incompatible_straddle(single_ab):
    # one open component allowed but the straddling start on 'a' breaks it
    seg = InitialSegment.explicit([ZERO, vec(II=1)])
    res = partial_powerset(single_ab, seg)
    assert res.compatible  # {ab}: the second start leaves the ball entirely
    # a segment missing an intermediate vector is rejected upfront
    with pytest.raises(ValueError):
        InitialSegment.explicit([ZERO, vec(II=2)])


def test_chain_languages(single_ab):
    # norm ball n certifies the n-bounded matching language: a opens, b
    # closes, never more than n open
    for n in range(0, 6):
        res = partial_powerset(single_ab, InitialSegment.norm_ball(n))
        assert res.compatible
        assert len(res.automaton.states) == n + 1
        chain = mk_dfa(
            "ab",
            [(str(i), "a", str(i + 1)) for i in range(n)]
            + [(str(i + 1), "b", str(i)) for i in range(n)],
            "0",
            [str(i) for i in range(n + 1)],
        )
        assert equivalent(l_of_segment(single_ab, InitialSegment.norm_ball(n)), chain)


def test_zero_ball_single_letter_component():
    P = mk_dfa("a", [("I", "a", "II")], "I", ["II"])
    L = l_of_segment(P, InitialSegment.norm_ball(0))
    got = {len(w) for w in language_upto(L, 4)}
    assert got == {0, 1, 2, 3, 4}  # the component letter freely repeated


def test_roles_single_ab(single_ab):
    roles = check_phi_gamma_omega(single_ab)
    assert roles == {
        "phi": frozenset(single_ab.alphabet[:1]),
        "gamma": frozenset(),
        "omega": frozenset(single_ab.alphabet[1:]),
    }


def test_roles_single_abc(single_abc):
    roles = check_phi_gamma_omega(single_abc)
    names = {k: {str(a) for a in v} for k, v in roles.items()}
    assert names == {"phi": {"a"}, "gamma": {"b"}, "omega": {"c"}}


def test_roles_conflict_returns_none(alt):
    # 'ab' and 'ba' both accepted: 'a' must be first and last at once
    P = mk_dfa(
        "ab",
        [("1", "a", "2"), ("2", "b", "4"), ("1", "b", "3"), ("3", "a", "4")],
        "1",
        ["4"],
    )
    assert check_phi_gamma_omega(P) is None
    assert check_phi_gamma_omega(alt) is None


def test_l_of_segment_incompatible_raises(ring3):
    # 'a' both opens a component and completes one: the successor set of
    # {0} straddles the border of the zero ball
    seg = InitialSegment.norm_ball(0)
    res = partial_powerset(ring3, seg)
    assert not res.compatible
    assert str(res.witness[1]) == "a"
    with pytest.raises(NotCompatible):
        l_of_segment(ring3, seg)
