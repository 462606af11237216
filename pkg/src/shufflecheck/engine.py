"""Counter-vector semiautomaton for iterated shuffles of a component language.

States are finite-support counter vectors over the component automaton's
states; each counter says how many interleaved components currently sit at
that state.  The full transition relation is infinite but determined by a
finite core plus a uniform shift law, so membership queries and all
downstream constructions only ever touch finitely many vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterable, Optional

from .automata import Dfa, Letter, ParseError, Word, parse_letter


START = "start"
INNER = "inner"
END = "end"
START_END = "start_end"
KINDS = (START, INNER, END, START_END)


@dataclass(frozen=True)
class CounterVector:
    """Sparse vector of non-negative counts keyed by component-automaton state."""

    entries: tuple = ()  # sorted tuple of (state, positive count)

    @staticmethod
    def make(mapping) -> "CounterVector":
        items = tuple(sorted((q, n) for q, n in dict(mapping).items() if n))
        for _, n in items:
            if n < 0:
                raise ValueError("negative count")
        return CounterVector(items)

    @staticmethod
    def unit(q) -> "CounterVector":
        return CounterVector(((q, 1),))

    def get(self, q) -> int:
        for state, n in self.entries:
            if state == q:
                return n
        return 0

    def support(self) -> tuple:
        return tuple(q for q, _ in self.entries)

    @property
    def norm(self) -> int:
        return sum(n for _, n in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def add(self, other: "CounterVector") -> "CounterVector":
        counts = dict(self.entries)
        for q, n in other.entries:
            counts[q] = counts.get(q, 0) + n
        return CounterVector.make(counts)

    def sub(self, other: "CounterVector") -> Optional["CounterVector"]:
        """Componentwise difference, or None when it would go negative."""
        counts = dict(self.entries)
        for q, n in other.entries:
            m = counts.get(q, 0) - n
            if m < 0:
                return None
            counts[q] = m
        return CounterVector.make(counts)

    def geq(self, other: "CounterVector") -> bool:
        return self.sub(other) is not None

    def leq(self, other: "CounterVector") -> bool:
        return other.geq(self)

    def decrements(self) -> Iterable["CounterVector"]:
        for q, _ in self.entries:
            yield self.sub(CounterVector.unit(q))

    def __str__(self) -> str:
        if not self.entries:
            return "(0)"
        return "(" + " ".join(f"{q}:{n}" for q, n in self.entries) + ")"


ZERO = CounterVector()


def parse_vector(text: str) -> CounterVector:
    """Parse '(0)', '(II:1)', '(II:1 III:2)' or the bare forms without parens."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1].strip()
    if body in ("0", ""):
        return ZERO
    counts: dict = {}
    for tok in body.split():
        if ":" not in tok:
            raise ParseError(f"bad vector entry {tok!r}")
        q, _, n = tok.rpartition(":")
        if not n.isdigit():
            raise ParseError(f"bad count in {tok!r}")
        counts[q] = counts.get(q, 0) + int(n)
    return CounterVector.make(counts)


@dataclass(frozen=True)
class ShuffleTransition:
    source: CounterVector
    letter: Letter
    target: CounterVector
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")

    def triple(self) -> tuple:
        return (self.source, self.letter, self.target)

    def shift(self, h: CounterVector) -> "ShuffleTransition":
        return ShuffleTransition(self.source.add(h), self.letter, self.target.add(h), self.kind)

    def checked(self) -> "ShuffleTransition":
        return ShuffleTransition(self.source, self.letter.checked(), self.target, self.kind)

    def unchecked(self) -> "ShuffleTransition":
        return ShuffleTransition(self.source, self.letter.unchecked(), self.target, self.kind)

    def __str__(self) -> str:
        return f"{self.source} {self.letter} {self.target}"

    def tagged_str(self) -> str:
        return f"{self.source} {self.letter} {self.target} [{self.kind}]"


def parse_transition(text: str) -> ShuffleTransition:
    """Parse '(f) a (g)' with an optional trailing '[kind]' tag."""
    body = text.strip()
    kind = None
    if body.endswith("]") and "[" in body:
        body, _, tag = body.rpartition("[")
        kind = tag[:-1].strip()
        body = body.strip()
    if body.count("(") != 2 or body.count(")") != 2:
        raise ParseError(f"bad transition {text!r}")
    open1 = body.index("(")
    close1 = body.index(")")
    open2 = body.index("(", close1)
    close2 = body.rindex(")")
    src = parse_vector(body[open1 : close1 + 1])
    tgt = parse_vector(body[open2 : close2 + 1])
    letter = parse_letter(body[close1 + 1 : open2].strip())
    if kind is None:
        kind = infer_kind(src, letter, tgt)
    return ShuffleTransition(src, letter, tgt, kind)


def infer_kind(src: CounterVector, letter: Letter, tgt: CounterVector) -> str:
    # untagged text can only distinguish kinds by the norm change; a
    # norm-preserving step with equal endpoints is read as start_end
    d = tgt.norm - src.norm
    if d == 1:
        return START
    if d == -1:
        return END
    if src == tgt:
        return START_END
    return INNER


class Computation(tuple):
    """A path in the counter semiautomaton starting at the zero vector."""

    def __new__(cls, steps=()):
        steps = tuple(steps)
        prev = ZERO
        for step in steps:
            if step.source != prev:
                raise NotAComputation(
                    f"step {step} does not continue from {prev}"
                )
            prev = step.target
        return super().__new__(cls, steps)

    @property
    def final(self) -> CounterVector:
        return self[-1].target if self else ZERO

    def label(self) -> Word:
        return tuple(step.letter for step in self)

    def prefixes(self):
        for i in range(len(self) + 1):
            yield Computation(self[:i])

    def __str__(self) -> str:
        if not self:
            return "ε"
        return " ; ".join(str(s) for s in self)


class NotAComputation(Exception):
    pass


class ShuffleEngine:
    """Per-component-automaton precomputation plus transition queries."""

    def __init__(self, P: Dfa):
        self.P = P
        # states able to continue a component: at least one outgoing edge
        self.non_dead = frozenset(q for (q, _a), _p in P.delta.items())
        # states a component can actually occupy: entered by reading at
        # least one letter and still able to continue
        inner_reach = set()
        frontier = {P.initial}
        seen = {P.initial}
        while frontier:
            nxt = set()
            for q in frontier:
                for a in P.alphabet:
                    p = P.delta.get((q, a))
                    if p is None:
                        continue
                    inner_reach.add(p)
                    if p not in seen:
                        seen.add(p)
                        nxt.add(p)
            frontier = nxt
        self.component_states = frozenset(inner_reach & self.non_dead)
        self._core = None

    def successors(self, f: CounterVector, a: Letter) -> frozenset:
        """All transitions (f, a, g), tagged by kind."""
        if a not in set(self.P.alphabet):
            from .automata import UnknownLetter

            raise UnknownLetter(f"letter {a} not in the alphabet")
        P = self.P
        out = set()
        p0 = P.delta.get((P.initial, a))
        if p0 is not None:
            if p0 in self.non_dead:
                out.add(ShuffleTransition(f, a, f.add(CounterVector.unit(p0)), START))
            if p0 in P.effective_finals():
                out.add(ShuffleTransition(f, a, f, START_END))
        for q, _n in f.entries:
            p = P.delta.get((q, a))
            if p is None:
                continue
            base = f.sub(CounterVector.unit(q))
            if p in self.non_dead:
                out.add(ShuffleTransition(f, a, base.add(CounterVector.unit(p)), INNER))
            if p in P.effective_finals():
                out.add(ShuffleTransition(f, a, base, END))
        return frozenset(out)

    def all_successors(self, f: CounterVector) -> frozenset:
        out = set()
        for a in self.P.alphabet:
            out |= self.successors(f, a)
        return frozenset(out)

    def sigma_core(self) -> frozenset:
        """The finite base set: every transition is a non-negative shift of it.

        Sources are restricted to vectors a running interleaving can occupy,
        so inner and end entries exist only for states that are entered by a
        nonempty word and can still continue.
        """
        if self._core is not None:
            return self._core
        P = self.P
        out = set()
        finals = P.effective_finals()
        for a in P.alphabet:
            p0 = P.delta.get((P.initial, a))
            if p0 is not None:
                if p0 in self.non_dead:
                    out.add(ShuffleTransition(ZERO, a, CounterVector.unit(p0), START))
                if p0 in finals:
                    out.add(ShuffleTransition(ZERO, a, ZERO, START_END))
            for q in self.component_states:
                p = P.delta.get((q, a))
                if p is None:
                    continue
                if p in self.non_dead:
                    out.add(
                        ShuffleTransition(
                            CounterVector.unit(q), a, CounterVector.unit(p), INNER
                        )
                    )
                if p in finals:
                    out.add(ShuffleTransition(CounterVector.unit(q), a, ZERO, END))
        self._core = frozenset(out)
        return self._core

    def core_elementary(self) -> frozenset:
        """Core transitions reachable when tracking a single component."""
        core = self.sigma_core()
        reach = {ZERO}
        changed = True
        while changed:
            changed = False
            for t in core:
                if t.source in reach and t.target not in reach:
                    reach.add(t.target)
                    changed = True
        return frozenset(t for t in core if t.source in reach)

    def reachable_vectors(self, max_norm: int) -> frozenset:
        """Vectors reachable from 0 without exceeding the given norm."""
        seen = {ZERO}
        frontier = [ZERO]
        while frontier:
            f = frontier.pop()
            for t in self.all_successors(f):
                g = t.target
                if g.norm <= max_norm and g not in seen:
                    seen.add(g)
                    frontier.append(g)
        return frozenset(seen)

    def member_final_vectors(self, w: Word) -> frozenset:
        """All vectors reachable from 0 along paths labeled w."""
        frontier = {ZERO}
        for a in w:
            nxt = set()
            for f in frontier:
                for t in self.successors(f, a):
                    nxt.add(t.target)
            frontier = nxt
            if not frontier:
                break
        return frozenset(frontier)


@lru_cache(maxsize=None)
def _engine(P: Dfa) -> ShuffleEngine:
    return ShuffleEngine(P)


def engine_for(P: Dfa) -> ShuffleEngine:
    return _engine(P)


def successors(P: Dfa, f: CounterVector, a: Letter) -> frozenset:
    return engine_for(P).successors(f, a)


def sigma_core(P: Dfa) -> frozenset:
    return engine_for(P).sigma_core()


def pre_shuffle_member(P: Dfa, w: Word) -> bool:
    """Is w a label of some interleaving of component prefixes?"""
    return bool(engine_for(P).member_final_vectors(w))


def shuffle_member(P: Dfa, w: Word) -> bool:
    """Is w an interleaving of complete component words?"""
    return ZERO in engine_for(P).member_final_vectors(w)


ELEM_INITIAL = "open"
ELEM_CLOSED = "closed"


def elementary_automaton(P: Dfa) -> Dfa:
    """Semiautomaton tracking one single component from 0 back to 0.

    Letters are the core transitions; state names are the vector strings,
    with a separate closed state so a finished component cannot restart.
    """
    eng = engine_for(P)
    transitions = eng.core_elementary()
    states = {ELEM_INITIAL, ELEM_CLOSED}
    delta = {}
    alphabet = []

    def state_name(vec: CounterVector, kind_target: bool) -> str:
        if vec.is_zero():
            return ELEM_CLOSED if kind_target else ELEM_INITIAL
        return str(vec)

    for t in sorted(transitions, key=lambda t: (str(t), t.kind)):
        a = Letter(t)
        alphabet.append(a)
        src = ELEM_INITIAL if t.source.is_zero() else str(t.source)
        if t.kind in (END, START_END):
            tgt = ELEM_CLOSED
        else:
            tgt = str(t.target)
        states.add(src)
        states.add(tgt)
        delta[(src, a)] = tgt
    return Dfa(
        alphabet=tuple(alphabet),
        states=frozenset(states),
        delta=delta,
        initial=ELEM_INITIAL,
        finals=frozenset(),
        kind="semiautomaton",
    )


def elementary_vector_states(P: Dfa) -> frozenset:
    """All counter vectors a single tracked component passes through."""
    vectors = {ZERO}
    for t in engine_for(P).core_elementary():
        vectors.add(t.source)
        vectors.add(t.target)
    return frozenset(vectors)


def is_elementary_step(P: Dfa, prev: CounterVector, t: ShuffleTransition) -> bool:
    """May a single tracked component, currently at `prev`, take step t?"""
    if t.source != prev:
        return False
    core = engine_for(P).core_elementary()
    if prev.is_zero():
        return t in core and t.kind in (START, START_END)
    return t in core and t.kind in (INNER, END)


def validate_in_shuffle(P: Dfa, t: ShuffleTransition) -> bool:
    """Exact membership of a tagged transition in the full transition set."""
    return t in engine_for(P).successors(t.source, t.letter)
