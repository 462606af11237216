"""Finite deterministic automata and semiautomata.

Alphabets may consist of plain symbols, indexed symbols (``a@1``), checked
symbols (``^a``), or opaque composite objects such as counter transitions.
Everything downstream (shuffle engines, powerset constructions, track
products) consumes the same two types: Letter and Dfa.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional


class AutomatonError(Exception):
    pass


class ParseError(AutomatonError):
    pass


class NondeterminismError(AutomatonError):
    pass


class EmptyLanguage(AutomatonError):
    pass


class AlphabetMismatch(AutomatonError):
    pass


class UnknownLetter(AutomatonError):
    pass


@dataclass(frozen=True)
class Letter:
    """A single alphabet symbol.

    symbol is normally a string but may be any hashable object (derived
    alphabets use counter transitions as symbols).  index carries the copy
    number of an indexed alphabet; mark distinguishes the disjoint checked
    copy of an alphabet.
    """

    symbol: Any
    index: Optional[int] = None
    mark: Optional[str] = None  # None | "checked"

    def __str__(self) -> str:
        text = str(self.symbol)
        if self.index is not None:
            text = f"{text}@{self.index}"
        if self.mark == "checked":
            text = f"^{text}"
        return text

    def checked(self) -> "Letter":
        return Letter(self.symbol, self.index, "checked")

    def unchecked(self) -> "Letter":
        return Letter(self.symbol, self.index, None)


Word = tuple  # tuple[Letter, ...]


def word(text: str) -> Word:
    """Build a word of plain one-character letters from a string."""
    return tuple(Letter(ch) for ch in text)


def letters(text: str) -> tuple:
    """Parse a space-separated letter list ('a b@2 ^c')."""
    return tuple(parse_letter(tok) for tok in text.split())


def parse_letter(tok: str) -> Letter:
    mark = None
    if tok.startswith("^"):
        mark = "checked"
        tok = tok[1:]
    index = None
    if "@" in tok:
        sym, _, idx = tok.rpartition("@")
        if not idx.isdigit():
            raise ParseError(f"bad letter index in {tok!r}")
        tok, index = sym, int(idx)
    if not tok:
        raise ParseError("empty letter")
    return Letter(tok, index, mark)


def render_word(w: Word) -> str:
    """Human-readable rendering; concatenated when unambiguous."""
    if not w:
        return "ε"
    parts = [str(a) for a in w]
    if all(len(p) == 1 for p in parts):
        return "".join(parts)
    return " ".join(parts)


@dataclass(frozen=True)
class Dfa:
    """Deterministic automaton (finals nonempty) or semiautomaton.

    alphabet keeps declaration order; ties in counterexample searches are
    broken by that order.  delta is a partial function given as a dict keyed
    by (state, letter).
    """

    alphabet: tuple
    states: frozenset
    delta: dict
    initial: str
    finals: frozenset = frozenset()
    kind: str = "dfa"  # "dfa" | "semiautomaton"

    def __post_init__(self):
        if self.initial not in self.states:
            raise AutomatonError(f"initial state {self.initial!r} not declared")
        if not self.finals <= self.states:
            raise AutomatonError("finals outside the state set")
        alpha = set(self.alphabet)
        for (q, a), p in self.delta.items():
            if q not in self.states or p not in self.states:
                raise AutomatonError(f"transition {q}-{a}->{p} uses unknown state")
            if a not in alpha:
                raise AutomatonError(f"transition on undeclared letter {a}")

    @property
    def is_semiautomaton(self) -> bool:
        return self.kind == "semiautomaton"

    def effective_finals(self) -> frozenset:
        return self.states if self.is_semiautomaton else self.finals

    def step(self, q, a):
        return self.delta.get((q, a))

    def run(self, w: Word):
        q = self.initial
        for a in w:
            q = self.delta.get((q, a))
            if q is None:
                return None
        return q


def _dfa_hash(a: Dfa) -> int:
    return hash(
        (a.alphabet, a.states, frozenset(a.delta.items()), a.initial, a.finals, a.kind)
    )


# delta is a dict, so the generated frozen-dataclass hash would fail
Dfa.__hash__ = _dfa_hash


def parse_automaton(text: str) -> Dfa:
    """Parse the line-based automaton interchange format."""
    kind = None
    alphabet: list = []
    states: list = []
    initial = None
    finals: list = []
    delta: dict = {}
    seen_finals_line = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"line {lineno}: expected 'key: value'")
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if key == "kind":
            if value not in ("dfa", "semiautomaton"):
                raise ParseError(f"line {lineno}: unknown kind {value!r}")
            kind = value
        elif key == "alphabet":
            for tok in value.split():
                a = parse_letter(tok)
                if a in alphabet:
                    raise ParseError(f"line {lineno}: duplicate letter {tok}")
                alphabet.append(a)
        elif key == "states":
            states.extend(value.split())
        elif key == "initial":
            initial = value
        elif key == "finals":
            seen_finals_line = True
            finals.extend(value.split())
        elif key == "trans":
            parts = value.split()
            if len(parts) != 3:
                raise ParseError(f"line {lineno}: trans needs 'q a p'")
            q, tok, p = parts
            a = parse_letter(tok)
            if (q, a) in delta:
                raise NondeterminismError(
                    f"line {lineno}: second transition from ({q}, {tok})"
                )
            delta[(q, a)] = p
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
    if kind is None:
        raise ParseError("missing 'kind:' line")
    if initial is None:
        raise ParseError("missing 'initial:' line")
    if kind == "semiautomaton" and seen_finals_line:
        raise ParseError("semiautomaton must not declare finals")
    try:
        return Dfa(
            alphabet=tuple(alphabet),
            states=frozenset(states),
            delta=delta,
            initial=initial,
            finals=frozenset(finals),
            kind=kind,
        )
    except AutomatonError as exc:
        raise ParseError(str(exc)) from exc


def serialize_automaton(a: Dfa) -> str:
    lines = [f"kind: {a.kind}"]
    lines.append("alphabet: " + " ".join(str(x) for x in a.alphabet))
    lines.append("states: " + " ".join(sorted(a.states)))
    lines.append(f"initial: {a.initial}")
    if not a.is_semiautomaton:
        lines.append("finals: " + " ".join(sorted(a.finals)))
    for (q, x), p in sorted(a.delta.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        lines.append(f"trans: {q} {x} {p}")
    return "\n".join(lines) + "\n"


def _reachable(a: Dfa) -> set:
    seen = {a.initial}
    queue = deque([a.initial])
    while queue:
        q = queue.popleft()
        for x in a.alphabet:
            p = a.delta.get((q, x))
            if p is not None and p not in seen:
                seen.add(p)
                queue.append(p)
    return seen


def _coreachable(a: Dfa, targets: Iterable) -> set:
    rev: dict = {}
    for (q, _x), p in a.delta.items():
        rev.setdefault(p, set()).add(q)
    seen = set(targets)
    queue = deque(seen)
    while queue:
        p = queue.popleft()
        for q in rev.get(p, ()):
            if q not in seen:
                seen.add(q)
                queue.append(q)
    return seen


def normalize(a: Dfa) -> Dfa:
    """Trim to states that lie on some accepting path.

    For semiautomata only forward reachability applies.  Raises
    EmptyLanguage when nothing survives.
    """
    keep = _reachable(a)
    if not a.is_semiautomaton:
        keep &= _coreachable(a, a.finals & keep)
    if a.initial not in keep:
        raise EmptyLanguage("automaton recognizes the empty language")
    delta = {
        (q, x): p for (q, x), p in a.delta.items() if q in keep and p in keep
    }
    return Dfa(
        alphabet=a.alphabet,
        states=frozenset(keep),
        delta=delta,
        initial=a.initial,
        finals=frozenset(a.finals & keep),
        kind=a.kind,
    )


_SINK = "_sink"


def complete(a: Dfa) -> Dfa:
    """Make delta total, adding one fresh non-final sink if needed."""
    missing = [
        (q, x) for q in a.states for x in a.alphabet if (q, x) not in a.delta
    ]
    if not missing:
        return a
    sink = _SINK
    while sink in a.states:
        sink += "_"
    delta = dict(a.delta)
    for q, x in missing:
        delta[(q, x)] = sink
    for x in a.alphabet:
        delta[(sink, x)] = sink
    return Dfa(
        alphabet=a.alphabet,
        states=a.states | {sink},
        delta=delta,
        initial=a.initial,
        finals=a.finals,
        kind=a.kind,
    )


def grave(a: Dfa) -> Dfa:
    """The prefix recognizer: same automaton with every state accepting."""
    return Dfa(
        alphabet=a.alphabet,
        states=a.states,
        delta=dict(a.delta),
        initial=a.initial,
        finals=a.states,
        kind="dfa",
    )


def _check_same_alphabet(a: Dfa, b: Dfa):
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatch(
            f"alphabets differ: {sorted(map(str, a.alphabet))} vs "
            f"{sorted(map(str, b.alphabet))}"
        )


def product(a: Dfa, b: Dfa) -> Dfa:
    """Intersection product on the reachable pair states."""
    _check_same_alphabet(a, b)
    afin = a.effective_finals()
    bfin = b.effective_finals()

    def name(p, q):
        return f"({p},{q})"

    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    delta = {}
    while queue:
        p, q = queue.popleft()
        for x in a.alphabet:
            p2 = a.delta.get((p, x))
            q2 = b.delta.get((q, x))
            if p2 is None or q2 is None:
                continue
            delta[(name(p, q), x)] = name(p2, q2)
            if (p2, q2) not in seen:
                seen.add((p2, q2))
                queue.append((p2, q2))
    states = frozenset(name(p, q) for p, q in seen)
    finals = frozenset(name(p, q) for p, q in seen if p in afin and q in bfin)
    kind = "semiautomaton" if (a.is_semiautomaton and b.is_semiautomaton) else "dfa"
    return Dfa(
        alphabet=a.alphabet,
        states=states,
        delta=delta,
        initial=name(*start),
        finals=frozenset() if kind == "semiautomaton" else finals,
        kind=kind,
    )


def includes(sup: Dfa, sub: Dfa):
    """L(sub) <= L(sup)?  Returns True or a shortest witness in L(sub)\\L(sup).

    Ties among shortest witnesses are broken by the declaration order of
    sup's alphabet (BFS explores letters in that order).
    """
    _check_same_alphabet(sup, sub)
    sup_c = complete(sup)
    sub_c = complete(sub)
    supfin = sup_c.effective_finals()
    subfin = sub_c.effective_finals()
    start = (sup_c.initial, sub_c.initial)
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (p, q), w = queue.popleft()
        if q in subfin and p not in supfin:
            return w
        for x in sup.alphabet:
            nxt = (sup_c.delta[(p, x)], sub_c.delta[(q, x)])
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, w + (x,)))
    return True


def equivalent(a: Dfa, b: Dfa) -> bool:
    return includes(a, b) is True and includes(b, a) is True


def is_prefix_closed(a: Dfa) -> bool:
    """True iff the recognized language contains all its prefixes."""
    if a.is_semiautomaton:
        return True
    try:
        trimmed = normalize(a)
    except EmptyLanguage:
        return True  # the empty language is vacuously prefix closed
    return trimmed.finals == trimmed.states


def accepts(a: Dfa, w: Word) -> bool:
    alpha = set(a.alphabet)
    for x in w:
        if x not in alpha:
            raise UnknownLetter(f"letter {x} not in the alphabet")
    q = a.run(w)
    return q is not None and q in a.effective_finals()


def language_upto(a: Dfa, n: int):
    """All accepted words of length <= n, in length-then-declaration order."""
    out = []
    frontier = [((), a.initial)]
    finals = a.effective_finals()
    if a.initial in finals:
        out.append(())
    for _ in range(n):
        nxt = []
        for w, q in frontier:
            for x in a.alphabet:
                p = a.delta.get((q, x))
                if p is None:
                    continue
                w2 = w + (x,)
                nxt.append((w2, p))
                if p in finals:
                    out.append(w2)
        frontier = nxt
        if not frontier:
            break
    return out
