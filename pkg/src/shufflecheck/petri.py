"""Place/transition nets, coverability analysis, and the two net
simulations driving the finiteness and counterexample decisions.

The first net mirrors the product of the counter semiautomaton with a
finite tracker and decides whether the relevant transition alphabet is
finite.  The second net runs the three-track deletion system with
unbounded counters; its reachability questions answer the closure decision
where the fragment-based route is unavailable.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .automata import Dfa, Letter, complete
from .engine import (
    CounterVector,
    END,
    INNER,
    START,
    START_END,
    ShuffleTransition,
    ZERO,
    elementary_vector_states,
    engine_for,
)

DEFAULT_KM_NODE_CAP = 200_000
DEFAULT_FORWARD_CAP = 500_000

OMEGA = float("inf")


@dataclass(frozen=True)
class PetriNet:
    places: frozenset
    pre: dict  # transition id -> CounterVector over places
    post: dict
    meta: dict  # transition id -> decoding info
    order: tuple  # deterministic transition order

    def reversed(self) -> "PetriNet":
        return PetriNet(
            self.places,
            dict(self.post),
            dict(self.pre),
            self.meta,
            self.order,
        )

    def consumer_index(self) -> dict:
        """Map each place to the transitions keyed on it.

        Every transition with a nonempty precondition is keyed on exactly
        one of its input places (the least-contended one), so iterating
        the lists of the currently marked places visits every enabled
        transition exactly once.  Transitions with empty preconditions are
        listed under the empty key and must always be tried.
        """
        cached = getattr(self, "_consumer_index", None)
        if cached is not None:
            return cached
        load = {}
        for t in self.order:
            for p, _ in self.pre[t].entries:
                load[p] = load.get(p, 0) + 1
        index: dict = {"": []}
        for t in self.order:
            entries = self.pre[t].entries
            if not entries:
                index[""].append(t)
                continue
            key = min((p for p, _ in entries), key=lambda p: (load[p], p))
            index.setdefault(key, []).append(t)
        index = {p: tuple(ts) for p, ts in index.items()}
        object.__setattr__(self, "_consumer_index", index)
        return index

    def candidates(self, marked) -> list:
        """Deterministic list of transitions possibly enabled at a marking
        with the given set of marked places."""
        index = self.consumer_index()
        out = list(index[""])
        for p in marked:
            out.extend(index.get(p, ()))
        out.sort()
        return out

    def edges(self) -> frozenset:
        out = set()
        for t in self.order:
            for p, _ in self.pre[t].entries:
                out.add((p, t))
            for p, _ in self.post[t].entries:
                out.add((t, p))
        return frozenset(out)


def enabled_step(net: PetriNet, M: CounterVector, t) -> Optional[CounterVector]:
    left = M.sub(net.pre[t])
    if left is None:
        return None
    return left.add(net.post[t])


def _omega_sub(m: dict, v: CounterVector) -> Optional[dict]:
    out = dict(m)
    for p, n in v.entries:
        have = out.get(p, 0)
        if have is OMEGA or have == OMEGA:
            continue
        if have < n:
            return None
        out[p] = have - n
    return out


def _omega_add(m: dict, v: CounterVector) -> dict:
    out = dict(m)
    for p, n in v.entries:
        have = out.get(p, 0)
        out[p] = have if have == OMEGA else have + n
    return out


def _freeze(m: dict) -> tuple:
    return tuple(sorted((p, n) for p, n in m.items() if n))


def _covers(m: dict, target: CounterVector) -> bool:
    return all(m.get(p, 0) >= n for p, n in target.entries)


@dataclass
class KMNode:
    marking: dict
    parent: Optional["KMNode"]
    via: Optional[str]
    accelerated: bool = False


@dataclass
class KMResult:
    bounded: bool
    nodes: list
    pump: Optional[tuple]  # (prefix transition ids, cycle transition ids)
    capped: bool = False

    def markings(self):
        return [n.marking for n in self.nodes]

    def covers(self, target: CounterVector) -> bool:
        return any(_covers(n.marking, target) for n in self.nodes)


def karp_miller(
    net: PetriNet, m0: CounterVector, node_cap: int = DEFAULT_KM_NODE_CAP
) -> KMResult:
    """Coverability tree with acceleration on strictly dominated ancestors.

    Deterministic: children expand in the net's transition order; nodes
    whose marking repeats an already-processed one become leaves.
    """
    root = KMNode(dict(m0.entries), None, None)
    nodes = [root]
    processed = {_freeze(root.marking)}
    queue = deque([root])
    pump = None
    unbounded = False
    while queue:
        node = queue.popleft()
        marked = [p for p, n in node.marking.items() if n]
        for t in net.candidates(marked):
            m = _omega_sub(node.marking, net.pre[t])
            if m is None:
                continue
            m = _omega_add(m, net.post[t])
            child = KMNode(m, node, t)
            # acceleration against strictly dominated ancestors
            anc = node
            accelerated_here = False
            while anc is not None:
                am = anc.marking
                if all(m.get(p, 0) >= n for p, n in am.items()) and any(
                    m.get(p, 0) > n for p, n in am.items() if n != OMEGA
                ) and all(m.get(p, 0) >= am.get(p, 0) for p in m):
                    grew = [
                        p
                        for p in m
                        if m.get(p, 0) > am.get(p, 0) and am.get(p, 0) != OMEGA
                    ]
                    if grew:
                        if pump is None and not _has_omega(node.marking):
                            pump = _extract_pump(child, anc)
                        for p in grew:
                            m[p] = OMEGA
                        accelerated_here = True
                        unbounded = True
                anc = anc.parent
            child.marking = m
            child.accelerated = accelerated_here
            key = _freeze(m)
            if key in processed:
                continue
            processed.add(key)
            nodes.append(child)
            if len(nodes) > node_cap:
                return KMResult(False, nodes, pump, capped=True)
            queue.append(child)
    return KMResult(not unbounded, nodes, pump)


def _has_omega(m: dict) -> bool:
    return any(n == OMEGA for n in m.values())


def _path_to_root(node: KMNode) -> list:
    path = []
    while node.parent is not None:
        path.append(node.via)
        node = node.parent
    path.reverse()
    return path


def _extract_pump(child: KMNode, ancestor: KMNode) -> tuple:
    full = _path_to_root(child)
    prefix = _path_to_root(ancestor)
    return (tuple(prefix), tuple(full[len(prefix) :]))


def replay_pump(net: PetriNet, m0: CounterVector, pump: tuple) -> bool:
    """Fire prefix then cycle concretely; the cycle must strictly grow."""
    prefix, cycle = pump
    m = m0
    for t in prefix:
        m = enabled_step(net, m, t)
        if m is None:
            return False
    base = m
    for t in cycle:
        m = enabled_step(net, m, t)
        if m is None:
            return False
    return m.geq(base) and m != base


def reachable_markings(
    net: PetriNet,
    m0: CounterVector,
    cap: int = DEFAULT_FORWARD_CAP,
    stop_at=(),
) -> tuple:
    """(markings-with-parents, exhausted): BFS with parent pointers.

    Stops early when any marking in stop_at is reached; exhausted is then
    False unless the frontier also ran dry.
    """
    stop_at = frozenset(stop_at)
    seen = {m0: (None, None)}
    queue = deque([m0])
    exhausted = True
    if m0 in stop_at:
        return seen, False
    while queue:
        m = queue.popleft()
        for t in net.candidates(m.support()):
            m2 = enabled_step(net, m, t)
            if m2 is None or m2 in seen:
                continue
            seen[m2] = (m, t)
            if m2 in stop_at:
                return seen, False
            if len(seen) > cap:
                exhausted = False
                queue.clear()
                break
            queue.append(m2)
        else:
            continue
        break
    return seen, exhausted


def firing_path(parents: dict, m: CounterVector) -> list:
    path = []
    while parents[m][0] is not None:
        prev, t = parents[m]
        path.append(t)
        m = prev
    path.reverse()
    return path


# ---------------------------------------------------------------------------
# product-tracking net

def _pp(q) -> str:
    return f"P::{q}"


def _vp(q) -> str:
    return f"V::{q}"


def build_npv(P: Dfa, V: Dfa) -> tuple:
    """Net simulating the product of the counter semiautomaton with V.

    Returns (net, iota) where iota maps a product state (vector, V-state)
    to its marking.
    """
    eng = engine_for(P)
    places = {_pp(q) for q in P.states} | {_vp(r) for r in V.states}
    pre, post, meta = {}, {}, {}
    for t in sorted(eng.sigma_core(), key=lambda t: (str(t), t.kind)):
        for r in sorted(V.states):
            s = V.delta.get((r, t.letter))
            if s is None:
                continue
            tid = f"{t.kind}|{t}|{r}"
            if t.kind == START:
                (p,) = t.target.support()
                pre[tid] = CounterVector.make({_vp(r): 1})
                post[tid] = CounterVector.make({_pp(p): 1, _vp(s): 1})
            elif t.kind == INNER:
                (q,) = t.source.support()
                (p,) = t.target.support()
                pre[tid] = CounterVector.make({_pp(q): 1, _vp(r): 1})
                post[tid] = CounterVector.make({_pp(p): 1, _vp(s): 1})
            elif t.kind == END:
                (q,) = t.source.support()
                pre[tid] = CounterVector.make({_pp(q): 1, _vp(r): 1})
                post[tid] = CounterVector.make({_vp(s): 1})
            else:
                pre[tid] = CounterVector.make({_vp(r): 1})
                post[tid] = CounterVector.make({_vp(s): 1})
            meta[tid] = {"core": t, "vfrom": r, "vto": s}
    net = PetriNet(
        frozenset(places), pre, post, meta, tuple(sorted(pre))
    )

    def iota(state) -> CounterVector:
        f, r = state
        counts = {_pp(q): n for q, n in f.entries}
        counts[_vp(r)] = 1
        return CounterVector.make(counts)

    return net, iota


def build_product(P: Dfa, V: Dfa, cap: int = DEFAULT_FORWARD_CAP) -> tuple:
    """(states, edges, exhausted): BFS of the vector/V-state product."""
    eng = engine_for(P)
    start = (ZERO, V.initial)
    seen = {start}
    queue = deque([start])
    edges = []
    exhausted = True
    while queue:
        f, r = queue.popleft()
        for a in P.alphabet:
            s = V.delta.get((r, a))
            if s is None:
                continue
            for t in eng.successors(f, a):
                nxt = (t.target, s)
                edges.append(((f, r), t, nxt))
                if nxt not in seen:
                    seen.add(nxt)
                    if len(seen) > cap:
                        return seen, edges, False
                    queue.append(nxt)
    return seen, edges, exhausted


@dataclass(frozen=True)
class AlfResult:
    status: str  # finite | infinite | unknown
    delta: Optional[frozenset] = None
    pump: Optional[tuple] = None
    states: Optional[frozenset] = None
    stats: dict = field(default_factory=dict)


def decide_alf_pre_finite(
    P: Dfa, V: Dfa, node_cap: int = DEFAULT_KM_NODE_CAP
) -> AlfResult:
    """Is the transition alphabet of all prefix-tracked interleavings finite?

    V must recognize a prefix-closed language (every state accepting).
    Always conclusive: the net is bounded exactly when the product is
    finite, and boundedness is decidable.
    """
    net, iota = build_npv(P, V)
    m0 = iota((ZERO, V.initial))
    km = karp_miller(net, m0, node_cap)
    if km.capped:
        return AlfResult("unknown", stats={"km_nodes": len(km.nodes)})
    if not km.bounded:
        return AlfResult(
            "infinite", pump=km.pump, stats={"km_nodes": len(km.nodes)}
        )
    states, edges, exhausted = build_product(P, V)
    assert exhausted  # bounded net guarantees a finite product
    delta = frozenset(t for _src, t, _tgt in edges)
    return AlfResult(
        "finite",
        delta=delta,
        states=frozenset(states),
        stats={"km_nodes": len(km.nodes), "product_states": len(states)},
    )


def decide_alf_zero_finite(
    P: Dfa,
    V: Dfa,
    node_cap: int = DEFAULT_KM_NODE_CAP,
    forward_cap: int = DEFAULT_FORWARD_CAP,
) -> AlfResult:
    """Finiteness of the transition alphabet restricted to interleavings
    that can still close all components inside V.

    V must be a complete automaton with finals.  Exact when either the
    backward (from the accepting closures) or forward marking space is
    finite; Unknown otherwise.
    """
    V = complete(V)
    net, iota = build_npv(P, V)
    targets = [iota((ZERO, qf)) for qf in sorted(V.finals)]
    if not targets:
        return AlfResult("finite", delta=frozenset(), states=frozenset())
    rev = net.reversed()
    backward_ok = True
    R: set = set()
    for tm in targets:
        km = karp_miller(rev, tm, node_cap)
        if km.capped or not km.bounded:
            backward_ok = False
            break
        seen, exhausted = reachable_markings(rev, tm, forward_cap)
        if not exhausted:
            backward_ok = False
            break
        R |= set(seen)
    if backward_ok:
        def in_breve(state):
            return iota(state) in R

        return _restricted_alf(P, V, in_breve, forward_cap)
    km = karp_miller(net, iota((ZERO, V.initial)), node_cap)
    if not km.capped and km.bounded:
        states, edges, exhausted = build_product(P, V, forward_cap)
        if exhausted:
            back = _backward_states(states, edges, V)

            def in_breve(state):
                return state in back

            return _restricted_alf(P, V, in_breve, forward_cap)
    return AlfResult("unknown", stats={"km_nodes": len(km.nodes)})


def _backward_states(states, edges, V: Dfa) -> set:
    rev: dict = {}
    for src, _t, tgt in edges:
        rev.setdefault(tgt, set()).add(src)
    goal = {s for s in states if s[0] == ZERO and s[1] in V.finals}
    seen = set(goal)
    queue = deque(goal)
    while queue:
        s = queue.popleft()
        for prev in rev.get(s, ()):
            if prev not in seen:
                seen.add(prev)
                queue.append(prev)
    return seen


def _restricted_alf(P: Dfa, V: Dfa, in_breve, cap: int) -> AlfResult:
    eng = engine_for(P)
    start = (ZERO, V.initial)
    if not in_breve(start):
        return AlfResult("finite", delta=frozenset(), states=frozenset())
    seen = {start}
    queue = deque([start])
    delta = set()
    while queue:
        f, r = queue.popleft()
        for a in P.alphabet:
            s = V.delta.get((r, a))
            if s is None:
                continue
            for t in eng.successors(f, a):
                nxt = (t.target, s)
                if not in_breve(nxt):
                    continue
                delta.add(t)
                if nxt not in seen:
                    seen.add(nxt)
                    if len(seen) > cap:
                        return AlfResult("unknown", stats={"states": len(seen)})
                    queue.append(nxt)
    return AlfResult("finite", delta=frozenset(delta), states=frozenset(seen))


# ---------------------------------------------------------------------------
# three-track deletion net

CHECK_PLACE = "E::0#"


def _v1(q) -> str:
    return f"V1::{q}"


def _v2(q) -> str:
    return f"V2::{q}"


def _q1(q) -> str:
    return f"Q1::{q}"


def _q2(q) -> str:
    return f"Q2::{q}"


def _ep(vec: CounterVector) -> str:
    return f"E::{vec}"


def build_np_v_full(P: Dfa, V: Dfa) -> tuple:
    """Net executing the three-track deletion system with free counters.

    Paired transitions advance the composite and remainder tracks in step;
    single-sided transitions advance the composite and the one tracked
    component.  Returns (net, iota).
    """
    V = complete(V)
    eng = engine_for(P)
    evecs = sorted(elementary_vector_states(P), key=str)
    places = (
        {_v1(q) for q in V.states}
        | {_v2(q) for q in V.states}
        | {_q1(q) for q in P.states}
        | {_q2(q) for q in P.states}
        | {_ep(v) for v in evecs}
        | {CHECK_PLACE}
    )
    pre, post, meta = {}, {}, {}
    core = sorted(eng.sigma_core(), key=lambda t: (str(t), t.kind))
    for t in core:
        a = t.letter
        for r1 in sorted(V.states):
            s1 = V.delta[(r1, a)]
            # paired step: remainder track follows the composite
            for r2 in sorted(V.states):
                s2 = V.delta[(r2, a)]
                tid = f"S|{t.kind}|{t}|{r1},{r2}"
                pcons = {_v1(r1): 1}
                pcons[_v2(r2)] = pcons.get(_v2(r2), 0) + 1
                pprod = {_v1(s1): 1}
                pprod[_v2(s2)] = pprod.get(_v2(s2), 0) + 1
                if t.kind in (INNER, END):
                    (q,) = t.source.support()
                    pcons[_q1(q)] = 1
                    pcons[_q2(q)] = 1
                if t.kind in (START, INNER):
                    (p,) = t.target.support()
                    pprod[_q1(p)] = pprod.get(_q1(p), 0) + 1
                    pprod[_q2(p)] = pprod.get(_q2(p), 0) + 1
                pre[tid] = CounterVector.make(pcons)
                post[tid] = CounterVector.make(pprod)
                meta[tid] = {"group": "S", "core": t, "v": (r1, r2)}
            # component step: only the composite track and the tracked
            # component move
            tid = f"E|{t.kind}|{t}|{r1}"
            pcons = {_v1(r1): 1}
            pprod = {_v1(s1): 1}
            if t.kind in (START, START_END):
                pcons[_ep(ZERO)] = 1
            else:
                pcons[_ep(t.source)] = 1
                (q,) = t.source.support()
                pcons[_q1(q)] = pcons.get(_q1(q), 0) + 1
            if t.kind in (START, INNER):
                pprod[_ep(t.target)] = 1
                (p,) = t.target.support()
                pprod[_q1(p)] = pprod.get(_q1(p), 0) + 1
            else:
                pprod[CHECK_PLACE] = 1
            pre[tid] = CounterVector.make(pcons)
            post[tid] = CounterVector.make(pprod)
            meta[tid] = {"group": "E", "core": t, "v": (r1,)}
    net = PetriNet(frozenset(places), pre, post, meta, tuple(sorted(pre)))

    def iota(state) -> CounterVector:
        q1, q2, (s1, s2, s3) = state
        counts = {_v1(q1): 1}
        counts[_v2(q2)] = counts.get(_v2(q2), 0) + 1
        for q, n in s1.entries:
            counts[_q1(q)] = n
        for q, n in s2.entries:
            counts[_q2(q)] = n
        key = CHECK_PLACE if s3 == "check" else _ep(s3)
        counts[key] = counts.get(key, 0) + 1
        return CounterVector.make(counts)

    return net, iota


def one_token_groups(P: Dfa, V: Dfa) -> tuple:
    V = complete(V)
    evecs = elementary_vector_states(P)
    return (
        frozenset(_v1(q) for q in V.states),
        frozenset(_v2(q) for q in V.states),
        frozenset({_ep(v) for v in evecs} | {CHECK_PLACE}),
    )


def check_one_token(groups, M: CounterVector) -> bool:
    counts = dict(M.entries)
    return all(
        sum(counts.get(p, 0) for p in group) == 1 for group in groups
    )


@dataclass(frozen=True)
class NetVerdict:
    status: str  # holds | fails | unknown
    route: str
    witness: Optional[dict] = None
    stats: dict = field(default_factory=dict)


def decode_firing(net: PetriNet, path) -> dict:
    """Word-level reading of a firing sequence of the deletion net."""
    word, remainder, component, positions = [], [], [], []
    for i, tid in enumerate(path):
        info = net.meta[tid]
        a = info["core"].letter
        word.append(a)
        if info["group"] == "S":
            remainder.append(a)
        else:
            component.append(a)
            positions.append(i)
    return {
        "word": tuple(word),
        "remainder": tuple(remainder),
        "component": tuple(component),
        "positions": tuple(positions),
        "firing": tuple(path),
    }


def decide_sp_via_net(
    P: Dfa,
    V: Dfa,
    node_cap: int = DEFAULT_KM_NODE_CAP,
    forward_cap: int = DEFAULT_FORWARD_CAP,
) -> NetVerdict:
    """Closure decision through the deletion net.

    A counterexample is a marking where the composite track is accepted
    with all counters closed, the deleted component is complete, and the
    remainder track is rejected.  Exact when the marking space is finite;
    otherwise Holds is still sound when no such marking is even coverable.
    """
    V = complete(V)
    net, iota = build_np_v_full(P, V)
    m0 = iota((V.initial, V.initial, (ZERO, ZERO, ZERO)))
    nonfinals = sorted(set(V.states) - set(V.finals))
    targets = [
        iota((qf, qn, (ZERO, ZERO, "check")))
        for qf in sorted(V.finals)
        for qn in nonfinals
    ]
    km = karp_miller(net, m0, node_cap)
    stats = {"km_nodes": len(km.nodes), "km_capped": km.capped}
    if not km.capped and not any(km.covers(t) for t in targets):
        # coverability is decided exactly, so no counterexample marking
        # is reachable at all
        return NetVerdict("holds", "net-uncoverable", stats=stats)
    seen, exhausted = reachable_markings(net, m0, forward_cap, stop_at=targets)
    stats["markings"] = len(seen)
    hit = next((t for t in targets if t in seen), None)
    if hit is not None:
        path = firing_path(seen, hit)
        return NetVerdict(
            "fails", "net-reachability", witness=decode_firing(net, path),
            stats=stats,
        )
    if exhausted:
        return NetVerdict("holds", "net-exhaustive", stats=stats)
    return NetVerdict("unknown", "net-budget", stats=stats)


# ---------------------------------------------------------------------------
# export

def to_pnml(net: PetriNet, m0: Optional[CounterVector] = None) -> str:
    import xml.etree.ElementTree as ET

    root = ET.Element("pnml")
    n = ET.SubElement(root, "net", id="net0", type="P/T net")
    page = ET.SubElement(n, "page", id="page0")
    ids = {}
    for i, p in enumerate(sorted(net.places)):
        pid = f"p{i}"
        ids[p] = pid
        el = ET.SubElement(page, "place", id=pid)
        name = ET.SubElement(el, "name")
        ET.SubElement(name, "text").text = p
        if m0 is not None and m0.get(p):
            mk = ET.SubElement(el, "initialMarking")
            ET.SubElement(mk, "text").text = str(m0.get(p))
    for i, t in enumerate(net.order):
        tid = f"t{i}"
        ids[t] = tid
        el = ET.SubElement(page, "transition", id=tid)
        name = ET.SubElement(el, "name")
        ET.SubElement(name, "text").text = t
    arc = 0
    for i, t in enumerate(net.order):
        for p, w in net.pre[t].entries:
            el = ET.SubElement(
                page, "arc", id=f"a{arc}", source=ids[p], target=ids[t]
            )
            if w != 1:
                ins = ET.SubElement(el, "inscription")
                ET.SubElement(ins, "text").text = str(w)
            arc += 1
        for p, w in net.post[t].entries:
            el = ET.SubElement(
                page, "arc", id=f"a{arc}", source=ids[t], target=ids[p]
            )
            if w != 1:
                ins = ET.SubElement(el, "inscription")
                ET.SubElement(ins, "text").text = str(w)
            arc += 1
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True)


def to_dot(net: PetriNet, m0: Optional[CounterVector] = None) -> str:
    lines = ["digraph net {", "  rankdir=LR;"]
    for p in sorted(net.places):
        tokens = f"\\n{m0.get(p)}" if m0 is not None and m0.get(p) else ""
        lines.append(f'  "{p}" [shape=circle, label="{p}{tokens}"];')
    for t in net.order:
        lines.append(f'  "{t}" [shape=box];')
        for p, w in net.pre[t].entries:
            label = f' [label="{w}"]' if w != 1 else ""
            lines.append(f'  "{p}" -> "{t}"{label};')
        for p, w in net.post[t].entries:
            label = f' [label="{w}"]' if w != 1 else ""
            lines.append(f'  "{t}" -> "{p}"{label};')
    lines.append("}")
    return "\n".join(lines)
