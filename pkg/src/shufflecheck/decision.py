"""Top-level decision pipeline and certificate handling.

The pipeline layers a bounded falsifier, the two fragment-finiteness
routes, and the deletion-net analysis.  Every verdict carries a
certificate that can be re-validated independently of the run that
produced it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Optional

from .automata import (
    Dfa,
    accepts,
    grave,
    is_prefix_closed,
    normalize,
    parse_letter,
    render_word,
)
from .engine import parse_transition, shuffle_member, validate_in_shuffle
from .oracle import sp_falsify
from .petri import decide_alf_pre_finite, decide_alf_zero_finite, decide_sp_via_net
from .representation import check_closure_prefix, check_closure_zero

HOLDS = "holds"
FAILS = "fails"
UNKNOWN = "unknown"

PREFIX = "prefix"
GENERAL = "general"


class InvalidQuery(Exception):
    pass


class MalformedCertificate(Exception):
    pass


@dataclass(frozen=True)
class Budgets:
    falsifier_maxlen: int = 6
    oracle_maxlen: int = 8
    oracle_card_cap: int = 200_000
    frontier_cap: int = 100_000
    km_node_cap: int = 200_000
    forward_cap: int = 500_000

    @staticmethod
    def profile(name: str) -> "Budgets":
        if name == "ci":
            return Budgets(4, 6, 50_000, 20_000, 50_000, 100_000)
        if name == "default":
            return Budgets()
        if name == "deep":
            return Budgets(8, 10, 1_000_000, 500_000, 1_000_000, 2_000_000)
        raise InvalidQuery(f"unknown budget profile {name!r}")

    @staticmethod
    def from_env() -> "Budgets":
        return Budgets.profile(os.environ.get("SP_BUDGET_PROFILE", "default"))


@dataclass(frozen=True)
class Verdict:
    outcome: str  # holds | fails | unknown
    mode: str  # prefix | general
    route: str
    certificate: dict = field(default_factory=dict)
    budgets: Budgets = field(default_factory=Budgets)
    stats: dict = field(default_factory=dict)


def _check_query(P: Dfa, V: Dfa, mode: str):
    if mode not in (PREFIX, GENERAL):
        raise InvalidQuery(f"unknown mode {mode!r}")
    if set(P.alphabet) != set(V.alphabet):
        raise InvalidQuery("component and constraint alphabets differ")
    if mode == PREFIX and not is_prefix_closed(V):
        raise InvalidQuery("prefix mode needs a prefix-closed constraint language")


def _word_cert(w, u, e, positions) -> dict:
    return {
        "word": tuple(w),
        "factor": tuple(u),
        "component": tuple(e),
        "positions": tuple(positions),
    }


def _column_cert(columns) -> dict:
    from .representation import decode_witness

    d = decode_witness(columns)
    return _word_cert(d["word"], d["remainder"], d["component"], d["positions"])


def _delta_cert(delta) -> dict:
    return {"delta": tuple(sorted(t.tagged_str() for t in delta))}


def decide_sp(
    P: Dfa, V: Dfa, mode: str = PREFIX, budgets: Optional[Budgets] = None
) -> Verdict:
    """Decide closure of (P, V) under one-component deletion.

    Prefix mode asks about interleavings of component prefixes inside a
    prefix-closed V; general mode about interleavings of complete
    components.  Exact wherever a finiteness or boundedness argument
    lands; otherwise the budgets bound the residual search and the
    verdict degrades to unknown rather than guessing.
    """
    if budgets is None:
        budgets = Budgets.from_env()
    P = normalize(P)
    V = normalize(V)
    _check_query(P, V, mode)
    comp = grave(P) if mode == PREFIX else P

    cex = sp_falsify(comp, V, budgets.falsifier_maxlen)
    if cex is not None:
        return Verdict(
            FAILS, mode, "falsifier", _word_cert(*cex), budgets,
            {"falsifier_maxlen": budgets.falsifier_maxlen},
        )

    if mode == PREFIX:
        pre = decide_alf_pre_finite(comp, V, budgets.km_node_cap)
        if pre.status == "finite":
            out = check_closure_prefix(comp, V, pre.delta, coverage_established=True)
            if out.holds:
                return Verdict(
                    HOLDS, mode, "prefix-fragment", _delta_cert(pre.delta),
                    budgets, dict(pre.stats),
                )
            return Verdict(
                FAILS, mode, "prefix-fragment", _column_cert(out.witness),
                budgets, dict(pre.stats),
            )
        zero = decide_alf_zero_finite(
            comp, V, budgets.km_node_cap, budgets.forward_cap
        )
        if zero.status == "finite":
            out = check_closure_zero(comp, V, zero.delta, coverage_established=True)
            if out.holds:
                return Verdict(
                    HOLDS, mode, "zero-fragment", _delta_cert(zero.delta),
                    budgets, dict(zero.stats),
                )
            return Verdict(
                FAILS, mode, "zero-fragment", _column_cert(out.witness),
                budgets, dict(zero.stats),
            )
    else:
        zero = decide_alf_zero_finite(
            comp, V, budgets.km_node_cap, budgets.forward_cap
        )
        if zero.status == "finite":
            out = check_closure_zero(comp, V, zero.delta, coverage_established=True)
            if out.holds:
                return Verdict(
                    HOLDS, mode, "zero-fragment", _delta_cert(zero.delta),
                    budgets, dict(zero.stats),
                )
            return Verdict(
                FAILS, mode, "zero-fragment", _column_cert(out.witness),
                budgets, dict(zero.stats),
            )

    net = decide_sp_via_net(comp, V, budgets.km_node_cap, budgets.forward_cap)
    if net.status == FAILS:
        w = net.witness
        return Verdict(
            FAILS, mode, net.route,
            _word_cert(w["word"], w["remainder"], w["component"], w["positions"]),
            budgets, dict(net.stats),
        )
    if net.status == HOLDS:
        return Verdict(HOLDS, mode, net.route, {}, budgets, dict(net.stats))
    return Verdict(UNKNOWN, mode, net.route, {}, budgets, dict(net.stats))


# ---------------------------------------------------------------------------
# certificate replay

def _delete_positions(w: tuple, positions: tuple) -> tuple:
    taken = set(positions)
    return tuple(a for i, a in enumerate(w) if i not in taken)


def replay_certificate(P: Dfa, V: Dfa, verdict: Verdict) -> bool:
    """Re-validate a verdict's certificate from scratch.

    A failing certificate is checked word by word; a holding fragment
    certificate is checked by re-running the exact closure search over the
    recorded fragment; net-based holds re-run the net analysis.
    """
    P = normalize(P)
    V = normalize(V)
    comp = grave(P) if verdict.mode == PREFIX else P
    if verdict.outcome == FAILS:
        c = verdict.certificate
        try:
            w = tuple(c["word"])
            u = tuple(c["factor"])
            e = tuple(c["component"])
            positions = tuple(c["positions"])
        except KeyError as exc:
            raise MalformedCertificate(f"missing field {exc}") from exc
        if not e or len(positions) != len(e):
            return False
        if len(positions) != len(set(positions)):
            return False
        if any(i < 0 or i >= len(w) for i in positions):
            return False
        if tuple(w[i] for i in sorted(positions)) != e:
            return False
        if _delete_positions(w, positions) != u:
            return False
        if not accepts(comp, e):
            return False
        if not shuffle_member(comp, w) or not shuffle_member(comp, u):
            return False
        return accepts(V, w) and not accepts(V, u)
    if verdict.outcome == HOLDS:
        if "delta" in verdict.certificate:
            delta = frozenset(
                parse_transition(line) for line in verdict.certificate["delta"]
            )
            if not all(validate_in_shuffle(comp, t) for t in delta):
                return False
            if verdict.route == "prefix-fragment":
                return check_closure_prefix(
                    comp, V, delta, coverage_established=True
                ).holds
            return check_closure_zero(
                comp, V, delta, coverage_established=True
            ).holds
        rerun = decide_sp_via_net(
            comp, V, verdict.budgets.km_node_cap, verdict.budgets.forward_cap
        )
        return rerun.status == HOLDS
    return True  # unknown makes no claim


# ---------------------------------------------------------------------------
# report format

def serialize_verdict(v: Verdict) -> str:
    lines = [f"VERDICT: {v.outcome}", f"MODE: {v.mode}", f"ROUTE: {v.route}"]
    lines.append("CERTIFICATE:")
    c = v.certificate
    for key in ("word", "factor", "component"):
        if key in c:
            lines.append(f"{key}: " + " ".join(str(a) for a in c[key]))
    if "positions" in c:
        lines.append("positions: " + " ".join(str(i) for i in c["positions"]))
    for line in c.get("delta", ()):
        lines.append(f"delta: {line}")
    lines.append("BUDGETS:")
    for name in (
        "falsifier_maxlen",
        "oracle_maxlen",
        "oracle_card_cap",
        "frontier_cap",
        "km_node_cap",
        "forward_cap",
    ):
        lines.append(f"{name}: {getattr(v.budgets, name)}")
    if v.stats:
        lines.append("STATS:")
        for k in sorted(v.stats):
            lines.append(f"{k}: {v.stats[k]}")
    return "\n".join(lines) + "\n"


def parse_verdict(text: str) -> Verdict:
    outcome = mode = route = None
    cert: dict = {}
    budget_fields: dict = {}
    stats: dict = {}
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line in ("CERTIFICATE:", "BUDGETS:", "STATS:"):
            section = line[:-1]
            continue
        if ":" not in line:
            raise MalformedCertificate(f"bad report line {line!r}")
        key, _, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if key == "VERDICT":
            outcome = value
        elif key == "MODE":
            mode = value
        elif key == "ROUTE":
            route = value
        elif section == "CERTIFICATE":
            if key in ("word", "factor", "component"):
                cert[key] = tuple(parse_letter(t) for t in value.split())
            elif key == "positions":
                cert[key] = tuple(int(t) for t in value.split())
            elif key == "delta":
                cert.setdefault("delta", ())
                cert["delta"] = cert["delta"] + (value,)
            else:
                raise MalformedCertificate(f"unknown certificate field {key!r}")
        elif section == "BUDGETS":
            budget_fields[key] = int(value)
        elif section == "STATS":
            stats[key] = value
        else:
            raise MalformedCertificate(f"line {line!r} outside any section")
    if outcome not in (HOLDS, FAILS, UNKNOWN):
        raise MalformedCertificate(f"bad or missing verdict {outcome!r}")
    if mode not in (PREFIX, GENERAL):
        raise MalformedCertificate(f"bad or missing mode {mode!r}")
    if route is None:
        raise MalformedCertificate("missing route")
    try:
        budgets = replace(Budgets(), **budget_fields)
    except TypeError as exc:
        raise MalformedCertificate(f"bad budget field: {exc}") from exc
    return Verdict(outcome, mode, route, cert, budgets, stats)
