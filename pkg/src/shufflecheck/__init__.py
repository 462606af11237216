"""Closure of regular language pairs under one-component deletion.

Decide whether the words of a constraint language stay inside it after
deleting one whole interleaved component, with machine-checkable
certificates either way and every intermediate construction exposed.
"""

from .automata import (
    AutomatonError,
    Dfa,
    EmptyLanguage,
    Letter,
    Word,
    accepts,
    equivalent,
    grave,
    includes,
    is_prefix_closed,
    language_upto,
    letters,
    normalize,
    parse_automaton,
    serialize_automaton,
    word,
)
from .decision import (
    Budgets,
    InvalidQuery,
    MalformedCertificate,
    Verdict,
    decide_sp,
    parse_verdict,
    replay_certificate,
    serialize_verdict,
)
from .engine import (
    Computation,
    CounterVector,
    NotAComputation,
    ShuffleTransition,
    ZERO,
    elementary_automaton,
    engine_for,
    parse_transition,
    parse_vector,
    pre_shuffle_member,
    shuffle_member,
    sigma_core,
)
from .oracle import iterated_shuffle_upto, sp_falsify, srf1, swf1
from .petri import (
    build_np_v_full,
    build_npv,
    decide_alf_pre_finite,
    decide_alf_zero_finite,
    decide_sp_via_net,
    karp_miller,
)
from .representation import (
    build_delta_paren,
    build_w_delta,
    check_closure_prefix,
    check_closure_zero,
    decode_witness,
)
from .scalable import build_family_member, check_self_similarity
from .segments import (
    InitialSegment,
    NotCompatible,
    check_phi_gamma_omega,
    l_of_segment,
    partial_powerset,
)

__version__ = "0.1.0"

__all__ = [
    "AutomatonError",
    "Budgets",
    "Computation",
    "CounterVector",
    "Dfa",
    "EmptyLanguage",
    "InitialSegment",
    "InvalidQuery",
    "Letter",
    "MalformedCertificate",
    "NotAComputation",
    "NotCompatible",
    "ShuffleTransition",
    "Verdict",
    "Word",
    "ZERO",
    "accepts",
    "build_delta_paren",
    "build_family_member",
    "build_np_v_full",
    "build_npv",
    "build_w_delta",
    "check_closure_prefix",
    "check_closure_zero",
    "check_phi_gamma_omega",
    "check_self_similarity",
    "decide_alf_pre_finite",
    "decide_alf_zero_finite",
    "decide_sp",
    "decide_sp_via_net",
    "decode_witness",
    "elementary_automaton",
    "engine_for",
    "equivalent",
    "grave",
    "includes",
    "is_prefix_closed",
    "iterated_shuffle_upto",
    "karp_miller",
    "l_of_segment",
    "language_upto",
    "letters",
    "normalize",
    "parse_automaton",
    "parse_transition",
    "parse_vector",
    "parse_verdict",
    "partial_powerset",
    "pre_shuffle_member",
    "replay_certificate",
    "serialize_automaton",
    "serialize_verdict",
    "shuffle_member",
    "sigma_core",
    "sp_falsify",
    "srf1",
    "swf1",
    "word",
]
