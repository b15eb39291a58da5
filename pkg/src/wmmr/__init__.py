"""Reachability checking for litmus tests under a promising weak-memory semantics.

Two independent engines decide whether an outcome is reachable: an
exhaustive operational interpreter and a proof engine that builds
event-structure proof outlines and composes them.
"""

__version__ = "0.1.0"

from .litmus import (  # noqa: E402
    LitmusError, LitmusTest, OutcomePredicate, elaborate, format_litmus, load_corpus,
    load_file, parse_litmus, value_universe,
)
from .promising import (  # noqa: E402
    ExploreResult, FinalState, TState, Verdict, certifiable, check_outcome, explore,
    explore_unrestricted, initial_state, thread_step,
)
from .events import (  # noqa: E402
    EventStructure, append_read_chain, extend, find_interference_free, ini_structure,
    is_configuration, last, parallel_compose, restrict,
)
from .assertions import enumerate_psi, final_states, matches, priors, views_from  # noqa: E402
from .proof import (  # noqa: E402
    ProofOutline, ReachabilityResult, check_reachable, derive_outlines, outline_from_trace,
    revalidate,
)

__all__ = [
    "LitmusError", "LitmusTest", "OutcomePredicate", "elaborate", "format_litmus",
    "load_corpus", "load_file", "parse_litmus", "value_universe",
    "ExploreResult", "FinalState", "TState", "Verdict", "certifiable", "check_outcome",
    "explore", "explore_unrestricted", "initial_state", "thread_step",
    "EventStructure", "append_read_chain", "extend", "find_interference_free",
    "ini_structure", "is_configuration", "last", "parallel_compose", "restrict",
    "enumerate_psi", "final_states", "matches", "priors", "views_from",
    "ProofOutline", "ReachabilityResult", "check_reachable", "derive_outlines",
    "outline_from_trace", "revalidate",
]
