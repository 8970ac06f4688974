"""Complete reachability of deterministic finite automata.

Polynomial-time decision of complete reachability, witness search,
bounded-length extending / reaching / reset words, and an exhaustive
oracle for cross-validation on small instances.
"""

from .core import (EMPTY_WORD, Automaton, InvalidInput, StateSet, Word,
                   image, preimage, w_predecessor)
from .extension import (NotCompletelyReachable, NotSynchronizing,
                        extension_length_budget,
                        find_short_properly_extending_word,
                        max_nested_boxes, max_nested_boxes_capped,
                        reach_word, reset_word)
from .oracle import (MAX_ORACLE_STATES, CapacityError, OracleAtlas,
                     build_atlas, oracle_is_completely_reachable,
                     oracle_max_laminar, oracle_reset_threshold,
                     oracle_shortest_extending, oracle_witnesses)
from .witness import (AssumptionViolated, WitnessReport,
                      find_all_witnesses, find_properly_extending_word,
                      find_witness, is_witness_candidate, reduce,
                      witness_report)

__all__ = [
    "Automaton", "StateSet", "Word", "EMPTY_WORD", "InvalidInput",
    "image", "preimage", "w_predecessor",
    "is_witness_candidate", "find_properly_extending_word", "reduce",
    "find_witness", "find_all_witnesses", "witness_report",
    "WitnessReport", "AssumptionViolated",
    "find_short_properly_extending_word", "reach_word", "reset_word",
    "max_nested_boxes", "max_nested_boxes_capped",
    "extension_length_budget",
    "NotCompletelyReachable", "NotSynchronizing",
    "build_atlas", "OracleAtlas", "oracle_is_completely_reachable",
    "oracle_witnesses", "oracle_reset_threshold",
    "oracle_shortest_extending", "oracle_max_laminar",
    "MAX_ORACLE_STATES", "CapacityError",
]

__version__ = "0.1.0"
