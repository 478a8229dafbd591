"""Fortification of discrete-event supervisors against covert actuator attacks."""
from .automata import (
    Alphabet, Automaton, BipartiteAutomaton, ControlCommand, Event, accessible, compose_all,
    distinguishing_word, language_equal, language_included, marker_reachable, parallel_compose,
    remove_states, subset_construct, unobservable_reach,
)
from .commands import build_ce, build_ce_attacked, enumerate_commands
from .errors import (
    AlphabetError, AttackerError, AutomatonError, ConsistencyError, ConstraintError,
    ExtractionError, FortressError, InvalidSupervisorError, ProjectFormatError, SizeLimitError,
)
from .report import VerificationReport
from .supervisors import (
    PickPolicy, attack_bipartize, attack_bpns, bipartize, build_bpns, build_bps, debipartize,
    extract_deterministic, strip_attack, validate_supervisor, witness_supervisor,
)
from .synthesis import (
    ControlConstraint, FortifyOptions, FortifyOutcome, fortify, procedure1_attack_structure,
    procedure2_prune_commands, procedure3_iterate, supcn_synthesize,
)
from .verification import (
    check_control_equivalence, check_covert, check_damage_reachable, check_resilient,
)

__version__ = "0.1.0"

__all__ = [
    "build_ce", "build_ce_attacked", "enumerate_commands", "VerificationReport",
    "Alphabet", "Automaton", "BipartiteAutomaton", "ControlCommand", "Event", "accessible",
    "compose_all", "distinguishing_word", "language_equal", "language_included",
    "marker_reachable", "parallel_compose", "remove_states", "subset_construct",
    "unobservable_reach", "AlphabetError", "AttackerError", "AutomatonError",
    "ConsistencyError", "ConstraintError", "ExtractionError", "FortressError",
    "InvalidSupervisorError", "ProjectFormatError", "SizeLimitError", "PickPolicy",
    "attack_bipartize", "attack_bpns", "bipartize", "build_bpns", "build_bps", "debipartize",
    "extract_deterministic", "strip_attack", "validate_supervisor", "witness_supervisor",
    "ControlConstraint", "FortifyOptions", "FortifyOutcome", "fortify",
    "procedure1_attack_structure", "procedure2_prune_commands", "procedure3_iterate",
    "supcn_synthesize", "check_control_equivalence", "check_covert", "check_damage_reachable",
    "check_resilient",
]
