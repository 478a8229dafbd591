"""Control commands and the command-execution automata."""
from __future__ import annotations

from typing import List

from .automata import Alphabet, Automaton, ControlCommand
from .errors import SizeLimitError

DEFAULT_MAX_CONTROLLABLE = 16
CE_INIT = "init"


def enumerate_commands(alphabet: Alphabet, max_controllable: int = DEFAULT_MAX_CONTROLLABLE) -> List[ControlCommand]:
    """Every command (superset of the uncontrollable events), ascending by bitmask.

    >>> from fortress.automata import Alphabet
    >>> ab = Alphabet.from_sets("xu", controllable="x")
    >>> [str(c) for c in enumerate_commands(ab)]
    ['{u}', '{u,x}']
    """
    ctrl = alphabet.ordered(alphabet.controllable)
    if len(ctrl) > max_controllable:
        raise SizeLimitError("command enumeration", max_controllable, "controllable events")
    base = alphabet.uncontrollable
    out = []
    for bits in range(1 << len(ctrl)):
        out.append(ControlCommand(base | {e for i, e in enumerate(ctrl) if bits >> i & 1}))
    out.sort(key=alphabet.mask)
    return out


def universe(alphabet: Alphabet, commands) -> tuple:
    """Symbol universe Σ ∪ Γ: events in alphabet order, then commands."""
    return tuple(alphabet.names) + tuple(commands)


def _ce(alphabet, commands, attacked):
    symbols = universe(alphabet, commands)
    states = [CE_INIT] + list(commands)
    delta = {q: {} for q in states}
    for gamma in commands:
        delta[CE_INIT][gamma] = gamma
        out = delta[gamma]
        for e in alphabet.names:
            if e in gamma or (attacked and e in alphabet.attacker_controllable):
                out[e] = CE_INIT if e in alphabet.observable else gamma
    return Automaton(states, symbols, CE_INIT, delta)


def build_ce(alphabet: Alphabet, commands=None, max_controllable: int = DEFAULT_MAX_CONTROLLABLE) -> Automaton:
    """Command-execution automaton: a command, then events it enables.

    States are ``"init"`` and one state per command (labelled by the command
    itself).  An observable event of the command returns to ``"init"``; an
    unobservable one loops.
    """
    if commands is None:
        commands = enumerate_commands(alphabet, max_controllable)
    return _ce(alphabet, commands, attacked=False)


def build_ce_attacked(alphabet: Alphabet, commands=None,
                      max_controllable: int = DEFAULT_MAX_CONTROLLABLE) -> Automaton:
    """Command execution when attackable events may be enabled regardless of the command."""
    if commands is None:
        commands = enumerate_commands(alphabet, max_controllable)
    return _ce(alphabet, commands, attacked=True)
