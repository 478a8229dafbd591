"""A small worked instance: five events, an eleven-state plant, a four-state supervisor.

The supervisor is not resilient: an attacker that secretly enables ``e`` at
the start steers the plant to damage state 10 while every observation stays
consistent with the supervisor's expectations.
"""
from __future__ import annotations

from .automata import Alphabet, Automaton, Event


def running_alphabet(attacker_controllable=("e",)) -> Alphabet:
    ctrl = {"a", "d", "e"}
    obs = {"a", "c", "d"}
    att_obs = {"b", "c", "d", "e"}
    return Alphabet(
        Event(n, n in ctrl, n in obs, n in att_obs, n in attacker_controllable)
        for n in "abcde"
    )


def running_plant(names=tuple("abcde")) -> Automaton:
    arcs = [
        (0, "a", 1), (0, "b", 5), (0, "e", 8), (5, "a", 6), (1, "c", 2), (2, "d", 3),
        (6, "c", 7), (8, "a", 9), (9, "d", 4), (4, "c", 10),
    ]
    return Automaton.build(range(11), names, 0, arcs, marked=[10])


def running_supervisor(names=tuple("abcde")) -> Automaton:
    arcs = [
        (0, "a", 1), (0, "b", 0), (0, "c", 0),
        (1, "b", 1), (1, "c", 2), (1, "d", 3),
        (2, "b", 2), (2, "c", 2), (2, "d", 3),
        (3, "b", 3), (3, "c", 3),
    ]
    return Automaton.build(range(4), names, 0, arcs)


def running_example():
    """``(alphabet, plant, supervisor)`` for the worked instance."""
    ab = running_alphabet()
    return ab, running_plant(ab.names), running_supervisor(ab.names)
