import itertools
import random

import pytest

from fortress.automata import Alphabet, ControlCommand, Event
from fortress.commands import CE_INIT, build_ce, build_ce_attacked, enumerate_commands
from fortress.demo import running_example
from fortress.errors import SizeLimitError

from fuzz import random_alphabet
from oracles import bounded_language, in_command_pattern, powerset_commands


def test_worked_instance_has_eight_commands():
    ab, _, _ = running_example()
    gamma = enumerate_commands(ab)
    assert len(gamma) == 8
    assert all({"b", "c"} <= c.members for c in gamma)
    assert len(set(gamma)) == 8


def test_nothing_controllable():
    ab = Alphabet.from_sets("xyz")
    assert enumerate_commands(ab) == [ControlCommand("xyz")]


def test_single_controllable_event():
    ab = Alphabet.from_sets("xyz", controllable="x")
    gamma = enumerate_commands(ab)
    assert gamma == [ControlCommand("yz"), ControlCommand("xyz")]
    assert {c.members for c in gamma} == powerset_commands("xyz", "x")


def test_order_is_bitmask_order():
    ab, _, _ = running_example()
    masks = [ab.mask(c) for c in enumerate_commands(ab)]
    assert masks == sorted(masks)


def test_matches_powerset_on_random_alphabets():
    rng = random.Random(5)
    for _ in range(30):
        ab = random_alphabet(rng, max_controllable=3)
        got = {c.members for c in enumerate_commands(ab)}
        assert got == powerset_commands(ab.names, ab.controllable)


def test_controllable_cap():
    ab = Alphabet.from_sets("abcd", controllable="abcd")
    with pytest.raises(SizeLimitError):
        enumerate_commands(ab, max_controllable=3)


def test_ce_state_count():
    ab, _, _ = running_example()
    assert len(build_ce(ab).states) == 9


def test_ce_without_controllable_events():
    ab = Alphabet.from_sets("xyh", observable="xy")
    ce = build_ce(ab)
    assert len(ce.states) == 2
    (gamma,) = ce.enabled(CE_INIT)
    out = ce.delta[gamma]
    assert [e for e, t in out.items() if t == CE_INIT] == ["x", "y"]
    assert out["h"] == gamma


def test_ce_language_matches_round_pattern():
    ab, _, _ = running_example()
    ce = build_ce(ab)
    words = bounded_language(ce, 4)
    for w in words:
        assert in_command_pattern(w, ab.unobservable, ab.observable)
    # and every pattern word of length <= 2 is there
    gamma = enumerate_commands(ab)
    for c, e in itertools.product(gamma, ab.names):
        assert ((c, e) in words) == (e in c)


def test_attacked_ce_without_attack_is_plain():
    ab = Alphabet([Event("a", True, True), Event("b", False, False)])
    assert build_ce_attacked(ab) == build_ce(ab)


def test_attacked_ce_adds_hidden_self_loops():
    ab, _, _ = running_example()
    plain, attacked = build_ce(ab), build_ce_attacked(ab)
    for gamma in enumerate_commands(ab):
        extra = set(attacked.delta[gamma]) - set(plain.delta[gamma])
        if "e" in gamma:
            assert not extra
        else:
            assert extra == {"e"}
            assert attacked.delta[gamma]["e"] == gamma


def test_attacked_ce_added_arc_count():
    rng = random.Random(8)
    for _ in range(30):
        ab = random_alphabet(rng, max_controllable=3)
        gamma = enumerate_commands(ab)
        added = build_ce_attacked(ab).n_transitions - build_ce(ab).n_transitions
        assert added == sum(len(ab.attacker_controllable - c.members) for c in gamma)
