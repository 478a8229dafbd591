import random

import pytest

from fortress.automata import Alphabet, Automaton, ControlCommand as C, Event, compose_all
from fortress.commands import build_ce_attacked, enumerate_commands
from fortress.demo import running_alphabet, running_example, running_plant, running_supervisor
from fortress.errors import AttackerError
from fortress.supervisors import attack_bipartize, bipartize
from fortress.synthesis import fortify, procedure1_attack_structure
from fortress.verification import (
    attacked_loop, check_bipartite_equivalence, check_control_equivalence, check_covert,
    check_damage_reachable, check_language_equivalence, check_resilient, is_controllable,
    is_normal, validate_attacker,
)

from fuzz import random_instance, random_supervisor


def universal(symbols, drop=()):
    return Automaton.build([0], symbols, 0, [(0, s, 0) for s in symbols if s not in drop])


def loop_parts(ab, g, s):
    bt_a = attack_bipartize(bipartize(s, ab), ab)
    return build_ce_attacked(ab), bt_a


class TestAttackerValidation:
    def test_universal_is_valid(self):
        ab, g, s = running_example()
        ce_a, _ = loop_parts(ab, g, s)
        assert validate_attacker(universal(ce_a.symbols), ab).verdict

    def test_disabling_unattackable_event(self):
        ab, g, s = running_example()
        ce_a, bt_a = loop_parts(ab, g, s)
        bad = universal(ce_a.symbols, drop={"a"})
        assert validate_attacker(bad, ab).violations == [(0, "a", "non-attackable event disabled")]
        with pytest.raises(AttackerError):
            check_covert(g, ce_a, bt_a, bad, ab)

    def test_moving_on_unobserved_event(self):
        ab, g, s = running_example()
        syms = build_ce_attacked(ab).symbols
        arcs = [(q, x, q) for q in (0, 1) for x in syms if x != "a"] + [(0, "a", 1), (1, "a", 1)]
        bad = Automaton.build([0, 1], syms, 0, arcs)
        report = validate_attacker(bad, ab)
        assert report.violations == [(0, "a", "unobserved event changes state")]


class TestCovert:
    def test_passive_attacker(self):
        ab, g, s = running_example()
        ce_a, bt_a = loop_parts(ab, g, s)
        passive = universal(ce_a.symbols, drop=ab.attacker_controllable)
        assert check_covert(g, ce_a, bt_a, passive, ab).verdict

    def test_detected_attack(self):
        # d becomes attackable; the supervisor only expects d after a and c
        ab = running_alphabet(attacker_controllable=("d", "e"))
        g = running_plant()
        arcs = [(0, "a", 1), (0, "b", 0), (0, "c", 0), (1, "b", 1), (1, "c", 2),
                (2, "b", 2), (2, "c", 2), (2, "d", 3), (3, "b", 3), (3, "c", 3)]
        s = Automaton.build(range(4), ab.names, 0, arcs)
        ce_a, bt_a = loop_parts(ab, g, s)
        report = check_covert(g, ce_a, bt_a, universal(ce_a.symbols), ab)
        assert not report.verdict
        end = report.artifacts["attacked_loop"].run(report.witness)
        assert end[2] == "detect"
        assert report.witness[-1] == "d"
        assert [str(x) for x in report.witness] == ["{a,b,c}", "e", "a", "{b,c}", "d"]

    def test_synthesized_attacker_is_covert(self):
        for seed in range(40):
            ab, g, s = random_instance(seed)
            ce_a, bt_a = loop_parts(ab, g, s)
            a_hat = procedure1_attack_structure(g, ce_a, bt_a, ab)
            if a_hat.is_empty:
                continue
            assert check_covert(g, ce_a, bt_a, a_hat, ab).verdict


class TestDamage:
    def test_unreachable_damage(self):
        ab, _, s = running_example()
        g = running_plant()
        g = Automaton.build(g.states, g.symbols, 0,
                            [t for t in g.transitions() if t[0] != 0 or t[1] != "e"], marked=[10])
        ce_a, bt_a = loop_parts(ab, g, s)
        for attacker in (universal(ce_a.symbols), universal(ce_a.symbols, drop={"e"})):
            report = check_damage_reachable(g, ce_a, bt_a, attacker, ab)
            assert not report.verdict and report.witness is None

    def test_enabling_attacker(self):
        ab, g, s = running_example()
        ce_a, bt_a = loop_parts(ab, g, s)
        report = check_damage_reachable(g, ce_a, bt_a, universal(ce_a.symbols), ab)
        assert report.verdict
        plant_word = [x for x in report.witness if isinstance(x, str)]
        assert g.run(plant_word) == 10
        assert plant_word == ["e", "a", "d", "c"]

    def test_synthesized_attacker_reaches_damage(self):
        ab, g, s = running_example()
        ce_a, bt_a = loop_parts(ab, g, s)
        a_hat = procedure1_attack_structure(g, ce_a, bt_a, ab)
        assert check_damage_reachable(g, ce_a, bt_a, a_hat, ab).verdict


class TestResilience:
    def test_no_attack_capability(self):
        ab = running_alphabet(attacker_controllable=())
        report = check_resilient(running_plant(), running_supervisor(), ab)
        assert report.verdict and report.witness is None

    def test_worked_supervisor(self):
        ab, g, s = running_example()
        report = check_resilient(g, s, ab)
        assert not report.verdict
        assert report.witness[0] == C("abc") and report.witness[1] == "e"
        assert report.artifacts["attacked_loop"].run(report.witness) is not None

    def test_fortified_output(self):
        ab, g, s = running_example()
        fs = fortify(g, s, ab).fs
        assert check_resilient(g, fs, ab).verdict

    def test_witness_is_covert_and_damaging(self):
        for seed in range(60):
            ab, g, s = random_instance(seed)
            report = check_resilient(g, s, ab)
            if report.verdict:
                continue
            loop = report.artifacts["attacked_loop"]
            end = loop.run(report.witness)
            assert g.marked and end[0] in g.marked
            assert end[2] != "detect"


class TestEquivalence:
    def test_self(self):
        ab, g, s = running_example()
        assert check_control_equivalence(g, s, s, ab).verdict

    def test_extra_enabled_event(self):
        ab = Alphabet([Event("a", True, True), Event("u", False, True)])
        g = Automaton.build([0, 1], ab.names, 0, [(0, "a", 1), (0, "u", 0)])
        s = Automaton.build([0], ab.names, 0, [(0, "u", 0)])
        s2 = Automaton.build([0], ab.names, 0, [(0, "u", 0), (0, "a", 0)])
        report = check_control_equivalence(g, s, s2, ab)
        assert not report.verdict
        assert report.witness == ("a",)

    def test_fortified_output(self):
        ab, g, s = running_example()
        fs = fortify(g, s, ab).fs
        assert check_control_equivalence(g, s, fs, ab).verdict

    def test_formulations_agree(self):
        rng = random.Random(12)
        for seed in range(80):
            ab, g, s = random_instance(seed)
            s2 = random_supervisor(rng, ab)
            plain = check_control_equivalence(g, s, s2, ab).verdict
            assert check_language_equivalence(g, s, s2, ab).verdict == plain
            gamma = enumerate_commands(ab)
            bip = check_bipartite_equivalence(g, bipartize(s, ab, gamma), bipartize(s2, ab, gamma),
                                              ab, gamma)
            assert bip.verdict == plain


class TestLanguageProperties:
    def test_controllability_witness(self):
        plant = Automaton.build(range(3), "cu", 0, [(0, "c", 1), (1, "u", 2)])
        k = Automaton.build(range(2), "cu", 0, [(0, "c", 1)])
        assert is_controllable(k, plant, {"u"}) == (False, ("c", "u"))
        assert is_controllable(k, plant, set())[0]

    def test_normality_witness(self):
        plant = Automaton.build(range(3), "hx", 0, [(0, "h", 1), (0, "x", 2)])
        k = Automaton.build(range(2), "hx", 0, [(0, "x", 1)])
        ok, witness = is_normal(k, plant, {"x"})
        assert not ok and witness == ("h",)
        assert is_normal(k, plant, {"h", "x"})[0]

    def test_attacked_loop_components(self):
        ab, g, s = running_example()
        ce_a, bt_a = loop_parts(ab, g, s)
        loop = attacked_loop(g, ce_a, bt_a, universal(ce_a.symbols))
        assert loop.initial == (g.initial, ce_a.initial, bt_a.initial, 0)
        assert compose_all(g, ce_a, bt_a).n_transitions == loop.n_transitions
