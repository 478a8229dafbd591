import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fortress.automata import (
    Alphabet, Automaton, ControlCommand, Event, accessible, compose_all, format_word,
    language_equal, language_included, marker_reachable, parallel_compose, project,
    remove_states, subset_construct, unobservable_reach, word_automaton,
)
from fortress.demo import running_example
from fortress.errors import AlphabetError, AutomatonError, SizeLimitError

from fuzz import random_dfa
from oracles import arcs_of, bfs_reachable, bounded_language, hidden_closure, marked_reachable

seeds = st.integers(min_value=0, max_value=2**32 - 1)
SYMS = ("a", "b", "c")


def chain(word, symbols=SYMS):
    return word_automaton(tuple(word), symbols)


def universal(symbols):
    return Automaton.build([0], symbols, 0, [(0, s, 0) for s in symbols])


class TestBasics:
    def test_command_renders_sorted(self):
        assert str(ControlCommand("cba")) == "{a,b,c}"
        assert ControlCommand("ab") == ControlCommand(["b", "a"])
        assert "a" in ControlCommand("ab")

    def test_format_word(self):
        assert format_word(()) == "ε"
        assert format_word(None) == "-"
        assert format_word(("a", ControlCommand("ab"))) == "a {a,b}"

    def test_alphabet_partitions(self):
        ab, _, _ = running_example()
        assert ab.controllable == {"a", "d", "e"}
        assert ab.uncontrollable == {"b", "c"}
        assert ab.observable == {"a", "c", "d"}
        assert ab.unobservable == {"b", "e"}
        assert ab.attacker_observable == {"b", "c", "d", "e"}
        assert ab.attacker_controllable == {"e"}

    @pytest.mark.parametrize("events", [
        [Event("a"), Event("a")],
        [Event("")],
        [Event("a b")],
        [Event("{x}")],
        [Event("x,y")],
        [Event("x", controllable=True, attacker_controllable=True)],
        [Event("x", attacker_observable=True, attacker_controllable=True)],
    ])
    def test_bad_alphabets(self, events):
        with pytest.raises(AlphabetError):
            Alphabet(events)

    def test_build_rejects_nondeterminism(self):
        with pytest.raises(AutomatonError, match="nondeterministic"):
            Automaton.build([0, 1], "a", 0, [(0, "a", 0), (0, "a", 1)])

    def test_build_rejects_unknown_symbol(self):
        with pytest.raises(AutomatonError, match="unknown symbol"):
            Automaton.build([0], "a", 0, [(0, "z", 0)])

    def test_run_and_accepts(self):
        a = chain("ab")
        assert a.run("ab") == 2
        assert a.accepts("a") and not a.accepts("b")


class TestAccessible:
    def test_fixpoint(self):
        a = chain("abc")
        assert accessible(a) == a

    def test_disconnected_state_dropped(self):
        a = Automaton.build([0, 1, 2, 3], SYMS, 0, [(0, "a", 1), (1, "b", 2)])
        out = accessible(a)
        assert set(out.states) == {0, 1, 2}
        assert out.n_transitions == 2

    @given(seeds)
    def test_matches_bfs(self, seed):
        rng = random.Random(seed)
        a = random_dfa(rng, SYMS, n_states=8, density=0.25)
        assert set(accessible(a).states) == bfs_reachable(arcs_of(a), a.initial)


class TestCompose:
    def test_universal_identity(self):
        rng = random.Random(3)
        for _ in range(20):
            a = random_dfa(rng, SYMS)
            assert language_equal(parallel_compose(a, universal(SYMS)), a)

    @given(seeds)
    def test_equal_alphabet_is_intersection(self, seed):
        rng = random.Random(seed)
        a, b = random_dfa(rng, SYMS), random_dfa(rng, SYMS)
        prod = parallel_compose(a, b)
        assert bounded_language(prod, 6) == bounded_language(a, 6) & bounded_language(b, 6)

    def test_private_events_interleave(self):
        a = Automaton.build([0, 1], ["x"], 0, [(0, "x", 1)])
        b = Automaton.build([0, 1], ["y"], 0, [(0, "y", 1)])
        assert bounded_language(parallel_compose(a, b), 2) == {
            (), ("x",), ("y",), ("x", "y"), ("y", "x")}

    def test_marking_ignores_unmarked_components(self):
        a = Automaton.build([0, 1], "a", 0, [(0, "a", 1)], marked=[1])
        u = universal("a")
        assert marker_reachable(compose_all(a, u, u)) == (True, ("a",))

    def test_empty_component(self):
        assert compose_all(chain("a"), Automaton.empty(SYMS)).is_empty

    def test_state_cap(self):
        big = Automaton.build(range(30), ["x"], 0, [(i, "x", i + 1) for i in range(29)])
        with pytest.raises(SizeLimitError) as info:
            compose_all(big, universal(["x"]), max_states=10, stage="demo")
        assert info.value.stage == "demo"

    def test_attacked_loop_of_worked_instance(self):
        from fortress.commands import build_ce_attacked
        from fortress.supervisors import attack_bipartize, bipartize
        from fortress.verification import attacked_loop

        ab, g, s = running_example()
        bt_a = attack_bipartize(bipartize(s, ab), ab)
        ce_a = build_ce_attacked(ab)
        loop = attacked_loop(g, ce_a, bt_a, universal(ce_a.symbols))
        assert all(len(q) == 4 for q in loop.states)
        # unattacked runs remain available
        word = (ControlCommand("abc"), "a", ControlCommand("bcd"), "c")
        assert loop.accepts(word)


class TestSubsetConstruct:
    def test_full_observation_is_accessible_part(self):
        rng = random.Random(11)
        for _ in range(20):
            a = random_dfa(rng, SYMS)
            det = subset_construct(a, SYMS)
            assert all(len(q) == 1 for q in det.states)
            assert language_equal(det, a)
            assert len(det.states) == len(accessible(a).states)

    def test_worked_instance_initial_estimate(self):
        ab, g, s = running_example()
        b = subset_construct(compose_all(g, s), ab.observable)
        assert b.initial == frozenset({(0, 0), (5, 0)})
        assert {e for e in b.enabled(b.initial)} == {"a", "b"}

    @given(seeds)
    def test_self_loops_are_hidden_moves(self, seed):
        rng = random.Random(seed)
        a = random_dfa(rng, SYMS, n_states=6)
        observed = {"a"}
        det = subset_construct(a, observed)
        for est in det.states:
            for s in SYMS:
                if s in observed:
                    continue
                defined_somewhere = any(s in a.delta[q] for q in est)
                assert (det.successor(est, s) == est) == defined_somewhere

    def test_projection(self):
        a = chain("abca")
        p = project(a, {"a", "c"})
        assert bounded_language(p, 4) == {(), ("a",), ("a", "c"), ("a", "c", "a")}


class TestUnobservableReach:
    def test_nothing_hidden(self):
        a = chain("ab")
        assert unobservable_reach(a, 0, set()) == {0}

    def test_chain(self):
        a = chain("hh", ("h", "x"))
        assert unobservable_reach(a, 0, {"h"}) == {0, 1, 2}

    def test_unknown_state(self):
        with pytest.raises(AutomatonError):
            unobservable_reach(chain("a"), 99, {"a"})

    @given(seeds)
    def test_matches_closure_oracle(self, seed):
        rng = random.Random(seed)
        a = random_dfa(rng, SYMS, n_states=6)
        for q in a.states:
            assert unobservable_reach(a, q, {"b", "c"}) == hidden_closure(arcs_of(a), q, {"b", "c"})


class TestRemoveStates:
    def test_nothing_removed(self):
        a = chain("abc")
        assert remove_states(a, set()) == a

    def test_remove_initial(self):
        out = remove_states(chain("abc"), {0})
        assert out.is_empty
        assert not marker_reachable(out)[0]
        assert bounded_language(out, 3) == set()

    def test_cycle_interior(self):
        cyc = Automaton.build(range(4), SYMS, 0, [(i, "a", (i + 1) % 4) for i in range(4)])
        out = remove_states(cyc, {2})
        expected = [(q, s, t) for q, s, t in arcs_of(cyc) if 2 not in (q, t)]
        assert out.n_transitions == len(expected) == 2


class TestLanguages:
    def test_self_inclusion(self):
        a = chain("abc")
        assert language_included(a, a) == (True, None)

    def test_extra_transition(self):
        a = Automaton.build([0, 1], SYMS, 0, [(0, "a", 1), (0, "b", 1)])
        b = Automaton.build([0, 1], SYMS, 0, [(0, "a", 1)])
        assert language_included(a, b) == (False, ("b",))

    def test_two_spellings(self):
        one = chain("ab")
        two = Automaton.build(["p", "q", "r", "dead"], SYMS, "p",
                              [("p", "a", "q"), ("q", "b", "r")])
        assert language_equal(one, two)

    @settings(max_examples=60)
    @given(seeds)
    def test_against_bounded_enumeration(self, seed):
        rng = random.Random(seed)
        a, b = random_dfa(rng, SYMS, n_states=3), random_dfa(rng, SYMS, n_states=3)
        n = len(a.states) * len(b.states) + 1
        la, lb = bounded_language(a, n), bounded_language(b, n)
        inc, witness = language_included(a, b)
        assert inc == (la <= lb)
        if not inc:
            assert a.accepts(witness) and not b.accepts(witness)
        assert language_equal(a, b) == (la == lb)


class TestMarkerReachable:
    def test_no_marks(self):
        assert marker_reachable(chain("ab").with_marked(())) == (False, None)

    def test_initial_marked(self):
        assert marker_reachable(chain("ab").with_marked([0])) == (True, ())

    @given(seeds)
    def test_matches_bfs(self, seed):
        rng = random.Random(seed)
        a = random_dfa(rng, SYMS, n_states=6, density=0.3)
        found, witness = marker_reachable(a)
        expected = marked_reachable(arcs_of(a), a.initial, a.marked)
        assert found == (expected is not None)
        if found:
            assert len(witness) == expected
            assert a.run(witness) in a.marked
