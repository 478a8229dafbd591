"""Checkers for covertness, damage reachability, resilience and control equivalence.

Every checker returns a :class:`~fortress.report.VerificationReport`.  Witnesses
are shortest strings found by breadth-first search and can be replayed on the
automaton stored under ``artifacts``.
"""
from __future__ import annotations

from collections import deque

from .automata import (
    DETECT, Alphabet, Automaton, BipartiteAutomaton, accessible, compose_all, distinguishing_word,
    is_command, language_included, marker_reachable, project, shortest_word_to, subset_construct,
)
from .commands import build_ce, build_ce_attacked, enumerate_commands
from .errors import AttackerError
from .report import (
    CONTROL_EQUIVALENT, COVERT, DAMAGE_REACHABLE, RESILIENT, WELL_FORMED, VerificationReport,
)
from .supervisors import attack_bipartize, bipartize, debipartize
from .synthesis import procedure1_attack_structure


def validate_attacker(attacker: Automaton, alphabet: Alphabet) -> VerificationReport:
    """Attacker may only disable attackable events and only move on what it observes."""
    violations = []
    for q in attacker.states:
        out = attacker.delta[q]
        for sym in attacker.symbols:
            if is_command(sym):
                if sym not in out:
                    violations.append((q, sym, "command not accepted"))
                continue
            if sym not in alphabet.attacker_controllable and sym not in out:
                violations.append((q, sym, "non-attackable event disabled"))
            if sym not in alphabet.attacker_observable and sym in out and out[sym] != q:
                violations.append((q, sym, "unobserved event changes state"))
    return VerificationReport(WELL_FORMED, not violations, violations=violations,
                              artifacts={"attacker": attacker})


def _require_attacker(attacker, alphabet):
    report = validate_attacker(attacker, alphabet)
    if not report:
        q, sym, why = report.violations[0]
        raise AttackerError(f"malformed attacker at state {q!r}, symbol {sym}: {why}")


def attacked_loop(g: Automaton, ce_a: Automaton, bt_a: BipartiteAutomaton, attacker: Automaton,
                  max_states=None) -> Automaton:
    """Closed loop under attack; product states are ``(plant, ce, supervisor, attacker)``."""
    return compose_all(g, ce_a, bt_a, attacker, max_states=max_states, stage="attacked loop")


def check_covert(g, ce_a, bt_a: BipartiteAutomaton, attacker, alphabet: Alphabet, *,
                 max_states=None) -> VerificationReport:
    _require_attacker(attacker, alphabet)
    loop = attacked_loop(g, ce_a, bt_a, attacker, max_states)
    witness = shortest_word_to(loop, lambda q: bt_a.kinds.get(q[2]) == DETECT)
    return VerificationReport(COVERT, witness is None, witness=witness,
                              artifacts={"attacked_loop": loop})


def check_damage_reachable(g, ce_a, bt_a: BipartiteAutomaton, attacker, alphabet: Alphabet, *,
                           max_states=None) -> VerificationReport:
    _require_attacker(attacker, alphabet)
    loop = attacked_loop(g, ce_a, bt_a, attacker, max_states)
    found, witness = marker_reachable(loop)
    return VerificationReport(DAMAGE_REACHABLE, found, witness=witness,
                              artifacts={"attacked_loop": loop})


def _as_bipartite(s, alphabet, commands):
    if isinstance(s, BipartiteAutomaton):
        return s
    return bipartize(s, alphabet, commands)


def _as_plain(s, alphabet):
    if isinstance(s, BipartiteAutomaton):
        return debipartize(s, alphabet)
    return s


def check_resilient(g: Automaton, s, alphabet: Alphabet, *, commands=None,
                    max_states=None) -> VerificationReport:
    """Decide resilience by synthesizing the most permissive covert attacker.

    ``s`` may be a plain supervisor or a deterministic bipartite one.  The
    supervisor is resilient exactly when no damage state is reachable under
    that attacker; otherwise the witness is a shortest covert damage string.
    """
    if commands is None:
        commands = enumerate_commands(alphabet)
    bt_a = attack_bipartize(_as_bipartite(s, alphabet, commands), alphabet)
    ce_a = build_ce_attacked(alphabet, commands)
    a_hat = procedure1_attack_structure(g, ce_a, bt_a, alphabet, max_states=max_states)
    loop = attacked_loop(g, ce_a, bt_a, a_hat, max_states)
    found, witness = marker_reachable(loop)
    return VerificationReport(RESILIENT, not found, witness=witness,
                              artifacts={"attacker": a_hat, "attacked_loop": loop})


def check_control_equivalence(g: Automaton, s, s2, alphabet: Alphabet) -> VerificationReport:
    """Compare the observation-level closed-loop behaviours of two supervisors."""
    b1 = subset_construct(compose_all(g, _as_plain(s, alphabet)), alphabet.observable)
    b2 = subset_construct(compose_all(g, _as_plain(s2, alphabet)), alphabet.observable)
    witness = distinguishing_word(b1, b2)
    return VerificationReport(CONTROL_EQUIVALENT, witness is None, witness=witness,
                              artifacts={"estimates": b1, "estimates_other": b2})


def check_language_equivalence(g: Automaton, s, s2, alphabet: Alphabet) -> VerificationReport:
    """Direct comparison of the two closed-loop languages."""
    l1 = compose_all(g, _as_plain(s, alphabet))
    l2 = compose_all(g, _as_plain(s2, alphabet))
    witness = distinguishing_word(l1, l2)
    return VerificationReport(CONTROL_EQUIVALENT, witness is None, witness=witness,
                              artifacts={"closed_loop": l1, "closed_loop_other": l2})


def bipartite_behaviour(g: Automaton, bt: BipartiteAutomaton, alphabet: Alphabet, commands=None) -> Automaton:
    """Plant-event projection of ``g || CE || bt`` as a deterministic automaton."""
    if commands is None:
        commands = [sym for sym in bt.symbols if is_command(sym)]
    ce = build_ce(alphabet, commands)
    return project(compose_all(g, ce, bt), alphabet.names)


def check_bipartite_equivalence(g: Automaton, bt: BipartiteAutomaton, bt2: BipartiteAutomaton,
                                alphabet: Alphabet, commands=None) -> VerificationReport:
    p1 = bipartite_behaviour(g, bt, alphabet, commands)
    p2 = bipartite_behaviour(g, bt2, alphabet, commands)
    witness = distinguishing_word(p1, p2)
    return VerificationReport(CONTROL_EQUIVALENT, witness is None, witness=witness,
                              artifacts={"projection": p1, "projection_other": p2})


# exact language-property checks for synthesis results


def closed_loop(r: Automaton, plant: Automaton) -> Automaton:
    return accessible(compose_all(r, plant))


def is_controllable(k: Automaton, plant: Automaton, uncontrollable):
    """``(True, None)`` if no uncontrollable plant step escapes L(k), else a witness."""
    if k.is_empty:
        return True, None
    uncontrollable = [s for s in plant.symbols if s in set(uncontrollable)]
    start = (k.initial, plant.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        qk, qp = node
        if qp is None:
            continue
        for sym in uncontrollable:
            if sym in plant.delta[qp] and sym not in k.delta[qk]:
                return False, _unwind(parent, node) + (sym,)
        for sym, tk in k.delta[qk].items():
            nxt = (tk, plant.delta[qp].get(sym))
            if nxt not in parent:
                parent[nxt] = (node, sym)
                queue.append(nxt)
    return True, None


def is_normal(k: Automaton, plant: Automaton, observable):
    """``(True, None)`` if L(k) is normal w.r.t. the plant and observation, else a witness.

    The witness is a plant string outside L(k) whose observation is the
    observation of some string in L(k).
    """
    if k.is_empty:
        return True, None
    observable = set(observable)
    est = subset_construct(k, observable)
    start = (est.initial, plant.initial, k.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        x, qp, qk = node
        if qk is None:
            return False, _unwind(parent, node)
        for sym, tp in plant.delta[qp].items():
            if sym in observable:
                nx = est.delta[x].get(sym)
                if nx is None:
                    continue
            else:
                nx = x
            nxt = (nx, tp, k.delta[qk].get(sym))
            if nxt not in parent:
                parent[nxt] = (node, sym)
                queue.append(nxt)
    return True, None


def is_safe(k: Automaton, legal: Automaton):
    return language_included(k, legal)


def _unwind(parent, node):
    word = []
    while parent[node] is not None:
        node, sym = parent[node]
        word.append(sym)
    return tuple(reversed(word))
