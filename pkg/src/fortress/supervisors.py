"""Supervisor-side constructions.

A plain supervisor is an :class:`Automaton` over the plant events.  Its
bipartite form alternates control states, which issue a command, and
reaction states, which wait for the next observation.  This module builds the
bipartite form, its attacked variant, the behaviour-preserving structures that
encode every control-equivalent supervisor, and the extraction of a single
deterministic supervisor from a command-nondeterministic one.
"""
from __future__ import annotations

import random
from collections import deque

from .automata import (
    CONTROL, DETECT, DUMP, REACTION, Alphabet, Automaton, BipartiteAutomaton, ControlCommand,
    accessible, compose_all, is_command, subset_construct, word_automaton,
)
from .commands import CE_INIT, enumerate_commands, universe
from .errors import AutomatonError, ExtractionError, InvalidSupervisorError
from .report import WELL_FORMED, VerificationReport

COM = "com"
REA = "rea"
DETECT_STATE = "detect"
DUMP_STATE = "dump"


def _gamma(alphabet, commands):
    return enumerate_commands(alphabet) if commands is None else list(commands)


def validate_supervisor(s: Automaton, alphabet: Alphabet) -> VerificationReport:
    """Check that ``s`` enables every uncontrollable event and only self-loops unobservables."""
    violations = []
    for q in s.states:
        out = s.delta[q]
        for sym in out:
            if sym not in alphabet:
                violations.append((q, sym, "symbol is not a plant event"))
        for e in alphabet.names:
            if e in alphabet.uncontrollable and e not in out:
                violations.append((q, e, "uncontrollable event not enabled"))
            if e in alphabet.unobservable and e in out and out[e] != q:
                violations.append((q, e, "unobservable event is not a self-loop"))
    return VerificationReport(WELL_FORMED, not violations, violations=violations,
                              artifacts={"supervisor": s})


def _require_valid(s, alphabet):
    report = validate_supervisor(s, alphabet)
    if not report:
        q, e, why = report.violations[0]
        raise InvalidSupervisorError(
            f"invalid supervisor ({len(report.violations)} violations), first at state {q!r}, "
            f"event {e}: {why}")


def bipartize(s: Automaton, alphabet: Alphabet, commands=None) -> BipartiteAutomaton:
    """Bipartite form of a plain supervisor: states ``("com", q)`` and ``("rea", q)``."""
    _require_valid(s, alphabet)
    gamma = _gamma(alphabet, commands)
    symbols = universe(alphabet, gamma)
    known = set(gamma)
    states, delta, kinds = [], {}, {}
    for q in s.states:
        com, rea = (COM, q), (REA, q)
        states += [com, rea]
        kinds[com], kinds[rea] = CONTROL, REACTION
        cmd = ControlCommand(s.delta[q])
        if cmd not in known:
            raise InvalidSupervisorError(f"state {q!r} issues {cmd}, which is not a command")
        delta[com] = {cmd: rea}
        out = {}
        for e in alphabet.names:
            t = s.delta[q].get(e)
            if t is None:
                continue
            out[e] = rea if e in alphabet.unobservable else (COM, t)
        delta[rea] = out
    if s.is_empty:
        return BipartiteAutomaton.empty(symbols)
    return BipartiteAutomaton(states, symbols, (COM, s.initial), delta, kinds=kinds)


def _attack(bt: BipartiteAutomaton, alphabet: Alphabet) -> BipartiteAutomaton:
    if bt.is_empty:
        return bt
    if DETECT_STATE in bt.delta or any(k == DETECT for k in bt.kinds.values()):
        raise AutomatonError("automaton already has a detect state")
    hidden_attack = [e for e in alphabet.names
                     if e in alphabet.attacker_controllable and e in alphabet.unobservable]
    observable = [e for e in alphabet.names if e in alphabet.observable]
    delta = {}
    for q in bt.states:
        out = dict(bt.delta[q])
        if bt.kinds[q] == REACTION:
            for e in hidden_attack:
                out.setdefault(e, q)
            for e in observable:
                out.setdefault(e, DETECT_STATE)
        delta[q] = out
    delta[DETECT_STATE] = {}
    kinds = dict(bt.kinds)
    kinds[DETECT_STATE] = DETECT
    return BipartiteAutomaton(bt.states + (DETECT_STATE,), bt.symbols, bt.initial, delta,
                              bt.marked, kinds=kinds)


def attack_bipartize(bt: BipartiteAutomaton, alphabet: Alphabet) -> BipartiteAutomaton:
    """Bipartite supervisor under attack.

    Reaction states gain self-loops for attackable unobservable events and
    arcs to a fresh ``"detect"`` state for every observation they did not
    expect.
    """
    return _attack(bt, alphabet)


def attack_bpns(bpns: BipartiteAutomaton, alphabet: Alphabet) -> BipartiteAutomaton:
    """Attacked behaviour-preserving structure (same augmentation as :func:`attack_bipartize`)."""
    return _attack(bpns, alphabet)


def admits(b: Automaton, g: Automaton, estimate, gamma: ControlCommand):
    """The two admission conditions for issuing ``gamma`` at ``estimate``.

    Returns ``(c1, c2)``: ``c1`` asks that the command covers everything the
    closed loop does next, ``c2`` that no plant state in the estimate could
    execute an enabled event the closed loop never executes.
    """
    en_b = {s for s in b.delta[estimate] if not is_command(s)}
    c1 = en_b <= gamma.members
    c2 = all(set(g.delta[qg]) & gamma.members <= en_b for qg, _ in estimate)
    return c1, c2


def build_bps(b: Automaton, g: Automaton, alphabet: Alphabet, commands=None) -> BipartiteAutomaton:
    """Bipartite behaviour-preserving structure over the estimates of ``b``.

    ``b`` must be the subset construction of the closed loop ``g || s`` over
    the observable events, so each of its states is a set of
    ``(plant state, supervisor state)`` pairs.
    """
    gamma = _gamma(alphabet, commands)
    symbols = universe(alphabet, gamma)
    if b.is_empty:
        return BipartiteAutomaton.empty(symbols)
    for est in b.states:
        if not isinstance(est, frozenset) or not est or not all(
                isinstance(m, tuple) and len(m) == 2 and m[0] in g.delta for m in est):
            raise AutomatonError(f"estimate {est!r} does not carry (plant, supervisor) pairs")
    states, delta, kinds = [], {}, {}
    for est in b.states:
        com, rea = (COM, est), (REA, est)
        states += [com, rea]
        kinds[com], kinds[rea] = CONTROL, REACTION
        delta[com] = {c: rea for c in gamma if all(admits(b, g, est, c))}
        out = {}
        for e in alphabet.names:
            if e in alphabet.unobservable:
                out[e] = rea
            else:
                t = b.delta[est].get(e)
                out[e] = DUMP_STATE if t is None else (COM, t)
        delta[rea] = out
    states.append(DUMP_STATE)
    kinds[DUMP_STATE] = DUMP
    delta[DUMP_STATE] = {sym: DUMP_STATE for sym in symbols}
    bps = BipartiteAutomaton(states, symbols, (COM, b.initial), delta, kinds=kinds)
    return accessible(bps)


def build_bpns(bps: BipartiteAutomaton, ce: Automaton, max_states=None) -> BipartiteAutomaton:
    """``bps || ce``; a state is a control state exactly when CE is back at ``"init"``."""
    prod = compose_all(bps, ce, max_states=max_states, stage="BPNS")
    kinds = {q: CONTROL if q[1] == CE_INIT else REACTION for q in prod.states}
    return as_bipartite(prod, kinds)


def as_bipartite(a: Automaton, kinds) -> BipartiteAutomaton:
    return BipartiteAutomaton(a.states, a.symbols, a.initial, a.delta, a.marked, kinds=kinds)


def strip_attack(s0a: BipartiteAutomaton, alphabet: Alphabet) -> BipartiteAutomaton:
    """Drop attacker-induced behaviour: after each command keep only the events it enables."""
    if s0a.is_empty:
        return s0a
    delta = {q: {} for q in s0a.states}
    for q in s0a.states:
        for sym, tgt in s0a.delta[q].items():
            if not is_command(sym):
                continue
            delta[q][sym] = tgt
            after = s0a.delta[tgt]
            for e in alphabet.names:
                if e not in sym:
                    continue
                if e in alphabet.unobservable:
                    delta[tgt][e] = tgt
                elif e in after:
                    delta[tgt][e] = after[e]
    out = BipartiteAutomaton(s0a.states, s0a.symbols, s0a.initial, delta, s0a.marked,
                             kinds=s0a.kinds)
    return accessible(out)


class PickPolicy:
    """How to choose one command per control state.

    ``"lex-min"`` takes the command with the smallest bitmask; ``"random:<seed>"``
    draws uniformly with a seeded generator, visiting states breadth-first so
    the result only depends on the seed.
    """

    def __init__(self, spec="lex-min"):
        if isinstance(spec, PickPolicy):
            spec = spec.spec
        self.spec = spec
        if spec == "lex-min":
            self._rng = None
        elif isinstance(spec, str) and spec.startswith("random:"):
            try:
                seed = int(spec.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad random seed in pick policy {spec!r}") from None
            self._rng = random.Random(seed)
        else:
            raise ValueError(f"unknown pick policy {spec!r} (use lex-min or random:<seed>)")

    def __repr__(self):
        return f"PickPolicy({self.spec!r})"

    def choose(self, options):
        """``options`` must already be in bitmask order."""
        if self._rng is None:
            return options[0]
        return self._rng.choice(options)


def _resolve(bt: BipartiteAutomaton, policy) -> BipartiteAutomaton:
    policy = PickPolicy(policy)
    rank = {s: i for i, s in enumerate(bt.symbols)}
    delta = {}
    queue = deque([bt.initial])
    seen = {bt.initial}
    while queue:
        q = queue.popleft()
        out = bt.delta[q]
        if bt.kinds[q] == CONTROL:
            options = sorted(bt.commands_at(q), key=rank.__getitem__)
            if not options:
                raise ExtractionError(f"control state {q!r} has no command to pick")
            pick = policy.choose(options)
            new = {sym: t for sym, t in out.items() if not is_command(sym)}
            new[pick] = out[pick]
        else:
            new = dict(out)
        delta[q] = new
        for t in new.values():
            if t not in seen:
                seen.add(t)
                queue.append(t)
    states = [q for q in bt.states if q in seen]
    return BipartiteAutomaton(states, bt.symbols, bt.initial, delta, bt.marked & seen,
                              kinds={q: bt.kinds[q] for q in states})


def extract_deterministic(fns: BipartiteAutomaton, policy="lex-min") -> BipartiteAutomaton:
    """Keep one command at every reachable control state; accessible part only."""
    if fns.is_empty:
        raise ExtractionError("cannot extract a supervisor from the empty structure")
    return _resolve(fns, policy)


def _command_observation_kinds(det: Automaton):
    """Tag states of a bipartite-shaped determinisation by the symbol that entered them."""
    kinds = {det.initial: CONTROL}
    for q, sym, t in det.transitions():
        kinds.setdefault(t, REACTION if is_command(sym) else CONTROL)
    return kinds


def witness_supervisor(fns: BipartiteAutomaton, t, alphabet: Alphabet, policy="lex-min") -> BipartiteAutomaton:
    """Deterministic supervisor inside ``fns`` whose language contains ``t``.

    A guide automaton follows ``t`` while it is being observed and allows any
    command once the observations leave ``t``.  Its product with ``fns`` is
    resolved with the policy; along ``t`` the choice is forced.
    """
    t = tuple(t)
    if fns.is_empty or not fns.accepts(t):
        raise ExtractionError(f"string {' '.join(map(str, t))!r} is not in the structure's language")
    gamma = [s for s in fns.symbols if is_command(s)]
    observed = set(alphabet.observable) | set(gamma)
    det = subset_construct(word_automaton(t, fns.symbols), observed)
    tkinds = _command_observation_kinds(det)
    obs = ("guide", "obs")
    loose = {c: ("guide", c) for c in gamma}
    delta = {q: dict(det.delta[q]) for q in det.states}
    for q in det.states:
        out = delta[q]
        if tkinds[q] == REACTION:
            for e in alphabet.names:
                if e not in out:
                    out[e] = q if e in alphabet.unobservable else obs
        elif not any(is_command(s) for s in out):
            for c in gamma:
                out[c] = loose[c]
    delta[obs] = dict(loose)
    for c, qc in loose.items():
        delta[qc] = {e: (qc if e in alphabet.unobservable else obs) for e in alphabet.names if e in c}
    guide = Automaton(list(det.states) + [obs] + list(loose.values()), fns.symbols, det.initial, delta)
    prod = compose_all(guide, fns, stage="witness product")
    kinds = {q: fns.kinds[q[1]] for q in prod.states}
    return _resolve(as_bipartite(prod, kinds), policy)


def debipartize(bt: BipartiteAutomaton, alphabet: Alphabet) -> Automaton:
    """Plain supervisor over the plant events from a deterministic bipartite supervisor.

    States are the reachable control states.  An event is enabled when the
    command contains it and the reaction state after the command accepts it.
    """
    if bt.is_empty:
        return Automaton.empty(alphabet.names)
    delta = {}
    order = []
    queue = deque([bt.initial])
    seen = {bt.initial}
    while queue:
        c = queue.popleft()
        order.append(c)
        cmds = bt.commands_at(c)
        if bt.kinds.get(c) != CONTROL:
            raise InvalidSupervisorError(f"state {c!r} is reached by an observation but is not a control state")
        if len(cmds) > 1:
            raise InvalidSupervisorError(f"control state {c!r} issues {len(cmds)} commands")
        out = {}
        if cmds:
            r = bt.delta[c][cmds[0]]
            after = bt.delta[r]
            for e in alphabet.names:
                if e not in cmds[0] or e not in after:
                    continue
                if e in alphabet.unobservable:
                    out[e] = c
                else:
                    nxt = after[e]
                    out[e] = nxt
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
        delta[c] = out
    return Automaton(order, alphabet.names, bt.initial, delta)


def check_bipartite(bt: BipartiteAutomaton, alphabet: Alphabet) -> VerificationReport:
    """Scan the bipartite-shape invariants and report every offending arc."""
    violations = []
    if not bt.is_empty and bt.kinds.get(bt.initial) != CONTROL:
        violations.append((bt.initial, "-", "initial state is not a control state"))
    for q in bt.states:
        kind = bt.kinds.get(q)
        if kind not in (CONTROL, REACTION, DETECT, DUMP):
            violations.append((q, "-", f"unknown kind {kind!r}"))
            continue
        for sym, tgt in bt.delta[q].items():
            if kind == CONTROL and not is_command(sym):
                violations.append((q, sym, "event defined at a control state"))
            elif kind == REACTION and is_command(sym):
                violations.append((q, sym, "command defined at a reaction state"))
            elif kind == REACTION and sym in alphabet.unobservable and tgt != q:
                violations.append((q, sym, "unobservable event is not a self-loop"))
    return VerificationReport(WELL_FORMED, not violations, violations=violations,
                              artifacts={"bipartite": bt})
