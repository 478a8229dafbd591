"""Supervisor synthesis under partial observation and the fortification pipeline.

:func:`supcn_synthesize` is the workhorse: given a plant, a prefix-closed legal
language (as an automaton) and a control constraint with every controllable
symbol observable, it returns a supervisor whose closed loop realises the
supremal controllable and normal sublanguage of the legal behaviour.

:func:`fortify` strings the stages together: behaviour-preserving structure,
attack synthesis, command pruning, iterative clean-up and extraction.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .automata import (
    CONTROL, DETECT, Alphabet, Automaton, BipartiteAutomaton, compose_all, is_command,
    remove_states, subset_construct,
)
from .commands import DEFAULT_MAX_CONTROLLABLE, build_ce, build_ce_attacked, enumerate_commands
from .errors import ConsistencyError, ConstraintError, SizeLimitError
from .supervisors import (
    PickPolicy, as_bipartite, attack_bpns, bipartize, build_bpns, build_bps,
    extract_deterministic, strip_attack,
)

DEFAULT_MAX_STATES = 2_000_000

EXISTS = "exists"
NOT_EXISTS = "not-exists"
ALREADY_RESILIENT = "already-resilient"


@dataclass(frozen=True)
class ControlConstraint:
    """Which symbols a supervisor may disable and which it sees."""

    controllable: frozenset
    observable: frozenset

    def __init__(self, controllable, observable):
        object.__setattr__(self, "controllable", frozenset(controllable))
        object.__setattr__(self, "observable", frozenset(observable))
        loose = self.controllable - self.observable
        if loose:
            names = ", ".join(sorted(map(str, loose)))
            raise ConstraintError(f"controllable symbols must be observable: {names}")


_ILLEGAL = object()


def supcn_synthesize(plant: Automaton, legal: Automaton, cc: ControlConstraint, *,
                     max_states=None, stage="supcn") -> Automaton:
    """Supremal safe, controllable and normal supervisor for ``plant``.

    The plant is run in lockstep with the legal automaton; a run that leaves
    the legal automaton is illegal from then on.  Estimates of that product
    (sets of product states consistent with an observation) form a safety
    game: an estimate loses if it contains an illegal run or if some
    uncontrollable observable symbol leads to a losing estimate.  Because
    every controllable symbol is observable, the winning region of this game
    yields the supremal solution.

    The returned automaton is over ``plant.symbols``.  Unobservable symbols
    are self-loops everywhere and uncontrollable symbols are always defined,
    so it is a proper supervisor for the constraint.  It is empty when even
    the empty string cannot be kept legal.
    """
    symbols = plant.symbols
    if plant.is_empty or legal.is_empty:
        return Automaton.empty(symbols)
    legal_syms = set(legal.symbols)
    hidden = [s for s in symbols if s not in cc.observable]
    visible = [s for s in symbols if s in cc.observable]
    uncontrollable = {s for s in visible if s not in cc.controllable}

    succ_cache: Dict[Any, Dict] = {}

    def successors(node):
        out = succ_cache.get(node)
        if out is None:
            p, h = node
            out = {}
            for sym, tp in plant.delta[p].items():
                if h is _ILLEGAL or sym not in legal_syms:
                    th = h
                else:
                    th = legal.delta[h].get(sym, _ILLEGAL)
                out[sym] = (tp, th)
            succ_cache[node] = out
        return out

    def closure(nodes):
        reach = set(nodes)
        stack = list(reach)
        while stack:
            node = stack.pop()
            out = successors(node)
            for sym in hidden:
                t = out.get(sym)
                if t is not None and t not in reach:
                    reach.add(t)
                    stack.append(t)
        return frozenset(reach)

    def is_bad(est):
        return any(h is _ILLEGAL for _, h in est)

    init = closure([(plant.initial, legal.initial)])
    edges: Dict[frozenset, Dict] = {}
    order = [init]
    bad = set()
    queue = deque([init])
    seen = {init}
    while queue:
        est = queue.popleft()
        if is_bad(est):
            bad.add(est)
            edges[est] = {}
            continue
        out = {}
        for sym in visible:
            succ = set()
            for node in est:
                t = successors(node).get(sym)
                if t is not None:
                    succ.add(t)
            if not succ:
                continue
            tgt = closure(succ)
            out[sym] = tgt
            if tgt not in seen:
                seen.add(tgt)
                order.append(tgt)
                queue.append(tgt)
                if max_states is not None and len(order) > max_states:
                    raise SizeLimitError(stage, max_states)
        edges[est] = out

    # greatest fixpoint: drop estimates that cannot prevent reaching a losing one
    preds: Dict[frozenset, List] = {est: [] for est in order}
    for est in order:
        for sym, tgt in edges[est].items():
            if sym in uncontrollable:
                preds[tgt].append(est)
    losing = set(bad)
    work = list(bad)
    while work:
        est = work.pop()
        for src in preds[est]:
            if src not in losing:
                losing.add(src)
                work.append(src)
    if init in losing:
        return Automaton.empty(symbols)

    index = {init: 0}
    states = [init]
    queue = deque([init])
    while queue:
        est = queue.popleft()
        for tgt in edges[est].values():
            if tgt not in losing and tgt not in index:
                index[tgt] = len(states)
                states.append(tgt)
                queue.append(tgt)
    delta = {}
    for est in states:
        out = {}
        for sym in symbols:
            if sym in cc.observable:
                tgt = edges[est].get(sym)
                if tgt is None:
                    if sym not in cc.controllable:
                        out[sym] = index[est]
                elif tgt not in losing:
                    out[sym] = index[tgt]
            else:
                out[sym] = index[est]
        delta[index[est]] = out
    return Automaton(range(len(states)), symbols, 0, delta)


def _commands_of(a: Automaton):
    return [s for s in a.symbols if is_command(s)]


def _normalize(plant: BipartiteAutomaton, r: Automaton, *, nested: bool, max_states=None,
               stage="normalize") -> BipartiteAutomaton:
    """Restore the bipartite shape of a synthesis result by composing it with its plant.

    Product states are relabelled ``(root, j)`` where ``root`` is the
    underlying behaviour-preserving state and ``j`` numbers its copies.
    """
    if r.is_empty:
        return BipartiteAutomaton.empty(plant.symbols)
    prod = compose_all(plant, r, max_states=max_states, stage=stage)
    copies: Dict[Any, int] = {}
    mapping = {}
    for q in prod.states:
        root = q[0][0] if nested else q[0]
        j = copies.get(root, 0)
        copies[root] = j + 1
        mapping[q] = (root, j)
    out = as_bipartite(prod, {q: plant.kinds[q[0]] for q in prod.states})
    return out.relabel(mapping)


def procedure1_attack_structure(g: Automaton, ce_a: Automaton, bpns_a: BipartiteAutomaton,
                                alphabet: Alphabet, *, max_states=None) -> Automaton:
    """Supremal covert attack structure against the attacked bipartite structure.

    Plant: ``g || ce_a || bpns_a`` (damage states lift from ``g``).  Legal:
    the same product without states whose supervisor component is the detect
    state.  The attacker disables attackable events and observes attacker-
    observable events plus all commands.
    """
    p = compose_all(g, ce_a, bpns_a, max_states=max_states, stage="attack product")
    if p.is_empty:
        return Automaton.empty(p.symbols)
    detect = [q for q in p.states if bpns_a.kinds[q[2]] == DETECT]
    legal = remove_states(p, detect)
    cc = ControlConstraint(alphabet.attacker_controllable,
                           alphabet.attacker_observable | set(_commands_of(bpns_a)))
    return supcn_synthesize(p, legal, cc, max_states=max_states, stage="attack synthesis")


_SINK = ("sink",)


def legal_without_damage(p: Automaton) -> Automaton:
    """Damage-free legal automaton: marked states cut, all other gaps lead to a universal sink."""
    if p.is_empty or p.initial in p.marked:
        return Automaton.empty(p.symbols)
    states = [q for q in p.states if q not in p.marked]
    delta = {}
    for q in states:
        out = {}
        src = p.delta[q]
        for sym in p.symbols:
            t = src.get(sym)
            if t is None:
                out[sym] = _SINK
            elif t not in p.marked:
                out[sym] = t
        delta[q] = out
    delta[_SINK] = {sym: _SINK for sym in p.symbols}
    return Automaton(states + [_SINK], p.symbols, p.initial, delta)


def procedure2_prune_commands(g: Automaton, ce_a: Automaton, bpns_a: BipartiteAutomaton,
                              attack_struct: Automaton, alphabet: Alphabet, *,
                              max_states=None) -> BipartiteAutomaton:
    """Remove commands that let the synthesized attacker reach damage."""
    p = compose_all(g, ce_a, bpns_a, attack_struct, max_states=max_states, stage="pruning product")
    legal = legal_without_damage(p)
    gamma = _commands_of(bpns_a)
    cc = ControlConstraint(gamma, alphabet.observable | set(gamma))
    r = supcn_synthesize(bpns_a, legal, cc, max_states=max_states, stage="command pruning")
    return _normalize(bpns_a, r, nested=False, max_states=max_states, stage="command pruning")


@dataclass
class Procedure3Result:
    fns: BipartiteAutomaton
    iterates: List[BipartiteAutomaton]
    removed: List[List[Any]]

    @property
    def iterations(self) -> int:
        return len(self.removed)


def procedure3_iterate(s0: BipartiteAutomaton, alphabet: Alphabet, *, max_states=None) -> Procedure3Result:
    """Repeatedly cut control states without commands and re-synthesize."""
    current = s0
    iterates = [s0]
    removed = []
    gamma = _commands_of(s0)
    cc = ControlConstraint(gamma, alphabet.observable | set(gamma))
    while not current.is_empty:
        dead = [q for q in current.states if current.kinds[q] == CONTROL and not current.commands_at(q)]
        if not dead:
            break
        if current.initial in dead:
            # nothing survives; no synthesis round is needed to see that
            current = BipartiteAutomaton.empty(current.symbols)
            break
        removed.append(dead)
        legal = remove_states(current, dead)
        r = supcn_synthesize(current, legal, cc, max_states=max_states, stage="iteration")
        current = _normalize(current, r, nested=True, max_states=max_states, stage="iteration")
        iterates.append(current)
    return Procedure3Result(current, iterates, removed)


@dataclass
class FortifyOptions:
    pick: str = "lex-min"
    max_states: int = DEFAULT_MAX_STATES
    resilience_precheck: bool = True
    max_controllable: int = DEFAULT_MAX_CONTROLLABLE
    verify: bool = True


@dataclass
class FortifyOutcome:
    decision: str
    artifacts: Dict[str, Automaton] = field(default_factory=dict)
    stats: Dict[str, Any] = field(default_factory=dict)
    precheck: Any = None

    @property
    def fs(self) -> Optional[BipartiteAutomaton]:
        return self.artifacts.get("FS")

    @property
    def fns(self) -> Optional[BipartiteAutomaton]:
        return self.artifacts.get("FNS")

    @property
    def exists(self) -> bool:
        return self.decision in (EXISTS, ALREADY_RESILIENT)


def has_initial_command(fns: BipartiteAutomaton) -> bool:
    return (not fns.is_empty and fns.kinds[fns.initial] == CONTROL
            and bool(fns.commands_at(fns.initial)))


class _Stages:
    def __init__(self, outcome):
        self.outcome = outcome
        self.rows = outcome.stats.setdefault("stages", [])

    def record(self, name, a, started):
        self.outcome.artifacts[name] = a
        self.rows.append({"stage": name, "states": len(a.states), "transitions": a.n_transitions,
                          "seconds": round(time.perf_counter() - started, 4)})
        return a


def fortify(g: Automaton, s: Automaton, alphabet: Alphabet, options: Optional[FortifyOptions] = None) -> FortifyOutcome:
    """Decide whether a fortified supervisor exists and, if so, build one."""
    from . import verification

    opts = options or FortifyOptions()
    policy = PickPolicy(opts.pick)
    cap = opts.max_states
    outcome = FortifyOutcome(decision=NOT_EXISTS)
    stages = _Stages(outcome)
    commands = enumerate_commands(alphabet, opts.max_controllable)
    outcome.stats["commands"] = len(commands)

    if opts.resilience_precheck:
        t0 = time.perf_counter()
        report = verification.check_resilient(g, s, alphabet, commands=commands, max_states=cap)
        outcome.precheck = report
        outcome.stats["precheck_seconds"] = round(time.perf_counter() - t0, 4)
        if report.verdict:
            outcome.decision = ALREADY_RESILIENT
            stages.record("FS", bipartize(s, alphabet, commands), t0)
            return outcome

    t0 = time.perf_counter()
    loop = compose_all(g, s, max_states=cap, stage="closed loop")
    b = stages.record("B", subset_construct(loop, alphabet.observable, max_states=cap, stage="B"), t0)
    t0 = time.perf_counter()
    bps = stages.record("BPS", build_bps(b, g, alphabet, commands), t0)
    t0 = time.perf_counter()
    ce = build_ce(alphabet, commands)
    bpns = stages.record("BPNS", build_bpns(bps, ce, max_states=cap), t0)
    t0 = time.perf_counter()
    bpns_a = stages.record("BPNS_A", attack_bpns(bpns, alphabet), t0)
    ce_a = build_ce_attacked(alphabet, commands)

    t0 = time.perf_counter()
    a_hat = stages.record("A_hat", procedure1_attack_structure(g, ce_a, bpns_a, alphabet, max_states=cap), t0)
    t0 = time.perf_counter()
    s0a = stages.record("S0_A", procedure2_prune_commands(g, ce_a, bpns_a, a_hat, alphabet, max_states=cap), t0)
    t0 = time.perf_counter()
    s0 = stages.record("S0", strip_attack(s0a, alphabet), t0)
    t0 = time.perf_counter()
    result = procedure3_iterate(s0, alphabet, max_states=cap)
    for k, sk in enumerate(result.iterates[1:], start=1):
        outcome.artifacts[f"S{k}"] = sk
    fns = stages.record("FNS", result.fns, t0)
    outcome.stats["procedure3_iterations"] = result.iterations

    if not has_initial_command(fns):
        outcome.decision = NOT_EXISTS
        return outcome
    outcome.decision = EXISTS
    t0 = time.perf_counter()
    fs = stages.record("FS", extract_deterministic(fns, policy), t0)
    if opts.verify:
        res = verification.check_resilient(g, fs, alphabet, commands=commands, max_states=cap)
        eq = verification.check_control_equivalence(g, s, fs, alphabet)
        if not res.verdict or not eq.verdict:
            raise ConsistencyError(
                f"extracted supervisor failed verification (resilient={res.verdict}, "
                f"equivalent={eq.verdict})")
    return outcome

