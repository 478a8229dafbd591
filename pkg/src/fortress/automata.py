"""Deterministic partial automata and the constructions everything else uses.

Symbols are either event names (``str``) or :class:`ControlCommand` values, so
plant events and control commands share one symbol universe and compose
uniformly.  Automata are treated as immutable once built; every operation
returns a new value.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .errors import AlphabetError, AutomatonError, SizeLimitError

State = Hashable


@dataclass(frozen=True)
class ControlCommand:
    """A control command: the set of events a supervisor enables."""

    members: frozenset

    def __init__(self, members: Iterable[str]):
        object.__setattr__(self, "members", frozenset(members))

    def __contains__(self, event):
        return event in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __str__(self):
        return "{" + ",".join(sorted(self.members)) + "}"

    def __repr__(self):
        return f"ControlCommand({str(self)})"


Symbol = Union[str, ControlCommand]
Word = Tuple[Symbol, ...]


def is_command(symbol) -> bool:
    return isinstance(symbol, ControlCommand)


def format_word(word: Optional[Sequence[Symbol]]) -> str:
    if word is None:
        return "-"
    if not word:
        return "ε"
    return " ".join(str(s) for s in word)


@dataclass(frozen=True)
class Event:
    name: str
    controllable: bool = False
    observable: bool = True
    attacker_observable: bool = False
    attacker_controllable: bool = False


class Alphabet:
    """Ordered event universe with the six derived partitions.

    >>> ab = Alphabet([Event("a", controllable=True), Event("u")])
    >>> sorted(ab.uncontrollable)
    ['u']
    """

    def __init__(self, events: Iterable[Event]):
        self.events = tuple(events)
        self.names = tuple(e.name for e in self.events)
        seen = set()
        for e in self.events:
            if not isinstance(e.name, str) or not e.name or any(ch.isspace() for ch in e.name):
                raise AlphabetError(f"event name must be a non-empty token, got {e.name!r}")
            if e.name in seen:
                raise AlphabetError(f"duplicate event name {e.name!r}")
            if any(ch in e.name for ch in "{},"):
                raise AlphabetError(f"event name {e.name!r} collides with command syntax")
            seen.add(e.name)
            if e.attacker_controllable and not e.attacker_observable:
                raise AlphabetError(
                    f"event {e.name!r} is attacker-controllable but not attacker-observable"
                )
            if e.attacker_controllable and not e.controllable:
                raise AlphabetError(f"event {e.name!r} is attacker-controllable but not controllable")
        self._index = {n: i for i, n in enumerate(self.names)}
        self._by_name = {e.name: e for e in self.events}
        self.controllable = frozenset(e.name for e in self.events if e.controllable)
        self.uncontrollable = frozenset(self.names) - self.controllable
        self.observable = frozenset(e.name for e in self.events if e.observable)
        self.unobservable = frozenset(self.names) - self.observable
        self.attacker_observable = frozenset(e.name for e in self.events if e.attacker_observable)
        self.attacker_controllable = frozenset(e.name for e in self.events if e.attacker_controllable)

    @classmethod
    def from_sets(cls, names, controllable=(), observable=None, attacker_observable=(),
                  attacker_controllable=()):
        observable = set(names) if observable is None else set(observable)
        return cls(
            Event(n, n in set(controllable), n in observable, n in set(attacker_observable),
                  n in set(attacker_controllable))
            for n in names
        )

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)

    def __contains__(self, name):
        return name in self._index

    def __getitem__(self, name) -> Event:
        return self._by_name[name]

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.events == other.events

    def __hash__(self):
        return hash(self.events)

    def __repr__(self):
        return f"Alphabet({', '.join(self.names)})"

    def index(self, name: str) -> int:
        return self._index[name]

    def mask(self, command: ControlCommand) -> int:
        """Bitmask of ``command`` over the alphabet order (event i -> bit i)."""
        return sum(1 << self._index[m] for m in command.members)

    def ordered(self, names: Iterable[str]) -> Tuple[str, ...]:
        names = set(names)
        return tuple(n for n in self.names if n in names)


class Automaton:
    """Deterministic automaton with a partial transition map.

    ``delta[q][symbol]`` is the successor of ``q``; every state has an entry.
    ``symbols`` is the symbol universe used for synchronization, which may be
    larger than the set of symbols that label transitions.  The empty
    automaton has no states and ``initial is None``.
    """

    __slots__ = ("states", "symbols", "initial", "marked", "delta")

    def __init__(self, states, symbols, initial, delta, marked=()):
        self.states = tuple(states)
        self.symbols = tuple(symbols)
        self.initial = initial
        self.delta = delta
        self.marked = frozenset(marked)

    @classmethod
    def build(cls, states, symbols, initial, transitions, marked=(), **extra):
        """Validating constructor from ``(source, symbol, target)`` triples."""
        states = tuple(states)
        symbols = tuple(symbols)
        if len(set(states)) != len(states):
            raise AutomatonError("duplicate state id")
        known = set(states)
        symset = set(symbols)
        if len(symset) != len(symbols):
            raise AutomatonError("duplicate symbol")
        if states and initial not in known:
            raise AutomatonError(f"initial state {initial!r} is not a state")
        if not states and initial is not None:
            raise AutomatonError("empty automaton cannot have an initial state")
        marked = frozenset(marked)
        if not marked <= known:
            raise AutomatonError(f"marked states {sorted(map(str, marked - known))} are not states")
        delta = {q: {} for q in states}
        for src, sym, dst in transitions:
            if src not in known or dst not in known:
                raise AutomatonError(f"transition {src!r} -{sym}-> {dst!r} uses an unknown state")
            if sym not in symset:
                raise AutomatonError(f"transition {src!r} -{sym}-> {dst!r} uses an unknown symbol")
            if sym in delta[src] and delta[src][sym] != dst:
                raise AutomatonError(f"nondeterministic: {src!r} has two {sym} successors")
            delta[src][sym] = dst
        return cls(states, symbols, initial if states else None, delta, marked, **extra)

    @classmethod
    def empty(cls, symbols=(), **extra):
        return cls((), symbols, None, {}, (), **extra)

    @property
    def is_empty(self) -> bool:
        return self.initial is None

    def __len__(self):
        return len(self.states)

    def __contains__(self, state):
        return state in self.delta

    def __repr__(self):
        return (f"{type(self).__name__}({len(self.states)} states, "
                f"{self.n_transitions} transitions, {len(self.symbols)} symbols)")

    def __eq__(self, other):
        if not isinstance(other, Automaton) or type(self) is not type(other):
            return NotImplemented
        return (set(self.states) == set(other.states)
                and set(self.symbols) == set(other.symbols)
                and self.initial == other.initial
                and self.marked == other.marked
                and self.delta == other.delta
                and self._extra_eq(other))

    __hash__ = None

    def _extra_eq(self, other):
        return True

    @property
    def n_transitions(self) -> int:
        return sum(len(out) for out in self.delta.values())

    def successor(self, state, symbol):
        return self.delta[state].get(symbol)

    def enabled(self, state) -> Tuple[Symbol, ...]:
        return tuple(self.delta[state])

    def transitions(self) -> Iterator[Tuple[State, Symbol, State]]:
        for q in self.states:
            for sym, dst in self.delta[q].items():
                yield q, sym, dst

    def run(self, word: Iterable[Symbol], start=None):
        """State reached by ``word``, or ``None`` if it leaves the language."""
        q = self.initial if start is None else start
        if q is None:
            return None
        for sym in word:
            q = self.delta[q].get(sym)
            if q is None:
                return None
        return q

    def accepts(self, word: Iterable[Symbol]) -> bool:
        """Membership in the closed (generated) language."""
        return self.run(word) is not None

    def _restrict(self, keep):
        """Sub-automaton on ``keep`` (original order kept); empty if initial dropped."""
        if self.initial not in keep:
            return self._like_empty()
        states = [q for q in self.states if q in keep]
        delta = {q: {s: t for s, t in self.delta[q].items() if t in keep} for q in states}
        return self._with(states, self.initial, delta, self.marked & set(states))

    def _like_empty(self):
        return type(self).empty(self.symbols)

    def _with(self, states, initial, delta, marked):
        return type(self)(states, self.symbols, initial, delta, marked)

    def relabel(self, mapping: Mapping) -> "Automaton":
        states = [mapping[q] for q in self.states]
        if len(set(states)) != len(states):
            raise AutomatonError("relabeling is not injective")
        delta = {mapping[q]: {s: mapping[t] for s, t in self.delta[q].items()} for q in self.states}
        initial = None if self.initial is None else mapping[self.initial]
        return self._relabeled(states, initial, delta, {mapping[q] for q in self.marked}, mapping)

    def _relabeled(self, states, initial, delta, marked, mapping):
        return type(self)(states, self.symbols, initial, delta, marked)

    def compact(self) -> "Automaton":
        """Rename states to ``0..n-1`` in the current state order."""
        return self.relabel({q: i for i, q in enumerate(self.states)})

    def with_marked(self, marked) -> "Automaton":
        return self._with(self.states, self.initial, self.delta, frozenset(marked))

    def with_symbols(self, symbols) -> "Automaton":
        """Same transitions over a (larger) symbol universe."""
        out = self._with(self.states, self.initial, self.delta, self.marked)
        out.symbols = tuple(symbols)
        return out


CONTROL = "control"
REACTION = "reaction"
DETECT = "detect"
DUMP = "dump"
KINDS = (CONTROL, REACTION, DETECT, DUMP)


class BipartiteAutomaton(Automaton):
    """Automaton over events and commands whose states carry a kind tag.

    Control states issue commands, reaction states receive events.  The
    dedicated ``detect`` and ``dump`` sinks are tagged separately.
    """

    __slots__ = ("kinds",)

    def __init__(self, states, symbols, initial, delta, marked=(), kinds=None):
        super().__init__(states, symbols, initial, delta, marked)
        self.kinds = dict(kinds or {})

    @classmethod
    def empty(cls, symbols=(), **extra):
        return cls((), symbols, None, {}, (), kinds={})

    def _extra_eq(self, other):
        return self.kinds == other.kinds

    def _with(self, states, initial, delta, marked):
        kinds = {q: self.kinds[q] for q in states}
        return type(self)(states, self.symbols, initial, delta, marked, kinds=kinds)

    def _relabeled(self, states, initial, delta, marked, mapping):
        kinds = {mapping[q]: k for q, k in self.kinds.items()}
        return type(self)(states, self.symbols, initial, delta, marked, kinds=kinds)

    def kind(self, state) -> str:
        return self.kinds[state]

    def states_of_kind(self, kind) -> Tuple[State, ...]:
        return tuple(q for q in self.states if self.kinds[q] == kind)

    def commands_at(self, state) -> Tuple[ControlCommand, ...]:
        return tuple(s for s in self.delta[state] if is_command(s))


# ----------------------------------------------------------------------------
# constructions


def accessible(a: Automaton) -> Automaton:
    if a.is_empty:
        return a
    seen = {a.initial}
    queue = deque([a.initial])
    while queue:
        q = queue.popleft()
        for t in a.delta[q].values():
            if t not in seen:
                seen.add(t)
                queue.append(t)
    if len(seen) == len(a.states):
        return a
    return a._restrict(seen)


def remove_states(a: Automaton, bad) -> Automaton:
    bad = set(bad)
    if not bad:
        return a
    return a._restrict(set(a.states) - bad)


def _ordered_union(seqs):
    out, seen = [], set()
    for seq in seqs:
        for s in seq:
            if s not in seen:
                seen.add(s)
                out.append(s)
    return tuple(out)


def compose_all(*automata: Automaton, max_states=None, stage="composition") -> Automaton:
    """Synchronous product of any number of automata, accessible part only.

    Shared symbols synchronize, private ones interleave.  A product state is
    marked when every component that has a non-empty marked set is marked
    there; components without marked states do not constrain marking.
    """
    if not automata:
        raise AutomatonError("nothing to compose")
    symbols = _ordered_union(a.symbols for a in automata)
    if any(a.is_empty for a in automata):
        return Automaton.empty(symbols)
    symsets = [frozenset(a.symbols) for a in automata]
    owners = {s: tuple(i for i, ss in enumerate(symsets) if s in ss) for s in symbols}
    markers = [i for i, a in enumerate(automata) if a.marked]
    deltas = [a.delta for a in automata]

    init = tuple(a.initial for a in automata)
    delta = {init: {}}
    order = [init]
    queue = deque([init])
    while queue:
        state = queue.popleft()
        out = delta[state]
        tried = set()
        for i, d in enumerate(deltas):
            for sym in d[state[i]]:
                if sym in tried:
                    continue
                tried.add(sym)
                nxt = list(state)
                for j in owners[sym]:
                    t = deltas[j][state[j]].get(sym)
                    if t is None:
                        break
                    nxt[j] = t
                else:
                    nxt = tuple(nxt)
                    if nxt not in delta:
                        delta[nxt] = {}
                        order.append(nxt)
                        queue.append(nxt)
                        if max_states is not None and len(order) > max_states:
                            raise SizeLimitError(stage, max_states)
                    out[sym] = nxt
    marked = [q for q in order if all(q[i] in automata[i].marked for i in markers)] if markers else []
    return Automaton(order, symbols, init, delta, marked)


def parallel_compose(a: Automaton, b: Automaton, *, max_states=None, stage="composition") -> Automaton:
    """``a || b`` with pair-labelled states; see :func:`compose_all` for marking."""
    return compose_all(a, b, max_states=max_states, stage=stage)


def _closure(a: Automaton, seeds, hidden) -> frozenset:
    reach = set(seeds)
    stack = list(reach)
    while stack:
        q = stack.pop()
        out = a.delta[q]
        for sym in hidden:
            t = out.get(sym)
            if t is not None and t not in reach:
                reach.add(t)
                stack.append(t)
    return frozenset(reach)


def unobservable_reach(a: Automaton, state, hidden) -> frozenset:
    """States reachable from ``state`` by strings over ``hidden`` (incl. itself)."""
    if state not in a.delta:
        raise AutomatonError(f"unknown state {state!r}")
    hidden = [s for s in a.symbols if s in set(hidden)]
    return _closure(a, [state], hidden)


def subset_construct(a: Automaton, observed, *, max_states=None, stage="subset construction") -> Automaton:
    """Subset construction that keeps unobserved events as self-loops.

    Observed events move an estimate to the unobservable reach of its
    successors; an unobserved event defined at some member becomes a
    self-loop on the estimate.  States are frozensets of original states.
    """
    if a.is_empty:
        return Automaton.empty(a.symbols)
    observed = set(observed)
    hidden = [s for s in a.symbols if s not in observed]
    init = _closure(a, [a.initial], hidden)
    delta = {init: {}}
    order = [init]
    queue = deque([init])
    while queue:
        est = queue.popleft()
        out = delta[est]
        for sym in a.symbols:
            if sym in observed:
                succ = {a.delta[q][sym] for q in est if sym in a.delta[q]}
                if not succ:
                    continue
                tgt = _closure(a, succ, hidden)
                if tgt not in delta:
                    delta[tgt] = {}
                    order.append(tgt)
                    queue.append(tgt)
                    if max_states is not None and len(order) > max_states:
                        raise SizeLimitError(stage, max_states)
                out[sym] = tgt
            elif any(sym in a.delta[q] for q in est):
                out[sym] = est
    return Automaton(order, a.symbols, init, delta)


def _path(parent, node):
    word = []
    while parent[node] is not None:
        node, sym = parent[node]
        word.append(sym)
    word.reverse()
    return tuple(word)


def language_included(a: Automaton, b: Automaton):
    """``(True, None)`` if L(a) ⊆ L(b), else ``(False, w)`` with w shortest in L(a)∖L(b)."""
    if a.is_empty:
        return True, None
    if b.is_empty:
        return False, ()
    start = (a.initial, b.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        qa, qb = node
        out_b = b.delta[qb]
        for sym, ta in a.delta[qa].items():
            tb = out_b.get(sym)
            if tb is None:
                return False, _path(parent, node) + (sym,)
            nxt = (ta, tb)
            if nxt not in parent:
                parent[nxt] = (node, sym)
                queue.append(nxt)
    return True, None


def distinguishing_word(a: Automaton, b: Automaton):
    """Shortest word in exactly one of L(a), L(b); ``None`` if the languages agree."""
    if a.is_empty and b.is_empty:
        return None
    if a.is_empty or b.is_empty:
        return ()
    start = (a.initial, b.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        qa, qb = node
        out_a, out_b = a.delta[qa], b.delta[qb]
        for sym in _ordered_union((out_a, out_b)):
            ta, tb = out_a.get(sym), out_b.get(sym)
            if ta is None or tb is None:
                return _path(parent, node) + (sym,)
            nxt = (ta, tb)
            if nxt not in parent:
                parent[nxt] = (node, sym)
                queue.append(nxt)
    return None


def language_equal(a: Automaton, b: Automaton) -> bool:
    return distinguishing_word(a, b) is None


def shortest_word_to(a: Automaton, goal):
    """Shortest word reaching a state satisfying ``goal``; ``None`` if unreachable."""
    if a.is_empty:
        return None
    parent = {a.initial: None}
    queue = deque([a.initial])
    while queue:
        q = queue.popleft()
        if goal(q):
            return _path(parent, q)
        for sym, t in a.delta[q].items():
            if t not in parent:
                parent[t] = (q, sym)
                queue.append(t)
    return None


def marker_reachable(a: Automaton):
    """``(True, w)`` with a shortest word w reaching a marked state, else ``(False, None)``."""
    word = shortest_word_to(a, a.marked.__contains__)
    return word is not None, word


def project(a: Automaton, keep) -> Automaton:
    """Deterministic automaton for the natural projection of L(a) onto ``keep``."""
    keep = set(keep)
    det = subset_construct(a, keep)
    delta = {q: {s: t for s, t in out.items() if s in keep} for q, out in det.delta.items()}
    return accessible(Automaton(det.states, [s for s in a.symbols if s in keep], det.initial, delta))


def word_automaton(word: Sequence[Symbol], symbols) -> Automaton:
    """Chain automaton whose closed language is the prefix closure of ``word``."""
    n = len(word)
    return Automaton.build(range(n + 1), symbols, 0, [(i, s, i + 1) for i, s in enumerate(word)],
                           marked=[n])
