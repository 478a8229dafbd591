"""Project files, artifact serialization and Graphviz export.

Everything written here is canonical: equal values give identical bytes, and
loading then saving an artifact reproduces the file exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict

from .automata import (
    KINDS, Alphabet, Automaton, BipartiteAutomaton, ControlCommand, Event, is_command,
)
from .errors import AlphabetError, AutomatonError, ProjectFormatError

_EVENT_KEYS = ("name", "controllable", "observable", "attacker_observable", "attacker_controllable")
_EVENT_DEFAULTS = {"controllable": False, "observable": True, "attacker_observable": False,
                   "attacker_controllable": False}
_OPTION_KEYS = {"pick": str, "max_states": int, "resilience_precheck": bool, "max_controllable": int}


@dataclass
class Project:
    alphabet: Alphabet
    plant: Automaton
    supervisor: Automaton
    options: Dict[str, Any] = field(default_factory=dict)

    def __eq__(self, other):
        return (isinstance(other, Project) and self.alphabet == other.alphabet
                and self.plant == other.plant and self.supervisor == other.supervisor
                and self.options == other.options)


# ----------------------------------------------------------------------------
# symbols and state labels


def symbol_to_text(sym) -> str:
    if is_command(sym):
        return str(sym)
    return sym


def symbol_from_text(text: str):
    if text.startswith("{") and text.endswith("}"):
        return ControlCommand(m for m in text[1:-1].split(",") if m)
    return text


def render_state(q) -> str:
    """Readable, canonical text for a structured state label."""
    if isinstance(q, str):
        return q
    if isinstance(q, ControlCommand):
        return str(q)
    if isinstance(q, tuple):
        return "(" + ",".join(render_state(x) for x in q) + ")"
    if isinstance(q, frozenset):
        return "{" + ",".join(sorted(render_state(x) for x in q)) + "}"
    return str(q)


def state_names(a: Automaton) -> Dict[Any, str]:
    """Unique text name per state; falls back to positions if rendering collides."""
    names = {q: render_state(q) for q in a.states}
    if len(set(names.values())) != len(names):
        names = {q: str(i) for i, q in enumerate(a.states)}
    return names


# ----------------------------------------------------------------------------
# canonical JSON text


def _dumps(value, indent=0) -> str:
    pad = "  " * (indent + 1)
    if isinstance(value, dict) and value:
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_dumps(v, indent + 1)}"
                 for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(value, list) and value and isinstance(value[0], (list, dict)):
        items = [pad + _dumps(v, indent + 1) if isinstance(v, dict) else pad + json.dumps(v, ensure_ascii=False)
                 for v in value]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    return json.dumps(value, ensure_ascii=False)


def _automaton_doc(a: Automaton, with_symbols: bool) -> dict:
    names = state_names(a)
    sym_index = {s: i for i, s in enumerate(a.symbols)}
    doc: Dict[str, Any] = {}
    if with_symbols:
        doc["kind"] = "bipartite" if isinstance(a, BipartiteAutomaton) else "automaton"
        doc["symbols"] = [symbol_to_text(s) for s in a.symbols]
    doc["states"] = [names[q] for q in a.states]
    doc["initial"] = None if a.initial is None else names[a.initial]
    doc["marked"] = [names[q] for q in a.states if q in a.marked]
    if isinstance(a, BipartiteAutomaton) and with_symbols:
        doc["partition"] = {names[q]: a.kinds[q] for q in a.states}
    doc["transitions"] = [
        [names[q], symbol_to_text(sym), names[t]]
        for q in a.states
        for sym, t in sorted(a.delta[q].items(), key=lambda kv: sym_index[kv[0]])
    ]
    return doc


def dump_artifact(a: Automaton) -> str:
    return _dumps(_automaton_doc(a, with_symbols=True)) + "\n"


def save_artifact(a: Automaton, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_artifact(a))


def dump_project(p: Project) -> str:
    doc = {
        "events": [
            {k: (e.name if k == "name" else getattr(e, k)) for k in _EVENT_KEYS}
            for e in p.alphabet
        ],
        "plant": _automaton_doc(p.plant, with_symbols=False),
        "supervisor": _automaton_doc(p.supervisor, with_symbols=False),
        "options": dict(sorted(p.options.items())),
    }
    return _dumps(doc) + "\n"


def save_project(p: Project, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_project(p))


# ----------------------------------------------------------------------------
# loading


def _parse_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProjectFormatError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _expect(cond, where, msg):
    if not cond:
        raise ProjectFormatError(f"{where}: {msg}")


def _read(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_events(raw, where="events") -> Alphabet:
    _expect(isinstance(raw, list), where, "expected a list of events")
    events = []
    for i, ev in enumerate(raw):
        at = f"{where}[{i}]"
        _expect(isinstance(ev, dict), at, "expected an object")
        unknown = set(ev) - set(_EVENT_KEYS)
        _expect(not unknown, at, f"unknown keys {sorted(unknown)}")
        _expect(isinstance(ev.get("name"), str), f"{at}.name", "expected a string")
        flags = {}
        for key, default in _EVENT_DEFAULTS.items():
            val = ev.get(key, default)
            _expect(isinstance(val, bool), f"{at}.{key}", "expected true or false")
            flags[key] = val
        events.append(Event(ev["name"], **flags))
    try:
        return Alphabet(events)
    except AlphabetError as exc:
        raise ProjectFormatError(f"{where}: {exc}") from None


def _load_automaton(raw, where, symbols, allow_commands=False, cls=Automaton, kinds=None):
    _expect(isinstance(raw, dict), where, "expected an object")
    for key in ("states", "initial", "transitions"):
        _expect(key in raw, where, f"missing key {key!r}")
    states = raw["states"]
    _expect(isinstance(states, list) and all(isinstance(q, str) for q in states),
            f"{where}.states", "expected a list of strings")
    seen = set()
    for q in states:
        _expect(q not in seen, f"{where}.states", f"duplicate state {q!r}")
        seen.add(q)
    initial = raw["initial"]
    if states:
        _expect(isinstance(initial, str) and initial in seen, f"{where}.initial", f"unknown state {initial!r}")
    else:
        _expect(initial is None, f"{where}.initial", "must be null for an automaton without states")
    marked = raw.get("marked", [])
    _expect(isinstance(marked, list), f"{where}.marked", "expected a list")
    for q in marked:
        _expect(isinstance(q, str) and q in seen, f"{where}.marked", f"unknown state {q!r}")
    symset = set(symbols)
    arcs = []
    _expect(isinstance(raw["transitions"], list), f"{where}.transitions", "expected a list")
    for i, tr in enumerate(raw["transitions"]):
        at = f"{where}.transitions[{i}]"
        _expect(isinstance(tr, list) and len(tr) == 3 and all(isinstance(x, str) for x in tr),
                at, "expected [source, symbol, target]")
        src, text, dst = tr
        _expect(src in seen, at, f"unknown state {src!r}")
        _expect(dst in seen, at, f"unknown state {dst!r}")
        sym = symbol_from_text(text)
        if is_command(sym):
            _expect(allow_commands, at, f"command symbol {text!r} not allowed here")
        _expect(sym in symset, at, f"unknown event {text!r}")
        arcs.append((src, sym, dst))
    extra = {}
    if cls is BipartiteAutomaton:
        extra["kinds"] = kinds
    try:
        return cls.build(states, symbols, initial if states else None, arcs, marked, **extra)
    except AutomatonError as exc:
        raise ProjectFormatError(f"{where}: {exc}") from None


def parse_project(text: str, source="<project>") -> Project:
    raw = _parse_json(text, source)
    _expect(isinstance(raw, dict), source, "expected a JSON object")
    unknown = set(raw) - {"events", "plant", "supervisor", "options"}
    _expect(not unknown, source, f"unknown top-level keys {sorted(unknown)}")
    for key in ("events", "plant", "supervisor"):
        _expect(key in raw, source, f"missing key {key!r}")
    alphabet = _load_events(raw["events"])
    plant = _load_automaton(raw["plant"], "plant", alphabet.names)
    supervisor = _load_automaton(raw["supervisor"], "supervisor", alphabet.names)
    options = raw.get("options", {})
    _expect(isinstance(options, dict), "options", "expected an object")
    for key, val in options.items():
        _expect(key in _OPTION_KEYS, f"options.{key}", "unknown option")
        typ = _OPTION_KEYS[key]
        ok = isinstance(val, typ) and (typ is bool or not isinstance(val, bool))
        _expect(ok, f"options.{key}", f"expected {typ.__name__}")
    return Project(alphabet, plant, supervisor, dict(options))


def load_project(path) -> Project:
    return parse_project(_read(path), str(path))


def parse_artifact(text: str, source="<artifact>") -> Automaton:
    raw = _parse_json(text, source)
    _expect(isinstance(raw, dict), source, "expected a JSON object")
    kind = raw.get("kind", "automaton")
    _expect(kind in ("automaton", "bipartite"), f"{source}.kind", f"unknown kind {kind!r}")
    symbols = raw.get("symbols")
    _expect(isinstance(symbols, list) and all(isinstance(s, str) for s in symbols),
            f"{source}.symbols", "expected a list of strings")
    parsed = [symbol_from_text(s) for s in symbols]
    _expect(len(set(parsed)) == len(parsed), f"{source}.symbols", "duplicate symbol")
    if kind == "bipartite":
        part = raw.get("partition")
        _expect(isinstance(part, dict), f"{source}.partition", "expected an object")
        _expect(set(part) == set(raw.get("states", [])), f"{source}.partition",
                "must tag every state exactly once")
        for q, k in part.items():
            _expect(k in KINDS, f"{source}.partition", f"unknown kind {k!r} for state {q!r}")
        return _load_automaton(raw, source, parsed, allow_commands=True,
                               cls=BipartiteAutomaton, kinds=part)
    return _load_automaton(raw, source, parsed, allow_commands=True)


def load_artifact(path) -> Automaton:
    return parse_artifact(_read(path), str(path))


# ----------------------------------------------------------------------------
# Graphviz


def _gvquote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


_SHAPES = {"control": "box", "reaction": "circle", "detect": "octagon", "dump": "doublecircle"}


def dot_source(a: Automaton, name="automaton") -> str:
    """Graphviz text; control states are boxes, reaction states circles, sinks shaded."""
    names = state_names(a)
    kinds = a.kinds if isinstance(a, BipartiteAutomaton) else {}
    lines = [f"digraph {_gvquote(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    if a.initial is not None:
        lines.append('  "__start" [shape=point, label=""];')
        lines.append(f"  \"__start\" -> {_gvquote(names[a.initial])};")
    for q in a.states:
        attrs = []
        kind = kinds.get(q)
        if kind:
            attrs.append(f"shape={_SHAPES[kind]}")
            if kind in ("detect", "dump"):
                attrs += ["style=filled", "fillcolor=gray80"]
        elif q in a.marked:
            attrs.append("shape=doublecircle")
        if kind and q in a.marked:
            attrs.append("peripheries=2")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_gvquote(names[q])}{suffix};")
    sym_index = {s: i for i, s in enumerate(a.symbols)}
    for q in a.states:
        for sym, t in sorted(a.delta[q].items(), key=lambda kv: sym_index[kv[0]]):
            lines.append(f"  {_gvquote(names[q])} -> {_gvquote(names[t])} [label={_gvquote(str(sym))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(a: Automaton, path, name="automaton") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dot_source(a, name))
