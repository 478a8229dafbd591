"""Command-line driver.

Exit codes: 0 affirmative result, 1 negative decision or verdict, 2 bad
input, 3 size cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .automata import BipartiteAutomaton, format_word
from .commands import build_ce_attacked, enumerate_commands
from .errors import FortressError, SizeLimitError
from .formats import export_dot, load_artifact, load_project, save_artifact
from .supervisors import PickPolicy, attack_bipartize, bipartize, debipartize
from .synthesis import (
    ALREADY_RESILIENT, DEFAULT_MAX_STATES, EXISTS, FortifyOptions, fortify,
    procedure1_attack_structure,
)
from .verification import (
    check_control_equivalence, check_covert, check_damage_reachable, check_resilient,
)

OK, NEGATIVE, INPUT_ERROR, SIZE_CAP = 0, 1, 2, 3
ENV_MAX_STATES = "FORTRESS_MAX_STATES"

_DECISION_TEXT = {
    EXISTS: "a fortified supervisor exists",
    ALREADY_RESILIENT: "the supervisor is already resilient",
    "not-exists": "no fortified supervisor exists",
}


def _max_states(flag, project_options):
    if flag is not None:
        return flag
    env = os.environ.get(ENV_MAX_STATES)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{ENV_MAX_STATES} must be an integer, got {env!r}") from None
    return project_options.get("max_states", DEFAULT_MAX_STATES)


def _err(msg):
    print(msg, file=sys.stderr)


def cmd_fortify(args) -> int:
    project = load_project(args.project)
    opts = project.options
    pick = args.pick or opts.get("pick", "lex-min")
    PickPolicy(pick)
    options = FortifyOptions(
        pick=pick,
        max_states=_max_states(args.max_states, opts),
        resilience_precheck=not args.skip_resilience_precheck and opts.get("resilience_precheck", True),
        max_controllable=opts.get("max_controllable", FortifyOptions.max_controllable),
    )
    outcome = fortify(project.plant, project.supervisor, project.alphabet, options)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = outcome.stats.get("stages", [])
    lines = [f"decision: {outcome.decision}", _DECISION_TEXT[outcome.decision]]
    if outcome.precheck is not None and not outcome.precheck.verdict:
        lines.append(f"original supervisor attack witness: {format_word(outcome.precheck.witness)}")
    if "procedure3_iterations" in outcome.stats:
        lines.append(f"clean-up iterations: {outcome.stats['procedure3_iterations']}")
    lines.append(f"commands: {outcome.stats['commands']}")
    for row in rows:
        lines.append(f"  {row['stage']:<8} states={row['states']} transitions={row['transitions']}")
    summary = "\n".join(lines) + "\n"
    (out / "summary.txt").write_text(summary, encoding="utf-8")

    written = []
    if outcome.fs is not None:
        save_artifact(outcome.fs, out / "FS.json")
        save_artifact(debipartize(outcome.fs, project.alphabet), out / "FS_supervisor.json")
        written += ["FS.json", "FS_supervisor.json"]
    if args.emit_intermediates:
        inter = out / "intermediates"
        inter.mkdir(exist_ok=True)
        for name, a in outcome.artifacts.items():
            save_artifact(a, inter / f"{name}.json")
            written.append(f"intermediates/{name}.json")

    report = {
        "decision": outcome.decision,
        "procedure3_iterations": outcome.stats.get("procedure3_iterations"),
        "stages": [{k: r[k] for k in ("stage", "states", "transitions")} for r in rows],
        "files": written,
    }
    if args.json:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
        (out / "report.json").write_text(text, encoding="utf-8")
        sys.stdout.write(text)
    else:
        sys.stdout.write(summary)
    for row in rows:
        _err(f"timing {row['stage']}: {row['seconds']:.4f}s")
    return OK if outcome.exists else NEGATIVE


def _load_supervisor(path, project):
    if path is None:
        return project.supervisor
    a = load_artifact(path)
    if isinstance(a, BipartiteAutomaton):
        return a
    return a.with_symbols(project.alphabet.names)


def cmd_verify(args) -> int:
    project = load_project(args.project)
    ab, g = project.alphabet, project.plant
    cap = _max_states(args.max_states, project.options)
    commands = enumerate_commands(ab, project.options.get("max_controllable", 16))
    if args.what == "resilience":
        s = _load_supervisor(args.supervisor, project)
        report = check_resilient(g, s, ab, commands=commands, max_states=cap)
    elif args.what == "equivalence":
        other = _load_supervisor(args.supervisor, project)
        report = check_control_equivalence(g, project.supervisor, other, ab)
    else:
        s = _load_supervisor(args.supervisor, project)
        bt = s if isinstance(s, BipartiteAutomaton) else bipartize(s, ab, commands)
        bt_a = attack_bipartize(bt, ab)
        ce_a = build_ce_attacked(ab, commands)
        if args.attacker:
            attacker = load_artifact(args.attacker)
        else:
            attacker = procedure1_attack_structure(g, ce_a, bt_a, ab, max_states=cap)
        check = check_covert if args.what == "covert" else check_damage_reachable
        report = check(g, ce_a, bt_a, attacker, ab, max_states=cap)
    if args.json:
        sys.stdout.write(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    else:
        print(report.summary())
    return OK if report.verdict else NEGATIVE


def cmd_export(args) -> int:
    a = load_artifact(args.artifact)
    export_dot(a, args.dot, name=Path(args.artifact).stem)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fortress", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fortify", help="decide existence of a fortified supervisor and build one")
    p.add_argument("project")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--pick", help="lex-min (default) or random:<seed>")
    p.add_argument("--skip-resilience-precheck", action="store_true")
    p.add_argument("--emit-intermediates", action="store_true")
    p.add_argument("--max-states", type=int)
    p.add_argument("--json", action="store_true", help="print a JSON report instead of text")
    p.set_defaults(func=cmd_fortify)

    p = sub.add_parser("verify", help="check a property of a supervisor")
    p.add_argument("project")
    p.add_argument("what", choices=["resilience", "equivalence", "covert", "damage"])
    p.add_argument("--supervisor", help="artifact to check instead of the project supervisor")
    p.add_argument("--attacker", help="attacker artifact (covert/damage); default: the synthesized one")
    p.add_argument("--max-states", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="write a Graphviz rendering of an artifact")
    p.add_argument("artifact")
    p.add_argument("--dot", required=True, help="output .dot path")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeLimitError as exc:
        _err(f"error: {exc}")
        return SIZE_CAP
    except (FortressError, OSError, ValueError) as exc:
        _err(f"error: {exc}")
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
