"""Structured verdicts returned by the checkers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .automata import format_word

COVERT = "covert"
DAMAGE_REACHABLE = "damage_reachable"
RESILIENT = "resilient"
CONTROL_EQUIVALENT = "control_equivalent"
WELL_FORMED = "well_formed"
PROPERTIES = (COVERT, DAMAGE_REACHABLE, RESILIENT, CONTROL_EQUIVALENT, WELL_FORMED)


@dataclass
class VerificationReport:
    checked_property: str
    verdict: bool
    witness: Optional[Tuple] = None
    violations: List[Tuple[Any, Any, str]] = field(default_factory=list)
    artifacts: Dict[str, Any] = field(default_factory=dict)
    note: str = ""

    def __post_init__(self):
        if self.checked_property not in PROPERTIES:
            raise ValueError(f"unknown property {self.checked_property!r}")

    def __bool__(self):
        return self.verdict

    def summary(self) -> str:
        head = f"{self.checked_property}: {'yes' if self.verdict else 'no'}"
        lines = [head]
        if self.witness is not None:
            lines.append(f"  witness: {format_word(self.witness)}")
        for state, symbol, why in self.violations:
            lines.append(f"  violation at state {state}, symbol {symbol}: {why}")
        if self.note:
            lines.append(f"  {self.note}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "property": self.checked_property,
            "verdict": self.verdict,
            "witness": None if self.witness is None else [str(s) for s in self.witness],
            "violations": [[str(q), str(s), why] for q, s, why in self.violations],
            "artifacts": sorted(self.artifacts),
            "note": self.note,
        }
