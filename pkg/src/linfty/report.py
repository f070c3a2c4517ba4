"""Verification reports shared by every checker."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Violation:
    where: str
    residual: str
    value: Any = field(default=None, compare=False, repr=False)


@dataclass
class Report:
    """Outcome of one verification. Empty ``violations`` means pass."""

    name: str
    violations: list[Violation] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, where: str, residual, value=None):
        self.violations.append(Violation(where, str(residual), value))

    def merge(self, other: "Report", prefix: str = ""):
        for v in other.violations:
            self.violations.append(Violation(prefix + v.where, v.residual, v.value))
        return self

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.ok,
            "violations": [{"where": v.where, "residual": v.residual} for v in self.violations],
            "notes": {k: self.notes[k] for k in sorted(self.notes)},
        }

    def __str__(self):
        head = f"{self.name}: {'pass' if self.ok else 'FAIL'}"
        lines = [head]
        for v in self.violations[:20]:
            lines.append(f"  {v.where}: {v.residual}")
        if len(self.violations) > 20:
            lines.append(f"  ... {len(self.violations) - 20} more")
        return "\n".join(lines)
