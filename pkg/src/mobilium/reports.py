"""Pass/fail reports shared by every verification routine."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Violation:
    i: int | None
    j: int | None
    detail: str

    def to_json(self):
        return {"i": self.i, "j": self.j, "detail": self.detail}


@dataclass
class Report:
    check: str
    violations: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if not self.violations else "fail"

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed

    def add(self, i, j, detail):
        self.violations.append(Violation(i, j, str(detail)))

    def to_json(self) -> dict:
        out = {
            "check": self.check,
            "status": self.status,
            "violations": [v.to_json() for v in self.violations],
        }
        if self.info:
            out["info"] = self.info
        return out

    def __str__(self):
        head = f"{self.check}: {self.status}"
        if self.violations:
            first = self.violations[0]
            head += f" ({len(self.violations)} violations; first at ({first.i}, {first.j}): {first.detail})"
        return head


def relative_gap(a, b) -> float:
    """``|a - b| / max(|a|, |b|, tiny)``."""
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 0.0
    return float(abs(a - b) / scale)
