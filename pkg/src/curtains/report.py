from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Issue:
    code: str
    subject: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.subject}: {self.message}"


@dataclass
class ValidationReport:
    """Collected invariant violations; empty means valid."""

    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, code: str, subject: str, message: str) -> None:
        self.issues.append(Issue(code, subject, message))

    def extend(self, other: "ValidationReport", prefix: str = "") -> None:
        for issue in other.issues:
            subject = f"{prefix}{issue.subject}" if prefix else issue.subject
            self.issues.append(Issue(issue.code, subject, issue.message))

    def codes(self) -> set[str]:
        return {i.code for i in self.issues}

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(i) for i in self.issues)
