"""Verification reports with deterministic text and JSON renderings."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not-applicable"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Check:
    id: str
    label: str
    verdict: Verdict
    residuals: tuple[str, ...] = ()
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "verdict": self.verdict.value,
            "residuals": list(self.residuals),
            "detail": self.detail,
        }


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    data: dict[str, str] = field(default_factory=dict)

    def add(self, id: str, label: str, ok: bool | Verdict, residuals: Iterable[str] = (), detail: str = "") -> Check:
        if isinstance(ok, Verdict):
            verdict = ok
        else:
            verdict = Verdict.PASS if ok else Verdict.FAIL
        check = Check(id, label, verdict, tuple(residuals), detail)
        self.checks.append(check)
        return check

    def expect_zero(self, id: str, label: str, residuals: Iterable[str], detail: str = "") -> Check:
        """Pass iff no residuals were collected."""
        residuals = tuple(residuals)
        return self.add(id, label, not residuals, residuals, detail)

    def not_applicable(self, id: str, label: str, detail: str) -> Check:
        return self.add(id, label, Verdict.NOT_APPLICABLE, (), detail)

    def merge(self, other: Report, prefix: str = "") -> Report:
        for c in other.checks:
            self.checks.append(Check(prefix + c.id, c.label, c.verdict, c.residuals, c.detail))
        for k, v in other.data.items():
            self.data[prefix + k] = v
        return self

    def __getitem__(self, id: str) -> Check:
        for c in self.checks:
            if c.id == id:
                return c
        raise KeyError(id)

    def verdict_of(self, id: str) -> Verdict:
        return self[id].verdict

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.verdict is Verdict.FAIL]

    @property
    def passed(self) -> bool:
        """No failures and nothing indeterminate (not-applicable is neutral)."""
        return all(c.verdict in (Verdict.PASS, Verdict.NOT_APPLICABLE) for c in self.checks)

    @property
    def verdict(self) -> Verdict:
        if any(c.verdict is Verdict.FAIL for c in self.checks):
            return Verdict.FAIL
        if any(c.verdict is Verdict.INDETERMINATE for c in self.checks):
            return Verdict.INDETERMINATE
        return Verdict.PASS

    @property
    def exit_code(self) -> int:
        return {Verdict.PASS: 0, Verdict.FAIL: 1, Verdict.INDETERMINATE: 3}[self.verdict]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "verdict": self.verdict.value,
            "checks": [c.to_dict() for c in self.checks],
            "data": dict(sorted(self.data.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"== {self.title} ==", f"overall: {self.verdict.value}"]
        for c in self.checks:
            lines.append(f"[{c.verdict.value}] {c.id}: {c.label}")
            if c.detail:
                lines.append(f"    {c.detail}")
            for r in c.residuals:
                lines.append(f"    residual {r}")
        if self.data:
            lines.append("-- data --")
            for k, v in sorted(self.data.items()):
                lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"

    def __str__(self):
        return self.to_text()
