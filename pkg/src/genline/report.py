"""Uniform validation reporting used by every checking stage."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One violated rule: a stable code, the involved names, and a message."""

    code: str
    subjects: tuple[str, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def codes(self) -> tuple[str, ...]:
        return tuple(v.code for v in self.violations)

    @staticmethod
    def merge(*reports: "ValidationReport") -> "ValidationReport":
        out: list[Violation] = []
        for rep in reports:
            out.extend(rep.violations)
        return ValidationReport(tuple(out))


def ok() -> ValidationReport:
    return ValidationReport()
