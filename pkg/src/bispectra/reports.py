"""Check reports shared by the verification routines and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def rat(c) -> list[str]:
    """Serialize a rational as ``[numerator, denominator]`` decimal strings."""
    c = Fraction(c)
    return [str(c.numerator), str(c.denominator)]


def jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return rat(value)
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return str(value)


@dataclass
class CheckReport:
    """Outcome of one verification.

    ``failures`` holds one dict per violated identity, carrying the offending
    index data and the exact residual.
    """

    name: str
    passed: bool = True
    checked: int = 0
    failures: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def fail(self, **info) -> None:
        self.passed = False
        self.failures.append(info)

    def tick(self, n: int = 1) -> None:
        self.checked += n

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failures": jsonable(self.failures),
            "details": jsonable(self.details),
        }
