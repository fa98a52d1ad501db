"""Verdict objects returned by every structural check."""

from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, CheckResult):
        return value.to_dict()
    return value


@dataclass
class CheckResult:
    """Pass/fail verdict with the worst violation seen.

    ``worst_violation`` is the largest amount by which the checked inequality
    was broken (negative or zero when it held everywhere).
    """

    name: str
    passed: bool
    worst_violation: float
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.passed)

    def to_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "worst_violation": float(self.worst_violation),
            "details": _plain(self.details),
        }

    def line(self):
        return "%s %s (worst violation %.3e)" % (
            "PASS" if self.passed else "FAIL", self.name, self.worst_violation)


def combine(name, results, **details):
    """Single verdict that passes iff every component passed."""
    results = list(results)
    worst = max((r.worst_violation for r in results), default=0.0)
    details = dict(details)
    details["components"] = [r.to_dict() for r in results]
    return CheckResult(name, all(r.passed for r in results), worst, details)


def to_jsonable(obj: Any):
    return _plain(obj)
