"""Structured check records shared by the verifier, constructors and CLI."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional


@dataclass
class CheckRecord:
    """Outcome of one numerical check.

    ``margin`` is signed so that a nonnegative value means the check passed
    with that much room; ``worst_location`` is where the margin was attained
    (a time, a node index, a parameter label...).
    """

    check_id: str
    passed: bool
    margin: float
    worst_location: Any = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        loc = self.worst_location
        if isinstance(loc, float) and not math.isfinite(loc):
            loc = None
        margin = self.margin if math.isfinite(self.margin) else None
        return {
            "check_id": self.check_id,
            "pass": bool(self.passed),
            "margin": margin,
            "worst_location": loc,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), default=float)


@dataclass
class Report:
    """An ordered collection of :class:`CheckRecord` objects."""

    records: list[CheckRecord] = field(default_factory=list)

    def add(self, check_id: str, passed: bool, margin: float, worst_location=None, **detail) -> CheckRecord:
        rec = CheckRecord(check_id, bool(passed), float(margin), worst_location, dict(detail))
        self.records.append(rec)
        return rec

    def extend(self, other: "Report | Iterable[CheckRecord]") -> "Report":
        recs = other.records if isinstance(other, Report) else other
        self.records.extend(recs)
        return self

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def margin(self) -> float:
        return min((r.margin for r in self.records), default=math.inf)

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def get(self, check_id: str) -> Optional[CheckRecord]:
        for r in self.records:
            if r.check_id == check_id:
                return r
        return None

    def __getitem__(self, check_id: str) -> CheckRecord:
        rec = self.get(check_id)
        if rec is None:
            raise KeyError(check_id)
        return rec

    def __contains__(self, check_id: str) -> bool:
        return self.get(check_id) is not None

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def to_jsonl(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.records)
