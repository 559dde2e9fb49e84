"""
Findings and campaign reports shared by the golden corpus and the campaign drivers
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List

from data.enums import FindingStatus


@dataclass
class Finding:
    """Outcome of one named check"""
    check: str
    status: FindingStatus
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status is not FindingStatus.FAILED

    def to_json(self) -> Dict[str, Any]:
        return {"check": self.check, "status": self.status.name.lower(), "message": self.message}


def finding(check: str, success: bool, message: str = "") -> Finding:
    return Finding(check, FindingStatus.PASSED if success else FindingStatus.FAILED, message)


@dataclass
class CampaignReport:
    """Aggregated campaign counters; merging is order-independent"""
    name: str
    trials: int = 0
    passed: int = 0
    failures: List[str] = field(default_factory=list)
    counters: Dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.passed == self.trials and not self.failures

    def record(self, success: bool, message: str = ""):
        self.trials += 1
        if success:
            self.passed += 1
        elif message:
            self.failures.append(message)

    def count(self, key: str, amount: int = 1):
        self.counters[key] = self.counters.get(key, 0) + amount

    def merge(self, other: "CampaignReport") -> "CampaignReport":
        counters = dict(self.counters)
        for key, value in other.counters.items():
            counters[key] = counters.get(key, 0) + value
        return CampaignReport(self.name, self.trials + other.trials, self.passed + other.passed,
                              sorted(self.failures + other.failures), counters)

    def to_json(self) -> Dict[str, Any]:
        return {"campaign": self.name, "trials": self.trials, "passed": self.passed,
                "ok": self.ok, "failures": self.failures[:10],
                "counters": dict(sorted(self.counters.items()))}
