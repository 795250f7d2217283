from __future__ import annotations

from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any

VOLATILE_KEYS = ("run_id", "created_at", "timings")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    value: float | None = None


@dataclass
class RunReport:
    command: str
    config_hash: str
    run_id: str
    status: str = "pending"
    exit_code: int = 0
    reason: str | None = None
    stages: dict[str, dict[str, Any]] = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    files: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    created_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    @property
    def failed_checks(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def payload(self, include_volatile: bool = True) -> dict[str, Any]:
        out = asdict(self)
        if not include_volatile:
            for key in VOLATILE_KEYS:
                out.pop(key, None)
        return out
