"""Check records, report assembly and the ordered worker pool shared by all commands."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"
SKIPPED = "skipped"
BOUND = "bound_exceeded"


@dataclass
class CheckResult:
    """Outcome of one verification check.

    Attributes:
        check_id: Stable identifier of the check
        params: Parameters the check ran with
        status: "exhaustive", "sampled", "skipped" or "bound_exceeded"
        passed: Whether every verified instance held
        witness: Counterexample data (or extra detail) when present
    """

    check_id: str
    params: Dict[str, Any]
    status: str = EXHAUSTIVE
    passed: bool = True
    witness: Optional[Any] = None

    def to_json(self) -> dict:
        data: Dict[str, Any] = {
            "check_id": self.check_id,
            "params": dict(self.params),
            "status": self.status,
            "pass": self.passed,
        }
        if self.witness is not None:
            data["witness"] = self.witness
        return data


def bound_result(check_id: str, params: Dict[str, Any], error: Exception) -> CheckResult:
    """A check that could not run because an enumeration cap was hit."""
    return CheckResult(check_id, params, status=BOUND, passed=True, witness={"error": str(error)})


@dataclass
class Report:
    """Ordered collection of check results for one command."""

    command: str
    params: Dict[str, Any]
    checks: List[CheckResult] = field(default_factory=list)

    def add(self, result: CheckResult) -> None:
        if not result.passed:
            logger.warning("Check %s failed with %s", result.check_id, result.params)
        self.checks.append(result)

    def extend(self, results: Iterable[CheckResult]) -> None:
        for result in results:
            self.add(result)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def incomplete(self) -> bool:
        """Some check did not run: a cap was hit, or the window or the levels fell short."""
        return any(c.status in (BOUND, SKIPPED) for c in self.checks)

    def exit_code(self) -> int:
        """0 if everything ran and passed, 2 on any failure, 3 if some check did not run."""
        if not self.passed:
            return 2
        if self.incomplete:
            return 3
        return 0

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "params": dict(self.params),
            "pass": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }

    def rows(self) -> List[Dict[str, Any]]:
        """Flat rows for CSV output, one per check."""
        return [
            {
                "command": self.command,
                "check_id": c.check_id,
                "params": ";".join(f"{k}={v}" for k, v in sorted(c.params.items())),
                "status": c.status,
                "pass": c.passed,
            }
            for c in self.checks
        ]


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """Apply func to every item, results in input order regardless of scheduling.

    Args:
        func: Pure function of one item
        items: Work items
        threads: Worker count; 1 runs in the calling thread

    Returns:
        List of results aligned with items
    """
    work = list(items)
    if threads <= 1 or len(work) <= 1:
        return [func(item) for item in work]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, work))
