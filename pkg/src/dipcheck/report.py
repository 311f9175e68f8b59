"""Verdict pipeline and report rendering.

The full check runs validation, the initialization dataflow, output
distinction, the augmentation build, the four violation checks and,
when clean, the weight computation.  A violation only yields a
definite "not differentially private" verdict when the automaton is
output-distinct; otherwise the outcome is inconclusive.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .augmentation import DEFAULT_STATE_CAP, build_augmentation
from .model import DipAutomaton, check_initialized, check_output_distinct, validate
from .rational import format_rational
from .weight import compute_weight
from .wellformed import DEFAULT_SEARCH_CAP, Violation, check_well_formed

VERDICT_DP = "dp"
VERDICT_NOT_DP = "not_dp"
VERDICT_INCONCLUSIVE = "not_well_formed_inconclusive"
VERDICT_INVALID = "invalid"

EXIT_CODES = {
    VERDICT_DP: 0,
    VERDICT_NOT_DP: 1,
    VERDICT_INCONCLUSIVE: 2,
    VERDICT_INVALID: 3,
}
EXIT_RESOURCE = 4


@dataclass
class VerdictReport:
    verdict: str
    weight: Fraction | None = None
    violation: Violation | None = None
    output_distinct: bool = False
    errors: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_json(self, with_timings: bool = False) -> dict:
        return {
            "verdict": self.verdict,
            "weight": None if self.weight is None else format_rational(self.weight),
            "violation": None if self.violation is None else self.violation.to_json(),
            "output_distinct": self.output_distinct,
            "errors": list(self.errors),
            "timings": dict(self.timings) if with_timings else None,
        }

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        if self.weight is not None:
            lines.append(f"weight: {format_rational(self.weight)}")
        if self.violation is not None:
            v = self.violation
            kind = v.kind + (f" (case {v.subkind})" if v.subkind else "")
            lines.append(f"violation: {kind}")
            lines.append(f"  run: {list(v.run)}")
            lines.append(f"  cycles: {[list(c) for c in v.cycles]}")
            if v.variables:
                lines.append(f"  variables: {list(v.variables)}")
            lines.append(f"  positions: {dict(sorted(v.positions.items()))}")
        lines.append(f"output_distinct: {str(self.output_distinct).lower()}")
        for err in self.errors:
            lines.append(f"error: {err}")
        if self.timings:
            parts = ", ".join(f"{k}={v:.1f}ms" for k, v in self.timings.items())
            lines.append(f"timings: {parts}")
        return "\n".join(lines) + "\n"


def run_check(
    a: DipAutomaton,
    aug_cap: int = DEFAULT_STATE_CAP,
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> VerdictReport:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()

    errors = validate(a)
    if errors:
        return VerdictReport(VERDICT_INVALID, errors=errors)
    witness = check_initialized(a)
    if witness is not None:
        return VerdictReport(
            VERDICT_INVALID,
            errors=[f"variable used before assignment on run {list(witness)}"],
        )
    od = check_output_distinct(a)
    t1 = time.perf_counter()
    timings["validate_ms"] = (t1 - t0) * 1e3

    aug = build_augmentation(a, aug_cap)
    t2 = time.perf_counter()
    timings["augmentation_ms"] = (t2 - t1) * 1e3

    violation = check_well_formed(aug, search_cap)
    t3 = time.perf_counter()
    timings["wellformedness_ms"] = (t3 - t2) * 1e3

    if violation is None:
        weight = compute_weight(aug)
        timings["weight_ms"] = (time.perf_counter() - t3) * 1e3
        timings["total_ms"] = (time.perf_counter() - t0) * 1e3
        return VerdictReport(
            VERDICT_DP, weight=weight, output_distinct=od, timings=timings
        )
    timings["total_ms"] = (time.perf_counter() - t0) * 1e3
    verdict = VERDICT_NOT_DP if od else VERDICT_INCONCLUSIVE
    return VerdictReport(
        verdict, violation=violation, output_distinct=od, timings=timings
    )


def render(report: VerdictReport, fmt: str, with_timings: bool = False) -> str:
    if fmt == "json":
        return json.dumps(report.to_json(with_timings), indent=2, sort_keys=True) + "\n"
    return report.to_text()
