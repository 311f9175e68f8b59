"""Brute-force well-formedness oracle.

Applies the violation definitions literally to every feasible run the
bound admits.  Repeatability, which the efficient checker gets for
free from the augmentation, is approximated here by re-checking
feasibility of the run with its cycle pasted in up to `repeat_bound`
times.  The oracle exists to cross-examine the efficient checks; it
reports at most one (first found) witness per kind.
"""

from __future__ import annotations

from .model import INPUT, SAMPLE, DipAutomaton
from .runs import (
    Run,
    build_dependency_graph,
    enumerate_runs,
    is_feasible,
    lastassign,
    reachable_positions,
)
from .wellformed import (
    DISCLOSING_CYCLE,
    LEAKING_CYCLE,
    LEAKING_PAIR,
    PRIVACY_VIOLATING_PATH,
    Violation,
)


def is_cycle(a: DipAutomaton, run: Run, i: int, j: int) -> bool:
    return a.transitions[run[i]].src == a.transitions[run[j - 1]].trg


def is_non_leaking_cycle(a: DipAutomaton, cyc: Run) -> bool:
    """No variable used anywhere in the doubled cycle has an assignment
    inside the cycle."""
    doubled = cyc + cyc
    for i, t in enumerate(doubled):
        for v in a.transitions[t].usedv:
            if lastassign(a, doubled, v, i) is not None:
                return False
    return True


def _leaking_cycle_at(a, run, j, repeat_bound) -> Violation | None:
    cyc = run[j:]
    positions = [
        (i1, i2, v)
        for i1 in range(j, len(run))
        for v in sorted(a.transitions[run[i1]].assigns)
        for i2 in range(j, len(run))
        if v in a.transitions[run[i2]].usedv
    ]
    if not positions:
        return None
    for m in range(repeat_bound + 1):
        if not is_feasible(a, run + cyc * m):
            return None
    i1, i2, v = positions[0]
    return Violation(
        kind=LEAKING_CYCLE,
        run=run,
        cycles=((j, len(run)),),
        variables=(v,),
        positions={"assign": i1, "use": i2},
    )


def _leaking_pair_of(a, run) -> Violation | None:
    n = len(run)
    edges = build_dependency_graph(a, run)
    reach = reachable_positions(n, edges)
    spans = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n + 1)
        if is_cycle(a, run, i, j) and is_non_leaking_cycle(a, run[i:j])
    ]
    for i1, j1 in spans:
        for i2, j2 in spans:
            if not (j1 <= i2 or j2 <= i1):
                continue
            for k1 in range(i1, j1):
                for ka, k2 in edges:
                    if ka != k1 or not k2 < k1:
                        continue
                    for km1, km in edges:
                        if not (km1 < km and i2 <= km < j2):
                            continue
                        if km1 in reach[k2]:
                            return Violation(
                                kind=LEAKING_PAIR,
                                run=run,
                                cycles=((i1, j1), (i2, j2)),
                                variables=(),
                                positions={
                                    "k1": k1, "k2": k2, "km1": km1, "km": km,
                                },
                            )
    return None


def _disclosing_cycle_at(a, run, j) -> Violation | None:
    if not is_non_leaking_cycle(a, run[j:]):
        return None
    for i in range(j, len(run)):
        t = a.transitions[run[i]]
        if a.state(t.src).kind == INPUT and t.output.is_real:
            return Violation(
                kind=DISCLOSING_CYCLE,
                run=run,
                cycles=((j, len(run)),),
                variables=(),
                positions={"disclose": i},
            )
    return None


def _pvp_of(a, run) -> Violation | None:
    n = len(run)
    edges = build_dependency_graph(a, run)
    reach = reachable_positions(n, edges)
    outs = [p for p in range(n) if a.transitions[run[p]].output.kind == SAMPLE]
    spans = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n + 1)
        if is_cycle(a, run, i, j) and is_non_leaking_cycle(a, run[i:j])
    ]
    for i, j in spans:
        # case (a): output below, forward edge into the cycle
        for km1, km in edges:
            if km1 < km and i <= km < j:
                for k1 in outs:
                    if km1 in reach[k1]:
                        return Violation(
                            kind=PRIVACY_VIOLATING_PATH,
                            subkind="a",
                            run=run,
                            cycles=((i, j),),
                            variables=(),
                            positions={"out": k1, "km": km},
                        )
        # case (b): backward edge out of the cycle, output above
        for k1, k2 in edges:
            if k2 < k1 and i <= k1 < j:
                for km in outs:
                    if km in reach[k2]:
                        return Violation(
                            kind=PRIVACY_VIOLATING_PATH,
                            subkind="b",
                            run=run,
                            cycles=((i, j),),
                            variables=(),
                            positions={"k1": k1, "k2": k2, "out": km},
                        )
    return None


def brute_force_wellformedness(
    a: DipAutomaton, run_bound: int, repeat_bound: int
) -> list[Violation]:
    """Every violation kind whose witness fits within `run_bound`,
    checked per definition; at most one witness per kind, first found
    in the enumeration order."""
    if run_bound < 1 or repeat_bound < 1:
        raise ValueError("bounds must be >= 1")
    found: dict[str, Violation] = {}
    for run in enumerate_runs(a, run_bound, feasible_only=True):
        if not run:
            continue
        if LEAKING_CYCLE not in found:
            for j in range(len(run)):
                if is_cycle(a, run, j, len(run)):
                    hit = _leaking_cycle_at(a, run, j, repeat_bound)
                    if hit:
                        found[LEAKING_CYCLE] = hit
                        break
        if LEAKING_PAIR not in found:
            hit = _leaking_pair_of(a, run)
            if hit:
                found[LEAKING_PAIR] = hit
        if DISCLOSING_CYCLE not in found:
            for j in range(len(run)):
                if is_cycle(a, run, j, len(run)):
                    hit = _disclosing_cycle_at(a, run, j)
                    if hit:
                        found[DISCLOSING_CYCLE] = hit
                        break
        if PRIVACY_VIOLATING_PATH not in found:
            hit = _pvp_of(a, run)
            if hit:
                found[PRIVACY_VIOLATING_PATH] = hit
        if len(found) == 4:
            break
    order = (LEAKING_CYCLE, LEAKING_PAIR, DISCLOSING_CYCLE, PRIVACY_VIOLATING_PATH)
    return [found[k] for k in order if k in found]
