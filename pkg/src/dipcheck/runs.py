"""Per-run dependency graphs, feasibility and run enumeration.

A run is a tuple of transition indices with matching endpoints.  Its
dependency graph orders run positions by the sample orderings the
guards force: an edge i -> j means the value sampled at i must be below
the value sampled at j.  A run is feasible iff that graph is acyclic.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Iterator

from .model import NONINPUT, DipAutomaton, Transition

Run = tuple[int, ...]


def run_transitions(a: DipAutomaton, run: Run) -> list[Transition]:
    return [a.transitions[i] for i in run]


def is_run(a: DipAutomaton, run: Run) -> bool:
    ts = run_transitions(a, run)
    return all(ts[i - 1].trg == ts[i].src for i in range(1, len(ts)))


def lastassign(a: DipAutomaton, run: Run, var: str, j: int) -> int | None:
    """Largest position i < j assigning `var`, or None."""
    if j > len(run):
        raise ValueError("position beyond run end")
    for i in range(j - 1, -1, -1):
        if var in a.transitions[run[i]].assigns:
            return i
    return None


def build_dependency_graph(a: DipAutomaton, run: Run) -> set[tuple[int, int]]:
    """Edge set over positions 0..len(run)-1.

    For every x < v conjunct at position j the sample at j lies below
    the value stored at lastassign(v, j); for x >= v it lies above.
    Edges whose last assignment does not exist are dropped.
    """
    edges: set[tuple[int, int]] = set()
    for j, idx in enumerate(run):
        t = a.transitions[idx]
        for v in t.largev:
            i = lastassign(a, run, v, j)
            if i is not None:
                edges.add((j, i))
        for v in t.smallv:
            i = lastassign(a, run, v, j)
            if i is not None:
                edges.add((i, j))
    return edges


def _has_cycle(n: int, edges: set[tuple[int, int]]) -> bool:
    succ: dict[int, list[int]] = {}
    indeg = [0] * n
    for u, v in edges:
        succ.setdefault(u, []).append(v)
        indeg[v] += 1
    work = deque(i for i in range(n) if indeg[i] == 0)
    seen = 0
    while work:
        u = work.popleft()
        seen += 1
        for v in succ.get(u, ()):
            indeg[v] -= 1
            if indeg[v] == 0:
                work.append(v)
    return seen != n


def is_feasible(a: DipAutomaton, run: Run) -> bool:
    return not _has_cycle(len(run), build_dependency_graph(a, run))


def reachable_positions(n: int, edges: set[tuple[int, int]]) -> list[set[int]]:
    """reach[i] = positions reachable from i (including i)."""
    succ: dict[int, list[int]] = {}
    for u, v in edges:
        succ.setdefault(u, []).append(v)
    reach: list[set[int]] = []
    for i in range(n):
        seen = {i}
        work = [i]
        while work:
            u = work.pop()
            for v in succ.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    work.append(v)
        reach.append(seen)
    return reach


def enumerate_runs(
    a: DipAutomaton, max_len: int, feasible_only: bool = False
) -> Iterator[Run]:
    """All runs from the initial state of length <= max_len, the empty
    run first, then depth-first in transition-index order.

    Infeasible prefixes are pruned when `feasible_only` is set; this is
    sound because extending a run only adds dependency edges.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    yield ()

    def extend(run: list[int], state: str) -> Iterator[Run]:
        if len(run) >= max_len:
            return
        for i in a.outgoing(state):
            run.append(i)
            candidate = tuple(run)
            if not feasible_only or is_feasible(a, candidate):
                yield candidate
                yield from extend(run, a.transitions[i].trg)
            run.pop()

    yield from extend([], a.init)


def strong_feasibility_violations_brute(
    a: DipAutomaton, max_len: int
) -> Run | None:
    """Definitional strong-feasibility oracle over enumerated runs.

    Returns a feasible run containing a dependency path between two
    non-input positions whose sampling means are not strictly
    increasing along it, or None.
    """
    for run in enumerate_runs(a, max_len, feasible_only=True):
        if not run:
            continue
        edges = build_dependency_graph(a, run)
        reach = reachable_positions(len(run), edges)
        for i in range(len(run)):
            qi = a.state(a.transitions[run[i]].src)
            if qi.kind != NONINPUT:
                continue
            for j in reach[i] - {i}:
                qj = a.state(a.transitions[run[j]].src)
                if qj.kind == NONINPUT and not qi.params.mu < qj.params.mu:
                    return run
    return None


def check_strong_feasibility(a: DipAutomaton, aug) -> Run | None:
    """Best-effort strong-feasibility check over the augmentation.

    Tracks, per variable, the mean of the non-input transition that
    last assigned it (or None when last assigned at an input
    transition).  Whenever the augmented state relates two variables
    both carrying non-input means, the means must be strictly ordered
    the same way.  Returns a witness run prefix on violation; None
    means no violation was found by this tracking (the check is sound
    for what it flags but not known complete).
    """
    if all(s.kind != NONINPUT for s in a.states):
        return None
    nvars = len(a.variables)
    init_tags: tuple[Fraction | None, ...] = (None,) * nvars
    start = (aug.init_id, init_tags)
    seen = {start}
    work: deque[tuple[tuple[int, tuple], Run]] = deque([(start, ())])
    while work:
        (sid, tags), prefix = work.popleft()
        for edge in aug.edges_from(sid):
            t = a.transitions[edge.trans]
            src_state = a.state(t.src)
            if src_state.kind == NONINPUT:
                new_tag: Fraction | None = src_state.params.mu
            else:
                new_tag = None
            tags2 = tuple(
                new_tag if a.variables[v] in t.assigns else tags[v]
                for v in range(nvars)
            )
            run2 = prefix + (edge.trans,)
            lt_rows = aug.states[edge.dst].lt
            for i in range(nvars):
                ti = tags2[i]
                if ti is None:
                    continue
                row = lt_rows[i]
                for j in range(nvars):
                    tj = tags2[j]
                    if tj is None or not row >> j & 1:
                        continue
                    if not ti < tj:
                        return run2
            node = (edge.dst, tags2)
            if node not in seen:
                seen.add(node)
                work.append((node, run2))
    return None
