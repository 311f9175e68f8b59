"""Shared fixtures and independent reference implementations.

The reference routines here deliberately re-derive facts the package
computes incrementally (guard satisfiability by enumeration, relation
closure by Warshall, augmented triples from dependency graphs), so
tests compare two genuinely different routes.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest

from dipcheck.model import (
    GE,
    INPUT,
    LT,
    NONINPUT,
    DipAutomaton,
    Guard,
    Output,
    State,
    StateParams,
    Transition,
)
from dipcheck.runs import build_dependency_graph, lastassign, reachable_positions

F = Fraction


def mk_state(name, kind, d="1/4", mu="0", dp="1/4", mup="0"):
    return State(name, kind, StateParams(F(d), F(mu), F(dp), F(mup)))


def mk_trans(src, guard, trg, out, assigns=()):
    return Transition(src, guard, trg, out, frozenset(assigns))


def guards_satisfiable_together(g1: Guard, g2: Guard, variables) -> bool:
    """Exhaustive satisfiability of g1 and g2 over value orderings."""
    n = len(variables)
    values = range(2 * n + 3)
    for assignment in product(values, repeat=n + 1):
        x, vals = assignment[0], dict(zip(variables, assignment[1:]))
        ok = True
        for g in (g1, g2):
            for atom in g.atoms:
                v = vals[atom.var]
                ok = ok and (x >= v if atom.rel == GE else x < v)
        if ok:
            return True
    return False


def aug_triple_of_run(a: DipAutomaton, run) -> tuple:
    """(state, lt, eq) the augmentation must reach after `run`,
    re-derived from the dependency graph: lt is path-existence between
    last assignments, eq is their coincidence."""
    n = len(run)
    edges = build_dependency_graph(a, run)
    reach = reachable_positions(n, edges)
    last = {v: lastassign(a, run, v, n) for v in a.variables}
    lt = set()
    eq = set()
    for v1 in a.variables:
        for v2 in a.variables:
            p1, p2 = last[v1], last[v2]
            if p1 is None or p2 is None:
                if v1 == v2 and p1 is None:
                    eq.add((v1, v2))
                continue
            if p1 == p2:
                eq.add((v1, v2))
            elif p2 in reach[p1]:
                lt.add((v1, v2))
    end = a.transitions[run[-1]].trg if run else a.init
    return end, frozenset(lt), frozenset(eq)


def example4_automaton() -> DipAutomaton:
    """Two three-step runs differing in one guard; the first forces a
    cyclic dependency, the second does not."""
    g_lt = Guard.of(("r1", LT))
    g_ge = Guard.of(("r1", GE))
    g_band = Guard.of(("r1", GE), ("r2", LT))
    bot = Output.sym("bot")
    return DipAutomaton(
        variables=("r1", "r2"),
        alphabet=frozenset({"bot"}),
        states=(
            mk_state("q0", NONINPUT),
            mk_state("q1", INPUT),
            mk_state("q2", INPUT),
            mk_state("q3", INPUT),
        ),
        init="q0",
        transitions=(
            mk_trans("q0", Guard.true(), "q1", bot, ("r1",)),
            mk_trans("q1", g_lt, "q2", bot, ("r2",)),
            mk_trans("q1", g_ge, "q2", bot, ("r2",)),
            mk_trans("q2", g_band, "q3", bot),
        ),
    )


RUN_RHO1 = (0, 1, 3)  # second step guarded x < r1: cyclic
RUN_RHO2 = (0, 2, 3)  # second step guarded x >= r1: acyclic


@pytest.fixture(scope="session")
def svt():
    from dipcheck import corpus

    return corpus.gen("svt")


@pytest.fixture(scope="session")
def fig1():
    from dipcheck import corpus

    return corpus.gen("1-range")


@pytest.fixture(scope="session")
def nwf():
    from dipcheck import corpus

    return corpus.gen("nwf")
