from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dipcheck import corpus
from dipcheck.augmentation import build_augmentation
from dipcheck.model import GE, INPUT, LT, NONINPUT, Guard, Output
from dipcheck.runs import (
    build_dependency_graph,
    check_strong_feasibility,
    enumerate_runs,
    is_feasible,
    lastassign,
    strong_feasibility_violations_brute,
)

from conftest import RUN_RHO1, RUN_RHO2, example4_automaton, mk_state, mk_trans
from dipcheck.model import DipAutomaton

F = Fraction


@pytest.fixture(scope="module")
def ex4():
    return example4_automaton()


def test_lastassign_example4(ex4):
    assert lastassign(ex4, RUN_RHO2, "r1", 2) == 0
    assert lastassign(ex4, RUN_RHO2, "r1", 0) is None
    run = (0, 1, 3)  # assigns r1 at 0, r2 at 1
    assert lastassign(ex4, run, "r2", 3) == 1


def test_lastassign_direct_scan():
    a = corpus.gen("lc-example")
    run = (0, 1, 3, 3)  # x2 assigned at 1 and by each loop step
    assert lastassign(a, run, "x2", 2) == 1
    assert lastassign(a, run, "x2", 3) == 2
    assert lastassign(a, run, "x2", 4) == 3


def test_dependency_graphs_example4(ex4):
    assert build_dependency_graph(ex4, RUN_RHO1) == {(1, 0), (0, 2), (2, 1)}
    assert build_dependency_graph(ex4, RUN_RHO2) == {(0, 1), (0, 2), (2, 1)}


def test_feasibility_example4(ex4):
    assert not is_feasible(ex4, RUN_RHO1)
    assert is_feasible(ex4, RUN_RHO2)
    assert is_feasible(ex4, ())


def test_all_true_guards_empty_graph(svt):
    assert build_dependency_graph(svt, (0,)) == set()


def test_dependency_graph_ignores_inputs(ex4):
    # the graph depends only on the transitions taken
    edges = build_dependency_graph(ex4, RUN_RHO2)
    assert edges == build_dependency_graph(ex4, tuple(RUN_RHO2))


def test_dependency_edges_definitional(fig1):
    # re-derive every edge from the definition on enumerated runs
    for run in enumerate_runs(fig1, 5):
        if not run:
            continue
        edges = build_dependency_graph(fig1, run)
        expected = set()
        for j, t in enumerate(run):
            tr = fig1.transitions[t]
            for v in tr.largev:
                i = lastassign(fig1, run, v, j)
                if i is not None:
                    expected.add((j, i))
            for v in tr.smallv:
                i = lastassign(fig1, run, v, j)
                if i is not None:
                    expected.add((i, j))
        assert edges == expected


def test_enumerate_runs_counts(fig1):
    all_runs = list(enumerate_runs(fig1, 2))
    assert all_runs[0] == ()
    nonempty = [r for r in all_runs if r]
    assert nonempty == [(0,), (0, 1)]
    assert list(enumerate_runs(fig1, 0)) == [()]


def test_enumerate_runs_nwf(nwf):
    # 3 transitions expand to 6 nonempty runs within length 3, all feasible
    runs = [r for r in enumerate_runs(nwf, 3) if r]
    assert len(runs) == 6
    assert all(is_feasible(nwf, r) for r in runs)
    feas = [r for r in enumerate_runs(nwf, 3, feasible_only=True) if r]
    assert feas == runs


def test_enumerate_runs_prefix_closed_and_ordered(svt):
    runs = list(enumerate_runs(svt, 4))
    seen = set(runs)
    for r in runs:
        if r:
            assert r[:-1] in seen


def test_strong_feasibility_svt_ok(svt):
    aug = build_augmentation(svt)
    assert check_strong_feasibility(svt, aug) is None
    assert strong_feasibility_violations_brute(svt, 8) is None


def test_strong_feasibility_flags_reversed_means():
    # two non-input assignments with means 1 then 0, guards forcing the
    # first sample below the second
    a = DipAutomaton(
        variables=("r1", "r2"),
        alphabet=frozenset({"a"}),
        states=(
            mk_state("s0", NONINPUT, mu="1"),
            mk_state("s1", NONINPUT, mu="0"),
            mk_state("q", INPUT),
        ),
        init="s0",
        transitions=(
            mk_trans("s0", Guard.true(), "s1", Output.sym("a"), ("r1",)),
            mk_trans("s1", Guard.true(), "q", Output.sym("a"), ("r2",)),
            mk_trans("q", Guard.of(("r1", GE), ("r2", LT)), "q", Output.sym("a")),
        ),
    )
    aug = build_augmentation(a)
    witness = check_strong_feasibility(a, aug)
    assert witness is not None
    assert strong_feasibility_violations_brute(a, 4) is not None


def test_strong_feasibility_vacuous_without_noninput_states():
    a = DipAutomaton(
        variables=(),
        alphabet=frozenset({"a"}),
        states=(mk_state("q", INPUT),),
        init="q",
        transitions=(mk_trans("q", Guard.true(), "q", Output.sym("a")),),
    )
    assert check_strong_feasibility(a, build_augmentation(a)) is None


def test_strong_feasibility_tracker_agrees_with_brute():
    for seed in range(60):
        a = corpus.random_automaton(seed, max_states=4, max_vars=2, max_trans=6)
        brute = strong_feasibility_violations_brute(a, 6)
        tracked = check_strong_feasibility(a, build_augmentation(a))
        if tracked is not None:
            # anything the tracker flags must be a real violation
            assert strong_feasibility_violations_brute(a, len(tracked) + 2) is not None
        if brute is not None and len(brute) <= 4:
            assert tracked is not None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 5))
def test_feasible_prefix_monotone(seed, bound):
    a = corpus.random_automaton(seed)
    for run in enumerate_runs(a, bound):
        if run and not is_feasible(a, run[:-1]):
            assert not is_feasible(a, run)
