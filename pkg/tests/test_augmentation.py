from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dipcheck import corpus
from dipcheck.augmentation import (
    AugState,
    ResourceLimitError,
    TransIndex,
    _bits,
    aug_step,
    build_augmentation,
    tarjan_scc,
)
from dipcheck.model import GE, INPUT, LT, Guard, Output
from dipcheck.runs import enumerate_runs, is_feasible

from conftest import aug_triple_of_run, mk_state, mk_trans
from dipcheck.model import DipAutomaton

F = Fraction


def _relations(a, st_):
    lt = {
        (a.variables[i], a.variables[j])
        for i in range(len(st_.lt))
        for j in _bits(st_.lt[i])
    }
    eq = {
        (a.variables[i], a.variables[j])
        for i in range(len(st_.eq))
        for j in _bits(st_.eq[i])
    }
    return lt, eq


def test_aug_step_first_assignment(fig1):
    ti = TransIndex(fig1)
    init = AugState(0, (0, 0), (1, 2), (0, 0))
    nxt, sm, lg = aug_step(ti, init, 0)
    lt, eq = _relations(fig1, nxt)
    assert lt == set()
    assert eq == {("rl", "rl"), ("rh", "rh")}
    then, _, _ = aug_step(ti, nxt, 1)
    lt2, eq2 = _relations(fig1, then)
    assert lt2 == set() and eq2 == eq


def test_aug_step_rejects_contradiction():
    a = DipAutomaton(
        variables=("r1", "r2"),
        alphabet=frozenset({"a"}),
        states=(mk_state("q", INPUT),),
        init="q",
        transitions=(
            mk_trans("q", Guard.of(("r2", GE), ("r1", LT)), "q", Output.sym("a")),
        ),
    )
    ti = TransIndex(a)
    # state with r1 < r2 already: the guard wants r2 <= x < r1
    state = AugState(0, (2, 0), (1, 2), (0, 1))
    assert aug_step(ti, state, 0) is None


def test_fig1_reachable_states(fig1):
    # hand BFS: q2 and q3 split on whether the scan loop ran (which
    # introduces rl < rh); 6 triples total
    aug = build_augmentation(fig1)
    assert len(aug.states) == 6
    # dual route: triples derived from feasible runs' dependency graphs
    expected = set()
    for run in enumerate_runs(fig1, 6, feasible_only=True):
        expected.add(aug_triple_of_run(fig1, run))
    got = set()
    for st_ in aug.states:
        lt, eq = _relations(fig1, st_)
        got.add((fig1.states[st_.q].name, frozenset(lt), frozenset(eq)))
    assert got == expected


def test_zero_variable_aug_isomorphic_to_base():
    a = DipAutomaton(
        variables=(),
        alphabet=frozenset({"a", "b"}),
        states=(mk_state("q0", INPUT), mk_state("q1", INPUT)),
        init="q0",
        transitions=(
            mk_trans("q0", Guard.true(), "q1", Output.sym("a")),
            mk_trans("q1", Guard.true(), "q0", Output.sym("b")),
        ),
    )
    aug = build_augmentation(a)
    assert len(aug.states) == len(a.states)
    assert len(aug.edges) == len(a.transitions)


def test_state_cap_enforced():
    with pytest.raises(ResourceLimitError):
        build_augmentation(corpus.gen("range", 4), state_cap=3)


@pytest.mark.parametrize(
    "name,param",
    [("svt", None), ("num-sparse", None), ("range", 1), ("num-range-1", None),
     ("num-range-2", None), ("dc-example", None), ("lc-example", None),
     ("two-range-1", None), ("two-range-2", None), ("min-max", 2), ("nwf", None)],
)
def test_projection_bijection_and_characterization(name, param):
    """Augmentation paths <= 6 project bijectively onto feasible runs,
    and every reached triple matches the dependency-graph derivation."""
    a = corpus.gen(name, param)
    aug = build_augmentation(a)
    aug_runs = [p for p in aug.aug_runs(6)]
    projected = [aug.project(p) for p in aug_runs]
    assert len(set(projected)) == len(projected)  # injective
    feasible = [r for r in enumerate_runs(a, 6, feasible_only=True)]
    assert set(projected) == set(feasible)  # surjective onto feasible runs
    assert all(is_feasible(a, r) for r in projected)
    for path in aug_runs:
        run = aug.project(path)
        end = aug.edges[path[-1]].dst if path else aug.init_id
        st_ = aug.states[end]
        lt, eq = _relations(a, st_)
        exp_state, exp_lt, exp_eq = aug_triple_of_run(a, run)
        assert a.states[st_.q].name == exp_state
        assert lt == exp_lt
        # derived eq misses unassigned identity pairs only at the start
        assert {p for p in eq if p[0] != p[1]} == {p for p in exp_eq if p[0] != p[1]}
        assert aug.lift(run) == path


def test_aug_state_invariants_on_corpus():
    """lt strict order, eq equivalence, disjointness, union transitive."""
    for name, param in [("two-range-2", None), ("min-max", 3), ("range", 3)]:
        a = corpus.gen(name, param)
        aug = build_augmentation(a)
        n = len(a.variables)
        for st_ in aug.states:
            for i in range(n):
                assert not st_.lt[i] >> i & 1          # irreflexive
                assert st_.eq[i] >> i & 1               # reflexive
                assert not st_.lt[i] & st_.eq[i]        # disjoint
                for j in _bits(st_.eq[i]):
                    assert st_.eq[j] >> i & 1           # symmetric
                for j in _bits(st_.lt[i] | st_.eq[i]):
                    union_j = st_.lt[j] | st_.eq[j]
                    both = st_.lt[i] | st_.eq[i]
                    assert union_j & ~both == (st_.eq[i] >> i & 1) * 0  # transitive


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_aug_step_matches_slow_closure(seed):
    """Interned relation rows equal a Warshall-closure recomputation."""
    a = corpus.random_automaton(seed, max_states=4, max_vars=3, max_trans=7)
    aug = build_augmentation(a)
    n = len(a.variables)
    for st_ in aug.states:
        # closure of lt over lt union eq must already be lt
        for i in range(n):
            closed = st_.lt[i]
            frontier = closed
            while True:
                grow = 0
                for j in _bits(frontier):
                    grow |= st_.lt[j] | st_.eq[j]
                grow &= ~closed
                if not grow:
                    break
                closed |= grow
                frontier = grow
            assert closed == st_.lt[i], (seed, i)


def test_tarjan_components():
    succ = [[1], [2], [0], [2, 4], [4]]
    scc, n = tarjan_scc(succ)
    assert n == 3
    assert scc[0] == scc[1] == scc[2]
    assert scc[3] != scc[0] != scc[4]
    # reverse topological: every edge target has id <= source
    for u, vs in enumerate(succ):
        for v in vs:
            assert scc[v] <= scc[u]


def test_dump_mentions_transitions(fig1):
    aug = build_augmentation(fig1)
    text = aug.dump()
    assert "insample" not in text  # fig1 outputs symbols only
    assert "q2" in text and "guard=" in text
