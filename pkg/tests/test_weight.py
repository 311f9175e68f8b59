from fractions import Fraction

import pytest

from dipcheck import corpus
from dipcheck.augmentation import build_augmentation
from dipcheck.model import GE, INPUT, NONINPUT, Guard, Output
from dipcheck.weight import (
    compute_weight,
    edge_weight,
    run_weight,
    var_used_before_reassign,
)

from conftest import mk_state, mk_trans
from dipcheck.model import DipAutomaton

F = Fraction


@pytest.fixture(scope="module")
def svt_aug(svt):
    return build_augmentation(svt)


def test_var_used_before_reassign_svt(svt_aug):
    # after the threshold assignment the scan guard reads it at once
    after_assign = svt_aug.edges[0].dst
    assert var_used_before_reassign(svt_aug, after_assign, 0)


def test_var_used_before_reassign_blocked():
    a = DipAutomaton(
        variables=("r1",),
        alphabet=frozenset({"a"}),
        states=(mk_state("s0", NONINPUT), mk_state("s1", NONINPUT), mk_state("q", INPUT)),
        init="s0",
        transitions=(
            mk_trans("s0", Guard.true(), "s1", Output.sym("a"), ("r1",)),
            mk_trans("s1", Guard.true(), "q", Output.sym("a"), ("r1",)),
            mk_trans("q", Guard.of(("r1", GE)), "q", Output.sym("a")),
        ),
    )
    aug = build_augmentation(a)
    assert not var_used_before_reassign(aug, aug.edges[0].dst, 0)
    assert var_used_before_reassign(aug, aug.edges[1].dst, 0)


def test_var_used_before_reassign_dead_end(svt_aug):
    halt = next(
        e.dst for e in svt_aug.edges
        if svt_aug.base.transitions[e.trans].trg == "q2"
    )
    assert not var_used_before_reassign(svt_aug, halt, 0)


def test_edge_weights_svt(svt_aug):
    weights = {e.trans: edge_weight(svt_aug, e) for e in svt_aug.edges}
    assert weights[0] == F(1, 4)   # threshold perturbation
    assert weights[1] == F(0)      # scan loop
    assert weights[2] == F(1)      # exit: input, sample above the scanned bound


def test_edge_weight_num_sparse_exit():
    aug = build_augmentation(corpus.gen("num-sparse"))
    exit_w = [edge_weight(aug, e) for e in aug.edges if e.trans == 2]
    assert all(w == F(3, 2) for w in exit_w)


@pytest.mark.parametrize(
    "name,param,expected",
    [
        ("svt", None, F(5, 4)),
        ("num-sparse", None, F(7, 4)),
        ("num-range-2", None, F(5, 4)),
        ("two-range-2", None, F(2)),
        ("1-range", None, F(1)),
        ("min-max", 2, F(1)),
        ("min-max", 10, F(1)),
        ("range", 2, F(1)),
        ("range", 10, F(1)),
    ],
)
def test_compute_weight_table(name, param, expected):
    aug = build_augmentation(corpus.gen(name, param))
    assert compute_weight(aug) == expected


def test_weight_invariant_under_renaming():
    a = corpus.gen("two-range-2")
    renamed_states = tuple(
        type(s)(f"z_{s.name}", s.kind, s.params) for s in a.states
    )
    renamed = DipAutomaton(
        variables=a.variables,
        alphabet=a.alphabet,
        states=renamed_states,
        init=f"z_{a.init}",
        transitions=tuple(
            type(t)(f"z_{t.src}", t.guard, f"z_{t.trg}", t.output, t.assigns)
            for t in a.transitions
        ),
    )
    reordered = DipAutomaton(
        variables=a.variables,
        alphabet=a.alphabet,
        states=a.states,
        init=a.init,
        transitions=tuple(reversed(a.transitions)),
    )
    base = compute_weight(build_augmentation(a))
    assert compute_weight(build_augmentation(renamed)) == base
    assert compute_weight(build_augmentation(reordered)) == base


@pytest.mark.parametrize(
    "name,param",
    [("svt", None), ("num-sparse", None), ("1-range", None),
     ("num-range-2", None), ("two-range-2", None), ("min-max", 2), ("range", 2)],
)
def test_run_weight_bounded_by_condensation(name, param):
    """Positional run weights up to length 10 never exceed the bound."""
    a = corpus.gen(name, param)
    aug = build_augmentation(a)
    bound = compute_weight(aug)
    tight = F(0)
    for path in aug.aug_runs(10):
        w = run_weight(aug, path)
        assert w <= bound, (name, path)
        tight = max(tight, w)
    # the bound is not absurdly loose: some run reaches at least half
    assert tight * 2 >= bound


def test_run_weight_positionwise_sanity():
    a = corpus.gen("num-sparse")
    aug = build_augmentation(a)
    for path in aug.aug_runs(6):
        w = run_weight(aug, path)
        cap = sum(
            (2 * a.state(a.transitions[aug.edges[e].trans].src).params.d
             + a.state(a.transitions[aug.edges[e].trans].src).params.d_prime)
            for e in path
        )
        assert w <= cap
