import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from dipcheck.model import (
    FULL_INTERVAL,
    INPUT,
    NONINPUT,
    TAU,
    Guard,
    Interval,
    Output,
    State,
    StateParams,
)
from dipcheck.simulate import (
    estimate_prob,
    estimate_ratio,
    laplace_cdf,
    random_adjacent_pair,
    sample_laplace,
    simulate_trial,
    trial_rng,
)

from conftest import mk_state, mk_trans
from dipcheck.model import DipAutomaton

F = Fraction

TRIALS = 200_000


def _single_output_automaton():
    return DipAutomaton(
        variables=(),
        alphabet=frozenset({"a"}),
        states=(State("q", INPUT, StateParams(F(1), F(0), F(1), F(0))),
                State("h", INPUT, StateParams(F(1), F(0), F(1), F(0)))),
        init="q",
        transitions=(mk_trans("q", Guard.true(), "h", Output(kind="sample")),),
    )


def test_sample_laplace_moments():
    rng = trial_rng(1)
    xs = np.array([sample_laplace(2.0, 0.0, rng) for _ in range(TRIALS)])
    se_mean = math.sqrt(0.5 / TRIALS)
    assert abs(xs.mean()) < 4 * se_mean
    assert abs(np.median(xs)) < 4 * se_mean
    assert abs(xs.var() - 0.5) < 0.02  # var = 2/k^2 = 0.5
    assert abs((xs > 0).mean() - 0.5) < 4 * math.sqrt(0.25 / TRIALS)

    rng = trial_rng(2)
    ys = np.array([sample_laplace(1.0, 3.0, rng) for _ in range(TRIALS)])
    assert abs(ys.mean() - 3.0) < 4 * math.sqrt(2.0 / TRIALS)


def test_sample_laplace_rejects_bad_scale():
    with pytest.raises(ValueError):
        sample_laplace(0.0, 0.0, trial_rng(0))


def test_single_transition_half_line():
    a = _single_output_automaton()
    est = estimate_prob(a, (F(0),), (Interval(F(0), None),), 1.0, TRIALS, 3)
    assert abs(est.point - 0.5) < 4 * est.stderr + 1e-12
    full = estimate_prob(a, (F(0),), (FULL_INTERVAL,), 1.0, TRIALS, 3)
    assert full.point == 1.0


def test_estimate_matches_interval_oracle():
    a = _single_output_automaton()
    lo, hi = F(-1), F(1, 2)
    est = estimate_prob(a, (F(1, 4),), (Interval(lo, hi),), 2.0, TRIALS, 9)
    expected = laplace_cdf(0.5, 2.0, 0.25) - laplace_cdf(-1.0, 2.0, 0.25)
    assert abs(est.point - expected) < 4 * est.stderr


def test_svt_two_step_quadrature(svt):
    eps = 1.0

    def dens(t):
        return 0.125 * math.exp(-0.25 * abs(t))

    expected, err = integrate.quad(
        lambda t: dens(t) * laplace_cdf(t, 0.5, 0.0) ** 2, -80, 80, limit=300
    )
    est = estimate_prob(svt, (TAU, F(0), F(0)), ("bot", "bot", "bot"), eps, TRIALS, 5)
    assert abs(est.point - expected) < 4 * est.stderr + 1e-9


def test_svt_extreme_input(svt):
    est = estimate_prob(svt, (TAU, F(-10)), ("bot", "bot"), 8.0, 50_000, 1)
    assert est.point > 0.99


def test_simulate_trial_walks_fig1(fig1):
    # the two threshold steps are unconditional; the scan step either
    # fires one of the three branches or halts in the uncovered corner
    rng = trial_rng(4)
    for _ in range(50):
        out = simulate_trial(fig1, (TAU, TAU, F(5)), 1.0, None, rng)
        assert out.run[:2] == (0, 1)
        if not out.terminated_early:
            assert out.run[2] in (2, 3, 4)


def test_simulate_trial_empty_input(svt):
    out = simulate_trial(svt, (), 1.0, None, trial_rng(0))
    assert out.run == () and out.outputs == ()


def test_simulate_trial_kind_mismatch(svt):
    with pytest.raises(ValueError):
        simulate_trial(svt, (F(1),), 1.0, None, trial_rng(0))


def test_seed_determinism(svt):
    args = (svt, (TAU, F(0), F(1)), ("bot", "bot", "top"), 1.0, 100_000, 42)
    assert estimate_prob(*args) == estimate_prob(*args)
    r1 = estimate_ratio(svt, (TAU, F(0)), (TAU, F(1)), ("bot", "bot"), 1.0, 50_000, 7)
    r2 = estimate_ratio(svt, (TAU, F(0)), (TAU, F(1)), ("bot", "bot"), 1.0, 50_000, 7)
    assert r1 == r2


def test_unreachable_state_is_noop(svt):
    padded = DipAutomaton(
        variables=svt.variables,
        alphabet=svt.alphabet,
        states=svt.states + (mk_state("zz", INPUT),),
        init=svt.init,
        transitions=svt.transitions,
    )
    args = ((TAU, F(0), F(1)), ("bot", "bot", "top"), 1.0, 100_000, 42)
    assert estimate_prob(svt, *args) == estimate_prob(padded, *args)


def test_estimate_ratio_rejects_non_adjacent(svt):
    with pytest.raises(ValueError):
        estimate_ratio(svt, (TAU, F(0)), (TAU, F(2)), ("bot", "bot"), 1.0, 100, 0)


def test_ratio_identity_inputs(svt):
    ratio, ci, flag = estimate_ratio(
        svt, (TAU, F(0)), (TAU, F(0)), ("bot", "bot"), 1.0, TRIALS, 11
    )
    assert not flag
    assert abs(ratio - 1.0) <= 3 * ci / 1.96 * 1.96 + 0.05


def test_svt_ratio_within_budget(svt):
    # adjacent pair, discrete event: ratio below e^{D eps} = e^{5/4}
    for seed in range(5):
        import random

        alpha, beta, event = random_adjacent_pair(svt, random.Random(seed), 5)
        ratio, ci, flag = estimate_ratio(svt, alpha, beta, event, 1.0, TRIALS, seed)
        if flag:
            continue
        assert ratio <= math.exp(1.25) + 3 * ci


def test_event_length_mismatch(svt):
    with pytest.raises(ValueError):
        estimate_prob(svt, (TAU, F(0)), ("bot",), 1.0, 100, 0)
