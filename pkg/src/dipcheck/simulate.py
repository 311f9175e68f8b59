"""Monte-Carlo execution of the sampling semantics.

A trial walks the automaton over a concrete input sequence, drawing
the two per-step samples from the Laplace distributions of the current
state, and records which transitions fired and what was output.  Event
probabilities are plain trial frequencies: a trial matches an output
event iff it consumed the whole input and every position matches
(symbols exactly, real outputs inside the event's interval).

Randomness is counter-based (Philox) and consumed in a fixed layout,
so estimates depend only on (seed, trials), never on batching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import (
    GE,
    INPUT,
    SAMPLE,
    SYMBOL,
    TAU,
    DipAutomaton,
    Interval,
    adjacent,
)

_BATCH = 1 << 18  # fixed; part of the stream layout


@dataclass(frozen=True)
class TrialOutcome:
    run: tuple[int, ...]
    outputs: tuple
    terminated_early: bool


@dataclass(frozen=True)
class Estimate:
    point: float
    trials: int
    ci_halfwidth: float
    z: float = 1.96

    @property
    def stderr(self) -> float:
        return self.ci_halfwidth / self.z if self.z else 0.0


def sample_laplace(k: float, mu: float, rng: np.random.Generator) -> float:
    """One draw with density (k/2) e^{-k|x-mu|}; k is the inverse scale."""
    if not k > 0:
        raise ValueError("inverse scale must be positive")
    u = rng.random() - 0.5
    return mu - math.copysign(1.0, u) * math.log1p(-2.0 * abs(u)) / k


def _laplace_from_uniform(u: np.ndarray, inv_scale: np.ndarray, mean: np.ndarray):
    c = u - 0.5
    return mean - np.sign(c) * np.log1p(-2.0 * np.abs(c)) / inv_scale


def laplace_cdf(x: float, k: float, mu: float) -> float:
    if x < mu:
        return 0.5 * math.exp(k * (x - mu))
    return 1.0 - 0.5 * math.exp(-k * (x - mu))


def laplace_interval_prob(lo: float, hi: float, k: float, mu: float) -> float:
    return laplace_cdf(hi, k, mu) - laplace_cdf(lo, k, mu)


def simulate_trial(
    a: DipAutomaton,
    inputs,
    epsilon: float,
    eta: dict[str, float] | None,
    rng: np.random.Generator,
) -> TrialOutcome:
    """Single trial; consumes two uniforms per step from `rng`."""
    vals = {v: 0.0 for v in a.variables}
    if eta:
        vals.update(eta)
    state = a.init
    run: list[int] = []
    outputs: list = []
    for item in inputs:
        st = a.state(state)
        is_real = item is not TAU
        if is_real != (st.kind == INPUT):
            raise ValueError(f"input/state kind mismatch at state {state}")
        shift = float(item) if is_real else 0.0
        d = float(st.params.d)
        dp = float(st.params.d_prime)
        if not d > 0:
            raise ValueError(f"state {state} has zero sample scale")
        x = sample_laplace(d * epsilon, float(st.params.mu) + shift, rng)
        if dp > 0:
            xp = sample_laplace(dp * epsilon, float(st.params.mu_prime) + shift, rng)
        else:
            rng.random()
            xp = math.nan
        fired = None
        for i in a.outgoing(state):
            t = a.transitions[i]
            ok = True
            for atom in t.guard.atoms:
                v = vals[atom.var]
                ok = ok and (x >= v if atom.rel == GE else x < v)
            if ok:
                fired = i
                break
        if fired is None:
            return TrialOutcome(tuple(run), tuple(outputs), True)
        t = a.transitions[fired]
        run.append(fired)
        if t.output.kind == SYMBOL:
            outputs.append(t.output.symbol)
        else:
            outputs.append(x if t.output.kind == SAMPLE else xp)
        for v in t.assigns:
            vals[v] = x
        state = t.trg
    return TrialOutcome(tuple(run), tuple(outputs), False)


class _Compiled:
    """Array view of the automaton for vectorized stepping."""

    def __init__(self, a: DipAutomaton, epsilon: float):
        self.a = a
        names = [s.name for s in a.states]
        self.state_id = {n: i for i, n in enumerate(names)}
        self.is_input = np.array([s.kind == INPUT for s in a.states])
        self.d = np.array([float(s.params.d) for s in a.states]) * epsilon
        self.mu = np.array([float(s.params.mu) for s in a.states])
        self.dp = np.array([float(s.params.d_prime) for s in a.states]) * epsilon
        self.mup = np.array([float(s.params.mu_prime) for s in a.states])
        self.var_id = {v: i for i, v in enumerate(a.variables)}
        self.out_by_state = {
            i: a.outgoing(n) for i, n in enumerate(names)
        }
        self.atoms_by_trans = [
            [(self.var_id[atom.var], atom.rel == GE)
             for atom in sorted(t.guard.atoms, key=lambda x: x.var)]
            for t in a.transitions
        ]


def _match_batch(
    comp: _Compiled,
    inputs,
    event,
    n: int,
    rng: np.random.Generator,
) -> int:
    """Survivor-compacted vectorized stepping.  The uniform draws keep
    the full (n, 2) shape every step so the stream layout never depends
    on intermediate survival; all other work shrinks with the
    survivors."""
    a = comp.a
    nvars = len(a.variables)
    idx = np.arange(n)  # draw-matrix rows of surviving trials
    state = np.full(n, comp.state_id[a.init], dtype=np.int32)
    vals = np.zeros((n, max(nvars, 1)))
    for item, ev in zip(inputs, event):
        u = rng.random((n, 2))
        if idx.size == 0:
            continue  # keep consuming the stream for layout stability
        is_real = item is not TAU
        kind_ok = comp.is_input[state] == is_real
        if not kind_ok.all():
            idx, state, vals = idx[kind_ok], state[kind_ok], vals[kind_ok]
            if idx.size == 0:
                continue
        shift = float(item) if is_real else 0.0
        d = comp.d[state]
        if not np.all(d > 0):
            raise ValueError("reached a state with zero sample scale")
        x = _laplace_from_uniform(u[idx, 0], d, comp.mu[state] + shift)
        if isinstance(ev, Interval):  # fresh sample only matters here
            dp = comp.dp[state]
            xp = _laplace_from_uniform(u[idx, 1], np.where(dp > 0, dp, 1.0),
                                       comp.mup[state] + shift)
        else:
            xp = None

        m = idx.size
        fired = np.full(m, -1, dtype=np.int32)
        for q in np.unique(state):
            mask = state == q
            for ti in comp.out_by_state[q]:
                atoms = comp.atoms_by_trans[ti]
                sat = mask.copy()
                for var_col, is_ge in atoms:
                    col = vals[:, var_col]
                    sat &= (x >= col) if is_ge else (x < col)
                fired[sat] = ti
                mask &= ~sat

        keep = fired >= 0
        for ti in np.unique(fired[keep]):
            t = a.transitions[ti]
            rows = fired == ti
            if isinstance(ev, Interval):
                if t.output.kind == SYMBOL:
                    keep[rows] = False
                    continue
                val = x if t.output.kind == SAMPLE else xp
                ok = rows.copy()
                if ev.lo is not None:
                    ok &= val > float(ev.lo)
                if ev.hi is not None:
                    ok &= val < float(ev.hi)
                keep[rows & ~ok] = False
                rows = ok
            else:
                if t.output.kind != SYMBOL or t.output.symbol != ev:
                    keep[rows] = False
                    continue
            for v in t.assigns:
                vals[rows, comp.var_id[v]] = x[rows]
            state[rows] = comp.state_id[t.trg]
        if not keep.all():
            idx, state, vals = idx[keep], state[keep], vals[keep]
    return int(idx.size)


def estimate_prob(
    a: DipAutomaton,
    inputs,
    event,
    epsilon: float,
    trials: int,
    seed: int,
    z: float = 1.96,
) -> Estimate:
    """Frequency of trials matching `event` on `inputs`."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    inputs = tuple(inputs)
    event = tuple(event)
    if len(inputs) != len(event):
        raise ValueError("event length must equal input length")
    comp = _Compiled(a, epsilon)
    matched = 0
    done = 0
    batch_idx = 0
    while done < trials:
        n = min(_BATCH, trials - done)
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence((seed, batch_idx)))
        )
        matched += _match_batch(comp, inputs, event, n, rng)
        done += n
        batch_idx += 1
    p = matched / trials
    se = math.sqrt(p * (1 - p) / trials)
    return Estimate(point=p, trials=trials, ci_halfwidth=z * se, z=z)


def estimate_ratio(
    a: DipAutomaton,
    alpha,
    beta,
    event,
    epsilon: float,
    trials: int,
    seed: int,
    z: float = 1.96,
) -> tuple[float, float, bool]:
    """Ratio P(alpha)/P(beta) with propagated CI half-width.

    Returns (ratio, ci_halfwidth, denominator_degenerate); the flag is
    set when the denominator estimate is statistically indistinct from
    zero, in which case ratio may be inf.
    """
    alpha, beta = tuple(alpha), tuple(beta)
    if not adjacent(alpha, beta):
        raise ValueError("input sequences are not adjacent")
    ea = estimate_prob(a, alpha, event, epsilon, trials, seed, z)
    eb = estimate_prob(a, beta, event, epsilon, trials, seed + 1, z)
    degenerate = eb.point - eb.ci_halfwidth <= 0
    if eb.point == 0:
        return math.inf, math.inf, True
    ratio = ea.point / eb.point
    if ea.point == 0:
        return 0.0, ratio_se(ea, eb, ratio, z), degenerate
    return ratio, ratio_se(ea, eb, ratio, z), degenerate


def ratio_se(ea: Estimate, eb: Estimate, ratio: float, z: float) -> float:
    rel = 0.0
    if ea.point > 0:
        rel += (ea.stderr / ea.point) ** 2
    if eb.point > 0:
        rel += (eb.stderr / eb.point) ** 2
    return z * abs(ratio) * math.sqrt(rel)


def trial_rng(seed: int) -> np.random.Generator:
    """Counter-based generator for scalar trials."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def random_adjacent_pair(
    a: DipAutomaton, rng, max_len: int
) -> tuple[tuple, tuple, tuple]:
    """(alpha, beta, event) for a random feasible run of length <=
    max_len, beta within unit distance of alpha, event marginalizing
    real outputs."""
    from .model import FULL_INTERVAL
    from .runs import enumerate_runs

    runs = [r for r in enumerate_runs(a, max_len, feasible_only=True) if r]
    run = runs[rng.randrange(len(runs))]
    alpha = []
    beta = []
    event = []
    for t in run:
        tr = a.transitions[t]
        st = a.state(tr.src)
        if st.kind == INPUT:
            val = Fraction(rng.randint(-8, 8), 4)
            gap = Fraction(rng.randint(-4, 4), 4)
            alpha.append(val)
            beta.append(val + gap)
        else:
            alpha.append(TAU)
            beta.append(TAU)
        event.append(tr.output.symbol if tr.output.kind == SYMBOL else FULL_INTERVAL)
    return tuple(alpha), tuple(beta), tuple(event)
