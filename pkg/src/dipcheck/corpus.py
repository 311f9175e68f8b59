"""Benchmark automata and a random-automaton fuzzer.

The fixed benchmarks follow the usual threshold-then-scan encoding: a
chain of non-input states perturbs the thresholds into storage
variables, then input states compare each perturbed query against
them.  Expected verdicts and weights live in BENCHMARKS.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .model import (
    GE,
    INPUT,
    LT,
    NONINPUT,
    OUT_FRESH,
    OUT_SAMPLE,
    DipAutomaton,
    Guard,
    Output,
    State,
    StateParams,
    Transition,
    check_initialized,
    validate,
)

F = Fraction


def _st(name, kind, d, mu, dp=F(1), mup=F(0)):
    return State(name, kind, StateParams(F(d), F(mu), F(dp), F(mup)))


def _tr(src, guard, trg, out, assigns=()):
    return Transition(src, guard, trg, out, frozenset(assigns))


def _sym(name):
    return Output.sym(name)


def gen(name: str, param: int | None = None) -> DipAutomaton:
    """Benchmark generator; `param` is k for min-max, m for range."""
    key = name.lower().replace("_", "-")
    if key in _FIXED:
        if param not in (None, 1) and key != "range":
            raise ValueError(f"{name} takes no parameter")
        return _FIXED[key]()
    if key in ("min-max", "k-min-max"):
        if param is None or param < 2:
            raise ValueError("min-max needs k >= 2")
        return _min_max(param)
    if key in ("range", "m-range"):
        if param is None:
            param = 1
        if param < 1:
            raise ValueError("range needs m >= 1")
        return _range(param)
    raise ValueError(f"unknown benchmark {name!r}")


def _svt_like(exit_out: Output) -> DipAutomaton:
    return DipAutomaton(
        variables=("t",),
        alphabet=frozenset({"bot", "top"}),
        states=(
            _st("q0", NONINPUT, F(1, 4), 0, dp=F(1, 2)),
            _st("q1", INPUT, F(1, 2), 0, dp=F(1, 2)),
            _st("q2", INPUT, F(1, 2), 0, dp=F(1, 2)),
        ),
        init="q0",
        transitions=(
            _tr("q0", Guard.true(), "q1", _sym("bot"), ("t",)),
            _tr("q1", Guard.of(("t", LT)), "q1", _sym("bot")),
            _tr("q1", Guard.of(("t", GE)), "q2", exit_out),
        ),
    )


def _svt():
    return _svt_like(_sym("top"))


def _num_sparse():
    return _svt_like(OUT_FRESH)


def _range_like(loop_out: Output, top_out: Output, with_bot_exit: bool) -> DipAutomaton:
    trans = [
        _tr("q0", Guard.true(), "q1", _sym("bot"), ("rl",)),
        _tr("q1", Guard.true(), "q2", _sym("bot"), ("rh",)),
        _tr("q2", Guard.of(("rl", GE), ("rh", LT)), "q2", loop_out),
        _tr("q2", Guard.of(("rl", GE), ("rh", GE)), "q3", top_out),
    ]
    if with_bot_exit:
        trans.append(_tr("q2", Guard.of(("rl", LT), ("rh", LT)), "q3", _sym("top2")))
    return DipAutomaton(
        variables=("rl", "rh"),
        alphabet=frozenset({"bot", "top1", "top2"}),
        states=(
            _st("q0", NONINPUT, F(1, 4), 0, dp=F(1, 4)),
            _st("q1", NONINPUT, F(1, 4), 1, dp=F(1, 4)),
            _st("q2", INPUT, F(1, 4), 0, dp=F(1, 4)),
            _st("q3", INPUT, F(1, 4), 0, dp=F(1, 4)),
        ),
        init="q0",
        transitions=tuple(trans),
    )


def _one_range():
    return _range_like(_sym("bot"), _sym("top1"), with_bot_exit=True)


def _num_range_1():
    return _range_like(_sym("bot"), OUT_SAMPLE, with_bot_exit=False)


def _num_range_2():
    return _range_like(_sym("bot"), OUT_FRESH, with_bot_exit=False)


def _dc_example():
    return _range_like(OUT_SAMPLE, _sym("top1"), with_bot_exit=True)


def _lc_example():
    # Both loop branches keep scanning; the lower branch drags the upper
    # threshold down, re-assigning a variable its own guard reads.
    return DipAutomaton(
        variables=("x1", "x2"),
        alphabet=frozenset({"bot", "top"}),
        states=(
            _st("q0", NONINPUT, F(1, 2), 0, dp=F(1, 2)),
            _st("q1", NONINPUT, F(1, 2), 1, dp=F(1, 2)),
            _st("q2", INPUT, F(1, 2), 0, dp=F(1, 2)),
            _st("q3", INPUT, F(1, 2), 0, dp=F(1, 2)),
        ),
        init="q0",
        transitions=(
            _tr("q0", Guard.true(), "q1", _sym("bot"), ("x1",)),
            _tr("q1", Guard.true(), "q2", _sym("bot"), ("x2",)),
            _tr("q2", Guard.of(("x1", LT), ("x2", GE)), "q2", _sym("top")),
            _tr("q2", Guard.of(("x2", LT)), "q2", _sym("bot"), ("x2",)),
        ),
    )


def _nwf():
    # Not well-formed yet trivially private: every transition outputs
    # the same symbol, so observations carry no information.
    return DipAutomaton(
        variables=("r",),
        alphabet=frozenset({"top"}),
        states=(
            _st("q0", NONINPUT, F(1, 4), 0),
            _st("q1", INPUT, F(1, 4), 1),
        ),
        init="q0",
        transitions=(
            _tr("q0", Guard.true(), "q1", _sym("top"), ("r",)),
            _tr("q1", Guard.of(("r", GE)), "q0", _sym("top")),
            _tr("q1", Guard.of(("r", LT)), "q1", _sym("top")),
        ),
    )


def _two_range(resample: bool) -> DipAutomaton:
    d = F(1, 4)
    states = [
        _st("q0", NONINPUT, d, 0, dp=d),
        _st("q1", NONINPUT, d, 1, dp=d),
        _st("q2", NONINPUT, d, 2, dp=d),
        _st("q3", INPUT, d, 0, dp=d),
        _st("q4", INPUT, d, 0, dp=d),
        _st("q5", INPUT, d, 0, dp=d),
    ]
    break_target = "q4"
    if resample:
        states.append(_st("qr", NONINPUT, d, 1, dp=d))
        break_target = "qr"
    trans = [
        _tr("q0", Guard.true(), "q1", _sym("cont"), ("u",)),
        _tr("q1", Guard.true(), "q2", _sym("cont"), ("v",)),
        _tr("q2", Guard.true(), "q3", _sym("cont"), ("w",)),
        # first range scan over [u, v)
        _tr("q3", Guard.of(("u", GE), ("v", LT)), "q3", _sym("cont")),
        _tr("q3", Guard.of(("u", LT), ("v", LT)), "q5", _sym("bot")),
        _tr("q3", Guard.of(("v", GE), ("w", LT)), break_target, _sym("top")),
        _tr("q3", Guard.of(("v", GE), ("w", GE)), "q5", _sym("top2")),
    ]
    if resample:
        trans.append(_tr("qr", Guard.true(), "q4", _sym("cont"), ("v",)))
    trans += [
        # second range scan over [v, w)
        _tr("q4", Guard.of(("v", GE), ("w", LT)), "q4", _sym("cont")),
        _tr("q4", Guard.of(("v", LT), ("w", LT)), "q5", _sym("bot")),
        _tr("q4", Guard.of(("v", GE), ("w", GE)), "q5", _sym("top")),
    ]
    return DipAutomaton(
        variables=("u", "v", "w"),
        alphabet=frozenset({"cont", "bot", "top", "top2"}),
        states=tuple(states),
        init="q0",
        transitions=tuple(trans),
    )


def _two_range_1():
    return _two_range(resample=False)


def _two_range_2():
    return _two_range(resample=True)


def _min_max(k: int) -> DipAutomaton:
    d1 = F(1, 4 * k)
    d2 = F(1, 4)
    states = [_st(f"p{i}", INPUT, d1, 0, dp=d1) for i in range(1, k + 1)]
    states.append(_st("scan", INPUT, d2, 0, dp=d2))
    states.append(_st("halt", INPUT, d2, 0, dp=d2))
    trans = [_tr("p1", Guard.true(), "p2" if k > 1 else "scan",
                 _sym("read"), ("mn", "mx"))]
    for i in range(2, k + 1):
        src = f"p{i}"
        dst = f"p{i + 1}" if i < k else "scan"
        trans += [
            _tr(src, Guard.of(("mn", GE), ("mx", GE)), dst, _sym("read"), ("mx",)),
            _tr(src, Guard.of(("mn", LT), ("mx", LT)), dst, _sym("read"), ("mn",)),
            _tr(src, Guard.of(("mn", GE), ("mx", LT)), dst, _sym("read")),
        ]
    trans += [
        _tr("scan", Guard.of(("mn", GE), ("mx", LT)), "scan", _sym("bot")),
        _tr("scan", Guard.of(("mn", GE), ("mx", GE)), "halt", _sym("top")),
        _tr("scan", Guard.of(("mn", LT), ("mx", LT)), "halt", _sym("bot")),
    ]
    return DipAutomaton(
        variables=("mn", "mx"),
        alphabet=frozenset({"read", "bot", "top"}),
        states=tuple(states),
        init="p1",
        transitions=tuple(trans),
    )


def _range(m: int) -> DipAutomaton:
    dt = F(1, 4 * m)
    dq = F(1, 4)
    states: list[State] = []
    trans: list[Transition] = []
    variables: list[str] = []
    for j in range(1, m + 1):
        variables += [f"lo{j}", f"hi{j}"]
        states += [
            _st(f"tl{j}", NONINPUT, dt, 0, dp=dt),
            _st(f"th{j}", NONINPUT, dt, 1, dp=dt),
        ]
    for j in range(1, m + 1):
        states.append(_st(f"c{j}", INPUT, dq, 0, dp=dq))
    states.append(_st("halt", INPUT, dq, 0, dp=dq))
    for j in range(1, m + 1):
        nxt = f"th{j}"
        trans.append(_tr(f"tl{j}", Guard.true(), nxt, _sym("cont"), (f"lo{j}",)))
        after = f"tl{j + 1}" if j < m else "c1"
        trans.append(_tr(f"th{j}", Guard.true(), after, _sym("cont"), (f"hi{j}",)))
    for j in range(1, m + 1):
        nxt = f"c{j + 1}" if j < m else "c1"
        trans += [
            _tr(f"c{j}", Guard.of((f"lo{j}", GE), (f"hi{j}", LT)), nxt, _sym("cont")),
            _tr(f"c{j}", Guard.of((f"lo{j}", GE), (f"hi{j}", GE)), "halt", _sym("top")),
            _tr(f"c{j}", Guard.of((f"lo{j}", LT), (f"hi{j}", LT)), "halt", _sym("bot")),
        ]
    return DipAutomaton(
        variables=tuple(variables),
        alphabet=frozenset({"cont", "top", "bot"}),
        states=tuple(states),
        init="tl1",
        transitions=tuple(trans),
    )


_FIXED = {
    "svt": _svt,
    "num-sparse": _num_sparse,
    "1-range": _one_range,
    "num-range-1": _num_range_1,
    "num-range-2": _num_range_2,
    "dc-example": _dc_example,
    "lc-example": _lc_example,
    "two-range-1": _two_range_1,
    "two-range-2": _two_range_2,
    "nwf": _nwf,
}


@dataclass(frozen=True)
class BenchmarkSpec:
    name: str
    param: int | None
    vars: int
    states: int
    trans: int
    verdict: str                      # "dp" | "not_dp"
    weight: Fraction | None = None    # dp rows
    kind: str | None = None           # violation kind for not_dp rows

    @property
    def display(self) -> str:
        return self.name if self.param is None else f"{self.param}-{self.name}"

    def build(self) -> DipAutomaton:
        return gen(self.name, self.param)


BENCHMARKS: tuple[BenchmarkSpec, ...] = (
    BenchmarkSpec("svt", None, 1, 3, 3, "dp", weight=F(5, 4)),
    BenchmarkSpec("num-sparse", None, 1, 3, 3, "dp", weight=F(7, 4)),
    BenchmarkSpec("dc-example", None, 2, 4, 5, "not_dp", kind="disclosing_cycle"),
    BenchmarkSpec("num-range-1", None, 2, 4, 4, "not_dp", kind="privacy_violating_path"),
    BenchmarkSpec("num-range-2", None, 2, 4, 4, "dp", weight=F(5, 4)),
    BenchmarkSpec("lc-example", None, 2, 4, 4, "not_dp", kind="leaking_cycle"),
    BenchmarkSpec("two-range-1", None, 3, 6, 10, "not_dp", kind="leaking_pair"),
    BenchmarkSpec("two-range-2", None, 3, 7, 11, "dp", weight=F(2)),
    BenchmarkSpec("min-max", 2, 2, 4, 7, "dp", weight=F(1)),
    BenchmarkSpec("min-max", 10, 2, 12, 31, "dp", weight=F(1)),
    BenchmarkSpec("min-max", 20, 2, 22, 61, "dp", weight=F(1)),
    BenchmarkSpec("min-max", 100, 2, 102, 301, "dp", weight=F(1)),
    BenchmarkSpec("min-max", 200, 2, 202, 601, "dp", weight=F(1)),
    BenchmarkSpec("range", 1, 2, 4, 5, "dp", weight=F(1)),
    BenchmarkSpec("range", 10, 20, 31, 50, "dp", weight=F(1)),
    BenchmarkSpec("range", 20, 40, 61, 100, "dp", weight=F(1)),
    BenchmarkSpec("range", 40, 80, 121, 200, "dp", weight=F(1)),
    BenchmarkSpec("range", 80, 160, 241, 400, "dp", weight=F(1)),
)


# --- random automata for fuzzing ---------------------------------------

_REL_PAIRS = ((GE,), (LT,), ())


def random_automaton(
    seed: int,
    max_states: int = 4,
    max_vars: int = 2,
    max_trans: int = 6,
) -> DipAutomaton:
    """Valid, initialized automaton drawn deterministically from `seed`.

    Initialization is ensured by construction: an assignment chain at
    the front writes every variable before any guarded transition can
    run.  Guards of sibling transitions are kept pairwise contradictory
    by rejection sampling.
    """
    rng = random.Random(seed)
    nvars = rng.randint(0, max_vars)
    variables = tuple(f"r{i + 1}" for i in range(nvars))
    n_free = rng.randint(1, max(1, max_states - nvars))
    alphabet = ("a", "b", "c", "d")

    states: list[State] = []
    trans: list[Transition] = []
    for i in range(nvars):
        states.append(_st(f"s{i}", rng.choice((INPUT, NONINPUT)),
                          F(rng.randint(1, 4), 4), rng.randint(-2, 2)))
    body_names = [f"q{i}" for i in range(n_free)]
    body_kinds = {}
    for name in body_names:
        kind = rng.choice((INPUT, INPUT, NONINPUT))
        body_kinds[name] = kind
        states.append(_st(name, kind, F(rng.randint(1, 4), 4), rng.randint(-2, 2)))

    chain_targets = [f"s{i + 1}" for i in range(nvars - 1)] + [body_names[0]]
    for i in range(nvars):
        trans.append(_tr(f"s{i}", Guard.true(), chain_targets[i],
                         _sym(rng.choice(alphabet)), (variables[i],)))

    budget = max_trans - nvars
    outs_by_state: dict[str, list[Guard]] = {n: [] for n in body_names}
    attempts = 0
    while budget > 0 and attempts < 200:
        attempts += 1
        src = rng.choice(body_names)
        if body_kinds[src] == NONINPUT:
            if outs_by_state[src]:
                continue
            guard = Guard.true()
        else:
            atoms = []
            for v in variables:
                rel = rng.choice(_REL_PAIRS)
                if rel:
                    atoms.append((v, rel[0]))
            guard = Guard.of(*atoms)
            if any(not _contradict(guard, g) for g in outs_by_state[src]):
                continue
        trg = rng.choice(body_names)
        out = rng.randrange(8)
        if out == 0:
            output = OUT_SAMPLE
        elif out == 1:
            output = OUT_FRESH
        else:
            output = _sym(rng.choice(alphabet))
        assigns = tuple(v for v in variables if rng.random() < 0.3)
        trans.append(_tr(src, guard, trg, output, assigns))
        outs_by_state[src].append(guard)
        budget -= 1

    a = DipAutomaton(
        variables=variables,
        alphabet=frozenset(alphabet),
        states=tuple(states),
        init="s0" if nvars else body_names[0],
        transitions=tuple(trans),
    )
    assert not validate(a) and check_initialized(a) is None
    return a


def _contradict(g1: Guard, g2: Guard) -> bool:
    from .model import guards_disjoint

    return guards_disjoint(g1, g2)
