"""Adjacent input pairs that statistically falsify privacy.

Each violation kind comes with a construction: unroll the witness
cycle(s) `ell` times, pick a compliant input sequence `alpha` whose
per-position means satisfy every ordering the run's dependency graph
demands, then derive `beta` from it by moving the flagged position of
every iteration one unit the wrong way.  The probability ratio of the
two computations then grows with `ell`.

For the cycle/pair kinds the compliant means come from a potential
function over the dependency graph (strictly ascending along edges by
a uniform gap); for the disclosing/output kinds the simpler centered
choice -mu works and the output event carries the constrained
interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .model import (
    FRESH,
    GE,
    NONINPUT,
    TAU,
    DipAutomaton,
    EventItem,
    FULL_INTERVAL,
    InputItem,
    Interval,
)
from .runs import Run, build_dependency_graph, lastassign
from .wellformed import (
    DISCLOSING_CYCLE,
    LEAKING_CYCLE,
    LEAKING_PAIR,
    PRIVACY_VIOLATING_PATH,
    Violation,
)

F = Fraction


@dataclass(frozen=True)
class WitnessPair:
    run: Run
    alpha: tuple[InputItem, ...]
    beta: tuple[InputItem, ...]
    event: tuple[EventItem, ...]
    ell: int
    bands: dict[int, tuple[Fraction, Fraction]] = field(default_factory=dict)


def psi_assignment(
    a: DipAutomaton,
    run: Run,
    mode: str,
    designated: frozenset[int] = frozenset(),
    z_pool: frozenset[int] = frozenset(),
) -> tuple[list[Fraction], Fraction, Fraction]:
    """Potential over run positions ascending along dependency edges.

    Positions in `designated` are pinned to their sampling mean (they
    are the cycle's non-input steps); `z_pool` supplies the means the
    base value `z` must stay clear of.  In "lower" mode sources start
    at z below every pooled mean and potentials grow forward; "upper"
    is the mirror image.  Returns (psi, delta, z).
    """
    if mode not in ("lower", "upper"):
        raise ValueError(f"bad mode {mode!r}")
    n = len(run)
    mus = [a.state(a.transitions[t].src).params.mu for t in run]
    noninput = [a.state(a.transitions[t].src).kind == NONINPUT for t in run]

    gaps = {
        abs(mus[u] - mus[v])
        for u in range(n)
        for v in range(n)
        if noninput[u] and noninput[v] and mus[u] != mus[v]
    }
    gaps.add(F(1, 2))
    delta = min(gaps) / n

    pool = [mus[u] for u in z_pool if noninput[u]]
    if mode == "lower":
        z = (min(pool) - F(1, 2)) if pool else F(-1, 2)
    else:
        z = (max(pool) + F(1, 2)) if pool else F(1, 2)

    edges = build_dependency_graph(a, run)
    if _cyclic(n, edges):
        raise ValueError("dependency graph is cyclic; run infeasible")

    preds: list[list[int]] = [[] for _ in range(n)]
    succs: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        preds[v].append(u)
        succs[u].append(v)

    psi: list[Fraction | None] = [None] * n
    order = _topo(n, edges)
    if mode == "upper":
        order = list(reversed(order))
    for u in order:
        if u in designated:
            psi[u] = mus[u]
            continue
        if mode == "lower":
            around = preds[u]
        else:
            around = succs[u]
        if not around:
            psi[u] = z
            continue
        vals = []
        for p in around:
            base = mus[p] if p in designated else psi[p]
            vals.append(base + delta if mode == "lower" else base - delta)
        psi[u] = max(vals) if mode == "lower" else min(vals)
    return [p for p in psi], delta, z


def _cyclic(n: int, edges) -> bool:
    from .runs import _has_cycle

    return _has_cycle(n, edges)


def _topo(n: int, edges) -> list[int]:
    indeg = [0] * n
    succ: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        succ[u].append(v)
        indeg[v] += 1
    order = [i for i in range(n) if indeg[i] == 0]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                order.append(v)
    return order


def gen_witness(a: DipAutomaton, v: Violation, ell: int) -> WitnessPair:
    """Adjacent pair and event for `v`, its cycle(s) unrolled `ell`
    times."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if v.kind == LEAKING_CYCLE:
        return _witness_lc(a, v, ell)
    if v.kind == LEAKING_PAIR:
        return _witness_lp(a, v, ell)
    if v.kind == DISCLOSING_CYCLE:
        return _witness_dc(a, v, ell)
    if v.kind == PRIVACY_VIOLATING_PATH:
        return _witness_pvp(a, v, ell)
    raise ValueError(f"unknown violation kind {v.kind!r}")


def _base_event(a: DipAutomaton, run: Run) -> list[EventItem]:
    out = []
    for t in run:
        o = a.transitions[t].output
        out.append(o.symbol if o.kind == "symbol" else FULL_INTERVAL)
    return out


def _alpha_from_psi(a, run, psi) -> list[InputItem]:
    return [
        TAU if a.state(a.transitions[t].src).kind == NONINPUT else psi[u]
        for u, t in enumerate(run)
    ]


def _bands(a, run, psi, delta, designated) -> dict:
    out = {}
    for u, t in enumerate(run):
        if a.state(a.transitions[t].src).kind == NONINPUT and u not in designated:
            out[u] = (psi[u] - delta / 2, psi[u] + delta / 2)
    return out


def _witness_lc(a: DipAutomaton, v: Violation, ell: int) -> WitnessPair:
    (start, _end), = v.cycles
    prefix = v.run[:start]
    cyc = v.run[start:]
    doubled = cyc + cyc
    n = len(doubled)
    m = len(prefix)
    core = prefix + doubled

    # assign/refer triples of the doubled cycle
    triples = []
    for j in range(m, m + n):
        t = a.transitions[core[j]]
        for atom in sorted(t.guard.atoms, key=lambda x: x.var):
            u = lastassign(a, core, atom.var, j)
            if u is not None and u >= m:
                triples.append((u, j, atom.var, atom.rel))
    if not triples:
        raise ValueError("violation carries no assign/refer pair")
    ge = [tr for tr in triples if tr[3] == GE]
    chosen_pool = ge if ge else triples
    mode = "lower" if ge else "upper"

    def mu_of(tr):
        return a.state(a.transitions[core[tr[0]]].src).params.mu

    noninput_pool = [
        tr for tr in chosen_pool
        if a.state(a.transitions[core[tr[0]]].src).kind == NONINPUT
    ]
    if noninput_pool:
        extreme = max if mode == "lower" else min
        target = extreme(mu_of(tr) for tr in noninput_pool)
        i, j, var, _ = min(tr for tr in noninput_pool if mu_of(tr) == target)
    else:
        i, j, var, _ = min(chosen_pool)

    run_ell = prefix + doubled * ell
    total = len(run_ell)
    designated = frozenset(
        u for u in range(m, total)
        if a.state(a.transitions[run_ell[u]].src).kind == NONINPUT
    )
    z_pool = frozenset(range(m, m + n))
    psi, delta, _z = psi_assignment(a, run_ell, mode, designated, z_pool)
    alpha = _alpha_from_psi(a, run_ell, psi)
    beta = list(alpha)
    shift = F(-1) if mode == "lower" else F(1)
    for c in range(ell):
        beta[j + n * c] = alpha[j + n * c] + shift
    return WitnessPair(
        run=run_ell,
        alpha=tuple(alpha),
        beta=tuple(beta),
        event=tuple(_base_event(a, run_ell)),
        ell=ell,
        bands=_bands(a, run_ell, psi, delta, designated),
    )


def _witness_lp(a: DipAutomaton, v: Violation, ell: int) -> WitnessPair:
    span_a, span_b = v.cycles
    first, second = (span_a, span_b) if span_a[0] <= span_b[0] else (span_b, span_a)
    s1, e1 = first
    s2, e2 = second
    n1, n2 = e1 - s1, e2 - s2
    km = v.positions["km"]

    run_ell = (
        v.run[:s1]
        + v.run[s1:e1] * ell
        + v.run[e1:s2]
        + v.run[s2:e2] * ell
        + v.run[e2:]
    )

    def shift_pos(p: int) -> int:
        if p < e1:
            return p
        if p < e2:
            return p + (ell - 1) * n1
        return p + (ell - 1) * (n1 + n2)

    def noninp(u):
        return a.state(a.transitions[run_ell[u]].src).kind == NONINPUT

    designated = set()
    for c in range(ell - 1):
        for p in range(s1 + c * n1, s1 + (c + 1) * n1):
            if noninp(p):
                designated.add(p)
        base2 = s2 + (ell - 1) * n1
        for p in range(base2 + c * n2, base2 + (c + 1) * n2):
            if noninp(p):
                designated.add(p)
    z_pool = frozenset(
        list(range(s1, s1 + n1)) + list(range(s2 + (ell - 1) * n1, s2 + (ell - 1) * n1 + n2))
    )
    psi, delta, _z = psi_assignment(
        a, run_ell, "lower", frozenset(designated), z_pool
    )
    alpha = _alpha_from_psi(a, run_ell, psi)
    beta = list(alpha)
    # copies of the km transition live period-apart inside its own cycle
    if s1 <= km < e1:
        period, origin = n1, km
    else:
        period, origin = n2, km + (ell - 1) * n1
    for c in range(ell - 1):
        beta[origin + c * period] = alpha[origin + c * period] - 1
    return WitnessPair(
        run=run_ell,
        alpha=tuple(alpha),
        beta=tuple(beta),
        event=tuple(_base_event(a, run_ell)),
        ell=ell,
        bands=_bands(a, run_ell, psi, delta, designated),
    )


def _neg_mu_alpha(a, run, fresh_positions=frozenset()) -> list[InputItem]:
    out: list[InputItem] = []
    for u, t in enumerate(run):
        st = a.state(a.transitions[t].src)
        if st.kind == NONINPUT:
            out.append(TAU)
        elif u in fresh_positions:
            out.append(-st.params.mu_prime)
        else:
            out.append(-st.params.mu)
    return out


def _witness_dc(a: DipAutomaton, v: Violation, ell: int) -> WitnessPair:
    (start, end), = v.cycles
    cyc = v.run[start:end]
    period = len(cyc)
    rel = v.positions["disclose"] - start
    run_ell = v.run[:start] + cyc * ell
    copies = [start + c * period + rel for c in range(ell)]
    out_kind = a.transitions[run_ell[copies[0]]].output.kind
    fresh = frozenset(copies) if out_kind == FRESH else frozenset()
    alpha = _neg_mu_alpha(a, run_ell, fresh)
    beta = list(alpha)
    for p in copies:
        beta[p] = alpha[p] - 1
    event = _base_event(a, run_ell)
    for p in copies:
        event[p] = Interval(F(0), None)
    return WitnessPair(
        run=run_ell,
        alpha=tuple(alpha),
        beta=tuple(beta),
        event=tuple(event),
        ell=ell,
    )


def _witness_pvp(a: DipAutomaton, v: Violation, ell: int) -> WitnessPair:
    (start, end), = v.cycles
    cyc = v.run[start:end]
    period = len(cyc)
    run_ell = v.run[:start] + cyc * ell + v.run[end:]

    def shift_pos(p: int) -> int:
        return p if p < end else p + (ell - 1) * period

    alpha = _neg_mu_alpha(a, run_ell)
    beta = list(alpha)
    event = _base_event(a, run_ell)
    if v.subkind == "a":
        out_pos = shift_pos(v.positions["out"])
        km = v.positions["km"]
        event[out_pos] = Interval(F(0), None)
        for c in range(ell):
            p = km + c * period
            beta[p] = alpha[p] - 1
    else:
        out_pos = shift_pos(v.positions["out"])
        k1 = v.positions["k1"]
        event[out_pos] = Interval(None, F(0))
        for c in range(ell):
            p = k1 + c * period
            beta[p] = alpha[p] + 1
    return WitnessPair(
        run=run_ell,
        alpha=tuple(alpha),
        beta=tuple(beta),
        event=tuple(event),
        ell=ell,
    )
