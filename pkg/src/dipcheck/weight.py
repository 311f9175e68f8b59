"""Privacy-budget weight of a well-formed automaton.

Per-edge weights lift the positional run-weight definition to the
augmentation.  An edge pays for its guard sample only when that sample
is order-related to samples of a repeatable cycle (below one or above
one); input transitions pay double because the read value also shifts
the mean.  Steps whose guard variables are all already provably
bounded by repeatable-cycle samples are free: repeating them does not
leak fresh budget.  Outputting the fresh sample always costs its
scale.

The order facts are two fixpoints over (augmented state, variable):
``below[S]`` marks variables whose current value is forced below some
repeatable-cycle sample on some continuation, ``above[S]`` the mirror
image.  Both propagate backward along edges (a variable keeps its
fact while not reassigned), seed at guards of cycle edges, and close
through the state's stored order relations.

The bound is then the heaviest path through the SCC condensation,
counting the full weight of every component visited.  `run_weight`
re-derives the per-run definition directly on a run's dependency
graph; it is a test oracle for the bound, never on the verdict path.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from .augmentation import AugAutomaton, AugEdge, _bits
from .model import FRESH, SAMPLE
from .runs import build_dependency_graph, reachable_positions


def var_used_before_reassign(aug: AugAutomaton, from_state: int, var: int) -> bool:
    """Can some run from `from_state` read `var` before overwriting it?"""
    seen = {from_state}
    work = deque([from_state])
    ti = aug.ti
    bit = 1 << var
    while work:
        sid = work.popleft()
        for e in aug.edges_from(sid):
            if (ti.small_atoms[e.trans] | ti.large_atoms[e.trans]) & bit:
                return True
            if ti.assign_mask[e.trans] & bit:
                continue
            if e.dst not in seen:
                seen.add(e.dst)
                work.append(e.dst)
    return False


class WeightAnalysis:
    """Cycle-order facts and per-edge weights for one augmentation."""

    def __init__(self, aug: AugAutomaton):
        self.aug = aug
        self.below, self.above = self._order_fixpoint()

    def _order_fixpoint(self) -> tuple[list[int], list[int]]:
        aug = self.aug
        ti = aug.ti
        n = len(aug.states)
        below = [0] * n
        above = [0] * n
        changed = True
        while changed:
            changed = False
            for sid in range(n - 1, -1, -1):
                b, a = below[sid], above[sid]
                for e in aug.edges_from(sid):
                    small = ti.small_atoms[e.trans]
                    large = ti.large_atoms[e.trans]
                    assign = ti.assign_mask[e.trans]
                    cyc = aug.is_cycle_edge(e)
                    if cyc or self._sample_below(e, below):
                        b |= small
                    if cyc or self._sample_above(e, above):
                        a |= large
                    b |= below[e.dst] & ~assign
                    a |= above[e.dst] & ~assign
                st = aug.states[sid]
                b = self._close_down(st, b)
                a = self._close_up(st, a)
                if b != below[sid] or a != above[sid]:
                    below[sid], above[sid] = b, a
                    changed = True
        return below, above

    def _sample_below(self, e: AugEdge, below: list[int]) -> bool:
        ti = self.aug.ti
        return bool(
            below[e.dst] & ti.assign_mask[e.trans]
            or below[e.src] & ti.large_atoms[e.trans]
        )

    def _sample_above(self, e: AugEdge, above: list[int]) -> bool:
        ti = self.aug.ti
        return bool(
            above[e.dst] & ti.assign_mask[e.trans]
            or above[e.src] & ti.small_atoms[e.trans]
        )

    @staticmethod
    def _close_down(st, mask: int) -> int:
        # v joins when something it lies below (or equals) is in the set
        changed = True
        while changed:
            changed = False
            for v in range(len(st.lt)):
                bit = 1 << v
                if not mask & bit and (st.lt[v] | st.eq[v]) & mask:
                    mask |= bit
                    changed = True
        return mask

    @staticmethod
    def _close_up(st, mask: int) -> int:
        changed = True
        while changed:
            changed = False
            for v in range(len(st.lt)):
                bit = 1 << v
                if not mask & bit and (st.lt_dn[v] | st.eq[v]) & mask:
                    mask |= bit
                    changed = True
        return mask

    def edge_weight(self, e: AugEdge) -> Fraction:
        aug = self.aug
        ti = aug.ti
        a_base = aug.base
        t = a_base.transitions[e.trans]
        params = a_base.state(t.src).params
        w2 = params.d_prime if t.output.kind == FRESH else Fraction(0)
        small = ti.small_atoms[e.trans]
        large = ti.large_atoms[e.trans]
        free = (
            t.output.kind != SAMPLE
            and not any(
                var_used_before_reassign(aug, e.dst, v)
                for v in _bits(ti.assign_mask[e.trans])
            )
            and small & self.below[e.src] == small
            and large & self.above[e.src] == large
        )
        if free:
            return w2
        ordered = 1 if (self._sample_below(e, self.below)
                        or self._sample_above(e, self.above)) else 0
        paying = ordered + (1 if ti.is_input[e.trans] else 0)
        return paying * params.d + w2


def edge_weight(aug: AugAutomaton, edge: AugEdge) -> Fraction:
    return _analysis(aug).edge_weight(edge)


def _analysis(aug: AugAutomaton) -> WeightAnalysis:
    cached = getattr(aug, "_weight_analysis", None)
    if cached is None:
        cached = WeightAnalysis(aug)
        aug._weight_analysis = cached
    return cached


def compute_weight(aug: AugAutomaton) -> Fraction:
    """Maximal path weight over the condensation from the initial
    component.  Only meaningful for well-formed automata."""
    analysis = _analysis(aug)
    scc = aug.scc_of
    ncomp = aug.scc_count
    comp_weight = [Fraction(0)] * ncomp
    cross: list[list[tuple[int, Fraction]]] = [[] for _ in range(ncomp)]
    for e in aug.edges:
        w = analysis.edge_weight(e)
        if scc[e.src] == scc[e.dst]:
            comp_weight[scc[e.src]] += w
        else:
            cross[scc[e.src]].append((scc[e.dst], w))

    start = scc[aug.init_id]
    best: list[Fraction | None] = [None] * ncomp
    best[start] = comp_weight[start]
    # Component ids are reverse topological; walk from the initial
    # component downward.
    for c in range(ncomp - 1, -1, -1):
        if best[c] is None:
            continue
        for d, w in cross[c]:
            cand = best[c] + w + comp_weight[d]
            if best[d] is None or cand > best[d]:
                best[d] = cand
    return max(b for b in best if b is not None)


# --- definitional per-run weight (test oracle) -------------------------


def run_weight(aug: AugAutomaton, aug_run: tuple[int, ...]) -> Fraction:
    """Weight of an augmentation path per the positional definition:
    classify dependency-graph nodes by whether they bound a repeatable
    cycle's samples from below or above, zero out steps whose guards
    are fully cycle-bounded, and charge 2d/d for input/non-input steps
    plus d' when the fresh sample is output by an input step."""
    a = aug.base
    edges = [aug.edges[e] for e in aug_run]
    run = tuple(e.trans for e in edges)
    n = len(run)
    dep = build_dependency_graph(a, run)
    reach = reachable_positions(n, dep)
    cycle_edge = [aug.is_cycle_edge(e) for e in edges]

    gcycle = [False] * n
    lcycle = [False] * n
    for p, q in dep:
        if p < q and cycle_edge[q]:
            # forward edge into a cycle transition: everything reaching p
            # lies below repeatable samples
            for j in range(n):
                if p in reach[j]:
                    gcycle[j] = True
        if q < p and cycle_edge[p]:
            for j in range(n):
                if j in reach[q]:
                    lcycle[j] = True

    usedv_after = [0] * (n + 1)
    ti = aug.ti
    for j in range(n - 1, -1, -1):
        t = run[j]
        usedv_after[j] = (
            ti.small_atoms[t]
            | ti.large_atoms[t]
            | (usedv_after[j + 1] & ~ti.assign_mask[t])
        )

    total = Fraction(0)
    for j in range(n):
        t = run[j]
        params = a.state(a.transitions[t].src).params
        quasi = (
            a.transitions[t].output.kind != SAMPLE
            and not ti.assign_mask[t] & usedv_after[j + 1]
            and all(
                _last(a, run, v, j) is not None and gcycle[_last(a, run, v, j)]
                for v in _bits(ti.small_atoms[t])
            )
            and all(
                _last(a, run, v, j) is not None and lcycle[_last(a, run, v, j)]
                for v in _bits(ti.large_atoms[t])
            )
        )
        f = 0 if quasi else 1
        aj = 1 if (gcycle[j] or lcycle[j]) else 0
        bj = 1 if ti.is_input[t] else 0
        cj = 1 if (a.transitions[t].output.kind == FRESH and ti.is_input[t]) else 0
        total += f * (aj + bj) * params.d + cj * params.d_prime
    return total


def _last(a, run, var_idx, j):
    from .runs import lastassign

    return lastassign(a, run, a.variables[var_idx], j)
