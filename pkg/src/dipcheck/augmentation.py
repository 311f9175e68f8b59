"""Explicit augmentation of an automaton.

Augmented states are triples (q, lt, eq): the control state plus a
strict partial order and an equivalence over the storage variables
recording the orderings that the run so far forces between the stored
values.  Exactly the feasible runs of the base automaton lift to paths
of the augmentation, which makes repeatability of cycles a plain
graph-reachability fact.

Relations are stored as bit-mask rows over the variable index, so a
row is one int and state interning hashes a couple of small tuples.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .model import INPUT, SAMPLE, SYMBOL, DipAutomaton, Transition
from .runs import Run


class ResourceLimitError(RuntimeError):
    """State or search budget exceeded."""


DEFAULT_STATE_CAP = 1 << 22


@dataclass(frozen=True)
class AugState:
    q: int                    # base state index
    lt: tuple[int, ...]       # lt[i] = bitmask of j with (x_i, x_j) in lt
    eq: tuple[int, ...]       # eq[i] includes the diagonal bit
    lt_dn: tuple[int, ...] = field(compare=False, hash=False, repr=False, default=())


@dataclass(frozen=True)
class AugEdge:
    src: int
    trans: int                # base transition index
    dst: int
    sm_mask: int              # variables below the sample at this step
    lg_mask: int              # variables above the sample at this step


class TransIndex:
    """Per-transition bitmask view shared by the graph algorithms."""

    def __init__(self, a: DipAutomaton):
        self.a = a
        self.nvars = len(a.variables)
        idx = {v: i for i, v in enumerate(a.variables)}
        self.state_index = {s.name: i for i, s in enumerate(a.states)}
        self.small_atoms: list[int] = []
        self.large_atoms: list[int] = []
        self.assign_mask: list[int] = []
        self.is_input: list[bool] = []
        self.outputs_sample: list[bool] = []
        for t in a.transitions:
            self.small_atoms.append(self._mask(idx, t.smallv))
            self.large_atoms.append(self._mask(idx, t.largev))
            self.assign_mask.append(self._mask(idx, t.assigns))
            self.is_input.append(a.state(t.src).kind == INPUT)
            self.outputs_sample.append(t.output.kind == SAMPLE)

    @staticmethod
    def _mask(idx: dict[str, int], names) -> int:
        m = 0
        for v in names:
            m |= 1 << idx[v]
        return m


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _transpose(rows: tuple[int, ...]) -> tuple[int, ...]:
    cols = [0] * len(rows)
    for i, row in enumerate(rows):
        for j in _bits(row):
            cols[j] |= 1 << i
    return tuple(cols)


def aug_step(
    ti: TransIndex, state: AugState, trans: int
) -> tuple[AugState, int, int] | None:
    """Successor triple for taking `trans` from `state`, with the step's
    sm/lg variable masks, or None when the extension is infeasible."""
    lt, eq, lt_dn = state.lt, state.eq, state.lt_dn
    sm = 0
    for b in _bits(ti.small_atoms[trans]):
        sm |= lt_dn[b] | eq[b]
    lg = 0
    for b in _bits(ti.large_atoms[trans]):
        lg |= lt[b] | eq[b]
    if sm & lg:
        return None
    # A fresh pair (a, b) in sm x lg contradicts any existing b <= a.
    for b in _bits(lg):
        if (lt[b] | eq[b]) & sm:
            return None

    assign = ti.assign_mask[trans]
    keep = ~assign
    new_lt = []
    new_eq = []
    for i in range(ti.nvars):
        bit = 1 << i
        if bit & assign:
            new_lt.append(lg & keep)
            new_eq.append(assign)
        else:
            row = lt[i] & keep
            if bit & sm:
                row |= (lg & keep) | assign
            new_lt.append(row)
            new_eq.append(eq[i] & keep)
    dst_q = ti.state_index[ti.a.transitions[trans].trg]
    return AugState(dst_q, tuple(new_lt), tuple(new_eq)), sm, lg


class AugAutomaton:
    """Reachable augmentation, interned breadth-first from the initial
    triple (q_init, empty order, identity)."""

    def __init__(self, a: DipAutomaton, state_cap: int = DEFAULT_STATE_CAP):
        self.base = a
        self.ti = TransIndex(a)
        self.states: list[AugState] = []
        self.edges: list[AugEdge] = []
        self._out: list[list[int]] = []  # state id -> edge ids
        self._index: dict[tuple, int] = {}
        n = self.ti.nvars
        init = AugState(
            self.ti.state_index[a.init],
            (0,) * n,
            tuple(1 << i for i in range(n)),
        )
        self.init_id = self._intern(init)
        outgoing = {s.name: a.outgoing(s.name) for s in a.states}
        work = deque([self.init_id])
        while work:
            sid = work.popleft()
            st = self.states[sid]
            for trans in outgoing[a.states[st.q].name]:
                step = aug_step(self.ti, st, trans)
                if step is None:
                    continue
                nxt, sm, lg = step
                key = (nxt.q, nxt.lt, nxt.eq)
                dst = self._index.get(key)
                if dst is None:
                    if len(self.states) >= state_cap:
                        raise ResourceLimitError(
                            f"augmentation exceeds {state_cap} states"
                        )
                    dst = self._intern(nxt)
                    work.append(dst)
                eid = len(self.edges)
                self.edges.append(AugEdge(sid, trans, dst, sm, lg))
                self._out[sid].append(eid)
        self._scc_of: list[int] | None = None
        self._scc_count = 0

    def _intern(self, st: AugState) -> int:
        st = AugState(st.q, st.lt, st.eq, _transpose(st.lt))
        sid = len(self.states)
        self.states.append(st)
        self._index[(st.q, st.lt, st.eq)] = sid
        self._out.append([])
        return sid

    def __len__(self) -> int:
        return len(self.states)

    def edges_from(self, sid: int) -> list[AugEdge]:
        return [self.edges[e] for e in self._out[sid]]

    # --- strongly connected components -------------------------------

    @property
    def scc_of(self) -> list[int]:
        if self._scc_of is None:
            succ = [[self.edges[e].dst for e in out] for out in self._out]
            self._scc_of, self._scc_count = tarjan_scc(succ)
        return self._scc_of

    @property
    def scc_count(self) -> int:
        self.scc_of
        return self._scc_count

    def is_cycle_edge(self, edge: AugEdge) -> bool:
        scc = self.scc_of
        return scc[edge.src] == scc[edge.dst]

    # --- runs ---------------------------------------------------------

    def aug_runs(self, max_len: int) -> Iterator[tuple[int, ...]]:
        """All edge-id paths from the initial state up to max_len, the
        empty path first, depth-first in edge order."""
        yield ()

        def extend(path: list[int], sid: int) -> Iterator[tuple[int, ...]]:
            if len(path) >= max_len:
                return
            for eid in self._out[sid]:
                path.append(eid)
                yield tuple(path)
                yield from extend(path, self.edges[eid].dst)
                path.pop()

        yield from extend([], self.init_id)

    def project(self, aug_run: tuple[int, ...]) -> Run:
        """Componentwise projection of an edge-id path to a base run."""
        return tuple(self.edges[e].trans for e in aug_run)

    def lift(self, run: Run) -> tuple[int, ...] | None:
        """The unique edge-id path projecting to `run`, or None if the
        run is infeasible."""
        sid = self.init_id
        path = []
        for trans in run:
            for eid in self._out[sid]:
                if self.edges[eid].trans == trans:
                    path.append(eid)
                    sid = self.edges[eid].dst
                    break
            else:
                return None
        return tuple(path)

    def dump(self) -> str:
        """Debug dump, one line per transition."""
        a = self.base
        lines = []
        for e in self.edges:
            t = a.transitions[e.trans]
            src, dst = self.states[e.src], self.states[e.dst]
            lines.append(
                f"{self._fmt_state(src)} --[{e.trans}] guard={self._fmt_guard(t)} "
                f"out={self._fmt_out(t)} assign={sorted(t.assigns)}--> "
                f"{self._fmt_state(dst)}"
            )
        return "\n".join(lines)

    def _fmt_state(self, st: AugState) -> str:
        a = self.base
        lt = [
            (a.variables[i], a.variables[j])
            for i in range(len(st.lt))
            for j in _bits(st.lt[i])
        ]
        eq = [
            (a.variables[i], a.variables[j])
            for i in range(len(st.eq))
            for j in _bits(st.eq[i])
            if i < j
        ]
        return f"({a.states[st.q].name}, lt={lt}, eq={eq})"

    @staticmethod
    def _fmt_guard(t: Transition) -> str:
        if t.guard.is_true:
            return "true"
        parts = [
            f"x {'>=' if atom.rel == 'ge' else '<'} {atom.var}"
            for atom in sorted(t.guard.atoms, key=lambda x: x.var)
        ]
        return " && ".join(parts)

    @staticmethod
    def _fmt_out(t: Transition) -> str:
        if t.output.kind == SYMBOL:
            return f"@{t.output.symbol}"
        return "insample" if t.output.kind == SAMPLE else "insample'"


def build_augmentation(a: DipAutomaton, state_cap: int = DEFAULT_STATE_CAP) -> AugAutomaton:
    return AugAutomaton(a, state_cap)


def tarjan_scc(succ: list[list[int]]) -> tuple[list[int], int]:
    """Iterative Tarjan; returns (scc id per node, component count).
    Component ids are in reverse topological order of the condensation
    (every edge goes from a higher id to a lower or equal id)."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    scc_of = [-1] * n
    counter = 0
    comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(succ[v])):
                w = succ[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    scc_of[w] = comp
                    if w == v:
                        break
                comp += 1
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return scc_of, comp
