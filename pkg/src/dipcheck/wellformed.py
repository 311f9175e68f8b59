"""The four privacy-violation checks over the augmentation.

Order matters: leaking cycles first (afterwards every reachable cycle
of the augmentation is non-leaking, which the later definitions
presuppose), then disclosing cycles, leaking pairs, privacy violating
paths.

Leaking and disclosing cycles reduce to scans of the augmentation's
strongly connected components.  The pair/path checks need to relate
positions across repeatable cycles, which is done the way the search
would on paper: pretend one or two extra write-once variables are
co-assigned at guessed positions and let the augmented (lt, eq)
relations carry the dependency-path facts.  A cycle through a checked
transition exists exactly when that transition's endpoints share a
strongly connected component of the marked product graph, so the
existence test is an SCC condensation pass instead of an explicit
cycle-guessing walk; witnesses are stitched from component-internal
paths afterwards.
"""

from __future__ import annotations

from array import array
from collections import deque
from dataclasses import dataclass, field

from .augmentation import AugAutomaton, ResourceLimitError, _bits
from .model import INPUT, DipAutomaton
from .runs import Run

DEFAULT_SEARCH_CAP = 1 << 22

LEAKING_CYCLE = "leaking_cycle"
LEAKING_PAIR = "leaking_pair"
DISCLOSING_CYCLE = "disclosing_cycle"
PRIVACY_VIOLATING_PATH = "privacy_violating_path"


@dataclass(frozen=True)
class Violation:
    kind: str
    run: Run
    cycles: tuple[tuple[int, int], ...]   # [i, j) spans within the run
    variables: tuple[str, ...]
    positions: dict = field(default_factory=dict)
    subkind: str | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "subkind": self.subkind,
            "run": list(self.run),
            "cycles": [list(c) for c in self.cycles],
            "variables": list(self.variables),
            "positions": dict(sorted(self.positions.items())),
        }


# --- cycle checks on the plain augmentation ---------------------------


def _aug_path(
    aug: AugAutomaton, src: int, dst: int, comp: int | None = None
) -> list[int] | None:
    """Shortest edge-id path src -> dst, optionally within one SCC."""
    if src == dst:
        return []
    scc = aug.scc_of if comp is not None else None
    parent: dict[int, int] = {}
    seen = {src}
    work = deque([src])
    while work:
        sid = work.popleft()
        for eid in aug._out[sid]:
            e = aug.edges[eid]
            if e.dst in seen:
                continue
            if comp is not None and scc[e.dst] != comp:
                continue
            parent[e.dst] = eid
            if e.dst == dst:
                path = []
                cur = dst
                while cur != src:
                    eid2 = parent[cur]
                    path.append(eid2)
                    cur = aug.edges[eid2].src
                return list(reversed(path))
            seen.add(e.dst)
            work.append(e.dst)
    return None


def _cycle_through(aug: AugAutomaton, eids: list[int]) -> tuple[int, list[int]]:
    """Entry state and edge-id cycle through the given same-SCC edges,
    visiting them in order."""
    comp = aug.scc_of[aug.edges[eids[0]].src]
    cycle: list[int] = []
    for pos, eid in enumerate(eids):
        cycle.append(eid)
        nxt = eids[(pos + 1) % len(eids)]
        hop = _aug_path(aug, aug.edges[eid].dst, aug.edges[nxt].src, comp)
        cycle.extend(hop)
    return aug.edges[eids[0]].src, cycle


def find_leaking_cycle(aug: AugAutomaton) -> Violation | None:
    """A reachable cycle assigning and using the same variable."""
    scc = aug.scc_of
    assigns: dict[tuple[int, int], int] = {}
    uses: dict[tuple[int, int], int] = {}
    ti = aug.ti
    for eid, e in enumerate(aug.edges):
        if scc[e.src] != scc[e.dst]:
            continue
        for v in _bits(ti.assign_mask[e.trans]):
            assigns.setdefault((scc[e.src], v), eid)
        for v in _bits(ti.small_atoms[e.trans] | ti.large_atoms[e.trans]):
            uses.setdefault((scc[e.src], v), eid)
    hit = None
    for key in assigns:
        if key in uses:
            if hit is None or (key[1], assigns[key]) < (hit[1], assigns[hit]):
                hit = key
    if hit is None:
        return None
    comp, var = hit
    e_assign, e_use = assigns[hit], uses[hit]
    # a self-sufficient witness (assigning transition reads the variable
    # itself) keeps the cycle minimal
    var_name = aug.base.variables[var]
    if var_name in aug.base.transitions[aug.edges[e_assign].trans].usedv:
        e_use = e_assign
    eids = [e_assign] if e_assign == e_use else [e_assign, e_use]
    entry, cycle = _cycle_through(aug, eids)
    prefix = _aug_path(aug, aug.init_id, entry)
    run_edges = prefix + cycle
    start = len(prefix)
    return Violation(
        kind=LEAKING_CYCLE,
        run=tuple(aug.edges[e].trans for e in run_edges),
        cycles=((start, len(run_edges)),),
        variables=(aug.base.variables[var],),
        positions={
            "assign": start + cycle.index(e_assign),
            "use": start + cycle.index(e_use),
        },
    )


def find_disclosing_cycle(aug: AugAutomaton) -> Violation | None:
    """A repeatable cycle whose input transition outputs a real value.

    Assumes no leaking cycle exists, so every reachable cycle is
    non-leaking and automatically repeatable.
    """
    scc = aug.scc_of
    a = aug.base
    for eid, e in enumerate(aug.edges):
        if scc[e.src] != scc[e.dst]:
            continue
        t = a.transitions[e.trans]
        if a.state(t.src).kind != INPUT or not t.output.is_real:
            continue
        entry, cycle = _cycle_through(aug, [eid])
        prefix = _aug_path(aug, aug.init_id, entry)
        run_edges = prefix + cycle
        return Violation(
            kind=DISCLOSING_CYCLE,
            run=tuple(aug.edges[x].trans for x in run_edges),
            cycles=((len(prefix), len(run_edges)),),
            variables=(),
            positions={"disclose": len(prefix)},
        )
    return None


# --- marked product search for pairs and paths ------------------------

# Virtual-variable rows relative to the storage relations: for a
# write-once virtual V we track eq-class members, the set V lies below
# (V < y) and the set lying below V (y < V), all as storage bitmasks.
_PRISTINE = (0, 0, 0)

# v12 relation bits between the two virtuals
_LT12, _LT21, _EQ12 = 1, 2, 4

# product edge label flag bits
_F_CHECK1, _F_CHECK2, _F_MARK1, _F_MARK2 = 1, 2, 4, 8


class _ProductGraph:
    """Reachable (augmented state, virtual rows, marks) product graph.

    mode: "lp", "pvp_a" or "pvp_b"; it fixes where the virtuals may be
    marked and which transitions count as checks.
    """

    def __init__(self, aug: AugAutomaton, mode: str, cap: int):
        self.aug = aug
        self.mode = mode
        self.cap = cap
        self.nvirt = 2
        ti = aug.ti
        self._small = ti.small_atoms
        self._large = ti.large_atoms
        self._assign = ti.assign_mask
        self._out_sample = ti.outputs_sample

        scc = aug.scc_of
        cyc_small = 0
        cyc_large = 0
        for e in aug.edges:
            if scc[e.src] == scc[e.dst]:
                cyc_small |= self._small[e.trans]
                cyc_large |= self._large[e.trans]
        # Marking is useful only where the later eq-check can ever fire:
        # the virtual must be co-assigned with a variable that some
        # cycle transition compares on the required side.  The second
        # virtual of the path searches snapshots an output sample, so it
        # marks (only) transitions outputting the guard sample.
        if mode == "lp":
            self._mark_ok = [
                (self._assign[e.trans] & cyc_large != 0,
                 self._assign[e.trans] & cyc_small != 0)
                for e in aug.edges
            ]
        elif mode == "pvp_a":
            self._mark_ok = [
                (self._assign[e.trans] & cyc_small != 0,
                 self._out_sample[e.trans])
                for e in aug.edges
            ]
        else:  # pvp_b
            self._mark_ok = [
                (self._assign[e.trans] & cyc_large != 0,
                 self._out_sample[e.trans])
                for e in aug.edges
            ]
        # relation between the virtuals that completes the witness
        if mode == "pvp_a":
            self.rel_mask = _LT21 | _EQ12  # output sample below the snapshot
        else:
            self.rel_mask = _LT12 | _EQ12

        self._rows: list[tuple[int, int, int]] = [_PRISTINE]
        self._row_ids: dict[tuple[int, int, int], int] = {_PRISTINE: 0}
        self._vcache: dict[tuple, tuple | None] = {}

        self._key2id: dict[int, int] = {}
        self.meta: list[tuple[int, int, int, int, int]] = []  # base, r1, r2, v12, marks
        self.off = [0]
        self.edst = array("q")
        self.elabel = array("q")  # aug edge id << 8 | flags
        self._build()

    # -- virtual row arithmetic ----------------------------------------

    def _row_id(self, row: tuple[int, int, int]) -> int:
        rid = self._row_ids.get(row)
        if rid is None:
            rid = len(self._rows)
            self._rows.append(row)
            self._row_ids[row] = rid
        return rid

    def _vstep(self, rid: int, eid: int, mark: bool):
        """Advance one virtual's rows over an augmentation edge; returns
        (mid-row, in_sm, in_lg) or None when contradictory.  The caller
        finishes the assignment/marking transform after the cross-virtual
        relation pass."""
        key = (rid, eid, mark)
        hit = self._vcache.get(key, False)
        if hit is not False:
            return hit
        e = self.aug.edges[eid]
        em, ll, lg = self._rows[rid]
        small, large = self._small[e.trans], self._large[e.trans]
        in_sm = bool((em | ll) & small)
        in_lg = bool((em | lg) & large)
        res: tuple | None
        if mark and rid != 0:
            res = None  # write-once
        elif in_sm and in_lg:
            res = None
        elif in_sm and (lg | em) & e.lg_mask:
            res = None
        elif in_lg and (ll | em) & e.sm_mask:
            res = None
        else:
            ll2 = ll | e.lg_mask if in_sm else ll
            lg2 = lg | e.sm_mask if in_lg else lg
            res = ((em, ll2, lg2), in_sm, in_lg)
        self._vcache[key] = res
        return res

    @staticmethod
    def _finish(row, in_sm, in_lg, eid_edge, assign, mark):
        em, ll, lg = row
        if mark:
            return (assign, eid_edge.lg_mask & ~assign, eid_edge.sm_mask & ~assign)
        keep = ~assign
        return (
            em & keep,
            (ll & keep) | (assign if in_sm else 0),
            (lg & keep) | (assign if in_lg else 0),
        )

    def _step(self, node, eid: int, mark1: bool, mark2: bool):
        """Full product step; returns (next_key_parts, flags) or None."""
        base_id, r1, r2, v12, marks = node
        e = self.aug.edges[eid]
        s1 = self._vstep(r1, eid, mark1)
        if s1 is None:
            return None
        s2 = self._vstep(r2, eid, mark2) if self.nvirt == 2 else (_PRISTINE, False, False)
        if s2 is None:
            return None
        (row1, sm1, lg1), (row2, sm2, lg2) = s1, s2

        # Cross-virtual relations from the mid rows (guard additions in,
        # assignments not yet applied).
        lt12 = bool(v12 & _LT12)
        lt21 = bool(v12 & _LT21)
        eq12 = bool(v12 & _EQ12)
        if self.nvirt == 2:
            em1, ll1, lg1m = row1
            em2, ll2, lg2m = row2
            if (sm1 and lg2) or ll1 & (lg2m | em2) or em1 & lg2m:
                lt12 = True
            if (sm2 and lg1) or ll2 & (lg1m | em1) or em2 & lg1m:
                lt21 = True
            if em1 & em2:
                eq12 = True
            if mark1 and mark2:
                eq12 = True
            elif mark2:
                if sm1:
                    lt12 = True
                if lg1:
                    lt21 = True
            elif mark1:
                if sm2:
                    lt21 = True
                if lg2:
                    lt12 = True
            if (lt12 and lt21) or (eq12 and (lt12 or lt21)):
                return None

        assign = self._assign[e.trans]
        row1 = self._finish(row1, sm1, lg1, e, assign, mark1)
        row2 = self._finish(row2, sm2, lg2, e, assign, mark2)
        if self.nvirt == 2:
            # Close the rows through the cross relations.
            row1, row2 = self._propagate(row1, row2, lt12, lt21, eq12)
            if row1 is None:
                return None
        flags = 0
        if mark1:
            flags |= _F_MARK1
        if mark2:
            flags |= _F_MARK2
        flags |= self._check_flags(node, eid)
        marks2 = marks | (1 if mark1 else 0) | (2 if mark2 else 0)
        v12n = (_LT12 if lt12 else 0) | (_LT21 if lt21 else 0) | (_EQ12 if eq12 else 0)
        return (e.dst, self._row_id(row1), self._row_id(row2), v12n, marks2), flags

    @staticmethod
    def _propagate(row1, row2, lt12, lt21, eq12):
        em1, ll1, lg1 = row1
        em2, ll2, lg2 = row2
        if eq12:
            em1 = em2 = em1 | em2
            ll1 = ll2 = ll1 | ll2
            lg1 = lg2 = lg1 | lg2
        if lt12:  # V1 < V2
            ll1 |= ll2 | em2
            lg2 |= lg1 | em1
        if lt21:
            ll2 |= ll1 | em1
            lg1 |= lg2 | em2
        if (ll1 & (lg1 | em1)) or (lg1 & em1) or (ll2 & (lg2 | em2)) or (lg2 & em2):
            return None, None
        return (em1, ll1, lg1), (em2, ll2, lg2)

    def _check_flags(self, node, eid: int) -> int:
        """Check predicates evaluated at the source node of the edge."""
        _, r1, r2, _, _ = node
        e = self.aug.edges[eid]
        em1 = self._rows[r1][0]
        flags = 0
        if self.mode == "lp":
            if em1 & self._large[e.trans]:
                flags |= _F_CHECK1
            em2 = self._rows[r2][0]
            if em2 & self._small[e.trans]:
                flags |= _F_CHECK2
        elif self.mode == "pvp_a":
            if em1 & self._small[e.trans]:
                flags |= _F_CHECK1
        else:  # pvp_b
            if em1 & self._large[e.trans]:
                flags |= _F_CHECK1
        return flags

    # -- graph construction --------------------------------------------

    def _node_id(self, parts) -> tuple[int, bool]:
        base_id, r1, r2, v12, marks = parts
        key = (((base_id << 21 | r1) << 21 | r2) << 5) | (v12 << 2) | marks
        nid = self._key2id.get(key)
        if nid is not None:
            return nid, False
        nid = len(self.meta)
        if nid >= self.cap:
            raise ResourceLimitError(f"product search exceeds {self.cap} nodes")
        self._key2id[key] = nid
        self.meta.append(parts)
        return nid, True

    def _build(self):
        init = (self.aug.init_id, 0, 0, 0, 0)
        self._node_id(init)
        work = deque([0])
        produced = 0
        while work:
            nid = work.popleft()
            assert nid == produced  # FIFO keeps edges grouped by source
            produced += 1
            node = self.meta[nid]
            for eid in self.aug._out[node[0]]:
                m1ok, m2ok = self._mark_ok[eid]
                m1ok = m1ok and not node[4] & 1
                m2ok = m2ok and not node[4] & 2 and self.nvirt == 2
                choices = [(False, False)]
                if m1ok:
                    choices.append((True, False))
                if m2ok:
                    choices.append((False, True))
                if m1ok and m2ok:
                    choices.append((True, True))
                for mark1, mark2 in choices:
                    step = self._step(node, eid, mark1, mark2)
                    if step is None:
                        continue
                    parts, flags = step
                    dst, fresh = self._node_id(parts)
                    self.edst.append(dst)
                    self.elabel.append(eid << 8 | flags)
                    if fresh:
                        work.append(dst)
            self.off.append(len(self.edst))

    # -- analysis -------------------------------------------------------

    def node_rel(self, nid: int) -> bool:
        v12 = self.meta[nid][3]
        return bool(v12 & self.rel_mask)

    def sccs(self) -> tuple[list[int], int]:
        return _tarjan_csr(len(self.meta), self.off, self.edst)


def _tarjan_csr(n: int, off, dst) -> tuple[list[int], int]:
    """Iterative Tarjan over a CSR graph; same contract as tarjan_scc."""
    index = [-1] * n
    low = [0] * n
    on_stack = bytearray(n)
    stack: list[int] = []
    scc_of = [-1] * n
    counter = 0
    comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, off[root])]
        while work:
            v, k = work[-1]
            if k == off[v]:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = 1
            advanced = False
            while k < off[v + 1]:
                w = dst[k]
                k += 1
                if index[w] == -1:
                    work[-1] = (v, k)
                    work.append((w, off[w]))
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
                    on_stack[w] = 0
                    scc_of[w] = comp
                    if w == v:
                        break
                comp += 1
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return scc_of, comp


def _bfs_nodes(pg: _ProductGraph, start: int, goal, comp=None, scc=None):
    """Shortest product-edge path from start to the first node
    satisfying `goal`; returns (node, [edge indices])."""
    if goal(start):
        return start, []
    parent: dict[int, tuple[int, int]] = {}
    seen = {start}
    work = deque([start])
    while work:
        nid = work.popleft()
        for k in range(pg.off[nid], pg.off[nid + 1]):
            dst = pg.edst[k]
            if dst in seen:
                continue
            if comp is not None and scc[dst] != comp:
                continue
            parent[dst] = (nid, k)
            if goal(dst):
                path = []
                cur = dst
                while cur != start:
                    cur, kk = parent[cur]
                    path.append(kk)
                return dst, list(reversed(path))
            seen.add(dst)
            work.append(dst)
    return None, None


def _edges_to_run(pg: _ProductGraph, kpath: list[int]) -> tuple[Run, dict[str, int]]:
    run = []
    marks: dict[str, int] = {}
    for pos, k in enumerate(kpath):
        label = pg.elabel[k]
        eid, flags = label >> 8, label & 0xFF
        run.append(pg.aug.edges[eid].trans)
        if flags & _F_MARK1:
            marks["mark1"] = pos
        if flags & _F_MARK2:
            marks["mark2"] = pos
    return tuple(run), marks


def _internal_check_edges(pg: _ProductGraph, scc, flag: int) -> dict[int, int]:
    """comp -> first product-edge index whose flags contain `flag` and
    whose endpoints share the component."""
    hits: dict[int, int] = {}
    for nid in range(len(pg.meta)):
        for k in range(pg.off[nid], pg.off[nid + 1]):
            if not pg.elabel[k] & flag:
                continue
            if scc[nid] == scc[pg.edst[k]]:
                hits.setdefault(scc[nid], k)
    return hits


def _edge_src(pg: _ProductGraph, k: int) -> int:
    # off is sorted by source node; binary search the owning node.
    lo, hi = 0, len(pg.meta) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if pg.off[mid] <= k:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _comp_dag(pg: _ProductGraph, scc, ncomp):
    succ: list[set[int]] = [set() for _ in range(ncomp)]
    for nid in range(len(pg.meta)):
        c = scc[nid]
        for k in range(pg.off[nid], pg.off[nid + 1]):
            d = scc[pg.edst[k]]
            if d != c:
                succ[c].add(d)
    return succ


def find_leaking_pair(aug: AugAutomaton, cap: int = DEFAULT_SEARCH_CAP) -> Violation | None:
    """Two disjoint repeatable cycles whose samples are forced apart.

    Assumes no leaking cycle.  The first virtual snapshots the value
    that upper-bounds samples in one cycle, the second the value that
    lower-bounds samples in the other; a final lt/eq fact between the
    virtuals is the dependency path between the two snapshots.
    """
    scc0 = aug.scc_of
    cyc_small = cyc_large = 0
    for e in aug.edges:
        if scc0[e.src] == scc0[e.dst]:
            cyc_small |= aug.ti.small_atoms[e.trans]
            cyc_large |= aug.ti.large_atoms[e.trans]
    if not cyc_small or not cyc_large:
        return None
    pg = _ProductGraph(aug, "lp", cap)
    scc, ncomp = pg.sccs()
    k1_edges = _internal_check_edges(pg, scc, _F_CHECK1)
    km_edges = _internal_check_edges(pg, scc, _F_CHECK2)
    if not k1_edges or not km_edges:
        return None
    succ = _comp_dag(pg, scc, ncomp)

    reach_rel = [False] * ncomp
    rel_nodes = [pg.node_rel(n) for n in range(len(pg.meta))]
    comp_rel = [False] * ncomp
    for n, ok in enumerate(rel_nodes):
        if ok:
            comp_rel[scc[n]] = True
    for c in range(ncomp):  # component ids are reverse topological
        reach_rel[c] = comp_rel[c] or any(reach_rel[d] for d in succ[c])

    def second_stage(first_edges, second_edges):
        reach2 = [False] * ncomp
        for c in range(ncomp):
            reach2[c] = (c in second_edges and reach_rel[c]) or any(
                reach2[d] for d in succ[c]
            )
        for c in sorted(first_edges):
            if reach2[c]:
                return c
        return None

    for first_edges, second_edges, swapped in (
        (k1_edges, km_edges, False),
        (km_edges, k1_edges, True),
    ):
        c1 = second_stage(first_edges, second_edges)
        if c1 is None:
            continue
        return _reconstruct_lp(pg, scc, succ, first_edges, second_edges,
                               reach_rel, rel_nodes, c1, swapped)
    return None


def _reconstruct_lp(pg, scc, succ, first_edges, second_edges, reach_rel,
                    rel_nodes, c1, swapped):
    k_first = first_edges[c1]
    n_first = _edge_src(pg, k_first)
    _, stem = _bfs_nodes(pg, 0, lambda n: n == n_first)
    cyc1 = [k_first]
    back_start = pg.edst[k_first]
    _, back = _bfs_nodes(pg, back_start, lambda n: n == n_first,
                         comp=c1, scc=scc)
    cyc1 += back

    # walk the condensation to a component holding the second check
    # (component ids are reverse topological, so plain iteration works)
    reach2 = [False] * len(succ)
    for c in range(len(succ)):
        reach2[c] = (c in second_edges and reach_rel[c]) or any(
            reach2[d] for d in succ[c]
        )
    c2 = c1
    while not (c2 in second_edges and reach_rel[c2]):
        c2 = min(d for d in succ[c2] if reach2[d])
    k_second = second_edges[c2]
    n_second = _edge_src(pg, k_second)
    _, mid = _bfs_nodes(pg, n_first, lambda n: n == n_second)
    cyc2 = [k_second]
    _, back2 = _bfs_nodes(pg, pg.edst[k_second], lambda n: n == n_second,
                          comp=c2, scc=scc)
    cyc2 += back2
    _, tail = _bfs_nodes(pg, n_second, lambda n: rel_nodes[n])

    kpath = stem + cyc1 + mid + cyc2 + tail
    run, marks = _edges_to_run(pg, kpath)
    span1 = (len(stem), len(stem) + len(cyc1))
    span2 = (len(stem) + len(cyc1) + len(mid),
             len(stem) + len(cyc1) + len(mid) + len(cyc2))
    pos_first = len(stem)
    pos_second = span2[0]
    if swapped:
        k1_pos, km_pos = pos_second, pos_first
        spans = (span2, span1)
    else:
        k1_pos, km_pos = pos_first, pos_second
        spans = (span1, span2)
    a = pg.aug.base
    em1 = pg._rows[pg.meta[_edge_src(pg, k_first if not swapped else k_second)][1]][0]
    em2 = pg._rows[pg.meta[_edge_src(pg, k_second if not swapped else k_first)][2]][0]
    t_k1 = a.transitions[run[k1_pos]]
    t_km = a.transitions[run[km_pos]]
    var1 = next(v for v in _bits(em1) if a.variables[v] in t_k1.largev)
    var2 = next(v for v in _bits(em2) if a.variables[v] in t_km.smallv)
    return Violation(
        kind=LEAKING_PAIR,
        run=run,
        cycles=spans,
        variables=(a.variables[var1], a.variables[var2]),
        positions={
            "k1": k1_pos,
            "km": km_pos,
            "k2": marks["mark1"],
            "km1": marks["mark2"],
        },
    )


def find_privacy_violating_path(
    aug: AugAutomaton, cap: int = DEFAULT_SEARCH_CAP
) -> Violation | None:
    """A real output that bounds samples of a repeatable cycle.

    Case (a): the guard sample is output and a repeatable cycle samples
    above it; case (b): a repeatable cycle samples below a value that
    is transitively below an output sample.  The output may fall
    before or after the cycle in time; the order facts carry the
    dependency path either way.  Assumes no leaking cycle and no
    leaking pair.
    """
    hit = _find_pvp_case(aug, "pvp_a", cap)
    if hit is not None:
        return hit
    return _find_pvp_case(aug, "pvp_b", cap)


def _find_pvp_case(aug: AugAutomaton, mode: str, cap: int) -> Violation | None:
    if not any(aug.ti.outputs_sample):
        return None
    pg = _ProductGraph(aug, mode, cap)
    scc, ncomp = pg.sccs()
    hits = _internal_check_edges(pg, scc, _F_CHECK1)
    if not hits:
        return None
    succ = _comp_dag(pg, scc, ncomp)
    rel_nodes = [pg.node_rel(n) for n in range(len(pg.meta))]
    reach_rel = [False] * ncomp
    comp_rel = [False] * ncomp
    for n, ok in enumerate(rel_nodes):
        if ok:
            comp_rel[scc[n]] = True
    for c in range(ncomp):
        reach_rel[c] = comp_rel[c] or any(reach_rel[d] for d in succ[c])
    cands = [c for c in sorted(hits) if reach_rel[c]]
    if not cands:
        return None
    comp = cands[0]
    k = hits[comp]
    nid = _edge_src(pg, k)
    _, stem = _bfs_nodes(pg, 0, lambda n: n == nid)
    _, back = _bfs_nodes(pg, pg.edst[k], lambda n: n == nid, comp=comp, scc=scc)
    _, tail = _bfs_nodes(pg, nid, lambda n: rel_nodes[n])
    kpath = stem + [k] + back + tail
    run, marks = _edges_to_run(pg, kpath)
    a = pg.aug.base
    em = pg._rows[pg.meta[nid][1]][0]
    t_chk = a.transitions[run[len(stem)]]
    span = (len(stem), len(stem) + 1 + len(back))
    if mode == "pvp_a":
        var = next(v for v in _bits(em) if a.variables[v] in t_chk.smallv)
        positions = {"km": len(stem), "km1": marks["mark1"], "out": marks["mark2"]}
    else:
        var = next(v for v in _bits(em) if a.variables[v] in t_chk.largev)
        positions = {"k1": len(stem), "k2": marks["mark1"], "out": marks["mark2"]}
    return Violation(
        kind=PRIVACY_VIOLATING_PATH,
        subkind="a" if mode == "pvp_a" else "b",
        run=run,
        cycles=(span,),
        variables=(a.variables[var],),
        positions=positions,
    )


def check_well_formed(
    aug: AugAutomaton, search_cap: int = DEFAULT_SEARCH_CAP
) -> Violation | None:
    """Run the four checks in their required order; first hit wins."""
    for finder in (find_leaking_cycle, find_disclosing_cycle):
        hit = finder(aug)
        if hit is not None:
            return hit
    hit = find_leaking_pair(aug, search_cap)
    if hit is not None:
        return hit
    return find_privacy_violating_path(aug, search_cap)


def check_well_formed_automaton(
    a: DipAutomaton,
    aug_cap: int | None = None,
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> Violation | None:
    from .augmentation import DEFAULT_STATE_CAP, build_augmentation

    aug = build_augmentation(a, aug_cap or DEFAULT_STATE_CAP)
    return check_well_formed(aug, search_cap)
