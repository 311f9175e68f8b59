"""Core automaton model and structural checks.

An automaton reads a stream of reals (at input states) and silent steps
``TAU`` (at non-input states).  At every step it samples two fresh
values; the first ("sample", guard value x) is compared against stored
variables and may be written into them, the second ("fresh") exists
only to be output.  Guards are conjunctions of per-variable half-line
atoms ``x >= v`` / ``x < v``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

GE = "ge"  # x >= var
LT = "lt"  # x <  var

INPUT = "input"
NONINPUT = "noninput"


class _Tau:
    """Silent input marker (read at non-input states)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "tau"


TAU = _Tau()

InputItem = Fraction | _Tau
InputSequence = tuple[InputItem, ...]


@dataclass(frozen=True)
class GuardAtom:
    var: str
    rel: str  # GE | LT

    def __post_init__(self):
        if self.rel not in (GE, LT):
            raise ValueError(f"bad relation {self.rel!r}")


@dataclass(frozen=True)
class Guard:
    """Conjunction of atoms; at most one atom per variable."""

    atoms: frozenset[GuardAtom]

    def __post_init__(self):
        seen = set()
        for atom in self.atoms:
            if atom.var in seen:
                raise ValueError(f"two atoms on variable {atom.var!r}")
            seen.add(atom.var)

    @classmethod
    def true(cls) -> "Guard":
        return cls(frozenset())

    @classmethod
    def of(cls, *atoms: tuple[str, str]) -> "Guard":
        return cls(frozenset(GuardAtom(v, r) for v, r in atoms))

    @property
    def is_true(self) -> bool:
        return not self.atoms

    def vars_with(self, rel: str) -> frozenset[str]:
        return frozenset(a.var for a in self.atoms if a.rel == rel)

    def rel_of(self, var: str) -> str | None:
        for a in self.atoms:
            if a.var == var:
                return a.rel
        return None


# Output labels: a symbol from the finite alphabet, the guard sample, or
# the fresh sample.
SYMBOL = "symbol"
SAMPLE = "sample"       # the value used in guards
FRESH = "fresh"         # the independently sampled value


@dataclass(frozen=True)
class Output:
    kind: str
    symbol: str | None = None

    def __post_init__(self):
        if self.kind not in (SYMBOL, SAMPLE, FRESH):
            raise ValueError(f"bad output kind {self.kind!r}")
        if (self.kind == SYMBOL) != (self.symbol is not None):
            raise ValueError("symbol outputs and only they carry a name")

    @classmethod
    def sym(cls, name: str) -> "Output":
        return cls(SYMBOL, name)

    @property
    def is_real(self) -> bool:
        return self.kind != SYMBOL


OUT_SAMPLE = Output(SAMPLE)
OUT_FRESH = Output(FRESH)


@dataclass(frozen=True)
class StateParams:
    """Per-state sampling parameters (d, mu) for the guard sample and
    (d_prime, mu_prime) for the fresh sample; d, d_prime scale with the
    privacy budget."""

    d: Fraction
    mu: Fraction
    d_prime: Fraction = Fraction(1)
    mu_prime: Fraction = Fraction(0)

    def __post_init__(self):
        if self.d < 0 or self.d_prime < 0:
            raise ValueError("scale factors must be nonnegative")


@dataclass(frozen=True)
class State:
    name: str
    kind: str  # INPUT | NONINPUT
    params: StateParams

    def __post_init__(self):
        if self.kind not in (INPUT, NONINPUT):
            raise ValueError(f"bad state kind {self.kind!r}")


@dataclass(frozen=True)
class Transition:
    src: str
    guard: Guard
    trg: str
    output: Output
    assigns: frozenset[str]

    @property
    def smallv(self) -> frozenset[str]:
        """Variables lower-bounding the sample (x >= v atoms)."""
        return self.guard.vars_with(GE)

    @property
    def largev(self) -> frozenset[str]:
        """Variables upper-bounding the sample (x < v atoms)."""
        return self.guard.vars_with(LT)

    @property
    def usedv(self) -> frozenset[str]:
        return self.smallv | self.largev


@dataclass(frozen=True)
class DipAutomaton:
    variables: tuple[str, ...]
    alphabet: frozenset[str]
    states: tuple[State, ...]
    init: str
    transitions: tuple[Transition, ...]
    _by_name: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        by_name = {s.name: s for s in self.states}
        object.__setattr__(self, "_by_name", by_name)

    def state(self, name: str) -> State:
        return self._by_name[name]

    def has_state(self, name: str) -> bool:
        return name in self._by_name

    def is_input(self, name: str) -> bool:
        return self.state(name).kind == INPUT

    def var_index(self, var: str) -> int:
        return self.variables.index(var)

    def outgoing(self, name: str) -> list[int]:
        return [i for i, t in enumerate(self.transitions) if t.src == name]

    def nonassignv(self, t: Transition) -> frozenset[str]:
        return frozenset(self.variables) - t.assigns


# Output events: per-position observation, either an exact symbol or an
# open interval that a real output fell into.
_NEG_INF = None  # sentinel meaning unbounded below / above


@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi); None means unbounded on that side."""

    lo: Fraction | None
    hi: Fraction | None

    def __post_init__(self):
        if self.lo is not None and self.hi is not None and not self.lo < self.hi:
            raise ValueError("interval requires lo < hi")


EventItem = str | Interval
OutputEvent = tuple[EventItem, ...]

FULL_INTERVAL = Interval(None, None)


def guards_disjoint(g1: Guard, g2: Guard) -> bool:
    """True iff the conjunction g1 and g2 is unsatisfiable.

    Two conjunctions of per-variable half-line atoms on the same sample
    are jointly unsatisfiable exactly when some variable carries >= in
    one and < in the other.
    """
    for atom in g1.atoms:
        other = g2.rel_of(atom.var)
        if other is not None and other != atom.rel:
            return True
    return False


def validate(a: DipAutomaton) -> list[str]:
    """Structural validation; empty list iff the automaton is well built.

    Checks referenced-id integrity, guard sanity, determinism (pairwise
    unsatisfiable guards out of every state) and the non-input
    condition (one always-enabled transition at most).
    """
    errors: list[str] = []
    names = {s.name for s in a.states}
    if len(names) != len(a.states):
        errors.append("duplicate state names")
    if len(set(a.variables)) != len(a.variables):
        errors.append("duplicate variable names")
    if a.init not in names:
        errors.append(f"unknown initial state {a.init!r}")

    for i, t in enumerate(a.transitions):
        where = f"transition {i} ({t.src} -> {t.trg})"
        if t.src not in names:
            errors.append(f"{where}: unknown source state")
        if t.trg not in names:
            errors.append(f"{where}: unknown target state")
        for atom in t.guard.atoms:
            if atom.var not in a.variables:
                errors.append(f"{where}: guard references unknown variable {atom.var!r}")
        for v in t.assigns:
            if v not in a.variables:
                errors.append(f"{where}: assigns unknown variable {v!r}")
        if t.output.kind == SYMBOL and t.output.symbol not in a.alphabet:
            errors.append(f"{where}: output symbol {t.output.symbol!r} not in alphabet")

    if errors:
        return errors

    for s in a.states:
        out = a.outgoing(s.name)
        if s.kind == NONINPUT:
            if len(out) > 1:
                errors.append(f"state {s.name}: non-input state with {len(out)} transitions")
            for i in out:
                if not a.transitions[i].guard.is_true:
                    errors.append(f"state {s.name}: non-input transition {i} has a guard")
        for pos, i in enumerate(out):
            for j in out[pos + 1:]:
                if not guards_disjoint(a.transitions[i].guard, a.transitions[j].guard):
                    errors.append(
                        f"state {s.name}: transitions {i} and {j} overlap "
                        "(guards jointly satisfiable)"
                    )
    return errors


def check_initialized(a: DipAutomaton) -> tuple[int, ...] | None:
    """None if every variable is assigned before first use on all runs
    from the initial state; otherwise a shortest run whose last
    transition uses a variable that some path left unassigned."""
    # Must-assign dataflow (meet = intersection) over reachable states.
    all_vars = frozenset(a.variables)
    avail: dict[str, frozenset[str]] = {a.init: frozenset()}
    work = deque([a.init])
    while work:
        q = work.popleft()
        for i in a.outgoing(q):
            t = a.transitions[i]
            out = avail[q] | t.assigns
            if t.trg not in avail:
                avail[t.trg] = out
                work.append(t.trg)
            elif not out >= avail[t.trg]:
                avail[t.trg] &= out
                work.append(t.trg)

    bad: list[tuple[int, str]] = []
    for i, t in enumerate(a.transitions):
        if t.src not in avail:
            continue  # unreachable
        for v in sorted(t.usedv - avail[t.src]):
            bad.append((i, v))
    if not bad:
        return None

    # Shortest witness: for each offending (transition, variable) find the
    # shortest path from init avoiding assignments to that variable.
    best: tuple[int, ...] | None = None
    for i, v in bad:
        t = a.transitions[i]
        path = _shortest_avoiding(a, a.init, t.src, v)
        if path is None:
            continue  # the dataflow was conservative for this pair
        run = path + (i,)
        if best is None or len(run) < len(best):
            best = run
    return best


def _shortest_avoiding(a: DipAutomaton, src: str, dst: str, var: str) -> tuple[int, ...] | None:
    """Shortest transition path src -> dst never assigning `var`."""
    if src == dst:
        return ()
    parents: dict[str, tuple[str, int]] = {}
    seen = {src}
    work = deque([src])
    while work:
        q = work.popleft()
        for i in a.outgoing(q):
            t = a.transitions[i]
            if var in t.assigns or t.trg in seen:
                continue
            parents[t.trg] = (q, i)
            if t.trg == dst:
                path = []
                cur = dst
                while cur != src:
                    cur, j = parents[cur]
                    path.append(j)
                return tuple(reversed(path))
            seen.add(t.trg)
            work.append(t.trg)
    return None


def check_output_distinct(a: DipAutomaton) -> bool:
    """True iff transitions out of every state have pairwise distinct
    outputs, at most one of them real-valued."""
    for s in a.states:
        outs = [a.transitions[i].output for i in a.outgoing(s.name)]
        if len(set(outs)) != len(outs):
            return False
        if sum(1 for o in outs if o.is_real) > 1:
            return False
    return True


def adjacent(s1: Iterable[InputItem], s2: Iterable[InputItem]) -> bool:
    """Equal length, aligned silent steps, per-position real gap <= 1."""
    s1, s2 = tuple(s1), tuple(s2)
    if len(s1) != len(s2):
        return False
    for x, y in zip(s1, s2):
        if (x is TAU) != (y is TAU):
            return False
        if x is not TAU and abs(x - y) > 1:
            return False
    return True
