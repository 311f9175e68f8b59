"""On-disk automaton format.

Line-oriented text, one declaration per `;`-terminated statement::

    var r1 r2;
    alphabet bot top1 top2;          # optional; output symbols imply it
    state q0 noninput d=1/4 mu=0 dp=1/4 mup=0;
    state q2 input d=1/4 mu=0 dp=1/4 mup=0;
    init q0;
    trans q2 -> q2 guard "x >= r1 && x < r2" out "@bot" assign {};
    trans q2 -> q3 guard "true" out "insample'" assign {r1, r2};

Outputs are `@name` for alphabet symbols, `insample` for the guard
sample and `insample'` for the fresh sample.  An equivalent JSON
object (detected by a leading `{`) is accepted as well.  Parsing
aggregates diagnostics with line/column positions and never returns a
partial automaton.
"""

from __future__ import annotations

import json
import re

from .model import (
    GE,
    INPUT,
    LT,
    NONINPUT,
    OUT_FRESH,
    OUT_SAMPLE,
    SAMPLE,
    SYMBOL,
    DipAutomaton,
    Guard,
    Output,
    State,
    StateParams,
    Transition,
)
from .rational import format_rational, parse_rational


class ParseError(ValueError):
    def __init__(self, diagnostics: list[str]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(diagnostics))


_STMT_RE = re.compile(r"[^;]*;", re.S)
_TRANS_RE = re.compile(
    r"trans\s+(\S+)\s*->\s*(\S+)\s+guard\s+\"([^\"]*)\"\s+out\s+\"([^\"]*)\""
    r"\s+assign\s*\{([^}]*)\}\s*$"
)
_STATE_RE = re.compile(r"state\s+(\S+)\s+(input|noninput)((?:\s+\w+=\S+)*)\s*$")
_PARAM_RE = re.compile(r"(\w+)=(\S+)")


def parse(text: str) -> DipAutomaton:
    text_l = text.lstrip()
    if text_l.startswith("{"):
        return from_json(json.loads(text))
    return _parse_text(text)


def _line_col(text: str, offset: int) -> str:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return f"line {line}, col {col}"


def _parse_text(text: str) -> DipAutomaton:
    errors: list[str] = []
    variables: list[str] = []
    states: list[State] = []
    init: str | None = None
    raw_trans: list[tuple] = []
    symbols: set[str] = set()

    stripped = re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), text)
    covered = 0
    for m in _STMT_RE.finditer(stripped):
        stmt = m.group()[:-1].strip()
        covered = m.end()
        where = _line_col(text, m.start() + len(m.group()) - len(m.group().lstrip()))
        if not stmt:
            continue
        head = stmt.split(None, 1)[0]
        if head == "var":
            variables.extend(stmt.split()[1:])
        elif head == "alphabet":
            symbols.update(stmt.split()[1:])
        elif head == "state":
            sm = _STATE_RE.match(stmt)
            if not sm:
                errors.append(f"{where}: malformed state declaration")
                continue
            name, kind, rest = sm.group(1), sm.group(2), sm.group(3)
            params = {"d": "1", "mu": "0", "dp": "1", "mup": "0"}
            for pm in _PARAM_RE.finditer(rest):
                if pm.group(1) not in params:
                    errors.append(f"{where}: unknown parameter {pm.group(1)!r}")
                else:
                    params[pm.group(1)] = pm.group(2)
            try:
                sp = StateParams(
                    parse_rational(params["d"]),
                    parse_rational(params["mu"]),
                    parse_rational(params["dp"]),
                    parse_rational(params["mup"]),
                )
            except ValueError as exc:
                errors.append(f"{where}: {exc}")
                continue
            states.append(State(name, INPUT if kind == "input" else NONINPUT, sp))
        elif head == "init":
            parts = stmt.split()
            if len(parts) != 2:
                errors.append(f"{where}: malformed init declaration")
            else:
                init = parts[1]
        elif head == "trans":
            tm = _TRANS_RE.match(stmt)
            if not tm:
                errors.append(f"{where}: malformed transition")
                continue
            raw_trans.append((where, *tm.groups()))
        else:
            errors.append(f"{where}: unknown declaration {head!r}")
    tail = stripped[covered:].strip()
    if tail:
        errors.append(f"{_line_col(text, covered)}: trailing text without ';'")

    transitions: list[Transition] = []
    varset = set(variables)
    for where, src, trg, guard_s, out_s, assign_s in raw_trans:
        guard = _parse_guard(guard_s, varset, errors, where)
        output = _parse_output(out_s, errors, where)
        assigns = [v for v in re.split(r"[\s,]+", assign_s.strip()) if v]
        for v in assigns:
            if v not in varset:
                errors.append(f"{where}: assigns unknown variable {v!r}")
        if output is not None and output.kind == SYMBOL:
            symbols.add(output.symbol)
        if guard is not None and output is not None:
            transitions.append(Transition(src, guard, trg, output, frozenset(assigns)))

    if init is None:
        errors.append("missing init declaration")
    if errors:
        raise ParseError(errors)

    a = DipAutomaton(
        variables=tuple(variables),
        alphabet=frozenset(symbols),
        states=tuple(states),
        init=init,
        transitions=tuple(transitions),
    )
    from .model import validate

    structural = validate(a)
    if structural:
        raise ParseError(structural)
    return a


def _parse_guard(src: str, varset, errors, where) -> Guard | None:
    src = src.strip()
    if src in ("true", ""):
        return Guard.true()
    atoms = []
    ok = True
    for part in src.split("&&"):
        am = re.match(r"\s*x\s*(>=|<)\s*(\w+)\s*$", part)
        if not am:
            errors.append(f"{where}: malformed guard conjunct {part.strip()!r}")
            ok = False
            continue
        var = am.group(2)
        if var not in varset:
            errors.append(f"{where}: guard references unknown variable {var!r}")
            ok = False
            continue
        atoms.append((var, GE if am.group(1) == ">=" else LT))
    if not ok:
        return None
    try:
        return Guard.of(*atoms)
    except ValueError as exc:
        errors.append(f"{where}: {exc}")
        return None


def _parse_output(src: str, errors, where) -> Output | None:
    src = src.strip()
    if src == "insample":
        return OUT_SAMPLE
    if src == "insample'":
        return OUT_FRESH
    if src.startswith("@") and len(src) > 1:
        return Output.sym(src[1:])
    errors.append(f"{where}: malformed output {src!r}")
    return None


def serialize(a: DipAutomaton) -> str:
    lines = []
    if a.variables:
        lines.append("var " + " ".join(a.variables) + ";")
    if a.alphabet:
        lines.append("alphabet " + " ".join(sorted(a.alphabet)) + ";")
    for s in a.states:
        p = s.params
        lines.append(
            f"state {s.name} {'input' if s.kind == INPUT else 'noninput'} "
            f"d={format_rational(p.d)} mu={format_rational(p.mu)} "
            f"dp={format_rational(p.d_prime)} mup={format_rational(p.mu_prime)};"
        )
    lines.append(f"init {a.init};")
    for t in a.transitions:
        if t.guard.is_true:
            guard = "true"
        else:
            guard = " && ".join(
                f"x {'>=' if atom.rel == GE else '<'} {atom.var}"
                for atom in sorted(t.guard.atoms, key=lambda x: x.var)
            )
        if t.output.kind == SYMBOL:
            out = f"@{t.output.symbol}"
        elif t.output.kind == SAMPLE:
            out = "insample"
        else:
            out = "insample'"
        assigns = ", ".join(sorted(t.assigns))
        lines.append(
            f"trans {t.src} -> {t.trg} guard \"{guard}\" out \"{out}\" "
            f"assign {{{assigns}}};"
        )
    return "\n".join(lines) + "\n"


def to_json(a: DipAutomaton) -> dict:
    return {
        "variables": list(a.variables),
        "alphabet": sorted(a.alphabet),
        "init": a.init,
        "states": [
            {
                "name": s.name,
                "kind": s.kind,
                "d": format_rational(s.params.d),
                "mu": format_rational(s.params.mu),
                "dp": format_rational(s.params.d_prime),
                "mup": format_rational(s.params.mu_prime),
            }
            for s in a.states
        ],
        "transitions": [
            {
                "src": t.src,
                "trg": t.trg,
                "guard": [
                    {"var": atom.var, "rel": atom.rel}
                    for atom in sorted(t.guard.atoms, key=lambda x: x.var)
                ],
                "out": (
                    {"symbol": t.output.symbol}
                    if t.output.kind == SYMBOL
                    else {"real": t.output.kind}
                ),
                "assign": sorted(t.assigns),
            }
            for t in a.transitions
        ],
    }


def from_json(doc: dict) -> DipAutomaton:
    errors: list[str] = []
    try:
        states = tuple(
            State(
                s["name"],
                s["kind"],
                StateParams(
                    parse_rational(str(s.get("d", "1"))),
                    parse_rational(str(s.get("mu", "0"))),
                    parse_rational(str(s.get("dp", "1"))),
                    parse_rational(str(s.get("mup", "0"))),
                ),
            )
            for s in doc["states"]
        )
        transitions = []
        symbols = set(doc.get("alphabet", []))
        for t in doc["transitions"]:
            out = t["out"]
            if "symbol" in out:
                output = Output.sym(out["symbol"])
                symbols.add(out["symbol"])
            else:
                output = OUT_SAMPLE if out["real"] == SAMPLE else OUT_FRESH
            transitions.append(
                Transition(
                    t["src"],
                    Guard.of(*((g["var"], g["rel"]) for g in t["guard"])),
                    t["trg"],
                    output,
                    frozenset(t.get("assign", [])),
                )
            )
        a = DipAutomaton(
            variables=tuple(doc.get("variables", [])),
            alphabet=frozenset(symbols),
            states=states,
            init=doc["init"],
            transitions=tuple(transitions),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError([f"bad JSON automaton: {exc}"]) from None
    from .model import validate

    structural = validate(a)
    if structural:
        raise ParseError(structural)
    return a
