"""Command-line surface.

Subcommands: check, weight, simulate, witness, gen, bench.  Exit
codes: 0 private (with weight), 1 not private, 2 inconclusive,
3 invalid input, 4 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

from . import corpus, fmt
from .augmentation import ResourceLimitError
from .model import TAU, Interval
from .rational import format_rational, parse_rational
from .report import EXIT_RESOURCE, VERDICT_DP, render, run_check
from .simulate import estimate_prob
from .witness import gen_witness


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(3)
    try:
        return fmt.parse(text)
    except fmt.ParseError as exc:
        for diag in exc.diagnostics:
            print(f"{path}: {diag}", file=sys.stderr)
        raise SystemExit(3)


def _parse_inputs(csv_text: str):
    items = []
    for tok in csv_text.split(","):
        tok = tok.strip()
        if tok == "tau":
            items.append(TAU)
        else:
            items.append(parse_rational(tok))
    return tuple(items)


def _parse_event(csv_text: str):
    items = []
    for tok in csv_text.split(","):
        tok = tok.strip()
        if tok.startswith("@"):
            items.append(tok[1:])
        elif ":" in tok:
            lo_s, hi_s = tok.split(":", 1)
            lo = None if lo_s.strip() in ("-inf", "") else parse_rational(lo_s)
            hi = None if hi_s.strip() in ("inf", "") else parse_rational(hi_s)
            items.append(Interval(lo, hi))
        else:
            raise ValueError(f"bad event token {tok!r} (use @sym or lo:hi)")
    return tuple(items)


def _event_json(event):
    out = []
    for item in event:
        if isinstance(item, Interval):
            out.append({
                "lo": None if item.lo is None else format_rational(item.lo),
                "hi": None if item.hi is None else format_rational(item.hi),
            })
        else:
            out.append({"symbol": item})
    return out


def _inputs_json(seq):
    return ["tau" if x is TAU else format_rational(x) for x in seq]


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="dipcheck")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--aug-cap", type=int, default=1 << 22)
    ap.add_argument("--search-cap", type=int, default=1 << 22)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p_check = sub.add_parser("check", help="full verification pipeline")
    p_check.add_argument("file")
    p_check.add_argument("--timings", action="store_true")

    p_weight = sub.add_parser("weight", help="privacy weight of a well-formed automaton")
    p_weight.add_argument("file")

    p_sim = sub.add_parser("simulate", help="estimate an output-event probability")
    p_sim.add_argument("file")
    p_sim.add_argument("--epsilon", type=float, required=True)
    p_sim.add_argument("--trials", type=int, default=100000)
    p_sim.add_argument("--seed", type=int,
                       default=int(os.environ.get("DIPA_SEED", "0")))
    p_sim.add_argument("--inputs", required=True,
                       help="comma separated: rationals and 'tau'")
    p_sim.add_argument("--event", required=True,
                       help="comma separated: '@sym' or 'lo:hi' with -inf/inf")

    p_wit = sub.add_parser("witness", help="adjacent input pair for a violation")
    p_wit.add_argument("file")
    p_wit.add_argument("--ell", type=int, default=1)

    p_gen = sub.add_parser("gen", help="emit a benchmark automaton")
    p_gen.add_argument("name")
    p_gen.add_argument("--param", type=int, default=None)
    p_gen.add_argument("-o", "--output", default=None)

    p_bench = sub.add_parser("bench", help="run the benchmark table")
    p_bench.add_argument("--report-dir", default=None,
                         help="write bench.csv and scaling figures here")

    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


def _dispatch(args) -> int:
    if args.cmd == "check":
        a = _load(args.file)
        report = run_check(a, args.aug_cap, args.search_cap)
        sys.stdout.write(render(report, args.format, with_timings=args.timings))
        return report.exit_code

    if args.cmd == "weight":
        a = _load(args.file)
        report = run_check(a, args.aug_cap, args.search_cap)
        if report.verdict == VERDICT_DP:
            print(format_rational(report.weight))
        else:
            sys.stdout.write(render(report, args.format))
        return report.exit_code

    if args.cmd == "simulate":
        a = _load(args.file)
        inputs = _parse_inputs(args.inputs)
        event = _parse_event(args.event)
        est = estimate_prob(a, inputs, event, args.epsilon, args.trials, args.seed)
        doc = {
            "point": est.point,
            "trials": est.trials,
            "ci_halfwidth": est.ci_halfwidth,
            "epsilon": args.epsilon,
            "seed": args.seed,
        }
        if args.format == "json":
            print(json.dumps(doc, indent=2, sort_keys=True))
        else:
            print(f"P = {est.point:.6g} +- {est.ci_halfwidth:.3g} "
                  f"({est.trials} trials, seed {args.seed})")
        return 0

    if args.cmd == "witness":
        a = _load(args.file)
        report = run_check(a, args.aug_cap, args.search_cap)
        if report.violation is None:
            sys.stdout.write(render(report, args.format))
            return report.exit_code
        pair = gen_witness(a, report.violation, args.ell)
        doc = {
            "violation": report.violation.to_json(),
            "ell": pair.ell,
            "run": list(pair.run),
            "alpha": _inputs_json(pair.alpha),
            "beta": _inputs_json(pair.beta),
            "event": _event_json(pair.event),
            "bands": {
                str(k): [format_rational(lo), format_rational(hi)]
                for k, (lo, hi) in sorted(pair.bands.items())
            },
        }
        if args.format == "json":
            print(json.dumps(doc, indent=2, sort_keys=True))
        else:
            print(f"violation: {report.violation.kind}")
            print(f"alpha: {doc['alpha']}")
            print(f"beta:  {doc['beta']}")
            print(f"event: {doc['event']}")
        return report.exit_code

    if args.cmd == "gen":
        a = corpus.gen(args.name, args.param)
        text = fmt.serialize(a)
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
        return 0

    if args.cmd == "bench":
        return _bench(args)
    raise AssertionError(args.cmd)


def _bench(args) -> int:
    rows = []
    failures = 0
    for spec in corpus.BENCHMARKS:
        a = spec.build()
        t0 = time.perf_counter()
        report = run_check(a, args.aug_cap, args.search_cap)
        elapsed = time.perf_counter() - t0
        ok = report.verdict in (VERDICT_DP, "not_dp") and _matches(spec, report)
        failures += not ok
        got = report.verdict
        if report.weight is not None:
            got += f" D={format_rational(report.weight)}"
        if report.violation is not None:
            got += f" {report.violation.kind}"
        print(f"{spec.display:16s} {'PASS' if ok else 'FAIL':4s} {got:32s} {elapsed:7.3f}s")
        rows.append({
            "name": spec.display,
            "param": spec.param or "",
            "vars": len(a.variables),
            "states": len(a.states),
            "transitions": len(a.transitions),
            "verdict": report.verdict,
            "weight": format_rational(report.weight) if report.weight is not None else "",
            "violation": report.violation.kind if report.violation else "",
            "expected_ok": ok,
            "seconds": f"{elapsed:.4f}",
        })
    if args.report_dir:
        _write_report(args.report_dir, rows)
    return 0 if failures == 0 else 1


def _matches(spec, report) -> bool:
    if spec.verdict == "dp":
        return report.verdict == VERDICT_DP and report.weight == spec.weight
    return (
        report.verdict == "not_dp"
        and report.violation is not None
        and report.violation.kind == spec.kind
    )


def _write_report(report_dir: str, rows: list[dict]) -> None:
    out = Path(report_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "bench.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    _scaling_figure(
        out / "scaling_minmax.png",
        [(int(r["name"].split("-")[0]), float(r["seconds"]))
         for r in rows if r["name"].endswith("min-max")],
        "states parameter k", "min-max family",
    )
    _scaling_figure(
        out / "scaling_range.png",
        [(int(r["name"].split("-")[0]), float(r["seconds"]))
         for r in rows if r["name"].endswith("-range") and "num" not in r["name"]
         and "two" not in r["name"]],
        "dimension m", "range family",
    )
    print(f"report written to {out}/bench.csv and scaling figures")


def _scaling_figure(path: Path, points: list[tuple[int, float]], xlabel, title):
    if len(points) < 2:
        return
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    points.sort()
    xs = [p for p, _ in points]
    ys = [t for _, t in points]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(xs, ys, "o-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("verification time (s)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


if __name__ == "__main__":
    sys.exit(main())
