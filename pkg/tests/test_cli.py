import json
import subprocess
import sys

import pytest

from dipcheck import corpus, fmt
from dipcheck.cli import main


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


@pytest.fixture()
def svt_file(tmp_path):
    path = tmp_path / "svt.dipa"
    path.write_text(fmt.serialize(corpus.gen("svt")))
    return str(path)


def test_check_svt(svt_file, capsys):
    code, out = _run(["check", svt_file], capsys)
    assert code == 0
    assert "verdict: dp" in out and "weight: 5/4" in out


def test_check_json_schema(svt_file, capsys):
    code, out = _run(["--format", "json", "check", svt_file], capsys)
    doc = json.loads(out)
    assert set(doc) == {"verdict", "weight", "violation", "output_distinct",
                        "errors", "timings"}
    assert doc["verdict"] == "dp" and doc["weight"] == "5/4"
    assert doc["timings"] is None  # deterministic unless --timings
    # report re-parses losslessly
    assert json.loads(json.dumps(doc)) == doc


def test_check_not_dp(tmp_path, capsys):
    path = tmp_path / "tr1.dipa"
    path.write_text(fmt.serialize(corpus.gen("two-range-1")))
    code, out = _run(["--format", "json", "check", str(path)], capsys)
    assert code == 1
    doc = json.loads(out)
    assert doc["verdict"] == "not_dp"
    assert doc["violation"]["kind"] == "leaking_pair"


def test_check_inconclusive(tmp_path, capsys):
    path = tmp_path / "nwf.dipa"
    path.write_text(fmt.serialize(corpus.gen("nwf")))
    code, out = _run(["--format", "json", "check", str(path)], capsys)
    assert code == 2
    doc = json.loads(out)
    assert doc["verdict"] == "not_well_formed_inconclusive"
    assert doc["violation"]["kind"] == "leaking_cycle"
    assert doc["output_distinct"] is False


def test_check_invalid(tmp_path, capsys):
    path = tmp_path / "bad.dipa"
    path.write_text("state q0 input d=-1 mu=0;\ninit q0;\n")
    with pytest.raises(SystemExit) as exc:
        main(["check", str(path)])
    assert exc.value.code == 3


def test_weight_command(svt_file, capsys):
    code, out = _run(["weight", svt_file], capsys)
    assert code == 0 and out.strip() == "5/4"


def test_gen_and_check_roundtrip(tmp_path, capsys):
    out_file = tmp_path / "mr.dipa"
    code, _ = _run(["gen", "range", "--param", "2", "-o", str(out_file)], capsys)
    assert code == 0
    code, out = _run(["check", str(out_file)], capsys)
    assert code == 0 and "weight: 1" in out


def test_simulate_deterministic(svt_file, capsys):
    argv = ["--format", "json", "simulate", svt_file, "--epsilon", "1",
            "--trials", "20000", "--seed", "5", "--inputs", "tau,0,0",
            "--event", "@bot,@bot,@bot"]
    code, out1 = _run(argv, capsys)
    assert code == 0
    _, out2 = _run(argv, capsys)
    assert out1 == out2
    doc = json.loads(out1)
    assert 0.2 < doc["point"] < 0.6


def test_simulate_interval_event(tmp_path, capsys):
    path = tmp_path / "ns.dipa"
    path.write_text(fmt.serialize(corpus.gen("num-sparse")))
    code, out = _run(["simulate", str(path), "--epsilon", "2", "--trials",
                      "20000", "--seed", "1", "--inputs", "tau,3",
                      "--event", "@bot,0:inf"], capsys)
    assert code == 0 and "P = " in out


def test_witness_command(tmp_path, capsys):
    path = tmp_path / "dc.dipa"
    path.write_text(fmt.serialize(corpus.gen("dc-example")))
    code, out = _run(["--format", "json", "witness", str(path), "--ell", "2"],
                     capsys)
    assert code == 1
    doc = json.loads(out)
    assert doc["violation"]["kind"] == "disclosing_cycle"
    assert len(doc["alpha"]) == len(doc["beta"]) == len(doc["event"])
    diffs = [i for i, (x, y) in enumerate(zip(doc["alpha"], doc["beta"])) if x != y]
    assert len(diffs) == 2


def test_text_and_json_share_one_report(svt_file, capsys):
    from dipcheck import corpus as _c
    from dipcheck.report import render, run_check

    report = run_check(_c.gen("svt"))
    text = render(report, "text")
    doc = json.loads(render(report, "json"))
    assert doc["verdict"] in text
    assert doc["weight"] in text


def test_check_byte_identical_via_subprocess(svt_file):
    cmd = [sys.executable, "-m", "dipcheck", "--format", "json", "check", svt_file]
    r1 = subprocess.run(cmd, capture_output=True, text=True)
    r2 = subprocess.run(cmd, capture_output=True, text=True)
    assert r1.returncode == 0
    assert r1.stdout == r2.stdout


def test_resource_cap_exit_code(tmp_path, capsys):
    path = tmp_path / "mr.dipa"
    path.write_text(fmt.serialize(corpus.gen("range", 4)))
    code = main(["--aug-cap", "3", "check", str(path)])
    assert code == 4


def test_bench_quick_row(tmp_path, capsys, monkeypatch):
    # bench over a reduced table exercises the report path incl. figures
    small = tuple(s for s in corpus.BENCHMARKS
                  if s.display in ("svt", "dc-example", "2-min-max", "10-min-max",
                                   "1-range", "10-range"))
    monkeypatch.setattr(corpus, "BENCHMARKS", small)
    report_dir = tmp_path / "rep"
    code, out = _run(["bench", "--report-dir", str(report_dir)], capsys)
    assert code == 0
    assert (report_dir / "bench.csv").is_file()
    assert (report_dir / "scaling_minmax.png").is_file()
    assert (report_dir / "scaling_range.png").is_file()
    lines = [l for l in out.splitlines() if "PASS" in l or "FAIL" in l]
    assert len(lines) == len(small) and all("PASS" in l for l in lines)
