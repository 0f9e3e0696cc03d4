import json
import subprocess
import sys

import pytest

from wkbcalc.cech import OneCocycle, ZeroCocycle, fixture
from wkbcalc.cli import main, run
from wkbcalc.crossed import make_g1
from wkbcalc.descent import WKBDescentDatum
from wkbcalc.groups import cyclic
from wkbcalc.series import TauSeries, kstar_exp
from wkbcalc.wkb import HalfFormOperator, WKBSymbol, star


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return _write


def report_of(argv, capsys):
    status = main(argv)
    out = capsys.readouterr().out
    return status, json.loads(out)


def without_timing(report):
    return {k: v for k, v in report.items() if k != "elapsed_ms"}


def test_star_matches_library(write, capsys):
    P = WKBSymbol.parse(1, {1: "u1", 0: "x1"})
    Q = WKBSymbol.parse(1, {0: "x1**2"})
    status, report = report_of(["star", write("P.json", P.to_json()), write("Q.json", Q.to_json()),
                                "--depth", "5"], capsys)
    assert status == 0 and report["verb"] == "star"
    assert WKBSymbol.from_json(report["result"]).agrees(star(P, Q))
    assert set(report) == {"verb", "result", "checks", "elapsed_ms"}


def test_invert_and_not_invertible(write, capsys):
    P = WKBSymbol.parse(1, {0: "1", -1: "x1*u1"})
    status, report = report_of(["invert", write("P.json", P.to_json()), "--depth", "4"], capsys)
    assert status == 0 and all(c["ok"] for c in report["checks"])
    status, report = report_of(["invert", write("U.json", WKBSymbol.parse(1, {0: "u1"}).to_json())], capsys)
    assert status == 1 and report["error"]["type"] == "NotInvertible"


def test_symbol_adjoint_wstar_kstar(write, capsys):
    P = WKBSymbol.parse(1, {2: "x1*u1", 0: "3"})
    path = write("P.json", P.to_json())
    status, report = report_of(["symbol", path, "--order", "3"], capsys)
    assert status == 0 and report["result"]["order"] == 2
    assert report["result"]["symbol_of_order"] == []
    status, report = report_of(["symbol", path, "--order", "1"], capsys)
    assert status == 1 and report["error"]["type"] == "OrderTooHigh"
    H = HalfFormOperator(1, P)
    status, report = report_of(["adjoint", write("H.json", H.to_json())], capsys)
    assert status == 0 and report["checks"][0]["ok"]
    status, report = report_of(["wstar", write("W.json", HalfFormOperator(1, WKBSymbol.const(1, 1)).to_json())],
                               capsys)
    assert report["result"]["member"] is True
    good = write("k.json", kstar_exp({-1: 2}, 6).to_json())
    bad = write("b.json", TauSeries({0: 1, -1: 1}).to_json())
    assert report_of(["kstar", good], capsys)[1]["result"]["member"] is True
    assert report_of(["kstar", bad], capsys)[1]["result"]["member"] is False


def test_crossed_module_and_cochains(write, capsys):
    status, report = report_of(["cm-validate", "central:Q8"], capsys)
    assert status == 0 and report["result"]["valid"]
    status, report = report_of(["cm-validate", "trivial-target:S3"], capsys)
    assert status == 0 and not report["result"]["valid"]
    cm = write("cm.json", make_g1(cyclic(2)).to_json())
    sphere = fixture("sphere")
    c1 = write("c1.json", OneCocycle((0,) * 6, (1, 0, 0, 0)).to_json(sphere))
    status, report = report_of(["check1", cm, "sphere", c1], capsys)
    assert status == 0 and report["result"]["cocycle"] is True
    interval = fixture("interval")
    c0 = write("c0.json", ZeroCocycle((0, 0), (1,)).to_json(interval))
    status, report = report_of(["check0", cm, "interval", c0], capsys)
    assert report["result"]["cocycle"] is True


def test_cohomology_verbs(capsys):
    assert report_of(["h0", "G1:Z2", "circle"], capsys)[1]["result"]["count"] == 2
    assert report_of(["h1", "G1:Z2", "--fixture", "sphere"], capsys)[1]["result"]["count"] == 2
    status, report = report_of(["cech", "Z2", "sphere", "--degree", "2"], capsys)
    assert status == 0 and report["result"]["order"] == 2
    status, report = report_of(["compare-hyper", "Z2", "circle"], capsys)
    assert status == 0
    assert all(c["counts"][0] == c["counts"][1] for c in report["checks"])


def test_budget_exhaustion_returns_labelled_partial(capsys):
    status, report = report_of(["h1", "central:Q8", "sphere", "--budget", "50"], capsys)
    assert status == 1 and report["error"]["type"] == "BudgetExceeded"
    assert report["partial"]["complete"] is False


def test_bridge_counts(capsys):
    status, report = report_of(["bridge", "--group", "Z4", "--nerve", "sphere", "--kernel", "0,2"], capsys)
    assert status == 0
    assert report["checks"][0]["counts"] == [2, 2] and report["result"]["verified"]
    status, report = report_of(["bridge", "--group", "Q8", "--nerve", "circle"], capsys)
    assert report["checks"][0]["counts"] == [1, 1]


def test_descent_verbs(write, capsys):
    N = fixture("disk")
    one = WKBSymbol.const(1, 1)
    c = kstar_exp({-1: 1}, 4)
    d = WKBDescentDatum(N, {e: one for e in N.edges},
                        {t: HalfFormOperator(1, WKBSymbol.from_series(1, c)) for t in N.triangles}, 4)
    path = write("d.json", d.to_json())
    status, report = report_of(["descent-validate", path], capsys)
    assert status == 0 and report["result"]["valid"]
    status, report = report_of(["extract-class", path], capsys)
    assert status == 0
    assert TauSeries.from_json(report["result"]["0,1,2"]).agrees(c.inverse(4))


def test_malformed_inputs_exit_2(tmp_path, capsys):
    assert main(["star", str(tmp_path / "missing.json"), str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["invert", str(bad)]) == 2
    assert main(["h1", "G1:Z2", "torus"]) == 2
    assert main(["bridge", "--nerve", "sphere"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-verb"])
    assert exc.value.code == 2


def test_out_flag_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["bridge", "--group", "Q8", "--nerve", "circle"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert capsys.readouterr().out == ""
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert json.dumps(without_timing(ra), sort_keys=True) == json.dumps(without_timing(rb), sort_keys=True)
    s1, r1, _ = run(["h1", "G1:Z3", "sphere"])
    s2, r2, _ = run(["h1", "G1:Z3", "sphere"])
    assert without_timing(r1) == without_timing(r2)


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "wkbcalc.cli", "cm-validate", "G0:S3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["valid"] is True
    assert "cm-validate: ok" in proc.stderr
