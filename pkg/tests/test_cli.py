import csv
import io
import json
from pathlib import Path

import pytest

from radial_plap.cli import (
    EXIT_HYP,
    EXIT_INPUT,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_VIOLATED,
    VERDICT_EXIT,
    main,
    parse_vary,
)
from radial_plap.theorems import VerdictStatus

SCEN = Path(__file__).resolve().parents[1] / "scenarios"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def write(tmp_path, doc, name="s.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_exit_codes_total_over_verdicts():
    assert set(VERDICT_EXIT) == set(VerdictStatus)
    assert VERDICT_EXIT[VerdictStatus.CONSISTENT] == EXIT_OK == 0
    assert VERDICT_EXIT[VerdictStatus.VIOLATED] == EXIT_VIOLATED == 1
    assert VERDICT_EXIT[VerdictStatus.HYPOTHESES_FAIL] == EXIT_HYP == 2
    assert VERDICT_EXIT[VerdictStatus.INCONCLUSIVE] == EXIT_NUMERIC == 3
    assert EXIT_INPUT == 4


def test_check_pass_and_fail(capsys):
    code, out = run(capsys, "check", SCEN / "twprzy_power.json", "--set", "N_nd")
    assert code == 0 and json.loads(out)["passed"] is True
    code, out = run(capsys, "check", SCEN / "twprzy_power.json", "--set", "M_nd")
    rep = json.loads(out)
    assert code == 2
    assert [m["condition"] for m in rep["members"] if m["status"] == "Fail"] == ["A2(b)"]


def test_schema_errors(capsys, tmp_path):
    doc = json.loads((SCEN / "twprzy_power.json").read_text())
    doc["bogus"] = 1
    assert main(["check", str(write(tmp_path, doc)), "--set", "N_nd"]) == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", str(bad), "--set", "N_nd"]) == 4
    assert main(["check", str(tmp_path / "missing.json"), "--set", "N_nd"]) == 4
    assert main(["check", str(bad), "--set", "nope"]) == 4
    del doc["bogus"]
    doc["weight"] = {"kind": "power", "coeff": 1}
    assert main(["check", str(write(tmp_path, doc)), "--set", "N_nd"]) == 4


def test_opial_k(capsys):
    base = ["opial-k", "--p", "2", "--l", "1", "--n", "2", "--alpha", "1", "--C", "1"]
    code, out = run(capsys, *base, "--gamma", "0")
    assert code == 0 and out.strip() == "1.000000000000"
    code, out = run(capsys, *base, "--gamma", "0", "--interval", "0.5,0.5")
    assert code == 0 and float(out) == 0.0
    code, out = run(capsys, *base, "--gamma", "-1")
    assert code == 2 and out.strip() == "infinite"
    code, out = run(capsys, *base, "--gamma", "0", "--interval", "0.25,1")
    assert code == 0 and float(out) == pytest.approx(0.75, rel=1e-10)
    code, out = run(capsys, "opial-k", "--p", "2", "--l", "1", "--n", "2", "--alpha", "2",
                    "--C", "1", "--gamma", "0")
    assert code == 2 and out.startswith("inadmissible")
    assert main(base + ["--gamma", "0", "--interval", "1,0"]) == 4


def test_solve_writes_csv(capsys, tmp_path):
    out = tmp_path / "t.csv"
    code, _ = run(capsys, "solve", SCEN / "sinh_backward.json", "--out", out)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "tau,u,du,z"
    assert len(lines[1].split(",")) == 4


def test_solve_blowup_exit_three(capsys, tmp_path):
    doc = {"p": 2, "n": 1, "R": 10, "weight": {"kind": "constant", "value": 1},
           "phi": {"kind": "odd_power", "coeff": -1, "degree": 3},
           "shoot": {"direction": "ForwardFromZero", "epsilon": 0.1, "u0": 10, "du0": 10}}
    out = tmp_path / "t.csv"
    assert main(["solve", str(write(tmp_path, doc)), "--out", str(out)]) == 3
    assert out.read_text().startswith("tau,u,du,z")


@pytest.mark.parametrize("scenario,theorem,code", [
    ("twprzy_power.json", "twprzy", 0),
    ("apriori_sine.json", "prawa", 0),
    ("sinh_backward.json", "lewa", 0),
    ("monohomo_power.json", "monohomo", 0),
    ("twprzy_power.json", "lewa", 2),
])
def test_verify_exit_codes(capsys, scenario, theorem, code):
    got, out = run(capsys, "verify", SCEN / scenario, "--theorem", theorem)
    assert got == code
    assert json.loads(out)["status"] in {s.value for s in VerdictStatus}


def test_verify_roundtrip_byte_identical(capsys, tmp_path):
    traj = tmp_path / "t.csv"
    assert main(["solve", str(SCEN / "apriori_sine.json"), "--out", str(traj)]) == 0
    capsys.readouterr()
    outs = []
    for _ in range(2):
        code, out = run(capsys, "verify", SCEN / "apriori_sine.json", "--theorem", "prawa",
                        "--trajectory", traj)
        assert code == 0
        outs.append(out)
    _, direct = run(capsys, "verify", SCEN / "apriori_sine.json", "--theorem", "prawa")
    assert outs[0] == outs[1]
    a, b = json.loads(outs[0]), json.loads(direct)
    assert a["numbers"].pop("termination") == "synthetic"
    b["numbers"].pop("termination")
    assert a == b


def test_verify_support(capsys, tmp_path):
    doc = json.loads((SCEN / "apriori_sine.json").read_text())
    doc["shoot"]["du0"] = 0
    code, out = run(capsys, "verify", write(tmp_path, doc), "--theorem", "support", "--at", "1.0")
    assert code == 0 and json.loads(out)["theorem"] == "support"


def test_parse_vary():
    assert parse_vary("gamma=-1:-0.5:0.25") == ("gamma", [-1.0, -0.75, -0.5])
    assert parse_vary("alpha=1:0:0.1") == ("alpha", [])
    assert len(parse_vary("alpha=0.2:1.8:0.05")[1]) == 33


@pytest.mark.parametrize("bad", ["gamma", "zeta=0:1:0.1", "gamma=0:1:0", "gamma=a:b:c"])
def test_parse_vary_errors(bad):
    from radial_plap.cli import InputError
    with pytest.raises(InputError):
        parse_vary(bad)


def _sweep(tmp_path, *vary, threads=None, monkeypatch=None):
    if threads is not None:
        monkeypatch.setenv("RADIAL_PLAP_THREADS", str(threads))
    out = tmp_path / f"r{threads}.csv"
    args = ["sweep", str(SCEN / "twprzy_power.json"), "--out", str(out)]
    for v in vary:
        args += ["--vary", v]
    assert main(args) == 0
    return out.read_text()


def test_sweep_recovers_boundary(tmp_path):
    text = _sweep(tmp_path, "gamma=-1.5:0.5:0.05", "alpha=0.2:1.8:0.05")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 41 * 33
    by_alpha = {}
    for r in rows:
        by_alpha.setdefault(float(r["alpha"]), []).append((float(r["gamma"]), r["region"]))
    for alpha, col in by_alpha.items():
        counter = [g for g, reg in col if reg == "CounterexampleExists"]
        other = [g for g, reg in col if reg != "CounterexampleExists"]
        if counter and other:
            edge = (max(counter) + min(other)) / 2
            assert abs(edge - (alpha - 2)) <= 0.05
    col = sorted(by_alpha[1.0])
    reg = dict(col)
    assert reg[-1.0] == "CounterexampleExists" and reg[-0.95] == "NonexistenceApplies"


def test_sweep_empty_range(tmp_path):
    assert _sweep(tmp_path, "gamma=1:0:0.1") == "gamma,region,reason\n"


def test_sweep_order_independent_of_threads(tmp_path, monkeypatch):
    a = _sweep(tmp_path, "gamma=-1:0:0.1", "alpha=0.5:1.5:0.1", threads=1, monkeypatch=monkeypatch)
    b = _sweep(tmp_path, "gamma=-1:0:0.1", "alpha=0.5:1.5:0.1", threads=4, monkeypatch=monkeypatch)
    assert a == b


def test_missing_subcommand():
    assert main([]) == 4
