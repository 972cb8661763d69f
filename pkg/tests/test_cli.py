import json
import subprocess
import sys
from fractions import Fraction

import pytest

from designldp.cli import main
from designldp.designs import catalog_lookup


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    names = [line.split("\t")[0] for line in out.splitlines()]
    assert code == 0 and {"warner", "fano", "ag23"} <= set(names)


def test_catalog_show(capsys):
    d = run_json(capsys, "catalog", "show", "ag23")
    assert d["points"] == 9 and len(d["blocks"]) == 12


def test_catalog_unknown(capsys):
    code, _, err = run(capsys, "catalog", "show", "nope")
    assert code == 2 and "UnknownName" in err


def test_verify(capsys, tmp_path):
    d = run_json(capsys, "verify", "fano-minus-point")
    assert (d["kind"], d["r"], d["lambda"]) == ("R_LAMBDA_DESIGN", 3, 1)
    d = run_json(capsys, "verify", "pairs-4")
    assert d["kind"] == "BIBD" and [d[k] for k in ("v", "b", "r", "k", "lambda")] == [4, 6, 3, 2, 1]
    f = tmp_path / "odd.json"
    f.write_text(json.dumps({"points": 3, "blocks": [[0, 1], [1, 2]]}))
    d = run_json(capsys, "verify", str(f))
    assert d["kind"] == "GENERAL" and not d["pure"] and d["witness"]["point"] == 1
    code, out, _ = run(capsys, "verify", str(f), "--format", "text")
    assert code == 0 and "witness: point 2" in out


def test_protocol(capsys):
    d = run_json(capsys, "protocol", "ag23", "--theta", "3/4")
    assert d["params"]["alpha1"] == "3/16" and d["params"]["alpha2"] == "1/32"
    assert d["realised_ratio"] == "6"
    assert abs(d["communication_cost_float"] - 3.585) < 1e-3
    assert len(d["tpm"]) == 12 and len(d["tpm"][0]) == 9
    d = run_json(capsys, "protocol", "warner", "--gamma", "3")
    assert d["params"]["theta"] == "3/4"


@pytest.mark.parametrize("flags", [["--theta", "1"], ["--theta", "0"], ["--theta", "1/9"], [], ["--theta", "1/2", "--gamma", "2"], ["--theta", "x"]])
def test_protocol_bad_input(capsys, flags):
    code, _, err = run(capsys, "protocol", "ag23", *flags)
    assert code == 2 and err.startswith("error:")


def _counts(tmp_path, f):
    p = tmp_path / "counts.json"
    p.write_text(json.dumps({"t": sum(f), "f": f}))
    return str(p)


def test_estimate(capsys, tmp_path):
    c = _counts(tmp_path, [4, 4, 2, 2, 3, 3])
    for est in ("closed", "mp", "cn"):
        d = run_json(capsys, "estimate", "pairs-4", "--theta", "3/4", "--counts", c, "--estimator", est)
        assert d["estimate"] == ["5/12", "1/4", "1/4", "1/12"] or est == "cn"
        assert d["sum"] == "1"
    assert run_json(capsys, "estimate", "pairs-4", "--theta", "3/4", "--counts", c, "--estimator", "mp")[
        "provenance"
    ] == "MOORE_PENROSE_CLOSED"


def test_estimate_projection(capsys, tmp_path):
    c = _counts(tmp_path, [6, 0, 0, 0, 0, 0])
    d = run_json(capsys, "estimate", "pairs-4", "--theta", "3/4", "--counts", c, "--project-simplex")
    assert any(x.startswith("-") for x in d["estimate"])
    assert all(not x.startswith("-") for x in d["projected"])


def test_estimate_dimension_mismatch(capsys, tmp_path):
    code, _, err = run(capsys, "estimate", "pairs-4", "--theta", "3/4", "--counts", _counts(tmp_path, [1, 2]))
    assert code == 2 and "DimensionMismatch" in err


def test_risk_ag23(capsys):
    d = run_json(capsys, "risk", "ag23", "--theta", "1/2", "--dist", "uniform", "--t", "10")
    assert d["total"] == "256/45" and d["bound_cn"] == "256/45" and d["tight"]


def test_risk_25_design_from_file(capsys, tmp_path):
    f = tmp_path / "d.json"
    f.write_text(json.dumps(catalog_lookup("bibd-25-4-1").to_dict()))
    d = run_json(capsys, "risk", str(f), "--gamma", "21/4", "--dist", "uniform")
    # printed in lowest terms: 54271/2023 == 7753/289
    assert Fraction(d["information_trace"]) == Fraction(d["bound_trace"]) == Fraction(54271, 2023)
    assert d["tight"]


def test_risk_fano_minus_point(capsys):
    d = run_json(capsys, "risk", "fano-minus-point", "--theta", "3/4", "--t", "10")
    assert d["routes"]["el2_total"] == d["routes"]["pnl_rlambda"]
    assert d["routes_agree"]


def test_risk_csv_and_sweep(capsys):
    code, out, _ = run(capsys, "risk", "ag23", "--theta", "1/2", "--t", "10", "--format", "csv")
    assert code == 0 and "el2_total,256/45," in out
    code, out, err = run(capsys, "risk", "warner", "--sweep-theta", "1/2,1,1/4")
    rows = out.strip().splitlines()
    assert code == 0 and rows[0].startswith("theta_float")
    assert len(rows) == 2 and "skipping" in err


def test_risk_bad_distribution(capsys):
    code, _, err = run(capsys, "risk", "pairs-4", "--theta", "3/4", "--dist", "1/2,1/3,1/6")
    assert code == 2 and "InvalidDistribution" in err


def test_simulate(capsys):
    argv = ["simulate", "pairs-4", "--theta", "3/4", "--dist", "5/12,1/4,1/4,1/12", "--t", "1000", "--reps", "200", "--seed", "42"]
    d = run_json(capsys, *argv)
    risk = run_json(capsys, "risk", "pairs-4", "--theta", "3/4", "--dist", "5/12,1/4,1/4,1/12", "--t", "1000")
    assert d["analytic_variance_total"] == risk["total"]
    code, out, _ = run(capsys, *argv[:-4], "--reps", "5", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 6


def test_simulate_rejects_one_rep(capsys):
    code, _, err = run(capsys, "simulate", "pairs-4", "--theta", "3/4", "--t", "10", "--reps", "1")
    assert code == 2 and "reps" in err


def test_simulate_out_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "simulate", "warner", "--gamma", "3", "--t", "50", "--reps", "10", "--out", str(out))
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["reps"] == 10


def test_simulate_byte_identical_subprocess():
    argv = [sys.executable, "-m", "designldp", "simulate", "ag23", "--theta", "3/4", "--t", "300", "--reps", "20", "--seed", "7"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv + ["--workers", "2"], capture_output=True, check=True).stdout
    assert a == b and len(a) > 100
