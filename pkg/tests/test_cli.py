import csv
import io
import json

import pytest

from sparse_expsum.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sum_gauss(capsys):
    code, out, _ = run(capsys, "sum", "-p", "7", "--exps", "2", "--coeffs", "1")
    assert code == 0
    (r,) = rows(out)
    assert float(r["magnitude"]) == pytest.approx(7**0.5, abs=1e-10)
    assert r["terms"] == "7"


def test_sum_json_matches_csv(capsys):
    args = ["sum", "-p", "31", "--exps", "1,6", "--coeffs", "3,4"]
    _, c, _ = run(capsys, *args)
    _, j, _ = run(capsys, *args, "--format", "json")
    (r,) = rows(c)
    (d,) = json.loads(j)
    assert float(r["magnitude"]) == d["magnitude"]
    assert float(r["real"]) == d["real"]


def test_count_tt(capsys):
    code, out, _ = run(capsys, "count", "tt", "-p", "7", "-t", "3")
    assert code == 0 and rows(out)[0]["value"] == "486"
    _, out, _ = run(capsys, "count", "tt", "-p", "7", "-t", "3", "--method", "naive")
    assert rows(out)[0]["value"] == "486"


def test_count_hist_and_collisions(capsys):
    _, out, _ = run(capsys, "count", "hist", "-p", "7", "--exps", "1,3", "--coeffs", "1,1")
    assert {r["lambda"]: r["count"] for r in rows(out)} == {"2": "2", "3": "1", "4": "1", "5": "2"}
    _, out, _ = run(capsys, "count", "collisions", "-p", "7", "--exps", "1,3", "--coeffs", "1,1")
    assert rows(out)[0]["value"] == "10"


def test_region_fig61_csv(capsys, tmp_path):
    path = tmp_path / "fig61.csv"
    code, out, _ = run(capsys, "region", "fig61", "--format", "csv", "--out", str(path))
    assert code == 0 and out == ""
    data = rows(path.read_text())
    assert any(r["x_num"] == "60" and r["x_den"] == "253" and r["y_num"] == "0" for r in data)


def test_region_json(capsys):
    code, out, _ = run(capsys, "region", "fig62", "--format", "json", "--decimals")
    doc = json.loads(out)
    assert code == 0 and doc["axes"] == ["eps", "eta"] and doc["cells"]


def test_invariants_and_bounds(capsys):
    _, out, _ = run(capsys, "invariants", "-p", "31", "--exps", "1,6")
    r = rows(out)[0]
    assert (r["d"], r["Gamma"], r["Delta"]) == ("5", "6", "5")
    _, out, _ = run(capsys, "bounds", "-p", "31", "--exps", "5,6")
    names = {r["name"] for r in rows(out)}
    assert {"trivial", "weil", "a65(m=5,n=6)", "thm23(m=5,n=6)", "best_any"} <= names


def test_max_orbits_vs_exhaustive(capsys):
    _, a, _ = run(capsys, "max", "-p", "13", "--exps", "1,3")
    _, b, _ = run(capsys, "max", "-p", "13", "--exps", "1,3", "--method", "exhaustive", "--threads", "2")
    ra, rb = rows(a)[0], rows(b)[0]
    assert ra["M"] == rb["M"] and ra["argmax"] == rb["argmax"]


def test_not_prime_exit_1(capsys):
    code, out, _ = run(capsys, "sum", "-p", "10", "--exps", "2", "--coeffs", "1", "--format", "json")
    assert code == 1
    assert json.loads(out)["error"]["code"] == "not_prime"


def test_cap_exit_1(capsys):
    code, _, err = run(capsys, "max", "-p", "101", "--exps", "1,2,3", "--cap-evals", "1000")
    assert code == 1 and "cap" in err


def test_unknown_flag_exit_1(capsys):
    code, _, err = run(capsys, "sum", "--bogus")
    assert code == 1 and "usage" in err


def test_verify_subset(capsys, tmp_path):
    code, out, err = run(capsys, "verify", "--only", "1,7,9", "--out", str(tmp_path))
    assert code == 0
    assert err.count("[PASS]") == 3
    assert [r["criterion"] for r in rows(out)] == ["1", "7", "9"]


def test_verify_failure_exit_2(capsys, monkeypatch):
    from sparse_expsum import verify

    monkeypatch.setattr(verify, "CHECKS", [(99, "forced", lambda: (False, "boom"), 1.0)])
    code, _, err = run(capsys, "verify")
    assert code == 2 and "[FAIL]" in err


def test_report_from_flags_and_manifest(capsys, tmp_path):
    code, out, _ = run(capsys, "report", "--primes", "7,11", "--family", "m1_divisors")
    assert code == 0
    flag_rows = rows(out)
    assert {r["p"] for r in flag_rows} == {"7", "11"}
    man = tmp_path / "m.json"
    out_path = tmp_path / "r.json"
    man.write_text(json.dumps({
        "primes": {"range": [7, 11]},
        "families": ["m1_divisors"],
        "outputs": {"format": "json", "path": str(out_path)},
        "caps": {"evals": 10**6},
        "seed": 3,
    }))
    assert main(["report", "--manifest", str(man)]) == 0
    data = json.loads(out_path.read_text())
    assert len(data) == len(flag_rows)
    assert [float(r["M"]) for r in flag_rows] == [d["M"] for d in data]


def test_report_bad_manifest(capsys, tmp_path):
    man = tmp_path / "m.json"
    man.write_text(json.dumps({"primes": [9], "families": ["m1_divisors"]}))
    code, _, err = run(capsys, "report", "--manifest", str(man))
    assert code == 1 and "not prime" in err


def test_report_deterministic(capsys):
    _, a, _ = run(capsys, "report", "--primes", "13", "--family", "fixed:1,3", "--format", "json")
    _, b, _ = run(capsys, "report", "--primes", "13", "--family", "fixed:1,3", "--format", "json")
    assert a == b
