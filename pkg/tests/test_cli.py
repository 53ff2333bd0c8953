import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from subconvex.cli import RunRecord, dispatch, emit, main, parse_records, read_cache, write_cache
from subconvex.forms import delta_coeffs


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_kloosterman(capsys):
    code, recs = run_json(capsys, "kloosterman", "1", "1", "3")
    assert code == 0
    # integer-valued sums come out exactly
    assert recs[0]["result"] == {"num": -1, "den": 1}
    assert recs[0]["pass"] is True
    code, recs = run_json(capsys, "kloosterman", "2", "3", "5")
    assert recs[0]["result"]["re"] == pytest.approx(0.3819660112501051, abs=1e-15)


def test_exponents_json(capsys):
    code, recs = run_json(capsys, "exponents")
    assert code == 0 and len(recs) == 5
    results = {(r["result"]["num"], r["result"]["den"]) for r in recs}
    assert (2, 51) in results and (10, 51) in results


def test_global_flags_either_side(capsys):
    assert main(["--json", "kloosterman", "2", "3", "5"]) == 0
    a = capsys.readouterr().out
    assert main(["kloosterman", "2", "3", "5", "--json"]) == 0
    assert capsys.readouterr().out == a


def test_empty_emit():
    assert json.loads(emit([], "json")) == []
    assert emit([], "csv").decode() == "command,params,re,im,err,ms,pass\n"
    with pytest.raises(ValueError):
        emit([], "xml")


def test_rational_in_csv():
    out = emit([RunRecord("exponents", {"term": "theta"}, Fraction(2, 51))], "csv").decode()
    row = list(csv.reader(out.splitlines()))[1]
    assert row[2] == "2/51" and row[3] == "0"


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
results = st.one_of(st.none(), st.fractions(), st.builds(complex, finite, finite))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.text(min_size=1, max_size=8), results,
                          st.one_of(st.none(), finite), st.one_of(st.none(), st.booleans())),
                max_size=5))
def test_json_round_trip(rows):
    recs = [RunRecord(c, {"i": i}, r, e, None, p) for i, (c, r, e, p) in enumerate(rows)]
    back = parse_records(emit(recs, "json"))
    assert [(b.command, b.params, b.result, b.error, b.passed) for b in back] == \
           [(r.command, r.params, r.result, r.error, r.passed) for r in recs]


def test_ms_only_with_timing():
    r = RunRecord("x", {}, 1, None, 12.3456, True)
    assert json.loads(emit([r], "json"))[0]["ms"] is None
    assert json.loads(emit([r], "json", timing=True))[0]["ms"] == 12.346


def test_deterministic_output(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.csv"
        assert main(["charsum", "6", "2", "2", "5", "3", "--json", "--csv", str(path)]) == 0
        outs.append((capsys.readouterr().out, path.read_bytes()))
    assert outs[0] == outs[1]


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code != 0
    assert main(["delta", "16", "33"]) == 1
    assert "error" in capsys.readouterr().err


def test_cache_round_trip(tmp_path):
    path = str(tmp_path / "c.csv")
    form = delta_coeffs(400)
    write_cache(path, form)
    assert read_cache(path, 12, 400).integers == form.integers
    assert read_cache(path, 12, 401) is None
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "n,r,re,im"
    lines[5] = "5,1,10,0"
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    assert read_cache(path, 12, 400) is None


def test_coeffs_uses_cache(tmp_path, capsys):
    path = str(tmp_path / "c.csv")
    assert main(["coeffs", "12", "200", "--cache", path, "--json"]) == 0
    first = capsys.readouterr().out
    assert read_cache(path, 12, 200) is not None
    assert main(["coeffs", "12", "200", "--cache", path, "--json"]) == 0
    assert capsys.readouterr().out == first


def test_dispatch_records():
    recs, args = dispatch(["bessel", "12", "20"])
    assert recs and all(r.passed for r in recs)


def test_verify_only_one(capsys):
    assert main(["verify-all", "--only", "1"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "subconvex", "kloosterman", "1", "1", "1", "--json"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)[0]["result"] == {"num": 1, "den": 1}
