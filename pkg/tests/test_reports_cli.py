import csv
import io
import json
import subprocess
import sys

import pytest

from helpers import CORPUS
from quasithin.cli import EXIT_ERROR, EXIT_FAIL, EXIT_OK, main
from quasithin.corpus import c6_fusion, cyclic, orbital_scheme
from quasithin.reports import (CSV_COLUMNS, VerifyOptions, batch_verify, dumps, report_passes, to_csv,
                               verify_scheme)
from quasithin.scheme import serialize

BROKEN = "4 3\n0 1 2 3\n3 0 1 2\n2 3 0 1\n1 2 0 3\n"  # last row breaks regularity


def write(tmp_path, name, s, comment=None):
    p = tmp_path / f"{name}.scheme"
    p.write_text(serialize(s, comment=comment) if not isinstance(s, str) else s)
    return p


def field(rep, p):
    return next(f for f in rep["fields"] if f["characteristic"] == p)


def statuses(obj):
    if isinstance(obj, dict):
        if "status" in obj:
            yield obj["status"]
        for v in obj.values():
            yield from statuses(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from statuses(v)


# reports --------------------------------------------------------------------

def test_c6_report():
    rep = verify_scheme(c6_fusion(), VerifyOptions(chars=(0, 2, 3)))
    assert rep["verdict"] == "pass" and rep["valid"]
    assert [f["dimension"]["oracle"] for f in rep["fields"]] == [20, 20, 20]
    assert all(f["dimension"]["equal"] for f in rep["fields"])
    assert [f["radical"]["dimension"] for f in rep["fields"]] == [0, 12, 0]
    assert field(rep, 0)["blocks"]["sizes"] == [4, 2]
    assert field(rep, 2)["blocks"]["sizes"] == [2, 2]
    assert field(rep, 2)["blocks"]["quotient_dimension"] == 8
    assert field(rep, 2)["radical"]["equals_j1"] is True
    assert field(rep, 0)["radical"]["char0_oracle_dimension"] == 0
    assert rep["triply_regular"]["value"] is True and rep["bad_pairs"] == []
    assert rep["valency_histogram"] == {"1": 2, "2": 2}
    assert "timings_ms" not in field(rep, 0)


def test_z4_char_two_report():
    rep = verify_scheme(cyclic(4), VerifyOptions(chars=(2,)))
    f = rep["fields"][0]
    assert f["dimension"]["oracle"] == 16 and f["radical"]["dimension"] == 0
    assert f["blocks"]["sizes"] == [4] and f["radical"]["branch"] == "thin"


def test_every_verdict_is_pass_fail_or_skipped():
    rep = verify_scheme(CORPUS["A5_by_involution"], VerifyOptions(chars=(0, 2), timings=True))
    assert set(statuses(rep)) <= {"pass", "fail", "skipped"}
    assert rep["bad_pairs"] == [[4, 10], [10, 4]]
    assert rep["triply_regular"]["value"] is False and rep["triply_regular"]["witness"] is not None
    assert set(field(rep, 0)["timings_ms"]) >= {"closure", "decompose"}
    skipped = field(rep, 0)["vertex_invariance"]
    assert skipped["status"] == "skipped" and skipped["reason"]


def test_all_vertices_option():
    rep = verify_scheme(c6_fusion(), VerifyOptions(chars=(2,), all_vertices=True))
    vi = rep["fields"][0]["vertex_invariance"]
    assert vi["status"] == "pass" and vi["vertices"] == 6 and vi["mismatched"] == []


def test_non_quasi_thin_is_skipped_with_closure_dimension():
    s = orbital_scheme([(1, 0, 2, 3), (1, 2, 3, 0)], name="S4")
    rep = verify_scheme(s, VerifyOptions(chars=(0, 2)))
    assert rep["verdict"] == "pass"
    for f in rep["fields"]:
        assert f["dimension"]["status"] == "skipped"
        assert f["dimension"]["oracle"] == 5 and f["dimension"]["formula"] is None
        assert f["radical"]["status"] == "skipped"
    assert rep["triply_regular"]["status"] == "skipped"


def test_invalid_scheme_report():
    from quasithin.scheme import parse_scheme
    rep = verify_scheme(parse_scheme(BROKEN))
    assert rep["verdict"] == "fail" and not rep["valid"] and rep["violations"]
    assert not report_passes(rep)


def test_bad_vertex_raises():
    with pytest.raises(ValueError):
        verify_scheme(c6_fusion(), VerifyOptions(vertex=6))


def test_json_round_trip_is_byte_identical():
    text = dumps(verify_scheme(CORPUS["F56_by_involution"], VerifyOptions(chars=(0, 2))))
    assert dumps(json.loads(text)) == text
    assert text.endswith("\n")


def test_csv_export():
    agg = {"reports": [verify_scheme(c6_fusion(), VerifyOptions(chars=(0, 2, 3)))]}
    rows = list(csv.DictReader(io.StringIO(to_csv(agg["reports"]))))
    assert len(rows) == 3
    assert list(rows[0]) == CSV_COLUMNS
    assert [r["radical_dim"] for r in rows] == ["0", "12", "0"]
    assert rows[1]["block_sizes"] == "2 2"


# batch ----------------------------------------------------------------------

def seven(tmp_path):
    for n in range(1, 7):
        write(tmp_path, f"Z{n}", cyclic(n))
    write(tmp_path, "C6_fusion", c6_fusion())
    return tmp_path


def test_batch_seven_schemes(tmp_path):
    agg = batch_verify(seven(tmp_path), VerifyOptions(chars=(0, 2, 3)))
    assert agg["summary"] == {"total": 7, "passed": 7, "failed": 0, "errors": 0}
    assert [r["scheme"] for r in agg["reports"]] == sorted(r["scheme"] for r in agg["reports"])


def test_batch_empty_dir(tmp_path, capsys):
    assert main(["batch", str(tmp_path)]) == EXIT_OK
    assert batch_verify(tmp_path)["summary"]["total"] == 0


def test_batch_corrupt_file(tmp_path):
    seven(tmp_path)
    (tmp_path / "corrupt.scheme").write_text("3 1\n0 1\n")
    agg = batch_verify(tmp_path, VerifyOptions(chars=(2,)))
    bad = [r for r in agg["reports"] if r["scheme"] == "corrupt"][0]
    assert bad["verdict"] == "error" and "SchemeFormatError" in bad["error"]
    assert agg["summary"] == {"total": 8, "passed": 7, "failed": 0, "errors": 1}
    rows = list(csv.DictReader(io.StringIO(to_csv(agg["reports"]))))
    assert any(r["scheme"] == "corrupt" and r["verdict"] == "error" for r in rows)


def test_batch_identical_across_job_counts(tmp_path):
    seven(tmp_path)
    write(tmp_path, "broken", BROKEN)
    one = dumps(batch_verify(tmp_path, VerifyOptions(chars=(0, 2)), jobs=1))
    eight = dumps(batch_verify(tmp_path, VerifyOptions(chars=(0, 2)), jobs=8))
    assert one == eight


# command line ---------------------------------------------------------------

def test_validate_exit_codes(tmp_path, capsys):
    good = write(tmp_path, "c6", c6_fusion())
    bad = write(tmp_path, "bad", BROKEN)
    assert main(["validate", str(good)]) == EXIT_OK
    assert main(["validate", str(bad)]) == EXIT_FAIL
    out = capsys.readouterr().out
    assert "INVALID" in out and "regularity" in out
    assert main(["validate", str(tmp_path / "missing.scheme")]) == EXIT_ERROR
    (tmp_path / "garbage.scheme").write_text("not a scheme\n")
    assert main(["validate", str(tmp_path / "garbage.scheme")]) == EXIT_ERROR


def test_headerless_import(tmp_path):
    p = tmp_path / "raw.txt"
    p.write_text("\n".join(" ".join(map(str, row)) for row in c6_fusion().rel.tolist()) + "\n")
    assert main(["validate", "--import", str(p)]) == EXIT_OK
    assert main(["validate", str(p)]) == EXIT_ERROR


def test_info(tmp_path, capsys):
    assert main(["info", str(write(tmp_path, "c6", c6_fusion()))]) == EXIT_OK
    assert "valencies: 1 1 2 2" in capsys.readouterr().out


def test_verify_command_writes_json(tmp_path, capsys):
    src = write(tmp_path, "c6", c6_fusion())
    out = tmp_path / "c6.json"
    assert main(["verify", str(src), "--char", "0", "2", "3", "--json", str(out)]) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["scheme"] == "c6" and [f["radical"]["dimension"] for f in rep["fields"]] == [0, 12, 0]
    assert out.read_text() == dumps(rep)
    assert "verdict=pass" in capsys.readouterr().out


def test_verify_usage_errors(tmp_path, capsys):
    src = write(tmp_path, "c6", c6_fusion())
    assert main(["verify", str(src), "--char", "4"]) == EXIT_ERROR
    assert main(["verify", str(src), "--vertex", "9"]) == EXIT_ERROR
    assert main(["verify", str(write(tmp_path, "bad", BROKEN))]) == EXIT_FAIL
    assert main(["frobnicate"]) == EXIT_ERROR
    assert main([]) == EXIT_ERROR
    assert main(["batch", str(src)]) == EXIT_ERROR  # not a directory
    assert main(["batch", str(tmp_path), "--jobs", "0"]) == EXIT_ERROR


def test_batch_command_outputs(tmp_path, capsys):
    d = tmp_path / "corpus"
    d.mkdir()
    seven(d)
    out, table = tmp_path / "agg.json", tmp_path / "agg.csv"
    assert main(["batch", str(d), "--char", "2", "--out", str(out), "--csv", str(table)]) == EXIT_OK
    agg = json.loads(out.read_text())
    assert agg["summary"]["passed"] == 7
    assert len(table.read_text().splitlines()) == 8
    assert "total=7 passed=7" in capsys.readouterr().out
    write(d, "broken", BROKEN)
    assert main(["batch", str(d), "--char", "2"]) == EXIT_FAIL


def test_module_entry_point(tmp_path):
    src = write(tmp_path, "z3", cyclic(3))
    r = subprocess.run([sys.executable, "-m", "quasithin", "verify", str(src), "--char", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert "verdict=pass" in r.stdout
