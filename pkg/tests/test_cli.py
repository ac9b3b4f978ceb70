"""Job files, the run/batch/replay subcommands and their exit codes."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from catschemes.cli import execute, main, run_batch, strip_timings
from catschemes.jobs import JobError, parse_job
from catschemes.serialize import dumps

JOBS = Path(__file__).resolve().parent.parent / "jobs"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_z6_affine_job(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", str(JOBS / "01_z6_ring_affine.yaml"), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["verdict"]["affine"] is True
    assert report["verdict"]["skipped_points"] == []
    assert report["result"]["checks"]["witness_is_iso"] is True
    assert "timings" in report


def test_z4_job_names_skipped_points(capsys):
    code, report, _ = execute(JOBS / "02_z4_group_affine.yaml")
    assert code == 0
    v = report["verdict"]
    assert v["affine"] is False and v["skipped_points"] == [[0], [1], [3]]
    assert v["script_O"] == "Z/2"
    elems = [row["point"]["element"] for row in report["result"]["skipped"]]
    assert elems == [[0], [1], [3]]


def test_strict_mode_exits_3(capsys):
    assert main(["run", str(JOBS / "02_z4_group_affine.yaml"), "--mode", "strict"]) == 3
    err = capsys.readouterr().err
    assert "NoLocalization" in err and "[[1]]" in err and "[[3]]" in err


def test_schema_error_names_field_and_line(tmp_path, capsys):
    p = write(tmp_path, "bad.yaml", "name: x\ncategory: {kind: FinFoo}\nobject: 3\nquery: affine\n")
    assert main(["run", str(p)]) == 2
    err = capsys.readouterr().err
    assert "bad.yaml:2" in err and "category.kind" in err and "FinFoo" in err


def test_missing_field_and_bad_reference(tmp_path, capsys):
    p = write(tmp_path, "a.yaml", "name: x\ncategory: {kind: FinAb}\nquery: affine\n")
    assert main(["run", str(p)]) == 2
    assert "object" in capsys.readouterr().err
    p = write(tmp_path, "b.yaml", "name: x\ncategory: {kind: FinAb}\nobject: [6]\n"
                                  "query: localize\nquery_params: {point: 9}\n")
    assert main(["run", str(p)]) == 2
    assert "point index 9 out of range" in capsys.readouterr().err


def test_bad_object_reference(tmp_path, capsys):
    p = write(tmp_path, "c.yaml", "name: x\ncategory: {kind: FinCRing}\nobject: F_6\nquery: affine\n")
    assert main(["run", str(p)]) == 2
    assert "object" in capsys.readouterr().err


def test_parse_job_reports_yaml_errors():
    with pytest.raises(JobError) as err:
        parse_job("name: [unclosed\n", "j.yaml")
    assert err.value.diagnostics[0].startswith("j.yaml:")


def test_negative_bound_rejected(capsys):
    assert main(["run", str(JOBS / "01_z6_ring_affine.yaml"), "--bound", "0"]) == 2


def test_localize_job_methods_agree():
    code, report, _ = execute(JOBS / "03_z6_group_localize.yaml")
    assert code == 0
    assert report["verdict"]["localized"] == "Z/2"
    assert report["verdict"].get("methods_agree", True) is True


def test_summary_format_drops_certificates():
    _, full, _ = execute(JOBS / "06_z6_ring_localize_f2.yaml")
    _, summary, _ = execute(JOBS / "06_z6_ring_localize_f2.yaml", fmt="summary")
    assert full["verdict"] == summary["verdict"]
    assert "certificate" in dumps(full) and "certificate" not in dumps(summary["result"])


def test_reports_are_deterministic():
    for name in ("01_z6_ring_affine.yaml", "07_z12_sheaf.yaml", "10_vect_global_associative.yaml"):
        a = execute(JOBS / name)[1]
        b = execute(JOBS / name)[1]
        assert dumps(strip_timings(a)) == dumps(strip_timings(b))


def test_replay_subcommand(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", str(JOBS / "11_ring_multi.yaml"), "--out", str(out)]) == 0
    assert main(["replay", str(out)]) == 0
    assert "0 failure(s)" in capsys.readouterr().out
    doc = json.loads(out.read_text())
    cert = next(c for c in _walk(doc) if isinstance(c, dict) and "tests" in c and "rho" in c)
    cert["tests"][0]["mediators"] = []
    out.write_text(json.dumps(doc))
    assert main(["replay", str(out)]) == 1


def _walk(x):
    if isinstance(x, dict):
        yield x
        for v in x.values():
            yield from _walk(v)
    elif isinstance(x, list):
        for v in x:
            yield from _walk(v)


def test_replay_unreadable_report(tmp_path):
    p = write(tmp_path, "r.json", "{not json")
    assert main(["replay", str(p)]) == 2


def test_batch_empty_directory(tmp_path, capsys):
    assert main(["batch", str(tmp_path)]) == 0
    assert "0 job(s), 0 error(s)" in capsys.readouterr().out


def test_batch_records_errors_and_continues(tmp_path, capsys):
    write(tmp_path, "a_bad.yaml", "name: x\ncategory: {kind: Nope}\nobject: 1\nquery: affine\n")
    write(tmp_path, "b_good.yaml", (JOBS / "01_z6_ring_affine.yaml").read_text())
    out = tmp_path / "out"
    assert main(["batch", str(tmp_path), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())["summary"]
    assert [r["status"] for r in summary] == ["ERROR", "OK"]
    assert summary[0]["exit"] == 2
    assert (out / "b_good.json").exists() and not (out / "a_bad.json").exists()


def test_batch_twenty_ring_jobs(tmp_path):
    rings = ["Z/2", "Z/3", "Z/4", "Z/5", "Z/6", "Z/7", "Z/8", "Z/9", "Z/10", "Z/12", "F_4", "F_8",
             "Z/2 x Z/2", "Z/2 x Z/3", "Z/14", "Z/15", "Z/18", "F_9", "Z/2 x F_4", "Z/20"]
    for i, r in enumerate(rings):
        write(tmp_path, f"j{i:02d}.yaml",
              f"name: r{i}\ncategory: {{kind: FinCRing}}\nobject: '{r}'\nquery: affine\n")
    rows = run_batch(tmp_path, fmt="summary")
    assert len(rows) == 20
    assert all(r["status"] == "OK" and r["verdict"]["affine"] for r in rows)
    again = run_batch(tmp_path, fmt="summary")
    assert json.dumps(rows, sort_keys=True) == json.dumps(again, sort_keys=True)


def test_batch_not_a_directory(tmp_path):
    assert main(["batch", str(tmp_path / "missing")]) == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "catschemes", "run",
                        str(JOBS / "05_set_localize.yaml"), "--format", "summary"],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0
    assert json.loads(r.stdout)["verdict"]["status"] == "found"


@pytest.mark.parametrize("job", sorted(p.name for p in JOBS.glob("*.yaml")))
def test_shipped_jobs_run_and_replay(job):
    from catschemes.replay import replay_report
    code, report, diags = execute(JOBS / job)
    assert code == 0, diags
    results = replay_report(json.loads(dumps(report)))
    assert results and all(r.ok for _, r in results)
