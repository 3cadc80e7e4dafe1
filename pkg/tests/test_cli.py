import json
import subprocess
import sys
from pathlib import Path

import pytest

from sepcheck.cli import main, parse_heap, parse_store, UsageError

from conftest import corpus_path

GOLDEN = Path(__file__).parent / "golden" / "abort_trace.txt"


def run_cli(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_run_abort_trace_matches_golden(capsys):
    status, out, _ = run_cli(capsys, "run", corpus_path("abort_demo.sl"), "--alloc-base", "10", "--trace")
    assert status == 1
    assert out == GOLDEN.read_text()


def test_run_json_trace(capsys):
    status, out, _ = run_cli(capsys, "run", corpus_path("abort_demo.sl"), "--alloc-base", "10", "--trace", "--json")
    d = json.loads(out)
    assert status == 1 and d["schema"] == "sepcheck.run/1"
    assert [t["heap"] for t in d["trace"]] == [{"10": 1, "11": 2}, {"10": 1, "11": 2}, {"10": 1}]
    assert d["outcome"]["kind"] == "abort" and d["outcome"]["address"] == 11


def test_run_final_state(capsys):
    status, out, _ = run_cli(capsys, "run", corpus_path("swap.sl"), "--store", "x=1,y=2,z=0")
    assert status == 0
    assert out.strip() == "store {x:2, y:1, z:1} heap {}"


def test_run_out_of_fuel(capsys, tmp_path):
    f = tmp_path / "spin.sl"
    f.write_text("vars i; {emp} while true invariant {emp} do i := i + 1 od {emp}")
    status, out, _ = run_cli(capsys, "run", str(f), "--fuel", "20")
    assert status == 3 and "out of fuel after 20 steps" in out


def test_check_reversal(capsys):
    status, out, _ = run_cli(capsys, "check", corpus_path("list_reverse.sl"))
    lines = out.strip().splitlines()
    assert status == 0
    assert lines[-1].startswith("all ") and lines[-1].endswith(" obligations proven")
    assert any("invariant-entry: proven" in l for l in lines)


def test_check_shared_variant_fails(capsys):
    status, out, _ = run_cli(capsys, "check", corpus_path("list_reverse_shared.sl"))
    assert status == 1
    assert "possible abort at [i + 1] := j" in out


def test_check_json_agrees_with_text(capsys):
    path = corpus_path("list_reverse_shared.sl")
    _, text, _ = run_cli(capsys, "check", path)
    status, out, _ = run_cli(capsys, "check", path, "--json")
    d = json.loads(out)
    assert status == 1 and d["schema"] == "sepcheck.check/1"
    verdicts = [l.split(": ")[1].split(" ")[0] for l in text.splitlines() if ": proven" in l or ": not_proven" in l or ": error" in l]
    assert verdicts == [o["verdict"] for o in d["obligations"]]
    assert text.strip().splitlines()[-1] == d["summary"]


def test_check_depth_limit(capsys, monkeypatch):
    status, out, _ = run_cli(capsys, "check", corpus_path("list_reverse.sl"), "--depth", "1")
    assert status == 3
    monkeypatch.setenv("SEPCHECK_DEPTH", "1")
    status, _, _ = run_cli(capsys, "check", corpus_path("list_reverse.sl"))
    assert status == 3


def test_sat(capsys):
    status, out, _ = run_cli(capsys, "sat", "x |-> 1 * x |-> 1", "--store", "x=10", "--heap", "10:1")
    assert (status, out.strip()) == (0, "false")
    status, out, _ = run_cli(capsys, "sat", "x |-> 1 * y |-> 2", "--store", "x=10,y=11", "--heap", "10:1,11:2")
    assert (status, out.strip()) == (0, "true")
    status, out, _ = run_cli(capsys, "sat", "exists v. x |-> v && v = 9", "--store", "x=1", "--heap", "1:9", "--domain", "0..2")
    assert (status, out.strip()) == (0, "true")  # the heap supplies the witness


def test_sat_unsupported(capsys):
    status, out, _ = run_cli(capsys, "sat", "true -* emp", "--store", "", "--heap", "")
    assert status == 3 and out.startswith("unsupported")


def test_entail(capsys):
    status, out, _ = run_cli(capsys, "entail", "x |-> 1 * y |-> 2 |- y |-> 2 * x |-> 1", "--trace")
    assert status == 0 and out.startswith("proven") and "[points-to]" in out
    status, out, _ = run_cli(capsys, "entail", "x |-> 1 |- x |-> 2")
    assert status == 1 and out.startswith("not proven")
    status, out, _ = run_cli(capsys, "entail", "emp |- emp", "--json")
    assert json.loads(out)["verdict"] == "proven"


def test_entail_depth_limit(capsys):
    status, _, _ = run_cli(
        capsys, "entail", "listrep(@a, x, nil) * listrep(@b, y, nil) |- listrep(@b, y, nil) * listrep(@a, x, nil)", "--depth", "1"
    )
    assert status == 3


def test_fuzz(capsys):
    status, out, _ = run_cli(capsys, "fuzz", corpus_path("swap.sl"), "--samples", "100", "--seed", "1")
    assert status == 0 and "0 failures" in out
    status, out, _ = run_cli(capsys, "fuzz", corpus_path("abort_demo.sl"), "--samples", "5", "--seed", "1", "--json")
    d = json.loads(out)
    assert status == 1 and d["seed"] == 1 and len(d["failures"]) == 5


def test_fuzz_replay_through_run(capsys):
    _, out, _ = run_cli(capsys, "fuzz", corpus_path("abort_demo.sl"), "--samples", "1", "--json")
    f = json.loads(out)["failures"][0]
    status, out, _ = run_cli(capsys, "run", corpus_path("abort_demo.sl"), "--store", f["store"], "--heap", f["heap"])
    assert status == 1 and out.strip() == f["detail"]


def test_fuzz_without_samples(capsys, tmp_path):
    f = tmp_path / "never.sl"
    f.write_text("vars x; {x |-> 1 * x |-> 1} skip {emp}")
    status, out, _ = run_cli(capsys, "fuzz", str(f), "--samples", "3")
    assert status == 3 and "no states" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["run", "x.sl", "--frob"],
        ["check"],
        ["sat", "x |->", "--store", "x=1"],
        ["sat", "emp", "--store", "x=one"],
        ["sat", "emp", "--heap", "0:1"],
        ["sat", "emp", "--domain", "3..1"],
        ["check", "/nonexistent/file.sl"],
        ["fuzz", "/nonexistent/file.sl"],
    ],
)
def test_usage_errors(capsys, argv):
    status, out, err = run_cli(capsys, *argv)
    assert status == 2
    assert err


def test_parse_error_in_file(capsys, tmp_path):
    f = tmp_path / "bad.sl"
    f.write_text("vars x;\n{emp}\nx := [y]\n{emp}")
    status, _, err = run_cli(capsys, "check", str(f))
    assert status == 2 and ":3:" in err


def test_unbound_variable_in_sat(capsys):
    status, _, err = run_cli(capsys, "sat", "z |-> 1", "--store", "x=1")
    assert status == 2 and "unbound" in err


def test_literals():
    assert parse_store("x=10, y=-1,@a=[1 2 3]") == {"x": 10, "y": -1, "@a": (1, 2, 3)}
    assert parse_store("@a=[]") == {"@a": ()}
    assert parse_heap("10:1,11:2") == {10: 1, 11: 2}
    assert parse_heap("") == {}
    with pytest.raises(UsageError):
        parse_store("@a=3")


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sepcheck.cli", "sat", "emp", "--store", "x=1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "true"
