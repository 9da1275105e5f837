import json
import subprocess
import sys

import pytest

from jetspencer import cli
from jetspencer.cases import REGISTRY, tags


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_unknown_case_exits_2(capsys):
    code, _, err = run(capsys, "no-such-case")
    assert code == 2
    assert "UnknownCase" in err


def test_run_case_unknown_raises():
    with pytest.raises(cli.UnknownCase):
        cli.run_case("no-such-case")


@pytest.mark.parametrize("argv", [
    [], ["--all", "mc-affine"], ["--tag", "lie", "mc-affine"], ["--tag", "bogus"],
    ["mc-affine", "--samples", "0"], ["mc-affine", "--jobs", "0"], ["--format", "xml", "mc-affine"]])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_passing_cases_exit_0(capsys):
    code, out, _ = run(capsys, "mc-affine", "macaulay-dims")
    assert code == 0
    assert out.splitlines()[-1] == "2 cases: 2 pass, 0 documented, 0 fail"


def test_failing_case_exits_1(capsys):
    code, out, _ = run(capsys, "nabla-curvature")
    assert code == 1
    assert out.startswith("FAIL  nabla-curvature")
    assert "witness:" in out


def test_documented_case_exits_0(capsys):
    code, out, _ = run(capsys, "divergence-projective", "--format", "json")
    assert code == 0
    (c,) = json.loads(out)["cases"]
    assert c["status"] == "discrepancy-documented" and c["note"]


def test_json_schema(capsys):
    code, out, _ = run(capsys, "--tag", "divergence", "--format", "json")
    doc = json.loads(out)
    assert set(doc) == {"cases", "summary"}
    assert len(doc["cases"]) >= 5
    for c in doc["cases"]:
        assert {"id", "status", "paper_ref", "millis"} <= set(c)
        assert c["status"] in ("pass", "fail", "discrepancy-documented")
        assert "divergence" in REGISTRY[c["id"]].tags
        assert c["millis"] == 0
    assert [c["id"] for c in doc["cases"]] == sorted(c["id"] for c in doc["cases"])
    s = doc["summary"]
    assert s["pass"] + s["fail"] + s["documented"] == len(doc["cases"])


def test_json_deterministic(capsys):
    outs = [run(capsys, "--tag", "lie", "--format", "json", "--seed", "3")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_seed_changes_witness(capsys):
    a = run(capsys, "nabla-curvature", "--format", "json", "--seed", "1")[1]
    b = run(capsys, "nabla-curvature", "--format", "json", "--seed", "2")[1]
    assert a != b


def test_timing_records_millis():
    r = cli.run_case("macaulay-dims", timing=True)
    assert r.millis >= 0
    assert cli.run_case("macaulay-dims").millis == 0


def test_macaulay_detail_table(capsys):
    _, out, _ = run(capsys, "macaulay-dims", "--format", "json")
    (c,) = json.loads(out)["cases"]
    assert c["status"] == "pass"
    assert c["detail"]


def test_list(capsys):
    code, out, _ = run(capsys, "--list")
    assert code == 0
    assert len(out.splitlines()) == len(REGISTRY)


def test_every_tag_selects_something():
    for t in tags():
        assert any(t in c.tags for c in REGISTRY.values())


def test_jobs_match_serial():
    ids = ["mc-affine", "structure-constants", "curvature-trace"]
    serial = cli.to_json(cli.run_all(ids=ids))
    parallel = cli.to_json(cli.run_all(ids=ids, jobs=2))
    assert serial == parallel


def test_console_entry_point():
    p = subprocess.run([sys.executable, "-m", "jetspencer.cli", "mc-affine"], capture_output=True, text=True)
    assert p.returncode == 0
    assert p.stdout.startswith("PASS  mc-affine")
