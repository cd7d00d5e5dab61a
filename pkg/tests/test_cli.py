import io
import json
import subprocess
import sys

import pytest

from bkcheck import cli


def run(*argv):
    buf = io.StringIO()
    code = cli.main(list(argv), out=buf)
    return code, [json.loads(x) for x in buf.getvalue().splitlines() if x.startswith("{")], buf.getvalue()


def summary(lines, typ=None):
    return next(x for x in lines if x["kind"] == "summary" and (typ is None or x["type"] == typ))


def test_roots_json_lines():
    code, lines, _ = run("roots", "--type", "B2")
    assert code == 0
    assert all(x["format_version"] == cli.FORMAT_VERSION and x["command"] == "roots" for x in lines)
    assert summary(lines)["positive_roots"] == 4


def test_type_list_and_max_rank():
    code, lines, _ = run("weyl", "--type", "A2,G2", "--type", "b2")
    assert code == 0
    assert [x["type"] for x in lines] == ["A2", "G2", "B2"]
    assert summary(lines, "G2")["order"] == 12
    assert cli.types_up_to(2) == ["A1", "A2", "B2", "G2"]


def test_verify_main_summary():
    code, lines, _ = run("verify", "main", "--type", "B2")
    s = summary(lines)
    assert code == 0 and s["all_c_eq_1"] and s["violations"] == 0 and s["triples"] > 0


def test_summary_format():
    code, _, text = run("verify", "main", "--type", "A2", "--format", "summary")
    assert code == 0 and text.startswith("A2") and "[ok]" in text


def test_irreducible_f4():
    code, lines, _ = run("irreducible", "--type", "F4", "--no-cache")
    s = summary(lines)
    assert code == 0 and s["count"] == 85 and s["counts"]["gamma+phi"] == 41


def test_mobius_selftest_default_seed():
    code, lines, _ = run("mobius-selftest", "--posets", "5")
    s = summary(lines)
    assert code == 0 and s["seed"] == 7 and s["ok"]


@pytest.mark.parametrize("argv", [
    ("roots", "--type", "H3"),
    ("roots",),
    ("verify", "main", "--type", "A2", "--jobs", "0"),
    ("verify", "nonsense", "--type", "A2"),
    ("roots", "--type", "A2", "--max-rank", "0"),
])
def test_bad_input_exit_2(argv):
    assert cli.main(list(argv), out=io.StringIO()) == 2


def test_large_group_needs_samples():
    assert cli.main(["verify", "main", "--type", "E6"], out=io.StringIO()) == 3


def test_sampled_large_group():
    code, lines, _ = run("verify", "main", "--type", "F4", "--samples", "20", "--seed", "3")
    s = summary(lines)
    assert code == 0 and s["sampled"] and s["triples"] == 20 and s["seed"] == 3


def test_violation_exit_4(monkeypatch):
    def bad(cfg, label):
        return cli.TypeReport(label, [{"kind": "violation"}], {"triples": 1}, violations=1)
    monkeypatch.setitem(cli.TASKS, "verify main", bad)
    assert cli.main(["verify", "main", "--type", "A2"], out=io.StringIO()) == 4


def test_unwritable_cache_exit_3(tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("")
    code = cli.main(["weyl", "--type", "A3", "--cache-dir", str(blocker / "c")], out=io.StringIO())
    assert code == 3


def test_jobs_deterministic():
    args = ("verify", "kernel", "--type", "B2,A3", "--samples", "2")
    a = run(*args)[2]
    b = run(*args, "--jobs", "2")[2]
    assert a == b


def test_cache_written(tmp_path):
    code, _, _ = run("verify", "main", "--type", "A3", "--cache-dir", str(tmp_path))
    assert code == 0
    assert (tmp_path / "weyl-A3.json").exists() and (tmp_path / "schubert-A3.json").exists()
    assert run("verify", "main", "--type", "A3", "--cache-dir", str(tmp_path))[0] == 0


@pytest.mark.parametrize("argv,name", [
    (("roots", "--max-rank", "3"), "roots.png"),
    (("weyl", "--type", "B3"), "weyl-B3.png"),
    (("verify", "faces", "--type", "A2,B2"), "verify-faces.png"),
    (("ramification", "--type", "B2", "--samples", "2"), "ramification.png"),
])
def test_figures(tmp_path, argv, name):
    code, _, _ = run(*argv, "--figures", str(tmp_path))
    assert code == 0
    png = tmp_path / name
    assert png.exists() and png.read_bytes()[:4] == b"\x89PNG"


def test_kernel_includes_worked_example():
    code, lines, _ = run("verify", "kernel", "--type", "D4", "--samples", "1")
    assert code == 0
    s = summary(lines)
    assert s["kernel_zero"] == 0 and s["kermi_failures"] == 0
    assert all(s["worked_instance"].values())


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "bkcheck.cli", "roots", "--type", "A1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and '"positive_roots": 1' in r.stdout
