import json
import subprocess
import sys

import pytest

from causalcat.cli import COMMANDS, main, run

from cli_fixtures import command_lines, write_inputs


@pytest.fixture(scope="module")
def lines(tmp_path_factory):
    return command_lines(write_inputs(tmp_path_factory.mktemp("cli")))


def test_every_command_has_a_line(lines):
    assert set(lines) == set(COMMANDS)


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_command_ok(lines, name):
    code, report, text = run(lines[name])
    assert code == 0, report
    assert report["status"] == "ok" and report["command"] == name
    assert json.loads(text)["payload"] == report["payload"]


def test_reference_examples(lines):
    _, report, _ = run(lines["validate"])
    assert report["payload"]["valid"]
    _, report, _ = run(lines["crp"])
    assert (report["payload"]["hom_count"], report["payload"]["nat_count"]) == (1, 1)
    _, report, _ = run(lines["dsep"])
    assert report["payload"]["d_separated"] is False


def test_payload_values(lines):
    assert run(lines["ate"])[1]["payload"]["ate"] == 0.40625
    assert run(lines["confounded"])[1]["payload"]["confounded"] is True
    assert run(lines["presheaf"])[1]["payload"]["sizes"] == {"A": 1, "B": 1, "C": 1}
    assert run(lines["intervene"])[1]["payload"]["dag"]["edges"] == [["B", "C"]]
    assert run(lines["kan"])[1]["payload"]["sizes"] == {"A": 2, "B": 2}
    assert run(lines["nats"])[1]["payload"]["count"] == 1
    assert run(lines["sample"])[1]["payload"]["rows"] == 20


def test_envelope_keys(lines):
    _, report, text = run(lines["joint"])
    assert set(json.loads(text)) == {"command", "status", "payload", "ms"}


def test_violation_exit_one(tmp_path):
    bad = {
        "objects": ["A"],
        "morphisms": [{"name": "id_A", "dom": "A", "cod": "A"}, {"name": "e", "dom": "A", "cod": "A"}],
        "identities": {"A": "id_A"},
        "compose": [
            {"f": "id_A", "g": "id_A", "gf": "id_A"},
            {"f": "e", "g": "id_A", "gf": "id_A"},  # breaks the identity law
            {"f": "id_A", "g": "e", "gf": "e"},
            {"f": "e", "g": "e", "gf": "id_A"},
        ],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, report, _ = run(["validate", "-i", str(path)])
    assert code == 1 and report["status"] == "violation"


def test_usage_errors_exit_two(tmp_path, lines):
    code, report, _ = run(["validate", "-i", str(tmp_path / "missing.json")])
    assert code == 2 and report["status"] == "error" and "cannot read" in report["payload"]["error"]
    assert run([])[0] == 2
    assert run(["no-such-command"])[0] == 2
    assert run(["dsep", "-i", lines["dsep"][2]])[0] == 2
    assert run(["do", "-i", lines["do"][2], "--set", "X"])[0] == 2
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    code, report, _ = run(["joint", "-i", str(garbage)])
    assert code == 2 and "not valid JSON" in report["payload"]["error"]


def test_engine_error_is_structured(lines):
    code, report, _ = run(lines["dsep"][:3] + ["-x", "A", "-y", "Q"])
    assert code == 2 and report["payload"]["kind"] == "DagError"
    code, report, _ = run(lines["do"][:3] + ["--set", "X=7"])
    assert code == 2 and report["payload"]["kind"] == "ScmError"


def test_size_guard_exit_two(lines):
    code, report, _ = run(lines["crp"] + ["--max-objects", "2"])
    assert code == 2
    assert report["payload"]["guard"] == "max_objects" and report["payload"]["limit"] == 2
    code, report, _ = run(lines["kan"] + ["--max-set", "1"])
    assert code == 2 and report["payload"]["guard"] == "max_set"
    code, report, _ = run(lines["joint"] + ["--max-assignments", "4"])
    assert code == 2 and report["payload"]["guard"] == "max_assignments"


def test_text_format(lines):
    code, _, text = run(lines["ate"] + ["--format", "text"])
    assert code == 0 and text.startswith("ate: ok")
    assert "ate: 0.40625" in text


def test_determinism(lines):
    for argv in lines.values():
        a, b = run(argv)[1], run(argv)[1]
        a.pop("ms"), b.pop("ms")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_seed_changes_sample(lines):
    a = run(lines["sample"])[1]["payload"]["csv"]
    b = run(lines["sample"][:-1] + ["4"])[1]["payload"]["csv"]
    assert a != b


def test_sample_to_file_then_ht(tmp_path, lines):
    out = tmp_path / "s.csv"
    code, report, _ = run(["sample", "-i", lines["ate"][2], "-n", "300", "-o", str(out)])
    assert code == 0 and out.read_text().startswith("Z,X,Y")
    code, report, _ = run(["ht", "-i", str(out), "--treatment", "X", "--outcome", "Y", "--propensity", "0.5"])
    assert code == 0 and report["payload"]["rows"] == 300
    code, report, _ = run(["ht", "-i", str(out), "--treatment", "X", "--outcome", "Y", "--propensity", "1.0"])
    assert code == 2


def test_main_prints(capsys, lines):
    assert main(lines["dsep"]) == 0
    assert json.loads(capsys.readouterr().out)["payload"]["d_separated"] is False


def test_console_entry_point(lines):
    proc = subprocess.run(
        [sys.executable, "-m", "causalcat.cli", *lines["alexandroff"]],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"]["opens"][0] == []
