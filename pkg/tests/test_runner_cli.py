import io
import json
import re
from importlib import resources

import pytest

from towerlab import config
from towerlab.cli import main
from towerlab.dsl import parse_script
from towerlab.runner import FAIL, PASS, SKIP, run_script

HEADER = "field K = GF(2)(x, y)\n"


def run_cli(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


@pytest.fixture
def script(tmp_path):
    def write(body, name="s.twr"):
        path = tmp_path / name
        path.write_text(body)
        return str(path)
    return write


def golden():
    root = resources.files("towerlab") / "golden"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".twr"))


@pytest.mark.parametrize("name", golden())
def test_golden_scripts_pass(name):
    text = (resources.files("towerlab") / "golden" / name).read_text()
    report = run_script(parse_script(text), title=name)
    assert report.exit_code() == 0, report.human()
    assert all(c.status == PASS for c in report.checks)


def test_run_exit_ok_and_json(script):
    path = script(HEADER + "subfield W = <x>\ntower T = tower(W, depth = 2)\nprint degrees(T)\n"
                  "assert dims(diffalg(T)) == [1, 2, 4]\n")
    code, text = run_cli(["run", path, "--json"])
    assert code == 0
    doc = json.loads(text)
    assert doc["exit_code"] == 0
    assert doc["output"][0] == {"line": 4, "expr": "degrees(T)", "value": [2, 2]}
    assert [c["status"] for c in doc["checks"]] == [PASS]


def test_false_assert_exits_one_with_witness(script):
    path = script(HEADER + "elem f = x + y\nassert f^2 == x^2\n")
    code, text = run_cli(["run", path, "--json"])
    assert code == 1
    (check,) = json.loads(text)["checks"]
    assert check["status"] == FAIL and check["witness"] is not None


def test_budget_exit_three(script):
    path = script(HEADER + "subfield W = <x>\ntower T = tower(W, depth = 4)\nprint degrees(T)\n")
    code, text = run_cli(["run", path, "--json", "--budget", "16"])
    assert code == 3
    assert json.loads(text)["checks"][-1]["status"] == SKIP


def test_budget_env_and_flag_precedence(script, monkeypatch):
    path = script(HEADER + "subfield W = <x>\ntower T = tower(W, depth = 4)\nprint degrees(T)\n")
    monkeypatch.setenv("TOWERLAB_BUDGET", "16")
    assert run_cli(["run", path])[0] == 3
    assert run_cli(["run", path, "--budget", "4096"])[0] == 0


def test_budget_below_field_size_is_usage_error(script):
    assert run_cli(["run", script(HEADER + "elem f = x\n"), "--budget", "2"])[0] == 2


def test_parse_error_exits_two(script, capsys):
    path = script(HEADER + "elem f = 1/(x+\n")
    code, _ = run_cli(["run", path])
    assert code == 2
    assert re.search(r"line 2, column \d+", capsys.readouterr().err)


def test_usage_errors():
    assert run_cli([])[0] == 2
    assert run_cli(["run", "/nonexistent/file.twr"])[0] == 2
    assert run_cli(["example", "nosuch"])[0] == 2
    assert run_cli(["example", "ekedahl", "--p", "4"])[0] == 2
    assert run_cli(["example", "ekedahl", "--A", "0,1"])[0] == 2


def _verdicts_human(text):
    return [m.group(1) for m in re.finditer(r"^\[(PASS|FAIL|SKIP)\]", text, re.M)]


@pytest.mark.parametrize("name", ["ekedahl", "transcendental", "ppower"])
def test_examples_human_json_parity(name):
    code_h, human = run_cli(["example", name])
    code_j, text = run_cli(["example", name, "--json"])
    doc = json.loads(text)
    assert code_h == code_j == 0
    assert _verdicts_human(human) == [c["status"] for c in doc["checks"]]


def test_nonintegrable_reports_probe():
    code, text = run_cli(["example", "nonintegrable", "--json"])
    doc = json.loads(text)
    probe = [o for o in doc["output"] if o["expr"].startswith("probe")]
    assert probe and probe[0]["value"]
    # the closed-form generators still match even though the probe finds integrals
    gens = [c for c in doc["checks"] if c["name"].startswith("level")]
    assert all(c["status"] == PASS for c in gens)
    assert code == 1


def _strip_times(doc):
    for c in doc["checks"]:
        c.pop("seconds")
    return doc


def test_verify_is_deterministic():
    code1, a = run_cli(["verify", "--json", "--seed", "11"])
    code2, b = run_cli(["verify", "--json", "--seed", "11"])
    assert code1 == code2
    assert _strip_times(json.loads(a)) == _strip_times(json.loads(b))
