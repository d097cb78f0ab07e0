import json
import subprocess
import sys

import pytest

from simcoal.cli import run_cli
from simcoal.lts import load_lts
from simcoal.orders import CheckReport


@pytest.fixture
def files(tmp_path):
    paths = {}

    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        paths[name] = str(path)

    write("a.aut", 'des (0, 1, 2)\n(0, "a", 1)\n')
    write("aplusb.aut", 'des (0, 2, 3)\n(0, "a", 1)\n(0, "b", 2)\n')
    write("p.term", "P = a.b.0 + a.c.0;\n")
    write("q.term", "Q = a.b.0;\n")
    write("part.json", json.dumps({"r": ["a"], "l": ["b"], "bi": ["c"]}))
    write("bad_part.json", json.dumps({"r": ["a"], "l": ["a"]}))
    write("broken.aut", 'des (0, 1, 1)\n(0, "a", 5)\n')
    paths["dir"] = tmp_path
    return paths


def test_check_conformance(files, capsys):
    code = run_cli(["check", "--semantics", "conformance", "--lhs", files["a.aut"], "--rhs", files["aplusb.aut"]])
    out = capsys.readouterr()
    assert code == 0
    assert out.out.strip() == "root ⊑ root: true"
    assert "alphabets unified" in out.err


def test_check_converse_fails(files, capsys):
    code = run_cli(["check", "--semantics", "conformance", "--lhs", files["aplusb.aut"], "--rhs", files["a.aut"]])
    assert code == 1
    assert capsys.readouterr().out.strip() == "root ⊑ root: false"


def test_check_strict_alphabet(files, capsys):
    code = run_cli(["check", "--lhs", files["a.aut"], "--rhs", files["aplusb.aut"], "--strict-alphabet"])
    assert code == 2
    assert "alphabets differ" in capsys.readouterr().err


def test_check_with_states_and_order(files, capsys):
    code = run_cli(["check", "--order", "compose(conf_empty,conf_nonempty)", "--mode", "generic",
                    "--lhs", files["p.term"], "--rhs", files["q.term"], "--state", "0", "--state", "0"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "root ⊑ root: true"
    code = run_cli(["check", "--semantics", "plain", "--lhs", files["q.term"], "--rhs", files["q.term"],
                    "--state", "1", "--state", "0"])
    assert code == 1
    assert capsys.readouterr().out.strip() == "b.0 ⊑ root: false"


def test_stability_witness(capsys):
    code = run_cli(["stability", "--law", "right-stable", "--order", "reverse", "--sizes", "1,2", "--alphabet", "1"])
    out = capsys.readouterr().out
    assert code == 1
    assert "right-stable: fail" in out
    assert "f: [0]" in out and "u: [[0]]" in out and "v: [[0, 1]]" in out


def test_stability_structured_round_trip(tmp_path):
    out = tmp_path / "report.json"
    code = run_cli(["stability", "--law", "right-stable", "--order", "reverse", "--sizes", "1,2",
                    "--format", "structured", "--out", str(out)])
    assert code == 1
    report = CheckReport.from_json(out.read_text())
    assert report.verdict == "fail"
    assert report.witness == {"carriers": [1, 2], "alphabet": 1, "f": [0], "u": [[0]], "v": [[0, 1]]}


@pytest.mark.parametrize("argv, expected", [
    (["--law", "left-stable", "--order", "reverse", "--sizes", "2,2"], 0),
    (["--law", "stable", "--order", "conformance", "--sizes", "2,2,2,2"], 0),
    (["--law", "interchange", "--order", "inclusion", "--sizes", "2,2"], 0),
    (["--law", "commute", "--order", "conf_empty", "--order", "conf_nonempty", "--sizes", "3"], 0),
    (["--law", "composition-stable", "--order", "conf_nonempty", "--order", "conf_empty", "--sizes", "2,2,2,2"], 0),
    (["--law", "composition-right", "--order", "reverse", "--order", "inclusion", "--sizes", "1,2"], 1),
    (["--law", "factored-lift", "--order", "conformance", "--order", "conf_nonempty", "--order", "conf_empty",
      "--sizes", "2,2"], 0),
    (["--law", "factored-lift", "--order", "conformance", "--order", "conf_empty", "--order", "conf_nonempty",
      "--sizes", "2,2"], 1),
    (["--law", "op-duality", "--order", "inclusion", "--sizes", "2,2,2,2"], 0),
    (["--law", "preorder", "--order", "conformance", "--sizes", "3"], 0),
    (["--law", "functorial", "--order", "conformance", "--sizes", "2,2"], 0),
])
def test_stability_laws(argv, expected, capsys):
    assert run_cli(["stability", *argv]) == expected


def test_stability_sampling(files, capsys):
    argv = ["stability", "--law", "stable", "--order", f"cc({files['part.json']})", "--sizes", "2,2,1,1",
            "--alphabet", "3", "--budget", "5000"]
    assert run_cli(argv) == 2
    assert "budget" in capsys.readouterr().err
    assert run_cli(argv + ["--seed", "4"]) == 0
    assert "sampled, seed 4" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["stability", "--law", "stable", "--order", "inclusion", "--sizes", "2,2"],
    ["stability", "--law", "commute", "--order", "inclusion", "--sizes", "2"],
    ["stability", "--law", "right-stable", "--order", "nonsense", "--sizes", "1,2"],
    ["stability", "--law", "right-stable", "--order", "inclusion", "--sizes", "1,x"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv, capsys):
    assert run_cli(argv) == 2


def test_oracle_cc(files, capsys):
    code = run_cli(["oracle", "--semantics", "cc", "--partition", files["part.json"],
                    "--lhs", files["p.term"], "--rhs", files["q.term"]])
    assert code == 0
    assert "agree" in capsys.readouterr().out


def test_oracle_order_expression(files, capsys):
    code = run_cli(["oracle", "--order", "compose(conf_nonempty,conf_empty)", "--lhs", files["a.aut"],
                    "--rhs", files["aplusb.aut"], "--format", "structured"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["agree"] and set(data["relations"]) == {"fast", "generic", "brute-force"}


def test_input_errors(files, capsys):
    assert run_cli(["check", "--lhs", files["broken.aut"], "--rhs", files["a.aut"]]) == 2
    assert "line 2" in capsys.readouterr().err
    assert run_cli(["check", "--lhs", "/nonexistent.aut", "--rhs", files["a.aut"]]) == 2
    assert run_cli(["check", "--semantics", "cc", "--partition", files["bad_part.json"],
                    "--lhs", files["p.term"], "--rhs", files["q.term"]]) == 2
    assert run_cli(["check", "--semantics", "cc", "--lhs", files["p.term"], "--rhs", files["q.term"]]) == 2
    assert run_cli(["check", "--semantics", "cc", "--partition", files["part.json"],
                    "--lhs", files["a.aut"], "--rhs", files["a.aut"]]) == 2
    assert run_cli(["check", "--lhs", files["a.aut"], "--rhs", files["a.aut"], "--state", "9"]) == 2


def test_preorder_outputs(files, capsys, tmp_path):
    code = run_cli(["preorder", "--semantics", "conformance", "--lhs", files["p.term"], "--rhs", files["q.term"]])
    assert code == 0
    text = capsys.readouterr().out
    assert text.startswith("conformance: ")
    out = tmp_path / "rel.json"
    run_cli(["preorder", "--semantics", "plain", "--lhs", files["q.term"], "--format", "structured", "--out", str(out)])
    data = json.loads(out.read_text())
    assert [0, 0] in data["pairs"] and len(data["rows"]) == 3


def test_exit_code_independent_of_format(files, capsys):
    base = ["check", "--semantics", "conformance", "--lhs", files["aplusb.aut"], "--rhs", files["a.aut"]]
    assert run_cli(base) == run_cli(base + ["--format", "structured"]) == 1


def test_convert(files):
    out = str(files["dir"] / "p.aut")
    assert run_cli(["convert", files["p.term"], out]) == 0
    assert load_lts(out).state_count == load_lts(files["p.term"]).state_count
    native = str(files["dir"] / "p.json")
    assert run_cli(["convert", out, native]) == 0
    assert load_lts(native) == load_lts(out)


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "simcoal", "check", "--semantics", "conformance",
                           "--lhs", files["a.aut"], "--rhs", files["aplusb.aut"]], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "root ⊑ root: true"
