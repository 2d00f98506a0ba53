import json

import pytest

from bellcausal.cli import main
from bellcausal.faithfulness import and_gate_model, fine_tuned_abc_model, xor_superluminal_model
from bellcausal.modelio import save_model


@pytest.fixture
def models(tmp_path):
    paths = {}
    for name, build in (("and", and_gate_model), ("tuned", fine_tuned_abc_model), ("xor", xor_superluminal_model)):
        paths[name] = str(tmp_path / f"{name}.json")
        save_model(build(), paths[name])
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_case_list(capsys):
    code, out, _ = run(capsys, "case", "list")
    assert code == 0
    assert out.split()[0] == "pabc-two-models"


def test_case_run_writes_reports(capsys, tmp_path):
    code, out, _ = run(capsys, "case", "run", "smoking-nolatent", "--out", str(tmp_path))
    assert code == 0
    assert "result: pass" in out
    assert (tmp_path / "smoking-nolatent" / "report.txt").exists()


def test_failing_case_exits_one(capsys):
    code, out, _ = run(capsys, "case", "run", "bell-chsh-vs-epr")
    assert code == 1
    assert "result: fail" in out


def test_usage_errors_exit_two(capsys):
    assert run(capsys, "case", "run", "nope")[0] == 2
    assert run(capsys, "case", "run")[0] == 2
    assert run(capsys, "discover", "pattern")[0] == 2
    assert run(capsys, "model", "show", "/does/not/exist.json")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_model_commands(capsys, models):
    code, out, _ = run(capsys, "model", "joint", models["and"])
    assert code == 0 and out.strip() == "1/4[000] + 1/4[010] + 1/4[100] + 1/4[111]"
    code, out, _ = run(capsys, "model", "ci", models["tuned"])
    assert out.strip() == "(A ⊥ B)"
    code, out, _ = run(capsys, "model", "dot", models["and"])
    assert '"A" -> "C";' in out
    code, out, _ = run(capsys, "model", "show", models["and"], "--format", "json")
    assert json.loads(out)["edges"] == [["A", "C"], ["B", "C"]]


def test_discover_commands(capsys):
    code, out, _ = run(capsys, "discover", "nolatent", "--ci", "S ⊥ C | T", "--vars", "S,T,C")
    assert code == 0 and "faithful (3):" in out
    code, out, _ = run(capsys, "discover", "latent", "--ci", "S ⊥ C | T", "--vars", "S,T,C", "--order", "S<T")
    assert "structures (3):" in out
    code, out, _ = run(capsys, "discover", "pattern", "--ci", "S ⊥ T; A ⊥ T | S; B ⊥ S | T", "--vars", "S,T,A,B", "--format", "json")
    assert json.loads(out)["pattern"] == "{S o-> A, T o-> B, A <-> B}"
    assert run(capsys, "discover", "latent", "--ci", "S ⊥ C | T", "--order", "S-T")[0] == 2


def test_unfaithful_input_exits_one(capsys, models):
    code, out, _ = run(capsys, "discover", "pattern", "--model", models["xor"], "--observed", "S,T,A,B")
    assert code == 1
    assert "no faithful structure" in out


def test_faithfulness_commands(capsys, models):
    code, out, _ = run(capsys, "faithfulness", "classify", models["tuned"], "--trials", "20")
    assert code == 0 and "overall: unfaithful" in out
    code, out, _ = run(capsys, "faithfulness", "perturb", models["and"], "--statement", "A ⊥ B", "--trials", "10", "--format", "json")
    assert json.loads(out)[0]["survival"] == 1.0
    assert run(capsys, "faithfulness", "perturb", models["and"])[0] == 2


def test_bell_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "bell", "chsh", "--kind", "chsh", "--p", "0.5")
    assert code == 0 and out.strip() == "2.8284271247"
    code, out, _ = run(capsys, "bell", "tables", "--kind", "epr", "--out", str(tmp_path))
    assert "S=0 T=0: P(00)=0.5000000000" in out
    assert (tmp_path / "bell-tables.txt").read_text() == out
    assert run(capsys, "bell", "chsh", "--p", "2")[0] == 2
    assert run(capsys, "bell", "chsh", "--format", "dot")[0] == 2


def test_output_is_deterministic(capsys):
    first = run(capsys, "case", "run", "bell-icstar", "--format", "json")[1]
    assert first == run(capsys, "case", "run", "bell-icstar", "--format", "json")[1]


def test_settings_prior_flag(capsys):
    code, out, _ = run(capsys, "bell", "ci", "--kind", "epr", "--p", "0.4", "--settings-prior", "1/2,1/4,1/8,1/8")
    assert code == 0
    assert out.strip() == "(A ⊥ T | S), (B ⊥ S | T)"
    assert run(capsys, "bell", "ci", "--settings-prior", "1,2")[0] == 2
