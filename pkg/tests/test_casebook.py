import json

import pytest

from bellcausal import casebook
from bellcausal.casebook import CASES, UnknownCase, render_ci, report, run_case
from bellcausal.independence import CISet

# the CHSH scan at p=0.4 picks up extra independences with the preset axes
KNOWN_RED = {"bell-chsh-vs-epr"}


def test_registry():
    assert list(CASES) == [
        "pabc-two-models",
        "markov-derivation",
        "smoking-nolatent",
        "smoking-icstar",
        "bell-nolatent",
        "bell-icstar",
        "bell-chsh-vs-epr",
        "superluminal-finetune",
        "superdeterminism-finetune",
        "retrocausal-finetune",
        "triangle-gap",
    ]


def test_unknown_case_lists_available():
    with pytest.raises(UnknownCase) as e:
        run_case("")
    assert "smoking-icstar" in str(e.value)


@pytest.mark.parametrize("name", [n for n in CASES if n not in KNOWN_RED])
def test_case_passes(name):
    result = run_case(name)
    assert result.checks
    assert result.passed, result.text()


def test_chsh_case_reports_its_failure():
    result = run_case("bell-chsh-vs-epr")
    failed = [c.name for c in result.checks if not c.ok]
    assert failed == ["chsh scan at p=0.4 equals the no-signalling closure"]
    assert "result: fail" in result.text()


def test_smoking_report_files(tmp_path):
    run_case("smoking-icstar", tmp_path)
    base = tmp_path / "smoking-icstar"
    dots = sorted(p.name for p in base.glob("*.dot"))
    assert dots == ["pattern.dot"] + sorted(f"structure-{k}.dot" for k in range(1, 10))
    assert "S -> T" not in (base / "pattern.dot").read_text()
    data = json.loads((base / "report.json").read_text())
    assert data["passed"] and len(data["data"]["structures"]) == 9


def test_reports_are_deterministic(tmp_path):
    for name in ("smoking-icstar", "bell-icstar", "triangle-gap"):
        run_case(name, tmp_path / "one")
        run_case(name, tmp_path / "two")
        for path in sorted((tmp_path / "one" / name).iterdir()):
            assert path.read_bytes() == (tmp_path / "two" / name / path.name).read_bytes()


def test_bell_report_names_absent_links():
    result = run_case("bell-icstar")
    assert result.data["absent_links"] == ["S-T", "S-B", "T-A"]
    assert "absent links: S-T, S-B, T-A" in result.text()


def test_empty_ci_renders():
    assert render_ci(CISet()) == "no independences"


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        report(casebook.case_smoking_nolatent(), blocker)
