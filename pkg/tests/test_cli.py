import json
import os

import pytest

from semifree_tfd import cli
from semifree_tfd.io import fixtures_dir, generate_config


@pytest.fixture
def classified(monkeypatch, records):
    monkeypatch.setattr(cli, "classify_all", lambda config=None, log=None, cases=None: records)


CP3_FIXTURE = "dim 3\n0 0 0\n4 0 0\n0 4 0\n0 0 4\nxi: 1 1 0\nexpect: {}\n"


def test_classify_case_i_as_json(capsys):
    assert cli.main(["classify", "--case", "I", "--format", "json"]) == cli.EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert [r["case_id"] for r in payload["records"]] == ["I-1"]


def test_classify_markdown(classified, capsys):
    assert cli.main(["classify"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "IV-2-6" in out
    assert "3-30" in out


def test_unknown_format_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        cli.main(["classify", "--format", "xml"])
    assert exc.value.code == cli.EXIT_USAGE


def test_verify_example(classified, capsys):
    path = os.path.join(fixtures_dir(), "I-1_cp3.txt")
    assert cli.main(["verify-example", path]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "matched I-1" in out
    assert "balanced shift -2" in out


def test_verify_all_fixtures(classified, capsys):
    assert cli.main(["verify-example"]) == cli.EXIT_OK
    assert capsys.readouterr().out.count("matched") == 21


def test_verify_wrong_expectation(classified, tmp_path, capsys):
    path = tmp_path / "cp3.txt"
    path.write_text(CP3_FIXTURE.format("II-1.2"))
    assert cli.main(["verify-example", str(path)]) == cli.EXIT_MISMATCH
    assert "expected II-1.2" in capsys.readouterr().out


def test_verify_malformed_fixture(classified, tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text("dim 3\n0 0 0\n4 0 0\n")
    assert cli.main(["verify-example", str(path)]) == cli.EXIT_USAGE
    assert cli.main(["verify-example", str(tmp_path / "missing.txt")]) == cli.EXIT_USAGE


def test_check_suites(classified, capsys):
    assert cli.main(["check", "localization"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "localization: 13 profile solutions / 8 normalized" in out
    assert out.strip().endswith("ok")
    assert cli.main(["check", "toric"]) == cli.EXIT_OK
    assert "toric: 21/21 fixtures matched" in capsys.readouterr().out
    assert cli.main(["check", "splitting"]) == cli.EXIT_OK


def test_check_toric_with_failing_fixture(classified, tmp_path, capsys):
    (tmp_path / "cp3.txt").write_text(CP3_FIXTURE.format("III.1"))
    assert cli.main(["check", "toric", "--fixtures", str(tmp_path)]) == cli.EXIT_MISMATCH
    assert "1 failed invariants" in capsys.readouterr().out


def test_list_exceptional(capsys):
    assert cli.main(["list-exceptional", "--model", "P2", "--k", "2"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].endswith("3 exceptional classes")
    assert [line.strip() for line in lines[1:]] == ["E1", "E2", "u - E1 - E2"]
    assert cli.main(["list-exceptional", "--model", "P2", "--k", "9"]) == cli.EXIT_USAGE


def test_config_errors(tmp_path):
    assert cli.main(["--config", str(tmp_path / "missing"), "check", "lattice"]) == cli.EXIT_USAGE
    generate_config(str(tmp_path), coefficient_box=[3, 1])
    assert cli.main(["--config", str(tmp_path), "check", "lattice"]) == cli.EXIT_USAGE


def test_verify_report_without_match(classified, tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text('{"b_min": 0, "b_max": 0, "m": 0, "z0_areas": []}')
    assert cli.main(["verify-example", str(path)]) == cli.EXIT_MISMATCH
    assert "matches no fixed point data" in capsys.readouterr().out


def test_config_is_validated_once(tmp_path, capsys):
    generate_config(str(tmp_path), coefficient_box=[3, 1])
    assert cli.main(["--config", str(tmp_path), "check", "lattice"]) == cli.EXIT_USAGE
    assert capsys.readouterr().out.count("ACTION REQUIRED") == 1


def test_unreadable_config_is_a_usage_error(tmp_path):
    (tmp_path / "config.yml").write_text("coefficient_box: [-4, 6\nsplitting_slack: 3\n")
    assert cli.main(["--config", str(tmp_path), "check", "lattice"]) == cli.EXIT_USAGE
