import json
import pytest
from pathlib import Path
from unittest.mock import patch

# Add the parent directory to the path so we can import eisrank
import sys
sys.path.append(str(Path(__file__).parent.parent))

from typer.testing import CliRunner

from eisrank.cli.main import app, run
from eisrank.core.config import settings

runner = CliRunner()


def invoke_json(*args):
    result = runner.invoke(app, ["--format", "json", *args])
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_output_formats_setting():
    assert settings.OUTPUT_FORMATS == {"plain", "json", "csv"}


def test_bernoulli_plain():
    result = runner.invoke(app, ["bernoulli", "18"])
    assert result.exit_code == 0
    assert "43867/798" in result.stdout


def test_bernoulli_json_with_residue():
    payload = invoke_json("bernoulli", "9", "--chi", "-20", "--mod", "43867")
    assert payload["value"] == "-5444415378"
    assert payload["residue"] == 5726


def test_bernoulli_csv():
    result = runner.invoke(app, ["--format", "csv", "bernoulli", "12"])
    assert result.exit_code == 0
    assert result.stdout.splitlines() == ["n,chi,value", "12,1,-691/2730"]


def test_classnum_with_analytic_check():
    rows = invoke_json("classnum", "--analytic-check", "--", "-123", "-328")
    assert [(r["disc"], r["h"], r["analytic"]) for r in rows] == [(-123, 2, 2), (-328, 4, 4)]


def test_classnum_mismatch_exits_one():
    with patch("eisrank.cli.forms.analytic_class_number", return_value=99):
        result = runner.invoke(app, ["classnum", "--analytic-check", "--", "-23"])
    assert result.exit_code == 1


def test_eisenstein_and_cuspform():
    rows = invoke_json("eisenstein", "--k", "4", "--prec", "5")
    assert [r["a_n"] for r in rows] == ["1/240", "1", "9", "28", "73", "126"]
    rows = invoke_json("cuspform", "--k", "12", "--prec", "3", "--mod", "691")
    assert [r["a_n"] for r in rows] == ["0", "1", str(-24 % 691), "252"]


def test_heegner_json():
    report = invoke_json("heegner", "--curve", "19a1", "--psi", "41", "--K", "-8")
    assert report["verdict"] == "non-torsion-rank-1"
    assert (report["rank_EQ"], report["rank_EKQ"]) == (1, 0)


def test_descent_and_density():
    report = invoke_json("descent", "--curve", "19a1")
    assert report["verdict"] is True
    assert report["certification"] == "proven"
    bound = invoke_json("density-bound", "--curve", "19a1")
    assert bound["value"] == {"num": 19, "den": 640}
    bound = invoke_json("density-bound", "--split", "19", "--dl", "-7")
    assert bound["value"] == {"num": 19, "den": 10240}


def test_ramanujan_table_json():
    rows = invoke_json("ramanujan-table")
    assert [r["value"] for r in rows] == [583, 126, 583, 176]


def test_twist_scan_writes_report(tmp_path):
    out = tmp_path / "scan.json"
    result = runner.invoke(app, ["twist-scan", "--curve", "19a1", "--X", "200", "--branch", "real", "--out", str(out)])
    assert result.exit_code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert 41 in report["verified"]
    assert report["branch"] == "real"


def test_user_dataset(tmp_path):
    data = tmp_path / "curves.csv"
    data.write_text("my19,0,1,1,-9,-15,19\n", encoding="utf-8")
    result = runner.invoke(app, ["--format", "json", "--data", str(data), "descent", "--curve", "my19"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["source"] == "my19"


@pytest.mark.parametrize("argv,code", [
    (["tau-check", "--prec", "50"], 0),
    (["descent", "--curve", "11a1", "--bound", "50"], 1),
    (["heegner", "--curve", "nope", "--K", "-8"], 2),
    (["heegner", "--curve", "19a1", "--psi", "-7", "--K", "-8"], 1),
    (["heegner", "--curve", "19a1", "--psi", "-7", "--K", "-59"], 0),
    (["bernoulli", "3", "--chi", "-12"], 2),
    (["--format", "xml", "bernoulli", "2"], 2),
    (["no-such-command"], 2),
    (["bernoulli", "1", "--omega", "3"], 2),
])
def test_run_exit_codes(argv, code):
    assert run(argv) == code


def test_heegner_inconclusive_exits_one():
    result = runner.invoke(app, ["--format", "json", "heegner", "--curve", "19a1", "--psi", "-7", "--K", "-8"])
    assert result.exit_code == 1
    assert json.loads(result.stdout)["verdict"] == "inconclusive"


def test_series_precision_defaults_to_setting():
    with patch.object(settings, "DEFAULT_PREC", 7):
        rows = invoke_json("cuspform", "--k", "12")
        assert len(rows) == 8
        rows = invoke_json("eisenstein", "--k", "4")
        assert len(rows) == 8
