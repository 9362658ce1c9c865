import csv
import io
import json
import os
import subprocess
import sys

import pytest
from click.testing import CliRunner

from bergman_lab.cli import main, render_csv


@pytest.fixture
def runner():
    return CliRunner()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_csv_rendering_rfc4180():
    text = render_csv(["a", "b"], [(0.1, 'x,"y"'), (1, True)])
    assert text == 'a,b\r\n0.10000000000000001,"x,""y"""\r\n1,true\r\n'


def test_lattice_csv(runner):
    res = runner.invoke(main, ["lattice", "--truncation", "0.9", "--samples", "2000"])
    assert res.exit_code == 0, res.output
    table = rows(res.stdout)
    assert table[0] == ["k", "re", "im", "abs", "covering_count"]
    assert table[1][:4] == ["0", "0", "0", "0"]
    assert all(int(r[4]) >= 1 for r in table[1:])
    assert "min_covering=" in res.stderr


def test_lattice_json_and_output_file(runner, tmp_path):
    out = tmp_path / "lat.json"
    res = runner.invoke(main, ["lattice", "--truncation", "0.9", "--samples", "500",
                               "--format", "json", "--output", str(out)])
    assert res.exit_code == 0
    doc = json.loads(out.read_text())
    assert list(doc) == ["report", "header", "rows"]
    assert doc["report"]["min_covering"] >= 1


def test_carleson_lebesgue(runner):
    res = runner.invoke(main, ["carleson", "--format", "json"])
    assert res.exit_code == 0, res.output
    doc = json.loads(res.stdout)
    assert doc["verdict"] == "carleson"
    assert doc["Q"]["averaging"]["value"] == pytest.approx(1.0)


def test_config_file_and_flag_override(runner, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"p": 2, "q": 1, "measure": {"variant": "lebesgue"}}))
    res = runner.invoke(main, ["carleson", "--config", str(cfg), "--format", "json"])
    doc = json.loads(res.stdout)
    assert doc["regime"] == "q<p"
    res = runner.invoke(main, ["carleson", "--config", str(cfg), "--q", "2", "--format", "json"])
    assert json.loads(res.stdout)["regime"] == "p<=q"


@pytest.mark.parametrize("args", [["carleson", "--p", "-1"], ["carleson", "--R", "1.5"],
                                  ["berezin", "--z", "z"], ["berezin", "--z", "2"],
                                  ["power", "--phi", "z +"], ["power", "--phi", "2*z"],
                                  ["carleson", "--measure", "density", "--density", "1 +"]])
def test_config_errors_exit_2(runner, args):
    res = runner.invoke(main, args)
    assert res.exit_code == 2
    assert "error" in res.stderr


def test_unknown_config_key_exit_2(runner, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"colour": 1}')
    assert runner.invoke(main, ["carleson", "--config", str(cfg)]).exit_code == 2


def test_numerical_failure_exit_4(runner):
    res = runner.invoke(main, ["berezin", "--measure", "density", "--density", "1/(u - 0.25)",
                               "--z", "0"])
    assert res.exit_code == 4


def test_strict_inconclusive_exit_3(runner, monkeypatch):
    import bergman_lab.carleson as carleson

    real = carleson.carleson_check

    def undecided(*args, **kwargs):
        rep = real(*args, **kwargs)
        return carleson.CarlesonReport(**{**rep.__dict__, "verdict": "inconclusive"})

    monkeypatch.setattr(carleson, "carleson_check", undecided)
    assert runner.invoke(main, ["carleson"]).exit_code == 0
    assert runner.invoke(main, ["carleson", "--strict"]).exit_code == 3


def test_berezin_and_averaging(runner):
    res = runner.invoke(main, ["berezin", "--z", "0.5", "--z", "0.3+0.4i"])
    table = rows(res.stdout)
    assert table[0] == ["re", "im", "abs", "value", "error"]
    assert float(table[2][1]) == pytest.approx(0.4)
    assert float(table[2][3]) == pytest.approx(1.0, abs=1e-8)
    res = runner.invoke(main, ["averaging", "--z", "0.99", "--R", "0.3"])
    assert float(rows(res.stdout)[1][3]) == pytest.approx(1.0, abs=1e-12)
    res = runner.invoke(main, ["averaging"])
    assert len(rows(res.stdout)) == 1 + 1 + 7 * 8


def test_vanishing(runner):
    res = runner.invoke(main, ["vanishing", "--measure", "lebesgue", "--support-radius", "0.5",
                               "--n-shells", "4", "--format", "json"])
    doc = json.loads(res.stdout)
    assert doc["vanishing"] is True
    assert doc["shells"][-1]["sup"] == 0


def test_power_growth(runner):
    res = runner.invoke(main, ["power", "--psi", "2", "--n-max", "3", "--strict"])
    assert res.exit_code == 0, res.output
    table = rows(res.stdout)
    assert table[0][:4] == ["n", "Q2", "Q2_error", "Q3"]
    assert float(table[3][3]) == pytest.approx(64.0)
    assert "not_power_bounded" in res.stderr


def test_selftest_fast(runner):
    res = runner.invoke(main, ["selftest", "fast"])
    assert res.exit_code == 0, res.output
    assert res.output.count("[PASS]") == 5


def test_help_documents_expressions(runner):
    res = runner.invoke(main, ["berezin", "--help"])
    assert "kernel(alpha; a)" in res.output
    for cmd in ("lattice", "carleson", "vanishing", "power", "berezin", "averaging", "selftest"):
        assert cmd in runner.invoke(main, ["--help"]).output


def test_python_fallback_selected_by_environment():
    env = dict(os.environ, BERGMAN_LAB_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "import bergman_lab; print(bergman_lab.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
