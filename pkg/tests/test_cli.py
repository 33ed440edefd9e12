import shutil
import subprocess

import pytest

from inghamlab.cli import OPTIONS, PIPELINES, main
from inghamlab.io import read_csv, read_report


def _body(path):
    return path.read_text().splitlines()[1:]


def test_list_names_every_pipeline(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert len(out.strip().splitlines()) == 11
    for name in PIPELINES:
        assert name in out


def test_help_documents_every_flag(capsys):
    assert main(["roundtrip", "--help"]) == 0
    text = capsys.readouterr().out
    for flag, _, _ in OPTIONS:
        assert flag in text
    assert "--config" in text


def test_roundtrip_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["roundtrip", "--outdir", str(a)]) == 0
    assert main(["roundtrip", "--outdir", str(b)]) == 0
    csvs = sorted(p.name for p in (a / "roundtrip").glob("*.csv"))
    assert csvs == ["roundtrip.csv", "spectrum.csv"]
    for name in csvs:
        assert _body(a / "roundtrip" / name) == _body(b / "roundtrip" / name)
        assert (a / "roundtrip" / name).read_text().startswith("# inghamlab ")
    rep = read_report(a / "roundtrip" / "report.txt")
    assert float(rep["roundtrip_l2_rel_error"]) < 1e-3


def test_audit_thm11_artifacts(tmp_path, capsys):
    assert main(["audit-thm11", "--outdir", str(tmp_path), "--lam-max", "60"]) == 0
    d = tmp_path / "audit-thm11"
    assert {p.name for p in d.iterdir()} >= {"lambda.csv", "carleman.csv", "report.txt"}
    rep = read_report(d / "report.txt")
    assert rep["theta_classification"] == "divergent"
    assert rep["carleman_verdict"] == "diverging"
    assert rep["obstruction_mechanism"] == "true"
    cols = read_csv(d / "carleman.csv")
    assert set(cols) == {"m", "log_norm", "term", "partial_sum"}


def test_malformed_theta_table_exits_2(tmp_path, capsys):
    p = tmp_path / "theta.csv"
    p.write_text("t,theta\n1,0.5\n2,0.4\nnot-a-number,0.3\n")
    code = main(["carleman", "--theta-table", str(p), "--outdir", str(tmp_path)])
    assert code == 2
    assert f"{p}:4" in capsys.readouterr().err


def test_missing_theta_table_exits_2(tmp_path, capsys):
    assert main(["carleman", "--theta-table", str(tmp_path / "nope.csv")]) == 2


def test_unknown_pipeline_exits_2(capsys):
    assert main(["bogus"]) == 2
    assert main(["run", "bogus"]) == 2


def test_bad_flag_value_exits_2(capsys):
    assert main(["roundtrip", "--N", "many"]) == 2
    assert main(["roundtrip", "--pair", "fourier"]) == 2


def test_domain_error_exits_3(tmp_path, capsys):
    assert main(["ingham-construct", "--theta", "inv-log", "--outdir", str(tmp_path)]) == 3
    assert "DomainError" in capsys.readouterr().err


def test_outdir_is_a_file_exits_4(tmp_path, capsys):
    f = tmp_path / "file"
    f.write_text("x")
    assert main(["carleman", "--outdir", str(f)]) == 4


def test_config_file_drives_run(tmp_path, capsys):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(f"pipeline = carleman\noutdir = {tmp_path}\n\n[decay]\ntheta = inv-sqrt\nm-max = 20\n")
    assert main(["run", "--config", str(cfg)]) == 0
    rep = read_report(tmp_path / "carleman" / "report.txt")
    assert rep["verdict"] == "converging"
    # the command line overrides the file
    assert main(["run", "--config", str(cfg), "--theta", "inv-log"]) == 0
    assert read_report(tmp_path / "carleman" / "report.txt")["verdict"] == "diverging"


def test_config_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("pipeline = carleman\ncolour = blue\n")
    assert main(["run", "--config", str(cfg)]) == 2
    cfg.write_text("N = lots\n")
    assert main(["run", "carleman", "--config", str(cfg)]) == 2
    assert main(["run", "--config", str(tmp_path / "absent.ini")]) == 2
    cfg.write_text("theta = inv-log\n")
    assert main(["run", "--config", str(cfg)]) == 2


@pytest.mark.skipif(shutil.which("inghamlab") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = subprocess.run(["inghamlab", "list"], capture_output=True, text=True)
    assert out.returncode == 0 and "audit-thm13" in out.stdout
