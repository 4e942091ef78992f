import json
import subprocess
import sys

import pytest

from lorentz_fourier.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_cxy_example_exit_zero(capsys):
    code, out, _ = run(["condition", "cxy", "--u", "t^0 on(0,1)", "--w", "t^0 on(0,1)", "--p", "1"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "finite" and rep["value"] == pytest.approx(1.0)


def test_lz_example_exit_two(capsys):
    code, out, _ = run(["condition", "lz", "--r", "1.5", "--s", "2", "--beta", "0.1",
                        "--p", "1.5", "--q", "1"], capsys)
    rep = json.loads(out)
    assert code == 2 and any("s=2 and beta<=0 violated" in r for r in rep["reasons"])


def test_verify_unbounded_example_exit_two():
    # the console entry point, end to end
    proc = subprocess.run([sys.executable, "-m", "lorentz_fourier.cli", "verify", "--p", "1", "--q", "2",
                           "--u", "t^0", "--w", "t^0 on(0,1)", "--suite", "adversarial"],
                          capture_output=True, text=True, timeout=600)
    assert proc.returncode == 2
    rep = json.loads(proc.stdout)
    assert rep["verdict"] == "unbounded" and rep["ceiling"] == "infinite"


def test_bad_weight_reports_position(capsys):
    code, _, err = run(["condition", "cxy", "--u", "2*t^1 on(0 1)", "--w", "t^0", "--p", "1"], capsys)
    assert code == 1 and "position 11" in err


def test_hypothesis_violation_is_usage_error(capsys):
    code, _, err = run(["condition", "cxy", "--u", "t^0", "--w", "t^0", "--p", "3"], capsys)
    assert code == 1 and "p <= 2" in err
    code, _, err = run(["testfun", "--z", "0.5"], capsys)
    assert code == 1 and "z >= 1" in err


def test_unknown_flag_and_missing_argument(capsys):
    assert run(["norm", "--bogus"], capsys)[0] == 1
    code, _, err = run(["condition", "cxy", "--w", "t^0", "--p", "1"], capsys)
    assert code == 1 and "--u" in err


def test_output_is_deterministic(tmp_path, capsys):
    argv = ["jt-check", "--random", "5", "--seed", "7", "--N", "2048", "--z-grid", "1,4,16"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(argv + ["--out", str(a)], capsys)[0] == 0
    assert run(argv + ["--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nu = t^0 on(0,1)\nw = t^0 on(0,1)\np = 1\n")
    code, out, _ = run(["condition", "cxy", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["params"]["p"] == 1.0
    code, out, _ = run(["condition", "cxy", "--config", str(cfg), "--p", "2"], capsys)
    assert json.loads(out)["params"]["p"] == 2.0
    cfg.write_text(json.dumps({"u": "t^0", "w": "t^0 on(0,1)", "p": "oops"}))
    assert run(["condition", "cxy", "--config", str(cfg)], capsys)[0] == 1


def test_threads_env(monkeypatch, tmp_path, capsys):
    argv = ["jt-check", "--random", "4", "--N", "1024", "--z-grid", "2,8"]
    single = tmp_path / "one.json"
    run(argv + ["--out", str(single)], capsys)
    monkeypatch.setenv("LORENTZ_THREADS", "3")
    multi = tmp_path / "three.json"
    assert run(argv + ["--out", str(multi)], capsys)[0] == 0
    assert single.read_bytes() == multi.read_bytes()
    monkeypatch.setenv("LORENTZ_THREADS", "zero")
    assert run(argv, capsys)[0] == 1


def test_csv_table_and_norm(tmp_path, capsys):
    csv_path = tmp_path / "level.csv"
    code, out, _ = run(["level", "--seq", "0,1,0,1", "--csv", str(csv_path)], capsys)
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "left,right,value" and len(lines) >= 2
    code, out, _ = run(["norm", "--kind", "lambda", "--w", "t^0", "--p", "1", "--seq", "1,0.5"], capsys)
    assert code == 0 and json.loads(out)["result"]["value"] == pytest.approx(1.5)


def test_testfun_certificate(capsys):
    code, out, _ = run(["testfun", "--z", "8", "--averaging", "4,16", "--N", "4096", "--y-max", "500"],
                       capsys)
    rep = json.loads(out)
    assert code == 0 and rep["certificate"]["passed"] and rep["params"]["length"] <= 1 / 8
