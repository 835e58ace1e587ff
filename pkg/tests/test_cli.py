import json
import subprocess
import sys

import numpy as np
import pytest

from restrictlab.cli import main
from restrictlab.grid import read_function_csv, read_subset


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_no_command_is_usage_error(capsys):
    code, _, err = run(capsys)
    assert code == 2 and "error[E_USAGE]" in err


def test_bad_option_is_usage_error(capsys):
    code, _, err = run(capsys, "gen", "--kind", "nope")
    assert code == 2 and "error[E_USAGE]" in err


def test_gen_is_deterministic_and_echoes_config(capsys):
    a = run(capsys, "gen", "--kind", "fbm", "--n", "257", "--seed", "3", "--hurst", "0.3")
    b = run(capsys, "gen", "--kind", "fbm", "--n", "257", "--seed", "3", "--hurst", "0.3")
    assert a[0] == 0 and a[1] == b[1]
    assert a[1].splitlines()[0] == "x,value" and len(a[1].splitlines()) == 258
    cfg = json.loads(a[2].split("config: ", 1)[1].splitlines()[0])
    assert cfg == {"command": "gen", "hurst": 0.3, "kind": "fbm", "n": 257, "seed": 3}


def test_gen_bad_parameters_is_config_error(capsys):
    code, _, err = run(capsys, "gen", "--kind", "fbm", "--n", "1000")
    assert code == 2 and "error[E_CONFIG]" in err
    code, _, err = run(capsys, "gen", "--kind", "sawtooth", "--M-prime", "5", "--M", "4", "--n", "17")
    assert code == 2 and "error[E_CONFIG]" in err


def test_gen_restrict_dim_pipeline(tmp_path, capsys):
    f = tmp_path / "f.csv"
    assert run(capsys, "gen", "--kind", "fbm", "--n", "4097", "--seed", "1", "--out", str(f))[0] == 0
    assert read_function_csv(f).meta.seed == 1
    A = tmp_path / "rec.txt"
    code, _, _ = run(capsys, "restrict", str(f), "--op", "record", "--out", str(A))
    assert code == 0
    rec = read_subset(A)
    assert rec.parent_n == 4097 and rec.indices[0] == 0
    code, out, _ = run(capsys, "dim", str(A), "--k", "3")
    assert code == 0 and out.startswith("ell,count\n")
    assert "estimate: " in out


@pytest.mark.parametrize("op", ["minorant", "majorant", "monotone-inc", "monotone-dec", "convex-to-monotone"])
def test_restrict_ops(tmp_path, capsys, op):
    f = tmp_path / "f.csv"
    run(capsys, "gen", "--kind", "integrated_fbm", "--n", "1025", "--seed", "2", "--hurst", "0.6", "--out", str(f))
    code, out, err = run(capsys, "restrict", str(f), "--op", op)
    assert code == 0
    assert out.startswith("# parent_n=1025\n")
    assert len(out.splitlines()) >= 2


def test_restrict_minorant_csv(tmp_path, capsys):
    f = tmp_path / "q.csv"
    run(capsys, "gen", "--kind", "quadratic", "--n", "33", "--out", str(f))
    code, out, err = run(capsys, "restrict", str(f), "--op", "minorant", "--csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,f,g,is_contact" and all(l.endswith(",1") for l in lines[1:])


def test_restrict_missing_file_and_bad_input(tmp_path, capsys):
    code, _, err = run(capsys, "restrict", str(tmp_path / "none.csv"), "--op", "record")
    assert code == 2 and "error[E_IO]" in err
    bad = tmp_path / "bad.csv"
    bad.write_text("x,value\n0,1\n0.7,2\n1,3\n")
    code, _, err = run(capsys, "restrict", str(bad), "--op", "record")
    assert code == 2 and "error[E_INPUT]" in err


def test_dim_on_cantor_level_eight(tmp_path, capsys):
    A = tmp_path / "c.txt"
    n = 2 * 3 ** 8 + 1
    assert run(capsys, "gen", "--kind", "cantor", "--level", "8", "--n", str(n), "--out", str(A))[0] == 0
    code, out, _ = run(capsys, "dim", str(A), "--k", "3")
    assert code == 0
    rows = out.splitlines()
    assert rows[1:9] == [f"{l},{2 ** l}" for l in range(1, 9)]
    est = json.loads(rows[-1].split("estimate: ", 1)[1])
    assert abs(est["upper_est"] - np.log(2) / np.log(3)) <= 0.02
    code, _, err = run(capsys, "dim", str(A), "--k", "3", "--ell-max", "12")
    assert code == 2 and "error[E_CONFIG]" in err


def test_dd_table_and_homogeneous(tmp_path, capsys):
    p = tmp_path / "pts.csv"
    p.write_text("x,y\n0,0\n1,1\n2,4\n3,9\n")
    code, out, _ = run(capsys, "dd", str(p))
    assert code == 0 and json.loads(out)["table"][2] == [1.0, 1.0]
    code, out, _ = run(capsys, "dd", str(p), "--homogeneous", "--order", "2")
    assert json.loads(out) == {"exact": True, "indices": [0, 1, 2, 3], "sign": "POS", "size": 4}
    p.write_text("a,b\n0,0\n1,1\n")
    code, _, err = run(capsys, "dd", str(p))
    assert code == 2 and "error[E_INPUT]" in err
    p.write_text("x,y\n1,0\n0,1\n")
    code, _, err = run(capsys, "dd", str(p))
    assert code == 2 and "error[E_INPUT]" in err


def test_exp_pass_fail_and_files(tmp_path, capsys):
    c = tmp_path / "c.json"
    c.write_text(json.dumps({"experiment_id": "DD_ORACLE", "params": {"trials": 20}}))
    out_dir = tmp_path / "out"
    code, out, err = run(capsys, "exp", str(c), "--out-dir", str(out_dir), "--seed", "9")
    assert code == 0 and out.startswith("PASS DD_ORACLE")
    assert (out_dir / "summary.txt").read_text().strip() == out.strip()
    assert (out_dir / "dd_oracle" / "report.json").exists()
    assert '"seed": 9' in err
    # an impossible threshold makes the verdict FAIL with exit code 1
    c.write_text(json.dumps({"experiment_id": "INTEGRATED_FBM_CONTACT_DIM",
                             "params": {"n_points": 1025, "trials": 2, "threshold": 1.0}}))
    code, out, _ = run(capsys, "exp", str(c), "--out-dir", str(out_dir))
    assert code == 1 and out.startswith("FAIL")


def test_exp_config_errors(tmp_path, capsys):
    c = tmp_path / "c.json"
    c.write_text(json.dumps({"experiment_id": "GAP_BOUND", "params": {"delta": 0}}))
    code, _, err = run(capsys, "exp", str(c))
    assert code == 2 and "error[E_CONFIG]" in err
    code, _, err = run(capsys, "exp", str(tmp_path / "missing.json"))
    assert code == 2 and "error[E_IO]" in err


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "restrictlab", "gen", "--kind", "quadratic", "--n", "5"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert r.stdout.splitlines()[-1] == "1.0,1.0"
    assert r.stderr.startswith("config: ")
