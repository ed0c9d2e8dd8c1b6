import json
import math
import subprocess
import sys

import numpy as np
import pytest

from triaxis.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main, parse_range


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse-level rejection
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    return np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding=None)


def test_parse_range():
    assert np.allclose(parse_range("0:1:3", "x"), [0, 0.5, 1])
    assert np.allclose(parse_range("2.5", "x"), [2.5])


def test_spectrum_fig_sweep(tmp_path, capsys):
    out, esq = tmp_path / "s.csv", tmp_path / "e.csv"
    code, _, err = run(["spectrum", "--j", "10", "--chi", "1", "--mu0", "1:2:201",
                        "--out", str(out), "--esqpt", str(esq)], capsys)
    assert code == EXIT_OK and "clustering region" in err
    d = read_csv(out)
    assert d.size == 201 * 21
    assert set(np.unique(d["parity"])) == {-1, 1}
    e = read_csv(esq)
    assert e.size == 201 and "min_normalized_gap" in e.dtype.names


def test_spectrum_deterministic_and_thread_independent(tmp_path, capsys):
    paths = []
    for i, extra in enumerate([[], [], ["--threads", "4"]]):
        p = tmp_path / f"s{i}.csv"
        run(["spectrum", "--two-j", "12", "--mu0", "0:2:9", "--out", str(p)] + extra, capsys)
        paths.append(p.read_bytes())
    assert paths[0] == paths[1] == paths[2]


def test_squeeze_oat_minimum(tmp_path, capsys):
    out = tmp_path / "q.csv"
    code, _, _ = run(["squeeze", "--mode", "oat", "--j", "2", "--mu", "0:3.14159:2000",
                      "--out", str(out)], capsys)
    assert code == EXIT_OK
    d = read_csv(out)
    assert np.nanmin(d["xi2"]) == pytest.approx(0.3025, abs=5e-4)


def test_squeeze_json(capsys):
    code, out, _ = run(["squeeze", "--mode", "tact", "--j", "1", "--nu", "0:1:3",
                        "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["columns"][0] == "nu" and len(doc["rows"]) == 3


def test_squeeze_triaxis_product(capsys):
    code, out, _ = run(["squeeze", "--mode", "triaxis", "--j", "1.5", "--mu0", "0:1:2",
                        "--mu1", "0.1:0.5:3", "--mu2", "0"], capsys)
    assert code == EXIT_OK and len(out.strip().splitlines()) == 1 + 6


def test_majorana_oat_mu0(capsys):
    code, out, _ = run(["majorana", "--kind", "oat", "--j", "2", "--mu", "0"], capsys)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["infinity_count"] == 0
    assert np.allclose(doc["roots"], [[1, 0]] * 4, atol=1e-6)
    assert np.allclose(doc["stars"], [[math.pi / 2, 0]] * 4, atol=1e-6)


def test_state_file_round_trip(tmp_path, capsys):
    sf = tmp_path / "psi.txt"
    assert main(["state", "--kind", "tact", "--j", "2", "--nu", "0.3", "--out", str(sf)]) == 0
    code, out, _ = run(["majorana", "--state-file", str(sf)], capsys)
    assert code == EXIT_OK and json.loads(out)["two_j"] == 4


def test_unnormalized_state_file(tmp_path, capsys):
    sf = tmp_path / "bad.txt"
    sf.write_text("two_j = 1\n1 0\n1 0\n")
    assert run(["majorana", "--state-file", str(sf)], capsys)[0] == EXIT_USAGE
    assert run(["majorana", "--state-file", str(sf), "--renormalize"], capsys)[0] == EXIT_OK


def test_husimi_grid(capsys):
    code, out, _ = run(["husimi", "--kind", "coherent", "--j", "1", "--theta0", "1",
                        "--n-theta", "4", "--n-phi", "6", "--cartesian"], capsys)
    lines = out.strip().splitlines()
    assert code == EXIT_OK and lines[0] == "theta,phi,Q,x,y,z" and len(lines) == 25


def test_husimi_exact_guard(capsys):
    code, _, _ = run(["husimi", "--j", "5", "--n-theta", "4", "--n-phi", "40", "--exact"],
                     capsys)
    assert code == EXIT_USAGE


def test_phase_and_survival(capsys):
    code, out, _ = run(["phase", "--chi0", "1.5", "--chi1", "1", "--theta0", "1.2",
                        "--steps", "100", "--dt", "0.01", "--stride", "10"], capsys)
    rows = out.strip().splitlines()
    assert code == EXIT_OK and rows[0] == "t,theta,phi,energy" and len(rows) == 12
    code, out, _ = run(["survival", "--kind", "coherent", "--j", "3", "--theta0", "1.5",
                        "--chi0", "1", "--chi1", "0.5", "--t", "0:2:5"], capsys)
    assert code == EXIT_OK and out.splitlines()[1] == "0,1"


@pytest.mark.parametrize("argv", [
    ["spectrum", "--j", "1.3", "--mu0", "1"],
    ["spectrum", "--j", "2"],
    ["spectrum", "--j", "2", "--mu0", "1:2:x"],
    ["spectrum", "--j", "2", "--chi", "-1", "--mu0", "1:2:3"],
    ["state", "--kind", "dicke", "--two-j", "2", "--m", "1/2"],
    ["phase", "--chi0", "1", "--theta0", "0"],
    ["squeeze", "--mode", "oat", "--j", "2", "--mu", "nan"],
    ["spectrum", "--j", "2", "--mu0", "1:2:2", "--out", "/nonexistent-dir/x.csv"],
])
def test_usage_errors(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == EXIT_USAGE and "error" in err and out == ""


def test_argparse_errors_exit_2():
    res = subprocess.run([sys.executable, "-m", "triaxis", "bogus"], capture_output=True)
    assert res.returncode == 2


def test_frame_fallback_reported(capsys):
    code, out, _ = run(["squeeze", "--mode", "oat", "--j", "1", "--mu", "3.141592653589793",
                        "--fallback-axis", "x"], capsys)
    assert code == EXIT_OK and out.strip().splitlines()[1].endswith("fallback")
    code, out, _ = run(["squeeze", "--mode", "oat", "--j", "1", "--mu", "3.141592653589793"],
                       capsys)
    assert code == EXIT_OK and out.strip().splitlines()[1].endswith("undefined")
