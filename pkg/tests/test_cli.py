import csv
import json

import numpy as np
import pytest

from solibound.cli import main, parse_value, encode_value

POLE_P = "0.5806033860791031+0.36768578236282806j"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    rows = list(csv.reader(text.splitlines()))
    return rows[0], np.array(rows[1:], dtype=float)


def test_parse_and_encode():
    assert parse_value("i") == 1j and parse_value("-i") == -1j
    assert parse_value("0.5") == 0.5 and parse_value("1+2i") == 1 + 2j
    assert encode_value(2 + 0j) == 2.0
    assert parse_value(encode_value(1 + 2j)) == 1 + 2j


def test_kp_seed_header_rows_deterministic(capsys):
    argv = ["eval", "--model", "kp", "--example", "seed",
            "--grid", "x:-1:1:3", "--grid", "Y:-1:1:3", "--grid", "T:0.5:1.5:3"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    header, data = read_csv(out)
    assert ",".join(header) == "x,Y,T,u_re,u_im,w_re,w_im"
    assert data.shape == (27, 7) and np.all(np.isfinite(data))
    assert run(argv, capsys)[1] == out


def test_kp_dressed_has_tau(capsys):
    code, out, _ = run(["eval", "--model", "kp", "--example", "dressed",
                        "--grid", "x:-1:1:2", "--grid", "Y:0:1:2", "--grid", "T:1:2:2"], capsys)
    assert code == 0
    assert read_csv(out)[0][-2:] == ["tau_re", "tau_im"]


def test_json_output(capsys, tmp_path):
    path = tmp_path / "seed.json"
    code, _, _ = run(["eval", "--model", "kp", "--example", "seed", "--format", "json",
                      "--grid", "x:0:1:2", "--grid", "Y:0:0:1", "--grid", "T:1:1:1", "--out", str(path)],
                     capsys)
    recs = json.loads(path.read_text())
    assert code == 0 and len(recs) == 2 and set(recs[0]) == {"x", "Y", "T", "u_re", "u_im", "w_re", "w_im"}


def test_toda_ex3_regular(capsys):
    code, out, _ = run(["eval", "--model", "toda", "--example", "ex3",
                        "--grid", "X:-2:2:9", "--grid", "Y:-2:2:9", "--grid", "n:-3:3:7"], capsys)
    header, data = read_csv(out)
    assert code == 0 and header == ["X", "Y", "n", "u_re", "u_im"]
    assert data.shape == (9 * 9 * 7, 5) and np.all(np.isfinite(data))


def test_constructed_pole_exit_1(capsys, tmp_path):
    out = tmp_path / "pole.csv"
    code, _, _ = run(["eval", "--model", "kp", "--example", "dressed", "--param", "y0=0",
                      "--param", f"p={POLE_P}", "--grid", "x:-0.5:0.5:3", "--grid", "Y:0:0:1",
                      "--grid", "T:1:1:1", "--out", str(out)], capsys)
    assert code == 1
    side = json.loads((tmp_path / "pole.csv.poles.json").read_text())
    assert side["code"] == "solution-pole"
    assert side["coordinates"] == ["x", "Y", "T"]
    assert [p["point"] for p in side["poles"]] == [[0.0, 0.0, 1.0]]
    _, data = read_csv(out.read_text())
    assert np.isnan(data[1, 3]) and np.isfinite(data[0, 3])


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "nonsense"],
    ["eval", "--model", "kp", "--param", "alpha=2"],
    ["eval", "--model", "kp", "--param", "zeta=1"],
    ["eval", "--model", "toda", "--example", "ex9"],
    ["eval", "--model", "kp", "--grid", "x:1:0:3"],
    ["contour", "--model", "kp", "--param", "y0=0"],
])
def test_invalid_config_exit_2(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2 and err.startswith("error")


def test_invalid_param_names_invariant(capsys):
    _, _, err = run(["eval", "--model", "kp", "--param", "alpha=2"], capsys)
    assert "alpha" in err


def test_kp_contour_on_hyperbola(capsys):
    code, out, _ = run(["contour", "--model", "kp", "--example", "dressed"], capsys)
    header, data = read_csv(out)
    assert code == 0 and header == ["x", "t", "Y", "T", "residual_re", "residual_im"]
    Y, T = data[:, 2], data[:, 3]
    assert np.max(np.abs(Y * T - 1)) < 1e-14
    assert T.min() >= 0.5 - 1e-15 and T.max() <= 2 + 1e-15
    assert np.max(np.hypot(data[:, 4], data[:, 5])) < 1e-8


def test_toda_ex2_unit_circle(capsys):
    code, out, _ = run(["contour", "--model", "toda", "--example", "ex2", "--solution", "seed",
                        "--param", "D=1", "--grid", "y:-0.9:0.9:50"], capsys)
    header, data = read_csv(out)
    assert code == 0 and header[:4] == ["y", "n", "X", "Y"]
    assert np.max(np.abs(data[:, 2] ** 2 + data[:, 3] ** 2 - 1)) < 1e-14


@pytest.mark.parametrize("ex", ["ex1", "ex1c1", "ex2", "ex3"])
def test_toda_dressed_contour_residual(ex, capsys):
    code, out, _ = run(["contour", "--model", "toda", "--example", ex], capsys)
    _, data = read_csv(out)
    assert code == 0 and np.max(np.hypot(data[:, 4], data[:, 5])) < 1e-8


def test_verify_kp_seed_and_roundtrip(capsys, tmp_path):
    first = tmp_path / "a.json"
    code, _, err = run(["verify", "--suite", "kp-seed", "--model", "kp", "--param", "p=0.5",
                        "--out", str(first)], capsys)
    assert code == 0 and "PASS" in err
    report = json.loads(first.read_text())
    assert report["passed"] and report["config"]["params"]["y0"] == 1.0
    for chk in report["checks"]:
        assert {"name", "equation", "max_residual", "threshold", "convergence_order", "pass"} <= set(chk)
    second = tmp_path / "b.json"
    assert run(["verify", "--config", str(first), "--out", str(second)], capsys)[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_verify_negative_typos(capsys):
    code, out, _ = run(["verify", "--suite", "negative-typos"], capsys)
    report = json.loads(out)
    assert code == 0 and report["n_failed"] == 0
    assert all(c["kind"] == "negative" for c in report["checks"])


def test_verify_failure_exit_1(capsys):
    # off the desk parameters the dressed KP solution has a pole inside the grid
    code, out, _ = run(["verify", "--suite", "kp-dressed", "--model", "kp", "--param", "y0=0",
                        "--param", f"p={POLE_P}"], capsys)
    assert code == 1 and not json.loads(out)["passed"]
