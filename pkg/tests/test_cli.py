import json

import numpy as np
import pytest

from tvlam.cli import EXIT_IO, EXIT_NONCONVERGED, EXIT_OK, EXIT_USAGE, main, sweep_grid
from tvlam.diffops import div_pinv
from tvlam.formats import FormatError, read_csv, read_input, read_pgm, write_csv, write_pgm
from tvlam.lambdamax import lambda_bnd_2d
from tvlam.spectral import dft_forward, dft_inverse_real


@pytest.fixture
def signal_csv(tmp_path):
    p = tmp_path / "y.csv"
    p.write_text("1\n2\n3\n2\n")
    return p


def write_p2(path, img, maxval=255):
    h, w = img.shape
    rows = "\n".join(" ".join(str(int(v)) for v in r) for r in img)
    path.write_text(f"P2\n# test image\n{w} {h}\n{maxval}\n{rows}\n")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


# --- formats -----------------------------------------------------------------

def test_csv_round_trip(tmp_path, rng):
    y = rng.standard_normal(50) * 1e3
    write_csv(tmp_path / "a.csv", y)
    back = read_csv(tmp_path / "a.csv")
    np.testing.assert_allclose(back, y, rtol=1e-12)
    img = rng.standard_normal((3, 4))
    write_csv(tmp_path / "b.csv", img)
    np.testing.assert_array_equal(read_csv(tmp_path / "b.csv"), img)


def test_csv_errors_name_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1\n2\nabc\n")
    with pytest.raises(FormatError, match="line 3"):
        read_csv(p)
    p.write_text("1,2\n3\n")
    with pytest.raises(FormatError, match="line 2"):
        read_csv(p)
    p.write_text("")
    with pytest.raises(FormatError, match="no samples"):
        read_csv(p)


@pytest.mark.parametrize("maxval", [255, 4095, 65535])
def test_pgm_p5_round_trip(tmp_path, rng, maxval):
    img = rng.integers(0, maxval + 1, size=(5, 7)).astype(float)
    img[0, 0], img[-1, -1] = 0, maxval
    meta = write_pgm(tmp_path / "a.pgm", img, maxval=maxval)
    back = read_pgm(tmp_path / "a.pgm")
    np.testing.assert_array_equal(back, img)
    assert meta == {"offset": 0.0, "scale": 1.0, "maxval": maxval}


def test_pgm_p2_read(tmp_path):
    img = np.array([[0, 255, 10], [5, 6, 7]])
    write_p2(tmp_path / "a.pgm", img)
    np.testing.assert_array_equal(read_pgm(tmp_path / "a.pgm"), img)
    write_pgm(tmp_path / "b.pgm", img, binary=False)
    np.testing.assert_array_equal(read_pgm(tmp_path / "b.pgm"), img)


def test_pgm_errors(tmp_path):
    p = tmp_path / "x.pgm"
    p.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
    with pytest.raises(FormatError, match="byte 0"):
        read_pgm(p)
    p.write_bytes(b"P5\n4 4\n255\n\x00\x01")
    with pytest.raises(FormatError, match="truncated"):
        read_pgm(p)
    p.write_bytes(b"P2\n2 1\n255\n1 x\n")
    with pytest.raises(FormatError, match="bad sample"):
        read_pgm(p)
    with pytest.raises(FormatError):
        read_input(tmp_path / "missing.csv")


def test_pgm_rescaled_output(tmp_path, rng):
    img = rng.standard_normal((4, 6))
    meta = write_pgm(tmp_path / "s.pgm", img)
    pix = read_pgm(tmp_path / "s.pgm")
    assert pix.min() == 0 and pix.max() == 255
    np.testing.assert_allclose(meta["offset"] + meta["scale"] * pix, img, atol=meta["scale"])


# --- lambda ------------------------------------------------------------------

def test_lambda_1d(capsys, signal_csv):
    code, out = run(capsys, "lambda", signal_csv, "--no-timing")
    rep = json.loads(out.out)
    assert code == EXIT_OK
    assert rep["kind"] == "exact_1d" and rep["lambda"] == pytest.approx(0.5)


def test_lambda_constant_pgm(capsys, tmp_path):
    write_p2(tmp_path / "c.pgm", np.full((4, 5), 7))
    code, out = run(capsys, "lambda", tmp_path / "c.pgm", "--no-timing")
    assert code == EXIT_OK
    assert json.loads(out.out) == {"converged": True, "iterations": 0, "kind": "bound_2d",
                                   "lambda": 0.0, "residual": 0.0, "shape": [4, 5]}


def test_lambda_modes_ordered(capsys, tmp_path, rng):
    write_p2(tmp_path / "r.pgm", rng.integers(0, 256, (8, 8)))
    vals = {}
    for flag in ("", "--componentwise", "--exact"):
        code, out = run(capsys, *["lambda", tmp_path / "r.pgm", "--no-timing"] + ([flag] if flag else []))
        assert code == EXIT_OK
        vals[flag] = json.loads(out.out)
    assert vals["--exact"]["kind"] == "exact_2d"
    assert vals["--exact"]["lambda"] <= vals["--componentwise"]["lambda"] <= vals[""]["lambda"]


def test_lambda_deterministic(capsys, tmp_path, rng):
    write_p2(tmp_path / "r.pgm", rng.integers(0, 256, (6, 6)))
    first = run(capsys, "lambda", tmp_path / "r.pgm", "--exact", "--no-timing")[1].out
    second = run(capsys, "lambda", tmp_path / "r.pgm", "--exact", "--no-timing")[1].out
    assert first == second


def test_lambda_timing_and_config(capsys, tmp_path, rng):
    write_p2(tmp_path / "r.pgm", rng.integers(0, 256, (16, 16)))
    code, out = run(capsys, "lambda", tmp_path / "r.pgm")
    assert "wall_clock_s" in json.loads(out.out)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"max_iterations": 10, "check_every": 5}))
    code, out = run(capsys, "lambda", tmp_path / "r.pgm", "--exact", "--config", cfg)
    assert code == EXIT_NONCONVERGED
    assert json.loads(out.out)["converged"] is False
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "lambda", tmp_path / "r.pgm", "--exact", "--config", cfg)[0] == EXIT_USAGE


def test_io_and_usage_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1\nfoo\n")
    code, out = run(capsys, "lambda", bad)
    assert code == EXIT_IO and "line 2" in out.err
    assert run(capsys, "lambda", tmp_path / "none.csv")[0] == EXIT_IO
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


# --- denoise -----------------------------------------------------------------

def test_denoise_lambda_zero(capsys, tmp_path, signal_csv):
    out_path = tmp_path / "x.csv"
    code, _ = run(capsys, "denoise", signal_csv, "--lambda", 0, "-o", out_path, "--no-timing")
    assert code == EXIT_OK
    np.testing.assert_array_equal(read_csv(out_path), [1, 2, 3, 2])


def test_denoise_above_threshold(capsys, tmp_path, signal_csv):
    out_path = tmp_path / "x.csv"
    code, out = run(capsys, "denoise", signal_csv, "--lambda", 0.6, "-o", out_path, "--no-timing")
    assert code == EXIT_OK
    np.testing.assert_allclose(read_csv(out_path), 2.0, atol=1e-4)
    trace = json.loads(out.out)
    assert {"iterations", "final_change", "grad_inf_norm", "converged"} <= set(trace)


def test_denoise_lambda_rel_image(capsys, tmp_path, rng):
    img = rng.integers(0, 256, (12, 12))
    write_p2(tmp_path / "r.pgm", img)
    out_path = tmp_path / "x.csv"
    code, out = run(capsys, "denoise", tmp_path / "r.pgm", "--lambda-rel", 1.0, "-o", out_path)
    assert code == EXIT_OK
    x = read_csv(out_path)
    assert x.shape == (12, 12)
    assert json.loads(out.out)["grad_inf_norm"] <= 1e-6 * np.ptp(img)


def test_denoise_pgm_sidecar(capsys, tmp_path, rng):
    write_p2(tmp_path / "r.pgm", rng.integers(0, 256, (8, 8)))
    code, _ = run(capsys, "denoise", tmp_path / "r.pgm", "--lambda", 5, "-o", tmp_path / "x.pgm")
    assert code == EXIT_OK
    meta = json.loads((tmp_path / "x.json").read_text())
    assert set(meta) == {"offset", "scale", "maxval"}


def test_denoise_nonconverged_exit(capsys, tmp_path, rng):
    p = tmp_path / "y.csv"
    write_csv(p, rng.standard_normal(100))
    code, _ = run(capsys, "denoise", p, "--lambda", 1.0, "-o", tmp_path / "x.csv",
                  "--max-iterations", 3)
    assert code == EXIT_NONCONVERGED
    assert read_csv(tmp_path / "x.csv").shape == (100,)


# --- sweep -------------------------------------------------------------------

def test_sweep_grid():
    np.testing.assert_allclose(sweep_grid(2.0, "log", 1, 1.0), [2.0])
    g = sweep_grid(2.0, "log", 4, 0.5)
    assert g[-1] == pytest.approx(1.0) and g[0] == pytest.approx(1e-3)
    np.testing.assert_allclose(sweep_grid(1.0, "linear", 4, 1.0), [0.25, 0.5, 0.75, 1.0])


def test_sweep_single_point(capsys, tmp_path, rng):
    write_p2(tmp_path / "r.pgm", rng.integers(0, 256, (10, 10)))
    code, out = run(capsys, "sweep", tmp_path / "r.pgm", "--points", 1, "--max", 1)
    lines = out.out.splitlines()
    assert code == EXIT_OK
    assert lines[0] == "lambda,grad_inf_norm,deviation_from_mean,iterations"
    assert len(lines) == 2
    assert float(lines[1].split(",")[1]) <= 1e-6 * 255


def test_sweep_log_grid_decreasing(capsys, tmp_path, rng):
    write_p2(tmp_path / "r.pgm", rng.integers(0, 256, (12, 12)))
    out_csv = tmp_path / "s.csv"
    code, _ = run(capsys, "sweep", tmp_path / "r.pgm", "--points", 20, "-o", out_csv)
    assert code == EXIT_OK
    data = np.loadtxt(out_csv, delimiter=",", skiprows=1)
    assert data.shape == (20, 4)
    assert np.all(np.diff(data[:, 1]) <= 1e-6)


def test_sweep_empty_input(capsys, tmp_path):
    (tmp_path / "e.csv").write_text("\n")
    assert run(capsys, "sweep", tmp_path / "e.csv")[0] == EXIT_IO


# --- kernels -----------------------------------------------------------------

def test_kernels_1d(capsys, tmp_path):
    prefix = tmp_path / "k"
    code, _ = run(capsys, "kernels", "--shape", 256, "-o", prefix)
    assert code == EXIT_OK
    k = read_csv(tmp_path / "k_up.csv")
    assert abs(k.sum()) <= 1e-10
    second = k[2:] - 2 * k[1:-1] + k[:-2]
    # affine on the circle apart from the jump between the last and first sample
    assert np.abs(second).max() <= 1e-10
    assert abs(k[0] - k[-1]) > 0.5


def test_kernels_2d_reproduce_pinv(capsys, tmp_path, rng):
    prefix = tmp_path / "k"
    code, _ = run(capsys, "kernels", "--shape", "6x8", "-o", prefix, "--pgm")
    assert code == EXIT_OK
    y = rng.standard_normal((6, 8))
    Y = dft_forward(y)
    z = div_pinv(y)
    for i, name in enumerate(("up", "left")):
        k = read_csv(tmp_path / f"k_{name}.csv")
        conv = dft_inverse_real(dft_forward(k) * Y)
        np.testing.assert_allclose(conv, z[i], atol=1e-10)
        assert (tmp_path / f"k_{name}.pgm").exists()


def test_kernels_spectral(capsys, tmp_path):
    code, _ = run(capsys, "kernels", "--shape", 4, "-o", tmp_path / "k", "--spectral")
    rows = np.loadtxt(tmp_path / "k_up_spectral.csv", delimiter=",")
    # conj(K)/|K|^2 for K = 1 - exp(-2 pi i k / 4)
    np.testing.assert_allclose(rows[1], [0.5, -0.5], atol=1e-15)
    np.testing.assert_allclose(rows[0], [0, 0])
    assert run(capsys, "kernels", "--shape", "3x0")[0] == EXIT_USAGE


# --- project / pinv ----------------------------------------------------------

def test_project(capsys, tmp_path, signal_csv):
    code, out = run(capsys, "project", signal_csv, "-o", tmp_path / "p.csv")
    np.testing.assert_allclose(read_csv(tmp_path / "p.csv"), [-1, 0, 1, 0], atol=1e-12)
    meta = json.loads(out.out)
    assert meta["input_mean"] == 2.0 and abs(meta["output_mean"]) < 1e-10
    (tmp_path / "c.csv").write_text("5\n5\n5\n")
    run(capsys, "project", tmp_path / "c.csv", "-o", tmp_path / "q.csv")
    np.testing.assert_allclose(read_csv(tmp_path / "q.csv"), 0, atol=1e-14)


def test_project_mean_zero_image(capsys, tmp_path, rng):
    write_p2(tmp_path / "r.pgm", rng.integers(0, 256, (9, 7)))
    code, out = run(capsys, "project", tmp_path / "r.pgm", "-o", tmp_path / "p.csv")
    assert abs(read_csv(tmp_path / "p.csv").mean()) <= 1e-10


def test_pinv_export(capsys, tmp_path, rng):
    img = rng.integers(0, 256, (5, 5))
    write_p2(tmp_path / "r.pgm", img)
    code, out = run(capsys, "pinv", tmp_path / "r.pgm", "-o", tmp_path / "z")
    assert code == EXIT_OK
    assert json.loads(out.out)["half_range"] == pytest.approx(lambda_bnd_2d(img).lambda_value)
    assert read_csv(tmp_path / "z_left.csv").shape == (5, 5)
