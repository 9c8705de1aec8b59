import csv
import subprocess
import sys

import numpy as np
import pytest

from oracles import dense, matpow
from pwlorbit.cli import main

LR_FLAGS = ["--dim", "2", "--left", "0.2,0", "--right", "-3,0", "--mu", "1"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def fields(out):
    return dict(line.split("=", 1) for line in out.splitlines())


class TestPower:
    def test_known_rows(self, capsys):
        code, out, _ = run(capsys, "power", "--dim", "2", "--rho", "2,1", "--n", "4")
        assert code == 0 and out == "5,4\n-4,-3\n"

    def test_first_power_echoes_matrix(self, capsys):
        _, out, _ = run(capsys, "power", "--dim", "3", "--rho", "0.5,1.4,0.7", "--n", "1")
        assert out == "0.5,1,0\n-1.3999999999999999,0,1\n0.69999999999999996,0,0\n"

    def test_methods_byte_identical_on_integers(self, capsys):
        outs = set()
        for method in ("gamma", "brute"):
            _, out, _ = run(capsys, "power", "--dim", "3", "--rho", "1,-2,1", "--n", "9", "--method", method)
            outs.add(out)
        assert len(outs) == 1
        got = np.array([[float(v) for v in ln.split(",")] for ln in outs.pop().splitlines()])
        np.testing.assert_array_equal(got, matpow(dense([1, -2, 1]), 9))

    def test_diag_method_round_trips_17_digits(self, capsys):
        _, out, _ = run(capsys, "power", "--dim", "2", "--rho", "1.5,0.5", "--n", "2", "--method", "diag")
        assert float(out.split(",")[0]) == pytest.approx(1.75, rel=1e-14)

    def test_diag_on_repeated_eigenvalue_fails_cleanly(self, capsys):
        code, out, err = run(capsys, "power", "--dim", "2", "--rho", "2,1", "--n", "4", "--method", "diag")
        assert code == 1 and out == "" and "DegenerateSpectrumError" in err

    def test_overflow(self, capsys):
        code, _, err = run(capsys, "power", "--dim", "2", "--rho", "1e300,0", "--n", "5")
        assert code == 1 and "error" in err

    @pytest.mark.parametrize("argv", [
        ["power", "--dim", "2", "--rho", "1", "--n", "3"],
        ["power", "--dim", "2", "--rho", "1,x", "--n", "3"],
        ["power", "--dim", "2", "--rho", "1,1"],
        ["power", "--dim", "2", "--rho", "1,1", "--n", "0"],
        ["power", "--dim", "2", "--rho", "1,1", "--n", "2", "--method", "lapack"],
        ["power", "--bogus"],
        ["frobnicate"],
        [],
    ])
    def test_bad_flags(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2 and err


class TestOrbit:
    def test_lr_example(self, capsys):
        code, out, _ = run(capsys, "orbit", *LR_FLAGS, "--word", "L1R1")
        f = fields(out)
        assert code == 0
        x0 = [float(v) for v in f["candidate"].split(",")]
        assert x0 == pytest.approx([0.75, 0], abs=1e-12)
        assert f["exists"] == "1" and f["stable"] == "1" and f["jury_stable"] == "1"
        assert float(f["trace"]) == pytest.approx(-0.6)
        assert float(f["det"]) == 0
        assert float(f["spectral_radius"]) == pytest.approx(0.6)
        assert len(f["points"].split(";")) == 2
        assert f["reason"] == ""

    def test_counterexample(self, capsys):
        code, out, _ = run(capsys, "orbit", "--dim", "2", "--left", "0,0", "--right", "0,0", "--word", "L1R1")
        assert code == 4 and fields(out)["reason"] == "wrong_partition(1)"

    def test_singular(self, capsys):
        code, out, _ = run(capsys, "orbit", "--dim", "2", "--left", "1,0", "--right", "1,0", "--word", "L1R1")
        assert code == 4 and fields(out)["reason"] == "singular_existence_matrix"

    def test_unstable(self, capsys):
        code, out, _ = run(capsys, "orbit", "--dim", "3", "--left", "1,1.4,0.7", "--right", "-2.5,1.4,0.7",
                           "--word", "L2R1")
        assert code == 3 and fields(out)["exists"] == "1" and fields(out)["stable"] == "0"

    def test_fixed_point_words(self, capsys):
        code, out, _ = run(capsys, "orbit", "--dim", "2", "--left", "0.1,0", "--right", "0.5,0", "--word", "R1")
        assert code == 0 and fields(out)["candidate"] == "2,0"

    @pytest.mark.parametrize("word", ["LR", "R1L1", "L2L1", "L0R1", "x"])
    def test_malformed_word(self, capsys, word):
        code, _, err = run(capsys, "orbit", *LR_FLAGS, "--word", word)
        assert code == 2 and err

    def test_dimension_mismatch(self, capsys):
        code, _, _ = run(capsys, "orbit", "--dim", "3", "--left", "0.2,0", "--right", "-3,0", "--word", "L1R1")
        assert code == 2


class TestConfig:
    def test_config_fills_and_flags_win(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# powering\ndim = 2\n--rho=2,1  # trailing comment\nn=3\nmethod=brute\n")
        code, out, _ = run(capsys, "power", "--config", str(cfg), "--n", "4")
        assert code == 0 and out == "5,4\n-4,-3\n"

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("dim=2\ncolour=blue\n")
        code, _, err = run(capsys, "power", "--config", str(cfg))
        assert code == 2 and "colour" in err

    def test_bad_choice_in_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("dim=2\nrho=1,1\nn=2\nmethod=lapack\n")
        assert run(capsys, "power", "--config", str(cfg))[0] == 2

    def test_malformed_line_and_missing_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("dim 2\n")
        assert run(capsys, "power", "--config", str(cfg))[0] == 2
        assert run(capsys, "power", "--config", str(tmp_path / "nope.cfg"))[0] == 2

    def test_scan_fix_from_config(self, capsys, tmp_path):
        cfg = tmp_path / "scan.cfg"
        cfg.write_text("dim=2\nx-param=tau_L\nx-range=0.1:0.2:2\ny-param=tau_R\ny-range=-3:-2.9:2\n"
                       "fix=delta_L=0;delta_R=0\nfamily=L1R1\nout=-\n")
        code, out, _ = run(capsys, "scan", "--config", str(cfg))
        assert code == 0 and len(out.splitlines()) == 5


class TestScan:
    def test_minimal_grid(self, capsys, tmp_path):
        dest = tmp_path / "s.csv"
        code, _, _ = run(capsys, "scan", "--dim", "2", "--x-param", "tau_L", "--x-range", "0:1:2",
                         "--y-param", "tau_R", "--y-range", "0:1:2", "--fix", "delta_L=0.5",
                         "--fix", "delta_R=0.5", "--family", "L1R1,L2R1", "--out", str(dest))
        rows = list(csv.reader(dest.open()))
        assert code == 0 and len(rows) == 5
        assert rows[0][4:] == ["L1R1_exists", "L1R1_stable", "L2R1_exists", "L2R1_stable"]

    def test_lr_region_stable(self, capsys):
        code, out, _ = run(capsys, "scan", "--dim", "2", "--x-param", "tau_L", "--x-range", "0.1:0.2:2",
                           "--y-param", "tau_R", "--y-range", "-3:-2.9:2", "--fix", "delta_L=0",
                           "--fix", "delta_R=0", "--family", "L1R1", "--out", "-")
        body = list(csv.reader(out.splitlines()))[1:]
        assert code == 0 and all(r[4:] == ["1", "1"] for r in body)

    def test_identical_flags_identical_bytes(self, tmp_path, capsys):
        argv = ["scan", "--dim", "3", "--x-param", "tau_L", "--x-range", "-3:3:5", "--y-param", "tau_R",
                "--y-range", "-3:3:5", "--fix", "sigma_L=1.4", "--fix", "sigma_R=1.4", "--fix", "delta_L=0.7",
                "--fix", "delta_R=0.7", "--family", "L1R1,L2R1,L3R1,L4R1"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, *argv, "--out", str(a))
        run(capsys, *argv, "--out", str(b), "--threads", "2")
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("bad", [
        ["--x-range", "0:1"], ["--x-range", "0:1:1"], ["--family", "LR"], ["--fix", "delta_L"],
        ["--fix", "gamma_L=1"],
    ])
    def test_bad_spec(self, capsys, bad):
        base = {"--dim": "2", "--x-param": "tau_L", "--x-range": "0:1:2", "--y-param": "tau_R",
                "--y-range": "0:1:2", "--family": "L1R1", "--out": "-"}
        argv = ["scan"]
        for k, v in base.items():
            if k not in bad:
                argv += [k, v]
        argv += bad
        if "--fix" not in bad:
            argv += ["--fix", "delta_L=0", "--fix", "delta_R=0"]
        assert run(capsys, *argv)[0] == 2

    def test_io_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "scan", "--dim", "2", "--x-param", "tau_L", "--x-range", "0:1:2",
                           "--y-param", "tau_R", "--y-range", "0:1:2", "--fix", "delta_L=0",
                           "--fix", "delta_R=0", "--family", "L1R1", "--out", str(tmp_path / "no" / "x.csv"))
        assert code == 1 and err


class TestBench:
    def test_small_sweep(self, capsys, tmp_path):
        dest = tmp_path / "b.csv"
        code, _, _ = run(capsys, "bench", "--mode", "dim", "--values", "3,5", "--fixed", "4",
                         "--batch", "3", "--repeats", "2", "--seed", "1", "--out", str(dest))
        rows = list(csv.reader(dest.open()))
        assert code == 0
        assert rows[0] == ["variable", "algorithm", "mean_seconds", "std_seconds", "checksum", "flags"]
        assert [(r[0], r[1]) for r in rows[1:]] == [
            ("3", "brute"), ("3", "diag"), ("3", "gamma"), ("5", "brute"), ("5", "diag"), ("5", "gamma")]

    def test_squaring_flag(self, capsys):
        code, out, _ = run(capsys, "bench", "--values", "3", "--fixed", "4", "--batch", "2",
                           "--repeats", "1", "--squaring", "--out", "-")
        assert code == 0 and "squaring" in out

    def test_bad_values(self, capsys):
        assert run(capsys, "bench", "--values", "0", "--out", "-")[0] == 2
        assert run(capsys, "bench", "--batch", "0", "--out", "-")[0] == 2
        assert run(capsys, "bench", "--values", "3")[0] == 2

    def test_io_error(self, capsys, tmp_path):
        code, _, _ = run(capsys, "bench", "--values", "3", "--batch", "1", "--repeats", "1",
                         "--out", str(tmp_path / "no" / "x.csv"))
        assert code == 1


@pytest.mark.parametrize("sub", ["power", "orbit", "scan", "bench"])
def test_help_on_every_subcommand(capsys, sub):
    code, out, _ = run(capsys, sub, "--help")
    assert code == 0 and "usage:" in out and "--config" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pwlorbit", "orbit", *LR_FLAGS, "--word", "L1R1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and "exists=1" in proc.stdout


def test_console_script():
    proc = subprocess.run(["pwl-orbits", "power", "--dim", "2", "--rho", "2,1", "--n", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "5,4\n-4,-3\n"
