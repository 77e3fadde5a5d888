import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from cheegerspec.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def fields(text):
    out = {}
    for line in text.splitlines():
        if " = " in line:
            key, val = line.split(" = ", 1)
            out[key.strip()] = val.strip()
    return out


class TestBound:
    def test_log2_horizon(self, capsys):
        code, out, _ = run(capsys, "bound", "--n", "2", "--delta", "1", "--h", "1", "--rule", "agol")
        assert code == 0
        assert float(fields(out)["T"]) == pytest.approx(math.log(2), abs=1e-12)

    def test_three_bounds_nondecreasing(self, capsys):
        code, out, _ = run(capsys, "bound", "--n", "2", "--delta", "1", "--h", "1", "--k", "1", "2", "3")
        assert code == 0
        bounds = [float(line.rsplit("=", 1)[1]) for line in out.splitlines() if line.startswith("bound ")]
        assert len(bounds) == 3
        assert bounds == sorted(bounds)

    @pytest.mark.parametrize("argv", [
        ["bound", "--n", "2"],
        ["bound", "--n", "2", "--h", "1", "--h-range", "0.1", "1", "3"],
        ["bound", "--n", "1", "--h", "1"],
        ["bound", "--n", "2", "--h", "-1"],
        ["bound", "--n", "2", "--h", "1", "--k", "0"],
    ])
    def test_invalid_config(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert "error" in err

    def test_solver_failure_exit_one(self, capsys):
        code, _, err = run(capsys, "bound", "--n", "2", "--h", "1e7")
        assert code == 1
        assert "solver failure" in err

    def test_config_file_and_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# sample\nn = 3\nh = 2.0\nrule = buser\n")
        code, out, _ = run(capsys, "bound", "--config", str(cfg))
        f = fields(out)
        assert code == 0 and f["n"] == "3" and f["h"] == "2.0" and f["rule"] == "buser"
        code, out, _ = run(capsys, "bound", "--config", str(cfg), "--h", "1.5", "--rule", "agol")
        f = fields(out)
        assert f["n"] == "3" and f["h"] == "1.5" and f["rule"] == "agol"

    def test_bad_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("colour = blue\n")
        assert run(capsys, "bound", "--h", "1", "--config", str(cfg))[0] == 2
        cfg.write_text("just words\n")
        assert run(capsys, "bound", "--h", "1", "--config", str(cfg))[0] == 2
        assert run(capsys, "bound", "--config", str(tmp_path / "missing.cfg"))[0] == 2


class TestSweep:
    def read(self, path):
        with open(path) as fh:
            lines = [line for line in fh if not line.startswith("#")]
        return list(csv.reader(lines))

    def test_agol_below_buser(self, capsys, tmp_path):
        out = tmp_path / "fig1.csv"
        code, _, _ = run(capsys, "sweep", "--n", "2", "--delta", "1", "--h-range", "0.2", "5", "16",
                         "--out", str(out))
        assert code == 0
        rows = self.read(out)
        idx = {name: i for i, name in enumerate(rows[0])}
        assert len(rows) == 17
        for r in rows[1:]:
            assert float(r[idx["lambda1_omega1"]]) < float(r[idx["buser"]])

    def test_dimension_ordering_at_h2(self, capsys, tmp_path):
        vals = []
        for n in range(2, 7):
            out = tmp_path / f"n{n}.csv"
            run(capsys, "sweep", "--n", str(n), "--h-range", "1", "2", "2", "--out", str(out))
            rows = self.read(out)
            vals.append(float(rows[-1][rows[0].index("lambda1_omega1")]))
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_omega2_curves_ordered(self, capsys, tmp_path):
        out = tmp_path / "fig3.csv"
        run(capsys, "sweep", "--h-range", "0.2", "5", "8", "--log", "--k", "1", "2", "3", "4",
            "--out", str(out))
        rows = self.read(out)
        cols = [rows[0].index(f"lambda{j}_omega2") for j in (1, 2, 3)]
        hs = [float(r[0]) for r in rows[1:]]
        assert hs == pytest.approx(list(np.geomspace(0.2, 5, 8)))
        for r in rows[1:]:
            v = [float(r[c]) for c in cols]
            assert v[0] < v[1] < v[2]

    def test_svg_data(self, capsys, tmp_path):
        out = tmp_path / "s.csv"
        code, _, _ = run(capsys, "sweep", "--h-range", "0.5", "2", "3", "--format", "svg-data",
                         "--out", str(out))
        assert code == 0
        curves = (tmp_path / "s.csv.curves").read_text().splitlines()
        assert curves[0].startswith("lambda1_omega1: ")
        assert len(curves[0].split(": ")[1].split()) == 3

    def test_stdout_and_determinism(self, capsys):
        argv = ["sweep", "--h-range", "0.5", "2", "4", "--k", "1", "2"]
        a = run(capsys, *argv)[1]
        b = run(capsys, *argv)[1]
        assert a == b and a.startswith("# cheegerspec")

    def test_partial_failure_warns(self, capsys):
        code, out, err = run(capsys, "sweep", "--h-range", "1", "1e7", "2")
        assert code == 0
        assert "warning" in err
        assert out.splitlines()[-1].split(",")[3] == "nan"

    def test_total_failure_exit_one(self, capsys):
        code, _, err = run(capsys, "sweep", "--h-range", "1e7", "2e7", "2")
        assert code == 1

    @pytest.mark.parametrize("argv", [
        ["sweep", "--h", "1"],
        ["sweep", "--h-range", "2", "1", "4"],
        ["sweep", "--h-range", "1", "2", "0"],
        ["sweep", "--h-range", "a", "2", "3"],
    ])
    def test_invalid_ranges(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2


class TestSpectrum:
    def test_ratio_column_trends_to_c_tilde(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--n", "2", "--h", "1", "--omega", "2",
                           "--k", "5", "10", "20")
        assert code == 0
        c = float(out.split("c_tilde = ")[1].split()[0])
        ratios = [float(line.split()[2]) for line in out.splitlines() if line.strip()[:1].isdigit()]
        gaps = [abs(r - c) for r in ratios]
        assert gaps == sorted(gaps, reverse=True)

    @pytest.mark.parametrize("omega", ["1", "2"])
    def test_dump(self, capsys, tmp_path, omega):
        path = tmp_path / "u.csv"
        code, _, _ = run(capsys, "spectrum", "--h", "0.8", "--omega", omega, "--k", "1", "2",
                         "--dump-eigenfunction", "3", "--out", str(path))
        assert code == 0
        text = path.read_text().splitlines()
        assert "# zeros = 2" in text
        data = np.loadtxt(path, delimiter=",", comments="#", skiprows=4)
        assert data[0, 1] == 0.0
        assert abs(data[-1, 2]) <= 1e-7

    def test_dump_to_stdout(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--h", "1", "--k", "1", "--dump-eigenfunction", "1")
        assert code == 0 and "tau,u,du" in out


class TestRiemannCheck:
    def test_pass(self, capsys):
        code, out, _ = run(capsys, "riemann-check", "--n", "2", "--delta", "1", "--h", "0.5")
        f = fields(out)
        assert code == 0
        assert float(f["tau_residual"]) < 1e-4 and float(f["z_residual"]) < 1e-4
        assert float(f["exponent sum"]) == pytest.approx(1.0, abs=1e-12)

    def test_n3_exponents(self, capsys):
        code, out, _ = run(capsys, "riemann-check", "--n", "3", "--h", "0.7")
        assert fields(out)["exponents at 1"] == "{0+0j, 1+0j}"

    def test_upsilon_one(self, capsys):
        code, _, err = run(capsys, "riemann-check", "--n", "2", "--h", "1")
        assert code == 1 and "ups = 1" in err
        code, out, _ = run(capsys, "riemann-check", "--n", "2", "--h", "1", "--tau-only")
        assert code == 0 and "z_residual" not in out

    def test_threshold(self, capsys):
        assert run(capsys, "riemann-check", "--h", "0.5", "--residual-tol", "1e-12")[0] == 1

    def test_requires_unit_delta(self, capsys):
        assert run(capsys, "riemann-check", "--h", "0.5", "--delta", "0")[0] == 2


class TestValidate:
    def test_default(self, capsys):
        code, out, _ = run(capsys, "validate")
        assert code == 0
        header = out.splitlines()[0].split()
        assert header == ["case", "k", "expected", "computed", "rel-error", "status"]

    def test_single_case(self, capsys):
        code, out, _ = run(capsys, "validate", "--case", "sphere2")
        rows = [line for line in out.splitlines()[1:] if not line.startswith("warning")]
        assert code == 0 and rows and all(r.startswith("sphere2") for r in rows)

    def test_tight_tolerance_fails(self, capsys):
        code, _, err = run(capsys, "validate", "--tol", "1e-15")
        assert code == 1 and "sphere2" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cheegerspec", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "cheegerspec" in res.stdout
