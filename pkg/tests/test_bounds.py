import csv
import io
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from cheegerspec.bounds import (asymptotic_constant, bound_report, buser_curve, cheeger_lower,
                                csv_columns, curve_points, h_grid, lambda1_bound, lambdak_bound,
                                omega_problem, sweep, write_csv, write_curves, xi)
from cheegerspec.sturm import eigenvalues
from cheegerspec.weights import GeometryParams, build_weights

UNIT = GeometryParams(2, 1.0, 1.0, "agol")  # p = w1 = e^tau on [0, ln 2]


def lambda1_unit_oracle():
    # u = e^{-tau/2} sin(mu tau), lam = mu^2 + 1/4, Neumann at ln 2: tan(mu ln 2) = 2 mu
    T = math.log(2)
    mu = brentq(lambda m: math.tan(m * T) - 2 * m, 1e-3, math.pi / (2 * T) - 1e-9, xtol=1e-15)
    return mu * mu + 0.25


def c_tilde_unit_oracle():
    mpmath.mp.dps = 30
    val = mpmath.quad(lambda t: mpmath.sqrt(mpmath.re(2 * mpmath.exp(-t) - 1)), [0, mpmath.log(2)])
    return float(mpmath.re(mpmath.pi ** 2 / val ** 2))


class TestXi:
    @pytest.mark.parametrize("k,expected", [(1, 1), (2, 2), (3, 2), (4, 3), (6, 4), (7, 4)])
    def test_values(self, k, expected):
        assert xi(k) == expected

    @given(st.integers(1, 10_000))
    def test_ceiling_formula(self, k):
        assert xi(k) == math.ceil((k + 1) / 2)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            xi(0)


class TestProblems:
    def test_omega1_exponential(self):
        ws = build_weights(UNIT)
        prob = omega_problem(1, ws)
        tau = np.linspace(0, ws.T, 7)
        assert prob.T == pytest.approx(math.log(2), abs=1e-12)
        assert np.allclose(prob.p(tau), np.exp(tau), rtol=1e-14)
        assert np.allclose(prob.w(tau), np.exp(tau), rtol=1e-14)

    def test_omega2_weight(self):
        ws = build_weights(UNIT)
        prob = omega_problem(2, ws)
        tau = np.linspace(0, ws.T, 7)
        assert np.allclose(prob.w(tau), 2 - np.exp(tau), atol=1e-10)
        assert np.allclose(prob.model.weight(tau), 2 - np.exp(tau), atol=1e-10)
        assert prob.w(ws.T) <= 1e-10

    def test_bad_index(self):
        with pytest.raises(ValueError):
            omega_problem(3, build_weights(UNIT))


class TestBounds:
    def test_lambda1_transcendental_oracle(self):
        assert lambda1_bound(UNIT) == pytest.approx(lambda1_unit_oracle(), rel=1e-9)

    def test_xi_collision(self):
        assert lambdak_bound(UNIT, 2) == lambdak_bound(UNIT, 3)

    def test_nondecreasing_in_k(self):
        vals = [lambdak_bound(UNIT, k) for k in range(1, 9)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_curves(self):
        assert buser_curve(1.0, 2, 1.0) == 12.0
        assert buser_curve(0.5, 3, 0.0) == 2.5
        assert cheeger_lower(2.0) == 1.0
        assert cheeger_lower(1.0) == 0.25

    @given(h=st.floats(0.1, 10), n=st.integers(2, 5))
    def test_omega1_below_omega2(self, h, n):
        params = GeometryParams(n, 1.0, h)
        assert lambda1_bound(params) <= lambdak_bound(params, 1)

    @given(h=st.floats(0.1, 8), n=st.integers(2, 4), i=st.sampled_from([1, 2]))
    def test_spectrum_positive_and_simple(self, h, n, i):
        lams = eigenvalues(omega_problem(i, build_weights(GeometryParams(n, 1.0, h))), 5)
        assert lams[0] > 0
        assert all(a < b for a, b in zip(lams, lams[1:]))

    def test_increasing_in_h(self):
        vals = [lambda1_bound(GeometryParams(2, 1.0, h, "agol")) for h in h_grid(0.2, 5, 12)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_continuity_in_h(self):
        base = lambda1_bound(UNIT)
        gaps = [abs(lambda1_bound(GeometryParams(2, 1.0, 1.0 + eps, "agol")) - base)
                for eps in (1e-2, 1e-3, 1e-4)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-2

    def test_below_buser_and_above_cheeger(self):
        for h in h_grid(0.2, 5, 16):
            lam = lambda1_bound(GeometryParams(2, 1.0, h, "agol"))
            assert cheeger_lower(h) < lam < buser_curve(h, 2, 1.0)

    def test_rule_crossing(self):
        # delta = 1, n = 3: Agol is sharper below h = 6, Buser above
        for h, better in ((5.0, "agol"), (7.0, "buser")):
            vals = {r: lambda1_bound(GeometryParams(3, 1.0, h, r)) for r in ("agol", "buser")}
            assert min(vals, key=vals.get) == better
            assert lambda1_bound(GeometryParams(3, 1.0, h, "best")) == vals[better]


class TestAsymptotics:
    def test_c_tilde_oracle(self):
        assert asymptotic_constant(build_weights(UNIT)) == pytest.approx(c_tilde_unit_oracle(), rel=1e-8)

    @given(h=st.floats(0.1, 10), n=st.integers(2, 5))
    def test_positive(self, h, n):
        assert asymptotic_constant(build_weights(GeometryParams(n, 1.0, h))) > 0

    def test_ratio_trend(self):
        ws = build_weights(UNIT)
        c = asymptotic_constant(ws)
        lams = eigenvalues(omega_problem(2, ws), 20)
        gaps = [abs(lams[j - 1] / j ** 2 - c) for j in range(5, 21)]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 0.1 * c


class TestReport:
    def test_fields(self):
        rep = bound_report(UNIT, [1, 2, 3])
        assert rep.T == pytest.approx(math.log(2), abs=1e-12)
        assert [j for j, _ in rep.lambda_omega2] == [1, 2]
        assert [(k, j) for k, j, _ in rep.xi_map] == [(1, 1), (2, 2), (3, 2)]
        assert rep.lambda1_omega1 <= rep.lambda_omega2[0][1]
        assert rep.buser == 12.0 and rep.cheeger_lower == 0.25
        text = "\n".join(rep.lines())
        assert "T = 0.693147" in text


class TestSweep:
    def test_order_and_failure_rows(self):
        # h = 1e7 puts lam_1 near (pi h / 2)^2, above the eigenvalue scan ceiling
        reps = sweep(UNIT, [1e7, 1.0], [1])
        assert [r.params.h for r in reps] == [1e7, 1.0]
        assert "BracketError" in reps[0].error
        assert reps[0].error and math.isnan(reps[0].lambda1_omega1)
        assert reps[1].error is None and reps[1].lambda1_omega1 > 0

    def test_parallel_matches_serial(self):
        hs = h_grid(0.3, 3, 4)
        a = sweep(UNIT, hs, [1, 2], workers=1)
        b = sweep(UNIT, hs, [1, 2], workers=2)
        assert [r.lambda_omega2 for r in a] == [r.lambda_omega2 for r in b]

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            sweep(UNIT, [], [1])

    def test_grids(self):
        assert np.allclose(h_grid(0.1, 10, 3), [0.1, 1, 10])
        assert np.allclose(h_grid(1, 3, 3, log=False), [1, 2, 3])
        assert h_grid(1, 3, 1).tolist() == [1.0]
        with pytest.raises(ValueError):
            h_grid(3, 1, 4)

    def test_csv_round_trip(self):
        k_list = [1, 2, 3, 4]
        reps = sweep(UNIT, h_grid(0.2, 5, 6), k_list)
        buf = io.StringIO()
        write_csv(reps, buf, k_list, {"n": 2})
        rows = [r for r in csv.reader(line for line in buf.getvalue().splitlines()
                                      if not line.startswith("#"))]
        assert rows[0] == csv_columns(k_list)
        assert len(rows) == 1 + len(reps)
        assert all(len(r) == len(rows[0]) for r in rows)
        assert float(rows[1][0]) == reps[0].params.h
        assert float(rows[1][3]) == reps[0].lambda1_omega1

    def test_curves(self):
        reps = sweep(UNIT, h_grid(0.2, 5, 3), [1, 3])
        buf = io.StringIO()
        write_curves(reps, buf)
        lines = buf.getvalue().splitlines()
        names = [line.split(":")[0] for line in lines]
        assert names == list(curve_points(reps))
        assert all(len(line.split(": ")[1].split()) == 3 for line in lines)
