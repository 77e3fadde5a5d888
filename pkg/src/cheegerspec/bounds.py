"""Eigenvalue upper bounds lam_k(M) <= lam_xi(k)(omega_2(h)) and lam_1(M) <= lam_1(omega_1(h)).

``omega_problem`` assembles the two Sturm-Liouville problems from a
:class:`~cheegerspec.weights.WeightSystem`; ``bound_report`` evaluates one
(n, delta, h) point and ``sweep`` a grid of h values.
"""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import __version__
from .errors import CheegerSpecError
from .sturm import EIG_TOL, CoefficientModel, SLProblem, eigenvalue, eigenvalues
from .weights import GeometryParams, WeightSystem, build_weights, j_integral


def xi(k):
    if k < 1:
        raise ValueError("k must be >= 1")
    return (k + 2) // 2


def omega_problem(i, ws: WeightSystem) -> SLProblem:
    """omega_1: p = w = J_delta(., upsilon); omega_2: p = J_delta, w = w2."""
    prm = ws.params
    if i not in (1, 2):
        raise ValueError("omega index must be 1 or 2")
    model = CoefficientModel(
        curvature=-1 if prm.delta > 0 else 0,
        delta=prm.delta,
        upsilon=ws.upsilon,
        power=prm.n - 1,
        tail_h=prm.h if i == 2 else 0.0,
    )
    w = ws.w1 if i == 1 else ws.w2
    return SLProblem(T=ws.T, p=ws.p, w=w, label=f"omega{i}(h={prm.h:g})", model=model)


def lambda1_bound(params: GeometryParams, tol=EIG_TOL):
    return eigenvalue(omega_problem(1, build_weights(params)), 1, tol)


def lambdak_bound(params: GeometryParams, k, tol=EIG_TOL):
    return eigenvalue(omega_problem(2, build_weights(params)), xi(k), tol)


def buser_curve(h, n, delta):
    return 2 * delta * (n - 1) * h + 10 * h * h


def cheeger_lower(h):
    return (h / 2) ** 2


def asymptotic_constant(ws: WeightSystem):
    """pi^2 / (int_0^T sqrt(w2/p))^2, the limit of lam_j(omega_2)/j^2.

    Uses tau = T - sigma^2 so the sqrt(T - tau) behaviour of the integrand
    at T becomes smooth, and evaluates w2 as h*int_tau^T J (equal to
    1 - h*int_0^tau J by the choice of T, but free of cancellation near T).
    """
    prm = ws.params
    T = ws.T

    def integrand(sigma):
        tau = T - sigma * sigma
        w2 = prm.h * j_integral(tau, T, ws.upsilon, prm.n, prm.delta)
        return 2.0 * sigma * math.sqrt(max(w2, 0.0) / float(ws.p(tau)))

    val, _ = integrate.quad(integrand, 0.0, math.sqrt(T), epsabs=1e-12, epsrel=1e-9, limit=200)
    return math.pi ** 2 / val ** 2


@dataclass
class BoundReport:
    params: GeometryParams
    T: float = math.nan
    upsilon: float = math.nan
    lambda1_omega1: float = math.nan
    lambda_omega2: list = field(default_factory=list)  # [(j, lam_j(omega_2))]
    xi_map: list = field(default_factory=list)  # [(k, xi(k), bound)]
    buser: float = math.nan
    cheeger_lower: float = math.nan
    asymptotic_c: float = math.nan
    error: str | None = None

    def lines(self):
        p = self.params
        out = [
            f"n = {p.n}", f"delta = {p.delta!r}", f"h = {p.h!r}", f"rule = {p.rule.value}",
            f"upsilon = {self.upsilon!r}", f"T = {self.T!r}",
            f"lambda1_omega1 = {self.lambda1_omega1!r}",
        ]
        out += [f"lambda{j}_omega2 = {lam!r}" for j, lam in self.lambda_omega2]
        out += [f"bound lambda_{k}(M) <= lambda_{j}(omega2) = {b!r}" for k, j, b in self.xi_map]
        out += [f"buser = {self.buser!r}", f"cheeger_lower = {self.cheeger_lower!r}",
                f"c_tilde = {self.asymptotic_c!r}"]
        if self.error:
            out.append(f"error = {self.error}")
        return out


def bound_report(params: GeometryParams, k_list=(1,), tol=EIG_TOL) -> BoundReport:
    ws = build_weights(params)
    jmax = max(xi(k) for k in k_list)
    lam1 = eigenvalue(omega_problem(1, ws), 1, tol)
    lam2 = eigenvalues(omega_problem(2, ws), jmax, tol)
    return BoundReport(
        params=params,
        T=ws.T,
        upsilon=ws.upsilon,
        lambda1_omega1=lam1,
        lambda_omega2=[(j, lam2[j - 1]) for j in range(1, jmax + 1)],
        xi_map=[(k, xi(k), lam2[xi(k) - 1]) for k in k_list],
        buser=buser_curve(params.h, params.n, params.delta),
        cheeger_lower=cheeger_lower(params.h),
        asymptotic_c=asymptotic_constant(ws),
    )


def h_grid(h_min, h_max, count, log=True):
    if count < 1 or not 0 < h_min < h_max:
        raise ValueError("need count >= 1 and 0 < h_min < h_max")
    if count == 1:
        return np.array([h_min])
    return np.geomspace(h_min, h_max, count) if log else np.linspace(h_min, h_max, count)


DEFAULT_H_GRID = h_grid(0.1, 10.0, 64)


def _row(args):
    template, h, k_list, tol = args
    params = dataclasses.replace(template, h=float(h))
    try:
        return bound_report(params, k_list, tol)
    except (CheegerSpecError, ArithmeticError, ValueError) as exc:
        jmax = max(xi(k) for k in k_list)
        return BoundReport(
            params=params,
            lambda_omega2=[(j, math.nan) for j in range(1, jmax + 1)],
            xi_map=[(k, xi(k), math.nan) for k in k_list],
            buser=buser_curve(params.h, params.n, params.delta),
            cheeger_lower=cheeger_lower(params.h),
            error=f"{type(exc).__name__}: {exc}",
        )


def sweep(template: GeometryParams, h_values=DEFAULT_H_GRID, k_list=(1,), tol=EIG_TOL, workers=1):
    """One BoundReport per h, in input order; failed rows carry ``error``."""
    h_values = list(h_values)
    if not h_values or not k_list:
        raise ValueError("sweep needs at least one h and one k")
    jobs = [(template, h, tuple(k_list), tol) for h in h_values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_row, jobs))
    return [_row(job) for job in jobs]


def csv_columns(k_list):
    jmax = max(xi(k) for k in k_list)
    return (["h", "T", "upsilon", "lambda1_omega1"]
            + [f"lambda{j}_omega2" for j in range(1, jmax + 1)]
            + ["buser", "cheeger_lower", "c_tilde"])


def write_csv(reports, fh, k_list, meta=None):
    """Write reports as CSV with a '#' metadata preamble; full precision, no timestamps."""
    fh.write(f"# cheegerspec {__version__}\n")
    for key, val in (meta or {}).items():
        fh.write(f"# {key} = {val}\n")
    fh.write(",".join(csv_columns(k_list)) + "\n")
    for r in reports:
        vals = [r.params.h, r.T, r.upsilon, r.lambda1_omega1]
        vals += [lam for _, lam in r.lambda_omega2]
        vals += [r.buser, r.cheeger_lower, r.asymptotic_c]
        fh.write(",".join(_fmt(v) for v in vals) + "\n")


def _fmt(v):
    return "nan" if v != v else f"{v:.17e}"


def curve_points(reports):
    """Per-curve (h, value) lists for plotting."""
    curves = {"lambda1_omega1": [], "buser": [], "cheeger_lower": []}
    for r in reports:
        h = r.params.h
        curves["lambda1_omega1"].append((h, r.lambda1_omega1))
        for j, lam in r.lambda_omega2:
            curves.setdefault(f"lambda{j}_omega2", []).append((h, lam))
        curves["buser"].append((h, r.buser))
        curves["cheeger_lower"].append((h, r.cheeger_lower))
    return curves


def write_curves(reports, fh):
    """One line per curve: ``name: x1,y1 x2,y2 ...`` (SVG polyline point syntax)."""
    for name, pts in curve_points(reports).items():
        fh.write(name + ": " + " ".join(f"{x:.17e},{_fmt(y)}" for x, y in pts if y == y) + "\n")
