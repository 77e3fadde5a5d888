"""First eigenfunction of omega_1 as a solution of a Riemann (Fuchsian) equation.

For delta = 1 and p = Jbar^2 with Jbar = (cosh + ups*sinh)^((n-1)/2), the
rescaling y = u*Jbar turns -(p u')' = lam p u into

    y'' = (Jbar''/Jbar - lam) y,

and z = e^(2 tau) (ups+1)/(ups-1) maps that onto

    y_zz + y_z/z - [q (z-1)^2 + r (z+1)^2] / (4 z^2 (z-1)^2) y = 0

with q = (n-1-2 lam)/2, r = (n-1)(n-3)/4, singular points 0, 1, infinity.
Residuals are measured with second-order finite differences.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SingularSubstitutionError
from .sturm import Eigenpair
from .weights import bar_j_derivatives

UPSILON_ONE_TOL = 1e-12


@dataclass(frozen=True)
class RiemannParams:
    q: float
    r: float
    s: float
    a: float
    b: float


@dataclass(frozen=True)
class ExponentData:
    singularities: tuple  # (0, 1, inf)
    at_zero: tuple
    at_one: tuple
    at_infinity: tuple

    def flat(self):
        return (*self.at_zero, *self.at_one, *self.at_infinity)

    def total(self):
        return sum(self.flat())


@dataclass
class TransformedSolution:
    lam: float
    upsilon: float
    n: int
    tau: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    dy: np.ndarray = field(repr=False)
    z: Optional[np.ndarray] = field(default=None, repr=False)
    tau_residual: float = math.nan
    left_defect: float = math.nan  # y(0)
    value_defect: float = math.nan  # y(T) - Jbar(T)
    slope_defect: float = math.nan  # y'(T) - Jbar'(T)


def riemann_params(n, lam, ups, T) -> RiemannParams:
    if abs(ups - 1.0) < UPSILON_ONE_TOL:
        raise SingularSubstitutionError(
            "z = e^(2 tau)(ups+1)/(ups-1) is undefined for ups = 1 (h = n-1 under Agol's rule); "
            "use the tau-side check instead")
    q = (n - 1 - 2 * lam) / 2
    r = (n - 1) * (n - 3) / 4
    a = (ups + 1) / (ups - 1)
    return RiemannParams(q=q, r=r, s=q + r, a=a, b=math.exp(2 * T) * a)


def local_exponents(params: RiemannParams) -> ExponentData:
    rs = cmath.sqrt(params.s) / 2
    d = math.sqrt(1 + 4 * params.r)
    return ExponentData(
        singularities=(0.0, 1.0, math.inf),
        at_zero=(-rs, rs),
        at_one=((1 - d) / 2, (1 + d) / 2),
        at_infinity=(-rs, rs),
    )


def indicial_roots(a1, a2, at_infinity=False):
    """Roots of X(X-1) + a1 X + a2 (finite point) or X(X+1) - a1 X + a2 (infinity)."""
    lin = (a1 - 1) if not at_infinity else (1 - a1)
    disc = cmath.sqrt(lin * lin - 4 * a2)
    return ((-lin - disc) / 2, (-lin + disc) / 2)


def general_q1_q2(a, b, exponents):
    """Coefficients of the Riemann equation with singularities a, b and infinity.

    ``exponents`` is (alpha, alpha', beta, beta', gamma, gamma'); alpha belongs
    to a, beta to b and gamma to infinity.
    """
    al, al2, be, be2, ga, ga2 = exponents
    if a == b:
        raise ValueError("singular points must be distinct")

    def q1(x):
        return (1 - al - al2) / (x - a) + (1 - be - be2) / (x - b)

    def q2(x):
        num = (al * al2 * (a - b) * (x - b) + be * be2 * (b - a) * (x - a)
               + ga * ga2 * (x - a) * (x - b))
        return num / ((x - a) ** 2 * (x - b) ** 2)

    return q1, q2


def rho1(z):
    return 1.0 / z


def rho2(z, params: RiemannParams):
    return -(params.q * (z - 1) ** 2 + params.r * (z + 1) ** 2) / (4 * z * z * (z - 1) ** 2)


def fuchsian_check(params: RiemannParams, *, rtol=1e-6):
    """Sample the limits that make 0, 1 and infinity regular singular points.

    Checks that (z-P) rho1 and (z-P)^2 rho2 settle at P in {0, 1}, that
    z rho1 and z^2 rho2 settle at infinity, and that rho2 has no poles
    away from 0 and 1.  Returns a dict of the sampled limits with ``ok``.
    """
    def settles(f, points):
        vals = np.array([f(x) for x in points])
        return vals[-1], bool(np.all(np.isfinite(vals)) and
                              abs(vals[-1] - vals[-2]) <= rtol * max(1.0, abs(vals[-1])))

    eps = 10.0 ** -np.arange(4, 10)
    big = 10.0 ** np.arange(4, 10)
    limits = {
        "a1_0": settles(lambda z: z * rho1(z), eps),
        "a2_0": settles(lambda z: z * z * rho2(z, params), eps),
        "a1_1": settles(lambda z: (z - 1) * rho1(z), 1 + eps),
        "a2_1": settles(lambda z: (z - 1) ** 2 * rho2(z, params), 1 + eps),
        "a1_inf": settles(lambda z: z * rho1(z), big),
        "a2_inf": settles(lambda z: z * z * rho2(z, params), big),
    }
    # away from 0 and 1 the rational function is bounded on compact sets
    probe = np.concatenate([np.linspace(-5, -0.1, 200), np.linspace(0.1, 0.9, 200),
                            np.linspace(1.1, 5, 200)])
    no_other_poles = bool(np.all(np.isfinite(rho2(probe, params))))
    ok = no_other_poles and all(flag for _, flag in limits.values())
    out = {k: v for k, (v, _) in limits.items()}
    out["ok"] = ok
    return out


def _second_diff_uniform(y, dx):
    return (y[2:] - 2 * y[1:-1] + y[:-2]) / (dx * dx)


def liouville_transform(pair: Eigenpair, h, n, *, upsilon=None) -> TransformedSolution:
    """y = u * Jbar for the first eigenpair of omega_1 (delta = 1), with u(T) = 1.

    ``pair.grid`` must be uniform.  ``z`` is left as None when ups = 1.
    """
    ups = h / (n - 1) if upsilon is None else upsilon
    tau = pair.grid
    scale = 1.0 / pair.u[-1]
    u = pair.u * scale
    du = pair.du * scale
    jb, djb, ddjb = bar_j_derivatives(tau, ups, n)
    y = u * jb
    dy = du * jb + u * djb
    dtau = tau[1] - tau[0]
    resid = _second_diff_uniform(y, dtau) - (ddjb[1:-1] / jb[1:-1] - pair.lam) * y[1:-1]
    sol = TransformedSolution(
        lam=pair.lam, upsilon=ups, n=n, tau=tau, y=y, dy=dy,
        tau_residual=float(np.max(np.abs(resid)) / np.max(np.abs(y))),
        left_defect=float(y[0]),
        value_defect=float(y[-1] - jb[-1]),
        slope_defect=float(dy[-1] - djb[-1]),
    )
    if abs(ups - 1.0) >= UPSILON_ONE_TOL:
        sol.z = np.exp(2 * tau) * (ups + 1) / (ups - 1)
    return sol


def verify_riem2(sol: TransformedSolution, params: RiemannParams):
    """Max |y'' + y'/z + rho2 y| / max|y| over interior z-grid points.

    Derivatives use the three-point stencils for a nonuniform grid.
    """
    if sol.z is None:
        raise SingularSubstitutionError("solution has no z-image (ups = 1)")
    z, y = sol.z, sol.y
    if np.any((z == 0) | (z == 1)):
        raise ValueError("z grid must avoid the singular points 0 and 1")
    h0 = z[1:-1] - z[:-2]
    h1 = z[2:] - z[1:-1]
    d1 = (-h1 / (h0 * (h0 + h1)) * y[:-2] + (h1 - h0) / (h0 * h1) * y[1:-1]
          + h0 / (h1 * (h0 + h1)) * y[2:])
    d2 = 2 * (y[:-2] / (h0 * (h0 + h1)) - y[1:-1] / (h0 * h1) + y[2:] / (h1 * (h0 + h1)))
    zi = z[1:-1]
    resid = d2 + d1 / zi + rho2(zi, params) * y[1:-1]
    return float(np.max(np.abs(resid)) / np.max(np.abs(y)))
