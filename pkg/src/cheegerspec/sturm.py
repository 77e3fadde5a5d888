"""Regular Sturm-Liouville problems -(p u')' = lam w u, u(0) = 0, u'(T) = 0.

Eigenvalues are located by Pruefer-angle shooting: with u = rho sin(theta)
and p u' = rho cos(theta), the angle obeys

    theta' = cos(theta)**2 / p + lam * w * sin(theta)**2,   theta(0) = 0,

and lam_k is the unique lam with theta(T; lam) = (k - 1/2) pi.

For large lam the kernels integrate the constant-scale angle
(S = sqrt(lam)), whose derivative stays O(sqrt(lam)) instead of ranging
over [1/p, lam*w]; it visits multiples of pi/2 at the same points, so the
unscaled angle is recovered exactly at T.

The integration loops run in the compiled ``_kernel`` module when it is
importable, otherwise in ``_pykernel``.  Set ``CHEEGERSPEC_BACKEND=python``
to force the fallback.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from . import _pykernel
from .errors import BracketError

try:
    from . import _kernel as _ckernel
except ImportError:  # extension not built
    _ckernel = None

BACKENDS = {"python": _pykernel}
if _ckernel is not None:
    BACKENDS["cython"] = _ckernel

_requested = os.environ.get("CHEEGERSPEC_BACKEND", "").strip().lower()
if _requested in BACKENDS:
    DEFAULT_BACKEND = _requested
else:
    DEFAULT_BACKEND = "cython" if _ckernel is not None else "python"

ANGLE_RTOL = 1e-10
ANGLE_ATOL = 1e-12
SOLUTION_RTOL = 1e-12
SOLUTION_ATOL = 1e-14
EIG_TOL = 1e-9
# relative distance from T at which a problem with p(T) = 0 is truncated
ENDPOINT_CUTOFF = 1e-6


def _kernel(backend):
    name = DEFAULT_BACKEND if backend is None else backend
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(BACKENDS)}")


@dataclass(frozen=True)
class CoefficientModel:
    """Closed-form coefficients ``J = (C(tau) + upsilon*S(tau))**power``.

    ``curvature`` picks (C, S): -1 gives (cosh, sinh/delta), 0 gives
    (1, tau) and +1 gives (cos, sin/delta).  With ``tail_h > 0`` the weight
    is ``1 - tail_h * int_0^tau J``; otherwise ``p = w = J``.
    """

    curvature: int
    delta: float
    upsilon: float
    power: float
    tail_h: float = 0.0

    def args(self):
        return (int(self.curvature), float(self.delta), float(self.upsilon),
                float(self.power), float(self.tail_h))

    def profile(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.power == 0:
            return np.ones_like(tau)[()]
        d = self.delta
        if self.curvature < 0 and d > 0:
            c, s = np.cosh(d * tau), np.sinh(d * tau) / d
        elif self.curvature > 0 and d > 0:
            c, s = np.cos(d * tau), np.sin(d * tau) / d
        else:
            c, s = np.ones_like(tau), tau
        base = np.maximum(c + self.upsilon * s, 0.0)
        return (base ** self.power)[()]

    def weight(self, tau):
        if self.tail_h <= 0:
            return self.profile(tau)
        taus = np.atleast_1d(np.asarray(tau, dtype=float))
        order = np.argsort(taus)
        edges = np.concatenate(([0.0], taus[order]))
        pieces = [integrate.quad(self.profile, a, b, epsabs=1e-13, epsrel=1e-11)[0]
                  if b > a else 0.0 for a, b in zip(edges[:-1], edges[1:])]
        out = np.empty_like(taus)
        out[order] = np.clip(1.0 - self.tail_h * np.cumsum(pieces), 0.0, None)
        return out[0] if np.ndim(tau) == 0 else out


@dataclass(frozen=True)
class SLProblem:
    T: float
    p: Callable
    w: Callable
    label: str = ""
    model: Optional[CoefficientModel] = None

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"interval length T must be positive, got {self.T!r}")

    @classmethod
    def from_model(cls, model: CoefficientModel, T, label=""):
        return cls(T=float(T), p=model.profile, w=model.weight, label=label, model=model)

    @property
    def t_end(self):
        """Right end actually integrated to; pulled in when p(T) vanishes."""
        if float(self.p(self.T)) <= 1e-12 * max(1.0, float(self.p(0.0))):
            return self.T * (1.0 - ENDPOINT_CUTOFF)
        return self.T

    def truncated(self, t):
        """Same coefficients restricted to [0, t]."""
        return SLProblem(T=t, p=self.p, w=self.w, label=f"{self.label}[0,{t:g}]", model=self.model)


@dataclass(frozen=True)
class ShootResult:
    theta_T: float
    lam: float


@dataclass(frozen=True)
class Eigenpair:
    k: int
    lam: float
    grid: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    du: np.ndarray = field(repr=False)
    zeros: int
    rayleigh: float

    def to_csv(self, fh):
        fh.write(f"# k = {self.k}\n# lambda = {self.lam:.17e}\n# zeros = {self.zeros}\n")
        fh.write("tau,u,du\n")
        for t, u, du in zip(self.grid, self.u, self.du):
            fh.write(f"{t:.17e},{u:.17e},{du:.17e}\n")


def pruefer_theta(prob: SLProblem, lam, *, rtol=ANGLE_RTOL, atol=ANGLE_ATOL, backend=None):
    if lam < 0:
        raise ValueError("trial eigenvalue must be >= 0")
    scale = math.sqrt(max(lam, 1.0))
    if prob.model is not None:
        theta = _kernel(backend).prufer_angle(*prob.model.args(), float(lam), prob.t_end,
                                              rtol, atol, scale)
    else:
        theta = _pykernel.prufer_angle_fn(prob.p, prob.w, float(lam), prob.t_end, rtol, atol, scale)
    return ShootResult(_unscale(theta, scale), float(lam))


def _unscale(theta, scale):
    # (cos, sin) of the unscaled angle is proportional to (scale*cos, sin) of
    # the scaled one; both lie in the same quadrant, so they differ by < pi/2
    if scale == 1.0:
        return theta
    d = math.atan2(math.sin(theta), scale * math.cos(theta)) - theta
    d -= 2 * math.pi * round(d / (2 * math.pi))
    return theta + d


def _solution_raw(prob, lam, grid, rtol, atol, backend):
    if prob.model is not None:
        return _kernel(backend).solution_samples(*prob.model.args(), float(lam), grid, rtol, atol)
    return _pykernel.solution_samples_fn(prob.p, prob.w, float(lam), grid, rtol, atol)


def newton_step(prob: SLProblem, lam, *, rtol=SOLUTION_RTOL, atol=SOLUTION_ATOL, backend=None):
    """Newton correction for lam from the Neumann defect (p u')(T).

    Differentiating in lam and integrating against u gives
    d(p u')(T)/dlam = -int u^2 w / u(T), so the step is (p u')(T) u(T) / int u^2 w.
    """
    raw = _solution_raw(prob, lam, np.array([0.0, prob.t_end]), rtol, atol, backend)
    u, P, _, N, _ = raw[:, -1]
    return float(P * u / N)


def eigenvalue(prob: SLProblem, k, tol=EIG_TOL, *, lower=0.0, lam_max=1e12,
               rtol=ANGLE_RTOL, atol=ANGLE_ATOL, polish=True, backend=None):
    """Return the k-th eigenvalue (k >= 1) to relative tolerance ``tol``.

    ``lower`` may pass any value known to lie below lam_k (for instance
    lam_{k-1}) to shorten the bracket scan.  With ``polish`` a final Newton
    step on the Neumann defect, kept inside the bracket, brings lam to the
    accuracy of the solution integrator.
    """
    if k < 1:
        raise ValueError("eigenvalue index starts at 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    target = (k - 0.5) * math.pi

    def f(lam):
        return pruefer_theta(prob, lam, rtol=rtol, atol=atol, backend=backend).theta_T - target

    lo = float(lower)
    f_lo = f(lo)
    if f_lo >= 0:
        lo, f_lo = 0.0, f(0.0)
    hi = max(1.0, 2.0 * lo)
    f_hi = f(hi)
    while f_hi < 0:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        if hi > lam_max:
            raise BracketError(f"no bracket for k={k} below lam={lam_max:g} ({prob.label})")
        f_hi = f(hi)

    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid < 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    # secant polish inside the final bracket
    x0, f0, x1, f1 = lo, f_lo, hi, f_hi
    best = 0.5 * (lo + hi)
    for _ in range(3):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not lo <= x2 <= hi:
            break
        best = x2
        x0, f0, x1, f1 = x1, f1, x2, f(x2)
        if f1 == 0:
            break
    if polish:
        cand = best + newton_step(prob, best, backend=backend)
        if lo <= cand <= hi:
            best = cand
    return best


def eigenvalues(prob: SLProblem, count, tol=EIG_TOL, **kw):
    """lam_1 .. lam_count, each bracket seeded by its predecessor."""
    out = []
    lower = 0.0
    for k in range(1, count + 1):
        lam = eigenvalue(prob, k, tol, lower=lower, **kw)
        out.append(lam)
        lower = lam
    return out


def eigenfunction(prob: SLProblem, lam, k=None, *, num=1024, grid=None,
                  rtol=SOLUTION_RTOL, atol=SOLUTION_ATOL, backend=None) -> Eigenpair:
    """Integrate (u, p u') from u(0) = 0, (p u')(0) = 1 and normalise.

    The result satisfies int u^2 w = 1 and u(T) > 0.  ``grid`` overrides the
    default ``num`` equally spaced points on [0, T].  When p(T) = 0 the
    integration stops at ``t_end`` and samples beyond it come from the
    leading term of the bounded solution's expansion at T.
    """
    if grid is None:
        grid = np.linspace(0.0, prob.T, num)
    grid = np.asarray(grid, dtype=float)
    t_end = prob.t_end
    inner = grid[grid < t_end]
    raw = _solution_raw(prob, lam, np.append(inner, t_end), rtol, atol, backend)
    u, P, _, N, D = raw
    scale = math.copysign(1.0 / math.sqrt(N[-1]), u[-1])
    u = u * scale
    du = P * scale / np.asarray(prob.p(np.append(inner, t_end)), dtype=float)
    if t_end < prob.T:
        # p and w vanish linearly at T: the bounded solution has u' ~ c (T - tau)
        eps = prob.T - t_end
        s_out = prob.T - grid[grid >= t_end]
        u = np.concatenate((u[:-1], u[-1] + du[-1] * (eps * eps - s_out ** 2) / (2 * eps)))
        du = np.concatenate((du[:-1], du[-1] * s_out / eps))
    else:
        u, du = u[: grid.size], du[: grid.size]
    signs = np.sign(u[1:])
    signs = signs[signs != 0]
    zeros = int(np.count_nonzero(signs[1:] != signs[:-1]))
    if k is None:
        k = zeros + 1
    return Eigenpair(k=int(k), lam=float(lam), grid=grid, u=u, du=du, zeros=zeros,
                     rayleigh=float(D[-1] / N[-1]))


def eigenpair(prob: SLProblem, k, tol=EIG_TOL, **kw) -> Eigenpair:
    backend = kw.pop("backend", None)
    lam = eigenvalue(prob, k, tol, backend=backend)
    return eigenfunction(prob, lam, k, backend=backend, **kw)
