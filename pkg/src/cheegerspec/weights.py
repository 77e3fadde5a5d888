"""Weight functions and the horizon T built from (n, delta, h).

All curvature-dependent quantities go through the pair ``s_delta``/``c_delta``.
The comparison profile is

    J_delta(tau, t) = (c_delta(tau) + t * s_delta(tau)) ** (n - 1)

and the horizon T is the unique root of ``h * int_0^T J_delta = 1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import HorizonError

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10


class Rule(str, enum.Enum):
    """Mean-curvature bound used for the separating hypersurface."""

    AGOL = "agol"
    BUSER = "buser"
    BEST = "best"


@dataclass(frozen=True)
class GeometryParams:
    n: int
    delta: float
    h: float
    rule: Rule = Rule.BEST

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension n must be an integer >= 2, got {self.n!r}")
        if not self.delta >= 0:
            raise ValueError(f"delta must be >= 0, got {self.delta!r}")
        if not self.h > 0:
            raise ValueError(f"Cheeger constant h must be > 0, got {self.h!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "rule", Rule(self.rule))


def s_delta(tau, delta):
    if delta == 0:
        return tau * 1.0
    return np.sinh(delta * tau) / delta


def c_delta(tau, delta):
    if delta == 0:
        return np.ones_like(tau, dtype=float) if np.ndim(tau) else 1.0
    return np.cosh(delta * tau)


def j_delta(tau, t, n, delta):
    """Return ``(c_delta(tau) + t*s_delta(tau))**(n-1)``; accepts arrays."""
    return (c_delta(tau, delta) + t * s_delta(tau, delta)) ** (n - 1)


def upsilon(rule, h, n, delta):
    rule = Rule(rule)
    agol = h / (n - 1)
    buser = delta + h / n
    if rule is Rule.AGOL:
        return agol
    if rule is Rule.BUSER:
        return buser
    return min(agol, buser)


def j_integral(a, b, ups, n, delta):
    """Adaptive quadrature of J_delta(., ups) over [a, b]."""
    if b == a:
        return 0.0
    val, _ = integrate.quad(
        j_delta, a, b, args=(ups, n, delta),
        epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200,
    )
    return val


def solve_horizon(h, ups, n, delta, *, tol=1e-12, max_T=1e4, max_iter=200):
    """Solve ``h * int_0^T J_delta(tau, ups) dtau = 1`` for T.

    The bracket starts at T = 1/h (the exact root when J == 1) and is
    widened geometrically; a safeguarded Newton iteration then uses
    ``h * J_delta(T)`` as the derivative.
    """
    if not h > 0:
        raise ValueError("h must be positive")

    def resid(T):
        # an overflowing integral is certainly past the root
        with np.errstate(over="raise"):
            try:
                val = h * j_integral(0.0, T, ups, n, delta) - 1.0
            except (FloatingPointError, OverflowError):
                return math.inf
        return val if math.isfinite(val) else math.inf

    lo = hi = 1.0 / h
    f_hi = resid(hi)
    while math.isinf(f_hi):
        hi *= 0.5
        if hi < 1e-300:
            raise HorizonError(f"integral overflows for every T tried (h={h:g})")
        f_hi = resid(hi)
    lo = hi
    while f_hi < 0:
        lo = hi
        hi *= 2.0
        if hi > max_T:
            raise HorizonError(f"horizon bracket exceeded T={max_T:g} for h={h:g}")
        f_hi = resid(hi)
    while resid(lo) > 0:
        lo *= 0.5

    x = 0.5 * (lo + hi)
    dx_old = hi - lo
    for _ in range(max_iter):
        f = resid(x)
        if abs(f) <= tol:
            return x
        if f > 0:
            hi = x
        else:
            lo = x
        step = f / (h * float(j_delta(x, ups, n, delta)))
        if abs(step) <= 4 * np.finfo(float).eps * x:
            # quadrature noise floor reached: T is resolved to machine precision
            return x
        x_new = x - step
        # bisect when Newton leaves the bracket or is not halving its step
        if not lo < x_new < hi or abs(step) > 0.5 * abs(dx_old):
            x_new = 0.5 * (lo + hi)
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            return x_new
        dx_old = x_new - x
        x = x_new
    raise HorizonError(f"horizon iteration did not converge for h={h:g}")


@dataclass(frozen=True)
class WeightSystem:
    params: GeometryParams
    upsilon: float
    T: float

    def p(self, tau):
        return j_delta(tau, self.upsilon, self.params.n, self.params.delta)

    w1 = p

    def w2(self, tau):
        """``1 - h * int_0^tau J``, clamped to [0, 1]; accepts sorted arrays."""
        n, delta, h = self.params.n, self.params.delta, self.params.h
        if np.ndim(tau) == 0:
            val = 1.0 - h * j_integral(0.0, float(tau), self.upsilon, n, delta)
            return min(max(val, 0.0), 1.0)
        taus = np.asarray(tau, dtype=float)
        order = np.argsort(taus)
        edges = np.concatenate(([0.0], taus[order]))
        pieces = [j_integral(a, b, self.upsilon, n, delta) for a, b in zip(edges[:-1], edges[1:])]
        out = np.empty_like(taus)
        out[order] = 1.0 - h * np.cumsum(pieces)
        return np.clip(out, 0.0, 1.0)

    def horizon_residual(self):
        p = self.params
        return p.h * j_integral(0.0, self.T, self.upsilon, p.n, p.delta) - 1.0

    def to_record(self):
        p = self.params
        return (f"n={p.n} delta={p.delta!r} h={p.h!r} rule={p.rule.value} "
                f"upsilon={self.upsilon!r} T={self.T!r}")


def build_weights(params: GeometryParams) -> WeightSystem:
    ups = upsilon(params.rule, params.h, params.n, params.delta)
    T = solve_horizon(params.h, ups, params.n, params.delta)
    return WeightSystem(params, ups, T)


def w2_at(tau, ws: WeightSystem):
    return ws.w2(tau)


def bar_j(tau, h, n, *, upsilon=None):
    """Square root of J_1(tau, ups); ``ups`` defaults to h/(n-1)."""
    ups = h / (n - 1) if upsilon is None else upsilon
    return (np.cosh(tau) + ups * np.sinh(tau)) ** ((n - 1) / 2)


def bar_j_derivatives(tau, ups, n):
    """Return (Jbar, Jbar', Jbar'') for delta = 1 in closed form.

    With f = cosh + ups*sinh we have f'' = f, so
    Jbar'' = m(m-1) f^(m-2) f'^2 + m f^m with m = (n-1)/2.
    """
    m = (n - 1) / 2
    f = np.cosh(tau) + ups * np.sinh(tau)
    df = np.sinh(tau) + ups * np.cosh(tau)
    jb = f ** m
    djb = m * f ** (m - 1) * df
    ddjb = m * (m - 1) * f ** (m - 2) * df ** 2 + m * jb
    return jb, djb, ddjb

