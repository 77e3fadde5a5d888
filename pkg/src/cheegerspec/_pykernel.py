"""Pure-Python shooting kernels (fallback for the compiled ``_kernel``).

Two systems are integrated with a Dormand-Prince 5(4) embedded pair:

* the scaled Pruefer angle
  ``theta' = S*cos^2(theta)/p + (lam/S)*w*sin^2(theta)`` for a constant
  scale S, augmented with ``v' = J`` (needed when w = 1 - h*v);
* the solution system ``(u, P=p*u', v, N, D)`` with
  ``u' = P/p``, ``P' = -lam*w*u``, ``v' = J``, ``N' = w*u^2``, ``D' = P^2/p``.

Coefficients come either from a closed-form model
``J = (C(tau) + ups*S(tau))**power`` (``curvature`` selects cosh/1/cos for C)
or from arbitrary Python callables.  The compiled module exposes the same
``prufer_angle`` and ``solution_samples`` signatures.
"""
import math

import numpy as np

from .errors import IntegrationError

# Dormand-Prince 5(4)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

SAFETY = 0.9
MAX_STEPS = 2_000_000


def model_profile(curvature, delta, ups, power):
    """Return J(tau) for the closed-form model as a scalar function."""
    if curvature < 0 and delta > 0:
        def cs(t):
            return math.cosh(delta * t), math.sinh(delta * t) / delta
    elif curvature > 0 and delta > 0:
        def cs(t):
            return math.cos(delta * t), math.sin(delta * t) / delta
    else:
        def cs(t):
            return 1.0, t

    if power == 0:
        return lambda t: 1.0

    def jfun(t):
        c, s = cs(t)
        base = c + ups * s
        return base ** power if base > 0.0 else 0.0

    return jfun


def _integrate(rhs, y, t0, outputs, rtol, atol, h0):
    """Integrate ``y' = rhs(t, y)`` from t0, landing exactly on each output.

    Returns the list of states at the output points.
    """
    dim = len(y)
    t = t0
    span = outputs[-1] - t0
    h = min(h0, span) if span > 0 else 0.0
    hmin = 1e-14 * max(1.0, abs(outputs[-1]))
    k1 = rhs(t, y)
    stored = []
    steps = 0
    for t_out in outputs:
        while t < t_out:
            steps += 1
            if steps > MAX_STEPS:
                raise IntegrationError("step budget exhausted")
            last = False
            hs = h
            if t + hs >= t_out:
                hs = t_out - t
                last = True
            ks = [k1]
            for i in range(1, 7):
                a = _A[i]
                yi = [y[j] + hs * sum(a[m] * ks[m][j] for m in range(i)) for j in range(dim)]
                ks.append(rhs(t + _C[i] * hs, yi))
            y_new = yi  # stage 7 evaluates at the 5th-order solution (FSAL)
            err = 0.0
            for j in range(dim):
                ej = hs * sum(_E[m] * ks[m][j] for m in range(7))
                sc = atol + rtol * max(abs(y[j]), abs(y_new[j]))
                e = abs(ej) / sc
                err = max(err, e) if e == e else math.inf
            if err <= 1.0:
                t = t_out if last else t + hs
                y = y_new
                k1 = ks[6]
                fac = 5.0 if err == 0.0 else min(5.0, max(0.2, SAFETY * err ** -0.2))
                if not last or fac < 1.0:
                    h = hs * fac
            else:
                fac = max(0.1, SAFETY * err ** -0.2)
                h = hs * fac
                if h < hmin:
                    raise IntegrationError(f"step size underflow at t={t:.6g}")
        stored.append(list(y))
    return stored


def _initial_step(lam, span):
    return min(span, 0.05 / (1.0 + math.sqrt(max(lam, 0.0))))


def _angle_rhs(pfun, wfun, jfun, tail_h, lam, scale):
    lam_s = lam / scale
    if tail_h > 0:
        def rhs(t, y):
            j = jfun(t)
            w = 1.0 - tail_h * y[1]
            if w < 0.0:
                w = 0.0
            c = math.cos(y[0])
            s = math.sin(y[0])
            return [scale * c * c / j + lam_s * w * s * s, j]
    else:
        def rhs(t, y):
            p = pfun(t)
            w = wfun(t)
            c = math.cos(y[0])
            s = math.sin(y[0])
            return [scale * c * c / p + lam_s * w * s * s, 0.0]
    return rhs


def _solution_rhs(pfun, wfun, jfun, tail_h, lam):
    def rhs(t, y):
        u, P, v = y[0], y[1], y[2]
        if tail_h > 0:
            p = jfun(t)
            dv = p
            w = 1.0 - tail_h * v
            if w < 0.0:
                w = 0.0
        else:
            p = pfun(t)
            w = wfun(t)
            dv = 0.0 if jfun is None else p
        return [P / p, -lam * w * u, dv, w * u * u, P * P / p]
    return rhs


def prufer_angle(curvature, delta, ups, power, tail_h, lam, t_end, rtol, atol, scale=1.0):
    jfun = model_profile(curvature, delta, ups, power)
    rhs = _angle_rhs(jfun, jfun, jfun, tail_h, lam, scale)
    (y,) = _integrate(rhs, [0.0, 0.0], 0.0, [t_end], rtol, atol, _initial_step(lam, t_end))
    return y[0]


def solution_samples(curvature, delta, ups, power, tail_h, lam, grid, rtol, atol):
    jfun = model_profile(curvature, delta, ups, power)
    rhs = _solution_rhs(jfun, jfun, jfun, tail_h, lam)
    return _samples(rhs, lam, grid, rtol, atol)


def prufer_angle_fn(pfun, wfun, lam, t_end, rtol, atol, scale=1.0):
    rhs = _angle_rhs(pfun, wfun, None, 0.0, lam, scale)
    (y,) = _integrate(rhs, [0.0, 0.0], 0.0, [t_end], rtol, atol, _initial_step(lam, t_end))
    return y[0]


def solution_samples_fn(pfun, wfun, lam, grid, rtol, atol):
    rhs = _solution_rhs(pfun, wfun, None, 0.0, lam)
    return _samples(rhs, lam, grid, rtol, atol)


def _samples(rhs, lam, grid, rtol, atol):
    grid = [float(g) for g in grid]
    y0 = [0.0, 1.0, 0.0, 0.0, 0.0]
    out = np.empty((5, len(grid)))
    start = 0
    if grid and grid[0] == 0.0:
        out[:, 0] = y0
        start = 1
    if start < len(grid):
        states = _integrate(rhs, y0, 0.0, grid[start:], rtol, atol,
                            _initial_step(lam, grid[-1]))
        out[:, start:] = np.array(states).T
    return out
