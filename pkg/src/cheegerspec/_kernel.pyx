# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled shooting kernels; same contract as ``_pykernel``.

Only the closed-form coefficient model is handled here.  Problems built
from arbitrary Python callables always go through ``_pykernel``.
"""
import numpy as np

from libc.math cimport cos, sin, cosh, sinh, pow, fabs, fmax, fmin, sqrt, INFINITY

from .errors import IntegrationError

cdef double SAFETY = 0.9
cdef long MAX_STEPS = 2000000

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40


cdef struct Model:
    int curvature
    double delta
    double ups
    double power
    double tail_h
    double lam
    double scale
    int dim


cdef inline double profile(Model* m, double t) nogil:
    cdef double c, s, base
    if m.power == 0.0:
        return 1.0
    if m.curvature < 0 and m.delta > 0:
        c = cosh(m.delta * t)
        s = sinh(m.delta * t) / m.delta
    elif m.curvature > 0 and m.delta > 0:
        c = cos(m.delta * t)
        s = sin(m.delta * t) / m.delta
    else:
        c = 1.0
        s = t
    base = c + m.ups * s
    if base <= 0.0:
        return 0.0
    return pow(base, m.power)


cdef inline void rhs(Model* m, double t, double* y, double* dy) nogil:
    cdef double j = profile(m, t)
    cdef double w, c, s
    if m.tail_h > 0:
        # v sits at index 1 of the angle state and index 2 of the solution state
        w = 1.0 - m.tail_h * (y[1] if m.dim == 2 else y[2])
        if w < 0.0:
            w = 0.0
    else:
        w = j
    if m.dim == 2:
        c = cos(y[0])
        s = sin(y[0])
        dy[0] = m.scale * c * c / j + (m.lam / m.scale) * w * s * s
        dy[1] = j if m.tail_h > 0 else 0.0
    else:
        dy[0] = y[1] / j
        dy[1] = -m.lam * w * y[0]
        dy[2] = j
        dy[3] = w * y[0] * y[0]
        dy[4] = y[1] * y[1] / j


cdef int integrate(Model* m, double* y, double[:] outputs, double[:, :] store,
                   double rtol, double atol, double h0) except -1:
    cdef int dim = m.dim
    cdef double k1[5]
    cdef double k2[5]
    cdef double k3[5]
    cdef double k4[5]
    cdef double k5[5]
    cdef double k6[5]
    cdef double k7[5]
    cdef double yt[5]
    cdef double yn[5]
    cdef double t = 0.0, t_out, hs, h, err, e, ej, sc, fac, hmin
    cdef long steps = 0
    cdef int j, o, last
    cdef int nout = outputs.shape[0]
    cdef double span = outputs[nout - 1]

    h = fmin(h0, span)
    hmin = 1e-14 * fmax(1.0, fabs(span))
    rhs(m, t, y, k1)
    for o in range(nout):
        t_out = outputs[o]
        while t < t_out:
            steps += 1
            if steps > MAX_STEPS:
                raise IntegrationError("step budget exhausted")
            last = 0
            hs = h
            if t + hs >= t_out:
                hs = t_out - t
                last = 1
            for j in range(dim):
                yt[j] = y[j] + hs * A21 * k1[j]
            rhs(m, t + C2 * hs, yt, k2)
            for j in range(dim):
                yt[j] = y[j] + hs * (A31 * k1[j] + A32 * k2[j])
            rhs(m, t + C3 * hs, yt, k3)
            for j in range(dim):
                yt[j] = y[j] + hs * (A41 * k1[j] + A42 * k2[j] + A43 * k3[j])
            rhs(m, t + C4 * hs, yt, k4)
            for j in range(dim):
                yt[j] = y[j] + hs * (A51 * k1[j] + A52 * k2[j] + A53 * k3[j] + A54 * k4[j])
            rhs(m, t + C5 * hs, yt, k5)
            for j in range(dim):
                yt[j] = y[j] + hs * (A61 * k1[j] + A62 * k2[j] + A63 * k3[j]
                                     + A64 * k4[j] + A65 * k5[j])
            rhs(m, t + hs, yt, k6)
            for j in range(dim):
                yn[j] = y[j] + hs * (B1 * k1[j] + B3 * k3[j] + B4 * k4[j]
                                     + B5 * k5[j] + B6 * k6[j])
            rhs(m, t + hs, yn, k7)
            err = 0.0
            for j in range(dim):
                ej = hs * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j]
                           + E6 * k6[j] + E7 * k7[j])
                sc = atol + rtol * fmax(fabs(y[j]), fabs(yn[j]))
                e = fabs(ej) / sc
                # a NaN estimate must reject the step, fmax would drop it
                err = fmax(err, e) if e == e else INFINITY
            if err <= 1.0:
                t = t_out if last else t + hs
                for j in range(dim):
                    y[j] = yn[j]
                    k1[j] = k7[j]
                if err == 0.0:
                    fac = 5.0
                else:
                    fac = fmin(5.0, fmax(0.2, SAFETY * pow(err, -0.2)))
                if not last or fac < 1.0:
                    h = hs * fac
            else:
                h = hs * fmax(0.1, SAFETY * pow(err, -0.2))
                if h < hmin:
                    raise IntegrationError(f"step size underflow at t={t:.6g}")
        if store is not None:
            for j in range(dim):
                store[j, o] = y[j]
    return 0


cdef double initial_step(double lam, double span):
    return fmin(span, 0.05 / (1.0 + sqrt(fmax(lam, 0.0))))


def prufer_angle(int curvature, double delta, double ups, double power, double tail_h,
                 double lam, double t_end, double rtol, double atol, double scale=1.0):
    cdef Model m
    cdef double y[5]
    cdef double[:] outs = np.array([t_end], dtype=float)
    m.curvature = curvature
    m.delta = delta
    m.ups = ups
    m.power = power
    m.tail_h = tail_h
    m.lam = lam
    m.scale = scale
    m.dim = 2
    y[0] = 0.0
    y[1] = 0.0
    integrate(&m, y, outs, None, rtol, atol, initial_step(lam, t_end))
    return y[0]


def solution_samples(int curvature, double delta, double ups, double power, double tail_h,
                     double lam, grid, double rtol, double atol):
    cdef Model m
    cdef double y[5]
    g = np.ascontiguousarray(grid, dtype=float)
    out = np.zeros((5, g.shape[0]))
    out[1, :] = 1.0
    start = 1 if (g.shape[0] and g[0] == 0.0) else 0
    if start >= g.shape[0]:
        return out
    cdef double[:] outs = g[start:]
    cdef double[:, :] store = out[:, start:]
    m.curvature = curvature
    m.delta = delta
    m.ups = ups
    m.power = power
    m.tail_h = tail_h
    m.lam = lam
    m.scale = 1.0
    m.dim = 5
    y[0] = 0.0
    y[1] = 1.0
    y[2] = 0.0
    y[3] = 0.0
    y[4] = 0.0
    integrate(&m, y, outs, store, rtol, atol, initial_step(lam, g[g.shape[0] - 1]))
    return out
