"""Compiled inner loops: profile evaluation and a Dormand-Prince 5(4) integrator.

Two first-order systems are integrated on [a, b] for the mode equation
``(p phi')' + (lam w - q) phi = 0``:

``LOG_SYSTEM`` (lam <= 0), state ``(r, ln(p phi'), m, J)`` with
``r = phi / (p phi')``.  All components are regular at ``x = a``::

    r'  = 1/p - (q - lam w) r**2           r(a) = 0
    L'  = (q - lam w) r                    L(a) = ln p(a)
    m'  = w - 2 m / (p r)                  m(a) = 0
    J'  = m / p                            J(a) = 0

so that ``ln phi(b) = ln r(b) + L(b)`` and ``d ln phi(b)/d lam = -J(b)``.

``PRUFER_SYSTEM``, state ``(theta, ln rho)`` with ``S phi = rho sin(theta)``
and ``p phi' = rho cos(theta)``.  The scale follows the local frequency:
with ``E = p (lam w - q) = lam f^2 - k^2`` and ``R = sqrt(E^2 + delta^4)``,
``S^2 = (E + R)/2`` (so ``S ~ sqrt(E)`` where the solution oscillates and
``S'/S = E'/(2R)``)::

    theta'   = (S/p) cos^2 + (E/(p S)) sin^2 + (E'/(2R)) sin cos     theta(a) = 0
    ln rho'  = (E'/(2R)) sin^2 + (S/p - E/(p S)) sin cos             rho(a) = p(a)
"""

import math

import numpy as np
from numba import njit

CONSTANT = 0
LINEAR = 1
CATENOID = 2
POLYNOMIAL = 3
COSINE_BUMP = 4

LOG_SYSTEM = 0
PRUFER_SYSTEM = 1

OK = 0
STEP_UNDERFLOW = 1
STEP_BUDGET = 2

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    -71.0 / 57600.0, 71.0 / 16695.0, -71.0 / 1920.0, 17253.0 / 339200.0, -22.0 / 525.0, 1.0 / 40.0)


@njit(cache=True)
def profile_eval(code, prm, x):
    """Return ``(f, f', f'')`` of a catalog profile at ``x``."""
    if code == CONSTANT:
        return prm[0], 0.0, 0.0
    if code == LINEAR:
        return prm[0] + prm[1] * x, prm[1], 0.0
    if code == CATENOID:
        c = prm[0]
        w = (x - prm[1]) / c
        ch = math.cosh(w)
        return c * ch, math.sinh(w), ch / c
    if code == POLYNOMIAL:
        n = prm.shape[0]
        f = prm[n - 1]
        d1 = 0.0
        d2 = 0.0
        for i in range(n - 2, -1, -1):
            d2 = d2 * x + d1
            d1 = d1 * x + f
            f = f * x + prm[i]
        return f, d1, 2.0 * d2
    # cosine bump: base + amp cos(2 pi x / period + phase)
    om = 2.0 * math.pi / prm[2]
    arg = om * x + prm[3]
    ca = math.cos(arg)
    return prm[0] + prm[1] * ca, -prm[1] * om * math.sin(arg), -prm[1] * om * om * ca


@njit(cache=True)
def profile_eval_array(code, prm, xs):
    n = xs.shape[0]
    f = np.empty(n)
    fp = np.empty(n)
    fpp = np.empty(n)
    for i in range(n):
        f[i], fp[i], fpp[i] = profile_eval(code, prm, xs[i])
    return f, fp, fpp


@njit(cache=True)
def _rhs(system, x, y, out, code, prm, k, lam, delta2):
    f, fp, _ = profile_eval(code, prm, x)
    g = math.sqrt(1.0 + fp * fp)
    p = f / g
    w = f * g
    q = k * k * g / f
    if system == LOG_SYSTEM:
        gain = q - lam * w
        r = y[0]
        out[0] = 1.0 / p - gain * r * r
        out[1] = gain * r
        if r > 0.0:
            out[2] = w - 2.0 * y[2] / (p * r)
        else:
            out[2] = w / 3.0
        out[3] = y[2] / p
    else:
        e = lam * f * f - k * k
        big = math.sqrt(e * e + delta2 * delta2)
        sc2 = 0.5 * (e + big) if e >= 0.0 else 0.5 * delta2 * delta2 / (big - e)
        sc = math.sqrt(sc2)
        de = lam * f * fp / big
        s = math.sin(y[0])
        c = math.cos(y[0])
        out[0] = sc / p * c * c + e / (p * sc) * s * s + de * s * c
        out[1] = de * s * s + s * c * (sc / p - e / (p * sc))


@njit(cache=True)
def dopri5(system, y0, xa, xb, rtol, atol, max_steps, code, prm, k, lam, delta2):
    """Integrate ``system`` from ``xa`` to ``xb``.

    Returns ``(y(xb), status, accepted_steps)``.
    """
    n = y0.shape[0]
    y = y0.copy()
    ynew = np.empty(n)
    ytmp = np.empty(n)
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    k5 = np.empty(n)
    k6 = np.empty(n)
    k7 = np.empty(n)
    span = xb - xa
    x = xa
    h = 1e-3 * span
    _rhs(system, x, y, k1, code, prm, k, lam, delta2)
    accepted = 0
    attempts = 0
    while True:
        last = False
        if x + h >= xb:
            h = xb - x
            last = True
        for i in range(n):
            ytmp[i] = y[i] + h * _A21 * k1[i]
        _rhs(system, x + _C2 * h, ytmp, k2, code, prm, k, lam, delta2)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
        _rhs(system, x + _C3 * h, ytmp, k3, code, prm, k, lam, delta2)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        _rhs(system, x + _C4 * h, ytmp, k4, code, prm, k, lam, delta2)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        _rhs(system, x + _C5 * h, ytmp, k5, code, prm, k, lam, delta2)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i]
                                  + _A64 * k4[i] + _A65 * k5[i])
        xnew = xb if last else x + h
        _rhs(system, xnew, ytmp, k6, code, prm, k, lam, delta2)
        for i in range(n):
            ynew[i] = y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i]
                                  + _B5 * k5[i] + _B6 * k6[i])
        _rhs(system, xnew, ynew, k7, code, prm, k, lam, delta2)
        acc = 0.0
        for i in range(n):
            e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                     + _E6 * k6[i] + _E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            acc += (e / sc) ** 2
        err = math.sqrt(acc / n)
        attempts += 1
        if attempts > max_steps:
            return y, STEP_BUDGET, accepted
        if err <= 1.0:
            x = xnew
            for i in range(n):
                y[i] = ynew[i]
                k1[i] = k7[i]
            accepted += 1
            if last:
                return y, OK, accepted
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h *= fac
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
        if h <= 1e-14 * (abs(x) + abs(span)):
            return y, STEP_UNDERFLOW, accepted


@njit(cache=True)
def log_shoot(code, prm, k, lam, xa, xb, rtol, atol, max_steps):
    f, fp, _ = profile_eval(code, prm, xa)
    y0 = np.zeros(4)
    y0[1] = math.log(f / math.sqrt(1.0 + fp * fp))
    return dopri5(LOG_SYSTEM, y0, xa, xb, rtol, atol, max_steps, code, prm, k, lam, 1.0)


@njit(cache=True)
def prufer_scale_at(f, k, lam, delta2):
    """``S`` of the Prufer system where the profile takes the value ``f``."""
    e = lam * f * f - k * k
    big = math.sqrt(e * e + delta2 * delta2)
    return math.sqrt(0.5 * (e + big) if e >= 0.0 else 0.5 * delta2 * delta2 / (big - e))


@njit(cache=True)
def prufer_shoot(code, prm, k, lam, delta2, xa, xb, rtol, atol, max_steps):
    f, fp, _ = profile_eval(code, prm, xa)
    y0 = np.zeros(2)
    y0[1] = math.log(f / math.sqrt(1.0 + fp * fp))
    return dopri5(PRUFER_SYSTEM, y0, xa, xb, rtol, atol, max_steps, code, prm, k, lam, delta2)
