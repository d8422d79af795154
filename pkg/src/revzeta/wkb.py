"""WKB coefficients of the mode equation and the resulting asymptotics of ln D_k.

One-dimensional (k = 0, y = z**2, large z)::

    S_+ = s_minus1 z + s0 + s1 / z + ...
    d ln S_1 / dz = t0 / z + t1 / z**3 + ...

Two-dimensional (k >= 1, y = k**2 z, large k, t = z f**2)::

    S_1 = s_minus1(z) k + s1(z) / k + ...
    d ln S_1 / dz = f**2 (t0 + t1 / k**2 + ...)

``s0`` is the printed coefficient ``-f' f''/(2(1 + f'^2))`` of ``S``; the
ansatz ``phi = exp(int(S - u/2))`` carries the remaining ``-u/2`` separately.
"""

import math
from dataclasses import dataclass

import numpy as np

from .profile import DEFAULT_QUADRATURE, geometric_invariants, integrate
from .sturm import ModeProblem, log_phi_at_zero

__all__ = ["Wkb1D", "Wkb2D", "wkb1", "wkb2", "lnD_asymptotic_1d", "lnD_asymptotic_2d"]


@dataclass(frozen=True)
class Wkb1D:
    s_minus1: float
    s0: float
    s1: float
    t0: float
    t1: float
    u: float


@dataclass(frozen=True)
class Wkb2D:
    t: float
    s_minus1: float
    s1: float
    t0: float
    t1: float


def _wkb1_arrays(f, fp, fpp):
    g2 = 1.0 + fp * fp
    g = np.sqrt(g2)
    s1 = -fp * fp / (8.0 * f * f * g) + fpp / (4.0 * f * g2 * g)
    t1 = fp * fp / (4.0 * f * f * g2) - fpp / (2.0 * f * g2 * g2)
    s0 = -fp * fpp / (2.0 * g2) + 0.0  # no signed zeros
    u = fp / f - fp * fpp / g2
    return g, s0, s1, t1, u


def wkb1(profile, x):
    """First 1-D WKB coefficients at ``x``."""
    f, fp, fpp = profile.eval(x)
    g, s0, s1, t1, u = _wkb1_arrays(f, fp, fpp)
    return Wkb1D(float(g), float(s0), float(s1), 1.0, float(t1), float(u))


def _wkb2_arrays(f, fp, fpp, z):
    g2 = 1.0 + fp * fp
    g = np.sqrt(g2)
    t = z * f * f
    sm1 = g / f * np.sqrt(t + 1.0)
    s1 = t / (t + 1.0) ** 1.5 * (-(t - 4.0) / (8.0 * (t + 1.0)) * fp * fp / (f * g)
                                 + fpp / (4.0 * g2 * g))
    t0 = 0.5 / (1.0 + t)
    t1 = ((t * t - 10.0 * t + 4.0) / (8.0 * (1.0 + t) ** 4) * fp * fp / g2
          + (1.0 - t) / (4.0 * (1.0 + t) ** 3) * f * fpp / (g2 * g2))
    return t, sm1, s1, t0, t1


def wkb2(profile, x, z):
    """First 2-D WKB coefficients at ``x`` for ``y = k^2 z``."""
    if not z >= 0:
        raise ValueError(f"z must be >= 0, got {z}")
    f, fp, fpp = profile.eval(x)
    return Wkb2D(*(float(v) for v in _wkb2_arrays(f, fp, fpp, z)))


def _quad_of(profile, fn, quad):
    def integrand(xs):
        return fn(*profile.eval_array(xs))
    return integrate(integrand, profile.a, profile.b, quad)


def lnD_asymptotic_1d(profile, z, quad=DEFAULT_QUADRATURE):
    """Large-``z`` form of ``ln D_0(-z^2)`` through order ``1/z``.

    ``z int s_minus1 - (1/2) int u - ln z - (1/2) ln(s_minus1(a) s_minus1(b))
    - ln(2 phi_0(0; b)) + (1/z) int s1``.  The error is ``O(z^-2)`` plus
    exponentially small terms.
    """
    inv = geometric_invariants(profile, quad)
    wa = wkb1(profile, profile.a)
    wb = wkb1(profile, profile.b)
    # u = (ln f - ln sqrt(1 + f'^2))'
    int_u = (math.log(inv.radius_b / inv.radius_a)
             - math.log(wb.s_minus1 / wa.s_minus1))
    return (z * inv.arc_length - 0.5 * int_u - math.log(z)
            - 0.5 * (math.log(wa.s_minus1) + math.log(wb.s_minus1))
            - math.log(2.0) - log_phi_at_zero(ModeProblem(profile, 0), quad)
            + inv.I_s1 / z)


def lnD_asymptotic_2d(profile, k, z, quad=DEFAULT_QUADRATURE):
    """Large-``k`` form of ``ln D_k(-k^2 z)`` through order ``1/k``."""
    if k < 1:
        raise ValueError("lnD_asymptotic_2d needs k >= 1")
    if z == 0:
        return 0.0
    A = geometric_invariants(profile, quad).A
    int_sm1 = _quad_of(profile, lambda f, fp, fpp: _wkb2_arrays(f, fp, fpp, z)[1], quad)
    int_s1 = _quad_of(profile, lambda f, fp, fpp: _wkb2_arrays(f, fp, fpp, z)[2], quad)
    end = 0.0
    for x in (profile.a, profile.b):
        # s_minus1(z; x) / s_minus1(0; x) = sqrt(1 + z f^2)
        f = profile.eval(x)[0]
        end += 0.5 * math.log1p(z * f * f)
    return (k * int_sm1 - A * k + int_s1 / k - 0.5 * end
            + math.log(-math.expm1(-2.0 * k * int_sm1)) - math.log(-math.expm1(-2.0 * A * k)))
