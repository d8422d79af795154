"""Heat trace of the Dirichlet Laplacian and its small-t coefficients.

``theta(t) = sum exp(-t lam) ~ C_{-1}/t + C_{-1/2}/sqrt(t) + C_0 + C_{1/2} sqrt(t)``
with, for a surface of revolution,

* ``C_{-1} = area / (4 pi)``
* ``C_{-1/2} = -perimeter / (8 sqrt(pi))``, perimeter ``2 pi (f(a) + f(b))``
* ``C_0 = chi / 6 = 0``
* ``C_{1/2} = (1/(256 sqrt(pi))) sum_ends 2 pi f (k_g^2 - 8 K)``, where the
  boundary circles have ``k_g^2 = f'^2 / (f^2 (1 + f'^2))`` and the Gaussian
  curvature is ``K = -f'' / (f (1 + f'^2)^2)``.

Through the Mellin transform these give ``res zeta(1) = C_{-1}``,
``res zeta(1/2) = C_{-1/2}/sqrt(pi)``, ``zeta(0) = C_0`` and
``res zeta(-1/2) = -C_{1/2}/(2 sqrt(pi))``.
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.optimize import brentq

from .errors import CoverageError, FitError
from .profile import DEFAULT_QUADRATURE, geometric_invariants, make_profile
from .zeta import full_special_values, riemann_zeta, zeta_prime0_mp

__all__ = [
    "HeatTrace", "heat_trace", "valid_window", "HeatKernelCoefficients", "FittedCoefficients",
    "geometric_coefficients", "fit_coefficients", "dictionary_residuals",
    "stripe_density", "stripe_special_values", "stripe_limit_residual",
]

TRUNCATION_REL = 1e-10
MIN_FIT_POINTS = 8
MIN_WINDOW_RATIO = 2.0
MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class HeatTrace:
    t_grid: np.ndarray
    theta: np.ndarray
    truncation_bound: np.ndarray

    def to_json(self):
        return {"t_grid": self.t_grid.tolist(), "theta": self.theta.tolist(),
                "truncation_bound": self.truncation_bound.tolist()}


def _theta(table, t):
    order = np.argsort(-table.lam, kind="stable")  # smallest terms first
    terms = table.multiplicity[order] * np.exp(-t * table.lam[order])
    return math.fsum(terms.tolist())


def _tail(density, lam_cut, t):
    # Weyl mass above the cut: density * int_cut^inf exp(-t lam) dlam
    return density * math.exp(-t * lam_cut) / t


def valid_window(table, density, lam_01=None):
    """``(t_min, t_max)``: table truncation below ``1e-10 theta`` and ``t <= 0.5/lam_01``."""
    if table.lambda_cut is None:
        raise CoverageError("heat trace needs a table with a coverage bound")
    lam_cut = table.lambda_cut
    if lam_01 is None:
        lam_01 = float(table.mode(0)[0])
    t_max = 0.5 / lam_01

    def excess(t):
        log_tail = math.log(density) - t * lam_cut - math.log(t)
        return log_tail - math.log(TRUNCATION_REL * _theta(table, t))

    lo, hi = 1e-3 / lam_cut, 1e3 / lam_cut
    if excess(hi) > 0:
        raise CoverageError(f"table cut {lam_cut} too low for any valid t")
    t_min = brentq(excess, lo, hi, xtol=1e-14, rtol=1e-10) if excess(lo) > 0 else lo
    return t_min, t_max


def heat_trace(table, t_grid, density):
    """``theta(t)`` on ``t_grid`` with the Weyl bound on the omitted eigenvalues.

    ``density`` is the Weyl constant ``area/(4 pi)`` (or a fitted one).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if table.lambda_cut is None:
        raise CoverageError("heat trace needs a table with a coverage bound")
    if np.any(t_grid <= 0):
        raise ValueError("t must be positive")
    theta = np.array([_theta(table, t) for t in t_grid])
    bound = np.array([_tail(density, table.lambda_cut, t) for t in t_grid])
    bad = bound >= TRUNCATION_REL * theta
    if np.any(bad):
        t_min, _ = valid_window(table, density)
        raise CoverageError(
            f"t={t_grid[bad].min()!r} below the smallest valid t={t_min!r} for cut {table.lambda_cut}")
    return HeatTrace(t_grid, theta, bound)


@dataclass(frozen=True)
class HeatKernelCoefficients:
    C_minus1: float
    C_minus_half: float
    C_0: float
    C_half: float

    def to_json(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class FittedCoefficients:
    C_minus1: float
    C_minus_half: float
    C_0: float
    C_half: float
    stderr: tuple
    residual_norm: float
    window: tuple
    points: int

    def to_json(self):
        out = dict(self.__dict__)
        out["stderr"] = list(self.stderr)
        out["window"] = list(self.window)
        return out


def geometric_coefficients(profile, quad=DEFAULT_QUADRATURE):
    inv = geometric_invariants(profile, quad)
    c_half = 0.0
    for x in (profile.a, profile.b):
        f, fp, fpp = profile.eval(x)
        g2 = 1.0 + fp * fp
        kg2 = fp * fp / (f * f * g2)
        gauss = -fpp / (f * g2 * g2)
        c_half += 2.0 * math.pi * f * (kg2 - 8.0 * gauss)
    return HeatKernelCoefficients(
        C_minus1=inv.area / (4.0 * math.pi),
        C_minus_half=-2.0 * math.pi * (inv.radius_a + inv.radius_b) / (8.0 * math.sqrt(math.pi)),
        C_0=0.0,
        C_half=c_half / (256.0 * math.sqrt(math.pi)),
    )


def fit_coefficients(trace):
    """Relative least squares of ``theta`` against the four-term model.

    Rows are weighted by ``1/theta`` so that every ``t`` counts equally in
    relative terms.  Raises :class:`FitError` for fewer than 8 points, a
    window narrower than a factor 2 or an ill-conditioned design.
    """
    t = np.asarray(trace.t_grid, dtype=float)
    theta = np.asarray(trace.theta, dtype=float)
    if t.size < MIN_FIT_POINTS:
        raise FitError(f"need at least {MIN_FIT_POINTS} points, got {t.size}")
    if t.max() / t.min() < MIN_WINDOW_RATIO:
        raise FitError(f"window [{t.min()}, {t.max()}] narrower than a factor {MIN_WINDOW_RATIO}")
    design = np.column_stack([1.0 / t, 1.0 / np.sqrt(t), np.ones_like(t), np.sqrt(t)])
    wd = design / theta[:, None]
    wy = np.ones_like(theta)
    # column equilibration before judging the conditioning
    norms = np.linalg.norm(wd, axis=0)
    cond = np.linalg.cond(wd / norms)
    if not cond < MAX_CONDITION:
        raise FitError(f"fit design ill-conditioned (cond={cond:.3e})")
    coef, *_ = np.linalg.lstsq(wd / norms, wy, rcond=None)
    coef = coef / norms
    resid = wd @ coef - wy
    dof = max(t.size - 4, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(wd.T @ wd)
    stderr = tuple(float(v) for v in np.sqrt(np.abs(np.diag(cov))))
    return FittedCoefficients(
        *(float(c) for c in coef), stderr=stderr,
        residual_norm=float(np.linalg.norm(resid)), window=(float(t.min()), float(t.max())),
        points=int(t.size))


def dictionary_residuals(profile, quad=DEFAULT_QUADRATURE):
    """``|zeta value - heat coefficient image|`` at ``s = 1, 1/2, 0, -1/2``."""
    c = geometric_coefficients(profile, quad)
    z = full_special_values(profile, quad)
    sp = math.sqrt(math.pi)
    return {
        "res_at_1": abs(z.res_at_1 - c.C_minus1),
        "res_at_half": abs(z.res_at_half - c.C_minus_half / sp),
        "value_at_0": abs(z.value_at_0 - c.C_0),
        "res_at_minus_half": abs(z.res_at_minus_half + c.C_half / (2.0 * sp)),
    }


def stripe_density(L, s):
    """Zeta density per unit length of a planar stripe of width ``L``.

    ``sqrt(pi) zeta_R(2s - 1) Gamma(s - 1/2)/Gamma(s) (L/pi)^(2s - 1)`` at
    real ``s`` away from its poles.
    """
    if not L > 0:
        raise ValueError(f"stripe width must be positive, got {L}")
    return (math.sqrt(math.pi) * riemann_zeta(2.0 * s - 1.0) * math.gamma(s - 0.5)
            / math.gamma(s) * (L / math.pi) ** (2.0 * s - 1.0))


def stripe_special_values(L):
    if not L > 0:
        raise ValueError(f"stripe width must be positive, got {L}")
    return {"res_at_1": 0.5 * L, "res_at_half": -0.5, "value_at_0": 0.0,
            "res_at_minus_half": 0.0, "prime_at_0": math.pi ** 2 / (6.0 * L)}


def stripe_limit_residual(R, L, dps=80):
    """``(|zeta'(0)/R - pi^2/(6L)|, 3 exp(-2 pi^2 R/L))`` for the cylinder of radius ``R``.

    Computed at ``dps`` digits: the gap is far below binary64 roundoff once
    ``R/L`` exceeds about 2.
    """
    prof = make_profile("constant", (R,), (0.0, L))
    with mpmath.workdps(dps):
        zp = zeta_prime0_mp(prof, dps)
        gap = abs(zp / R - mpmath.pi ** 2 / (6 * mpmath.mpf(L)))
        bound = 3 * mpmath.exp(-2 * mpmath.pi ** 2 * mpmath.mpf(R) / mpmath.mpf(L))
    return gap, bound
