"""Special values of the spectral zeta function and its determinant.

The spectrum splits into the ``k = 0`` tower (``zeta_1``) and the doubly
degenerate towers ``k >= 1`` (``zeta_2``).  Closed forms at ``s = 1, 1/2, 0,
-1/2`` and the derivative at zero come from the WKB expansion of the shooting
function; direct eigenvalue sums and the contour integral of ``ln D_0`` are
kept as independent numerical routes.
"""

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .errors import ConsistencyError, CoverageError, DomainError
from .profile import DEFAULT_QUADRATURE, QuadratureSpec, geometric_invariants, integrate
from .sturm import DEFAULT_ODE, ModeProblem, d_log_D, eigenvalues
from .wkb import wkb1

__all__ = [
    "ZETA_R_AT_0", "ZETA_R_PRIME_AT_0", "ZETA_R_AT_MINUS_1",
    "euler_phi", "log_euler_phi", "log_euler_phi_mp", "euler_identity_residual",
    "riemann_zeta", "Zeta1Special", "Zeta2Special", "ZetaSpecialValues",
    "zeta1_special", "zeta2_special", "full_special_values",
    "zeta1_prime0", "zeta2_prime0", "zeta2_prime0_forms", "DeterminantReport", "determinant",
    "zeta_prime0_mp", "WeylTail", "count_spread", "DirectSum", "zeta_direct_sum", "residue_probe",
    "zeta1_direct_sum", "zeta1_integral",
]

ZETA_R_AT_0 = -0.5
ZETA_R_PRIME_AT_0 = -0.5 * math.log(2.0 * math.pi)
ZETA_R_AT_MINUS_1 = -1.0 / 12.0

CONSISTENCY_TOL = 1e-10
PARTS_TOL = 1e-12

# below this q the binary64 product is accurate to a few ulp
_FLOAT_PRODUCT_MAX_Q = 0.5
_TRUNCATION = 1e-17


def _check_q(q):
    if not 0.0 <= q < 1.0:
        raise DomainError(f"Euler function needs 0 <= q < 1, got {q}")


def log_euler_phi(q):
    """``ln prod_{k>=1} (1 - q^k)``.

    Factors are dropped once ``|ln(1 - q^k)| < 1e-17``.  For ``q > 0.5`` the
    product is accumulated at 30 digits: near ``q = 1`` the leading factors
    ``1 - q^k`` are small and each binary64 factor would lose ``~log10(1/(1-q))``
    digits.
    """
    q = float(q)
    _check_q(q)
    if q == 0.0:
        return 0.0
    if q > _FLOAT_PRODUCT_MAX_Q:
        return float(log_euler_phi_mp(q, 30))
    terms = []
    qk = q
    while True:
        t = math.log1p(-qk)
        if abs(t) < _TRUNCATION:
            break
        terms.append(t)
        qk *= q
    return math.fsum(terms)


def log_euler_phi_mp(q, dps=30):
    """:func:`log_euler_phi` in mpmath arithmetic with ``dps`` digits (returns mpf)."""
    with mpmath.workdps(dps + 5):
        q = mpmath.mpf(q)
        if not 0 <= q < 1:
            raise DomainError(f"Euler function needs 0 <= q < 1, got {q}")
        eps = mpmath.mpf(10) ** (-dps - 2)
        total = mpmath.mpf(0)
        qk = q
        while qk > 0:
            t = mpmath.log1p(-qk)
            if abs(t) < eps:
                break
            total += t
            qk *= q
        return +total


def euler_phi(q):
    """Euler function ``phi(q) = prod_{k>=1} (1 - q^k)`` for ``0 <= q < 1``."""
    q = float(q)
    _check_q(q)
    if q > _FLOAT_PRODUCT_MAX_Q:
        # exp of a rounded log of size ~1/(1 - q) would cost that many ulps
        with mpmath.workdps(30):
            return float(mpmath.exp(log_euler_phi_mp(q, 30)))
    return math.exp(log_euler_phi(q))


def euler_identity_residual(r):
    """``ln phi(e^{-2 pi r}) - ln phi(e^{-2 pi/r}) - ((pi/6)(r - 1/r) - ln r)/2``."""
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    lhs = log_euler_phi(math.exp(-2.0 * math.pi * r)) - log_euler_phi(math.exp(-2.0 * math.pi / r))
    return lhs - 0.5 * (math.pi / 6.0 * (r - 1.0 / r) - math.log(r))


def _borwein_d(n):
    d = [0] * (n + 1)
    acc = 0
    for i in range(n + 1):
        acc += math.factorial(n + i - 1) * 4 ** i * n // (math.factorial(n - i) * math.factorial(2 * i))
        d[i] = acc
    return d


_BORWEIN_N = 60
_BORWEIN_D = _borwein_d(_BORWEIN_N)


def riemann_zeta(s):
    """Riemann zeta at real ``s != 1``.

    Borwein's accelerated alternating series for ``eta(s)`` when ``s >= 1/2``,
    the functional equation below.
    """
    s = float(s)
    if s == 1.0:
        raise DomainError("zeta has a pole at s = 1")
    if s == 0.0:
        return ZETA_R_AT_0
    if s < 0.5:
        if s == math.floor(s) and s < 0 and int(s) % 2 == 0:
            return 0.0
        return (2.0 ** s * math.pi ** (s - 1.0) * math.sin(0.5 * math.pi * s)
                * math.gamma(1.0 - s) * riemann_zeta(1.0 - s))
    n = _BORWEIN_N
    dn = _BORWEIN_D[n]
    terms = []
    for k in range(n):
        c = (_BORWEIN_D[k] - dn) / dn
        terms.append((-1.0) ** k * c / (k + 1.0) ** s)
    eta = -math.fsum(terms)
    return eta / -math.expm1((1.0 - s) * math.log(2.0))


# ---------------------------------------------------------------- special values

@dataclass(frozen=True)
class Zeta1Special:
    res_at_half: float
    value_at_0: float
    res_at_minus_half: float
    value_at_minus_1: float


@dataclass(frozen=True)
class Zeta2Special:
    res_at_1: float
    res_at_half: float
    value_at_0: float
    res_at_minus_half: float


@dataclass(frozen=True)
class ZetaSpecialValues:
    res_at_1: float
    res_at_half: float
    value_at_0: float
    res_at_minus_half: float
    zeta1_at_minus_1: float
    zeta1: Zeta1Special = field(repr=False)
    zeta2: Zeta2Special = field(repr=False)

    def to_json(self):
        return {
            "res_at_1": self.res_at_1,
            "res_at_half": self.res_at_half,
            "value_at_0": self.value_at_0,
            "res_at_minus_half": self.res_at_minus_half,
            "zeta1_at_minus_1": self.zeta1_at_minus_1,
            "parts": {"zeta1": dict(self.zeta1.__dict__), "zeta2": dict(self.zeta2.__dict__)},
        }


def _boundary_minus_half(profile):
    """Endpoint sum in the residue of ``zeta`` at ``-1/2``."""
    total = 0.0
    for x in (profile.a, profile.b):
        f, fp, fpp = profile.eval(x)
        g2 = 1.0 + fp * fp
        total += (0.125 * fp * fp / g2 + fpp * f / (g2 * g2)) / (32.0 * f)
    return 0.0 - total


def zeta1_special(profile, quad=DEFAULT_QUADRATURE):
    """Residues of ``zeta_1`` at 1/2 and -1/2, values at 0 and -1."""
    inv = geometric_invariants(profile, quad)
    t1 = wkb1(profile, profile.a).t1 + wkb1(profile, profile.b).t1
    return Zeta1Special(
        res_at_half=inv.arc_length / (2.0 * math.pi),
        value_at_0=-0.5,
        res_at_minus_half=inv.I_s1 / (2.0 * math.pi),
        value_at_minus_1=0.25 * t1,
    )


def zeta2_special(profile, quad=DEFAULT_QUADRATURE):
    """Residues of ``zeta_2`` at 1, 1/2, -1/2 and its value at 0."""
    inv = geometric_invariants(profile, quad)
    return Zeta2Special(
        res_at_1=inv.area / (4.0 * math.pi),
        res_at_half=-inv.arc_length / (2.0 * math.pi) - 0.25 * (inv.radius_a + inv.radius_b),
        value_at_0=0.5,
        res_at_minus_half=-inv.I_s1 / (2.0 * math.pi) + _boundary_minus_half(profile),
    )


def full_special_values(profile, quad=DEFAULT_QUADRATURE):
    """Residues and values of the full zeta function.

    The closed-form values (area, boundary radii, endpoint curvature terms) are
    compared with the sum of the two parts; the bulk integrals cancel between
    them.
    """
    z1 = zeta1_special(profile, quad)
    z2 = zeta2_special(profile, quad)
    inv = geometric_invariants(profile, quad)
    out = ZetaSpecialValues(
        res_at_1=inv.area / (4.0 * math.pi),
        res_at_half=-0.25 * (inv.radius_a + inv.radius_b),
        value_at_0=0.0,
        res_at_minus_half=_boundary_minus_half(profile),
        zeta1_at_minus_1=z1.value_at_minus_1,
        zeta1=z1,
        zeta2=z2,
    )
    checks = [
        ("res_at_1", z2.res_at_1, out.res_at_1),
        ("res_at_half", z1.res_at_half + z2.res_at_half, out.res_at_half),
        ("value_at_0", z1.value_at_0 + z2.value_at_0, out.value_at_0),
        ("res_at_minus_half", z1.res_at_minus_half + z2.res_at_minus_half, out.res_at_minus_half),
    ]
    for name, parts, whole in checks:
        if abs(parts - whole) > PARTS_TOL * max(1.0, abs(whole)):
            raise ConsistencyError(f"{name}: parts sum {parts!r} != closed form {whole!r}")
    return out


# ---------------------------------------------------------------- derivative at 0

def zeta1_prime0(profile, quad=DEFAULT_QUADRATURE):
    """``zeta_1'(0) = -(ln f(a) + ln f(b))/2 - ln(2A)``."""
    inv = geometric_invariants(profile, quad)
    return -0.5 * (math.log(inv.radius_a) + math.log(inv.radius_b)) - math.log(2.0 * inv.A)


def zeta2_prime0_forms(profile, quad=DEFAULT_QUADRATURE):
    """Both closed forms of ``zeta_2'(0)``: ``(direct, modular)``.

    The direct form uses ``phi(e^{-2A})``, the modular one ``phi(e^{-2 pi^2/A})``.
    """
    inv = geometric_invariants(profile, quad)
    A = inv.A
    common = (0.5 * (math.log(inv.radius_a) + math.log(inv.radius_b))
              + inv.I_curv1 / 6.0 + 0.5 * inv.I_curv2)
    direct = -2.0 * log_euler_phi(math.exp(-2.0 * A)) + A / 6.0 + math.log(2.0 * math.pi) + common
    modular = (-2.0 * log_euler_phi(math.exp(-2.0 * math.pi ** 2 / A))
               + math.pi ** 2 / (6.0 * A) + math.log(2.0 * A) + common)
    return direct, modular


def zeta2_prime0(profile, quad=DEFAULT_QUADRATURE):
    """``zeta_2'(0)`` from the modular form, with ``|direct - modular|``.

    Raises :class:`ConsistencyError` if the two forms differ by more than 1e-10.
    """
    direct, modular = zeta2_prime0_forms(profile, quad)
    residual = abs(direct - modular)
    if residual > CONSISTENCY_TOL:
        raise ConsistencyError(f"zeta_2'(0) forms disagree by {residual:.3e}")
    return modular, residual


@dataclass(frozen=True)
class DeterminantReport:
    A: float
    q: float
    euler_phi_q: float
    zeta1_prime0: float
    zeta2_prime0: float
    zeta_prime0: float
    log_det: float
    det: float
    zeta2_prime0_direct: float
    parts_residual: float
    forms_residual: float

    def to_json(self):
        return dict(self.__dict__)


def determinant(profile, quad=DEFAULT_QUADRATURE):
    """``zeta'(0)`` and ``det = exp(-zeta'(0))`` with consistency checks."""
    inv = geometric_invariants(profile, quad)
    A = inv.A
    q = math.exp(-2.0 * math.pi ** 2 / A)
    lphi = log_euler_phi(q)
    zp = -2.0 * lphi + math.pi ** 2 / (6.0 * A) + inv.I_curv1 / 6.0 + 0.5 * inv.I_curv2
    z1 = zeta1_prime0(profile, quad)
    direct, modular = zeta2_prime0_forms(profile, quad)
    forms_residual = abs(direct - modular)
    parts_residual = max(abs(zp - (z1 + direct)), abs(zp - (z1 + modular)))
    if forms_residual > CONSISTENCY_TOL or parts_residual > CONSISTENCY_TOL:
        raise ConsistencyError(
            f"determinant routes disagree: forms {forms_residual:.3e}, parts {parts_residual:.3e}")
    log_det = -zp
    return DeterminantReport(
        A=A, q=q, euler_phi_q=math.exp(lphi), zeta1_prime0=z1, zeta2_prime0=modular,
        zeta_prime0=zp, log_det=log_det, det=math.exp(log_det),
        zeta2_prime0_direct=direct, parts_residual=parts_residual, forms_residual=forms_residual)


def zeta_prime0_mp(profile, dps=60):
    """``zeta'(0)`` in mpmath arithmetic (integrals by tanh-sinh quadrature)."""
    with mpmath.workdps(dps + 10):
        a, b = mpmath.mpf(profile.a), mpmath.mpf(profile.b)

        def quad(expr):
            return mpmath.quad(lambda x: expr(*profile.eval_mp(x)), [a, b])

        A = quad(lambda f, fp, fpp: mpmath.sqrt(1 + fp ** 2) / f)
        c1 = quad(lambda f, fp, fpp: fp ** 2 / (f * mpmath.sqrt(1 + fp ** 2)))
        c2 = quad(lambda f, fp, fpp: fpp / (1 + fp ** 2) ** mpmath.mpf(1.5))
        q = mpmath.exp(-2 * mpmath.pi ** 2 / A)
        out = -2 * log_euler_phi_mp(q, dps + 10) + mpmath.pi ** 2 / (6 * A) + c1 / 6 + c2 / 2
    return +out


# ---------------------------------------------------------------- direct sums

MIN_DIRECT_MODES = 1000
WEYL_WINDOW = (0.25, 1.0)

@dataclass(frozen=True)
class WeylTail:
    """Two-term counting function ``N(lam) ~ density lam - boundary sqrt(lam)``."""

    density: float
    boundary: float = 0.0

    @classmethod
    def from_profile(cls, profile, quad=DEFAULT_QUADRATURE, boundary=True):
        inv = geometric_invariants(profile, quad)
        perimeter = 2.0 * math.pi * (inv.radius_a + inv.radius_b)
        return cls(inv.area / (4.0 * math.pi), perimeter / (4.0 * math.pi) if boundary else 0.0)

    @classmethod
    def fit(cls, table, window=WEYL_WINDOW):
        """Least-squares fit of the table's counting function on ``window * lambda_cut``.

        Uses only the eigenvalues, so residue checks built on it stay
        independent of the geometry.
        """
        lam, counts = _window_counts(table, window)
        design = np.column_stack([lam, -np.sqrt(lam), np.ones_like(lam)])
        coef, *_ = np.linalg.lstsq(design, counts, rcond=None)
        return cls(float(coef[0]), float(coef[1]))

    def count(self, lam):
        return self.density * lam - self.boundary * np.sqrt(lam)

    def integral(self, s, lam_cut):
        """``int_{lam_cut}^inf lam^{-s} dN`` of the model counting function."""
        return (self.density * lam_cut ** (1.0 - s) / (s - 1.0)
                - 0.5 * self.boundary * lam_cut ** (0.5 - s) / (s - 0.5))


def _window_counts(table, window):
    if table.lambda_cut is None:
        raise CoverageError("table has no coverage bound (build it with spectrum_below)")
    order = np.argsort(table.lam, kind="stable")
    lam = table.lam[order]
    mult = table.multiplicity[order]
    counts = np.cumsum(mult) - 0.5 * mult
    sel = (lam >= window[0] * table.lambda_cut) & (lam <= window[1] * table.lambda_cut)
    if sel.sum() < 20:
        raise CoverageError("too few eigenvalues in the Weyl window")
    return lam[sel], counts[sel]


def count_spread(table, tail, window=WEYL_WINDOW):
    """Largest ``|N(lam) - tail.count(lam)|`` over the upper part of the table."""
    lam, counts = _window_counts(table, window)
    resid = counts - tail.count(lam)
    # a constant offset does not reach the tail integral
    return float(np.max(np.abs(resid - np.median(resid))))


@dataclass(frozen=True)
class DirectSum:
    value: float
    partial: float
    tail: float
    tail_bound: float




def zeta_direct_sum(table, s, tail):
    """``sum lam^{-s}`` over the table (with multiplicity) plus the Weyl tail."""
    if not s > 1:
        raise DomainError(f"direct sum converges only for s > 1, got {s}")
    table.require_coverage(MIN_DIRECT_MODES)
    lam = table.lam
    order = np.argsort(-lam, kind="stable")  # smallest terms first
    partial = math.fsum((table.multiplicity[order] * lam[order] ** (-s)).tolist())
    t = tail.integral(s, table.lambda_cut)
    # integrating lam^{-s} d(N - model) by parts gives at most twice the spread
    bound = 2.0 * count_spread(table, tail) * table.lambda_cut ** (-s)
    return DirectSum(partial + t, partial, t, bound)


def residue_probe(table, tail, s_values=(1.05, 1.02, 1.01)):
    """Extrapolate ``(s - 1) zeta(s)`` to ``s = 1`` by a polynomial in ``s - 1``."""
    h = np.array([s - 1.0 for s in s_values])
    g = np.array([(s - 1.0) * zeta_direct_sum(table, s, tail).value for s in s_values])
    coef = np.polyfit(h, g, len(h) - 1)
    return float(coef[-1])


def zeta1_direct_sum(profile, s, n_max=200, bisect_tol=1e-12):
    """``sum_n lam_{0,n}^{-s}`` for ``s > 1/2``.

    The first ``n_max`` eigenvalues are summed; beyond them
    ``lam_n = (pi/l)^2 (n^2 + beta + gamma/n^2)`` with ``l`` the arc length and
    ``beta``, ``gamma`` fitted on the upper half, and the tail is expanded into
    Hurwitz zeta values.
    """
    if not s > 0.5:
        raise DomainError(f"k = 0 sum converges only for s > 1/2, got {s}")
    lam = eigenvalues(ModeProblem(profile, 0), n_max, bisect_tol)
    ell = geometric_invariants(profile).arc_length
    n = np.arange(1, n_max + 1, dtype=float)
    sel = n > n_max / 2
    shift = lam * (ell / math.pi) ** 2 - n ** 2
    coef, *_ = np.linalg.lstsq(np.column_stack([np.ones(sel.sum()), n[sel] ** -2]),
                               shift[sel], rcond=None)
    beta, gamma = coef
    lead = (math.pi / ell) ** (-2.0 * s)
    start = n_max + 1
    tail = lead * (hurwitz_zeta(2 * s, start) - s * beta * hurwitz_zeta(2 * s + 2, start)
                   + (0.5 * s * (s + 1) * beta ** 2 - s * gamma) * hurwitz_zeta(2 * s + 4, start))
    return math.fsum((lam[::-1] ** (-s)).tolist()) + float(tail)


# ---------------------------------------------------------------- 1-D contour integral

_Z_SPLIT = 64.0
_INTEGRAL_QUAD = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13, max_subdivisions=4000)


def zeta1_integral(profile, s, ode=DEFAULT_ODE, z_max=_Z_SPLIT):
    """``zeta_1(s)`` for ``1/2 < s < 1`` from ``(sin pi s/pi) int y^{-s} d ln D_0(-y)``.

    On ``y < 1`` the substitution ``y = v^{1/(1-s)}`` removes the end-point
    singularity.  For ``y = z^2 > 1`` the four leading terms of the large-``z``
    expansion of ``d ln D_0/dz`` are subtracted and integrated exactly; the
    subtracted integrand is integrated up to ``z_max`` and its ``z^{-4}``
    remainder beyond that is estimated from the value at ``z_max``.
    """
    if not 0.5 < s < 1.0:
        raise DomainError(f"s must lie in (1/2, 1), got {s}")
    problem = ModeProblem(profile, 0)
    inv = geometric_invariants(profile)
    t1 = wkb1(profile, profile.a).t1 + wkb1(profile, profile.b).t1
    c0, c1, c2, c3 = inv.arc_length, 1.0, inv.I_s1, 0.5 * t1

    def slope(y):
        return d_log_D(problem, y, ode)

    def inner(vs):
        return np.array([slope(v ** (1.0 / (1.0 - s))) for v in vs]) / (1.0 - s)

    def outer_remainder(z):
        return 2.0 * z * slope(z * z) - (c0 - c1 / z - c2 / z ** 2 - c3 / z ** 3)

    def outer(zs):
        return np.array([z ** (-2.0 * s) * outer_remainder(z) for z in zs])

    part1 = integrate(inner, 0.0, 1.0, _INTEGRAL_QUAD)
    part2 = integrate(outer, 1.0, z_max, _INTEGRAL_QUAD)
    c4 = outer_remainder(z_max) * z_max ** 4
    part2 += c4 * z_max ** (-2.0 * s - 3.0) / (2.0 * s + 3.0)
    exact = c0 / (2 * s - 1) - c1 / (2 * s) - c2 / (2 * s + 1) - c3 / (2 * s + 2)
    return math.sin(math.pi * s) / math.pi * (part1 + part2 + exact)
