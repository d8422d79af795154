"""Profile functions of surfaces of revolution and their geometric functionals.

A surface is generated by revolving the graph of ``f > 0`` on ``[a, b]``
about the x-axis.  Profiles come from a small analytic catalog so that
``f'`` and ``f''`` are exact:

==============  ==============================  =====================================
tag             parameters                      f(x)
==============  ==============================  =====================================
constant        c                               c
linear          c0, c1                          c0 + c1 x
catenoid        c, x0                           c cosh((x - x0)/c)
polynomial      coefficients (ascending)        sum_i coefficients[i] x**i
cosine-bump     base, amp, period, phase=0      base + amp cos(2 pi x/period + phase)
==============  ==============================  =====================================
"""

import functools
import hashlib
import heapq
import json
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import _kernels
from .errors import DomainError, ProfileError, QuadratureError

__all__ = [
    "Interval", "Profile", "QuadratureSpec", "GeometricInvariants",
    "make_profile", "profile_from_json", "load_profile", "integrate",
    "geometric_invariants", "standard_profiles",
]

_PARAM_NAMES = {
    "constant": ("c",),
    "linear": ("c0", "c1"),
    "catenoid": ("c", "x0"),
    "polynomial": ("coefficients",),
    "cosine-bump": ("base", "amp", "period", "phase"),
}
_CODES = {
    "constant": _kernels.CONSTANT,
    "linear": _kernels.LINEAR,
    "catenoid": _kernels.CATENOID,
    "polynomial": _kernels.POLYNOMIAL,
    "cosine-bump": _kernels.COSINE_BUMP,
}
POSITIVITY_SAMPLES = 1000


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"interval endpoints must be finite, got [{self.a}, {self.b}]")
        if not self.a < self.b:
            raise DomainError(f"interval requires a < b, got [{self.a}, {self.b}]")

    @property
    def length(self):
        return self.b - self.a


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class Profile:
    """Catalog profile on a domain.

    ``params`` holds the catalog parameters in the canonical order of the
    shape (polynomial coefficients ascending).  Construct through
    :func:`make_profile`, which validates positivity.
    """

    shape: str
    params: tuple
    domain: Interval

    @property
    def a(self):
        return self.domain.a

    @property
    def b(self):
        return self.domain.b

    @functools.cached_property
    def _code(self):
        return _CODES[self.shape]

    @functools.cached_property
    def _prm(self):
        arr = np.asarray(self.params, dtype=float)
        arr.setflags(write=False)
        return arr

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Return ``(f, f', f'')`` at a point of the domain."""
        x = float(x)
        if not self.a <= x <= self.b:
            raise DomainError(f"x={x} outside [{self.a}, {self.b}]")
        return _kernels.profile_eval(self._code, self._prm, x)

    def eval_array(self, xs):
        """Vectorised :meth:`eval` without the domain check."""
        xs = np.ascontiguousarray(xs, dtype=float)
        return _kernels.profile_eval_array(self._code, self._prm, xs.ravel())

    def eval_mp(self, x):
        """Evaluate ``(f, f', f'')`` in mpmath arithmetic at the current precision."""
        x = mpmath.mpf(x)
        prm = [mpmath.mpf(v) for v in self.params]
        if self.shape == "constant":
            return prm[0], mpmath.mpf(0), mpmath.mpf(0)
        if self.shape == "linear":
            return prm[0] + prm[1] * x, prm[1], mpmath.mpf(0)
        if self.shape == "catenoid":
            w = (x - prm[1]) / prm[0]
            return prm[0] * mpmath.cosh(w), mpmath.sinh(w), mpmath.cosh(w) / prm[0]
        if self.shape == "polynomial":
            f = mpmath.polyval(prm[::-1], x)
            d = [i * c for i, c in enumerate(prm)][1:] or [mpmath.mpf(0)]
            dd = [i * c for i, c in enumerate(d)][1:] or [mpmath.mpf(0)]
            return f, mpmath.polyval(d[::-1], x), mpmath.polyval(dd[::-1], x)
        om = 2 * mpmath.pi / prm[2]
        arg = om * x + prm[3]
        return (prm[0] + prm[1] * mpmath.cos(arg), -prm[1] * om * mpmath.sin(arg),
                -prm[1] * om ** 2 * mpmath.cos(arg))

    def to_json(self):
        names = _PARAM_NAMES[self.shape]
        if self.shape == "polynomial":
            params = {"coefficients": list(self.params)}
        else:
            params = dict(zip(names, self.params))
        return {"shape": self.shape, "params": params, "a": self.a, "b": self.b}

    @functools.cached_property
    def digest(self):
        """Short stable hash of the specification."""
        text = json.dumps(self.to_json(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def reflected(self):
        """Profile of ``x -> f(a + b - x)`` on the same domain."""
        s = self.a + self.b
        p = self.params
        if self.shape == "constant":
            new = p
        elif self.shape == "linear":
            new = (p[0] + p[1] * s, -p[1])
        elif self.shape == "catenoid":
            new = (p[0], s - p[1])
        elif self.shape == "polynomial":
            poly = np.polynomial.Polynomial(p)(np.polynomial.Polynomial([s, -1.0]))
            new = tuple(float(c) for c in poly.coef)
        else:
            new = (p[0], p[1], p[2], -p[3] - 2.0 * math.pi * s / p[2])
        return make_profile(self.shape, new, Interval(self.a, self.b))

    def scaled(self, c):
        """Profile of ``x -> c f(x / c)`` on ``[c a, c b]`` (homothety by ``c > 0``)."""
        if not c > 0:
            raise DomainError("scale factor must be positive")
        p = self.params
        if self.shape == "constant":
            new = (c * p[0],)
        elif self.shape == "linear":
            new = (c * p[0], p[1])
        elif self.shape == "catenoid":
            new = (c * p[0], c * p[1])
        elif self.shape == "polynomial":
            new = tuple(v * c ** (1 - i) for i, v in enumerate(p))
        else:
            new = (c * p[0], c * p[1], c * p[2], p[3])
        return make_profile(self.shape, new, Interval(c * self.a, c * self.b))


def _normalise_params(shape, params):
    names = _PARAM_NAMES[shape]
    if isinstance(params, dict):
        unknown = set(params) - set(names)
        if unknown:
            raise ProfileError(f"unknown parameters for {shape}: {sorted(unknown)}")
        if shape == "polynomial":
            if "coefficients" not in params:
                raise ProfileError("polynomial requires 'coefficients'")
            values = tuple(params["coefficients"])
        else:
            defaults = {"phase": 0.0}
            try:
                values = tuple(params[n] if n in params else defaults[n] for n in names)
            except KeyError as exc:
                raise ProfileError(f"{shape} requires parameter {exc.args[0]!r}") from None
    else:
        values = tuple(params)
        if shape == "cosine-bump" and len(values) == 3:
            values = values + (0.0,)
        if shape != "polynomial" and len(values) != len(names):
            raise ProfileError(f"{shape} takes parameters {names}, got {values}")
    try:
        values = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ProfileError(f"non-numeric parameters for {shape}: {values}") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise ProfileError(f"parameters must be finite and non-empty: {values}")
    if shape == "catenoid" and values[0] <= 0:
        raise ProfileError("catenoid requires c > 0")
    if shape == "cosine-bump" and values[2] <= 0:
        raise ProfileError("cosine-bump requires period > 0")
    return values


def make_profile(shape, params, domain):
    """Build and validate a catalog profile.

    Positivity is checked heuristically on ``POSITIVITY_SAMPLES`` uniform
    points plus both endpoints.

    Parameters
    ----------
    shape : str
        Catalog tag.
    params : dict or sequence
        Catalog parameters, by name or in canonical order.
    domain : Interval or (a, b)

    Raises
    ------
    ProfileError
        Unknown tag, bad parameters, or ``f <= 0`` at a sample point.
    """
    if shape not in _CODES:
        raise ProfileError(f"unknown profile shape {shape!r}; expected one of {sorted(_CODES)}")
    if not isinstance(domain, Interval):
        domain = Interval(*map(float, domain))
    profile = Profile(shape, _normalise_params(shape, params), domain)
    xs = np.linspace(domain.a, domain.b, POSITIVITY_SAMPLES + 2)
    f, fp, fpp = profile.eval_array(xs)
    bad = np.flatnonzero(~(f > 0))
    if bad.size:
        x0 = xs[bad[0]]
        raise ProfileError(f"profile not positive: f({float(x0)!r}) = {float(f[bad[0]])!r}")
    if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fpp))):
        raise ProfileError("profile derivatives not finite on the domain")
    return profile


def profile_from_json(doc):
    """Build a profile from ``{"shape", "params", "a", "b"}``."""
    if not isinstance(doc, dict):
        raise ProfileError("profile document must be a JSON object")
    missing = {"shape", "params", "a", "b"} - set(doc)
    if missing:
        raise ProfileError(f"profile document missing fields: {sorted(missing)}")
    try:
        domain = Interval(float(doc["a"]), float(doc["b"]))
    except (TypeError, ValueError, DomainError) as exc:
        raise ProfileError(f"bad interval: {exc}") from None
    return make_profile(doc["shape"], doc["params"], domain)


def load_profile(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProfileError(f"{path}: invalid JSON: {exc}") from None
    return profile_from_json(doc)


# 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[9:15:2] = _WG[2::-1]


def _panel(func, lo, hi):
    half = 0.5 * (hi - lo)
    fx = np.asarray(func(0.5 * (lo + hi) + half * NODES), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError(f"integrand not finite on [{lo}, {hi}]", math.nan, math.inf)
    high = half * math.fsum(KRONROD_WEIGHTS * fx)
    low = half * math.fsum(GAUSS_WEIGHTS * fx)
    return high, abs(high - low)


def integrate(func, a, b, spec=DEFAULT_QUADRATURE):
    """Globally adaptive Gauss-Kronrod (7/15) quadrature of ``func`` over ``[a, b]``.

    ``func`` is called with a 1-D array of abscissae and must return an
    array of the same shape.  The panel error is ``|K15 - G7|``; the panel
    with the largest error is bisected until the summed error is at most
    ``max(abs_tol, rel_tol * |value|)``.  Panel sums are accumulated with
    ``math.fsum`` in left-to-right order, so the result is deterministic.

    Raises
    ------
    QuadratureError
        When ``max_subdivisions`` bisections do not reach the tolerance.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    value, err = _panel(func, a, b)
    # heap of (-error, lo, hi, value)
    heap = [(-err, a, b, value)]
    for _ in range(spec.max_subdivisions):
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(-item[0] for item in heap)
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return _ordered_sum(heap)
        _, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        for x0, x1 in ((lo, mid), (mid, hi)):
            v, e = _panel(func, x0, x1)
            heapq.heappush(heap, (-e, x0, x1, v))
    total = _ordered_sum(heap)
    total_err = math.fsum(-item[0] for item in heap)
    if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
        return total
    raise QuadratureError(
        f"no convergence after {spec.max_subdivisions} subdivisions", total, total_err)


def _ordered_sum(heap):
    return math.fsum(v for _, lo, _, v in sorted(heap, key=lambda item: item[1]))


@dataclass(frozen=True)
class GeometricInvariants:
    """Quadrature functionals of a profile.

    ``A`` is the integral of ``sqrt(1 + f'^2) / f``; ``I_curv1`` and
    ``I_curv2`` are the integrals of ``f'^2 / (f sqrt(1 + f'^2))`` and
    ``f'' / (1 + f'^2)^(3/2)``; ``I_s1`` integrates the third 1-D WKB
    coefficient.
    """

    area: float
    arc_length: float
    radius_a: float
    radius_b: float
    A: float
    I_curv1: float
    I_curv2: float
    I_s1: float

    def to_json(self):
        return dict(self.__dict__)


def _integrand(profile, expr):
    def fn(xs):
        f, fp, fpp = profile.eval_array(xs)
        return expr(f, fp, fpp)
    return fn


def s1_coefficient(f, fp, fpp):
    """Third 1-D WKB coefficient (vectorised)."""
    g2 = 1.0 + fp * fp
    return -fp * fp / (8.0 * f * f * np.sqrt(g2)) + fpp / (4.0 * f * g2 ** 1.5)


@functools.lru_cache(maxsize=256)
def geometric_invariants(profile, spec=DEFAULT_QUADRATURE):
    """Compute :class:`GeometricInvariants` of ``profile`` by :func:`integrate`."""
    a, b = profile.a, profile.b

    def quad(expr):
        return integrate(_integrand(profile, expr), a, b, spec)

    f_a = profile.eval(a)[0]
    f_b = profile.eval(b)[0]
    return GeometricInvariants(
        area=quad(lambda f, fp, fpp: 2.0 * np.pi * f * np.sqrt(1.0 + fp * fp)),
        arc_length=quad(lambda f, fp, fpp: np.sqrt(1.0 + fp * fp)),
        radius_a=f_a,
        radius_b=f_b,
        A=quad(lambda f, fp, fpp: np.sqrt(1.0 + fp * fp) / f),
        I_curv1=quad(lambda f, fp, fpp: fp * fp / (f * np.sqrt(1.0 + fp * fp))),
        I_curv2=quad(lambda f, fp, fpp: fpp / (1.0 + fp * fp) ** 1.5),
        I_s1=quad(s1_coefficient),
    )


def profile_sup(profile, samples=POSITIVITY_SAMPLES):
    """Sampled maximum of ``f`` (a lower estimate of the true supremum)."""
    xs = np.linspace(profile.a, profile.b, samples + 2)
    return float(np.max(profile.eval_array(xs)[0]))


def standard_profiles():
    """The catalog profiles used throughout the test and verification suites."""
    return {
        "cylinder": make_profile("constant", (1.0,), (0.0, math.pi)),
        "frustum": make_profile("linear", (1.0, 0.5), (0.0, 2.0)),
        "catenoid": make_profile("catenoid", (1.0, 0.0), (-1.0, 1.0)),
        "cosine-bump": make_profile("cosine-bump", (1.0, 0.3, 2.0), (0.0, 2.0)),
        "polynomial": make_profile("polynomial", (1.0, 0.2, 0.5), (-1.0, 1.0)),
    }
