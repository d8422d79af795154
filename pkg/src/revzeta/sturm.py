"""Per-mode Sturm-Liouville problems: shooting, characteristic functions, spectra.

Separating ``u = phi(x) e^{i k theta}`` in the Laplacian of the surface gives

    phi'' + u(x) phi' + (lam - k^2/f^2)(1 + f'^2) phi = 0,
    u = f'/f - f' f''/(1 + f'^2),

which multiplied by ``p = f/sqrt(1+f'^2)`` is the self-adjoint problem
``(p phi')' - q phi + lam w phi = 0`` with ``w = f sqrt(1+f'^2)`` and
``q = k^2 sqrt(1+f'^2)/f``.  Solutions grow like ``exp(k A)`` on the negative
axis, so everything here is carried in logarithmic form.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import BracketError, CoverageError, DomainError, IntegrationError
from .profile import DEFAULT_QUADRATURE, geometric_invariants, profile_sup

__all__ = [
    "ModeProblem", "OdeSpec", "ShootingResult", "EigenvalueTable",
    "sl_coefficients", "shoot", "phi_at_zero", "log_phi_at_zero", "log_D", "d_log_D",
    "prufer_phase", "count_eigenvalues_below", "eigenvalues", "mode_table", "spectrum_below",
]


@dataclass(frozen=True)
class ModeProblem:
    profile: object
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"mode number must be a non-negative integer, got {self.k}")
        object.__setattr__(self, "k", int(self.k))


@dataclass(frozen=True)
class OdeSpec:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 2_000_000


DEFAULT_ODE = OdeSpec()
# eigenvalue work needs the phase well below the 1e-10 relative target on lambda
PRUFER_ODE = OdeSpec(rtol=1e-12, atol=1e-13)


@dataclass(frozen=True)
class ShootingResult:
    """``phi_k(lam; b)`` as ``sign * exp(log_abs)`` plus ``phi'/phi`` at ``b``."""

    log_abs: float
    sign: int
    log_derivative_at_b: float

    @property
    def value(self):
        return self.sign * math.exp(self.log_abs)


def sl_coefficients(problem, x):
    """Self-adjoint coefficients ``(p, q, w)`` at ``x``."""
    f, fp, _ = problem.profile.eval(x)
    g = math.sqrt(1.0 + fp * fp)
    return f / g, problem.k ** 2 * g / f, f * g


def _check(status, what):
    if status == _kernels.STEP_UNDERFLOW:
        raise IntegrationError(f"{what}: step size underflow")
    if status == _kernels.STEP_BUDGET:
        raise IntegrationError(f"{what}: step budget exhausted")


def _log_system(problem, lam, ode):
    prof = problem.profile
    y, status, _ = _kernels.log_shoot(prof._code, prof._prm, float(problem.k), float(lam),
                                      prof.a, prof.b, ode.rtol, ode.atol, ode.max_steps)
    _check(status, f"log shooting k={problem.k} lam={lam}")
    if not y[0] > 0.0:
        raise IntegrationError(
            f"phi/(p phi') = {y[0]} at b for lam={lam} <= 0; the solution must stay positive")
    return y


def _prufer_delta2(problem):
    """Floor of the Prufer scale ``S^2``: the lowest Dirichlet level of ``p`` at mid-domain."""
    prof = problem.profile
    f, fp, _ = prof.eval(0.5 * (prof.a + prof.b))
    p = f / math.sqrt(1.0 + fp * fp)
    return (math.pi * p / prof.domain.length) ** 2


def _prufer(problem, lam, ode):
    prof = problem.profile
    y, status, _ = _kernels.prufer_shoot(prof._code, prof._prm, float(problem.k), float(lam),
                                         _prufer_delta2(problem), prof.a, prof.b, ode.rtol,
                                         ode.atol, ode.max_steps)
    _check(status, f"Prufer k={problem.k} lam={lam}")
    return y


def shoot(problem, lam, ode=DEFAULT_ODE):
    """Solve the mode equation with ``phi(a) = 0, phi'(a) = 1`` and report it at ``b``.

    For ``lam <= 0`` the log system (``phi/(p phi')`` and ``ln(p phi')``) is
    integrated and the solution is positive on ``(a, b]``; for ``lam > 0`` the
    scaled Prufer system with amplitude is used.
    """
    lam = float(lam)
    prof = problem.profile
    f, fp, _ = prof.eval(prof.b)
    p_b = f / math.sqrt(1.0 + fp * fp)
    if lam <= 0.0:
        y = _log_system(problem, lam, ode)
        return ShootingResult(float(math.log(y[0]) + y[1]), 1, float(1.0 / (p_b * y[0])))
    scale = _kernels.prufer_scale_at(f, float(problem.k), lam, _prufer_delta2(problem))
    theta, log_rho = _prufer(problem, lam, ode)
    s = math.sin(theta)
    log_abs = log_rho + math.log(max(abs(s), 1e-300)) - math.log(scale)
    deriv = scale * math.cos(theta) / (p_b * s) if s != 0.0 else math.inf
    return ShootingResult(float(log_abs), 1 if s >= 0 else -1, float(deriv))


def log_phi_at_zero(problem, quad=DEFAULT_QUADRATURE):
    """Logarithm of the closed form of ``phi_k(0; b)``.

    ``phi_0(0; b) = p(a) A`` and ``phi_k(0; b) = p(a) sinh(k A) / k`` for ``k >= 1``.
    """
    prof = problem.profile
    A = geometric_invariants(prof, quad).A
    f, fp, _ = prof.eval(prof.a)
    log_pa = math.log(f / math.sqrt(1.0 + fp * fp))
    k = problem.k
    if k == 0:
        return log_pa + math.log(A)
    return log_pa + k * A + math.log1p(-math.exp(-2.0 * k * A)) - math.log(2.0 * k)


def phi_at_zero(problem, quad=DEFAULT_QUADRATURE):
    """Closed form of ``phi_k(0; b)``; ``inf`` once it exceeds the float range."""
    log_value = log_phi_at_zero(problem, quad)
    return math.exp(log_value) if log_value < 709.0 else math.inf


def log_D(problem, y, ode=DEFAULT_ODE, quad=DEFAULT_QUADRATURE):
    """``ln D_k(-y) = ln phi_k(-y; b) - ln phi_k(0; b)`` for ``y > 0``."""
    if not y > 0:
        raise DomainError(f"log_D requires y > 0, got {y}")
    return shoot(problem, -y, ode).log_abs - log_phi_at_zero(problem, quad)


def d_log_D(problem, y, ode=DEFAULT_ODE):
    """``d/dy ln D_k(-y)``, from the variational equation in ``lam``.

    Equals ``sum_n 1/(lam_{k,n} + y)``; positive and decreasing in ``y``.
    """
    if not y >= 0:
        raise DomainError(f"d_log_D requires y >= 0, got {y}")
    return float(_log_system(problem, -float(y), ode)[3])


def prufer_phase(problem, lam, ode=PRUFER_ODE):
    """Prufer angle ``theta(b)``; ``floor(theta(b)/pi)`` eigenvalues lie below ``lam``."""
    return float(_prufer(problem, lam, ode)[0])


def count_eigenvalues_below(problem, lam, ode=PRUFER_ODE):
    """Number of ``n`` with ``lam_{k,n} < lam``."""
    if not lam > 0:
        raise DomainError(f"count requires lam > 0, got {lam}")
    return max(0, int(math.floor(prufer_phase(problem, lam, ode) / math.pi)))


def _lower_bound(problem, ode):
    """A value below ``lam_{k,1}``: ``min q/w`` from the sampled max of ``f``."""
    lo = problem.k ** 2 / profile_sup(problem.profile) ** 2
    while lo > 0 and count_eigenvalues_below(problem, lo, ode) > 0:
        lo *= 0.5
    return lo


def _weyl_guess(problem, n):
    inv = geometric_invariants(problem.profile)
    return (n * math.pi / inv.arc_length) ** 2 + problem.k ** 2 / max(inv.radius_a, inv.radius_b) ** 2


def eigenvalues(problem, n_max, bisect_tol=1e-10, ode=PRUFER_ODE):
    """First ``n_max`` eigenvalues of mode ``k``.

    Brackets come from Prufer counts on a geometric grid seeded by the Weyl
    estimate; each eigenvalue is then the root of ``theta(b; lam) - n pi``
    (which vanishes only at the eigenvalue, whatever the scale ``S``) refined
    to relative tolerance ``bisect_tol``.

    Returns
    -------
    numpy.ndarray
        ``lam_{k,1} < ... < lam_{k,n_max}``.

    Raises
    ------
    BracketError
        If no bracket for some ``n`` is found.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    lo = _lower_bound(problem, ode)
    grid = [lo]
    counts = [0]
    hi = max(_weyl_guess(problem, 1), 2.0 * lo, 1e-12)
    for _ in range(200):
        c = count_eigenvalues_below(problem, hi, ode)
        grid.append(hi)
        counts.append(c)
        if c >= n_max:
            break
        hi *= 1.5
    else:
        raise BracketError("eigenvalue scan did not reach the requested count", counts[-1] + 1)
    out = np.empty(n_max)
    left = lo
    j = 1
    for n in range(1, n_max + 1):
        while counts[j] < n:
            j += 1
        right = grid[j]
        left = max(left, grid[j - 1])
        target = n * math.pi

        def g(lam):
            return prufer_phase(problem, lam, ode) - target

        g_left = g(left) if left > 0 else -target
        g_right = g(right)
        # a grid point can sit on an eigenvalue to rounding; step off it
        for _ in range(8):
            if g_right > 0:
                break
            right *= 1.0 + 1e-9
            g_right = g(right)
        for _ in range(8):
            if g_left < 0:
                break
            left *= 1.0 - 1e-9
            g_left = g(left)
        if not (g_left < 0 < g_right):
            raise BracketError(f"lost bracket [{left}, {right}] for mode k={problem.k}", n)
        if left > 0:
            root = brentq(g, left, right, xtol=1e-300, rtol=max(bisect_tol, 4.5e-16), maxiter=200)
        else:
            root = brentq(g, 1e-300, right, xtol=1e-300, rtol=max(bisect_tol, 4.5e-16), maxiter=200)
        out[n - 1] = root
        left = root
    return out


@dataclass(frozen=True, eq=False)
class EigenvalueTable:
    """Mode-resolved spectrum: rows ``(k, n, lam)`` sorted by ``(k, n)``.

    ``lambda_cut`` is the coverage bound: every eigenvalue below it is
    present (``None`` if the table was not built by :func:`spectrum_below`).
    Modes with ``k >= 1`` have multiplicity 2.
    """

    k: np.ndarray
    n: np.ndarray
    lam: np.ndarray
    tol: float
    profile_hash: str = ""
    lambda_cut: float = None

    def __len__(self):
        return int(self.lam.size)

    @property
    def multiplicity(self):
        return np.where(self.k == 0, 1, 2)

    @property
    def mode_count(self):
        """Number of eigenvalues counted with multiplicity."""
        return int(self.multiplicity.sum())

    def mode(self, k):
        return self.lam[self.k == k]

    def to_json(self):
        doc = {
            "entries": [{"k": int(k), "n": int(n), "lambda": float(v)}
                        for k, n, v in zip(self.k, self.n, self.lam)],
            "tol": self.tol,
            "profile_hash": self.profile_hash,
        }
        if self.lambda_cut is not None:
            doc["lambda_cut"] = self.lambda_cut
        return doc

    @classmethod
    def from_json(cls, doc):
        entries = doc["entries"]
        return cls.from_rows([(e["k"], e["n"], e["lambda"]) for e in entries], doc["tol"],
                             doc.get("profile_hash", ""), doc.get("lambda_cut"))

    @classmethod
    def from_rows(cls, rows, tol, profile_hash="", lambda_cut=None):
        rows = sorted(rows, key=lambda r: (r[0], r[1]))
        k = np.array([r[0] for r in rows], dtype=int)
        n = np.array([r[1] for r in rows], dtype=int)
        lam = np.array([r[2] for r in rows], dtype=float)
        for kk in np.unique(k):
            if np.any(np.diff(lam[k == kk]) <= 0):
                raise ValueError(f"eigenvalues of mode {kk} are not strictly increasing")
        if np.any(lam <= 0):
            raise ValueError("eigenvalues must be positive")
        return cls(k, n, lam, tol, profile_hash, lambda_cut)

    def require_coverage(self, min_modes):
        if self.lambda_cut is None:
            raise CoverageError("table has no coverage bound (build it with spectrum_below)")
        if self.mode_count < min_modes:
            raise CoverageError(
                f"table holds {self.mode_count} eigenvalues, at least {min_modes} required")


def mode_table(profile, k_max, n_max, bisect_tol=1e-10, ode=PRUFER_ODE):
    """Table of ``lam_{k,n}`` for ``0 <= k <= k_max``, ``1 <= n <= n_max`` (no coverage bound)."""
    rows = []
    for k in range(k_max + 1):
        lam = eigenvalues(ModeProblem(profile, k), n_max, bisect_tol, ode)
        rows.extend((k, n + 1, v) for n, v in enumerate(lam))
    return EigenvalueTable.from_rows(rows, bisect_tol, profile.digest)


def spectrum_below(profile, lambda_cut, bisect_tol=1e-10, ode=PRUFER_ODE):
    """All eigenvalues below ``lambda_cut``, every mode ``k`` with at least one."""
    rows = []
    k = 0
    while True:
        problem = ModeProblem(profile, k)
        count = count_eigenvalues_below(problem, lambda_cut, ode)
        if count == 0:
            break
        lam = eigenvalues(problem, count, bisect_tol, ode)
        rows.extend((k, n + 1, v) for n, v in enumerate(lam))
        k += 1
    return EigenvalueTable.from_rows(rows, bisect_tol, profile.digest, float(lambda_cut))
