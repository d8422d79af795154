"""Acceptance checks.

Each check returns a :class:`CheckResult` with the measured residual, the
pinned tolerance, and the wall time.  Runtime limits are asserted with the
compiled kernels already loaded (:func:`warm_up`).
"""

import functools
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .heatkernel import (dictionary_residuals, fit_coefficients, geometric_coefficients,
                         heat_trace, stripe_limit_residual)
from .profile import make_profile, standard_profiles
from .sturm import ModeProblem, eigenvalues, log_D, mode_table, spectrum_below
from .wkb import lnD_asymptotic_1d, lnD_asymptotic_2d
from .zeta import (WeylTail, determinant, euler_identity_residual, full_special_values,
                   log_euler_phi, residue_probe, riemann_zeta, zeta1_direct_sum,
                   zeta1_integral, zeta1_prime0, zeta1_special, zeta2_prime0_forms,
                   zeta_direct_sum)

__all__ = ["CheckResult", "CRITERIA", "run_acceptance", "warm_up", "cylinder_lattice_zeta2"]

CATALOG = ("cylinder", "frustum", "catenoid", "cosine-bump")
CYLINDERS = ((1.0, math.pi), (2.0, 1.0), (0.5, 3.0))
HEAT_CUTS = {"cylinder": 4000.0, "frustum": 3700.0}
MIN_HEAT_EIGENVALUES = 3000
WKB_Z = (10.0, 20.0, 40.0, 80.0)
WKB_K = (4, 8, 16, 32)
STRIPE_R = (5.0, 10.0, 20.0)


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    passed: bool
    measured: float
    tolerance: float
    runtime: float
    runtime_limit: float = None
    detail: str = ""
    metrics: dict = field(default_factory=dict)  # every sub-measurement, by name

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        lim = f" (limit {self.runtime_limit:g}s)" if self.runtime_limit else ""
        return (f"[{status}] {self.criterion:2d} {self.name}: measured {self.measured:.3e} "
                f"tol {self.tolerance:.1e}, {self.runtime:.2f}s{lim} {self.detail}").rstrip()

    def to_json(self):
        return dict(self.__dict__)


def warm_up():
    """Load/compile the numerical kernels once."""
    cyl = standard_profiles()["cylinder"]
    eigenvalues(ModeProblem(cyl, 1), 2)
    log_D(ModeProblem(cyl, 1), 1.0)


@functools.lru_cache(maxsize=8)
def _heat_table(name):
    return spectrum_below(standard_profiles()[name], HEAT_CUTS[name])


def _slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def cylinder_lattice_zeta2():
    """``sum_{k in Z, n >= 1} (k^2 + n^2)^{-2}`` from closed-form row sums.

    For fixed ``n`` the ``k``-sum is ``pi coth(pi n)/(2 n^3) + pi^2 csch^2(pi n)/(2 n^2)``;
    beyond ``n = 40`` only the ``pi/(2 n^3)`` part survives in binary64.
    """
    rows = []
    for n in range(1, 41):
        rows.append(math.pi / (2 * n ** 3) / math.tanh(math.pi * n)
                    + math.pi ** 2 / (2 * n ** 2) / math.sinh(math.pi * n) ** 2)
    return math.fsum(rows) + 0.5 * math.pi * float(hurwitz_zeta(3.0, 41.0))


# ---------------------------------------------------------------- criteria

def check_cylinder_closed_forms():
    t0 = time.perf_counter()
    worst = 0.0
    for R, L in CYLINDERS:
        prof = make_profile("constant", (R,), (0.0, L))
        sv = full_special_values(prof)
        zp = determinant(prof).zeta_prime0
        expected_zp = -2.0 * log_euler_phi(math.exp(-2.0 * math.pi ** 2 * R / L)) + math.pi ** 2 * R / (6 * L)
        worst = max(worst, abs(sv.res_at_1 - L * R / 2), abs(sv.res_at_half + R / 2),
                    abs(sv.value_at_0), abs(sv.res_at_minus_half), abs(zp - expected_zp))
    rt = time.perf_counter() - t0
    return CheckResult(1, "cylinder closed forms", worst < 1e-12 and rt < 1.0, worst, 1e-12, rt, 1.0,
                       metrics={"max_abs_error": worst})


def check_euler_identity():
    t0 = time.perf_counter()
    worst = max(abs(euler_identity_residual(r)) for r in (0.3, 1.0, 2.0, 5.0))
    rt = time.perf_counter() - t0
    return CheckResult(2, "Euler function identity", worst < 1e-12 and rt < 0.1, worst, 1e-12, rt, 0.1,
                       metrics={"max_residual": worst})


def check_determinant_consistency(profiles=None):
    t0 = time.perf_counter()
    profiles = profiles or [standard_profiles()[n] for n in CATALOG]
    parts = forms = 0.0
    for prof in profiles:
        rep = determinant(prof)
        direct, modular = zeta2_prime0_forms(prof)
        parts = max(parts, abs(rep.zeta_prime0 - (zeta1_prime0(prof) + direct)))
        forms = max(forms, abs(direct - modular))
    worst = max(parts, forms)
    rt = time.perf_counter() - t0
    return CheckResult(3, "determinant internal consistency", worst < 1e-10 and rt < 5.0,
                       worst, 1e-10, rt, 5.0, metrics={"parts": parts, "forms": forms})


def check_heat_dictionary(profiles=None):
    t0 = time.perf_counter()
    profiles = profiles or [standard_profiles()[n] for n in CATALOG]
    worst = max(max(dictionary_residuals(p).values()) for p in profiles)
    rt = time.perf_counter() - t0
    return CheckResult(4, "heat-kernel dictionary", worst < 1e-12, worst, 1e-12, rt,
                       metrics={"max_residual": worst})


def check_cylinder_spectrum():
    t0 = time.perf_counter()
    worst = 0.0
    for R, L in CYLINDERS:
        prof = make_profile("constant", (R,), (0.0, L))
        table = mode_table(prof, 10, 10)
        exact = (table.k / R) ** 2 + (table.n * math.pi / L) ** 2
        worst = max(worst, float(np.max(np.abs(table.lam / exact - 1.0))))
    rt = time.perf_counter() - t0
    return CheckResult(5, "cylinder spectrum oracle", worst < 1e-9 and rt < 10.0, worst, 1e-9, rt, 10.0,
                       metrics={"max_rel_error": worst})


def check_zeta_sums():
    t0 = time.perf_counter()
    profiles = standard_profiles()
    cyl = _heat_table("cylinder")
    s2 = zeta_direct_sum(cyl, 2.0, WeylTail.from_profile(profiles["cylinder"])).value
    lattice_err = abs(s2 - cylinder_lattice_zeta2())
    rel = []
    for name in ("cylinder", "frustum"):
        table = _heat_table(name)
        est = residue_probe(table, WeylTail.fit(table))
        rel.append(abs(est / full_special_values(profiles[name]).res_at_1 - 1.0))
    rt = time.perf_counter() - t0
    passed = lattice_err < 1e-4 and max(rel) < 0.02 and rt < 60.0
    return CheckResult(6, "direct zeta sums", passed, lattice_err, 1e-4, rt, 60.0,
                       f"residue rel err {max(rel):.2e} (tol 2e-2)",
                       metrics={"lattice_abs_error": lattice_err, "residue_rel_error_cylinder": rel[0],
                                "residue_rel_error_frustum": rel[1]})


def check_zeta1_integral():
    t0 = time.perf_counter()
    profiles = standard_profiles()
    metrics = {}
    for name in ("cylinder", "frustum"):
        for s in (0.75, 0.9):
            direct = zeta1_direct_sum(profiles[name], s)
            diff = abs(zeta1_integral(profiles[name], s) - direct)
            metrics[f"{name}_s{s}_abs"] = diff
            metrics[f"{name}_s{s}_rel"] = diff / abs(direct)
    cyl = profiles["cylinder"]
    exact = riemann_zeta(1.5) * (cyl.b - cyl.a) ** 1.5 / math.pi ** 1.5
    diff = abs(zeta1_integral(cyl, 0.75) - exact)
    metrics["cylinder_zeta_R_abs"] = diff
    metrics["cylinder_zeta_R_rel"] = diff / exact
    worst = max(metrics.values())
    rt = time.perf_counter() - t0
    return CheckResult(7, "zeta_1 integral representation", worst < 1e-4, worst, 1e-4, rt,
                       detail="max of absolute and relative", metrics=metrics)


def wkb_errors(profile):
    e1 = [abs(lnD_asymptotic_1d(profile, z) - log_D(ModeProblem(profile, 0), z * z)) for z in WKB_Z]
    e2 = [abs(lnD_asymptotic_2d(profile, k, 1.0) - log_D(ModeProblem(profile, k), float(k * k)))
          for k in WKB_K]
    return e1, e2


def check_wkb(profile=None):
    t0 = time.perf_counter()
    profile = profile or standard_profiles()["frustum"]
    e1, e2 = wkb_errors(profile)
    s1, s2 = _slope(WKB_Z, e1), _slope(WKB_K, e2)
    rt = time.perf_counter() - t0
    return CheckResult(8, "WKB asymptotic match", max(s1, s2) <= -0.9, max(s1, s2), -0.9, rt,
                       detail=f"slopes 1D {s1:.2f}, 2D {s2:.2f} (must be <= -0.9)",
                       metrics={"slope_1d": s1, "slope_2d": s2})


def check_heat_fit():
    t0 = time.perf_counter()
    profiles = standard_profiles()
    metrics = {}
    worst1 = worst2 = 0.0
    count = math.inf
    for name in ("cylinder", "frustum"):
        table = _heat_table(name)
        count = min(count, len(table))
        geo = geometric_coefficients(profiles[name])
        trace = heat_trace(table, np.geomspace(0.02, 0.2, 30), geo.C_minus1)
        fit = fit_coefficients(trace)
        metrics[f"{name}_C_minus1_rel"] = abs(fit.C_minus1 / geo.C_minus1 - 1.0)
        metrics[f"{name}_C_minus_half_rel"] = abs(fit.C_minus_half / geo.C_minus_half - 1.0)
        metrics[f"{name}_eigenvalues"] = len(table)
        worst1 = max(worst1, metrics[f"{name}_C_minus1_rel"])
        worst2 = max(worst2, metrics[f"{name}_C_minus_half_rel"])
    rt = time.perf_counter() - t0
    passed = worst1 < 0.02 and worst2 < 0.05 and count >= MIN_HEAT_EIGENVALUES and rt < 300.0
    return CheckResult(9, "heat-trace fit", passed, worst1, 0.02, rt, 300.0,
                       f"C_-1/2 rel err {worst2:.2e} (tol 5e-2), {count} eigenvalues", metrics=metrics)


def _special_vector(profile):
    sv = full_special_values(profile)
    return np.array([sv.res_at_1, sv.res_at_half, sv.value_at_0, sv.res_at_minus_half,
                     sv.zeta1_at_minus_1, determinant(profile).zeta_prime0])


def check_invariances(profiles=None):
    t0 = time.perf_counter()
    profiles = profiles or [standard_profiles()[n] for n in CATALOG]
    exact_ok = True
    scale = refl = 0.0
    for prof in profiles:
        exact_ok &= full_special_values(prof).value_at_0 == 0.0
        z1 = zeta1_special(prof)
        exact_ok &= z1.value_at_0 == -0.5
        zp = determinant(prof).zeta_prime0
        for c in (2.0, 0.5):
            scale = max(scale, abs(determinant(prof.scaled(c)).zeta_prime0 - zp))
        refl = max(refl, float(np.max(np.abs(_special_vector(prof.reflected()) - _special_vector(prof)))))
    swap = 0.0
    for R, L in ((1.0, math.pi), (2.0, 1.0), (0.5, 3.0)):
        a = zeta2_prime0_forms(make_profile("constant", (R / math.pi,), (0.0, L)))[0]
        b = zeta2_prime0_forms(make_profile("constant", (L / math.pi,), (0.0, R)))[0]
        swap = max(swap, abs(a - b))
    rt = time.perf_counter() - t0
    passed = exact_ok and scale < 1e-10 and swap < 1e-12 and refl < 1e-10
    return CheckResult(10, "invariance suite", passed, max(scale, refl), 1e-10, rt,
                       detail=f"exact zeros {'ok' if exact_ok else 'BROKEN'}, scale {scale:.1e}, "
                              f"reflection {refl:.1e}, swap {swap:.1e} (tol 1e-12)",
                       metrics={"exact_zeros": exact_ok, "scale": scale, "reflection": refl, "swap": swap})


def check_stripe_limit():
    t0 = time.perf_counter()
    ratios = []
    metrics = {}
    for R in STRIPE_R:
        gap, bound = stripe_limit_residual(R, math.pi)
        ratios.append(float(gap / bound))
        metrics[f"R{R:g}_gap"] = float(gap)
        metrics[f"R{R:g}_bound"] = float(bound)
    rt = time.perf_counter() - t0
    return CheckResult(11, "stripe limit", max(ratios) < 1.0, max(ratios), 1.0, rt,
                       detail="gap / (3 exp(-2 pi^2 R/L)), R = 5, 10, 20 at 80 digits", metrics=metrics)


CRITERIA = {
    1: check_cylinder_closed_forms,
    2: check_euler_identity,
    3: check_determinant_consistency,
    4: check_heat_dictionary,
    5: check_cylinder_spectrum,
    6: check_zeta_sums,
    7: check_zeta1_integral,
    8: check_wkb,
    9: check_heat_fit,
    10: check_invariances,
    11: check_stripe_limit,
}

# criteria that also accept a user profile
PROFILE_GENERIC = {3: check_determinant_consistency, 4: check_heat_dictionary,
                   10: check_invariances}


def run_acceptance(only=None, profile=None):
    """Run the criteria in ``only`` (default all).

    With ``profile`` the profile-generic checks (3, 4, 8, 10) run on it too.
    """
    warm_up()
    results = []
    for num in sorted(only or CRITERIA):
        results.append(CRITERIA[num]())
        if profile is not None and num in PROFILE_GENERIC:
            r = PROFILE_GENERIC[num]([profile])
            results.append(CheckResult(r.criterion, r.name + " [input profile]", r.passed,
                                       r.measured, r.tolerance, r.runtime, r.runtime_limit, r.detail,
                                       r.metrics))
        if profile is not None and num == 8:
            r = check_wkb(profile)
            results.append(CheckResult(8, r.name + " [input profile]", r.passed, r.measured,
                                       r.tolerance, r.runtime, None, r.detail, r.metrics))
    return results
