import math

import numpy as np
import pytest

from revzeta.errors import CoverageError, FitError
from revzeta.heatkernel import (HeatTrace, dictionary_residuals, fit_coefficients,
                                geometric_coefficients, heat_trace, stripe_density,
                                stripe_limit_residual, stripe_special_values, valid_window)
from revzeta.profile import geometric_invariants, make_profile
from revzeta.sturm import spectrum_below
from revzeta.zeta import full_special_values

CYL = make_profile("constant", (1.0,), (0.0, math.pi))
FRUSTUM = make_profile("linear", (1.0, 0.5), (0.0, 2.0))


def test_geometric_coefficients_cylinder():
    c = geometric_coefficients(CYL)
    assert c.C_minus1 == pytest.approx(math.pi / 2, rel=1e-15)
    assert c.C_minus_half == pytest.approx(-math.sqrt(math.pi) / 2, rel=1e-15)
    assert (c.C_0, c.C_half) == (0.0, 0.0)


def test_geometric_coefficients_frustum_geodesic_term_only():
    c = geometric_coefficients(FRUSTUM)
    kg2 = lambda f: 0.25 / (f * f * 1.25)
    expected = 2 * math.pi * (1.0 * kg2(1.0) + 2.0 * kg2(2.0)) / (256 * math.sqrt(math.pi))
    assert c.C_half == pytest.approx(expected, rel=1e-14)


def test_dictionary(profiles):
    for p in profiles.values():
        for name, gap in dictionary_residuals(p).items():
            assert gap <= 1e-12, name
        z = full_special_values(p)
        assert -geometric_coefficients(p).C_half / (2 * math.sqrt(math.pi)) == \
            pytest.approx(z.res_at_minus_half, abs=1e-12)


def test_cylinder_theta_at_one_matches_double_sum():
    tab = spectrum_below(CYL, 60.0, bisect_tol=1e-13)
    tr = heat_trace(tab, [1.0], math.pi / 2)
    k = np.arange(-10, 11)[:, None]
    n = np.arange(1, 11)[None, :]
    exact = float(np.exp(-(k * k + n * n)).sum())
    assert tr.theta[0] == pytest.approx(exact, rel=1e-12)
    assert tr.truncation_bound[0] < 1e-20


def test_trace_positive_and_decreasing(heat_tables):
    for name, tab in heat_tables.items():
        grid = np.geomspace(0.02, 2.0, 40)
        tr = heat_trace(tab, grid, geometric_invariants(FRUSTUM if name == "frustum" else CYL).area / (4 * math.pi))
        assert np.all(tr.theta > 0)
        assert np.all(np.diff(tr.theta) < 0)
        assert np.all(tr.truncation_bound < 1e-10 * tr.theta)


def test_large_t_limit(heat_tables):
    tab = heat_tables["frustum"]
    lam01 = tab.mode(0)[0]
    t = 20.0
    tr = heat_trace(tab, [t], 1.0)
    lead = math.exp(-t * lam01)
    assert tr.theta[0] == pytest.approx(lead, rel=1e-6)


def test_small_t_weyl_limit(heat_tables):
    tab = heat_tables["cylinder"]
    dens = math.pi / 2
    ts = np.array([0.08, 0.04, 0.02])
    tr = heat_trace(tab, ts, dens)
    gaps = np.abs(tr.theta * ts - dens)
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 0.2


def test_coverage_error_names_minimal_t(heat_tables):
    tab = heat_tables["cylinder"]
    t_min, t_max = valid_window(tab, math.pi / 2)
    assert 0 < t_min < 0.02 < 0.2 < t_max
    with pytest.raises(CoverageError, match=r"smallest valid t="):
        heat_trace(tab, [0.5 * t_min, 0.1], math.pi / 2)
    heat_trace(tab, [1.01 * t_min], math.pi / 2)


def test_uncovered_table_rejected():
    from revzeta.sturm import mode_table
    with pytest.raises(CoverageError):
        heat_trace(mode_table(CYL, 2, 2), [0.1], 1.0)


def _synthetic(coefs, t):
    return coefs[0] / t + coefs[1] / np.sqrt(t) + coefs[2] + coefs[3] * np.sqrt(t)


def test_fit_recovers_exact_model():
    coefs = (1.7, -0.9, 0.0, 0.013)
    t = np.geomspace(0.02, 0.2, 30)
    fit = fit_coefficients(HeatTrace(t, _synthetic(coefs, t), np.zeros_like(t)))
    got = (fit.C_minus1, fit.C_minus_half, fit.C_0, fit.C_half)
    assert got == pytest.approx(coefs, abs=1e-10)
    assert fit.residual_norm < 1e-12
    assert fit.points == 30 and fit.window == pytest.approx((0.02, 0.2))


def test_fit_rejects_bad_designs():
    t = np.geomspace(0.02, 0.2, 7)
    with pytest.raises(FitError, match="at least"):
        fit_coefficients(HeatTrace(t, _synthetic((1, 1, 1, 1), t), np.zeros_like(t)))
    t = np.linspace(0.1, 0.15, 20)
    with pytest.raises(FitError, match="narrower"):
        fit_coefficients(HeatTrace(t, _synthetic((1, 1, 1, 1), t), np.zeros_like(t)))
    # window wide enough but only two distinct points: singular design
    with pytest.raises(FitError, match="ill-conditioned"):
        fit_coefficients(HeatTrace(np.sort(np.r_[[1.0] * 10, [2.5] * 10]), np.ones(20), np.zeros(20)))


@pytest.mark.parametrize("name,col,tol", [("cylinder", "C_minus1", 0.02), ("frustum", "C_minus_half", 0.05)])
def test_fit_on_computed_spectra(heat_tables, profiles, name, col, tol):
    p = profiles[name]
    geo = geometric_coefficients(p)
    tr = heat_trace(heat_tables[name], np.geomspace(0.02, 0.2, 30), geo.C_minus1)
    fit = fit_coefficients(tr)
    assert getattr(fit, col) == pytest.approx(getattr(geo, col), rel=tol)
    assert fit.C_minus1 == pytest.approx(geo.C_minus1, rel=0.02)


def test_stripe_special_values_and_density():
    L = math.pi
    sv = stripe_special_values(L)
    assert sv["res_at_1"] == pytest.approx(math.pi / 2)
    assert sv["prime_at_0"] == pytest.approx(math.pi / 6)
    assert sv["res_at_half"] == -0.5 and sv["res_at_minus_half"] == 0.0 and sv["value_at_0"] == 0.0
    for L in (0.7, math.pi, 4.0):
        h = 1e-6
        assert h * stripe_density(L, 1 + h) == pytest.approx(L / 2, rel=1e-5)
        assert h * stripe_density(L, 0.5 + h) == pytest.approx(-0.5, rel=1e-5)
        # zeta_c(s) ~ s zeta_c'(0) near 0
        d = (stripe_density(L, h) - stripe_density(L, -h)) / (2 * h)
        assert d == pytest.approx(math.pi ** 2 / (6 * L), rel=1e-7)
    with pytest.raises(ValueError):
        stripe_density(0.0, 2.0)


def test_stripe_density_is_the_cylinder_density():
    # large-R cylinder: zeta(s)/R -> zeta_c(s) for Re s > 1
    L, s, R = 2.0, 2.0, 40.0
    k = np.arange(-4000, 4001)[:, None]
    n = np.arange(1, 200)[None, :]
    lattice = float(np.sum(((k / R) ** 2 + (n * math.pi / L) ** 2) ** -s)) / R
    assert lattice == pytest.approx(stripe_density(L, s), rel=1e-3)


@pytest.mark.parametrize("R", [5.0, 10.0, 20.0])
def test_stripe_limit(R):
    gap, bound = stripe_limit_residual(R, math.pi)
    assert gap <= bound
