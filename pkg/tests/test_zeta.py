import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import zeta as hurwitz

from revzeta import zeta as zmod
from revzeta.errors import ConsistencyError, CoverageError, DomainError
from revzeta.profile import geometric_invariants, make_profile
from revzeta.sturm import ModeProblem, eigenvalues, mode_table
from revzeta.verify import cylinder_lattice_zeta2
from revzeta.zeta import (WeylTail, determinant, euler_identity_residual, euler_phi,
                          full_special_values, log_euler_phi, log_euler_phi_mp, residue_probe,
                          riemann_zeta, zeta1_direct_sum, zeta1_integral, zeta1_prime0,
                          zeta1_special, zeta2_prime0, zeta2_prime0_forms, zeta2_special,
                          zeta_direct_sum, zeta_prime0_mp)

CYL = make_profile("constant", (1.0,), (0.0, math.pi))
FRUSTUM = make_profile("linear", (1.0, 0.5), (0.0, 2.0))
CATENOID = make_profile("catenoid", (1.0, 0.0), (-1.0, 1.0))


# ---------------------------------------------------------------- Euler function

def test_euler_phi_examples():
    assert euler_phi(0.0) == 1.0
    assert euler_phi(0.5) == pytest.approx(0.2887880950866, rel=1e-12)
    assert euler_phi(math.exp(-2 * math.pi)) == pytest.approx(0.9981, abs=5e-5)
    for q in (-0.1, 1.0, 1.5):
        with pytest.raises(DomainError):
            euler_phi(q)


@pytest.mark.parametrize("q", [1e-6, 0.01, 0.1, 0.3, 0.5, 0.51, 0.7, 0.9, 0.95, 0.99])
def test_euler_phi_against_40_digit_reference(q):
    with mpmath.workdps(40):
        ref = mpmath.qp(mpmath.mpf(q))
    assert abs(euler_phi(q) / float(ref) - 1.0) < 1e-15
    assert float(log_euler_phi_mp(q, 30)) == pytest.approx(float(mpmath.log(ref)), rel=1e-15)


@pytest.mark.parametrize("r", [1.0, 2.0, 0.3, 5.0, 0.05, 7.7])
def test_euler_identity(r):
    res = euler_identity_residual(r)
    assert abs(res) < 1e-12
    if r == 1.0:
        assert res == 0.0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.02, 50.0))
def test_property_euler_identity(r):
    assert abs(euler_identity_residual(r)) < 1e-12


# ---------------------------------------------------------------- Riemann zeta

@pytest.mark.parametrize("s", [0.55, 0.75, 1.5, 2.0, 3.0, 4.5, 11.0, 0.3, 0.0, -0.5, -1.0, -2.0, -3.5, 1.0001])
def test_riemann_zeta_against_mpmath(s):
    ref = float(mpmath.zeta(s))
    assert riemann_zeta(s) == pytest.approx(ref, rel=2e-14, abs=1e-15)


def test_riemann_zeta_constants_and_pole():
    assert riemann_zeta(0.0) == zmod.ZETA_R_AT_0 == -0.5
    assert zmod.ZETA_R_PRIME_AT_0 == pytest.approx(-0.5 * math.log(2 * math.pi), rel=1e-16)
    assert zmod.ZETA_R_AT_MINUS_1 == pytest.approx(-1 / 12, rel=1e-16)
    assert riemann_zeta(-1.0) == pytest.approx(-1 / 12, rel=1e-14)
    with pytest.raises(DomainError):
        riemann_zeta(1.0)


# ---------------------------------------------------------------- special values

def test_zeta1_special_examples():
    z = zeta1_special(CYL)
    assert (z.res_at_half, z.value_at_0, z.res_at_minus_half, z.value_at_minus_1) == \
        pytest.approx((0.5, -0.5, 0.0, 0.0), abs=1e-15)
    assert zeta1_special(CATENOID).res_at_half == pytest.approx(math.sinh(1.0) / math.pi, rel=1e-14)


def test_zeta2_special_examples():
    z = zeta2_special(CYL)
    assert (z.res_at_1, z.res_at_half, z.value_at_0, z.res_at_minus_half) == \
        pytest.approx((math.pi / 2, -1.0, 0.5, 0.0), abs=1e-14)
    assert zeta2_special(FRUSTUM).res_at_1 == pytest.approx(1.5 * math.sqrt(1.25), rel=1e-13)


@pytest.mark.parametrize("R,L", [(1.0, math.pi), (2.0, 1.0), (0.5, 3.0)])
def test_full_special_values_cylinder(R, L):
    z = full_special_values(make_profile("constant", (R,), (0.0, L)))
    assert (z.res_at_1, z.res_at_half, z.value_at_0, z.res_at_minus_half) == \
        pytest.approx((L * R / 2, -R / 2, 0.0, 0.0), abs=1e-14)


def test_full_special_values_frustum():
    z = full_special_values(FRUSTUM)
    assert z.res_at_half == pytest.approx(-0.75, rel=1e-15)
    assert z.res_at_minus_half == pytest.approx(-1.171875e-3, rel=1e-14)


def test_values_at_zero_are_exact(profiles):
    for p in profiles.values():
        z = full_special_values(p)
        assert z.value_at_0 == 0.0
        assert z.zeta1.value_at_0 == -0.5 and z.zeta2.value_at_0 == 0.5
        assert z.res_at_1 == pytest.approx(geometric_invariants(p).area / (4 * math.pi), rel=1e-12)
        doc = z.to_json()
        assert set(doc["parts"]) == {"zeta1", "zeta2"}


def test_parts_mismatch_raises(monkeypatch):
    real = zmod.zeta1_special

    def broken(profile, quad=zmod.DEFAULT_QUADRATURE):
        z = real(profile, quad)
        return zmod.Zeta1Special(z.res_at_half + 1e-9, z.value_at_0, z.res_at_minus_half,
                                 z.value_at_minus_1)
    monkeypatch.setattr(zmod, "zeta1_special", broken)
    with pytest.raises(ConsistencyError, match="res_at_half"):
        full_special_values(FRUSTUM)


# ---------------------------------------------------------------- zeta'(0)

@pytest.mark.parametrize("R,L", [(1.0, math.pi), (2.0, 1.0), (0.5, 3.0), (1.0, 7.0)])
def test_zeta1_prime0_cylinder(R, L):
    assert zeta1_prime0(make_profile("constant", (R,), (0.0, L))) == pytest.approx(-math.log(2 * L), rel=1e-14)


def test_zeta1_prime0_frustum():
    A = 4 * math.sqrt(1.25) * math.log(2.0) / 2
    expected = -0.5 * math.log(2.0) - math.log(4 * math.sqrt(1.25) * math.log(2.0))
    assert 2 * A == pytest.approx(4 * math.sqrt(1.25) * math.log(2.0))
    assert zeta1_prime0(FRUSTUM) == pytest.approx(expected, rel=1e-13)


def _zeta1_prime0_from_eigenvalues(p, N=150):
    """Regularized sum over the k = 0 spectrum.

    With c = (pi/l)^2, lam_n / c = n^2 + beta + gamma/n^2 + ...; the
    subtracted sum converges like n^-4 and the rest is Riemann zeta data.
    """
    lam = eigenvalues(ModeProblem(p, 0), N, bisect_tol=1e-13)
    c = (math.pi / geometric_invariants(p).arc_length) ** 2
    n = np.arange(1, N + 1, dtype=float)
    shift = lam / c - n * n
    hi = n > N / 2
    beta, gamma = np.linalg.lstsq(np.column_stack([np.ones(hi.sum()), n[hi] ** -2]),
                                  shift[hi], rcond=None)[0]
    body = math.fsum((beta / n ** 2 - np.log(lam / (c * n * n))).tolist())
    tail = (0.5 * beta ** 2 - gamma) * hurwitz(4.0, N + 1)
    return body + tail + 0.5 * math.log(c) - math.log(2 * math.pi) - beta * math.pi ** 2 / 6


@pytest.mark.parametrize("name", ["cylinder", "frustum", "catenoid", "cosine-bump"])
def test_zeta1_prime0_against_spectrum(profiles, name):
    p = profiles[name]
    assert _zeta1_prime0_from_eigenvalues(p) == pytest.approx(zeta1_prime0(p), abs=1e-10)


def test_zeta2_prime0_cylinder_direct_form():
    R, L = 2.0, 1.0
    p = make_profile("constant", (R,), (0.0, L))
    direct, modular = zeta2_prime0_forms(p)
    expected = -2 * log_euler_phi(math.exp(-2 * L / R)) + L / (6 * R) + math.log(2 * math.pi * R)
    assert direct == pytest.approx(expected, rel=1e-14)
    value, residual = zeta2_prime0(p)
    assert value == modular and residual < 1e-12


def test_zeta2_prime0_forms_agree(profiles):
    for p in profiles.values():
        _, residual = zeta2_prime0(p)
        assert residual < 1e-12


def test_zeta2_prime0_mismatch_raises(monkeypatch):
    monkeypatch.setattr(zmod, "zeta2_prime0_forms", lambda p, q=None: (1.0, 1.0 + 1e-8))
    with pytest.raises(ConsistencyError):
        zeta2_prime0(CYL)


def test_determinant_route_mismatch_raises(monkeypatch):
    real = zmod.zeta2_prime0_forms
    monkeypatch.setattr(zmod, "zeta2_prime0_forms",
                        lambda p, q=zmod.DEFAULT_QUADRATURE: tuple(v + 1e-8 for v in real(p, q)))
    with pytest.raises(ConsistencyError, match="parts"):
        determinant(FRUSTUM)


@pytest.mark.parametrize("R,L", [(1.0, math.pi), (2.0, 1.0), (0.5, 3.0)])
def test_determinant_cylinder_closed_form(R, L):
    rep = determinant(make_profile("constant", (R,), (0.0, L)))
    expected = -2 * log_euler_phi(math.exp(-2 * math.pi ** 2 * R / L)) + math.pi ** 2 * R / (6 * L)
    assert rep.zeta_prime0 == pytest.approx(expected, rel=1e-14)
    assert rep.det == pytest.approx(math.exp(-expected), rel=1e-14)
    assert rep.log_det == -rep.zeta_prime0
    assert rep.parts_residual < 1e-10 and rep.forms_residual < 1e-10


def test_determinant_unit_cylinder_value():
    rep = determinant(CYL)
    assert rep.zeta_prime0 == pytest.approx(-2 * math.log(euler_phi(math.exp(-2 * math.pi))) + math.pi / 6,
                                            rel=1e-14)
    assert rep.zeta_prime0 == pytest.approx(0.52734414049783598, rel=1e-15)


def _cylinder_heat_mellin(R, L):
    """zeta'(0) = int_0^inf theta(t) dt/t, regularized, from Jacobi theta functions (30 digits)."""
    with mpmath.workdps(30):
        R, L = mpmath.mpf(R), mpmath.mpf(L)

        def E(tau):
            return mpmath.nsum(lambda m: mpmath.exp(-mpmath.pi ** 2 * m ** 2 / tau), [1, mpmath.inf])

        def theta_full(t):
            if t < 1:
                return mpmath.sqrt(mpmath.pi / t) * (1 + 2 * E(t))
            return 1 + 2 * mpmath.nsum(lambda k: mpmath.exp(-t * k ** 2), [1, mpmath.inf])

        def theta(t):
            return theta_full(t / R ** 2) * (theta_full(t * mpmath.pi ** 2 / L ** 2) - 1) / 2

        def remainder(t):
            # theta minus its small-t part C_-1/t + C_-1/2/sqrt(t), exponentially small
            ec, ei = E(t / R ** 2), E(t * mpmath.pi ** 2 / L ** 2)
            g = L / mpmath.sqrt(mpmath.pi * t)
            return R * mpmath.sqrt(mpmath.pi) / (2 * mpmath.sqrt(t)) * (g * (2 * ec + 2 * ei + 4 * ec * ei) - 2 * ec)

        c_m1, c_mh = R * L / 2, -R * mpmath.sqrt(mpmath.pi) / 2
        tc = min(R ** 2, L ** 2 / mpmath.pi ** 2, 1)
        head = mpmath.quad(lambda t: remainder(t) / t, [0, tc])
        rest = mpmath.quad(lambda t: theta(t) / t, [tc, 1, 10, mpmath.inf])
        return float(head + rest - c_m1 / tc - 2 * c_mh / mpmath.sqrt(tc))


@pytest.mark.slow
@pytest.mark.parametrize("R,L", [(1.0, math.pi), (2.0, 1.0), (0.5, 3.0)])
def test_zeta_prime0_cylinder_against_heat_trace(R, L):
    p = make_profile("constant", (R,), (0.0, L))
    assert determinant(p).zeta_prime0 == pytest.approx(_cylinder_heat_mellin(R, L), abs=1e-13)


def test_zeta_prime0_mp_matches_binary64(profiles):
    for p in profiles.values():
        assert float(zeta_prime0_mp(p, 30)) == pytest.approx(determinant(p).zeta_prime0, abs=1e-12)


@pytest.mark.parametrize("c", [2.0, 0.5])
def test_scale_invariance_of_zeta_prime0(profiles, c):
    for p in profiles.values():
        assert determinant(p.scaled(c)).zeta_prime0 == pytest.approx(determinant(p).zeta_prime0, abs=1e-10)


@pytest.mark.parametrize("R,L", [(1.0, 2.0), (3.0, 0.7), (0.4, 5.0)])
def test_cylinder_swap_symmetry(R, L):
    a = zeta2_prime0(make_profile("constant", (R / math.pi,), (0.0, L)))[0]
    b = zeta2_prime0(make_profile("constant", (L / math.pi,), (0.0, R)))[0]
    assert a == pytest.approx(b, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(c0=st.floats(0.5, 2.0), c1=st.floats(-0.2, 0.2), c2=st.floats(-0.1, 0.1),
       c=st.sampled_from([0.5, 2.0]))
def test_property_determinant_consistency_and_scale(c0, c1, c2, c):
    p = make_profile("polynomial", (c0, c1, c2), (0.0, 1.5))
    rep = determinant(p)
    assert rep.parts_residual < 1e-10 and rep.forms_residual < 1e-10
    assert determinant(p.scaled(c)).zeta_prime0 == pytest.approx(rep.zeta_prime0, abs=1e-10)
    assert determinant(p.reflected()).zeta_prime0 == pytest.approx(rep.zeta_prime0, abs=1e-10)


# ---------------------------------------------------------------- direct sums

def test_weyl_tail_from_profile_and_fit(heat_tables):
    tab = heat_tables["cylinder"]
    model = WeylTail.from_profile(CYL)
    assert model.density == pytest.approx(math.pi / 2, rel=1e-14)
    assert model.boundary == pytest.approx(1.0, rel=1e-14)
    fit = WeylTail.fit(tab)
    assert fit.density == pytest.approx(model.density, rel=2e-3)
    assert fit.boundary == pytest.approx(model.boundary, rel=0.1)


def test_cylinder_lattice_oracle_is_converged():
    # brute-force double sum with an integral tail, independent of the row formula
    K = 400
    k = np.arange(-K, K + 1)[:, None]
    n = np.arange(1, K + 1)[None, :]
    brute = float(np.sum((k * k + n * n) ** -2.0))
    # omitted region: area beyond radius K in the half plane, ~ (pi/2) / K^2 scale
    assert cylinder_lattice_zeta2() == pytest.approx(brute, rel=1e-5)


def test_direct_sum_cylinder_s2(heat_tables):
    tab = heat_tables["cylinder"]
    res = zeta_direct_sum(tab, 2.0, WeylTail.from_profile(CYL))
    assert abs(res.value - cylinder_lattice_zeta2()) < 1e-4
    assert abs(res.value - cylinder_lattice_zeta2()) <= res.tail_bound + 1e-12
    assert res.partial + res.tail == res.value


def test_direct_sum_s10_is_dominated_by_first_eigenvalue(heat_tables):
    tab = heat_tables["frustum"]
    res = zeta_direct_sum(tab, 10.0, WeylTail.from_profile(FRUSTUM))
    lam01 = tab.mode(0)[0]
    assert res.tail < 1e-30
    assert 1.0 <= res.value * lam01 ** 10 < 1.5


def test_direct_sum_errors(heat_tables):
    with pytest.raises(DomainError):
        zeta_direct_sum(heat_tables["cylinder"], 1.0, WeylTail.from_profile(CYL))
    with pytest.raises(CoverageError):
        zeta_direct_sum(mode_table(CYL, 3, 3), 2.0, WeylTail.from_profile(CYL))


@pytest.mark.parametrize("name", ["cylinder", "frustum"])
def test_residue_probe(heat_tables, name, profiles):
    tab = heat_tables[name]
    target = full_special_values(profiles[name]).res_at_1
    assert residue_probe(tab, WeylTail.fit(tab)) == pytest.approx(target, rel=0.02)


def test_zeta1_direct_sum_cylinder():
    # k = 0 spectrum n^2: zeta_R(2s)
    for s in (0.75, 1.5, 3.0):
        assert zeta1_direct_sum(CYL, s, n_max=80) == pytest.approx(riemann_zeta(2 * s), rel=1e-10)
    with pytest.raises(DomainError):
        zeta1_direct_sum(CYL, 0.5)


@pytest.mark.slow
def test_zeta1_integral_cylinder():
    assert zeta1_integral(CYL, 0.75) == pytest.approx(riemann_zeta(1.5), rel=1e-8)


@pytest.mark.slow
def test_zeta1_integral_matches_direct_sum_frustum():
    a = zeta1_integral(FRUSTUM, 0.9)
    b = zeta1_direct_sum(FRUSTUM, 0.9, n_max=120)
    assert abs(a - b) <= 1e-4 * abs(b)


def test_zeta1_integral_domain():
    for s in (0.5, 1.0, 1.5):
        with pytest.raises(DomainError):
            zeta1_integral(CYL, s)
