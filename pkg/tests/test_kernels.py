from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import jv

from dpplln.combinatorics import SitePP
from dpplln.errors import ParityError, RegionError
from dpplln.kernels import (
    KernelSpec,
    critical_point_pp,
    critical_quadratic_roots,
    extended_sine_kernel,
    fourier_projection_kernel,
    kernel_matrix,
    pp_kernel,
    pp_kernel_matrix,
    region_a_chi_bounds,
    region_a_contains,
    schur_kernel,
    schur_kernel_matrix,
    sine_arcs,
    sine_kernel,
    u_range,
)
from dpplln.specialfn import GCoefficients, QParam

PLANCHEREL = GCoefficients.plancherel(1.0)

# sum_{n >= 1} J_{x+n}(2) J_{y+n}(2), mpmath at 30 digits
BESSEL = [
    (0, 0, 0.47493645950776522),
    (-1, -1, 0.52506354049223478),
    (2, 2, 0.017833103876421993),
    (0, 1, 0.2536152183079064),
    (1, 0, 0.2536152183079064),
    (-2, 1, -0.15236778521044774),
    (3, -1, 0.01211884489010076),
]

# enumeration oracle at q = 0.2, weight <= 30 (tail < 2e-15)
PP_ORACLE = [
    ((SitePP(0, -1),), 0.7162862920531766),
    ((SitePP(1, 0),), 0.05876291786170225),
    ((SitePP(0, -1), SitePP(1, 0)), 0.0025263798407339),
    ((SitePP(0, -3),), 0.9973407727849847),
    ((SitePP(-1, 0), SitePP(1, 0)), 0.013571078638489774),
    ((SitePP(0, 1),), 0.2249507900851193),
]


@pytest.mark.parametrize("x,y,want", BESSEL)
def test_plancherel_kernel_is_discrete_bessel(x, y, want):
    assert abs(schur_kernel(PLANCHEREL, 1.0, x, y) - want) < 1e-12


def test_zero_specialization_gives_vacuum():
    G = GCoefficients((0.0,))
    xs = list(range(-3, 3))
    k = schur_kernel_matrix(G, 1.0, xs).value
    assert np.allclose(k, np.diag([1.0 if x <= -1 else 0.0 for x in xs]), atol=1e-13)


@pytest.mark.parametrize("alpha", [1.0, 5.0, 40.0])
def test_schur_diagonal_against_bessel_sum(alpha):
    xs = np.arange(-int(2 * alpha) - 3, int(2 * alpha) + 3, max(1, int(alpha // 4)))
    k = schur_kernel_matrix(PLANCHEREL, alpha, list(xs)).value
    n = np.arange(1, int(4 * alpha) + 60)
    want = [np.sum(jv(x + n, 2 * alpha) ** 2) for x in xs]
    assert np.max(np.abs(np.diag(k).real - want)) < 1e-10


def test_schur_kernel_hermitian_for_complex_g():
    G = GCoefficients((0.8, 0.3 - 0.2j))
    xs = list(range(-6, 5))
    k = schur_kernel_matrix(G, 3.0, xs).value
    assert np.max(np.abs(k - k.conj().T)) < 1e-9
    d = np.diag(k).real
    assert np.all((d > -1e-8) & (d < 1 + 1e-8))


@pytest.mark.parametrize("x,y", [(0, 0), (0, 1), (2, -1), (-3, -3)])
def test_fourier_projection_is_reflected_schur(x, y):
    G = GCoefficients((0.9, 0.2j))
    kf = fourier_projection_kernel(G, 1.5, x, y)
    ks = schur_kernel(G, 1.5, -1 - x, -1 - y)
    assert abs(kf - ks) < 1e-8


def test_plancherel_u_range_and_arcs():
    lo, hi = u_range(PLANCHEREL)
    assert lo == pytest.approx(-2.0, abs=1e-12) and hi == pytest.approx(2.0, abs=1e-12)
    arcs = sine_arcs(PLANCHEREL, 1.0)
    assert len(arcs) == 1
    assert arcs.density == pytest.approx(math.acos(0.5) / math.pi, abs=1e-13)


@settings(max_examples=40)
@given(st.floats(-1.99, 1.99))
def test_sine_diagonal_is_arccos(u):
    arcs = sine_arcs(PLANCHEREL, u)
    assert abs(sine_kernel(arcs, 3, 3) - math.acos(u / 2) / math.pi) < 1e-12


def test_sine_endpoints():
    assert sine_kernel(sine_arcs(PLANCHEREL, -2.0), 0, 0) == pytest.approx(1.0)
    assert sine_kernel(sine_arcs(PLANCHEREL, 2.0), 0, 0) == pytest.approx(0.0)


def test_two_arcs_for_second_order_g():
    G = GCoefficients((0.2, 0.5))
    lo, hi = u_range(G)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        counts = {len(sine_arcs(G, u)) for u in np.linspace(lo + 0.01, hi - 0.01, 50)}
    assert 2 in counts


def test_sine_kernel_is_hermitian_projection_limit():
    arcs = sine_arcs(PLANCHEREL, 0.4)
    xs = list(range(-5, 6))
    k = kernel_matrix(KernelSpec.sine(PLANCHEREL, 0.4), xs)
    assert np.max(np.abs(k - k.conj().T)) < 1e-14
    ev = np.linalg.eigvalsh(k)
    assert ev.min() > -1e-12 and ev.max() < 1 + 1e-12
    assert k[0, 0] == pytest.approx(arcs.density)


@pytest.mark.parametrize("tau,chi", [(0.0, 0.0), (1.0, 0.2), (-0.5, 0.1)])
def test_critical_point_on_circles(tau, chi):
    cp = critical_point_pp(tau, chi)
    assert abs(abs(cp.z) - math.exp(-tau / 2)) < 1e-12
    assert abs(abs(1 - cp.z) - math.exp(-tau / 4 - chi / 2)) < 1e-12
    roots = sorted(critical_quadratic_roots(tau, chi), key=lambda z: z.imag)
    assert abs(roots[1] - math.exp(tau) * cp.z) < 1e-10


def test_region_a():
    assert region_a_contains(0.0, 0.0)
    assert not region_a_contains(0.0, -2.0)
    lo, hi = region_a_chi_bounds(1.0)
    assert region_a_contains(1.0, 0.5 * (lo + hi))
    assert not region_a_contains(1.0, lo - 1e-6)
    assert not region_a_contains(1.0, hi + 1e-6)
    with pytest.raises(RegionError):
        critical_point_pp(0.0, -2.0)


@pytest.mark.parametrize("tau,chi", [(0.0, 0.0), (1.0, 0.2)])
@pytest.mark.parametrize("dh", [1, 2, 3])
def test_extended_sine_equal_time_closed_form(tau, chi, dh):
    ang = critical_point_pp(tau, chi).angle
    want = math.exp(tau * dh / 2) * math.sin(ang * dh) / (math.pi * dh)
    assert abs(extended_sine_kernel(tau, chi, 0, 2 * dh) - want) < 1e-10


def test_extended_sine_diagonal_and_parity():
    cp = critical_point_pp(0.3, 0.1)
    assert extended_sine_kernel(0.3, 0.1, 0, 0) == pytest.approx(cp.angle / math.pi, abs=1e-13)
    with pytest.raises(ParityError):
        extended_sine_kernel(0.3, 0.1, 1, 0)


@pytest.mark.parametrize("sites,want", PP_ORACLE)
def test_pp_kernel_against_enumeration(sites, want):
    k = pp_kernel_matrix(QParam.from_q(0.2), list(sites))
    det = np.linalg.det(k).real
    assert abs(det - want) < 1e-9


def test_pp_kernel_small_q_is_vacuum():
    q = QParam.from_q(1e-6)
    assert pp_kernel(q, SitePP(0, -1), SitePP(0, -1)) == pytest.approx(1.0, abs=1e-5)
    assert pp_kernel(q, SitePP(0, 1), SitePP(0, 1)) == pytest.approx(0.0, abs=1e-5)
    assert pp_kernel(q, SitePP(2, -3), SitePP(2, -3)) == pytest.approx(1.0, abs=1e-5)


def test_pp_kernel_rejects_inadmissible_site():
    with pytest.raises(ParityError):
        pp_kernel(QParam.from_q(0.2), SitePP(0, 0), SitePP(0, -1))


def test_pp_kernel_tends_to_extended_sine():
    # gauge-invariant product at a pair of sites near (tau, chi) = (0, 0)
    r = 0.02
    s1, s2 = SitePP(0, -1), SitePP(1, 0)
    k = pp_kernel_matrix(QParam.from_r(r), [s1, s2])
    prod = (k[0, 1] * k[1, 0]).real
    lim = (extended_sine_kernel(0.0, 0.0, -1, -1) * extended_sine_kernel(0.0, 0.0, 1, 1)).real
    assert abs(prod - lim) < 0.01
