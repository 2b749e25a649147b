from __future__ import annotations

import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpplln.errors import BranchCutError, DomainError, ParameterError, PoleError
from dpplln.specialfn import (
    GCoefficients,
    QParam,
    action_pp,
    action_schur,
    dilog1m,
    g_eval,
    macmahon_m,
    phi,
    q_pochhammer,
    zg_prime,
    zg_prime_angle,
)

# Li_2 values from mpmath.polylog(2, z) at 30 digits
LI2 = [
    (0.3, 0.326129510075476056),
    (-0.7, -0.605158402337705250),
    (0.9 + 0.2j, 1.18986558260356238 + 0.447184904723911741j),
    (2 + 1j, 1.18668853700005783 + 2.40774076934577200j),
    (-3, -1.93937542076670895),
    (0.5 + 0.5j, 0.453985269150295583 + 0.643767332889268749j),
    (1.5j, -0.392707112217551703 + 1.27496944849438006j),
]


@pytest.mark.parametrize("z,want", LI2)
def test_dilog_against_frozen_values(z, want):
    assert abs(dilog1m(z) - want) < 1e-14


def test_dilog_special_points():
    assert dilog1m(1.0) == pytest.approx(math.pi**2 / 6, abs=1e-15)
    assert dilog1m(-1.0) == pytest.approx(-math.pi**2 / 12, abs=1e-15)
    assert dilog1m(0.5) == pytest.approx(math.pi**2 / 12 - math.log(2) ** 2 / 2, abs=1e-15)


@settings(max_examples=60)
@given(st.floats(-4, 4), st.floats(-4, 4))
def test_dilog_matches_mpmath_off_cut(x, y):
    z = complex(x, y)
    if abs(y) < 1e-3 and x > 1:
        return
    assert abs(dilog1m(z) - complex(mp.polylog(2, z))) < 1e-12


def test_dilog_cut_raises():
    with pytest.raises(BranchCutError):
        dilog1m(2.0)


def test_q_pochhammer_frozen():
    # mpmath.qp(0.3 + 0.2j, 0.5)
    want = 0.469510146422488010 - 0.256918368734619676j
    assert abs(q_pochhammer(0.3 + 0.2j, 0.5) - want) < 1e-14


@pytest.mark.parametrize("q", [0.1, 0.2, 0.5, 0.9])
def test_macmahon_against_mpmath(q):
    want = float(mp.nprod(lambda n: (1 - mp.mpf(q) ** n) ** n, [1, mp.inf]))
    assert macmahon_m(q) == pytest.approx(want, rel=1e-12)


def test_macmahon_frozen_at_0_2():
    assert macmahon_m(0.2) == pytest.approx(0.71363086233874675, abs=1e-15)


@pytest.mark.parametrize("t", [-2, 0, 3])
def test_phi_definition(t):
    q = QParam.from_q(0.3)
    z = 0.8 * cmath.exp(0.7j)
    qq = 0.3
    if t >= 0:
        want = complex(mp.qp(qq**0.5 / z, qq) / mp.qp(qq ** (0.5 + t) * z, qq))
    else:
        want = complex(mp.qp(qq ** (0.5 - t) / z, qq) / mp.qp(qq**0.5 * z, qq))
    assert abs(phi(t, z, q) - want) < 1e-13


def test_phi_pole_detected():
    q = QParam.from_q(0.25)
    with pytest.raises(PoleError):
        phi(0, 1.0 / 0.5, q)  # 1 - q^{1/2} z = 0


def test_qparam_validation():
    with pytest.raises(ParameterError):
        QParam.from_q(1.0)
    with pytest.raises(ParameterError):
        QParam(0.5, 1.0)
    assert QParam.from_r(0.1).q == pytest.approx(math.exp(-0.1))


def test_g_is_imaginary_on_circle_and_zg_prime_real():
    G = GCoefficients((0.7, 0.2 + 0.3j))
    z = np.exp(1j * np.linspace(0, 2 * np.pi, 17))
    assert np.max(np.abs(np.real(g_eval(G, z)))) < 1e-14
    a = zg_prime(G, z)
    b = zg_prime_angle(G, np.angle(z))
    assert np.max(np.abs(a - b)) < 1e-13


def test_plancherel_u_range():
    G = GCoefficients.plancherel(1.0)
    phis = np.linspace(-np.pi, np.pi, 1001)
    v = zg_prime_angle(G, phis)
    assert v.max() == pytest.approx(2.0) and v.min() == pytest.approx(-2.0)


def test_annulus_guard():
    G = GCoefficients.plancherel(1.0, radius_margin=0.1)
    with pytest.raises(DomainError):
        g_eval(G, 1.5)


@pytest.mark.parametrize("u", [-1.5, 0.0, 0.7])
def test_schur_action_real_part_vanishes_on_circle(u):
    G = GCoefficients.plancherel(1.0)
    phis = np.linspace(-3.0, 3.0, 41)
    vals = action_schur(G, u, np.exp(1j * phis))
    assert np.max(np.abs(vals.real)) < 1e-12


@pytest.mark.parametrize("tau,chi", [(0.0, 0.0), (1.0, 0.2), (0.5, -0.3)])
def test_pp_action_real_part_constant_on_gamma(tau, chi):
    phis = np.linspace(-3.0, 3.0, 41)
    z = math.exp(tau / 2) * np.exp(1j * phis)
    vals = action_pp(z, tau, chi)
    want = -(tau / 2) * (tau / 2 + chi)
    assert np.max(np.abs(vals.real - want)) < 1e-10


def test_pp_action_with_tau_one_at_two():
    # e^{-1} * 2 < 1 keeps the second dilogarithm off its cut
    v = action_pp(2.0, 1.0, 0.0)
    want = -0.5 * math.log(2) - complex(mp.polylog(2, 0.5)) + complex(mp.polylog(2, 2 * math.exp(-1)))
    assert abs(v - want) < 1e-14


def test_pp_action_rejects_log_cut():
    with pytest.raises(BranchCutError):
        action_pp(-1.0, 0.0, 0.0)
