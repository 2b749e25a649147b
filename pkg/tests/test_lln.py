from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad

from dpplln.combinatorics import Partition, Pattern, PlanePartition, SitePP, pp_map, shur_map
from dpplln.dpp import RngSeed, WindowConfig
from dpplln.errors import CoverageError, OverlapError, ParameterError
from dpplln.kernels import KernelSpec, kernel_matrix, region_a_chi_bounds, u_range
from dpplln.lln import (
    PlanePartitionModel,
    SchurModel,
    TestFunction,
    convergence_study,
    decorrelation_study,
    empirical_statistic_pp,
    empirical_statistic_schur,
    limit_integral_pp,
    limit_integral_schur,
    pp_anchor,
    pp_base_sites,
    riemann_bound_schur,
    round_half_down,
    run_lln_experiment,
    schur_lattice_range,
    schur_window,
)
from dpplln.specialfn import GCoefficients

PLANCHEREL = GCoefficients.plancherel(1.0)
BUMP = TestFunction.bump(0.0, 1.5)
ONE = TestFunction.polynomial([1.0], [-2.0, 2.0])


@settings(max_examples=50)
@given(st.floats(-10, 10))
def test_test_functions_vanish_outside_support(x):
    fs = [
        BUMP,
        TestFunction.polynomial([1.0, -2.0, 0.5], [-1.0, 0.5]),
        TestFunction.tabulated([-1.0, 0.0, 1.0], [0.0, 2.0, 0.0]),
    ]
    for f in fs:
        a, b = f.support()
        if x < a or x > b:
            assert f(x) == 0.0


def test_test_function_kinds():
    assert BUMP(0.0) == pytest.approx(1.0)
    assert TestFunction.tabulated([-1.0, 0.0, 1.0], [0.0, 2.0, 0.0])(0.5) == pytest.approx(1.0)
    f2 = TestFunction.bump([0.0, 1.0], [0.5, 0.25])
    assert f2.dim == 2 and f2(0.0, 1.0) == pytest.approx(1.0) and f2(0.0, 1.3) == 0.0
    g2 = TestFunction.tabulated([[0.0, 1.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 2.0]])
    assert g2(0.5, 0.5) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        TestFunction.bump(0.0, -1.0)
    with pytest.raises(ParameterError):
        TestFunction.polynomial([1.0], [1.0, 0.0])


def test_rounding():
    assert [round_half_down(v) for v in (0.5, 1.5, -0.5, 0.49, 0.51)] == [0, 1, -1, 0, 1]


@pytest.mark.parametrize("tau,chi,r", [(0.0, 0.0, 0.1), (0.33, -0.2, 0.05), (-0.4, 0.3, 0.07)])
def test_pp_anchor_makes_pattern_admissible(tau, chi, r):
    m = Pattern((SitePP(0, -1), SitePP(1, 0)))
    b = pp_anchor(m, tau, chi, r)
    assert all(s.admissible for s in m.translate(b))
    assert abs(b.t - tau / r) <= 0.5
    assert 0 <= 2 * chi / r - b.h2 < 2 + 1e-9


def test_empty_pattern_is_plain_riemann_sum():
    alpha = 7.0
    lo, hi = schur_lattice_range(PLANCHEREL, alpha)
    conf = WindowConfig.from_points(range(lo - 1, hi + 2), shur_map(Partition((3, 1)), (lo - 1, hi + 1)))
    xs = np.arange(lo, hi + 1)
    assert empirical_statistic_schur(conf, BUMP, Pattern(()), alpha, PLANCHEREL) == pytest.approx(BUMP(xs / alpha).sum() / alpha)


def test_vacuum_counts_nonpositive_sites():
    alpha = 5.0
    lo, hi = schur_lattice_range(PLANCHEREL, alpha)
    conf = WindowConfig.from_points(range(lo - 2, hi + 2), shur_map(Partition(()), (lo - 2, hi + 1)))
    val = empirical_statistic_schur(conf, ONE, Pattern((-1,)), alpha, PLANCHEREL)
    assert val == pytest.approx(sum(1 for x in range(lo, hi + 1) if x <= 0) / alpha)


def test_zero_function_and_coverage():
    alpha = 5.0
    conf = WindowConfig.from_points(range(-20, 20), set(range(-20, 0)))
    zero = TestFunction.polynomial([0.0], [-2.0, 2.0])
    assert empirical_statistic_schur(conf, zero, Pattern((0,)), alpha, PLANCHEREL) == 0.0
    small = WindowConfig.from_points(range(-3, 3), set())
    with pytest.raises(CoverageError):
        empirical_statistic_schur(small, ONE, Pattern((0,)), alpha, PLANCHEREL)


def test_pp_statistic_on_empty_plane_partition():
    r = 0.25
    f = TestFunction.bump([0.0, -0.6], [0.6, 0.5])
    m = Pattern((SitePP(0, -1),))
    bases = pp_base_sites(f, r)
    ts = [b.t for b in bases]
    hs = [b.h2 for b in bases]
    window = (min(ts) - 1, max(ts) + 1, min(hs) - 2, max(hs) + 2)
    pts = pp_map(PlanePartition(()), window)
    sites = [SitePP(t, h2) for t in range(window[0], window[1] + 1) for h2 in range(window[2], window[3] + 1) if SitePP(t, h2).admissible]
    conf = WindowConfig.from_points(sites, pts)
    # vacuum: (t, h) + (0, -1/2) occupied iff h - 1/2 <= -(|t| + 1)/2
    want = sum(f(r * b.t, r * b.h2 / 2) for b in bases if (b.h2 - 1 + abs(b.t) + 1) % 2 == 0 and b.h2 - 1 <= -(abs(b.t) + 1))
    assert empirical_statistic_pp(conf, f, m, r) == pytest.approx(r * r * want, abs=1e-14)


def test_limit_integral_schur_examples():
    lo, hi = u_range(PLANCHEREL)
    v, _ = limit_integral_schur(ONE, Pattern(()), PLANCHEREL)
    assert v == pytest.approx(hi - lo, abs=1e-10)
    v, err = limit_integral_schur(ONE, Pattern((0,)), PLANCHEREL)
    assert v == pytest.approx(2.0, abs=1e-10) and err < 1e-8
    outside = TestFunction.bump(3.0, 0.5)
    assert limit_integral_schur(outside, Pattern((0,)), PLANCHEREL)[0] == 0.0


def test_limit_integral_schur_error_estimate_is_honest():
    f = TestFunction.tabulated([-1.0, 0.0, 1.5], [0.0, 1.0, 0.0])
    m = Pattern((0, 2))
    v, err = limit_integral_schur(f, m, PLANCHEREL, tol=1e-8)
    ref, _ = limit_integral_schur(f, m, PLANCHEREL, tol=1e-12)
    assert abs(v - ref) <= max(err, 1e-12)


def test_limit_integral_pp_box_area_and_outside():
    box = TestFunction.polynomial([[1.0]], [-0.2, 0.2, -0.3, 0.3])
    v, _ = limit_integral_pp(box, Pattern(()))
    assert v == pytest.approx(0.4 * 0.6, abs=1e-8)
    far = TestFunction.bump([0.0, -3.0], [0.2, 0.2])
    assert limit_integral_pp(far, Pattern((SitePP(0, -1),)))[0] == 0.0


def test_limit_integral_pp_diagonal_closed_form():
    f = TestFunction.bump([0.0, 0.0], [0.5, 0.5])
    v, err = limit_integral_pp(f, Pattern((SitePP(0, -1),)))

    def angle(tau, chi):
        r1, r2 = math.exp(-tau / 2), math.exp(-tau / 4 - chi / 2)
        x = (1 + r1 * r1 - r2 * r2) / 2
        return math.acos(max(-1.0, min(1.0, x / r1)))

    def integrand(chi, tau):
        lo, hi = region_a_chi_bounds(tau)
        if not lo < chi < hi:
            return 0.0
        return float(f(tau, chi)) * angle(tau, chi) / math.pi

    ref, _ = dblquad(integrand, -0.5, 0.5, -0.5, 0.5, epsabs=1e-10)
    assert v == pytest.approx(ref, abs=1e-7)


@pytest.mark.parametrize("alpha", [10.0, 100.0])
def test_riemann_sum_within_continuity_bound(alpha):
    lo, hi = schur_lattice_range(PLANCHEREL, alpha)
    xs = np.arange(lo, hi + 1)
    i_val, _ = limit_integral_schur(BUMP, Pattern(()), PLANCHEREL)
    assert abs(BUMP(xs / alpha).sum() / alpha - i_val) <= riemann_bound_schur(BUMP, PLANCHEREL, alpha)


def test_experiment_reproducible_across_workers():
    kw = dict(model=SchurModel(PLANCHEREL), f=BUMP, m=Pattern((0,)), scale=8.0, replicas=6, rng=RngSeed(9))
    a = run_lln_experiment(**kw, workers=1)
    b = run_lln_experiment(**kw, workers=3)
    assert a.sigma_samples == b.sigma_samples
    assert a.mean == pytest.approx(np.mean(a.sigma_samples))
    assert a.stderr == pytest.approx(math.sqrt(a.variance / 6))


def test_experiment_rejects_single_replica():
    with pytest.raises(ParameterError):
        run_lln_experiment(SchurModel(PLANCHEREL), BUMP, Pattern(()), 5.0, 1, RngSeed(0))


def test_tiny_theta_concentrates_on_vacuum():
    G = GCoefficients.plancherel(1e-4)
    res = run_lln_experiment(SchurModel(G), TestFunction.bump(0.0, 1.0), Pattern((0,)), 1.0, 4, RngSeed(0))
    assert res.variance == 0.0


def test_dpp_variance_below_independent_field():
    # negative association: a Bernoulli field with the same one-point function
    # fluctuates more than the determinantal one
    alpha, reps = 20.0, 200
    m = Pattern((0,))
    dpp = run_lln_experiment(SchurModel(PLANCHEREL), BUMP, m, alpha, reps, RngSeed(21))
    lo, hi = schur_window(PLANCHEREL, alpha, m)
    window = list(range(lo, hi + 1))
    dens = np.clip(np.diag(kernel_matrix(KernelSpec.schur(PLANCHEREL, alpha), window)).real, 0, 1)
    gen = RngSeed(22).generator()
    sig = []
    for _ in range(reps):
        occ = gen.random(len(window)) < dens
        conf = WindowConfig(tuple(window), tuple(occ))
        sig.append(empirical_statistic_schur(conf, BUMP, m, alpha, PLANCHEREL))
    var_b = float(np.var(sig, ddof=1))
    se = math.sqrt(2 / (reps - 1)) * math.hypot(var_b, dpp.variance)
    assert var_b - dpp.variance > 3 * se


def test_convergence_study_empty_pattern_is_zero():
    t = convergence_study(SchurModel(PLANCHEREL), Pattern(()), 0.0, [10, 20])
    assert t.values == (0.0, 0.0)
    t = convergence_study(PlanePartitionModel(), Pattern(()), (0.0, 0.0), [0.1, 0.05])
    assert t.values == (0.0, 0.0)


def test_convergence_study_rejects_unsorted():
    with pytest.raises(ParameterError):
        convergence_study(SchurModel(PLANCHEREL), Pattern((0,)), 0.0, [20, 10])
    with pytest.raises(ParameterError):
        convergence_study(PlanePartitionModel(), Pattern(()), (0.0, 0.0), [0.05, 0.1])


def test_convergence_study_small_errors():
    t = convergence_study(SchurModel(PLANCHEREL), Pattern((0, 1)), 0.5, [20, 40])
    assert max(t.values) < 0.05
    assert len(t.fit["ratios"]) == 1


def test_decorrelation_rejects_identical_positions():
    with pytest.raises(OverlapError):
        decorrelation_study(SchurModel(PLANCHEREL), Pattern((0,)), [(0.3, 0.3)], 50.0)
    with pytest.raises(OverlapError):
        decorrelation_study(PlanePartitionModel(), Pattern((SitePP(0, -1),)), [((0.0, 0.0), (0.0, 0.0))], 0.1)


def test_decorrelation_decays():
    t = decorrelation_study(SchurModel(PLANCHEREL), Pattern((0,)), [(0.3, 0.4), (0.3, 1.1)], 50.0)
    assert t.values[1] < t.values[0]
