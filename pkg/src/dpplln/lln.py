"""Pattern-weighted linear statistics, their limits, and the experiment harness.

For the Schur model the statistic is

    Sigma(f, m, alpha) = (1/alpha) sum_{x in [alpha u_min, alpha u_max]} f(x/alpha) c_{m+x},

and its limit is the integral of f(u) det S(u)|_m over [u_min, u_max].  For
plane partitions the sum runs over (t, h) in E with (rt, rh) in A, weighted by
r^2, and the limit integrates f det S_{z(tau, chi)}|_m over A.
"""

from __future__ import annotations

import math
import os
import warnings
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import RegularGridInterpolator

from .combinatorics import Pattern, SitePP, pp_map, shur_map
from .dpp import (
    RngSeed,
    WindowConfig,
    det_small,
    pattern_covariance,
    sample_plancherel,
    sample_plane_partition,
    sample_window,
)
from .errors import CoverageError, OverlapError, ParameterError
from .kernels import (
    KernelSpec,
    extended_sine_matrix,
    kernel_matrix,
    region_a_chi_bounds,
    region_a_contains,
    sine_arcs,
    sine_kernel_matrix,
    u_range,
)
from .specialfn import GCoefficients, QParam, zg_prime_angle

THREADS_ENV = "DPPLLN_THREADS"


# ---------------------------------------------------------------------------
# Test functions


def _bump1(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s, dtype=float)
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass(frozen=True)
class TestFunction:
    """Continuous compactly supported test function on R or R^2.

    kinds:
      * ``bump``: exp(1 - 1/(1 - s^2)) in each coordinate, s = (x - center)/width;
      * ``polynomial``: sum coeffs[k] x^k on ``support`` (1-D), or
        sum coeffs[j][k] tau^j chi^k on a box (2-D), zero outside;
      * ``tabulated``: piecewise-linear through (grid, values), zero outside.
    """

    kind: str
    params: tuple = ()

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self) -> None:
        if self.kind not in ("bump", "polynomial", "tabulated"):
            raise ParameterError(f"unknown test function kind {self.kind!r}")

    # constructors -----------------------------------------------------------
    @classmethod
    def bump(cls, center, width) -> TestFunction:
        c = tuple(np.atleast_1d(np.asarray(center, dtype=float)).tolist())
        w = np.atleast_1d(np.asarray(width, dtype=float))
        if w.size == 1 and len(c) == 2:
            w = np.repeat(w, 2)
        if np.any(w <= 0):
            raise ParameterError("bump width must be positive")
        return cls("bump", (c, tuple(w.tolist())))

    @classmethod
    def polynomial(cls, coeffs, support) -> TestFunction:
        sup = tuple(float(v) for v in np.ravel(support))
        if len(sup) not in (2, 4) or sup[0] >= sup[1] or (len(sup) == 4 and sup[2] >= sup[3]):
            raise ParameterError("polynomial support must be [a, b] or [a, b, c, d] with a < b, c < d")
        arr = np.asarray(coeffs, dtype=float)
        return cls("polynomial", (tuple(map(tuple, np.atleast_2d(arr))) if len(sup) == 4 else tuple(arr.ravel()), sup))

    @classmethod
    def tabulated(cls, grid, values) -> TestFunction:
        if isinstance(grid[0], (list, tuple, np.ndarray)):
            g = tuple(tuple(float(v) for v in axis) for axis in grid)
            vals = np.asarray(values, dtype=float)
            if vals.shape != tuple(len(a) for a in g):
                raise ParameterError("tabulated values do not match the 2-D grid")
            return cls("tabulated", (g, tuple(map(tuple, vals))))
        g = tuple(float(v) for v in grid)
        vals = tuple(float(v) for v in values)
        if len(g) != len(vals) or len(g) < 2 or any(a >= b for a, b in zip(g, g[1:])):
            raise ParameterError("tabulated grid must be increasing and match the values")
        return cls("tabulated", (g, vals))

    # geometry -------------------------------------------------------------
    @property
    def dim(self) -> int:
        if self.kind == "bump":
            return len(self.params[0])
        if self.kind == "polynomial":
            return 1 if len(self.params[1]) == 2 else 2
        return 2 if isinstance(self.params[0][0], tuple) else 1

    def support(self) -> tuple[float, ...]:
        """[a, b] in 1-D or [tau0, tau1, chi0, chi1] in 2-D."""
        if self.kind == "bump":
            c, w = self.params
            out = []
            for ci, wi in zip(c, w):
                out += [ci - wi, ci + wi]
            return tuple(out)
        if self.kind == "polynomial":
            return self.params[1]
        if self.dim == 1:
            g = self.params[0]
            return (g[0], g[-1])
        ga, gb = self.params[0]
        return (ga[0], ga[-1], gb[0], gb[-1])

    def __call__(self, x, y=None) -> np.ndarray | float:
        x_arr = np.asarray(x, dtype=float)
        scalar = x_arr.ndim == 0 and (y is None or np.ndim(y) == 0)
        if self.dim == 2 and y is None:
            raise ParameterError("2-D test function needs two coordinates")
        if self.kind == "bump":
            c, w = self.params
            out = _bump1((x_arr - c[0]) / w[0])
            if self.dim == 2:
                out = out * _bump1((np.asarray(y, dtype=float) - c[1]) / w[1])
        elif self.kind == "polynomial":
            coeffs, sup = self.params
            if self.dim == 1:
                out = np.polynomial.polynomial.polyval(x_arr, coeffs)
                out = np.where((x_arr >= sup[0]) & (x_arr <= sup[1]), out, 0.0)
            else:
                y_arr = np.asarray(y, dtype=float)
                out = np.polynomial.polynomial.polyval2d(x_arr, y_arr, np.asarray(coeffs))
                inside = (x_arr >= sup[0]) & (x_arr <= sup[1]) & (y_arr >= sup[2]) & (y_arr <= sup[3])
                out = np.where(inside, out, 0.0)
        else:
            if self.dim == 1:
                g, v = self.params
                out = np.interp(x_arr, g, v, left=0.0, right=0.0)
            else:
                (ga, gb), v = self.params
                interp = RegularGridInterpolator((ga, gb), np.asarray(v), bounds_error=False, fill_value=0.0)
                pts = np.stack(np.broadcast_arrays(x_arr, np.asarray(y, dtype=float)), axis=-1)
                out = interp(pts)
        return float(np.asarray(out).reshape(-1)[0]) if scalar else np.asarray(out)

    def modulus_of_continuity(self, delta: float, samples: int = 20001) -> float:
        """Numerical sup |f(x) - f(y)| over |x - y| <= delta (1-D only)."""
        a, b = self.support()
        xs = np.linspace(a - delta, b + delta, samples)
        fx = self(xs)
        step = xs[1] - xs[0]
        k = max(1, int(math.ceil(delta / step)))
        best = 0.0
        for j in range(1, k + 1):
            best = max(best, float(np.max(np.abs(fx[j:] - fx[:-j]))))
        return best

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": _jsonable(self.params)}


def _jsonable(v):
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


# ---------------------------------------------------------------------------
# Lattice rounding


def round_half_down(y: float) -> int:
    """Nearest integer, ties toward -inf."""
    return int(math.ceil(y - 0.5))


def pp_anchor(m: Pattern, tau: float, chi: float, r: float) -> SitePP:
    """Lattice displacement standing for (tau, chi)/r.

    t is rounded to the nearest integer (ties down); h is then taken as the
    largest value <= chi/r whose parity makes the translated pattern
    admissible (for the empty pattern: the site itself).
    """
    bt = round_half_down(tau / r)
    ref = m.sites[0] if len(m) else SitePP(0, 0)
    parity = (ref.h2 + abs(ref.t + bt) + 1) % 2
    bh2 = math.floor(2.0 * chi / r + 1e-9)
    if (bh2 - parity) % 2:
        bh2 -= 1
    return SitePP(bt, bh2)


def _pattern_parity_consistent(m: Pattern) -> bool:
    sites = list(m)
    return all((a.h2 - b.h2 + a.t - b.t) % 2 == 0 for a in sites for b in sites)


# ---------------------------------------------------------------------------
# Statistics


def schur_lattice_range(G: GCoefficients, alpha: float) -> tuple[int, int]:
    u_min, u_max = u_range(G)
    return math.ceil(alpha * u_min - 1e-9), math.floor(alpha * u_max + 1e-9)


def _schur_support_range(f: TestFunction, G: GCoefficients, alpha: float) -> tuple[int, int]:
    lo, hi = schur_lattice_range(G, alpha)
    a, b = f.support()
    return max(lo, math.ceil(alpha * a - 1e-9)), min(hi, math.floor(alpha * b + 1e-9))


def empirical_statistic_schur(config: WindowConfig, f: TestFunction, m: Pattern, alpha: float, G: GCoefficients) -> float:
    """(1/alpha) sum over lattice x in [alpha u_min, alpha u_max] of f(x/alpha) c_{m+x}."""
    lo, hi = _schur_support_range(f, G, alpha)
    if hi < lo:
        return 0.0
    sites = list(m)
    need_lo = lo + (min(sites) if sites else 0)
    need_hi = hi + (max(sites) if sites else 0)
    if not config.covers(range(need_lo, need_hi + 1)):
        raise CoverageError(f"window does not cover [{need_lo}, {need_hi}]")
    pts = config.points
    xs = np.arange(lo, hi + 1)
    fx = np.asarray(f(xs / alpha))
    total = 0.0
    for x, fv in zip(xs, fx):
        if fv != 0.0 and all((s + x) in pts for s in sites):
            total += fv
    return total / alpha


def pp_base_sites(f: TestFunction, r: float) -> list[SitePP]:
    """Base points (t, h) of E with (rt, rh) in A and inside the support of f."""
    t0, t1, c0, c1 = f.support()
    out = []
    for t in range(math.ceil(t0 / r - 1e-9), math.floor(t1 / r + 1e-9) + 1):
        tau = r * t
        lo, hi = region_a_chi_bounds(tau)
        lo, hi = max(lo, c0), min(hi, c1)
        for h2 in range(math.floor(2 * lo / r) - 1, math.ceil(2 * hi / r) + 2):
            chi = r * h2 / 2
            if c0 <= chi <= c1 and region_a_contains(tau, chi):
                out.append(SitePP(t, h2))
    return out


def empirical_statistic_pp(config: WindowConfig, f: TestFunction, m: Pattern, r: float) -> float:
    """r^2 sum over (t, h) in E with (rt, rh) in A of f(rt, rh) c_{(t,h)+m}.

    Translates that hit non-admissible sites are never occupied and count 0.
    """
    bases = pp_base_sites(f, r)
    sites = list(m)
    pts = config.points
    total = 0.0
    for b in bases:
        fv = f(r * b.t, r * b.h2 / 2)
        if fv == 0.0:
            continue
        moved = [s.shifted(b.t, b.h2) for s in sites]
        if not all(s.admissible for s in moved):
            continue
        if not config.covers(moved):
            raise CoverageError(f"window does not cover the translate of the pattern at {b}")
        if all(s in pts for s in moved):
            total += fv
    return r * r * total


# ---------------------------------------------------------------------------
# Limits


def _schur_breakpoints(G: GCoefficients) -> list[float]:
    """Critical values of zG' on T, where the number of arcs can change."""
    n = 8192 * G.order
    phis = -np.pi + 2 * np.pi * np.arange(n) / n
    v = zg_prime_angle(G, phis)
    prev, nxt = np.roll(v, 1), np.roll(v, -1)
    ext = ((v >= prev) & (v >= nxt)) | ((v <= prev) & (v <= nxt))
    return sorted(set(np.round(v[ext], 12).tolist()))


def limit_density_schur(G: GCoefficients, m: Pattern, u: float) -> float:
    sites = list(m)
    if not sites:
        return 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        arcs = sine_arcs(G, u)
    return float(det_small(sine_kernel_matrix(arcs, sites)).real)


def limit_integral_schur(f: TestFunction, m: Pattern, G: GCoefficients, tol: float = 1e-10) -> tuple[float, float]:
    """Integral of f(u) det S(u)|_m over [u_min, u_max], split at arc-count changes."""
    u_min, u_max = u_range(G)
    a, b = f.support()
    lo, hi = max(u_min, a), min(u_max, b)
    if hi <= lo:
        return 0.0, 0.0
    pts = [p for p in _schur_breakpoints(G) if lo < p < hi]

    def integrand(u: float) -> float:
        return float(f(u)) * limit_density_schur(G, m, u)

    val, err = quad(integrand, lo, hi, points=pts or None, epsabs=tol, epsrel=tol, limit=400)
    return float(val), float(err)


def limit_density_pp(m: Pattern, tau: float, chi: float) -> float:
    sites = list(m)
    if not sites:
        return 1.0
    if not region_a_contains(tau, chi):
        return 0.0
    if not _pattern_parity_consistent(m):
        return 0.0
    dts = np.array([[a.t - b.t for b in sites] for a in sites], dtype=np.int64)
    dh2 = np.array([[a.h2 - b.h2 for b in sites] for a in sites], dtype=np.int64)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        k = extended_sine_matrix(tau, chi, dts, dh2)
    return float(det_small(k).real)


def limit_integral_pp(f: TestFunction, m: Pattern, tol: float = 1e-8) -> tuple[float, float]:
    """Integral over A of f(tau, chi) det S_{z(tau, chi)}|_m.

    A is handled exactly: at fixed tau its chi-section is an explicit open
    interval, so the iterated quadrature never straddles the boundary.
    """
    t0, t1, c0, c1 = f.support()
    inner_err = [0.0]

    def inner(tau: float) -> float:
        lo, hi = region_a_chi_bounds(tau)
        lo, hi = max(lo, c0), min(hi, c1)
        if hi <= lo:
            return 0.0
        v, e = quad(lambda chi: float(f(tau, chi)) * limit_density_pp(m, tau, chi), lo, hi, epsabs=tol / 10, epsrel=tol, limit=200)
        inner_err[0] = max(inner_err[0], e)
        return v

    pts = [0.0] if t0 < 0.0 < t1 else None
    val, err = quad(inner, t0, t1, points=pts, epsabs=tol, epsrel=tol, limit=200)
    return float(val), float(err + inner_err[0] * (t1 - t0))


# ---------------------------------------------------------------------------
# Experiments


@dataclass(frozen=True)
class SchurModel:
    G: GCoefficients
    kind: str = "schur"


@dataclass(frozen=True)
class PlanePartitionModel:
    box: int | None = None
    steps: int | None = None
    kind: str = "pp"


@dataclass(frozen=True)
class ExperimentResult:
    sigma_samples: tuple[float, ...]
    i_value: float
    i_quadrature_error: float
    mean: float
    variance: float
    stderr: float
    z_score: float
    discretization_bound: float
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sigma_samples"] = list(self.sigma_samples)
        return d


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 1


def _map_replicas(fn, replicas: int, workers: int | None) -> list[float]:
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1:
        return [fn(k) for k in range(replicas)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(replicas)))


def schur_window(G: GCoefficients, alpha: float, m: Pattern) -> tuple[int, int]:
    lo, hi = schur_lattice_range(G, alpha)
    sites = list(m)
    return lo + min(sites, default=0) - 1, hi + max(sites, default=0) + 1


def sample_schur_config(G: GCoefficients, alpha: float, window: tuple[int, int], rng: RngSeed) -> WindowConfig:
    a, b = window
    if G.is_plancherel:
        lam = sample_plancherel(alpha * abs(G.c[0]), rng)
        return WindowConfig.from_points(range(a, b + 1), shur_map(lam, (a, b)))
    return sample_window(KernelSpec.schur(G, alpha), list(range(a, b + 1)), rng)


def pp_window(f: TestFunction, m: Pattern, r: float) -> tuple[int, int, int, int]:
    bases = pp_base_sites(f, r)
    sites = list(m) or [SitePP(0, 0)]
    ts = [b.t + s.t for b in bases for s in sites] or [0]
    hs = [b.h2 + s.h2 for b in bases for s in sites] or [0]
    return min(ts), max(ts), min(hs), max(hs)


def sample_pp_config(q: QParam, window: tuple[int, int, int, int], rng: RngSeed, box: int | None, steps: int | None) -> WindowConfig:
    t0, t1, h0, h1 = window
    pi = sample_plane_partition(q, steps, rng, box)
    sites = [SitePP(t, h2) for t in range(t0, t1 + 1) for h2 in range(h0, h1 + 1) if (h2 + abs(t) + 1) % 2 == 0]
    return WindowConfig.from_points(sites, pp_map(pi, window))


def riemann_bound_schur(f: TestFunction, G: GCoefficients, alpha: float) -> float:
    """Bound on |Sigma - I| for the empty pattern: continuity modulus at mesh
    1/alpha times the integration length, plus one mesh cell per endpoint."""
    u_min, u_max = u_range(G)
    fmax = float(np.max(np.abs(f(np.linspace(*f.support(), 4001)))))
    return f.modulus_of_continuity(1.0 / alpha) * (u_max - u_min) + 2.0 * fmax / alpha


def run_lln_experiment(
    model: SchurModel | PlanePartitionModel,
    f: TestFunction,
    m: Pattern,
    scale: float,
    replicas: int,
    rng: RngSeed,
    tol: float = 1e-10,
    workers: int | None = None,
) -> ExperimentResult:
    """Monte Carlo replicas of Sigma(f, m, scale) next to the limit I(f, m).

    ``scale`` is alpha for the Schur model and r for plane partitions.
    Replica k draws from the stream ``rng.child(k)``, so results do not
    depend on the number of workers.
    """
    if replicas < 2:
        raise ParameterError("replicas must be at least 2")
    if not scale > 0:
        raise ParameterError("scale must be positive")
    if isinstance(model, SchurModel):
        G, alpha = model.G, float(scale)
        window = schur_window(G, alpha, m)
        i_val, i_err = limit_integral_schur(f, m, G, tol)

        def one(k: int) -> float:
            conf = sample_schur_config(G, alpha, window, rng.child(k))
            return empirical_statistic_schur(conf, f, m, alpha, G)

        disc = riemann_bound_schur(f, G, alpha) if not len(m) else 0.0
        params = {"model": "schur", "g": [[c.real, c.imag] for c in G.c], "alpha": alpha}
    elif isinstance(model, PlanePartitionModel):
        r = float(scale)
        q = QParam.from_r(r)
        window = pp_window(f, m, r)
        i_val, i_err = limit_integral_pp(f, m, max(tol, 1e-9))

        def one(k: int) -> float:
            conf = sample_pp_config(q, window, rng.child(k), model.box, model.steps)
            return empirical_statistic_pp(conf, f, m, r)

        disc = 0.0
        params = {"model": "pp", "r": r, "q": q.q}
    else:
        raise ParameterError(f"unknown model {model!r}")
    sig = np.array(_map_replicas(one, replicas, workers), dtype=float)
    mean = float(sig.mean())
    var = float(sig.var(ddof=1))
    se = math.sqrt(var / replicas)
    diff = mean - i_val
    z = diff / se if se > 0 else (0.0 if diff == 0 else math.copysign(math.inf, diff))
    params.update(
        {
            "pattern": [s.to_text() if isinstance(s, SitePP) else s for s in m],
            "f": f.to_dict(),
            "seed": rng.seed,
            "stream": rng.stream,
            "replicas": replicas,
        }
    )
    return ExperimentResult(tuple(sig.tolist()), i_val, i_err, mean, var, se, float(z), disc, params)


@dataclass(frozen=True)
class StudyTable:
    """Per-scale (or per-separation) errors plus a fitted decay summary."""

    scales: tuple[float, ...]
    values: tuple[float, ...]
    fit: dict

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.scales, self.values))


def _loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    x, y = np.asarray(x, float), np.asarray(y, float)
    ok = (x > 0) & (y > 0)
    if ok.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def convergence_study(
    model: SchurModel | PlanePartitionModel,
    m: Pattern,
    position: float | tuple[float, float],
    scales: Sequence[float],
) -> StudyTable:
    """Kernel-level error |E_scale[c_{m + position/scale}] - E_limit[c_m]| per scale.

    Schur: scales are alpha values (increasing), fit reports successive ratios
    err(next)/err(prev).  Plane partitions: scales are r values (decreasing),
    fit reports the log-log slope of err against r.
    """
    scales = [float(s) for s in scales]
    sites = list(m)
    errors = []
    if isinstance(model, SchurModel):
        if scales != sorted(scales):
            raise ParameterError("alpha scales must be increasing")
        u = float(position)
        limit = limit_density_schur(model.G, m, u)
        for alpha in scales:
            if not sites:
                errors.append(0.0)
                continue
            x0 = round_half_down(alpha * u)
            k = kernel_matrix(KernelSpec.schur(model.G, alpha), [s + x0 for s in sites])
            errors.append(abs(det_small(k).real - limit))
        ratios = [b / a if a > 0 else math.nan for a, b in zip(errors, errors[1:])]
        fit = {"ratios": ratios, "slope": _loglog_slope(scales, errors)}
    else:
        if scales != sorted(scales, reverse=True):
            raise ParameterError("r scales must be decreasing")
        tau, chi = position
        limit = limit_density_pp(m, tau, chi)
        for r in scales:
            if not sites:
                errors.append(0.0)
                continue
            b = pp_anchor(m, tau, chi, r)
            k = kernel_matrix(KernelSpec.pp(QParam.from_r(r)), [s.shifted(b.t, b.h2) for s in sites])
            errors.append(abs(det_small(k).real - limit))
        fit = {"slope": _loglog_slope(scales, errors)}
    return StudyTable(tuple(scales), tuple(errors), fit)


def decorrelation_study(
    model: SchurModel | PlanePartitionModel,
    m: Pattern,
    pairs: Sequence,
    scale: float,
) -> StudyTable:
    """|Cov(c_{m + p1/scale}, c_{m + p2/scale})| for each pair of macroscopic positions.

    Schur pairs are (u1, u2) and the separation is |u1 - u2|; plane-partition
    pairs are ((tau1, chi1), (tau2, chi2)) with separation
    max(|tau1 - tau2|, |chi1 - chi2|).  The fit is the log-log slope of |cov|
    against separation.
    """
    seps, covs = [], []
    mbar = m.norm
    for p1, p2 in pairs:
        if isinstance(model, SchurModel):
            alpha = float(scale)
            sep = abs(float(p1) - float(p2))
            if sep <= mbar / alpha or p1 == p2:
                raise OverlapError(f"positions {p1}, {p2} are not separated by more than m_bar/alpha")
            x1, x2 = round_half_down(alpha * p1), round_half_down(alpha * p2)
            a, b = m.translate(x1), m.translate(x2)
            if set(a) & set(b):
                raise OverlapError("translated patterns overlap")
            cov = pattern_covariance(KernelSpec.schur(model.G, alpha), a, b)
        else:
            r = float(scale)
            (ta, ca), (tb, cb) = p1, p2
            sep = max(abs(ta - tb), abs(ca - cb))
            if sep <= mbar * r:
                raise OverlapError(f"positions {p1}, {p2} are not separated by more than m_bar * r")
            ba, bb = pp_anchor(m, ta, ca, r), pp_anchor(m, tb, cb, r)
            a, b = m.translate(ba), m.translate(bb)
            if set(a) & set(b):
                raise OverlapError("translated patterns overlap")
            cov = pattern_covariance(KernelSpec.pp(QParam.from_r(r)), a, b)
        seps.append(sep)
        covs.append(abs(cov))
    return StudyTable(tuple(seps), tuple(covs), {"slope": _loglog_slope(seps, covs)})
