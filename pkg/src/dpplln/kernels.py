"""Correlation kernels and the limit geometry they depend on.

Four kernels live here:

* ``schur_kernel``: the finite-alpha kernel of the symmetric Schur measure,
  as a double contour integral over |z| = 1 + eps, |w| = 1 - eps;
* ``sine_kernel``: its local limit, built from arcs of {zG'(z) >= u} on T;
* ``pp_kernel``: the (non-Hermitian) kernel of the q^|pi| plane-partition
  process, again a double contour integral;
* ``extended_sine_kernel``: its local limit inside the liquid region A.

All configurations follow the conventions of :mod:`dpplln.combinatorics`:
a partition maps to {lambda_i - i} and a plane partition to
{(i - j, pi_ij - (i + j - 1)/2)}.  Kernels are only defined up to a gauge
f(x)/f(y), so comparisons between kernels use diagonals and products
K(x, y) K(y, x).
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .combinatorics import SitePP
from .contour import CircleContour, QuadSettings, QuadratureResult, cauchy_double_contour, integrate_circle
from .errors import (
    ConditioningWarning,
    DomainError,
    ParameterError,
    ParityError,
    RegionError,
    TangencyWarning,
    TruncationWarning,
)
from .specialfn import GCoefficients, QParam, g_eval, phi, zg_prime_angle, zg_prime_angle_derivative

# ---------------------------------------------------------------------------
# Schur measure


def _default_eps(G: GCoefficients, quad: QuadSettings) -> float:
    return quad.eps if quad.eps is not None else 0.05 * min(1.0, G.radius_margin)


def _schur_eps(Ga: GCoefficients, xs: np.ndarray, ys: np.ndarray, eps0: float, budget: float = 8.0) -> float:
    """Shrink eps until the integrand's peak modulus stays below e^budget.

    The integrand grows like exp(alpha * eps * zG'); keeping its largest value
    moderate is what protects the final sum from cancellation.
    """
    theta = 2.0 * np.pi * np.arange(512) / 512
    omega = np.exp(1j * theta)
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    eps = eps0
    for _ in range(40):
        lz = math.log1p(eps)
        lw = math.log1p(-eps)
        re_gz = np.asarray(g_eval(Ga, (1 + eps) * omega)).real
        re_gw = np.asarray(g_eval(Ga, (1 - eps) * omega)).real
        peak_a = re_gz.max() - min((x_lo + 1) * lz, (x_hi + 1) * lz)
        peak_b = -re_gw.min() + max(y_lo * lw, y_hi * lw)
        if peak_a + peak_b <= budget:
            return eps
        eps /= 2
    return eps


def schur_kernel_matrix(
    G: GCoefficients,
    alpha: float,
    xs: Sequence[int],
    ys: Sequence[int] | None = None,
    quad: QuadSettings = QuadSettings(),
) -> QuadratureResult:
    """Matrix K_alpha(x, y) for x in xs, y in ys with a shared node table.

    K(x, y) = (1/2 pi i)^2 double integral of
    exp(alpha (G(z) - G(w))) / ((z - w) z^{x+1} w^{-y}) over |z| = 1 + eps,
    |w| = 1 - eps.  This normalisation makes the diagonal the one-point
    function of {lambda_i - i}; with G = 0 it reduces to 1{x = y <= -1}.
    """
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    xs_a = np.asarray(xs, dtype=np.int64).reshape(-1)
    ys_a = xs_a if ys is None else np.asarray(ys, dtype=np.int64).reshape(-1)
    Ga = G.scaled(alpha)
    eps = _schur_eps(Ga, xs_a, ys_a, _default_eps(G, quad))
    min_nodes = 1 << max(6, math.ceil(math.log2(8.0 / eps)))

    def a(z: np.ndarray) -> np.ndarray:
        e = np.exp(np.asarray(g_eval(Ga, z)))
        return e[:, None] * z[:, None] ** (-(xs_a[None, :] + 1)).astype(float)

    def b(w: np.ndarray) -> np.ndarray:
        e = np.exp(-np.asarray(g_eval(Ga, w)))
        return e[:, None] * w[:, None] ** ys_a[None, :].astype(float)

    return cauchy_double_contour(a, b, 1 + eps, 1 - eps, quad.tol, quad.max_nodes, min_nodes)


def schur_kernel(G: GCoefficients, alpha: float, x: int, y: int, quad: QuadSettings = QuadSettings()) -> complex:
    """K_alpha(x, y) of the symmetric Schur measure with specialisation alpha * rho."""
    res = schur_kernel_matrix(G, alpha, [x], [y], quad)
    return complex(res.value[0, 0])


def fourier_projection_kernel(
    G: GCoefficients,
    alpha: float,
    x: int,
    y: int,
    cutoff: int | None = None,
    tol: float = 1e-13,
) -> complex:
    """sum_{n=0}^{cutoff} F^(x - n) conj(F^(y - n)) with F(z) = exp(alpha G(1/z)).

    This is the kernel of the projection onto span{F z^n : n >= 0} in
    L^2(T).  With {lambda_i - i} as the configuration it coincides with
    ``schur_kernel`` at the reflected sites (-1 - x, -1 - y).
    """
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    Ga = G.scaled(alpha)
    base = max(x, y)
    if cutoff is None:
        # F^(k) = a_{-k} where exp(alpha G) = sum a_j z^j; grow the range
        # until the coefficients have died out.
        span = 16
        while True:
            ks = np.arange(-span, 1)
            coef = _fourier_coefficients(Ga, ks, tol)
            if np.max(np.abs(coef[:4])) < 1e-15 or span >= 1 << 12:
                break
            span *= 2
        cutoff = base + span
    lo = min(x, y) - cutoff
    ks = np.arange(lo, base + 1)
    coef = _fourier_coefficients(Ga, ks, tol)
    fx = coef[x - cutoff - lo : x - lo + 1][::-1]
    fy = coef[y - cutoff - lo : y - lo + 1][::-1]
    tail = max(abs(fx[-1]), abs(fy[-1]))
    if tail > 1e-12:
        warnings.warn(f"fourier_projection_kernel: tail term {tail:.2e} exceeds 1e-12", TruncationWarning, stacklevel=2)
    return complex(np.sum(fx * np.conj(fy)))


def _fourier_coefficients(Ga: GCoefficients, ks: np.ndarray, tol: float) -> np.ndarray:
    """F^(k) = (1/2 pi i) oint F(z) z^{-k-1} dz on the unit circle, F(z) = exp(G(1/z))."""

    def f(z: np.ndarray) -> np.ndarray:
        fz = np.exp(np.asarray(g_eval(Ga, 1.0 / z)))
        return fz[:, None] * z[:, None] ** (-(ks[None, :] + 1)).astype(float)

    res = integrate_circle(f, CircleContour(0j, 1.0, 64), tol=tol, max_nodes=1 << 18)
    return np.asarray(res.value)


@lru_cache(maxsize=256)
def u_range(G: GCoefficients) -> tuple[float, float]:
    """(min, max) of zG' over the unit circle: grid search, then golden section."""
    n = 4096
    phis = -np.pi + 2.0 * np.pi * np.arange(n) / n
    vals = zg_prime_angle(G, phis)
    h = 2.0 * np.pi / n

    def refine(sign: float, i: int) -> float:
        centre = phis[i]
        res = minimize_scalar(
            lambda p: sign * zg_prime_angle(G, p),
            bracket=(centre - h, centre, centre + h),
            method="golden",
            tol=1e-10,
        )
        return sign * float(res.fun)

    u_min = min(refine(1.0, int(np.argmin(vals))), float(vals.min()))
    u_max = max(refine(-1.0, int(np.argmax(vals))), float(vals.max()))
    return u_min, u_max


@lru_cache(maxsize=256)
def _argmax_angle(G: GCoefficients) -> float:
    n = 4096
    phis = -np.pi + 2.0 * np.pi * np.arange(n) / n
    i = int(np.argmax(zg_prime_angle(G, phis)))
    h = 2.0 * np.pi / n
    res = minimize_scalar(
        lambda p: -zg_prime_angle(G, p), bracket=(phis[i] - h, phis[i], phis[i] + h), method="golden", tol=1e-10
    )
    return float(np.angle(np.exp(1j * res.x)))


@dataclass(frozen=True)
class ArcSet:
    """Arcs of {e^{i phi} : zG'(e^{i phi}) >= u}.

    Each arc is (start, end) swept counterclockwise, with start in [-pi, pi)
    and end - start equal to its angular measure (so end may exceed pi).
    """

    arcs: tuple[tuple[float, float], ...]
    u: float = math.nan

    @property
    def measure(self) -> float:
        return float(sum(e - s for s, e in self.arcs))

    @property
    def density(self) -> float:
        return self.measure / (2.0 * math.pi)

    def __len__(self) -> int:
        return len(self.arcs)


def _wrap(a: float) -> float:
    w = (a + math.pi) % (2.0 * math.pi) - math.pi
    return w


def sine_arcs(G: GCoefficients, u: float, grid: int | None = None) -> ArcSet:
    """Arcs where zG' >= u, by sign-change bracketing and root polishing."""
    u_min, u_max = u_range(G)
    slack = 1e-10 * max(1.0, abs(u_min), abs(u_max))
    if u < u_min - slack or u > u_max + slack:
        raise DomainError(f"u={u} outside [u_min, u_max] = [{u_min}, {u_max}]")
    if u <= u_min + 1e-12:
        return ArcSet(((-math.pi, math.pi),), u)
    if u >= u_max - 1e-12:
        p = _argmax_angle(G)
        return ArcSet(((p, p),), u)
    n = grid or 4096 * max(1, G.order)
    phis = -np.pi + 2.0 * np.pi * np.arange(n + 1) / n
    g = zg_prime_angle(G, phis) - u
    pos = g >= 0
    starts: list[float] = []
    ends: list[float] = []

    def f(p: float) -> float:
        return zg_prime_angle(G, p) - u

    for i in range(n):
        if pos[i] == pos[i + 1]:
            continue
        root = brentq(f, phis[i], phis[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps)
        if abs(zg_prime_angle_derivative(G, root)) < 1e-8:
            warnings.warn(f"tangency of zG' - u at phi={root:.6g} (u={u})", TangencyWarning, stacklevel=2)
        (starts if pos[i + 1] else ends).append(root)
    if not starts:
        if pos.all():
            return ArcSet(((-math.pi, math.pi),), u)
        p = _argmax_angle(G)
        return ArcSet(((p, p),), u)
    starts.sort()
    ends.sort()
    arcs = []
    for s in starts:
        # the matching end is the first end counterclockwise from s
        later = [e for e in ends if e > s]
        e = later[0] if later else ends[0] + 2.0 * math.pi
        s_w = _wrap(s)
        arcs.append((s_w, s_w + (e - s)))
    return ArcSet(tuple(sorted(arcs)), u)


def sine_kernel_matrix(arcs: ArcSet, xs: Sequence[int], ys: Sequence[int] | None = None) -> np.ndarray:
    """(1/2 pi) integral over the arcs of e^{i (y - x) theta} d theta."""
    xa = np.asarray(xs, dtype=np.int64).reshape(-1)
    ya = xa if ys is None else np.asarray(ys, dtype=np.int64).reshape(-1)
    d = (ya[None, :] - xa[:, None]).astype(float)
    out = np.zeros(d.shape, dtype=complex)
    off = d != 0
    dd = np.where(off, d, 1.0)
    for s, e in arcs.arcs:
        out += np.where(off, (np.exp(1j * e * dd) - np.exp(1j * s * dd)) / (2j * np.pi * dd), (e - s) / (2 * np.pi))
    return out


def sine_kernel(arcs: ArcSet, x: int, y: int) -> complex:
    """Discrete sine kernel S(u)(x, y) for the arc set of u."""
    return complex(sine_kernel_matrix(arcs, [x], [y])[0, 0])


# ---------------------------------------------------------------------------
# Plane partitions


def region_a_contains(tau: float, chi: float) -> bool:
    """True iff |2 cosh(tau/2) - e^{-chi}| < 2 (the liquid region)."""
    try:
        val = abs(2.0 * math.cosh(tau / 2.0) - math.exp(-chi))
    except OverflowError:
        return False
    return val < 2.0


def region_a_chi_bounds(tau: float) -> tuple[float, float]:
    """Open chi-interval of A at fixed tau (upper end +inf when tau = 0)."""
    c = 2.0 * math.cosh(tau / 2.0)
    lo = -math.log(c + 2.0)
    hi = math.inf if c - 2.0 <= 0 else -math.log(c - 2.0)
    return lo, hi


@dataclass(frozen=True)
class CriticalPointPP:
    """Upper intersection point of |z| = e^{-tau/2} and |z - 1| = e^{-tau/4 - chi/2}."""

    z: complex
    tau: float
    chi: float

    @property
    def angle(self) -> float:
        return math.atan2(self.z.imag, self.z.real)


def critical_point_pp(tau: float, chi: float) -> CriticalPointPP:
    if not region_a_contains(tau, chi):
        raise RegionError(f"(tau, chi) = ({tau}, {chi}) is outside the liquid region")
    r1 = math.exp(-tau / 2.0)
    r2 = math.exp(-tau / 4.0 - chi / 2.0)
    x = (1.0 + r1 * r1 - r2 * r2) / 2.0
    disc = r1 * r1 - x * x
    if disc < 1e-10:
        warnings.warn("critical point close to the boundary of A", ConditioningWarning, stacklevel=2)
    y = math.sqrt(max(disc, 0.0))
    return CriticalPointPP(complex(x, y), float(tau), float(chi))


def critical_quadratic_roots(tau: float, chi: float) -> np.ndarray:
    """Roots of (1 - 1/z)(1 - e^{-tau} z) = e^{-tau/2 - chi}, i.e. of
    z^2 - (e^tau + 1 - e^{tau/2 - chi}) z + e^tau; they equal e^tau z(tau, chi)
    and its conjugate."""
    return np.roots([1.0, -(math.exp(tau) + 1.0 - math.exp(tau / 2.0 - chi)), math.exp(tau)])


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _arc_integral(rho: float, a: float, b: float, dt: np.ndarray, expo: np.ndarray, tol: float) -> np.ndarray:
    """(1/2 pi) integral_a^b (1 - w)^dt w^expo d theta, w = rho e^{i theta} (a > b allowed)."""
    n = 32 + 2 * int(np.max(np.abs(expo), initial=0) + np.max(np.abs(dt), initial=0))
    prev = None
    while True:
        x, wts = _gauss_legendre(n)
        theta = 0.5 * (b - a) * x + 0.5 * (a + b)
        w = rho * np.exp(1j * theta)
        vals = (1.0 - w[None, :]) ** dt[:, None] * w[None, :] ** expo[:, None]
        cur = 0.5 * (b - a) * (vals @ wts) / (2.0 * np.pi)
        if prev is not None and np.max(np.abs(cur - prev)) < tol:
            return cur
        if n > 8192:
            return cur
        prev = cur
        n *= 2


def extended_sine_matrix(tau: float, chi: float, dts: np.ndarray, dh2s: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Vectorised extended sine kernel over arrays of displacements."""
    cp = critical_point_pp(tau, chi)
    dts = np.asarray(dts, dtype=np.int64)
    dh2s = np.asarray(dh2s, dtype=np.int64)
    if np.any((dh2s + dts) % 2):
        raise ParityError("extended sine kernel needs h - t/2 integral for each displacement")
    rho = abs(cp.z)
    ang = cp.angle
    shape = dts.shape
    dt_f = dts.reshape(-1)
    expo = -((dh2s.reshape(-1) + dt_f) // 2)
    out = np.empty(dt_f.shape, dtype=complex)
    fwd = dt_f >= 0
    if fwd.any():
        out[fwd] = _arc_integral(rho, -ang, ang, dt_f[fwd].astype(float), expo[fwd].astype(float), tol)
    if (~fwd).any():
        out[~fwd] = _arc_integral(rho, -ang, ang - 2 * math.pi, dt_f[~fwd].astype(float), expo[~fwd].astype(float), tol)
    return out.reshape(shape)


def extended_sine_kernel(tau: float, chi: float, dt: int, dh2: int) -> complex:
    """(1/2 pi i) integral from conj(z) to z of (1 - w)^dt w^{-dh - dt/2} dw / w.

    The path is the arc of |w| = |z(tau, chi)| crossing (0, 1) when dt >= 0 and
    (-inf, 0) when dt < 0.  ``dh2`` is twice the height displacement.
    """
    if (dh2 + dt) % 2:
        raise ParityError(f"h - t/2 must be an integer (dt={dt}, dh={dh2 / 2})")
    return complex(extended_sine_matrix(tau, chi, np.array([dt]), np.array([dh2]))[0])


def _pp_exponent(s: SitePP) -> int:
    if not s.admissible:
        raise ParityError(f"site {s} violates h + (|t| + 1)/2 in Z")
    return (s.h2 + abs(s.t) + 1) // 2


def pp_log_radii(r: float, t1: int, t2: int) -> tuple[float, float]:
    """log|z| and log|w| for the K_q contours.

    Poles of Phi(t1, .) sit at |z| >= e^{r (1/2 + max(t1, 0))} and those of
    1/Phi(t2, .) at |w| <= e^{-r (1/2 + max(-t2, 0))}.  The circles are placed
    symmetrically around e^{r (t1 + t2)/4}, where the modulus of the integrand
    is nearly flat, so the trapezoid sum suffers little cancellation.
    """
    lo = -r * (0.5 + max(-t2, 0))
    hi = r * (0.5 + max(t1, 0))
    c = r * (t1 + t2) / 4.0
    if t1 >= t2:
        c = min(max(c, lo + 1e-3 * r), hi - 1e-3 * r)
        d = min(c - lo, hi - c) / 2.0
        return c + d, c - d
    d = r / 4.0
    return min(c, hi) - d, max(c, lo) + d


def pp_kernel_matrix(
    q: QParam,
    rows: Sequence[SitePP],
    cols: Sequence[SitePP] | None = None,
    quad: QuadSettings = QuadSettings(),
) -> np.ndarray:
    """Matrix of K_q(s1, s2) for s1 in rows, s2 in cols.

    K_q(s1, s2) = (1/2 pi i)^2 double integral of
    Phi(t1, z) / Phi(t2, w) * w^{a2 - 1} / ((z - w) z^{a1}),
    a_i = h_i + (|t_i| + 1)/2, with |z| > |w| when t1 >= t2 and |z| < |w|
    otherwise.  The extra 1/w fixes the normalisation so that the q -> 0
    limit is the vacuum {(t, -|t|/2 - 1/2 - k) : k >= 0}.
    """
    rows = list(rows)
    cols = rows if cols is None else list(cols)
    out = np.zeros((len(rows), len(cols)), dtype=complex)
    a_rows = np.array([_pp_exponent(s) for s in rows], dtype=np.int64)
    a_cols = np.array([_pp_exponent(s) for s in cols], dtype=np.int64)
    t_rows = np.array([s.t for s in rows], dtype=np.int64)
    t_cols = np.array([s.t for s in cols], dtype=np.int64)
    for t1 in np.unique(t_rows):
        ri = np.nonzero(t_rows == t1)[0]
        for t2 in np.unique(t_cols):
            ci = np.nonzero(t_cols == t2)[0]
            out[np.ix_(ri, ci)] = _pp_block(q, int(t1), int(t2), a_rows[ri], a_cols[ci], quad)
    return out


def _pp_block(q: QParam, t1: int, t2: int, a1: np.ndarray, a2: np.ndarray, quad: QuadSettings) -> np.ndarray:
    lz, lw = pp_log_radii(q.r, t1, t2)
    gap = abs(lz - lw)
    min_nodes = 1 << max(6, math.ceil(math.log2(40.0 / gap)))

    def a(z: np.ndarray) -> np.ndarray:
        return np.asarray(phi(t1, z, q))[:, None] * z[:, None] ** (-a1[None, :]).astype(float)

    def b(w: np.ndarray) -> np.ndarray:
        return (1.0 / np.asarray(phi(t2, w, q)))[:, None] * w[:, None] ** (a2[None, :] - 1).astype(float)

    res = cauchy_double_contour(a, b, math.exp(lz), math.exp(lw), quad.tol, max(quad.max_nodes, min_nodes), min_nodes)
    return np.asarray(res.value)


def pp_kernel(q: QParam, s1: SitePP, s2: SitePP, quad: QuadSettings = QuadSettings()) -> float:
    """K_q(s1, s2); the kernel is real for real q."""
    return float(pp_kernel_matrix(q, [s1], [s2], quad)[0, 0].real)


# ---------------------------------------------------------------------------
# Uniform front end


@dataclass(frozen=True)
class KernelSpec:
    """A kernel together with its parameters and quadrature settings."""

    variant: str
    G: GCoefficients | None = None
    alpha: float | None = None
    u: float | None = None
    q: QParam | None = None
    tau: float | None = None
    chi: float | None = None
    quad: QuadSettings = field(default_factory=QuadSettings)

    def __post_init__(self) -> None:
        if self.variant == "schur":
            if self.G is None or self.alpha is None or not self.alpha > 0:
                raise ParameterError("schur kernel needs G and alpha > 0")
        elif self.variant == "sine":
            if self.G is None or self.u is None:
                raise ParameterError("sine kernel needs G and u")
            lo, hi = u_range(self.G)
            if not lo - 1e-9 <= self.u <= hi + 1e-9:
                raise ParameterError(f"u={self.u} outside [{lo}, {hi}]")
        elif self.variant == "pp":
            if self.q is None:
                raise ParameterError("pp kernel needs q")
        elif self.variant == "extended_sine":
            if self.tau is None or self.chi is None:
                raise ParameterError("extended sine kernel needs tau and chi")
            if not region_a_contains(self.tau, self.chi):
                raise RegionError(f"(tau, chi) = ({self.tau}, {self.chi}) outside A")
        else:
            raise ParameterError(f"unknown kernel variant {self.variant!r}")

    @classmethod
    def schur(cls, G: GCoefficients, alpha: float, quad: QuadSettings = QuadSettings()) -> KernelSpec:
        return cls("schur", G=G, alpha=float(alpha), quad=quad)

    @classmethod
    def sine(cls, G: GCoefficients, u: float) -> KernelSpec:
        return cls("sine", G=G, u=float(u))

    @classmethod
    def pp(cls, q: QParam, quad: QuadSettings = QuadSettings()) -> KernelSpec:
        return cls("pp", q=q, quad=quad)

    @classmethod
    def extended_sine(cls, tau: float, chi: float) -> KernelSpec:
        return cls("extended_sine", tau=float(tau), chi=float(chi))

    @property
    def lattice(self) -> str:
        return "Z" if self.variant in ("schur", "sine") else "ZxZ/2"


def kernel_matrix(spec: KernelSpec, rows: Sequence, cols: Sequence | None = None) -> np.ndarray:
    """K(rows[i], cols[j]) for any kernel variant."""
    rows = list(rows)
    cols = rows if cols is None else list(cols)
    if not rows or not cols:
        return np.zeros((len(rows), len(cols)), dtype=complex)
    if spec.variant == "schur":
        return np.asarray(schur_kernel_matrix(spec.G, spec.alpha, rows, cols, spec.quad).value)
    if spec.variant == "sine":
        return sine_kernel_matrix(sine_arcs(spec.G, spec.u), rows, cols)
    if spec.variant == "pp":
        return pp_kernel_matrix(spec.q, rows, cols, spec.quad)
    dts = np.array([[s1.t - s2.t for s2 in cols] for s1 in rows], dtype=np.int64)
    dh2 = np.array([[s1.h2 - s2.h2 for s2 in cols] for s1 in rows], dtype=np.int64)
    return extended_sine_matrix(spec.tau, spec.chi, dts, dh2)
