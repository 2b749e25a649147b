"""Scalar special functions behind both kernels.

Conventions: ``dilog1m(z)`` is the series sum z^n / n^2 (the dilogarithm of
``1 - z`` in Hirzebruch's notation, i.e. the usual Li_2(z)).  All logarithms
use the principal branch with cut on (-inf, 0].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import bernoulli

from .errors import BranchCutError, DomainError, ParameterError, PoleError

_POCH_CUTOFF = 1e-18


@dataclass(frozen=True)
class GCoefficients:
    """Laurent data of G(z) = sum c_k z^k - sum conj(c_k) z^-k, k = 1..K."""

    c: tuple[complex, ...]
    radius_margin: float = 0.5

    def __post_init__(self) -> None:
        c = tuple(complex(v) for v in self.c)
        if len(c) < 1:
            raise ParameterError("G needs at least one coefficient")
        if not self.radius_margin > 0:
            raise ParameterError("radius_margin must be positive")
        object.__setattr__(self, "c", c)

    @classmethod
    def plancherel(cls, theta: float = 1.0, radius_margin: float = 0.5) -> GCoefficients:
        return cls((complex(theta),), radius_margin)

    @property
    def order(self) -> int:
        return len(self.c)

    @property
    def is_plancherel(self) -> bool:
        return all(v == 0 for v in self.c[1:])

    def scaled(self, alpha: float) -> GCoefficients:
        return GCoefficients(tuple(alpha * v for v in self.c), self.radius_margin)


@dataclass(frozen=True)
class QParam:
    """Plane-partition weight parameter q = exp(-r)."""

    q: float
    r: float

    def __post_init__(self) -> None:
        if not 0.0 < self.q < 1.0:
            raise ParameterError(f"q must lie in (0, 1), got {self.q}")
        if not math.isclose(self.r, -math.log(self.q), rel_tol=1e-12, abs_tol=1e-15):
            raise ParameterError("r must equal -log q")

    @classmethod
    def from_q(cls, q: float) -> QParam:
        if not 0.0 < q < 1.0:
            raise ParameterError(f"q must lie in (0, 1), got {q}")
        return cls(float(q), -math.log(q))

    @classmethod
    def from_r(cls, r: float) -> QParam:
        if not r > 0:
            raise ParameterError(f"r must be positive, got {r}")
        return cls(math.exp(-r), float(r))


def _check_annulus(G: GCoefficients, z: np.ndarray) -> None:
    mod = np.abs(z)
    lo, hi = 1.0 - G.radius_margin - 1e-12, 1.0 + G.radius_margin + 1e-12
    if np.any(mod == 0) or np.any(mod < lo) or np.any(mod > hi):
        raise DomainError("point outside the annulus where G is trusted")


def g_eval(G: GCoefficients, z: ArrayLike) -> np.ndarray | complex:
    """G(z) for scalar or array z inside the trusted annulus."""
    za = np.asarray(z, dtype=complex)
    _check_annulus(G, za)
    inv = 1.0 / za
    pos = np.zeros_like(za)
    neg = np.zeros_like(za)
    for ck in reversed(G.c):
        pos = (pos + ck) * za
        neg = (neg + np.conj(ck)) * inv
    out = pos - neg
    return out if out.ndim else complex(out)


def zg_prime(G: GCoefficients, z: ArrayLike) -> np.ndarray | float:
    """zG'(z) on the unit circle; real there, so only the real part is returned."""
    za = np.asarray(z, dtype=complex)
    if np.any(np.abs(np.abs(za) - 1.0) > 1e-9):
        raise DomainError("zg_prime is defined on the unit circle only")
    k = np.arange(1, G.order + 1)
    c = np.asarray(G.c)
    powers = za[..., None] ** k
    val = (k * c * powers).sum(-1) + (k * np.conj(c) / powers).sum(-1)
    out = val.real
    return out if out.ndim else float(out)


def zg_prime_angle(G: GCoefficients, phi: ArrayLike) -> np.ndarray | float:
    """zG'(e^{i phi}) = 2 Re sum k c_k e^{i k phi}, evaluated without forming z."""
    ph = np.asarray(phi, dtype=float)
    k = np.arange(1, G.order + 1)
    c = np.asarray(G.c)
    out = 2.0 * (k * c * np.exp(1j * ph[..., None] * k)).sum(-1).real
    return out if out.ndim else float(out)


def zg_prime_angle_derivative(G: GCoefficients, phi: ArrayLike) -> np.ndarray | float:
    """d/dphi of zG'(e^{i phi})."""
    ph = np.asarray(phi, dtype=float)
    k = np.arange(1, G.order + 1)
    c = np.asarray(G.c)
    out = 2.0 * (1j * k * k * c * np.exp(1j * ph[..., None] * k)).sum(-1).real
    return out if out.ndim else float(out)


def _pochhammer(x: np.ndarray, q: float) -> tuple[np.ndarray, float]:
    """(x; q)_inf and the smallest factor modulus met along the way."""
    out = np.ones_like(x)
    if q == 0.0:
        fac = 1.0 - x
        return fac, float(np.min(np.abs(fac))) if fac.size else 1.0
    term = x.copy()
    smallest = math.inf
    while True:
        amp = np.abs(term)
        if not amp.size or amp.max() < _POCH_CUTOFF:
            break
        fac = 1.0 - term
        smallest = min(smallest, float(np.min(np.abs(fac))))
        out = out * fac
        term = term * q
    # first-order tail: prod_{k >= K} (1 - x q^k) ~ exp(-x q^K / (1 - q))
    out = out * np.exp(-term / (1.0 - q))
    return out, smallest


def q_pochhammer(x: ArrayLike, q: float) -> np.ndarray | complex:
    """Infinite q-Pochhammer symbol prod_{k>=0} (1 - x q^k)."""
    if not 0.0 <= q < 1.0:
        raise ParameterError("q must lie in [0, 1)")
    xa = np.asarray(x, dtype=complex)
    out, _ = _pochhammer(xa.reshape(-1), q)
    out = out.reshape(xa.shape)
    return out if out.ndim else complex(out)


def phi(t: int, z: ArrayLike, q: QParam, *, pole_tol: float = 1e-9) -> np.ndarray | complex:
    """Phi(t, z) = (q^{1/2}/z; q) / (q^{1/2+t} z; q) for t >= 0, and
    (q^{1/2-t}/z; q) / (q^{1/2} z; q) for t < 0."""
    za = np.asarray(z, dtype=complex).reshape(-1)
    qq = q.q
    if t >= 0:
        num, _ = _pochhammer(qq**0.5 / za, qq)
        den, smallest = _pochhammer(qq ** (0.5 + t) * za, qq)
    else:
        num, _ = _pochhammer(qq ** (0.5 - t) / za, qq)
        den, smallest = _pochhammer(qq**0.5 * za, qq)
    if smallest < pole_tol:
        raise PoleError(f"Phi({t}, z) evaluated within {pole_tol} of a pole")
    out = (num / den).reshape(np.shape(z))
    return out if out.ndim else complex(out)


def macmahon_m(q: float) -> float:
    """Normalisation M = prod_{n>=1} (1 - q^n)^n of the q^|pi| measure."""
    if not 0.0 <= q < 1.0:
        raise ParameterError("q must lie in [0, 1)")
    logm, n = 0.0, 1
    while True:
        qn = q**n
        if n * qn < 1e-18:
            break
        logm += n * math.log1p(-qn)
        n += 1
    return math.exp(logm)


_BERN_N = 40
_BERN_COEF = np.array([b / math.factorial(n + 1) for n, b in enumerate(bernoulli(_BERN_N))])
_SERIES_N = np.arange(1, 61)


def dilog1m(z: ArrayLike, *, cut_tol: float = 1e-12) -> np.ndarray | complex:
    """Sum_{n>=1} z^n / n^2 continued analytically off the cut (1, inf)."""
    za = np.asarray(z, dtype=complex)
    flat = za.reshape(-1)
    on_cut = (np.abs(flat.imag) <= cut_tol) & (flat.real > 1.0 + cut_tol)
    if np.any(on_cut):
        raise BranchCutError("dilog1m evaluated on its branch cut (1, inf)")
    out = np.empty_like(flat)
    for idx, zv in enumerate(flat):
        out[idx] = _li2_scalar(complex(zv))
    out = out.reshape(za.shape)
    return out if out.ndim else complex(out)


def _li2_scalar(z: complex) -> complex:
    if z == 0:
        return 0j
    if z == 1:
        return complex(math.pi**2 / 6)
    if abs(z) > 1.0:
        # inversion: Li2(z) = -Li2(1/z) - pi^2/6 - log(-z)^2 / 2
        lg = np.log(-z)
        return -_li2_unit(1.0 / z) - math.pi**2 / 6 - 0.5 * lg * lg
    return _li2_unit(z)


def _li2_unit(z: complex) -> complex:
    if abs(z) <= 0.5:
        return complex(np.sum(z**_SERIES_N / _SERIES_N**2))
    if z.real > 0.5:
        if z == 1:
            return complex(math.pi**2 / 6)
        # reflection: Li2(z) = -Li2(1 - z) + pi^2/6 - log z log(1 - z)
        w = 1.0 - z
        return -_li2_bernoulli(w) + math.pi**2 / 6 - np.log(z) * np.log(w)
    return _li2_bernoulli(z)


def _li2_bernoulli(z: complex) -> complex:
    # Li2(z) = sum_n B_n u^{n+1} / (n+1)!,  u = -log(1 - z), |u| < 2 pi
    u = -np.log(1.0 - z)
    powers = u ** np.arange(1, _BERN_N + 2)
    return complex(np.dot(_BERN_COEF, powers))


def _check_log_cut(z: np.ndarray, what: str) -> None:
    if np.any((np.abs(z.imag) <= 1e-12) & (z.real <= 0)):
        raise BranchCutError(f"{what}: point on the logarithm cut (-inf, 0]")


def action_pp(z: ArrayLike, tau: float, chi: float) -> np.ndarray | complex:
    """S(z; tau, chi) = -(tau/2 + chi) log z - dilog1m(1/z) + dilog1m(e^{-tau} z)."""
    if tau < 0:
        raise DomainError("action_pp expects tau >= 0")
    za = np.asarray(z, dtype=complex)
    _check_log_cut(za, "action_pp")
    out = -(tau / 2 + chi) * np.log(za) - dilog1m(1.0 / za) + dilog1m(math.exp(-tau) * za)
    out = np.asarray(out)
    return out if out.ndim else complex(out)


def action_schur(G: GCoefficients, u: float, z: ArrayLike) -> np.ndarray | complex:
    """S_u(z) = G(z) - u log z with the principal logarithm."""
    za = np.asarray(z, dtype=complex)
    _check_log_cut(za, "action_schur")
    out = np.asarray(g_eval(G, za)) - u * np.log(za)
    return out if out.ndim else complex(out)
