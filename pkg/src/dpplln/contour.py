"""Trapezoid quadrature on circles and on pairs of concentric circles.

For integrands analytic near a circle the N-point trapezoid rule converges
geometrically, so every routine here simply doubles N until two successive
results agree to ``tol``.  The reported error estimate is that difference.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceError, OverlapError, ParameterError

DEFAULT_TOL = 1e-10
DEFAULT_MAX_NODES = 65536


@dataclass(frozen=True)
class QuadSettings:
    """Tolerance, node cap and (optional) contour separation for kernel integrals."""

    tol: float = DEFAULT_TOL
    max_nodes: int = DEFAULT_MAX_NODES
    eps: float | None = None

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ParameterError("quad.tol must be positive")
        if self.max_nodes < 8 or self.max_nodes & (self.max_nodes - 1):
            raise ParameterError("quad.max_nodes must be a power of two >= 8")
        if self.eps is not None and not 0 < self.eps < 1:
            raise ParameterError("quad.eps must lie in (0, 1)")


@dataclass(frozen=True)
class CircleContour:
    center: complex = 0j
    radius: float = 1.0
    nodes: int = 8

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ParameterError("radius must be positive")
        n = int(self.nodes)
        if n < 8 or n & (n - 1):
            raise ParameterError("node count must be a power of two >= 8")

    def points(self, n: int | None = None) -> np.ndarray:
        n = self.nodes if n is None else n
        theta = 2.0 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * theta)

    def with_nodes(self, n: int) -> CircleContour:
        return replace(self, nodes=n)


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | np.ndarray
    error_estimate: float
    nodes_used: int | tuple[int, int]


def _trapezoid(f: Callable, c: CircleContour, n: int) -> np.ndarray:
    z = c.points(n)
    vals = np.asarray(f(z), dtype=complex)
    weights = (z - c.center) / n
    # contract the node axis; pairwise summation inside numpy keeps the
    # accumulation order fixed
    return np.tensordot(weights, vals, axes=(0, 0))


def integrate_circle(
    f: Callable[[np.ndarray], np.ndarray],
    c: CircleContour,
    tol: float = DEFAULT_TOL,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> QuadratureResult:
    """(1/2 pi i) times the contour integral of f over the circle ``c``.

    ``f`` receives the node array and returns values whose leading axis runs
    over the nodes; trailing axes are integrated independently.
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    n = c.nodes
    prev = _trapezoid(f, c, n)
    while True:
        n *= 2
        cur = _trapezoid(f, c, n)
        err = float(np.max(np.abs(cur - prev))) if np.size(cur) else 0.0
        if err < tol:
            return QuadratureResult(_unwrap(cur), err, n)
        if n >= max_nodes:
            raise ConvergenceError(
                f"circle quadrature did not reach tol={tol} with {n} nodes (estimate {err:.3e})",
                _unwrap(cur),
                err,
            )
        prev = cur


def _unwrap(v: np.ndarray):
    return complex(v) if np.ndim(v) == 0 else v


def _double_trapezoid(f: Callable, outer: CircleContour, inner: CircleContour, n: int, m: int) -> complex:
    z = outer.points(n)
    w = inner.points(m)
    wz = (z - outer.center) / n
    ww = (w - inner.center) / m
    total = 0j
    block = max(1, (1 << 22) // max(m, 1))
    for s in range(0, n, block):
        vals = np.asarray(f(z[s : s + block, None], w[None, :]), dtype=complex)
        total += wz[s : s + block] @ (vals @ ww)
    return total


def double_contour(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    outer: CircleContour,
    inner: CircleContour,
    tol: float = DEFAULT_TOL,
    max_nodes: int = 4096,
) -> QuadratureResult:
    """(1/2 pi i)^2 times the iterated integral of f(z, w) over two circles.

    The integrand is evaluated on the tensor grid (broadcast z[:, None],
    w[None, :]).  Each variable is refined separately: N doubles until the
    change is below tol/2, then M, and the loop repeats until neither moves.
    """
    if abs(outer.radius - inner.radius) < 1e-6 and abs(outer.center - inner.center) < 1e-12:
        raise OverlapError("contours too close: 1/(z - w) would be near-singular")
    n, m = outer.nodes, inner.nodes
    cur = _double_trapezoid(f, outer, inner, n, m)
    while True:
        moved = False
        for axis in (0, 1):
            while True:
                n2, m2 = (2 * n, m) if axis == 0 else (n, 2 * m)
                if max(n2, m2) > max_nodes:
                    err = abs(_double_trapezoid(f, outer, inner, n, m) - _double_trapezoid(f, outer, inner, n // 2, m // 2))
                    raise ConvergenceError(
                        f"double contour did not converge within {max_nodes} nodes per variable", cur, err
                    )
                nxt = _double_trapezoid(f, outer, inner, n2, m2)
                step = abs(nxt - cur)
                n, m, cur = n2, m2, nxt
                if step < tol / 2:
                    break
                moved = True
        if not moved:
            return QuadratureResult(cur, step, (n, m))


def cauchy_double_contour(
    a: Callable[[np.ndarray], np.ndarray],
    b: Callable[[np.ndarray], np.ndarray],
    r_z: float,
    r_w: float,
    tol: float = DEFAULT_TOL,
    max_nodes: int = DEFAULT_MAX_NODES,
    min_nodes: int = 64,
) -> QuadratureResult:
    """Matrix of (1/2 pi i)^2 double integrals of a_p(z) b_s(w) / (z - w).

    ``a`` maps the z-nodes (shape (N,)) to an (N, P) array and ``b`` maps the
    w-nodes to (N, S); the circles |z| = r_z and |w| = r_w share their centre
    at the origin and their node angles.  The tensor trapezoid sum is then a
    circulant contraction in the angle difference, evaluated with FFTs, so a
    P x S block costs O((P + S) N log N + P S N) rather than O(P S N^2).
    The same N is used for both variables.
    """
    if abs(r_z - r_w) < 1e-6:
        raise OverlapError("contours too close: 1/(z - w) would be near-singular")
    n = max(8, 1 << math.ceil(math.log2(max(8, min_nodes))))

    def evaluate(n: int) -> tuple[np.ndarray, np.ndarray]:
        theta = 2.0 * np.pi * np.arange(n) / n
        omega = np.exp(1j * theta)
        z = r_z * omega
        w = r_w * omega
        av = np.asarray(a(z), dtype=complex).reshape(n, -1)
        bv = np.asarray(b(w), dtype=complex).reshape(n, -1)
        return av, bv * w[:, None]

    def contract(av: np.ndarray, beta: np.ndarray, n: int) -> np.ndarray:
        # z_j / (z_j - w_k) = r_z / (r_z - r_w e^{i 2 pi (k - j) / n})
        m = np.arange(n)
        c_rev = 1.0 / (r_z - r_w * np.exp(-2j * np.pi * m / n))
        h = np.fft.ifft(np.fft.fft(beta, axis=0) * np.fft.fft(c_rev)[:, None], axis=0)
        return (r_z / n**2) * (av.T @ h)

    av, beta = evaluate(n)
    prev = contract(av[::2], beta[::2], n // 2)
    while True:
        cur = contract(av, beta, n)
        err = float(np.max(np.abs(cur - prev)))
        if err < tol:
            return QuadratureResult(cur, err, n)
        if 2 * n > max_nodes:
            raise ConvergenceError(
                f"Cauchy double contour did not reach tol={tol} with {n} nodes (estimate {err:.3e})", cur, err
            )
        n *= 2
        prev = cur
        av, beta = evaluate(n)
