"""Determinantal machinery: pattern probabilities, samplers and brute-force oracles."""

from __future__ import annotations

import itertools
import math
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit
from scipy.stats import poisson

from .combinatorics import (
    Partition,
    Pattern,
    PlanePartition,
    SitePP,
    enumerate_partitions,
    plancherel_dim,
    plane_partition_counts,
    plane_partition_window_masks,
    rsk_shape,
    shur_map,
)
from .errors import ClampWarning, DegeneracyError, OverlapError, ParameterError, TailTooLargeError, TruncationWarning
from .kernels import KernelSpec, kernel_matrix
from .specialfn import QParam, macmahon_m

PROB_SLACK = 1e-9
SAMPLER_SLACK = 1e-7
PIVOT_FLOOR = 1e-10
EXACT_FALLBACK_MAX = 16


@dataclass(frozen=True)
class RngSeed:
    """Deterministic random stream identified by (seed, stream)."""

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if int(self.stream) < 0:
            raise ParameterError("stream must be non-negative")

    def generator(self, *sub: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream), *map(int, sub)))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, k: int) -> RngSeed:
        """A distinct stream for replica ``k`` of this stream."""
        return RngSeed(self.seed, self.stream * 1_000_003 + k + 1)


@dataclass(frozen=True)
class WindowConfig:
    """0/1 configuration on an explicit finite window."""

    window: tuple
    occupied: tuple[bool, ...]

    def __post_init__(self) -> None:
        window = tuple(self.window)
        occ = tuple(bool(v) for v in self.occupied)
        if len(window) != len(occ):
            raise ValueError("window and occupation vector differ in length")
        if list(window) != sorted(set(window)):
            raise ValueError("window must be sorted and duplicate-free")
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "occupied", occ)

    @classmethod
    def from_points(cls, window: Iterable, points: Iterable) -> WindowConfig:
        window = tuple(sorted(set(window)))
        pts = set(points)
        return cls(window, tuple(s in pts for s in window))

    @property
    def points(self) -> frozenset:
        return frozenset(s for s, o in zip(self.window, self.occupied) if o)

    def covers(self, sites: Iterable) -> bool:
        ws = self._window_set()
        return all(s in ws for s in sites)

    def _window_set(self) -> frozenset:
        cached = self.__dict__.get("_wset")
        if cached is None:
            cached = frozenset(self.window)
            object.__setattr__(self, "_wset", cached)
        return cached

    def bitstring(self) -> str:
        return "".join("1" if o else "0" for o in self.occupied)


# ---------------------------------------------------------------------------
# Determinants and pattern probabilities


def det_small(m: np.ndarray) -> complex:
    """Determinant by partial-pivoting elimination in extended precision."""
    a = np.array(m, dtype=np.clongdouble)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    det = np.clongdouble(1)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0:
            return 0j
        if p != k:
            a[[k, p]] = a[[p, k]]
            det = -det
        det *= a[k, k]
        if k + 1 < n:
            f = a[k + 1 :, k] / a[k, k]
            a[k + 1 :, k:] -= f[:, None] * a[k, k:]
    return complex(det)


def _clamp_probability(v: float, what: str) -> float:
    if v < -PROB_SLACK or v > 1 + PROB_SLACK:
        warnings.warn(f"{what} = {v:.3e} lies outside [0, 1]; clamped", ClampWarning, stacklevel=3)
    return float(min(max(v, -PROB_SLACK), 1 + PROB_SLACK))


def pattern_probability(spec: KernelSpec, m: Pattern) -> float:
    """E[c_m] = det(K(m_i, m_j)); 1 for the empty pattern."""
    sites = list(m)
    if not sites:
        return 1.0
    return _clamp_probability(det_small(kernel_matrix(spec, sites)).real, "pattern probability")


def pattern_covariance(spec: KernelSpec, m: Pattern, m2: Pattern) -> float:
    """Cov(c_m, c_m2) = det K on m u m2 minus the product of the two determinants."""
    a, b = list(m), list(m2)
    if set(a) & set(b):
        raise OverlapError("patterns must be disjoint")
    sites = a + b
    k = kernel_matrix(spec, sites)
    la = len(a)
    joint = det_small(k).real
    da = det_small(k[:la, :la]).real
    db = det_small(k[la:, la:]).real
    return float(joint - da * db)


def inclusion_exclusion_probabilities(k: np.ndarray) -> np.ndarray:
    """P(X restricted to the window equals S) for every subset S (bit i <-> site i).

    Uses P(X n W = S) = (-1)^{|W \\ S|} det(K_W - 1_{W \\ S}).
    """
    w = k.shape[0]
    if w > EXACT_FALLBACK_MAX:
        raise DegeneracyError(f"exact subset probabilities need a window of at most {EXACT_FALLBACK_MAX} sites")
    out = np.empty(1 << w)
    for mask in range(1 << w):
        excluded = [i for i in range(w) if not (mask >> i) & 1]
        mat = k.astype(complex).copy()
        mat[excluded, excluded] -= 1.0
        out[mask] = ((-1) ** len(excluded)) * det_small(mat).real
    return out


# ---------------------------------------------------------------------------
# Samplers


def sample_window(
    spec: KernelSpec, window: Sequence, rng: RngSeed, n_samples: int | None = None
) -> WindowConfig | list[WindowConfig]:
    """Sequential Schur-complement sampling of the DPP restricted to ``window``.

    Sites are visited in order; the kernel is conditioned on each decision
    via K - K[:, i] K[i, :] / K[i, i] (inclusion) or
    K - K[:, i] K[i, :] / (K[i, i] - 1) (exclusion).  Samples whose
    conditional probabilities leave [-1e-7, 1 + 1e-7] or hit a tiny pivot are
    redrawn from the exact subset law (windows of at most 16 sites).
    Returns a single configuration when ``n_samples`` is None.
    """
    window = tuple(sorted(set(window)))
    if not window:
        raise ParameterError("window must be nonempty")
    single = n_samples is None
    s = 1 if single else int(n_samples)
    gen = rng.generator()
    k0 = kernel_matrix(spec, window)
    w = len(window)
    kb = np.broadcast_to(k0, (s, w, w)).copy()
    occ = np.zeros((s, w), dtype=bool)
    bad = np.zeros(s, dtype=bool)
    u = gen.random((s, w))
    for i in range(w):
        p = kb[:, i, i].real
        bad |= (p < -SAMPLER_SLACK) | (p > 1 + SAMPLER_SLACK)
        take = u[:, i] < np.clip(p, 0.0, 1.0)
        occ[:, i] = take
        if i + 1 == w:
            break
        piv = np.where(take, p, p - 1.0)
        tiny = np.abs(piv) < PIVOT_FLOOR
        bad |= tiny
        piv = np.where(tiny, 1.0, piv)
        col = kb[:, :, i : i + 1]
        row = kb[:, i : i + 1, :]
        kb -= col @ row / piv[:, None, None]
    if bad.any():
        if w > EXACT_FALLBACK_MAX:
            raise DegeneracyError("conditional probability out of range on a window too large for exact sampling")
        probs = np.clip(inclusion_exclusion_probabilities(k0), 0.0, None)
        probs /= probs.sum()
        idx = np.nonzero(bad)[0]
        draws = gen.choice(len(probs), size=len(idx), p=probs)
        for j, mask in zip(idx, draws):
            occ[j] = [(mask >> b) & 1 for b in range(w)]
    configs = [WindowConfig(window, tuple(row)) for row in occ]
    return configs[0] if single else configs


def sample_plancherel(theta: float, rng: RngSeed | np.random.Generator) -> Partition:
    """Poissonised Plancherel partition: N ~ Poisson(theta^2), RSK shape of a uniform permutation."""
    if not theta > 0:
        raise ParameterError("theta must be positive")
    gen = rng.generator() if isinstance(rng, RngSeed) else rng
    n = int(gen.poisson(theta * theta))
    return rsk_shape(gen.permutation(n))


def sample_plancherel_many(theta: float, count: int, rng: RngSeed) -> list[Partition]:
    """``count`` independent Plancherel partitions from one stream."""
    if not theta > 0:
        raise ParameterError("theta must be positive")
    gen = rng.generator()
    sizes = gen.poisson(theta * theta, size=count)
    empty = Partition(())
    return [rsk_shape(gen.permutation(int(n))) if n else empty for n in sizes]


# -- Glauber dynamics for q^|pi| -------------------------------------------------

_CHUNK = 1 << 18


@njit(cache=True)
def _glauber_run(p, box, q, uniforms, weight, trace, trace_every, step0):
    big = 1 << 60
    n = uniforms.shape[0] // 2
    touched = False
    for s in range(n):
        k = int(uniforms[2 * s] * 2 * box * box)
        up = k & 1
        cell = k >> 1
        i = cell // box + 1
        j = cell % box + 1
        v = p[i, j]
        if up == 1:
            cap = p[i - 1, j] if i > 1 else big
            c2 = p[i, j - 1] if j > 1 else big
            if c2 < cap:
                cap = c2
            if v + 1 <= cap and uniforms[2 * s + 1] < q:
                p[i, j] = v + 1
                weight += 1
                if i == box or j == box:
                    touched = True
        else:
            if v >= 1 and v - 1 >= p[i + 1, j] and v - 1 >= p[i, j + 1]:
                p[i, j] = v - 1
                weight -= 1
        t = step0 + s + 1
        if trace_every > 0 and t % trace_every == 0:
            idx = t // trace_every - 1
            if idx < trace.shape[0]:
                trace[idx] = weight
    return weight, touched


def expected_weight(q: float) -> float:
    """E|pi| = sum n^2 q^n / (1 - q^n) under q^|pi|."""
    total, n = 0.0, 1
    while True:
        term = n * n * q**n / (1 - q**n)
        total += term
        if term < 1e-16 * max(total, 1.0):
            return total
        n += 1


def default_box(q: QParam) -> int:
    """Side of the square box holding the chain; overflow beyond it has
    probability ~ q^L r^-2, made negligible by the choice below."""
    r = q.r
    return max(4, math.ceil((3.0 * math.log(max(1.0 / r, 1.0)) + 14.0) / r))


def default_burn_in(q: QParam, box: int | None = None) -> int:
    box = default_box(q) if box is None else box
    return int(50 * max(1.0, expected_weight(q.q)) * box * box)


@dataclass(frozen=True)
class GlauberResult:
    state: PlanePartition
    weight_trace: np.ndarray
    steps: int
    touched_boundary: bool


def glauber_chain(
    q: QParam,
    steps: int,
    rng: RngSeed | np.random.Generator,
    box: int | None = None,
    init: PlanePartition | None = None,
    trace_every: int = 0,
) -> GlauberResult:
    """Single-box Metropolis chain for q^|pi| on plane partitions inside a box.

    Each step picks a cell of the box and a direction (+1 or -1) uniformly;
    a legal addition is accepted with probability q and a legal removal
    always.  The proposal is symmetric, so detailed balance holds for q^|pi|.
    """
    box = default_box(q) if box is None else int(box)
    gen = rng.generator() if isinstance(rng, RngSeed) else rng
    p = np.zeros((box + 2, box + 2), dtype=np.int64)
    weight = 0
    if init is not None:
        arr = init.to_array()
        if arr.shape[0] > box or (arr.size and arr.shape[1] > box):
            raise ParameterError("initial plane partition does not fit in the box")
        p[1 : 1 + arr.shape[0], 1 : 1 + arr.shape[1]] = arr
        weight = init.weight
    n_trace = steps // trace_every if trace_every > 0 else 0
    trace = np.zeros(n_trace, dtype=np.int64)
    touched = False
    done = 0
    while done < steps:
        n = min(_CHUNK, steps - done)
        uniforms = gen.random(2 * n)
        weight, t = _glauber_run(p, box, q.q, uniforms, weight, trace, trace_every, done)
        touched |= t
        done += n
    state = PlanePartition.from_array(p[1 : box + 1, 1 : box + 1])
    return GlauberResult(state, trace, steps, bool(touched))


def geweke_z(trace: np.ndarray) -> float:
    """Mean of the first third minus mean of the last third, in naive standard errors."""
    n = len(trace)
    if n < 6:
        return 0.0
    a = np.asarray(trace[: n // 3], dtype=float)
    b = np.asarray(trace[-(n // 3) :], dtype=float)
    se = math.sqrt(a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b))
    return 0.0 if se == 0 else float((a.mean() - b.mean()) / se)


def sample_plane_partition(
    q: QParam, steps: int | None, rng: RngSeed | np.random.Generator, box: int | None = None
) -> PlanePartition:
    """Final state of a Glauber chain started from the empty plane partition.

    ``steps`` defaults to the burn-in 50 * E|pi| * (box cells) and may not be
    smaller than it.
    """
    box = default_box(q) if box is None else int(box)
    burn = default_burn_in(q, box)
    steps = burn if steps is None else int(steps)
    if steps < burn:
        raise ParameterError(f"steps={steps} is below the burn-in {burn}")
    res = glauber_chain(q, steps, rng, box)
    if res.touched_boundary:
        warnings.warn("Glauber chain reached the edge of its box", TruncationWarning, stacklevel=2)
    return res.state


# ---------------------------------------------------------------------------
# Brute-force oracles


@dataclass(frozen=True)
class OracleModel:
    """Either the Poissonised Plancherel measure (theta) or q^|pi| (q)."""

    kind: str
    theta: float | None = None
    q: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "schur_plancherel":
            if self.theta is None or not self.theta > 0:
                raise ParameterError("schur_plancherel oracle needs theta > 0")
        elif self.kind == "plane_partition":
            if self.q is None or not 0 < self.q < 1:
                raise ParameterError("plane_partition oracle needs q in (0, 1)")
        else:
            raise ParameterError(f"unknown oracle model {self.kind!r}")

    @classmethod
    def schur_plancherel(cls, theta: float) -> OracleModel:
        return cls("schur_plancherel", theta=float(theta))

    @classmethod
    def plane_partition(cls, q: float) -> OracleModel:
        return cls("plane_partition", q=float(q))


def plancherel_tail(theta: float, max_weight: int) -> float:
    """Probability that |lambda| > max_weight, i.e. a Poisson(theta^2) tail."""
    return float(poisson.sf(max_weight, theta * theta))


def plane_partition_tail(q: float, max_weight: int) -> float:
    """Upper bound on M * sum_{n > max_weight} pp(n) q^n.

    Exact integer counts are summed up to a cut-off N2; beyond it the Cauchy
    estimate pp(n) <= s^{-n} / M(s), s = sqrt(q), bounds the remainder.
    """
    m = macmahon_m(q)
    s = math.sqrt(q)
    n2 = max_weight + 64
    while True:
        counts = plane_partition_counts(n2)
        explicit = sum(counts[n] * q**n for n in range(max_weight + 1, n2 + 1))
        rem = (q / s) ** (n2 + 1) / (1 - q / s) / macmahon_m(s)
        if rem < 1e-3 * max(explicit, 1e-300) or n2 > 4096:
            return float(m * (explicit + rem))
        n2 *= 2


@lru_cache(maxsize=8)
def _plancherel_table(theta: float, max_weight: int) -> tuple[tuple[Partition, float], ...]:
    norm = math.exp(-theta * theta)
    rows = []
    for lam in enumerate_partitions(max_weight):
        n = lam.weight
        weight = norm * theta ** (2 * n) * (plancherel_dim(lam) / math.factorial(n)) ** 2
        rows.append((lam, weight))
    return tuple(rows)


@lru_cache(maxsize=8)
def _pp_masks(max_weight: int, window: tuple[SitePP, ...]) -> tuple[np.ndarray, np.ndarray]:
    return plane_partition_window_masks(max_weight, window)


def oracle_expectation(
    model: OracleModel,
    m: Pattern,
    max_weight: int,
    accuracy: float = 1e-10,
    window: Sequence[SitePP] | None = None,
) -> tuple[float, float]:
    """(E[c_m] over all objects of weight <= max_weight, rigorous tail bound).

    For plane partitions the occupation masks are enumerated once per
    (max_weight, window); pass a common ``window`` containing every pattern
    of interest to reuse them.
    """
    if model.kind == "schur_plancherel":
        tail = plancherel_tail(model.theta, max_weight)
        if tail > accuracy:
            raise TailTooLargeError(f"Plancherel tail {tail:.3e} exceeds {accuracy:.1e}")
        sites = list(m)
        if not sites:
            return sum(w for _, w in _plancherel_table(model.theta, max_weight)), tail
        lo, hi = min(sites), max(sites)
        total = 0.0
        for lam, w in _plancherel_table(model.theta, max_weight):
            conf = shur_map(lam, (lo, hi))
            if all(x in conf for x in sites):
                total += w
        return total, tail
    tail = plane_partition_tail(model.q, max_weight)
    if tail > accuracy:
        raise TailTooLargeError(f"plane-partition tail {tail:.3e} exceeds {accuracy:.1e}")
    sites = list(m)
    win = tuple(sorted(set(window))) if window is not None else tuple(sites)
    if not set(sites) <= set(win):
        raise ParameterError("oracle window must contain the pattern")
    mm = macmahon_m(model.q)
    weights = model.q ** np.arange(max_weight + 1)
    if not win:
        counts = plane_partition_counts(max_weight)
        return float(mm * sum(c * w for c, w in zip(counts, weights))), tail
    masks, counts = _pp_masks(max_weight, win)
    need = 0
    for s in sites:
        need |= 1 << win.index(s)
    hit = (masks & need) == need
    return float(mm * (counts[hit] @ weights).sum()), tail


def all_subpatterns(window: Sequence, max_size: int) -> list[Pattern]:
    """Every pattern of size 1..max_size drawn from ``window``."""
    out = []
    for k in range(1, max_size + 1):
        out.extend(Pattern(c) for c in itertools.combinations(sorted(window), k))
    return out
