"""Partitions, plane partitions and their point-configuration embeddings.

Half-integer heights are stored doubled (``h2 = 2h``) so every lattice site of
``Z x (1/2)Z`` is an exact integer pair.  Configurations are always read off on
an explicit finite window; the infinite tails are implicit in the maps.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numba import njit
from numba import types as nbtypes
from numba.typed import Dict as NumbaDict


@dataclass(frozen=True)
class Partition:
    """Integer partition stored as a non-increasing tuple of positive parts."""

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be non-increasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def part(self, i: int) -> int:
        """Return lambda_i with 1-based index; zero beyond the last part."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def to_text(self) -> str:
        return ",".join(str(p) for p in self.parts)

    @classmethod
    def from_text(cls, text: str) -> Partition:
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(int(tok) for tok in text.split(",")))


@dataclass(frozen=True)
class PlanePartition:
    """Plane partition as a tuple of rows, each row itself a partition."""

    rows: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        rows = [Partition(tuple(r)).parts for r in self.rows]
        while rows and not rows[-1]:
            rows.pop()
        for i in range(1, len(rows)):
            upper, lower = rows[i - 1], rows[i]
            if len(lower) > len(upper) or any(b > a for a, b in zip(upper, lower)):
                raise ValueError(f"rows {i} and {i + 1} violate column monotonicity")
        object.__setattr__(self, "rows", tuple(rows))

    @property
    def weight(self) -> int:
        return sum(sum(r) for r in self.rows)

    def entry(self, i: int, j: int) -> int:
        """Return pi_{i,j} (1-based); zero outside the support."""
        if 1 <= i <= len(self.rows):
            row = self.rows[i - 1]
            if 1 <= j <= len(row):
                return row[j - 1]
        return 0

    def to_array(self, shape: tuple[int, int] | None = None) -> np.ndarray:
        nrows = len(self.rows)
        ncols = len(self.rows[0]) if self.rows else 0
        if shape is not None:
            if shape[0] < nrows or shape[1] < ncols:
                raise ValueError("shape too small for plane partition")
            nrows, ncols = shape
        arr = np.zeros((nrows, ncols), dtype=np.int64)
        for i, row in enumerate(self.rows):
            arr[i, : len(row)] = row
        return arr

    @classmethod
    def from_array(cls, arr: np.ndarray) -> PlanePartition:
        return cls(tuple(tuple(int(v) for v in row if v > 0) for row in np.asarray(arr)))

    def to_text(self) -> str:
        return ";".join(",".join(str(v) for v in row) for row in self.rows)

    @classmethod
    def from_text(cls, text: str) -> PlanePartition:
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(Partition.from_text(row).parts for row in text.split(";")))


@dataclass(frozen=True, order=True)
class SitePP:
    """A site (t, h) of Z x (1/2)Z with the height stored as h2 = 2h."""

    t: int
    h2: int

    @property
    def h(self) -> float:
        return self.h2 / 2

    @property
    def admissible(self) -> bool:
        """True when h + (|t| + 1)/2 is an integer."""
        return (self.h2 + abs(self.t) + 1) % 2 == 0

    def shifted(self, dt: int, dh2: int) -> SitePP:
        return SitePP(self.t + dt, self.h2 + dh2)

    @classmethod
    def from_th(cls, t: int, h: float | Fraction | str) -> SitePP:
        h2 = Fraction(h) * 2
        if h2.denominator != 1:
            raise ValueError(f"height {h} is not a half-integer")
        return cls(int(t), int(h2))

    def to_text(self) -> str:
        h = Fraction(self.h2, 2)
        return f"({self.t},{h})"


Site = int | SitePP


@dataclass(frozen=True)
class Pattern:
    """Finite sorted set of sites (all integers or all SitePP)."""

    sites: tuple = ()

    def __post_init__(self) -> None:
        sites = tuple(self.sites)
        if len(set(sites)) != len(sites):
            raise ValueError(f"pattern contains duplicate sites: {sites}")
        kinds = {isinstance(s, SitePP) for s in sites}
        if len(kinds) > 1:
            raise ValueError("pattern mixes integer sites and SitePP sites")
        if sites and not isinstance(sites[0], SitePP):
            sites = tuple(int(s) for s in sites)
        object.__setattr__(self, "sites", tuple(sorted(sites)))

    @property
    def is_pp(self) -> bool:
        return bool(self.sites) and isinstance(self.sites[0], SitePP)

    @property
    def norm(self) -> float:
        """Supremum norm of the sites (0 for the empty pattern)."""
        if not self.sites:
            return 0.0
        if self.is_pp:
            return float(max(max(abs(s.t), abs(s.h2) / 2) for s in self.sites))
        return float(max(abs(s) for s in self.sites))

    def __len__(self) -> int:
        return len(self.sites)

    def __iter__(self) -> Iterator:
        return iter(self.sites)

    def translate(self, shift) -> Pattern:
        """Exact lattice translation by an integer or by a SitePP displacement."""
        if self.is_pp:
            return Pattern(tuple(s.shifted(shift.t, shift.h2) for s in self.sites))
        return Pattern(tuple(s + int(shift) for s in self.sites))


def shur_map(lam: Partition, window: tuple[int, int]) -> frozenset[int]:
    """Points {lambda_i - i : i >= 1} that fall inside the integer window [a, b]."""
    a, b = window
    out = set()
    i = 1
    while True:
        x = lam.part(i) - i
        if x < a:
            break
        if x <= b:
            out.add(x)
        i += 1
    return frozenset(out)


def pp_map(pi: PlanePartition, window: tuple[int, int, int, int]) -> frozenset[SitePP]:
    """Sites (i - j, pi_ij - (i + j - 1)/2) inside ``(t_min, t_max, h2_min, h2_max)``.

    Cells outside the support count with pi_ij = 0, which produces the
    down-sloping tails of the configuration.
    """
    t_min, t_max, h2_min, h2_max = window
    out = set()
    for t in range(t_min, t_max + 1):
        i = max(1, 1 + t)
        while True:
            j = i - t
            h2 = 2 * pi.entry(i, j) - (i + j - 1)
            if h2 < h2_min:
                break
            if h2 <= h2_max:
                out.add(SitePP(t, h2))
            i += 1
    return frozenset(out)


def enumerate_partitions(max_weight: int) -> Iterator[Partition]:
    """Yield every partition of weight <= max_weight, grouped by weight."""
    if max_weight < 0:
        raise ValueError("max_weight must be non-negative")
    yield Partition(())
    for n in range(1, max_weight + 1):
        # Reverse-lexicographic walk through the partitions of n.
        parts = [n]
        while True:
            yield Partition(tuple(parts))
            rem = 0
            while parts and parts[-1] == 1:
                parts.pop()
                rem += 1
            if not parts:
                break
            k = parts.pop() - 1
            rem += 1
            while rem > k:
                parts.append(k)
                rem -= k
            parts.append(k)
            if rem:
                parts.append(rem)


def _next_subpartition(mu: list[int], lam: Sequence[int], budget: int) -> bool:
    """Advance ``mu`` to the next partition contained in ``lam`` with |mu| <= budget.

    Enumeration is lexicographic starting from the all-zero row; returns
    False once every admissible row has been visited.
    """
    ncols = len(mu)
    prefix = [0] * (ncols + 1)
    for k in range(ncols):
        prefix[k + 1] = prefix[k] + mu[k]
    for j in range(ncols - 1, -1, -1):
        cap = lam[j] if j == 0 else min(lam[j], mu[j - 1])
        if mu[j] + 1 <= cap and prefix[j] + mu[j] + 1 <= budget:
            mu[j] += 1
            for k in range(j + 1, ncols):
                mu[k] = 0
            return True
    return False


def enumerate_plane_partitions(max_weight: int) -> Iterator[PlanePartition]:
    """Yield every plane partition of weight <= max_weight exactly once.

    Rows are built depth-first with an explicit stack, each new row a
    sub-partition of the row above it.
    """
    if max_weight < 0:
        raise ValueError("max_weight must be non-negative")
    width = max(max_weight, 1)
    top = [max_weight] * width
    rows: list[list[int]] = []
    weights = [0]
    yield PlanePartition(())
    while True:
        parent = rows[-1] if rows else top
        child = [0] * width
        if _next_subpartition(child, parent, max_weight - weights[-1]):
            rows.append(child)
            weights.append(weights[-1] + sum(child))
            yield PlanePartition(tuple(tuple(v for v in r if v) for r in rows))
            continue
        while rows:
            row = rows[-1]
            weights.pop()
            parent = rows[-2] if len(rows) > 1 else top
            if _next_subpartition(row, parent, max_weight - weights[-1]):
                weights.append(weights[-1] + sum(row))
                yield PlanePartition(tuple(tuple(v for v in r if v) for r in rows))
                break
            rows.pop()
        else:
            return


@lru_cache(maxsize=None)
def partition_counts(n_max: int) -> tuple[int, ...]:
    """p(0..n_max) by Euler's pentagonal recurrence."""
    p = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > n:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[n - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return tuple(p)


@lru_cache(maxsize=None)
def plane_partition_counts(n_max: int) -> tuple[int, ...]:
    """Coefficients of prod (1 - q^n)^(-n) up to q^n_max (exact integers)."""
    sigma2 = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        for k in range(d, n_max + 1, d):
            sigma2[k] += d * d
    pp = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        pp[n] = sum(sigma2[k] * pp[n - k] for k in range(1, n + 1)) // n
    return tuple(pp)


def plancherel_dim(lam: Partition) -> int:
    """Number of standard Young tableaux of shape lam (hook-length formula)."""
    n = lam.weight
    conj = [sum(1 for p in lam.parts if p > j) for j in range(lam.part(1))]
    hooks = 1
    for i, p in enumerate(lam.parts):
        for j in range(p):
            hooks *= (p - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(n) // hooks


def rsk_shape(word: Iterable[int]) -> Partition:
    """Shape of the RSK insertion tableau of ``word`` (row insertion)."""
    rows: list[list[int]] = []
    for x in word:
        for row in rows:
            k = bisect_right(row, x)
            if k == len(row):
                row.append(x)
                break
            row[k], x = x, row[k]
        else:
            rows.append([x])
    return Partition(tuple(len(r) for r in rows))


# ---------------------------------------------------------------------------
# Compiled enumeration for the plane-partition oracle.  It walks the same
# depth-first tree as ``enumerate_plane_partitions`` but only records, per
# object, the bit mask of occupied window sites together with the weight.


@njit(cache=True)
def _nb_next_sub(mu, lam, budget, ncols):
    s = 0
    prefix = np.zeros(ncols + 1, dtype=np.int64)
    for k in range(ncols):
        s += mu[k]
        prefix[k + 1] = s
    for j in range(ncols - 1, -1, -1):
        cap = lam[j]
        if j > 0 and mu[j - 1] < cap:
            cap = mu[j - 1]
        if mu[j] + 1 <= cap and prefix[j] + mu[j] + 1 <= budget:
            mu[j] += 1
            for k in range(j + 1, ncols):
                mu[k] = 0
            return True
    return False


@njit(cache=True)
def _nb_row_mask(i, row, ncols, index, t_off, h_off, t_abs):
    m = np.int64(0)
    nt = index.shape[0]
    nh = index.shape[1]
    for j in range(max(1, i - t_abs), i + t_abs + 1):
        v = row[j - 1] if j - 1 < ncols else 0
        ti = i - j + t_off
        hi = 2 * v - (i + j - 1) + h_off
        if 0 <= ti < nt and 0 <= hi < nh:
            k = index[ti, hi]
            if k >= 0:
                m |= np.int64(1) << np.int64(k)
    return m


@njit(cache=True)
def _nb_enumerate_masks(max_weight, index, t_off, h_off, t_abs, zero_tail):
    width = max(max_weight, 1)
    rows = np.zeros((max_weight + 2, width), dtype=np.int64)
    top = np.full(width, max_weight, dtype=np.int64)
    weights = np.zeros(max_weight + 2, dtype=np.int64)
    pmask = np.zeros(max_weight + 2, dtype=np.int64)
    lookup = NumbaDict.empty(key_type=nbtypes.int64, value_type=nbtypes.int64)
    cap = 1024
    counts = np.zeros((cap, max_weight + 1), dtype=np.int64)
    masks = np.zeros(cap, dtype=np.int64)
    nused = 0
    depth = 0
    while True:
        # record the current plane partition (rows 1..depth)
        mask = pmask[depth] | zero_tail[min(depth, zero_tail.shape[0] - 1)]
        if mask in lookup:
            slot = lookup[mask]
        else:
            if nused == cap:
                cap *= 2
                nc = np.zeros((cap, max_weight + 1), dtype=np.int64)
                nc[:nused] = counts[:nused]
                counts = nc
                nm = np.zeros(cap, dtype=np.int64)
                nm[:nused] = masks[:nused]
                masks = nm
            slot = nused
            lookup[mask] = slot
            masks[slot] = mask
            nused += 1
        counts[slot, weights[depth]] += 1
        # try to descend
        parent = rows[depth - 1] if depth > 0 else top
        child = rows[depth]
        child[:] = 0
        if _nb_next_sub(child, parent, max_weight - weights[depth], width):
            weights[depth + 1] = weights[depth] + child.sum()
            pmask[depth + 1] = pmask[depth] | _nb_row_mask(depth + 1, child, width, index, t_off, h_off, t_abs)
            depth += 1
            continue
        # advance a sibling, popping exhausted levels
        advanced = False
        while depth > 0:
            row = rows[depth - 1]
            parent = rows[depth - 2] if depth > 1 else top
            if _nb_next_sub(row, parent, max_weight - weights[depth - 1], width):
                weights[depth] = weights[depth - 1] + row.sum()
                pmask[depth] = pmask[depth - 1] | _nb_row_mask(depth, row, width, index, t_off, h_off, t_abs)
                advanced = True
                break
            depth -= 1
        if not advanced:
            break
    return masks[:nused], counts[:nused]


def plane_partition_window_masks(
    max_weight: int, sites: Sequence[SitePP]
) -> tuple[np.ndarray, np.ndarray]:
    """Occupation masks on ``sites`` over all plane partitions of weight <= max_weight.

    Returns ``(masks, counts)`` where bit k of ``masks[a]`` says whether
    ``sites[k]`` is occupied, and ``counts[a, n]`` is the number of plane
    partitions of weight n producing that mask.  At most 63 sites.
    """
    sites = list(sites)
    if len(sites) > 63:
        raise ValueError("at most 63 window sites are supported")
    t_abs = max(abs(s.t) for s in sites)
    h_abs = max(abs(s.h2) for s in sites)
    index = -np.ones((2 * t_abs + 1, 2 * h_abs + 1), dtype=np.int64)
    for k, s in enumerate(sites):
        index[s.t + t_abs, s.h2 + h_abs] = k
    h2_min = min(s.h2 for s in sites)
    # Masks contributed by the all-zero rows below depth d.
    zero_row = np.zeros(max(max_weight, 1), dtype=np.int64)
    last_row = (1 - h2_min + t_abs) // 2 + t_abs + 2
    tails = []
    for d in range(last_row + 1):
        m = 0
        for i in range(d + 1, last_row + 1):
            m |= int(_nb_row_mask(i, zero_row, zero_row.shape[0], index, t_abs, h_abs, t_abs))
        tails.append(m)
    zero_tail = np.array(tails, dtype=np.int64)
    return _nb_enumerate_masks(max_weight, index, t_abs, h_abs, t_abs, zero_tail)
