"""Exact coded-caching arithmetic.

A placement splits the catalog into two groups: the first group (``n_cached``
contents) is stored in coded fragments across the K edge caches, the second
group is not cached at all. With cache budget M contents-worth per cache, each
first-group content is fragmented with parameter t = K*M/n_cached: every cache
stores the fraction t/K of it, and one multicast message can serve t+1 caches
at once. Non-integral t is realized by memory sharing between the neighboring
integer schemes.

Requests are served row-synchronously: row i holds the i-th request of every
cache's queue. For a row with u requests falling in the cached group, the
shared-link (fronthaul) load in contents-worth is

    min( [C(K, t+1) - C(K-u, t+1)] / C(K, t),  n_cached - M ) + (K - u)

where the second term is plain unicast of the uncached requests. Loads are
measured in whole contents, so content size never appears; d_f and d_a are the
per-content fronthaul/access transmission delays.

All functions are pure; floats in the hot path, ``fractions.Fraction`` in the
exact variants used as test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb

import numpy as np


@dataclass(frozen=True)
class Placement:
    """A coded-caching placement decision.

    ``cached_set`` holds the 1-based indices of the first-group contents;
    ``n_cached`` must exceed the cache budget (otherwise everything could be
    stored whole) and, for K >= 2, stay within K*M so the fragmentation
    parameter is at least 1. For the degenerate K=1 network the upper bound
    is waived and fractional storage is realized via the t=0 corner.
    """

    n_cached: int
    cached_set: frozenset
    k_faps: int
    cache_size: int

    def __post_init__(self):
        if self.k_faps < 1 or self.cache_size < 1:
            raise ValueError("k_faps and cache_size must be >= 1")
        if len(self.cached_set) != self.n_cached:
            raise ValueError(
                f"cached_set has {len(self.cached_set)} contents, "
                f"expected n_cached={self.n_cached}")
        if self.n_cached <= self.cache_size:
            raise ValueError(
                f"n_cached={self.n_cached} must exceed cache_size="
                f"{self.cache_size} (otherwise cache contents whole)")
        if self.k_faps >= 2 and self.n_cached > self.k_faps * self.cache_size:
            raise ValueError(
                f"n_cached={self.n_cached} exceeds K*M="
                f"{self.k_faps * self.cache_size}")
        if any(n < 1 for n in self.cached_set):
            raise ValueError("content indices are 1-based")

    @cached_property
    def fragmentation(self) -> tuple[int, int, float]:
        """(t_low, t_high, weight_low) memory-sharing split of this placement."""
        return fragmentation_param(self.k_faps, self.cache_size, self.n_cached)

    @cached_property
    def caching_fraction(self) -> float:
        """Stored fraction per first-group content, t/K = M/n_cached."""
        return self.cache_size / self.n_cached

    @cached_property
    def load_by_hits(self) -> np.ndarray:
        """Total row load indexed by the row's cached-request count u.

        Precomputed once per placement so row processing reduces to a table
        lookup; entry u is coded load (capped at n_cached - M) plus K - u.
        """
        k = self.k_faps
        t_low, t_high, w_low = self.fragmentation
        table = np.empty(k + 1)
        cap = self.n_cached - self.cache_size
        for u in range(k + 1):
            coded = (w_low * coded_multicast_load(u, k, t_low)
                     + (1.0 - w_low) * coded_multicast_load(u, k, t_high))
            table[u] = min(coded, cap) + (k - u)
        table.flags.writeable = False
        return table

    def indicator(self, n_contents: int) -> np.ndarray:
        """Boolean membership array indexed by 1-based content id."""
        ind = np.zeros(n_contents + 1, dtype=bool)
        ind[list(self.cached_set)] = True
        return ind


def fragmentation_param(k_faps: int, cache_size: int,
                        n_cached: int) -> tuple[int, int, float]:
    """Memory-sharing split of the fragmentation parameter t = K*M/n_cached.

    Returns (t_low, t_high, weight_low) with
    weight_low*t_low + (1-weight_low)*t_high == t exactly. Integral t gives
    (t, t, 1.0).
    """
    km = k_faps * cache_size
    if n_cached <= cache_size:
        raise ValueError(f"n_cached={n_cached} must exceed M={cache_size}")
    if k_faps >= 2 and n_cached > km:
        raise ValueError(f"n_cached={n_cached} must not exceed K*M={km}")
    t_low, rem = divmod(km, n_cached)
    if rem == 0:
        return t_low, t_low, 1.0
    # weight_low = t_high - t, exact as a ratio of integers
    w_low = ((t_low + 1) * n_cached - km) / n_cached
    return t_low, t_low + 1, w_low


def coded_multicast_load(u: int, k_faps: int, t: int) -> float:
    """Fronthaul load of the u cached requests in one row (uncapped).

    [C(K, t+1) - C(K-u, t+1)] / C(K, t): each multicast message carries
    1/C(K, t) of a content and one message serves every (t+1)-subset of
    caches that contains a requester. t=0 degenerates to plain unicast (u)
    and t=K to 0 (everything already stored everywhere).
    """
    if not 0 <= u <= k_faps:
        raise ValueError(f"u={u} out of range [0, {k_faps}]")
    if not 0 <= t <= k_faps:
        raise ValueError(f"t={t} out of range [0, {k_faps}]")
    return (comb(k_faps, t + 1) - comb(k_faps - u, t + 1)) / comb(k_faps, t)


def coded_multicast_load_exact(u: int, k_faps: int, t: int) -> Fraction:
    """`coded_multicast_load` in exact rational arithmetic."""
    if not 0 <= u <= k_faps:
        raise ValueError(f"u={u} out of range [0, {k_faps}]")
    if not 0 <= t <= k_faps:
        raise ValueError(f"t={t} out of range [0, {k_faps}]")
    return Fraction(comb(k_faps, t + 1) - comb(k_faps - u, t + 1),
                    comb(k_faps, t))


def brute_force_multicast_oracle(u: int, k_faps: int, t: int) -> Fraction:
    """Enumerate the multicast messages instead of using the closed form.

    One message goes to every (t+1)-subset of the K caches that intersects
    the u requesters; each carries 1/C(K, t) of a content. Exact rational
    result; K is capped to keep the enumeration small.
    """
    if k_faps > 12:
        raise ValueError(f"enumeration oracle limited to K <= 12, got {k_faps}")
    if not 0 <= u <= k_faps:
        raise ValueError(f"u={u} out of range [0, {k_faps}]")
    if not 0 <= t <= k_faps:
        raise ValueError(f"t={t} out of range [0, {k_faps}]")
    requesters = set(range(u))
    messages = sum(1 for subset in combinations(range(k_faps), t + 1)
                   if requesters.intersection(subset))
    return Fraction(messages, comb(k_faps, t))


@dataclass(frozen=True)
class RowLoad:
    """Fronthaul load of one request row, split by delivery mode."""

    coded_load: float
    uncached_load: int

    @property
    def total(self) -> float:
        return self.coded_load + self.uncached_load


def count_cached_hits(row, placement: Placement) -> int:
    """Number of requests in the row whose content is in the cached set.

    Duplicate requests for the same cached content each count.
    """
    return sum(1 for n in row if n in placement.cached_set)


def row_load(row, placement: Placement) -> RowLoad:
    """Fronthaul load of one row of K requests under a placement."""
    row = np.asarray(row)
    if row.shape != (placement.k_faps,):
        raise ValueError(
            f"row must have exactly K={placement.k_faps} entries, "
            f"got shape {row.shape}")
    if row.min() < 1:
        raise ValueError("content indices are 1-based")
    u = count_cached_hits(row, placement)
    k = placement.k_faps
    t_low, t_high, w_low = placement.fragmentation
    coded = (w_low * coded_multicast_load(u, k, t_low)
             + (1.0 - w_low) * coded_multicast_load(u, k, t_high))
    coded = min(coded, placement.n_cached - placement.cache_size)
    return RowLoad(coded_load=coded, uncached_load=k - u)


def rows_hit_counts(rows: np.ndarray, placement: Placement,
                    n_contents: int) -> np.ndarray:
    """Cached-request count u for every row of a (rows, K) index matrix."""
    ind = placement.indicator(n_contents)
    return ind[rows].sum(axis=1)


def slot_delay(rows, placement: Placement, d_f: float, d_a: float) -> float:
    """Total access delay of one slot: sum over rows of d_f*load + d_a*K."""
    if d_f <= 0 or d_a <= 0:
        raise ValueError("d_f and d_a must be positive")
    total = 0.0
    for row in rows:
        total += d_f * row_load(row, placement).total + d_a * placement.k_faps
    return total
