"""The decision process around coded caching.

An action is a choice of first-group size n_cached from a discrete grid; the
concrete contents are always the top-n_cached by the observed statistical
popularity, which keeps the action space small for large catalogs. States
concatenate the previous placement (indicator + normalized size) with the
current popularity observation, giving dimension 2N+1.

Two step flavors share the arithmetic: the *virtual* step splits one cache's
own requests into K equal queues and evaluates the coded scheme as if K
same-popularity caches existed (training signal without coordination), while
the *global* step serves the real rows formed by the i-th request of every
cache's queue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coded_cache import Placement, rows_hit_counts
from .popularity import empirical_popularity


@dataclass(frozen=True)
class ActionSpace:
    """Ordered admissible values of n_cached."""

    candidates: tuple

    def __post_init__(self):
        if len(self.candidates) == 0:
            raise ValueError("action space is empty")
        if list(self.candidates) != sorted(set(self.candidates)):
            raise ValueError("candidates must be ascending and unique")

    def __len__(self) -> int:
        return len(self.candidates)

    def __getitem__(self, idx: int) -> int:
        return self.candidates[idx]


@dataclass(frozen=True)
class Delays:
    """Per-content transmission delays (ms) of the two link types."""

    d_f: float
    d_a: float

    def __post_init__(self):
        if self.d_f <= 0 or self.d_a <= 0:
            raise ValueError("delays must be positive")


@dataclass(frozen=True)
class RewardParams:
    """Weights of the exponential delay-to-reward mapping.

    reward = phi * exp(-sum_rows(mu1*d_f*load + mu2*d_a*K)); mu1 and mu2
    balance the two link delays and must satisfy mu1+mu2=1, 0<mu2<mu1<1.
    ``normalize_rows`` divides the exponent by the row count, which keeps
    rewards in a numerically useful range for long slots (off by default).
    """

    mu1: float = 0.95
    mu2: float = 0.05
    phi: float = 3.0
    normalize_rows: bool = False

    def __post_init__(self):
        if abs(self.mu1 + self.mu2 - 1.0) > 1e-9:
            raise ValueError(f"mu1+mu2 must equal 1, got {self.mu1 + self.mu2}")
        if not 0 < self.mu2 < self.mu1 < 1:
            raise ValueError(
                f"need 0 < mu2 < mu1 < 1, got mu1={self.mu1}, mu2={self.mu2}")
        if self.phi <= 0:
            raise ValueError(f"phi must be positive, got {self.phi}")


@dataclass(frozen=True)
class StepOutcome:
    """Result of serving one slot under a placement."""

    reward: float
    delay_ms: float
    hit_rate: float
    next_state: np.ndarray
    placement: Placement


def build_action_space(k_faps: int, cache_size: int, n_contents: int,
                       extra_grid=None) -> ActionSpace:
    """Default grid of admissible n_cached values.

    Takes round(K*M / L) for every integer fragmentation parameter
    L = 1..K-1, clipped to the admissible interval (M, min(K*M, N)], plus any
    ``extra_grid`` entries passing the same constraint. For K=1 (degenerate
    single-cache network) the interval is (M, N] and the default grid is {N}.
    """
    if k_faps < 1:
        raise ValueError(f"k_faps must be >= 1, got {k_faps}")
    if not 1 <= cache_size < n_contents:
        raise ValueError(
            f"need 1 <= cache_size < n_contents, got M={cache_size}, N={n_contents}")
    km = k_faps * cache_size
    if k_faps == 1:
        upper = n_contents
        candidates = {n_contents}
    else:
        upper = min(km, n_contents)
        candidates = set()
        for frag in range(1, k_faps):
            n_c = math.floor(km / frag + 0.5)  # round half up
            if cache_size < n_c <= upper:
                candidates.add(n_c)
    for n_c in (extra_grid or ()):
        if cache_size < n_c <= upper:
            candidates.add(int(n_c))
    if not candidates:
        raise ValueError(
            f"no admissible n_cached in ({cache_size}, {upper}] "
            f"for K={k_faps}, M={cache_size}, N={n_contents}")
    return ActionSpace(candidates=tuple(sorted(candidates)))


def place_top_popular(n_cached: int, stat_popularity: np.ndarray,
                      k_faps: int, cache_size: int) -> Placement:
    """Cache the n_cached most popular contents; ties go to lower indices."""
    stat_popularity = np.asarray(stat_popularity, dtype=np.float64)
    order = np.argsort(-stat_popularity, kind="stable")
    chosen = frozenset(int(i) + 1 for i in order[:n_cached])
    return Placement(n_cached=n_cached, cached_set=chosen,
                     k_faps=k_faps, cache_size=cache_size)


def encode_state(prev_placement: Placement,
                 stat_popularity: np.ndarray) -> np.ndarray:
    """State vector [prev indicator (N), prev n_cached/N, popularity (N)]."""
    stat_popularity = np.asarray(stat_popularity, dtype=np.float64)
    n = len(stat_popularity)
    state = np.empty(2 * n + 1)
    state[:n] = prev_placement.indicator(n)[1:]
    state[n] = prev_placement.n_cached / n
    state[n + 1:] = stat_popularity
    return state


def serve_rows(rows: np.ndarray, placement: Placement, n_contents: int,
                delays: Delays, params: RewardParams):
    """Vectorized slot service: returns (hit count, delay, reward exponent)."""
    n_rows = rows.shape[0]
    k = placement.k_faps
    if n_rows == 0:
        return 0, 0.0, 0.0
    hits = rows_hit_counts(rows, placement, n_contents)
    total_load = float(placement.load_by_hits[hits].sum())
    delay = delays.d_f * total_load + delays.d_a * k * n_rows
    exponent = (params.mu1 * delays.d_f * total_load
                + params.mu2 * delays.d_a * k * n_rows)
    if params.normalize_rows:
        exponent /= n_rows
    return int(hits.sum()), delay, exponent


def reward(rows, placement: Placement, d_f: float, d_a: float,
           mu1: float, mu2: float, phi: float,
           normalize_rows: bool = False) -> float:
    """Negative-exponential reward of one slot's realized loads."""
    params = RewardParams(mu1=mu1, mu2=mu2, phi=phi,
                          normalize_rows=normalize_rows)
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, placement.k_faps)
    n_contents = max(placement.cached_set)
    if rows.size:
        n_contents = max(n_contents, int(rows.max()))
    _, _, exponent = serve_rows(rows, placement, n_contents,
                                 Delays(d_f, d_a), params)
    return phi * math.exp(-exponent)


def local_virtual_step(fap_requests, n_cached: int, stat_popularity,
                       k_faps: int, cache_size: int, delays: Delays,
                       params: RewardParams) -> StepOutcome:
    """Evaluate an action on one cache's own requests, virtually.

    The V requests are divided round-robin into K equal virtual queues, so
    the rows are consecutive arrival-order chunks of K; a remainder short of
    a full row is dropped from the delay computation (it still counts toward
    the popularity observation). The placement caches the top-n_cached
    contents by ``stat_popularity``, the popularity observed when the action
    was chosen.
    """
    stat_popularity = np.asarray(stat_popularity, dtype=np.float64)
    n_contents = len(stat_popularity)
    requests = np.asarray(fap_requests, dtype=np.int64)
    if len(requests) < k_faps:
        raise ValueError(
            f"need at least K={k_faps} requests per slot, got {len(requests)}")
    placement = place_top_popular(n_cached, stat_popularity, k_faps, cache_size)
    rows = requests[: (len(requests) // k_faps) * k_faps].reshape(-1, k_faps)
    hit_count, delay, exponent = serve_rows(rows, placement, n_contents,
                                             delays, params)
    next_pop = empirical_popularity(requests, n_contents)
    return StepOutcome(
        reward=params.phi * math.exp(-exponent),
        delay_ms=delay,
        hit_rate=hit_count / rows.size,
        next_state=encode_state(placement, next_pop),
        placement=placement,
    )


def global_step(all_fap_requests, n_cached: int, global_stat_popularity,
                cache_size: int, delays: Delays,
                params: RewardParams) -> StepOutcome:
    """Serve one real slot: row i joins the i-th request of each cache queue.

    ``all_fap_requests`` is a (K, V) matrix of content indices;
    ``global_stat_popularity`` is the popularity observation the placement
    decision was based on (the previous slot's).
    """
    requests = np.asarray(all_fap_requests, dtype=np.int64)
    if requests.ndim != 2:
        raise ValueError("expected one request batch per cache (K, V)")
    k_faps = requests.shape[0]
    stat_popularity = np.asarray(global_stat_popularity, dtype=np.float64)
    n_contents = len(stat_popularity)
    placement = place_top_popular(n_cached, stat_popularity, k_faps, cache_size)
    rows = np.ascontiguousarray(requests.T)  # (V, K)
    hit_count, delay, exponent = serve_rows(rows, placement, n_contents,
                                             delays, params)
    next_pop = empirical_popularity(requests.ravel(), n_contents)
    return StepOutcome(
        reward=params.phi * math.exp(-exponent),
        delay_ms=delay,
        hit_rate=hit_count / rows.size,
        next_state=encode_state(placement, next_pop),
        placement=placement,
    )
