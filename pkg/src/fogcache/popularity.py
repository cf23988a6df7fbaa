"""Time-variant content popularity for the edge caches.

Each fog access point (F-AP) sees requests drawn from a Zipf profile whose
exponent switches over time: a process holds a fixed set of Z profiles and a
symmetric Markov chain over them (stay with probability ``stay_prob``, else
jump uniformly to one of the other Z-1 profiles). Content indices are 1-based
throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ZipfProfile:
    """A normalized Zipf popularity vector with its exponent.

    probabilities[n-1] is the request probability of content n; entries are
    positive, sum to 1, and are non-increasing in n for alpha > 0.
    """

    probabilities: np.ndarray
    alpha: float

    @property
    def n_contents(self) -> int:
        return len(self.probabilities)


def zipf_profile(alpha: float, n_contents: int) -> ZipfProfile:
    """Zipf popularity over ``n_contents`` items: p_n ∝ 1 / n**alpha."""
    if not math.isfinite(alpha) or alpha < 0:
        raise ValueError(f"alpha must be finite and >= 0, got {alpha}")
    if n_contents < 1:
        raise ValueError(f"n_contents must be >= 1, got {n_contents}")
    weights = np.arange(1, n_contents + 1, dtype=np.float64) ** -alpha
    probs = weights / weights.sum()
    probs.flags.writeable = False
    return ZipfProfile(probabilities=probs, alpha=float(alpha))


def sample_requests(profile: ZipfProfile, v: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Draw ``v`` i.i.d. content requests (1-based indices) from a profile."""
    if v < 1:
        raise ValueError(f"request count must be >= 1, got {v}")
    cdf = np.cumsum(profile.probabilities)
    idx = np.searchsorted(cdf, rng.random(v), side="right")
    # cdf[-1] can fall a few ulp short of 1; clip the (rare) overshoot
    np.minimum(idx, profile.n_contents - 1, out=idx)
    return idx.astype(np.int64) + 1


def empirical_popularity(requests, n_contents: int) -> np.ndarray:
    """Per-content request frequencies (counts / batch size).

    This is the statistical popularity the agents observe in place of the
    true distribution; it sums to 1 exactly since counts are rational.
    """
    requests = np.asarray(requests, dtype=np.int64)
    if requests.size == 0:
        raise ValueError("cannot compute frequencies of an empty batch")
    if requests.min() < 1 or requests.max() > n_contents:
        raise ValueError("request indices must lie in [1, n_contents]")
    counts = np.bincount(requests - 1, minlength=n_contents)
    return counts / requests.size


class RegimePopularityEstimator:
    """Accumulated per-regime popularity statistics.

    The per-slot frequency observation is noisy (V samples over N contents),
    but the underlying popularity only visits a finite set of recurring
    regimes. This classifier assigns each observation to the nearest of at
    most ``z_max`` running-mean centroids (spawning a new one while capacity
    remains and the observation is far beyond sampling noise) and returns the
    matched regime's accumulated mean: an estimate that converges to the true
    regime distribution yet switches as soon as the regime does.

    ``samples_per_obs`` is the number of requests behind each observation;
    it scales the sampling-noise radius used by the spawn test. Deterministic
    (no randomness), so runs remain reproducible.
    """

    def __init__(self, z_max: int, samples_per_obs: int,
                 spawn_factor: float = 4.0):
        if z_max < 1:
            raise ValueError(f"z_max must be >= 1, got {z_max}")
        if samples_per_obs < 1:
            raise ValueError(f"samples_per_obs must be >= 1, got {samples_per_obs}")
        self.z_max = z_max
        self.samples_per_obs = samples_per_obs
        self.spawn_factor = spawn_factor
        self._means: list[np.ndarray] = []
        self._counts: list[int] = []

    @property
    def n_regimes(self) -> int:
        return len(self._means)

    def update(self, observation) -> np.ndarray:
        """Fold in one observation; returns the matched regime's mean."""
        obs = np.asarray(observation, dtype=np.float64)
        if not self._means:
            self._means.append(obs.copy())
            self._counts.append(1)
            return obs.copy()
        dists = [float(np.sum((obs - mean) ** 2)) for mean in self._means]
        nearest = int(np.argmin(dists))
        # expected squared distance of a same-regime observation from a mean
        # accumulated over m slots: (1 - sum p^2)/S * (1 + 1/m)
        noise = max(1.0 - float(obs @ obs), 0.0) / self.samples_per_obs
        threshold = (self.spawn_factor * noise
                     * (1.0 + 1.0 / self._counts[nearest]))
        if len(self._means) < self.z_max and dists[nearest] > threshold:
            self._means.append(obs.copy())
            self._counts.append(1)
            return obs.copy()
        self._counts[nearest] += 1
        mean = self._means[nearest]
        mean += (obs - mean) / self._counts[nearest]
        return mean.copy()


@dataclass
class PopularityProcess:
    """Z Zipf profiles plus a symmetric Markov switching chain.

    Owns its random generator: profile switches and request draws are fully
    determined by the seed, and distinct processes share no state. When
    ``orders`` is set, profile z ranks contents in its own fixed order
    (orders[z-1][r] is the content holding popularity rank r+1), so a regime
    switch reshuffles which contents are hot instead of only rescaling the
    shared head of the catalog.
    """

    profiles: list[ZipfProfile]
    stay_prob: float
    rng: np.random.Generator
    current: int = 1  # 1-based profile index
    orders: list[np.ndarray] | None = None

    @property
    def z_profiles(self) -> int:
        return len(self.profiles)

    def active_profile(self) -> ZipfProfile:
        return self.profiles[self.current - 1]

    def active_popularity(self) -> np.ndarray:
        """Per-content request probabilities of the active regime."""
        p = self.active_profile().probabilities
        if self.orders is None:
            return p.copy()
        out = np.empty_like(p)
        out[self.orders[self.current - 1] - 1] = p
        return out

    def advance(self) -> int:
        """Advance the switching chain one slot; returns the new index."""
        z = self.z_profiles
        if z > 1 and self.rng.random() >= self.stay_prob:
            # uniform over the other z-1 profiles
            offset = int(self.rng.integers(1, z))
            self.current = (self.current - 1 + offset) % z + 1
        return self.current

    def sample(self, v: int) -> np.ndarray:
        """Draw a slot's request batch from the active regime."""
        profile = self.active_profile()
        cdf = np.cumsum(profile.probabilities)
        ranks = np.searchsorted(cdf, self.rng.random(v), side="right")
        np.minimum(ranks, profile.n_contents - 1, out=ranks)
        if self.orders is None:
            return ranks.astype(np.int64) + 1
        return self.orders[self.current - 1][ranks]


def draw_profile_orders(z_profiles: int, n_contents: int, seed) -> list:
    """Fixed per-profile content orderings (1-based), one permutation each.

    Drawn separately from the processes so that several caches can share one
    set of regime rankings while still switching regimes independently.
    """
    rng = np.random.default_rng(seed)
    return [rng.permutation(n_contents).astype(np.int64) + 1
            for _ in range(z_profiles)]


def build_process(z_profiles: int, alpha_range: tuple[float, float],
                  stay_prob: float, n_contents: int, seed,
                  orders=None) -> PopularityProcess:
    """Construct a popularity process with Z profiles drawn once from seed.

    Exponents are sampled uniformly from ``alpha_range`` and held fixed; only
    the active profile index varies afterwards. ``orders`` (optional, see
    :func:`draw_profile_orders`) gives profile z its own content ordering;
    without it all profiles rank contents 1..N identically and switching
    only changes the concentration. ``seed`` may be an int or a sequence of
    ints (numpy seeding convention).
    """
    if z_profiles < 1:
        raise ValueError(f"z_profiles must be >= 1, got {z_profiles}")
    lo, hi = float(alpha_range[0]), float(alpha_range[1])
    if not (0 <= lo <= hi) or not math.isfinite(hi):
        raise ValueError(f"alpha_range must satisfy 0 <= lo <= hi, got {alpha_range}")
    if not 0 <= stay_prob <= 1:
        raise ValueError(f"stay_prob must be in [0, 1], got {stay_prob}")
    if orders is not None:
        if len(orders) != z_profiles:
            raise ValueError(
                f"need one content order per profile, got {len(orders)}")
        for order in orders:
            if len(order) != n_contents:
                raise ValueError("content orders must cover the catalog")
    rng = np.random.default_rng(seed)
    alphas = rng.uniform(lo, hi, size=z_profiles)
    profiles = [zipf_profile(a, n_contents) for a in alphas]
    return PopularityProcess(profiles=profiles, stay_prob=float(stay_prob),
                             rng=rng, orders=orders)
