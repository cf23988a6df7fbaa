"""Shared request streams and the master-seed component split.

Every source of randomness in a run is derived from the master seed through
``component_rng(master, component, index)``, so the popularity stream, model
initialization, exploration, and replay sampling are independent streams:
changing what one component consumes never shifts another. All schemes of a
run are evaluated on the same pre-generated request stream (paired
comparison).

Components:
    SEED_POPULARITY  index 0: shared regime structure (content orderings,
                     global switching chain); index k: cache k's exponents
                     and request draws
    SEED_NET_INIT    the initial model draw (index 0: shared global model)
    SEED_EXPLORE     per-cache epsilon-greedy exploration (index = cache id)
    SEED_REPLAY      per-cache replay minibatch sampling (index = cache id)

The centralized single-agent scheme uses the cache-1 exploration/replay
streams, which makes a one-cache federation and the centralized agent
coincide exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .popularity import build_process, draw_profile_orders, empirical_popularity

SEED_POPULARITY = 0  # index 0: shared regime rankings; index k: cache k
SEED_NET_INIT = 1
SEED_EXPLORE = 2
SEED_REPLAY = 3


def component_rng(master_seed: int, component: int,
                  index: int = 0) -> np.random.Generator:
    """Independent generator for one (component, index) pair of a run."""
    return np.random.default_rng([master_seed, component, index])


@dataclass(frozen=True)
class RequestStream:
    """Pre-generated requests and popularity observations for one seed.

    requests[t, k] are the V 1-based content indices cache k+1 receives in
    slot t+1; local_pop[t, k] their frequencies; global_pop[t] the equal
    weight mean over caches.
    """

    requests: np.ndarray    # (T, K, V) int64
    local_pop: np.ndarray   # (T, K, N) float64
    global_pop: np.ndarray  # (T, N) float64

    @property
    def total_slots(self) -> int:
        return self.requests.shape[0]

    @property
    def k_faps(self) -> int:
        return self.requests.shape[1]


def build_request_stream(config, seed: int) -> RequestStream:
    """Sample the full (T, K, V) request stream for one master seed.

    Each cache owns an independent popularity process; the switching chain
    advances at every slot boundary, so slot 1 uses the initial profiles.
    """
    t_total = config.total_slots
    k = config.k_faps
    v = config.requests_per_slot
    n = config.n_contents
    z = config.z_profiles
    alpha_range = (config.alpha_min, config.alpha_max)
    # index 0 of the popularity component holds the shared regime structure:
    # the per-regime content orderings and (optionally) the global switching
    # chain; indexes 1..K hold each cache's own exponents and request draws
    structure_rng = np.random.default_rng([seed, SEED_POPULARITY, 0])
    orders = None
    if getattr(config, "permute_profiles", True):
        orders = draw_profile_orders(z, n, seed=structure_rng)
    shared_chain = None
    if getattr(config, "shared_regime_chain", True):
        shared_chain = build_process(z, alpha_range, config.stay_prob, n,
                                     seed=structure_rng)
    processes = [
        build_process(z, alpha_range, config.stay_prob, n,
                      seed=[seed, SEED_POPULARITY, fap], orders=orders)
        for fap in range(1, k + 1)
    ]
    requests = np.empty((t_total, k, v), dtype=np.int64)
    local_pop = np.empty((t_total, k, n))
    for t in range(t_total):
        if shared_chain is not None:
            for proc in processes:
                proc.current = shared_chain.current
        for i, proc in enumerate(processes):
            batch = proc.sample(v)
            requests[t, i] = batch
            local_pop[t, i] = empirical_popularity(batch, n)
        if shared_chain is not None:
            shared_chain.advance()
        else:
            for proc in processes:
                proc.advance()
    return RequestStream(requests=requests, local_pop=local_pop,
                         global_pop=local_pop.mean(axis=1))
