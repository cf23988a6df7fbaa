"""Benchmark schemes and the exhaustive placement oracle.

Four comparison points for the federated scheme: whole-content most-popular
caching (LFU), threshold partitioning into the coded group (APCC-style),
a stationary-popularity partition optimizer (NUCC-style), and a single
centralized agent trained on real global experience. All run loops consume
the same pre-generated request stream as the federated scheme, so the
comparison is paired slot by slot.
"""

from __future__ import annotations

import math
from itertools import combinations
from math import comb

import numpy as np

from .coded_cache import Placement
from .dqn import DuelingNet
from .env import Delays, build_action_space, place_top_popular, serve_rows
from .federated import AgentTrainer, GreedyExecutor, RunArtifacts
from .harness.records import MetricRecord
from .streams import (SEED_EXPLORE, SEED_NET_INIT, SEED_REPLAY,
                      RequestStream, build_request_stream, component_rng)


def lfu_policy(stat_popularity, cache_size: int):
    """The cache_size most popular contents, stored whole (1-based set)."""
    p = np.asarray(stat_popularity, dtype=np.float64)
    if cache_size > len(p):
        raise ValueError("cache_size exceeds the catalog")
    order = np.argsort(-p, kind="stable")
    return frozenset(int(i) + 1 for i in order[:cache_size])


def apcc_policy(stat_popularity, threshold: float, k_faps: int,
                cache_size: int) -> Placement:
    """Coded first group = contents with popularity above a fixed threshold.

    The raw set is clamped into the admissible (M, min(K*M, N)] by popularity
    rank when the threshold selects too few or too many contents.
    """
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    p = np.asarray(stat_popularity, dtype=np.float64)
    n = len(p)
    upper = min(k_faps * cache_size, n)
    raw = np.flatnonzero(p > threshold) + 1
    if len(raw) <= cache_size:
        return place_top_popular(cache_size + 1, p, k_faps, cache_size)
    if len(raw) > upper:
        return place_top_popular(upper, p, k_faps, cache_size)
    return Placement(n_cached=len(raw), cached_set=frozenset(int(i) for i in raw),
                     k_faps=k_faps, cache_size=cache_size)


def _binomial_pmf(k_faps: int, q: float) -> np.ndarray:
    u = np.arange(k_faps + 1)
    return np.array([comb(k_faps, int(i)) for i in u]) \
        * q ** u * (1.0 - q) ** (k_faps - u)


def expected_row_load(placement: Placement, popularity) -> float:
    """Expected fronthaul load of one row of K i.i.d. requests."""
    p = np.asarray(popularity, dtype=np.float64)
    q = float(sum(p[i - 1] for i in placement.cached_set))
    return float(_binomial_pmf(placement.k_faps, q) @ placement.load_by_hits)


def nucc_policy(longrun_popularity, k_faps: int, cache_size: int,
                action_space) -> Placement:
    """Grid-search the first-group size minimizing expected fronthaul load.

    Rows are K i.i.d. draws from the long-run popularity, so the expected
    per-slot delay differs across candidates only through the expected load
    (the access term d_a*K is constant); placement is the top-n_cached
    contents under the long-run popularity. Ties go to the smaller size.
    """
    best = None
    best_load = math.inf
    for n_cached in action_space.candidates:
        placement = place_top_popular(n_cached, longrun_popularity,
                                      k_faps, cache_size)
        load = expected_row_load(placement, longrun_popularity)
        if load < best_load:
            best, best_load = placement, load
    return best


def brute_force_placement_oracle(popularity, k_faps: int, cache_size: int,
                                 n_contents: int, delays: Delays,
                                 n_rows: int = 1, candidates=None):
    """Exhaustive optimum of the placement problem on a small instance.

    Enumerates every admissible first-group size (or only ``candidates``) and
    every content subset of that size; the expected per-slot delay follows
    from the binomial law of the per-row cached-request count under i.i.d.
    requests. Returns (best size, best set, expected delay of ``n_rows``
    rows).
    """
    if n_contents > 12 or k_faps > 4:
        raise ValueError(
            f"instance too large for enumeration (N={n_contents}, K={k_faps})")
    p = np.asarray(popularity, dtype=np.float64)
    if len(p) != n_contents:
        raise ValueError("popularity length must equal n_contents")
    if candidates is None:
        candidates = range(cache_size + 1,
                           min(k_faps * cache_size, n_contents) + 1)
    best = (None, None, math.inf)
    for n_cached in sorted(candidates):
        # the load table depends only on the group size, not its contents
        table = Placement(n_cached, frozenset(range(1, n_cached + 1)),
                          k_faps, cache_size).load_by_hits
        u = np.arange(k_faps + 1)
        binoms = np.array([comb(k_faps, int(i)) for i in u])
        for subset in combinations(range(1, n_contents + 1), n_cached):
            q = float(sum(p[i - 1] for i in subset))
            pmf = binoms * q ** u * (1.0 - q) ** (k_faps - u)
            e_load = float(pmf @ table)
            e_delay = n_rows * (delays.d_f * e_load + delays.d_a * k_faps)
            if e_delay < best[2]:
                best = (n_cached, frozenset(subset), e_delay)
    return best


def _coded_slot_record(scheme, seed, slot, rows, placement, n_contents,
                       delays, params) -> MetricRecord:
    hit_count, delay, exponent = serve_rows(rows, placement, n_contents,
                                            delays, params)
    return MetricRecord(
        scheme=scheme, seed=seed, slot=slot, delay_ms=delay,
        hit_rate=hit_count / rows.size,
        caching_fraction=placement.caching_fraction,
        n_cached=placement.n_cached,
        reward=params.phi * math.exp(-exponent))


def run_lfu(config, seed: int, stream: RequestStream | None = None) -> RunArtifacts:
    """Whole-content caching of the M most popular contents, unicast misses.

    Popularity statistics are the running mean of the per-slot global
    frequencies, applied from the next slot on (same observation timing as
    the learning schemes).
    """
    if stream is None:
        stream = build_request_stream(config, seed)
    k, v, n = config.k_faps, config.requests_per_slot, config.n_contents
    delays = config.delays()
    params = config.reward_params()
    m = config.cache_size
    cached = frozenset(range(1, m + 1))  # uniform-popularity bootstrap
    pop_sum = np.zeros(n)
    records = []
    for t in range(1, config.total_slots + 1):
        rows = np.ascontiguousarray(stream.requests[t - 1].T)
        ind = np.zeros(n + 1, dtype=bool)
        ind[list(cached)] = True
        hit_count = int(ind[rows].sum())
        misses = rows.size - hit_count
        delay = delays.d_f * misses + delays.d_a * k * v
        exponent = (params.mu1 * delays.d_f * misses
                    + params.mu2 * delays.d_a * k * v)
        if params.normalize_rows:
            exponent /= v
        records.append(MetricRecord(
            scheme="lfu", seed=seed, slot=t, delay_ms=delay,
            hit_rate=hit_count / rows.size, caching_fraction=1.0,
            n_cached=m, reward=params.phi * math.exp(-exponent)))
        pop_sum += stream.global_pop[t - 1]
        cached = lfu_policy(pop_sum / t, m)
    return RunArtifacts(records=records, checkpoints={})


def run_apcc(config, seed: int, stream: RequestStream | None = None) -> RunArtifacts:
    """Threshold partitioning on the current global popularity observation."""
    if stream is None:
        stream = build_request_stream(config, seed)
    k, n = config.k_faps, config.n_contents
    delays = config.delays()
    params = config.reward_params()
    threshold = config.effective_apcc_threshold()
    placement = apcc_policy(np.full(n, 1.0 / n), threshold, k, config.cache_size)
    records = []
    for t in range(1, config.total_slots + 1):
        rows = np.ascontiguousarray(stream.requests[t - 1].T)
        records.append(_coded_slot_record("apcc", seed, t, rows, placement,
                                          n, delays, params))
        placement = apcc_policy(stream.global_pop[t - 1], threshold, k,
                                config.cache_size)
    return RunArtifacts(records=records, checkpoints={})


def run_nucc(config, seed: int, stream: RequestStream | None = None) -> RunArtifacts:
    """Partition optimization under the long-run popularity estimate.

    Re-optimizes on the running mean during the warm-up window, then stays
    frozen (stationarity assumption: popularity drift is ignored).
    """
    if stream is None:
        stream = build_request_stream(config, seed)
    k, n = config.k_faps, config.n_contents
    delays = config.delays()
    params = config.reward_params()
    action_space = build_action_space(k, config.cache_size, n,
                                      config.action_grid_extra)
    placement = nucc_policy(np.full(n, 1.0 / n), k, config.cache_size,
                            action_space)
    pop_sum = np.zeros(n)
    records = []
    for t in range(1, config.total_slots + 1):
        rows = np.ascontiguousarray(stream.requests[t - 1].T)
        records.append(_coded_slot_record("nucc", seed, t, rows, placement,
                                          n, delays, params))
        pop_sum += stream.global_pop[t - 1]
        if t <= config.nucc_warmup_slots:
            placement = nucc_policy(pop_sum / t, k, config.cache_size,
                                    action_space)
    return RunArtifacts(records=records, checkpoints={})


def centralized_drl(config, seed: int,
                    stream: RequestStream | None = None) -> RunArtifacts:
    """One cloud agent trained on real global rows, no federation.

    The learning track explores epsilon-greedily on the global state and
    trains every slot on global-step outcomes; the executed policy is a
    greedy snapshot of the online net refreshed every aggregation period
    (same deployment cadence as the federated scheme, including the target
    reset), so a one-cache federation and this scheme coincide exactly.
    """
    if stream is None:
        stream = build_request_stream(config, seed)
    k, n = config.k_faps, config.n_contents
    action_space = build_action_space(k, config.cache_size, n,
                                      config.action_grid_extra)
    hyper = config.hyperparams()
    delays = config.delays()
    reward_params = config.reward_params()

    online = DuelingNet.create(
        2 * n + 1, len(action_space), trunk=config.trunk_widths,
        head=config.head_width, rng=component_rng(seed, SEED_NET_INIT, 0))
    trainer = AgentTrainer(online=online, hyper=hyper,
                           action_space=action_space, k_faps=k,
                           cache_size=config.cache_size, n_contents=n,
                           delays=delays, reward_params=reward_params,
                           explore_rng=component_rng(seed, SEED_EXPLORE, 1),
                           replay_rng=component_rng(seed, SEED_REPLAY, 1),
                           virtual=False, z_profiles=config.z_profiles)
    exec_net = online.clone()
    executor = GreedyExecutor(exec_net, action_space, k, config.cache_size,
                              n, delays, reward_params)

    records = []
    for t in range(1, config.total_slots + 1):
        requests = stream.requests[t - 1]
        diag = trainer.observe_slot(requests)
        outcome = executor.serve_slot(requests, trainer.last_estimate)
        records.append(MetricRecord(
            scheme="centralized", seed=seed, slot=t,
            delay_ms=outcome.delay_ms, hit_rate=outcome.hit_rate,
            caching_fraction=outcome.placement.caching_fraction,
            n_cached=outcome.placement.n_cached,
            reward=outcome.reward,
            loss=diag.loss if diag.loss is not None else math.nan))
        if t % config.aggregation_period == 0:
            exec_net.copy_from(trainer.online)
            trainer.target.copy_from(trainer.online)
    checkpoints = {"agent": [p.copy() for p in trainer.online.params]}
    return RunArtifacts(records=records, checkpoints=checkpoints)
