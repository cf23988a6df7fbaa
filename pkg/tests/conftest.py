"""Shared fixtures: the expensive training runs used by several modules."""

import pytest

from fogcache.harness.config import ExperimentConfig
from fogcache.harness.runner import collect_records


@pytest.fixture(scope="session")
def small_stationary_run():
    """Small stationary instance: 5 seeds of federated + cheap baselines.

    N=10, K=3, M=2, V=9, one fixed Zipf(1) profile per cache (no regime
    permutation: plain stationary Zipf), 2000 slots.
    """
    config = ExperimentConfig(
        n_contents=10, k_faps=3, cache_size=2, requests_per_slot=9,
        z_profiles=1, alpha_min=1.0, alpha_max=1.0, permute_profiles=False,
        total_slots=2000, normalize_reward_rows=True,
        schemes=("federated", "nucc", "lfu"), seeds=(1, 2, 3, 4, 5))
    records, _ = collect_records(config)
    return config, records


@pytest.fixture(scope="session")
def drifting_run():
    """Reference drifting-popularity comparison of all five schemes.

    K=5, N=50, M=10, V=20, Z=10 regimes with per-regime content orderings,
    3000 slots, 5 seeds.
    """
    config = ExperimentConfig(
        n_contents=50, k_faps=5, cache_size=10, requests_per_slot=20,
        z_profiles=10, total_slots=3000, normalize_reward_rows=True,
        schemes=("federated", "centralized", "lfu", "apcc", "nucc"),
        seeds=(1, 2, 3, 4, 5))
    records, _ = collect_records(config)
    return config, records
