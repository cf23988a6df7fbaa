"""Tests for Zipf profiles, the switching process, and request sampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fogcache.popularity import (RegimePopularityEstimator, ZipfProfile,
                                 build_process, draw_profile_orders,
                                 empirical_popularity, sample_requests,
                                 zipf_profile)


class TestZipfProfile:
    def test_alpha_zero_is_uniform(self):
        profile = zipf_profile(0.0, 4)
        assert np.allclose(profile.probabilities, [0.25, 0.25, 0.25, 0.25],
                           atol=1e-15)

    def test_alpha_one_hand_computed(self):
        # weights 1, 1/2, 1/3, 1/4; harmonic sum 25/12
        profile = zipf_profile(1.0, 4)
        assert np.allclose(profile.probabilities, [0.48, 0.24, 0.16, 0.12],
                           atol=1e-12)

    def test_alpha_two_two_contents(self):
        profile = zipf_profile(2.0, 2)
        assert np.allclose(profile.probabilities, [0.8, 0.2], atol=1e-15)

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            zipf_profile(float("nan"), 4)
        with pytest.raises(ValueError):
            zipf_profile(float("inf"), 4)
        with pytest.raises(ValueError):
            zipf_profile(-0.5, 4)

    def test_rejects_empty_catalog(self):
        with pytest.raises(ValueError):
            zipf_profile(1.0, 0)

    @given(alpha=st.floats(0.0, 4.0), n=st.integers(1, 300))
    @settings(max_examples=60)
    def test_normalized_positive_and_sorted(self, alpha, n):
        p = zipf_profile(alpha, n).probabilities
        assert abs(p.sum() - 1.0) <= 1e-12
        assert (p > 0).all()
        assert (np.diff(p) <= 1e-18).all()
        # strictness needs alpha large enough that n**-alpha separates in float
        if alpha >= 1e-3 and n > 1:
            assert (np.diff(p) < 0).all()


class TestBuildProcess:
    def test_single_profile_never_changes(self):
        proc = build_process(1, (0.5, 1.5), 0.5, 20, seed=3)
        assert proc.z_profiles == 1
        for _ in range(200):
            assert proc.advance() == 1

    def test_reference_shape(self):
        proc = build_process(10, (0.5, 1.5), 0.8, 200, seed=7)
        assert len(proc.profiles) == 10
        assert proc.current == 1
        for profile in proc.profiles:
            assert 0.5 <= profile.alpha <= 1.5
            assert profile.n_contents == 200

    def test_same_seed_identical(self):
        a = build_process(10, (0.5, 1.5), 0.8, 200, seed=7)
        b = build_process(10, (0.5, 1.5), 0.8, 200, seed=7)
        assert [p.alpha for p in a.profiles] == [p.alpha for p in b.profiles]
        for pa, pb in zip(a.profiles, b.profiles):
            assert np.array_equal(pa.probabilities, pb.probabilities)

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            build_process(0, (0.5, 1.5), 0.8, 10, seed=1)
        with pytest.raises(ValueError):
            build_process(2, (1.5, 0.5), 0.8, 10, seed=1)
        with pytest.raises(ValueError):
            build_process(2, (-1.0, 0.5), 0.8, 10, seed=1)


class TestAdvance:
    def test_absorbing_when_stay_prob_one(self):
        proc = build_process(5, (0.5, 1.5), 1.0, 10, seed=0)
        assert all(proc.advance() == 1 for _ in range(500))

    def test_always_switches_when_stay_prob_zero(self):
        proc = build_process(2, (0.5, 1.5), 0.0, 10, seed=0)
        switches = 0
        prev = proc.current
        for _ in range(10_000):
            cur = proc.advance()
            switches += cur != prev
            prev = cur
        assert switches == 10_000  # exact: Z=2, stay_prob=0 alternates

    def test_index_stays_in_range(self):
        proc = build_process(4, (0.5, 1.5), 0.3, 10, seed=5)
        for _ in range(2000):
            assert 1 <= proc.advance() <= 4

    def test_longrun_occupancy_uniform(self):
        # symmetric chain: each profile visited 1/Z of the time
        z = 5
        proc = build_process(z, (0.5, 1.5), 0.8, 10, seed=11)
        counts = np.zeros(z)
        for _ in range(100_000):
            counts[proc.advance() - 1] += 1
        assert np.abs(counts / counts.sum() - 1 / z).max() <= 0.02


class TestSampleRequests:
    def test_degenerate_distribution(self):
        profile = ZipfProfile(probabilities=np.array([1.0]), alpha=0.0)
        batch = sample_requests(profile, 3, np.random.default_rng(0))
        assert batch.tolist() == [1, 1, 1]

    def test_law_of_large_numbers(self):
        profile = ZipfProfile(probabilities=np.array([0.5, 0.5]), alpha=0.0)
        batch = sample_requests(profile, 100_000, np.random.default_rng(1))
        freq_1 = np.mean(batch == 1)
        assert abs(freq_1 - 0.5) <= 0.01

    def test_same_seed_same_batch(self):
        profile = zipf_profile(1.2, 30)
        a = sample_requests(profile, 50, np.random.default_rng(9))
        b = sample_requests(profile, 50, np.random.default_rng(9))
        assert np.array_equal(a, b)

    def test_indices_in_range(self):
        profile = zipf_profile(0.7, 12)
        batch = sample_requests(profile, 5000, np.random.default_rng(2))
        assert batch.min() >= 1 and batch.max() <= 12

    def test_rejects_zero_requests(self):
        with pytest.raises(ValueError):
            sample_requests(zipf_profile(1.0, 3), 0, np.random.default_rng(0))


class TestEmpiricalPopularity:
    def test_direct_counting(self):
        assert empirical_popularity([1, 1, 2], 3).tolist() == \
            pytest.approx([2 / 3, 1 / 3, 0.0])

    def test_single_request(self):
        assert empirical_popularity([3], 3).tolist() == [0.0, 0.0, 1.0]

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            empirical_popularity([], 3)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            empirical_popularity([0, 1], 3)
        with pytest.raises(ValueError):
            empirical_popularity([4], 3)

    def test_consistent_with_zipf(self):
        profile = zipf_profile(1.0, 4)
        batch = sample_requests(profile, 100_000, np.random.default_rng(4))
        freq = empirical_popularity(batch, 4)
        assert np.abs(freq - [0.48, 0.24, 0.16, 0.12]).max() <= 0.01

    @given(st.lists(st.integers(1, 8), min_size=1, max_size=200))
    @settings(max_examples=50)
    def test_sums_to_one(self, requests):
        freq = empirical_popularity(requests, 8)
        assert freq.sum() == pytest.approx(1.0, abs=1e-15)


class TestProcessSampling:
    def test_full_determinism_of_sequences(self):
        a = build_process(3, (0.5, 1.5), 0.7, 15, seed=21)
        b = build_process(3, (0.5, 1.5), 0.7, 15, seed=21)
        for _ in range(50):
            assert np.array_equal(a.sample(10), b.sample(10))
            assert a.advance() == b.advance()


class TestPermutedProfiles:
    def test_orders_are_permutations(self):
        orders = draw_profile_orders(4, 12, seed=2)
        assert len(orders) == 4
        for order in orders:
            assert sorted(order.tolist()) == list(range(1, 13))

    def test_active_popularity_reorders_base_profile(self):
        orders = draw_profile_orders(2, 6, seed=3)
        proc = build_process(2, (1.0, 1.0), 0.8, 6, seed=3, orders=orders)
        base = proc.active_profile().probabilities
        pop = proc.active_popularity()
        assert sorted(pop.tolist()) == sorted(base.tolist())
        order = proc.orders[proc.current - 1]
        assert pop[order[0] - 1] == base[0]  # rank 1 lands on its content

    def test_sampling_follows_permuted_popularity(self):
        orders = draw_profile_orders(1, 8, seed=5)
        proc = build_process(1, (1.5, 1.5), 1.0, 8, seed=5, orders=orders)
        pop = proc.active_popularity()
        batch = proc.sample(200_000)
        freq = empirical_popularity(batch, 8)
        assert np.abs(freq - pop).max() <= 0.01

    def test_unpermuted_matches_plain_profile(self):
        plain = build_process(2, (0.5, 1.5), 0.7, 10, seed=9)
        assert plain.orders is None
        assert np.array_equal(plain.active_popularity(),
                              plain.active_profile().probabilities)

    def test_deterministic_per_seed(self):
        a = draw_profile_orders(3, 10, seed=4)
        b = draw_profile_orders(3, 10, seed=4)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    def test_rejects_mismatched_orders(self):
        with pytest.raises(ValueError):
            build_process(2, (0.5, 1.5), 0.7, 10, seed=1,
                          orders=draw_profile_orders(3, 10, seed=1))


class TestRegimePopularityEstimator:
    def test_single_regime_is_running_mean(self):
        est = RegimePopularityEstimator(1, samples_per_obs=10)
        obs = [np.array([0.5, 0.5]), np.array([0.7, 0.3]),
               np.array([0.3, 0.7])]
        out = [est.update(o) for o in obs]
        assert np.allclose(out[-1], np.mean(obs, axis=0))

    def test_converges_to_true_distribution(self):
        profile = zipf_profile(1.0, 10)
        rng = np.random.default_rng(3)
        est = RegimePopularityEstimator(1, samples_per_obs=30)
        for _ in range(3000):
            batch = sample_requests(profile, 30, rng)
            estimate = est.update(empirical_popularity(batch, 10))
        assert np.abs(estimate - profile.probabilities).max() <= 0.01

    def test_separates_distant_regimes(self):
        # two clearly different profiles alternate; each regime's estimate
        # should approach its own distribution, not the blend
        a = zipf_profile(0.0, 10).probabilities
        b = zipf_profile(2.5, 10).probabilities
        rng = np.random.default_rng(4)
        est = RegimePopularityEstimator(2, samples_per_obs=60)
        last_b = None
        for t in range(2000):
            true = a if t % 2 == 0 else b
            idx = np.searchsorted(np.cumsum(true), rng.random(60)) + 1
            np.minimum(idx, 10, out=idx)
            out = est.update(empirical_popularity(idx, 10))
            if t % 2 == 1:
                last_b = out
        assert est.n_regimes == 2
        assert np.abs(last_b - b).max() <= 0.02

    def test_deterministic(self):
        obs = [np.array([0.6, 0.4]), np.array([0.1, 0.9]),
               np.array([0.58, 0.42])]
        runs = []
        for _ in range(2):
            est = RegimePopularityEstimator(2, samples_per_obs=50)
            runs.append([est.update(o).tolist() for o in obs])
        assert runs[0] == runs[1]
