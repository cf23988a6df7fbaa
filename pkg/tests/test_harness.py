"""Tests for config parsing, the experiment runner, sweeps, and SVG plots."""

import math

import numpy as np
import pytest

from fogcache.harness import (ConfigError, ExperimentConfig, emit_config,
                              parse_config, read_csv, render_plots,
                              render_sweep, render_timeseries,
                              run_experiment, sweep, write_csv)
from fogcache.harness.records import CSV_COLUMNS, MetricRecord
from fogcache.harness.runner import collect_records
from fogcache.streams import build_request_stream


def fast_config(**overrides):
    base = dict(
        n_contents=10, k_faps=3, cache_size=2, requests_per_slot=9,
        z_profiles=2, alpha_min=0.6, alpha_max=1.4, total_slots=20,
        aggregation_period=5, target_sync_steps=10, buffer_capacity=64,
        batch_size=8, explore_decay_steps=30, trunk_widths=(8,),
        head_width=6, normalize_reward_rows=True,
        schemes=("lfu", "apcc"), seeds=(1, 2, 3))
    base.update(overrides)
    return ExperimentConfig(**base)


class TestParseConfig:
    def test_empty_gives_reference_defaults(self):
        config = parse_config("")
        assert (config.n_contents, config.k_faps, config.cache_size) == \
            (200, 5, 30)
        assert (config.requests_per_slot, config.z_profiles) == (50, 10)
        assert (config.d_f, config.d_a) == (5.0, 1.0)
        assert (config.mu1, config.mu2, config.phi) == (0.95, 0.05, 3.0)
        assert (config.buffer_capacity, config.batch_size) == (5000, 32)
        assert config.learn_rate == 0.001
        assert config.target_sync_steps == 200
        assert config.aggregation_period == 20
        assert (config.alpha_min, config.alpha_max) == (0.5, 1.5)

    def test_parses_keys_comments_sections(self):
        text = """
        # an experiment
        [network]
        n_contents = 40      # catalog
        k_faps = 4
        [learning]
        learn_rate = 0.01
        schemes = lfu,apcc
        seeds = 7,8
        normalize_reward_rows = true
        """
        config = parse_config(text)
        assert config.n_contents == 40
        assert config.k_faps == 4
        assert config.learn_rate == 0.01
        assert config.schemes == ("lfu", "apcc")
        assert config.seeds == (7, 8)
        assert config.normalize_reward_rows is True

    def test_rejects_equal_mus(self):
        with pytest.raises(ConfigError):
            parse_config("mu1 = 0.5\nmu2 = 0.5\n")

    def test_rejects_unknown_key_with_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("n_contents = 10\nbogus_key = 3\n")

    def test_rejects_bad_value_with_line(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("n_contents = ten\n")

    def test_rejects_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("k_faps = 3\nk_faps = 4\n")

    def test_rejects_malformed_line(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("just some words\n")

    def test_roundtrip(self):
        config = fast_config(apcc_threshold=0.01)
        assert parse_config(emit_config(config)) == config

    def test_roundtrip_defaults(self):
        config = ExperimentConfig()
        assert parse_config(emit_config(config)) == config

    def test_constraint_violations_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(cache_size=200, n_contents=200)
        with pytest.raises(ConfigError):
            ExperimentConfig(requests_per_slot=3, k_faps=5)
        with pytest.raises(ConfigError):
            ExperimentConfig(schemes=("magic",))
        with pytest.raises(ConfigError):
            ExperimentConfig(seeds=())

    def test_warns_when_sync_shorter_than_aggregation(self):
        with pytest.warns(UserWarning):
            fast_config(target_sync_steps=3, aggregation_period=5)


class TestCsv:
    def test_row_counting(self):
        config = fast_config(total_slots=20, schemes=("lfu", "apcc"),
                             seeds=(1, 2, 3))
        records, _ = collect_records(config)
        assert len(records) == 20 * 2 * 3

    def test_write_read_roundtrip(self, tmp_path):
        records = [MetricRecord("lfu", 1, 1, 12.5, 0.5, 1.0, 2, 0.3),
                   MetricRecord("lfu", 1, 2, 13.5, 0.25, 1.0, 2, 0.2,
                                loss=0.5)]
        path = tmp_path / "m.csv"
        write_csv(records, path)
        rows = read_csv(path)
        assert rows[0]["delay_ms"] == 12.5
        assert math.isnan(rows[0]["loss"])
        assert rows[1]["loss"] == 0.5
        assert rows[0]["local_caching_gain"] == pytest.approx(0.5)

    def test_rejects_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            read_csv(path)

    def test_run_experiment_byte_identical_rerun(self, tmp_path):
        config = fast_config(schemes=("lfu", "federated"), seeds=(1,),
                             total_slots=15)
        p1 = run_experiment(config, out_dir=tmp_path / "a")
        p2 = run_experiment(config, out_dir=tmp_path / "b")
        assert p1.read_bytes() == p2.read_bytes()

    def test_rows_sorted_by_scheme_seed_slot(self, tmp_path):
        config = fast_config(total_slots=5, schemes=("nucc", "lfu"),
                             seeds=(2, 1))
        path = run_experiment(config, out_dir=tmp_path)
        rows = read_csv(path)
        keys = [(r["scheme"], r["seed"], r["slot"]) for r in rows]
        assert keys == sorted(keys)

    def test_checkpoints_written(self, tmp_path):
        config = fast_config(schemes=("federated",), seeds=(1,),
                             total_slots=10)
        run_experiment(config, out_dir=tmp_path)
        names = {p.name for p in tmp_path.glob("*.ckpt")}
        assert "federated_seed1_global.ckpt" in names
        assert "federated_seed1_local_1.ckpt" in names


class TestPairing:
    def test_all_schemes_see_identical_requests(self):
        # paired comparison: the stream depends only on the seed
        config = fast_config(seeds=(4,))
        s1 = build_request_stream(config, 4)
        s2 = build_request_stream(config.replace(schemes=("nucc",)), 4)
        assert np.array_equal(s1.requests, s2.requests)

    def test_seed_components_independent(self):
        # consuming more exploration randomness must not shift the request
        # stream: streams are derived from a dedicated component
        config = fast_config()
        a = build_request_stream(config, 9)
        b = build_request_stream(config.replace(explore_decay_steps=500), 9)
        assert np.array_equal(a.requests, b.requests)
        assert np.array_equal(a.global_pop, b.global_pop)


class TestSweep:
    def test_single_value_matches_run(self, tmp_path):
        config = fast_config(schemes=("lfu",), seeds=(1, 2), total_slots=20)
        summary = sweep(config, "M", [2], out_dir=tmp_path)
        lines = summary.read_text().splitlines()
        assert lines[0] == \
            "parameter,value,scheme,mean_delay_ms,std_delay_ms,n_seeds"
        records, _ = collect_records(config)
        from fogcache.harness.runner import seed_mean_delay
        expected = seed_mean_delay(records, config.convergence_window)["lfu"]
        assert float(lines[1].split(",")[3]) == pytest.approx(expected)

    def test_per_seed_rows(self, tmp_path):
        config = fast_config(schemes=("lfu", "apcc"), seeds=(1, 2),
                             total_slots=10)
        sweep(config, "M", [2, 3], out_dir=tmp_path)
        lines = (tmp_path / "sweep_M.csv").read_text().splitlines()
        assert len(lines) == 1 + 2 * 2 * 2  # values x schemes x seeds

    def test_rejects_unknown_parameter(self, tmp_path):
        with pytest.raises(ValueError):
            sweep(fast_config(), "Q", [1], out_dir=tmp_path)


class TestPlots:
    def make_csv(self, tmp_path, slots=40):
        config = fast_config(total_slots=slots, schemes=("lfu", "apcc"),
                             seeds=(1, 2))
        return run_experiment(config, out_dir=tmp_path)

    def test_timeseries_structure(self, tmp_path):
        csv_path = self.make_csv(tmp_path)
        out = render_timeseries(csv_path, tmp_path / "delay.svg",
                                kind="delay", window=5)
        svg = out.read_text()
        assert svg.startswith("<svg")
        assert svg.count("<polyline") == 2  # one per scheme
        assert "lfu" in svg and "apcc" in svg
        assert "delay" in svg

    def test_byte_identical_rerun(self, tmp_path):
        csv_path = self.make_csv(tmp_path)
        a = render_timeseries(csv_path, tmp_path / "a.svg", kind="delay")
        b = render_timeseries(csv_path, tmp_path / "b.svg", kind="delay")
        assert a.read_bytes() == b.read_bytes()

    def test_render_plots_set(self, tmp_path):
        csv_path = self.make_csv(tmp_path)
        paths = render_plots(csv_path, tmp_path / "charts")
        assert [p.name for p in paths] == ["delay.svg", "gain.svg"]
        for p in paths:
            assert p.read_text().rstrip().endswith("</svg>")

    def test_empty_csv_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(",".join(CSV_COLUMNS) + "\n")
        with pytest.raises(ValueError):
            render_timeseries(path, tmp_path / "x.svg")

    def test_sweep_plot(self, tmp_path):
        config = fast_config(schemes=("lfu",), seeds=(1,), total_slots=10)
        summary = sweep(config, "M", [2, 3], out_dir=tmp_path)
        out = render_sweep(summary, tmp_path / "sweep.svg")
        assert "<polyline" in out.read_text()

    def test_sweep_plot_rejects_wrong_schema(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            render_sweep(path, tmp_path / "y.svg")
