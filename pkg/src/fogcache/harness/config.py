"""Experiment configuration: defaults, validation, and the config file format.

The file grammar is line-oriented ``key = value`` with ``#`` comments;
``[section]`` headers are allowed for grouping but carry no meaning (keys
live in one flat namespace). Values are typed by the field they set:
integers, reals, booleans (true/false), or comma-separated lists. Omitted
keys keep their defaults, which reproduce the reference simulation setup
(N=200, K=5, M=30, V=50, Z=10, d_f=5ms, d_a=1ms, mu=(0.95, 0.05), phi=3,
B=5000, b=32, learn rate 0.001, target sync 200, aggregation period 20).
"""

from __future__ import annotations

import dataclasses
import typing
import warnings
from dataclasses import dataclass

from ..dqn import Hyperparams
from ..env import Delays, RewardParams

KNOWN_SCHEMES = ("federated", "centralized", "lfu", "apcc", "nucc")


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of one experiment; field names are the config-file keys."""

    # network and catalog
    n_contents: int = 200
    k_faps: int = 5
    cache_size: int = 30
    requests_per_slot: int = 50
    total_slots: int = 3000
    # popularity dynamics
    z_profiles: int = 10
    alpha_min: float = 0.5
    alpha_max: float = 1.5
    stay_prob: float = 0.8
    permute_profiles: bool = True  # per-regime content orderings
    shared_regime_chain: bool = True  # one global switching state
    # delays and reward shaping
    d_f: float = 5.0
    d_a: float = 1.0
    mu1: float = 0.95
    mu2: float = 0.05
    phi: float = 3.0
    normalize_reward_rows: bool = False
    # learning
    gamma: float = 0.9
    learn_rate: float = 0.001
    buffer_capacity: int = 5000
    batch_size: int = 32
    target_sync_steps: int = 200
    aggregation_period: int = 20
    explore_start: float = 1.0
    explore_end: float = 0.05
    explore_decay_steps: int = 2000
    optimizer: str = "adam"
    trunk_widths: tuple = (128, 128)
    head_width: int = 64
    action_grid_extra: tuple = ()
    # baselines
    apcc_threshold: float | None = None  # None = 1/(4N)
    nucc_warmup_slots: int = 200
    # experiment plumbing
    schemes: tuple = ("federated", "centralized", "lfu", "apcc", "nucc")
    seeds: tuple = (1, 2, 3, 4, 5)
    convergence_window: float = 0.2
    smoothing_window: int = 50
    out_dir: str = "results"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        c = self
        if not 1 <= c.cache_size < c.n_contents:
            raise ConfigError(
                f"need 1 <= cache_size < n_contents, got "
                f"cache_size={c.cache_size}, n_contents={c.n_contents}")
        if c.k_faps < 1:
            raise ConfigError(f"k_faps must be >= 1, got {c.k_faps}")
        if c.requests_per_slot < c.k_faps:
            raise ConfigError(
                f"requests_per_slot={c.requests_per_slot} must be >= "
                f"k_faps={c.k_faps}")
        if c.total_slots < 1:
            raise ConfigError("total_slots must be >= 1")
        if c.z_profiles < 1:
            raise ConfigError("z_profiles must be >= 1")
        if not 0 <= c.alpha_min <= c.alpha_max:
            raise ConfigError(
                f"need 0 <= alpha_min <= alpha_max, got "
                f"[{c.alpha_min}, {c.alpha_max}]")
        if not 0 <= c.stay_prob <= 1:
            raise ConfigError(f"stay_prob must be in [0, 1], got {c.stay_prob}")
        try:
            self.delays()
            self.reward_params()
            self.hyperparams()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if c.aggregation_period < 1:
            raise ConfigError("aggregation_period must be >= 1")
        if c.target_sync_steps < c.aggregation_period:
            warnings.warn(
                f"target_sync_steps={c.target_sync_steps} is smaller than "
                f"aggregation_period={c.aggregation_period}; the recommended "
                "setting keeps the sync interval at least as long",
                stacklevel=2)
        for width in (*c.trunk_widths, c.head_width):
            if width < 1:
                raise ConfigError("network widths must be positive")
        for scheme in c.schemes:
            if scheme not in KNOWN_SCHEMES:
                raise ConfigError(
                    f"unknown scheme {scheme!r}; known: {', '.join(KNOWN_SCHEMES)}")
        if not c.schemes:
            raise ConfigError("schemes must not be empty")
        if not c.seeds:
            raise ConfigError("seeds must not be empty")
        if c.apcc_threshold is not None and c.apcc_threshold < 0:
            raise ConfigError("apcc_threshold must be >= 0")
        if c.nucc_warmup_slots < 0:
            raise ConfigError("nucc_warmup_slots must be >= 0")
        if not 0 < c.convergence_window <= 1:
            raise ConfigError("convergence_window must be in (0, 1]")
        if c.smoothing_window < 1:
            raise ConfigError("smoothing_window must be >= 1")

    # typed views consumed by the run loops
    def delays(self) -> Delays:
        return Delays(d_f=self.d_f, d_a=self.d_a)

    def reward_params(self) -> RewardParams:
        return RewardParams(mu1=self.mu1, mu2=self.mu2, phi=self.phi,
                            normalize_rows=self.normalize_reward_rows)

    def hyperparams(self) -> Hyperparams:
        return Hyperparams(
            gamma=self.gamma, learn_rate=self.learn_rate,
            batch_size=self.batch_size, buffer_capacity=self.buffer_capacity,
            target_sync_steps=self.target_sync_steps,
            explore_start=self.explore_start, explore_end=self.explore_end,
            explore_decay_steps=self.explore_decay_steps,
            optimizer=self.optimizer)

    def effective_apcc_threshold(self) -> float:
        if self.apcc_threshold is not None:
            return self.apcc_threshold
        return 1.0 / (4.0 * self.n_contents)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _field_types():
    hints = typing.get_type_hints(ExperimentConfig)
    return {f.name: hints[f.name] for f in dataclasses.fields(ExperimentConfig)}


_ELEMENT_TYPES = {
    "trunk_widths": int,
    "action_grid_extra": int,
    "seeds": int,
    "schemes": str,
}


def _parse_scalar(raw: str, typ, key: str):
    raw = raw.strip()
    if typ is int:
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"expected an integer for {key}, got {raw!r}") from None
    if typ is float:
        try:
            return float(raw)
        except ValueError:
            raise ValueError(f"expected a number for {key}, got {raw!r}") from None
    if typ is bool:
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"expected true/false for {key}, got {raw!r}")
    if typ is str:
        return raw
    raise ValueError(f"unsupported type for {key}")


def _parse_value(raw: str, key: str, typ):
    if typ is tuple or typing.get_origin(typ) is tuple:
        raw = raw.strip()
        if not raw:
            return ()
        elem = _ELEMENT_TYPES[key]
        return tuple(_parse_scalar(part, elem, key) for part in raw.split(","))
    if typ == typing.Optional[float] or typ == (float | None):
        if raw.strip().lower() in ("none", ""):
            return None
        return _parse_scalar(raw, float, key)
    return _parse_scalar(raw, key=key, typ=typ)


def parse_config(text: str) -> ExperimentConfig:
    """Parse the key=value config grammar; errors carry line numbers."""
    types = _field_types()
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not body.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header {body!r}")
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {body!r}")
        key, raw = body.split("=", 1)
        key = key.strip()
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _parse_value(raw, key, types[key])
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    try:
        return ExperimentConfig(**values)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(config: ExperimentConfig) -> str:
    """Render a config as text; ``parse_config`` round-trips it exactly."""
    lines = [f"{f.name} = {_format_value(getattr(config, f.name))}"
             for f in dataclasses.fields(ExperimentConfig)]
    return "\n".join(lines) + "\n"
