"""Per-slot metric records shared by every scheme runner."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MetricRecord:
    """One slot of one scheme under one seed.

    ``local_caching_gain`` is always hit_rate * caching_fraction; ``loss`` is
    NaN for schemes (or slots) without a training step.
    """

    scheme: str
    seed: int
    slot: int
    delay_ms: float
    hit_rate: float
    caching_fraction: float
    n_cached: int
    reward: float
    loss: float = math.nan

    @property
    def local_caching_gain(self) -> float:
        return self.hit_rate * self.caching_fraction


CSV_COLUMNS = ("scheme", "seed", "slot", "delay_ms", "hit_rate",
               "caching_fraction", "local_caching_gain", "n_cached",
               "reward", "loss")
