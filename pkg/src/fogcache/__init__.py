"""fogcache: coded caching in fog radio access networks, with the placement
policy learned by federated deep reinforcement learning.

Building blocks: time-variant Zipf popularity (`popularity`), exact
coded-caching load/delay arithmetic (`coded_cache`), the placement decision
process (`env`), a from-scratch dueling double-Q learner (`dqn`), federated
training and execution (`federated`), benchmark schemes (`baselines`), and
the experiment harness (`harness`). The dense-layer hot path runs on a
compiled extension when available (`kernels.BACKEND`).
"""

from . import baselines, coded_cache, dqn, env, federated, harness, kernels
from . import popularity, streams

__version__ = "0.1.0"

__all__ = [
    "baselines", "coded_cache", "dqn", "env", "federated", "harness",
    "kernels", "popularity", "streams", "__version__",
]
