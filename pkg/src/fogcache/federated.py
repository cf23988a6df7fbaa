"""Federated training of the placement policy.

Each cache runs a dueling double-Q agent on its own *virtual* coded-caching
experience: per slot it epsilon-greedily picks a first-group size for its
local popularity, evaluates it by splitting its own requests into K virtual
queues, and trains on the delayed outcome (the reward of the action chosen at
slot t is realized by slot t+1's requests). Every ``aggregation_period``
slots the online parameters are averaged (weighted by the number of
experiences contributed) into the global model, which is then distributed
back so that online and target nets restart from the global parameters.

Execution is separate from training: the caching actually performed each slot
is the greedy argmax of the *global* model on the global popularity
observation, frozen between aggregation rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dqn import (DuelingNet, Experience, Hyperparams, ReplayBuffer,
                  epsilon_for_step, greedy_action, make_optimizer,
                  select_action, sync_target, td_step)
from .env import (ActionSpace, Delays, RewardParams, StepOutcome,
                  build_action_space, encode_state, global_step,
                  local_virtual_step, place_top_popular)
from .harness.records import MetricRecord
from .popularity import RegimePopularityEstimator, empirical_popularity
from .streams import (SEED_EXPLORE, SEED_NET_INIT, SEED_REPLAY,
                      RequestStream, build_request_stream, component_rng)


@dataclass(frozen=True)
class SlotDiagnostics:
    """What one trainer did during one slot."""

    epsilon: float
    action_index: int
    loss: float | None
    reward: float | None
    delay_ms: float | None
    synced_target: bool


@dataclass
class AgentTrainer:
    """One dueling-DDQN training unit, driven one slot at a time.

    ``virtual=True`` trains on the cache's own requests split into K virtual
    queues; ``virtual=False`` trains on the real rows of all K queues (the
    centralized agent). The unit owns its exploration and replay generators,
    so identical seeds and request streams reproduce identical parameter
    trajectories.
    """

    online: DuelingNet
    hyper: Hyperparams
    action_space: ActionSpace
    k_faps: int
    cache_size: int
    n_contents: int
    delays: Delays
    reward_params: RewardParams
    explore_rng: np.random.Generator
    replay_rng: np.random.Generator
    virtual: bool = True
    z_profiles: int = 1

    target: DuelingNet = field(init=False)
    buffer: ReplayBuffer = field(init=False)
    step_count: int = field(init=False, default=0)
    round_experiences: int = field(init=False, default=0)

    def __post_init__(self):
        self.target = self.online.clone()
        self.buffer = ReplayBuffer(self.hyper.buffer_capacity)
        self.optimizer = make_optimizer(self.hyper.optimizer,
                                        self.online.params,
                                        self.hyper.learn_rate,
                                        self.online.kernels)
        self._pending = None  # (state, action_index, decision popularity)
        self._estimator = None  # created on first slot (needs request count)
        self.last_estimate = None

    def observe_slot(self, requests) -> SlotDiagnostics:
        """Run one slot: complete the pending experience, act, train.

        ``requests`` is this cache's (V,) batch when virtual, or the full
        (K, V) matrix for the centralized agent. Both the state observation
        and the placement contents use the accumulated regime popularity
        (the recognized popularity state of the slot), which identifies the
        active regime far better than a single slot's raw frequencies.
        """
        requests = np.asarray(requests, dtype=np.int64)
        if self._estimator is None:
            self._estimator = RegimePopularityEstimator(
                self.z_profiles, samples_per_obs=requests.size)
        raw_pop = empirical_popularity(requests.ravel(), self.n_contents)
        estimate = self._estimator.update(raw_pop)
        self.last_estimate = estimate
        outcome = None
        if self._pending is None:
            # first slot: the "previous action" is the smallest candidate,
            # placed as if popularity were uniform
            placement0 = place_top_popular(
                self.action_space[0],
                np.full(self.n_contents, 1.0 / self.n_contents),
                self.k_faps, self.cache_size)
            state = encode_state(placement0, estimate)
        else:
            prev_state, prev_action, decision_pop = self._pending
            outcome = self._evaluate(requests, self.action_space[prev_action],
                                     decision_pop)
            state = encode_state(outcome.placement, estimate)
            self.buffer.push(Experience(prev_state, prev_action,
                                        outcome.reward, state))
            self.round_experiences += 1
        epsilon = epsilon_for_step(self.hyper, self.step_count)
        action = select_action(self.online, state, epsilon, self.explore_rng)
        self._pending = (state, action, estimate)
        loss = td_step(self.online, self.target, self.buffer, self.hyper,
                       self.optimizer, self.replay_rng)
        self.step_count += 1
        synced = self.step_count % self.hyper.target_sync_steps == 0
        if synced:
            sync_target(self.online, self.target)
        return SlotDiagnostics(
            epsilon=epsilon, action_index=action, loss=loss,
            reward=None if outcome is None else outcome.reward,
            delay_ms=None if outcome is None else outcome.delay_ms,
            synced_target=synced)

    def _evaluate(self, requests, n_cached, decision_pop) -> StepOutcome:
        if self.virtual:
            return local_virtual_step(requests, n_cached, decision_pop,
                                      self.k_faps, self.cache_size,
                                      self.delays, self.reward_params)
        return global_step(requests, n_cached, decision_pop,
                           self.cache_size, self.delays, self.reward_params)

    def load_global(self, global_net: DuelingNet) -> None:
        """Distribution step: online and target become the global model."""
        self.online.copy_from(global_net)
        self.target.copy_from(global_net)
        self.round_experiences = 0


def local_train_slot(trainer: AgentTrainer, slot_requests) -> SlotDiagnostics:
    """One local training slot (see :meth:`AgentTrainer.observe_slot`)."""
    return trainer.observe_slot(slot_requests)


class GreedyExecutor:
    """Executes the deployed placement policy, greedily and without learning.

    Holds a reference to the policy net (the global model), so aggregation
    updates take effect immediately; between updates the executed policy is
    frozen.
    """

    def __init__(self, policy: DuelingNet, action_space: ActionSpace,
                 k_faps: int, cache_size: int, n_contents: int,
                 delays: Delays, reward_params: RewardParams):
        self.policy = policy
        self.action_space = action_space
        self.k_faps = k_faps
        self.cache_size = cache_size
        self.n_contents = n_contents
        self.delays = delays
        self.reward_params = reward_params
        uniform = np.full(n_contents, 1.0 / n_contents)
        self._pending = (action_space[0], uniform)

    def serve_slot(self, all_requests, decision_pop) -> StepOutcome:
        """Serve one slot with the pending placement, then pick the next.

        ``decision_pop`` is the recognized global popularity state of the
        slot (mean of the caches' regime estimates); it both feeds the
        policy's state input and ranks the next placement's contents.
        """
        n_cached, pending_pop = self._pending
        outcome = global_step(all_requests, n_cached, pending_pop,
                              self.cache_size, self.delays,
                              self.reward_params)
        state = encode_state(outcome.placement, decision_pop)
        action = greedy_action(self.policy, state)
        self._pending = (self.action_space[action],
                         np.asarray(decision_pop, dtype=np.float64))
        return outcome


def aggregate(snapshots, weights) -> list:
    """Weighted elementwise mean of parameter snapshots.

    Computed in anchored form, theta_1 + sum_i w_i/W * (theta_i - theta_1),
    so aggregating identical snapshots (and the single-snapshot case) returns
    bitwise-identical parameters.
    """
    if len(snapshots) == 0:
        raise ValueError("no snapshots to aggregate")
    if len(weights) != len(snapshots):
        raise ValueError(f"{len(snapshots)} snapshots but {len(weights)} weights")
    weights = [float(w) for w in weights]
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    total = sum(weights)
    if total <= 0:
        raise ValueError("weights must not all be zero")
    anchor = snapshots[0]
    shapes = [a.shape for a in anchor]
    for snap in snapshots[1:]:
        if [a.shape for a in snap] != shapes:
            raise ValueError("snapshot shapes do not match")
    out = [np.array(a, dtype=np.float64) for a in anchor]
    for snap, w in zip(snapshots[1:], weights[1:]):
        frac = w / total
        if frac == 0.0:
            continue
        for acc, arr, base in zip(out, snap, anchor):
            acc += frac * (np.asarray(arr) - np.asarray(base))
    return out


def global_loss(local_losses, weights) -> float:
    """Data-size weighted mean of the local losses (diagnostic only)."""
    if len(local_losses) != len(weights):
        raise ValueError("losses and weights must have equal length")
    weights = [float(w) for w in weights]
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    total = sum(weights)
    if total <= 0:
        raise ValueError("weights must not all be zero")
    return sum(w * loss for w, loss in zip(weights, local_losses)) / total


@dataclass
class RunArtifacts:
    """Per-slot records plus the final model parameters of a run."""

    records: list
    checkpoints: dict


def run(config, seed: int, stream: RequestStream | None = None,
        scheme_name: str = "federated", slot_hook=None) -> RunArtifacts:
    """Run the full federated scheme for one seed.

    Per slot: serve the global placement (metrics), let every cache train one
    virtual slot, and on every ``aggregation_period``-th slot average the
    online parameters into the global model and redistribute it.
    ``slot_hook(t, global_net, trainers)``, when given, is called at the end
    of every slot (diagnostics only; must not mutate).
    """
    if stream is None:
        stream = build_request_stream(config, seed)
    k = config.k_faps
    n = config.n_contents
    action_space = build_action_space(k, config.cache_size, n,
                                      config.action_grid_extra)
    hyper = config.hyperparams()
    delays = config.delays()
    reward_params = config.reward_params()

    global_net = DuelingNet.create(
        2 * n + 1, len(action_space), trunk=config.trunk_widths,
        head=config.head_width,
        rng=component_rng(seed, SEED_NET_INIT, 0))
    trainers = [
        AgentTrainer(online=global_net.clone(), hyper=hyper,
                     action_space=action_space, k_faps=k,
                     cache_size=config.cache_size, n_contents=n,
                     delays=delays, reward_params=reward_params,
                     explore_rng=component_rng(seed, SEED_EXPLORE, fap),
                     replay_rng=component_rng(seed, SEED_REPLAY, fap),
                     virtual=True, z_profiles=config.z_profiles)
        for fap in range(1, k + 1)
    ]
    executor = GreedyExecutor(global_net, action_space, k, config.cache_size,
                              n, delays, reward_params)

    records = []
    for t in range(1, config.total_slots + 1):
        requests = stream.requests[t - 1]
        diags = [trainer.observe_slot(requests[i]) for i, trainer
                 in enumerate(trainers)]
        global_estimate = np.mean([tr.last_estimate for tr in trainers],
                                  axis=0)
        outcome = executor.serve_slot(requests, global_estimate)
        losses = [d.loss for d in diags if d.loss is not None]
        loss = global_loss(losses, [1.0] * len(losses)) if losses else math.nan
        records.append(MetricRecord(
            scheme=scheme_name, seed=seed, slot=t,
            delay_ms=outcome.delay_ms, hit_rate=outcome.hit_rate,
            caching_fraction=outcome.placement.caching_fraction,
            n_cached=outcome.placement.n_cached,
            reward=outcome.reward, loss=loss))
        if t % config.aggregation_period == 0:
            snapshots = [tr.online.params for tr in trainers]
            weights = [tr.round_experiences for tr in trainers]
            if sum(weights) == 0:  # degenerate first round at T_s=1
                weights = [1.0] * k
            new_params = aggregate(snapshots, weights)
            for dst, src in zip(global_net.params, new_params):
                np.copyto(dst, src)
            for trainer in trainers:
                trainer.load_global(global_net)
        if slot_hook is not None:
            slot_hook(t, global_net, trainers)

    checkpoints = {"global": [p.copy() for p in global_net.params]}
    for i, trainer in enumerate(trainers, start=1):
        checkpoints[f"local_{i}"] = [p.copy() for p in trainer.online.params]
    return RunArtifacts(records=records, checkpoints=checkpoints)
