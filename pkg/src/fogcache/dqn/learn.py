"""Action selection, double-Q targets, and the training step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .net import batch_td_loss


@dataclass(frozen=True)
class Hyperparams:
    """Training knobs shared by every agent."""

    gamma: float = 0.9
    learn_rate: float = 0.001
    batch_size: int = 32
    buffer_capacity: int = 5000
    target_sync_steps: int = 200
    explore_start: float = 1.0
    explore_end: float = 0.05
    explore_decay_steps: int = 2000
    optimizer: str = "adam"

    def __post_init__(self):
        if not 0 <= self.gamma <= 1:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.learn_rate <= 0:
            raise ValueError(f"learn_rate must be positive, got {self.learn_rate}")
        if self.batch_size > self.buffer_capacity:
            raise ValueError("batch_size cannot exceed buffer_capacity")
        if self.target_sync_steps < 1:
            raise ValueError("target_sync_steps must be >= 1")
        for eps in (self.explore_start, self.explore_end):
            if not 0 <= eps <= 1:
                raise ValueError(f"exploration rates must be in [0, 1], got {eps}")
        if self.explore_decay_steps < 1:
            raise ValueError("explore_decay_steps must be >= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


def epsilon_for_step(hyper: Hyperparams, step: int) -> float:
    """Linear decay from explore_start to explore_end, then constant."""
    frac = min(max(step, 0) / hyper.explore_decay_steps, 1.0)
    return hyper.explore_start + frac * (hyper.explore_end - hyper.explore_start)


def select_action(net, state, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy pick; greedy ties resolve to the lowest action index."""
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    if epsilon > 0 and rng.random() < epsilon:
        return int(rng.integers(0, net.n_actions))
    return int(np.argmax(net.forward(state)))


def greedy_action(net, state) -> int:
    return int(np.argmax(net.forward(state)))


def double_q_target(reward: float, next_state, online, target,
                    gamma: float) -> float:
    """Y = r + gamma * Q_target(s', argmax_a Q_online(s', a)).

    The online net picks the action, the target net values it; the task is
    continuing, so the bootstrap term is always present.
    """
    a_star = int(np.argmax(online.forward(next_state)))
    return reward + gamma * float(target.forward(next_state)[a_star])


def _double_q_targets_batch(rewards, next_states, online, target, gamma):
    q_online = online.forward(next_states)
    a_star = np.argmax(q_online, axis=1)
    q_target = target.forward(next_states)
    return rewards + gamma * q_target[np.arange(len(rewards)), a_star]


def sync_target(online, target) -> None:
    """Make the target net a bitwise copy of the online net."""
    target.copy_from(online)


def td_step(net, target, buffer, hyper: Hyperparams, optimizer,
            rng: np.random.Generator):
    """One minibatch update of the online net; returns the pre-step loss.

    Returns None (and changes nothing) while the buffer holds fewer than
    ``batch_size`` experiences.
    """
    if len(buffer) < hyper.batch_size:
        return None
    states, actions, rewards, next_states = buffer.sample(hyper.batch_size, rng)
    targets = _double_q_targets_batch(rewards, next_states, net, target,
                                      hyper.gamma)
    loss, grads = batch_td_loss(net, states, actions, targets)
    optimizer.step(net.params, grads)
    return loss
