"""Dueling double deep Q-learning, implemented from scratch on numpy/Cython."""

from .checkpoint import load_params, save_params
from .learn import (Hyperparams, double_q_target, epsilon_for_step,
                    greedy_action, select_action, sync_target, td_step)
from .net import Adam, DuelingNet, SGD, batch_td_loss, grad_check, make_optimizer
from .replay import Experience, ReplayBuffer

__all__ = [
    "Adam", "DuelingNet", "Experience", "Hyperparams", "ReplayBuffer", "SGD",
    "batch_td_loss", "double_q_target", "epsilon_for_step", "grad_check",
    "greedy_action", "load_params", "make_optimizer", "save_params",
    "select_action", "sync_target", "td_step",
]
