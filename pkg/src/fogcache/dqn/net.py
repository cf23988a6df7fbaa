"""From-scratch dueling Q-network on the kernel backend.

The network is a ReLU trunk feeding two heads: a scalar state value and one
advantage per action, combined as Q = V + (A - mean(A)). Parameters live in a
flat list of float64 arrays in a fixed order (trunk W/b pairs, then the value
head's four arrays, then the advantage head's four), which is also the
checkpoint layout. Backpropagation is analytic; a finite-difference checker
(`grad_check`) serves as its independent oracle.
"""

from __future__ import annotations

import math

import numpy as np

from .. import kernels as default_kernels


def _he_uniform(rng, fan_in, fan_out):
    limit = math.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class DuelingNet:
    """Dueling architecture with explicit parameters and analytic gradients."""

    def __init__(self, params, state_dim, n_actions, trunk_widths, head_width,
                 kernels=None):
        self.params = params
        self.state_dim = state_dim
        self.n_actions = n_actions
        self.trunk_widths = tuple(trunk_widths)
        self.head_width = head_width
        self.kernels = kernels if kernels is not None else default_kernels

    @classmethod
    def create(cls, state_dim, n_actions, trunk=(128, 128), head=64,
               rng=None, kernels=None):
        """Fresh network with He-uniform weights and zero biases."""
        if rng is None:
            rng = np.random.default_rng(0)
        params = []
        width = state_dim
        for out in trunk:
            params.append(_he_uniform(rng, width, out))
            params.append(np.zeros(out))
            width = out
        for head_out in (1, n_actions):  # value head then advantage head
            params.append(_he_uniform(rng, width, head))
            params.append(np.zeros(head))
            params.append(_he_uniform(rng, head, head_out))
            params.append(np.zeros(head_out))
        return cls(params, state_dim, n_actions, trunk, head, kernels)

    @classmethod
    def from_arrays(cls, arrays, kernels=None):
        """Rebuild a network from its canonical parameter list."""
        if len(arrays) < 8 or len(arrays) % 2 != 0:
            raise ValueError(f"malformed parameter list of length {len(arrays)}")
        n_trunk = (len(arrays) - 8) // 2
        trunk_widths = tuple(len(arrays[2 * i + 1]) for i in range(n_trunk))
        state_dim = arrays[0].shape[0]
        head_width = len(arrays[2 * n_trunk + 1])
        n_actions = len(arrays[-1])
        net = cls([np.array(a, dtype=np.float64) for a in arrays],
                  state_dim, n_actions, trunk_widths, head_width, kernels)
        expect = [p.shape for p in
                  cls.create(state_dim, n_actions, trunk_widths, head_width).params]
        if [p.shape for p in net.params] != expect:
            raise ValueError("parameter shapes do not form a dueling network")
        return net

    def clone(self):
        return DuelingNet([p.copy() for p in self.params], self.state_dim,
                          self.n_actions, self.trunk_widths, self.head_width,
                          self.kernels)

    def copy_from(self, other):
        """Overwrite parameters with bitwise copies of another net's."""
        for dst, src in zip(self.params, other.params):
            np.copyto(dst, src)

    def _split(self):
        n = 2 * len(self.trunk_widths)
        trunk = self.params[:n]
        wv1, bv1, wv2, bv2, wa1, ba1, wa2, ba2 = self.params[n:]
        return trunk, (wv1, bv1, wv2, bv2), (wa1, ba1, wa2, ba2)

    def forward(self, states):
        """Q-values; accepts a single state vector or a (batch, dim) matrix."""
        states = np.asarray(states, dtype=np.float64)
        single = states.ndim == 1
        q, _ = self.forward_cached(states[None, :] if single else states)
        return q[0] if single else q

    def forward_cached(self, states):
        """Batch forward pass keeping the activations needed for backward."""
        ker = self.kernels
        x = np.ascontiguousarray(states, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.state_dim:
            raise ValueError(
                f"expected states of dim {self.state_dim}, got shape {x.shape}")
        trunk, value, adv = self._split()
        acts = [x]
        for i in range(0, len(trunk), 2):
            acts.append(ker.affine_relu(acts[-1], trunk[i], trunk[i + 1]))
        h = acts[-1]
        hv = ker.affine_relu(h, value[0], value[1])
        val = ker.affine(hv, value[2], value[3])
        ha = ker.affine_relu(h, adv[0], adv[1])
        adv_out = ker.affine(ha, adv[2], adv[3])
        q = val + adv_out - adv_out.mean(axis=1, keepdims=True)
        cache = {"acts": acts, "hv": hv, "ha": ha, "val": val, "adv": adv_out}
        return q, cache

    def backward(self, cache, dq):
        """Gradients of sum(dq * Q) w.r.t. every parameter, in param order."""
        ker = self.kernels
        trunk, value, adv = self._split()
        acts = cache["acts"]
        h = acts[-1]
        n_act = self.n_actions
        dq = np.ascontiguousarray(dq)

        dval = np.ascontiguousarray(dq.sum(axis=1, keepdims=True))
        dadv = np.ascontiguousarray(dq - dq.sum(axis=1, keepdims=True) / n_act)

        dhv, dwv2, dbv2 = ker.affine_backward(cache["hv"], value[2], dval)
        dhv = ker.relu_grad(cache["hv"], dhv)
        dh_v, dwv1, dbv1 = ker.affine_backward(h, value[0], dhv)

        dha, dwa2, dba2 = ker.affine_backward(cache["ha"], adv[2], dadv)
        dha = ker.relu_grad(cache["ha"], dha)
        dh_a, dwa1, dba1 = ker.affine_backward(h, adv[0], dha)

        dh = dh_v + dh_a
        trunk_grads = []
        for i in range(len(trunk) - 2, -1, -2):
            dh = ker.relu_grad(acts[i // 2 + 1], dh)
            dh, dw, db = ker.affine_backward(acts[i // 2], trunk[i], dh)
            trunk_grads.append(db)
            trunk_grads.append(dw)
        trunk_grads.reverse()
        return trunk_grads + [dwv1, dbv1, dwv2, dbv2, dwa1, dba1, dwa2, dba2]


class Adam:
    """Bias-corrected Adam over a parameter list."""

    def __init__(self, params, learn_rate, beta1=0.9, beta2=0.999, eps=1e-8,
                 kernels=None):
        self.learn_rate = learn_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.kernels = kernels if kernels is not None else default_kernels

    def step(self, params, grads):
        self.t += 1
        for p, g, m, v in zip(params, grads, self.m, self.v):
            self.kernels.adam_step(p.reshape(-1), g.reshape(-1),
                                   m.reshape(-1), v.reshape(-1), self.t,
                                   self.learn_rate, self.beta1, self.beta2,
                                   self.eps)


class SGD:
    """Plain gradient descent over a parameter list."""

    def __init__(self, params, learn_rate, kernels=None):
        self.learn_rate = learn_rate
        self.kernels = kernels if kernels is not None else default_kernels

    def step(self, params, grads):
        for p, g in zip(params, grads):
            self.kernels.sgd_step(p.reshape(-1), g.reshape(-1), self.learn_rate)


def make_optimizer(name, params, learn_rate, kernels=None):
    if name == "adam":
        return Adam(params, learn_rate, kernels=kernels)
    if name == "sgd":
        return SGD(params, learn_rate, kernels=kernels)
    raise ValueError(f"unknown optimizer {name!r}")


def batch_td_loss(net, states, actions, targets):
    """Mean squared TD error and its parameter gradients for one batch."""
    q, cache = net.forward_cached(states)
    rows = np.arange(len(actions))
    td = q[rows, actions] - targets
    loss = float(np.mean(td * td))
    dq = np.zeros_like(q)
    dq[rows, actions] = 2.0 * td / len(actions)
    return loss, net.backward(cache, dq)


def grad_check(net, states, actions, targets, h=1e-5):
    """Max relative error of analytic gradients vs central finite differences.

    Perturbs every parameter element by +/-h; intended for small nets only
    (cost is two forward passes per element).
    """
    _, grads = batch_td_loss(net, states, actions, targets)

    def loss_only():
        q, _ = net.forward_cached(states)
        td = q[np.arange(len(actions)), actions] - targets
        return float(np.mean(td * td))

    worst = 0.0
    for p, g in zip(net.params, grads):
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + h
            up = loss_only()
            flat_p[i] = orig - h
            down = loss_only()
            flat_p[i] = orig
            numeric = (up - down) / (2.0 * h)
            denom = max(abs(flat_g[i]), abs(numeric), 1e-8)
            worst = max(worst, abs(flat_g[i] - numeric) / denom)
    return worst
