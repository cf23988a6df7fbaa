#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the dense-layer primitives on the shapes the Q-network actually uses
(single-state action selection and batch-32 training) plus an end-to-end
training step with either backend injected. Run after installing:

    python benchmarks/bench_kernels.py [--repeat 2000]
"""

import argparse
import time

import numpy as np

from fogcache.dqn import DuelingNet, Hyperparams, ReplayBuffer, Experience, \
    make_optimizer, td_step
from fogcache.kernels import native_or_none, pykernels

STATE_DIM = 101  # N=50 catalog
N_ACTIONS = 4
SHAPES = [
    ("select fwd", 1, STATE_DIM, 128),
    ("train fwd", 32, STATE_DIM, 128),
    ("trunk", 32, 128, 128),
    ("head", 32, 128, 64),
]


def it_per_sec(fn, repeat):
    fn()
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return repeat / (time.perf_counter() - t0)


def bench_primitives(backends, repeat):
    rng = np.random.default_rng(0)
    print(f"{'primitive':28s}" + "".join(f"{name:>14s}" for name, _ in backends)
          + f"{'speedup':>10s}")
    for label, m, n, p in SHAPES:
        x = rng.normal(size=(m, n))
        w = rng.normal(size=(n, p))
        b = rng.normal(size=p)
        dy = rng.normal(size=(m, p))
        for op, args in (("affine_relu", (x, w, b)),
                         ("affine_backward", (x, w, dy))):
            rates = [it_per_sec(lambda be=be, a=args: getattr(be, op)(*a),
                                repeat) for _, be in backends]
            ratio = rates[-1] / rates[0] if len(rates) > 1 else 1.0
            print(f"{label + ' ' + op:28s}"
                  + "".join(f"{r / 1e3:12.1f}k/s" for r in rates)
                  + f"{ratio:9.2f}x")


def bench_td_step(backends, repeat):
    print(f"\n{'end-to-end':28s}" + "".join(f"{name:>14s}"
                                            for name, _ in backends)
          + f"{'speedup':>10s}")
    rates = []
    for _, backend in backends:
        rng = np.random.default_rng(1)
        net = DuelingNet.create(STATE_DIM, N_ACTIONS, rng=rng,
                                kernels=backend)
        target = net.clone()
        hyper = Hyperparams()
        opt = make_optimizer("adam", net.params, hyper.learn_rate,
                             kernels=backend)
        buf = ReplayBuffer(256)
        for _ in range(64):
            buf.push(Experience(rng.normal(size=STATE_DIM),
                                int(rng.integers(N_ACTIONS)),
                                float(rng.normal()),
                                rng.normal(size=STATE_DIM)))
        sample_rng = np.random.default_rng(2)
        rates.append(it_per_sec(
            lambda: td_step(net, target, buf, hyper, opt, sample_rng),
            max(repeat // 10, 100)))
    ratio = rates[-1] / rates[0] if len(rates) > 1 else 1.0
    print(f"{'td_step batch 32':28s}"
          + "".join(f"{r / 1e3:12.2f}k/s" for r in rates)
          + f"{ratio:9.2f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3000)
    args = parser.parse_args()

    backends = [("python", pykernels)]
    native = native_or_none()
    if native is not None:
        backends.append(("native", native))
    else:
        print("note: compiled kernels not built; timing the fallback only\n")
    bench_primitives(backends, args.repeat)
    bench_td_step(backends, args.repeat)


if __name__ == "__main__":
    main()
