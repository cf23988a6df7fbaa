"""Pure-numpy implementations of the dense-layer kernels.

Fallback backend used when the compiled extension is unavailable (or when
``FOGCACHE_KERNELS=python``). Signatures mirror ``_ckernels`` exactly; all
arrays are C-contiguous float64.
"""

import numpy as np

NAME = "python"


def affine(x, w, b):
    """y = x @ w + b for a batch of rows."""
    return x @ w + b


def affine_relu(x, w, b):
    """y = max(x @ w + b, 0)."""
    out = x @ w + b
    np.maximum(out, 0.0, out=out)
    return out


def relu_grad(act, dy):
    """Mask the incoming gradient where the activation was clipped to 0."""
    return np.where(act > 0.0, dy, 0.0)


def affine_backward(x, w, dy):
    """Gradients of an affine layer: returns (dx, dw, db)."""
    return dy @ w.T, x.T @ dy, dy.sum(axis=0)


def adam_step(p, g, m, v, t, lr, beta1, beta2, eps):
    """One bias-corrected Adam update, in place on p, m, v (1-D views)."""
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * g * g
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    p -= lr * m_hat / (np.sqrt(v_hat) + eps)


def sgd_step(p, g, lr):
    """Plain gradient step, in place on p (1-D view)."""
    p -= lr * g
