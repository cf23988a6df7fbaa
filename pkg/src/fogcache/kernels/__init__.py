"""Dense-layer kernel backend, selected at import time.

The compiled extension (``_ckernels``) is preferred when present; otherwise
the numpy fallback (``pykernels``) is used. Set ``FOGCACHE_KERNELS=python``
to force the fallback, or ``FOGCACHE_KERNELS=native`` to require the
extension (ImportError if it was not built).

Both backends expose the same functions on float64 C-contiguous arrays:

    affine(x, w, b)            -> y = x @ w + b
    affine_relu(x, w, b)       -> max(x @ w + b, 0)
    relu_grad(act, dy)         -> dy masked where act == 0
    affine_backward(x, w, dy)  -> (dx, dw, db)
    adam_step(p, g, m, v, t, lr, beta1, beta2, eps)   (in place)
    sgd_step(p, g, lr)                                (in place)
"""

import os

from . import pykernels


def _select():
    choice = os.environ.get("FOGCACHE_KERNELS", "auto").strip().lower()
    if choice == "python":
        return pykernels
    try:
        from . import _ckernels
        return _ckernels
    except ImportError:
        if choice == "native":
            raise ImportError(
                "FOGCACHE_KERNELS=native but the compiled extension is not "
                "available; reinstall the package with a C compiler present"
            ) from None
        return pykernels


_impl = _select()

BACKEND = _impl.NAME
affine = _impl.affine
affine_relu = _impl.affine_relu
relu_grad = _impl.relu_grad
affine_backward = _impl.affine_backward
adam_step = _impl.adam_step
sgd_step = _impl.sgd_step


def native_or_none():
    """The compiled backend module, or None when it is not built."""
    try:
        from . import _ckernels
        return _ckernels
    except ImportError:
        return None
