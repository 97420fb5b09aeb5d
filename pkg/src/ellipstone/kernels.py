"""Backend selection for the Newtonian kernel sums.

The compiled extension ``_kernels`` is used when it imports; otherwise, or
when the environment variable ``ELLIPSTONE_PURE_PYTHON`` is set to a
non-empty value other than ``0``, the numpy implementation is used.
"""

import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and os.environ.get("ELLIPSTONE_PURE_PYTHON", "0") in ("", "0"):
    _impl = _compiled
    BACKEND = "compiled"
else:
    _impl = _kernels_py
    BACKEND = "python"


def available_backends():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def kernel_sums(targets, nodes, weights, power, with_grad=False, backend=None):
    """Sum over nodes of w_j |x - y_j|^(-power) for each target x.

    Returns ``(values, grads)``; ``grads`` holds the x-gradients (or None).
    """
    impl = _impl
    if backend == "python":
        impl = _kernels_py
    elif backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel backend is not built")
        impl = _compiled
    targets = np.ascontiguousarray(np.atleast_2d(targets), dtype=float)
    nodes = np.ascontiguousarray(nodes, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    return impl.kernel_sums(targets, nodes, weights, int(power), bool(with_grad))
