"""Pure numpy kernel sums (fallback when the compiled core is unavailable)."""

import numpy as np

_CHUNK = 1 << 16


def kernel_sums(targets, nodes, weights, power, with_grad):
    m, d = targets.shape
    values = np.zeros(m)
    grads = np.zeros((m, d)) if with_grad else None
    for i in range(m):
        x = targets[i]
        partial = []
        gpartial = []
        for start in range(0, len(nodes), _CHUNK):
            diff = x - nodes[start:start + _CHUNK]
            r2 = np.einsum("ij,ij->i", diff, diff)
            inv = 1.0 / np.sqrt(r2)
            term = weights[start:start + _CHUNK] * inv**power
            partial.append(term.sum())
            if with_grad:
                gpartial.append((-power * term * inv * inv) @ diff)
        values[i] = sum(partial)
        if with_grad:
            grads[i] = np.sum(gpartial, axis=0)
    return values, grads
