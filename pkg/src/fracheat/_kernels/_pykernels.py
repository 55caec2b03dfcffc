"""Pure numpy implementations of the hot kernels.

Signatures and results match the compiled module ``_ckernels`` exactly up to
floating point reassociation; the test suite checks both against each other.
"""

import numpy as np


def weighted_power_sum(stack, weights, q):
    """Return ``sum_k w_k |stack[k]|^q`` along axis 0, or ``max_k w_k |stack[k]|`` for q = inf.

    ``stack`` is a nonnegative real array of shape (K, P).
    """
    stack = np.asarray(stack, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if np.isinf(q):
        return np.max(weights[:, None] * stack, axis=0)
    out = np.zeros(stack.shape[1])
    for k in range(stack.shape[0]):
        out += weights[k] * stack[k] ** q
    return out


def duhamel_trapezoid(decay, source, h):
    """Trapezoid Duhamel sums on a uniform time grid.

    For nodes ``tau_j = j h`` (j = 0..M) returns ``S`` with

        S_i = h * (0.5 E^i N_0 + sum_{0<j<i} E^{i-j} N_j + 0.5 N_i),

    where ``E = decay`` is the per-step multiplier ``exp(-h |xi|^{2 alpha})``
    and ``N = source`` has shape (M+1, P).
    """
    decay = np.asarray(decay, dtype=float)
    source = np.asarray(source, dtype=complex)
    out = np.empty_like(source)
    acc = 0.5 * source[0]
    out[0] = 0.0
    for i in range(1, source.shape[0]):
        acc = decay * acc + source[i]
        out[i] = h * (acc - 0.5 * source[i])
    return out


def smooth_transition(r, a, b):
    """C-infinity step: 1 for r <= a, 0 for r >= b, built from exp(-1/x)."""
    r = np.asarray(r, dtype=float)
    u = (r - a) / (b - a)
    left = np.where(u < 1.0, np.exp(-1.0 / np.maximum(1.0 - u, 1e-300)), 0.0)
    right = np.where(u > 0.0, np.exp(-1.0 / np.maximum(u, 1e-300)), 0.0)
    out = left / (left + right)
    out = np.where(u <= 0.0, 1.0, out)
    return np.where(u >= 1.0, 0.0, out)
