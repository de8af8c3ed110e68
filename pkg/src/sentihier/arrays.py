"""Dense float64 vector/matrix primitives used by every layer.

All functions accept and return numpy arrays of dtype float64. Inputs are
validated for shape, never mutated, and the returned arrays are fresh.
"""

import numpy as np

from .errors import ShapeError


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeError(f"expected a 1-d vector, got shape {v.shape}")
    return v


def as_matrix(x) -> np.ndarray:
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    return a @ b


def softmax(v) -> np.ndarray:
    """Numerically stable softmax via max-subtraction."""
    v = as_vector(v)
    if v.size == 0:
        raise ShapeError("softmax of an empty vector")
    shifted = v - np.max(v)
    e = np.exp(shifted)
    return e / np.sum(e)


def relu(v) -> np.ndarray:
    return np.maximum(np.asarray(v, dtype=np.float64), 0.0)


def relu_grad(v) -> np.ndarray:
    """Subgradient of relu; defined as 0 at exactly 0."""
    return (np.asarray(v, dtype=np.float64) > 0.0).astype(np.float64)


def sigmoid(v) -> np.ndarray:
    # Split by sign so exp never overflows.
    v = np.asarray(v, dtype=np.float64)
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out[~pos] = ev / (1.0 + ev)
    return out
