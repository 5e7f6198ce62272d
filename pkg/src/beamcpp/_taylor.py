# Truncated Taylor arithmetic. A jet of order m is an array whose leading axis
# holds the coefficients c_k = f^(k)(t) / k!, k = 0..m; trailing axes are batch
# dimensions (and a final length-3 axis for vectors).
from math import factorial

import numpy as np


def from_derivatives(d):
    d = np.asarray(d, dtype=float)
    scale = np.array([1.0 / factorial(k) for k in range(d.shape[0])])
    return d * scale.reshape((-1,) + (1,) * (d.ndim - 1))


def to_derivatives(c):
    scale = np.array([float(factorial(k)) for k in range(c.shape[0])])
    return c * scale.reshape((-1,) + (1,) * (c.ndim - 1))


def mul(a, b):
    """Cauchy product; scalar jets broadcast against vector jets via a trailing axis."""
    m = min(a.shape[0], b.shape[0])
    out = np.zeros((m,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(m):
        for j in range(k + 1):
            out[k] += a[j] * b[k - j]
    return out


def scal(s):
    return s[..., None]


def dot(a, b):
    return mul(a, b).sum(axis=-1)


def cross(a, b):
    m = min(a.shape[0], b.shape[0])
    out = np.zeros((m,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(m):
        for j in range(k + 1):
            out[k] += np.cross(a[j], b[k - j])
    return out


def sqrt(a):
    out = np.zeros_like(a)
    out[0] = np.sqrt(a[0])
    for k in range(1, a.shape[0]):
        acc = a[k].copy()
        for j in range(1, k):
            acc -= out[j] * out[k - j]
        out[k] = acc / (2.0 * out[0])
    return out


def reciprocal(a):
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for k in range(1, a.shape[0]):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc += a[j] * out[k - j]
        out[k] = -acc * out[0]
    return out


def normalize(v):
    """Unit vector jet v/|v| and the jet of |v|."""
    norm = sqrt(dot(v, v))
    return mul(v, scal(reciprocal(norm))), norm
