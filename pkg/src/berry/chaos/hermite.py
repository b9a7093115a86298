"""Probabilists' Hermite polynomials and the standard Gaussian density."""
import numpy as np

from ..errors import InvalidArgumentError


def gaussian_density(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)


def hermite(n, x):
    """``H_n(x)`` via ``H_{n+1} = x H_n - n H_{n-1}``."""
    if int(n) != n or n < 0:
        raise InvalidArgumentError(f"Hermite degree must be a non-negative integer, got {n!r}")
    x = np.asarray(x, dtype=float)
    h0 = np.ones_like(x)
    if n == 0:
        return h0 if h0.ndim else float(h0)
    h1 = x.copy()
    for j in range(1, int(n)):
        h0, h1 = h1, x * h1 - j * h0
    return h1 if h1.ndim else float(h1)


def hermite_table(nmax, x):
    """Stack ``H_0(x) .. H_nmax(x)`` along a new leading axis."""
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x
    for j in range(1, nmax):
        out[j + 1] = x * out[j] - j * out[j - 1]
    return out
