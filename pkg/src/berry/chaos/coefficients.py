"""Chaos coefficients of the Dirac mass, the Euclidean norm and the Jacobian.

``beta_l(z) = gamma(z) H_l(z) / l!``

``alpha_{n,m} = (2 pi n! m!)^{-1} int sqrt(y^2 + z^2) H_n(y) H_m(z) e^{-(y^2+z^2)/2}``

``zeta_{a,b,c,d} = E[|X W - Y Z| H_a(X) H_b(Y) H_c(Z) H_d(W)] / (a! b! c! d!)``

In the last one ``(X, Y, Z, W)`` plays the role of
``(d1 B, d2 B, d1 B_hat, d2 B_hat)`` so ``XW - YZ`` is the Jacobian
determinant of the complex wave.
"""
from functools import lru_cache
from math import factorial, sqrt, pi

import numpy as np
from scipy.special import roots_genlaguerre
from scipy.stats import norm, qmc

from ..errors import InvalidArgumentError
from .hermite import gaussian_density, hermite, hermite_table

_S2PI = sqrt(2.0 * pi)

ALPHA_TABLE = {
    (0, 0): _S2PI / 2,
    (2, 0): _S2PI / 8,
    (0, 2): _S2PI / 8,
    (4, 0): -_S2PI / 128,
    (0, 4): -_S2PI / 128,
    (2, 2): -_S2PI / 64,
}

ZETA_TABLE = {
    (0, 0, 0, 0): 1.0,
    (2, 0, 0, 0): 0.25, (0, 2, 0, 0): 0.25, (0, 0, 2, 0): 0.25, (0, 0, 0, 2): 0.25,
    (1, 1, 1, 1): -3 / 8,
    (2, 2, 0, 0): -1 / 32, (0, 0, 2, 2): -1 / 32,
    (2, 0, 2, 0): -1 / 32, (0, 2, 0, 2): -1 / 32,
    (2, 0, 0, 2): 5 / 32, (0, 2, 2, 0): 5 / 32,
    (4, 0, 0, 0): -3 / 192, (0, 4, 0, 0): -3 / 192, (0, 0, 4, 0): -3 / 192, (0, 0, 0, 4): -3 / 192,
}

ZETA_POINTS = 10 ** 7
_ZETA_BATCH = 2 ** 20


def _check_indices(*idx):
    for i in idx:
        if int(i) != i or i < 0:
            raise InvalidArgumentError(f"indices must be non-negative integers, got {idx!r}")


def beta_coeff(l, z=0.0):
    """``gamma(z) H_l(z) / l!``, the chaos coefficients of the Dirac mass at ``z``."""
    _check_indices(l)
    return gaussian_density(z) * hermite(l, z) / factorial(int(l))


def alpha_quadrature(n, m, nodes=64):
    """Polar product rule for ``alpha_{n,m}``.

    With ``t = rho^2 / 2`` the radial integral has weight ``t^{1/2} e^{-t}``
    and a polynomial integrand, so generalized Gauss-Laguerre is exact; the
    angular integrand is a trigonometric polynomial, integrated exactly by
    the periodic trapezoid rule.  Cartesian Gauss-Hermite converges slowly
    here because the norm has a kink at the origin.
    """
    _check_indices(n, m)
    t, w = roots_genlaguerre(nodes, 0.5)
    rho = np.sqrt(2.0 * t)
    phi = 2.0 * pi * np.arange(nodes) / nodes
    y = rho[:, None] * np.cos(phi)[None, :]
    z = rho[:, None] * np.sin(phi)[None, :]
    f = hermite(n, y) * hermite(m, z)
    # rho d rho = dt and the extra rho = sqrt(2 t) = sqrt(2) t^{1/2}
    val = np.sqrt(2.0) * (w[:, None] * f).sum() * (2.0 * pi / nodes)
    return val / (2.0 * pi * factorial(n) * factorial(m))


def alpha_coeff(n, m, method="auto"):
    """``alpha_{n,m}``; zero when ``n`` or ``m`` is odd."""
    _check_indices(n, m)
    if n % 2 or m % 2:
        return 0.0
    if method == "auto" and (n, m) in ALPHA_TABLE:
        return ALPHA_TABLE[(n, m)]
    return float(alpha_quadrature(n, m))


def _same_parity(idx):
    return len({i % 2 for i in idx}) == 1


def zeta_quadrature(entries, points=ZETA_POINTS, seed=20190601):
    """Quasi-Monte Carlo estimates of several ``zeta`` entries at once.

    Independent scrambles of a 4D Sobol sequence (batches of ``2^20``) are
    mapped to Gaussians; the spread of batch means gives the standard error.

    Returns
    -------
    dict
        ``{(a, b, c, d): (value, standard_error)}``
    """
    entries = [tuple(int(i) for i in e) for e in entries]
    for e in entries:
        if len(e) != 4:
            raise InvalidArgumentError("zeta entries have four indices")
        _check_indices(*e)
    deg = max(max(e) for e in entries)
    nbatch = max(2, int(np.ceil(points / _ZETA_BATCH)))
    ss = np.random.SeedSequence(seed)
    means = np.zeros((nbatch, len(entries)))
    norms = np.array([float(np.prod([factorial(i) for i in e])) for e in entries])
    for b, child in enumerate(ss.spawn(nbatch)):
        u = qmc.Sobol(4, scramble=True, seed=np.random.default_rng(child)).random(_ZETA_BATCH)
        g = norm.ppf(u)
        X, Y, Z, W = g.T
        det = np.abs(X * W - Y * Z)
        H = [hermite_table(deg, v) for v in (X, Y, Z, W)]
        for k, (a, bb, c, d) in enumerate(entries):
            means[b, k] = np.mean(det * H[0][a] * H[1][bb] * H[2][c] * H[3][d])
    val = means.mean(0) / norms
    se = means.std(0, ddof=1) / np.sqrt(nbatch) / norms
    return {e: (float(v), float(s)) for e, v, s in zip(entries, val, se)}


@lru_cache(maxsize=None)
def _zeta_cached(a, b, c, d):
    return zeta_quadrature([(a, b, c, d)])[(a, b, c, d)]


def zeta_coeff(a, b, c, d, method="auto", with_error=False):
    """``zeta_{a,b,c,d}``; zero unless all four indices share a parity.

    ``method="auto"`` uses the closed-form table when the entry is listed
    and quasi-MC otherwise.  ``with_error=True`` also returns the standard
    error (zero for tabulated or vanishing entries).
    """
    _check_indices(a, b, c, d)
    key = (int(a), int(b), int(c), int(d))
    if not _same_parity(key):
        out = (0.0, 0.0)
    elif method == "auto" and key in ZETA_TABLE:
        out = (ZETA_TABLE[key], 0.0)
    else:
        out = _zeta_cached(*key)
    return out if with_error else out[0]
