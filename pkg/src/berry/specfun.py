"""Bessel functions of low order and the covariance kernels of the random wave.

The random wave ``B`` has covariance ``r(x, y) = J0(k |x - y|)`` with
``k = 2 pi sqrt(E)``.  Derivative kernels follow by differentiating ``r``;
the normalized versions divide every gradient by ``sqrt(2 pi^2 E)`` so that
all entries are correlations.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError

SERIES_CUTOFF = 12.0
HANKEL_TERMS = 6
ZERO_DISPLACEMENT = 1e-14

_SERIES_TERMS = 60


def _series(n, u):
    half = 0.5 * u
    q = -half * half
    term = np.ones_like(u)
    for j in range(1, n + 1):
        term = term * half / j
    total = term.copy()
    for m in range(1, _SERIES_TERMS):
        term = term * q / (m * (m + n))
        total += term
    return total


def _hankel(n, u):
    mu = 4.0 * n * n
    a = [1.0]
    for j in range(1, 2 * HANKEL_TERMS + 2):
        a.append(a[-1] * (mu - (2 * j - 1) ** 2) / (8.0 * j))
    inv = 1.0 / u
    inv2 = inv * inv
    p = np.zeros_like(u)
    q = np.zeros_like(u)
    # Horner in 1/u^2, highest order first
    for j in range(HANKEL_TERMS, -1, -1):
        p = p * inv2 + (-1) ** j * a[2 * j]
        q = q * inv2 + (-1) ** j * a[2 * j + 1]
    q = q * inv
    chi = u - (0.5 * n + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * u)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(n, u):
    """Bessel function of the first kind, order 0, 1 or 2.

    Power series for ``|u| <= 12`` and the Hankel expansion with six
    correction terms beyond.  Absolute error is below 1e-10 on ``|u| <= 1e4``.

    Parameters
    ----------
    n : int
        Order in {0, 1, 2}.
    u : float or array_like
        Argument.

    Returns
    -------
    float or ndarray
    """
    if n not in (0, 1, 2):
        raise InvalidArgumentError(f"order must be 0, 1 or 2, got {n!r}")
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise InvalidArgumentError("argument must be finite")
    a = np.abs(u)
    out = np.empty_like(a)
    small = a <= SERIES_CUTOFF
    if np.any(small):
        out[small] = _series(n, a[small])
    if np.any(~small):
        out[~small] = _hankel(n, a[~small])
    if n % 2 == 1:
        out = np.where(u < 0, -out, out)
    return float(out) if scalar else out


def bessel_jn_all(nmax, u):
    """Return ``J_0 .. J_nmax`` at ``u`` via Miller's backward recurrence.

    Output has shape ``(nmax + 1,) + u.shape``.  Used by the Bessel-series
    sampler, which needs many integer orders at once.
    """
    u = np.asarray(u, dtype=float)
    if nmax < 0:
        raise InvalidArgumentError("nmax must be non-negative")
    flat = np.abs(u).ravel()
    out = np.zeros((nmax + 1, flat.size))
    zero = flat < 1e-300
    x = np.where(zero, 1.0, flat)
    umax = float(x.max()) if x.size else 0.0
    start = int(max(nmax, umax) + 30 + 10 * np.sqrt(max(nmax, umax) + 1))
    start += start % 2
    jp1 = np.zeros_like(x)
    j = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    for m in range(start, 0, -1):
        jm1 = (2.0 * m / x) * j - jp1
        if m <= nmax:
            out[m] = j
        if m % 2 == 0:
            norm += 2.0 * j
        jp1, j = j, jm1
        big = np.abs(j) > 1e250
        if np.any(big):
            s = np.where(big, 1e-250, 1.0)
            j *= s
            jp1 *= s
            norm *= s
            out[: nmax + 1] *= s
    out[0] = j
    norm += j
    out /= norm
    out[:, zero] = 0.0
    out[0, zero] = 1.0
    sign = np.where(u.ravel() < 0, -1.0, 1.0)
    odd = np.arange(nmax + 1) % 2 == 1
    out[odd] *= sign
    return out.reshape((nmax + 1,) + u.shape)


def wavenumber(E):
    if not E > 0:
        raise InvalidArgumentError(f"energy must be positive, got {E!r}")
    return 2.0 * np.pi * np.sqrt(E)


def _displacement(dx):
    dx = np.asarray(dx, dtype=float)
    if dx.shape[-1] != 2:
        raise InvalidArgumentError("displacement must have a trailing axis of length 2")
    if not np.all(np.isfinite(dx)):
        raise InvalidArgumentError("displacement must be finite")
    return dx


def kernel_arrays(E, dx, normalized=False):
    """Signed cross-covariance matrix of ``(B, d1 B, d2 B)`` at ``x`` and ``y``.

    ``R[k][l] = E[X_k(x) X_l(y)]`` with ``X = (B, d1 B, d2 B)`` and
    ``dx = x - y``.  Vectorized over leading axes of ``dx``.  With
    ``normalized=True`` gradients are divided by ``sqrt(2 pi^2 E)``.

    Returns an array of shape ``(3, 3) + dx.shape[:-1]``.
    """
    dx = _displacement(dx)
    k = wavenumber(E)
    d = np.hypot(dx[..., 0], dx[..., 1])
    tiny = d < ZERO_DISPLACEMENT
    safe = np.where(tiny, 1.0, d)
    n1 = np.where(tiny, 0.0, dx[..., 0] / safe)
    n2 = np.where(tiny, 0.0, dx[..., 1] / safe)
    kd = np.where(tiny, 0.0, k * d)
    j0 = bessel_j(0, kd)
    j1 = bessel_j(1, kd)
    j2 = bessel_j(2, kd)
    R = np.empty((3, 3) + d.shape)
    R[0, 0] = j0
    if normalized:
        s = np.sqrt(2.0)
        R[0, 1] = s * n1 * j1
        R[0, 2] = s * n2 * j1
        R[1, 1] = j0 + (1.0 - 2.0 * n1 * n1) * j2
        R[2, 2] = j0 + (1.0 - 2.0 * n2 * n2) * j2
        R[1, 2] = -2.0 * n1 * n2 * j2
    else:
        c = 2.0 * np.pi ** 2 * E
        R[0, 1] = k * n1 * j1
        R[0, 2] = k * n2 * j1
        R[1, 1] = c * (j0 + (1.0 - 2.0 * n1 * n1) * j2)
        R[2, 2] = c * (j0 + (1.0 - 2.0 * n2 * n2) * j2)
        R[1, 2] = -2.0 * c * n1 * n2 * j2
    # at zero displacement the j2 terms vanish and the diagonal is exact
    R[1, 0] = -R[0, 1]
    R[2, 0] = -R[0, 2]
    R[2, 1] = R[1, 2]
    return R


def kernel_r(i, j, E, dx):
    """Single kernel entry ``r_{i,j}(x - y)``; index 0 is the field, 1-2 gradients."""
    if i not in (0, 1, 2) or j not in (0, 1, 2):
        raise InvalidArgumentError("kernel indices must be in {0, 1, 2}")
    R = kernel_arrays(E, dx)
    out = R[i, j]
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class KernelSet:
    """All covariance kernels at one displacement.

    ``r`` is the field covariance, ``r0`` the pair ``(r_{0,1}, r_{0,2})``,
    ``rij`` the 2x2 gradient block, ``rtilde`` the signed normalized 3x3
    cross matrix and ``sigma`` the 6x6 covariance of
    ``(B(x), B(y), d1 B(x), d2 B(x), d1 B(y), d2 B(y))``.
    """

    E: float
    dx: tuple
    r: float
    r0: np.ndarray
    rij: np.ndarray
    rtilde: np.ndarray
    sigma: np.ndarray

    def is_psd(self):
        eps = 1e-9 * (1.0 + 2.0 * np.pi ** 2 * self.E)
        return bool(np.linalg.eigvalsh(self.sigma).min() >= -eps)


def kernel_set(E, dx):
    dx = _displacement(dx)
    if dx.shape != (2,):
        raise InvalidArgumentError("kernel_set takes a single displacement")
    R = kernel_arrays(E, dx)
    Rn = kernel_arrays(E, dx, normalized=True)
    c = 2.0 * np.pi ** 2 * E
    r = R[0, 0]
    r01, r02 = R[0, 1], R[0, 2]
    sigma = np.zeros((6, 6))
    sigma[0, 0] = sigma[1, 1] = 1.0
    sigma[0, 1] = sigma[1, 0] = r
    sigma[2:4, 2:4] = c * np.eye(2)
    sigma[4:6, 4:6] = c * np.eye(2)
    sigma[0, 4:6] = (r01, r02)
    sigma[1, 2:4] = (-r01, -r02)
    sigma[2:4, 4:6] = R[1:3, 1:3]
    sigma = np.triu(sigma) + np.triu(sigma, 1).T
    return KernelSet(
        E=float(E), dx=(float(dx[0]), float(dx[1])), r=float(r),
        r0=np.array([r01, r02]), rij=np.array(R[1:3, 1:3]),
        rtilde=np.array(Rn), sigma=sigma,
    )


# leading-order asymptotics: r_tilde ~ h(theta) g(phi) with
# g(phi) = cos(2 pi sqrt(E) phi - pi/4 - shift) / (pi sqrt(sqrt(E) phi))
_LEADING = {
    "r": (lambda t: np.ones_like(t), 0.0),
    "r01": (lambda t: np.sqrt(2.0) * np.cos(t), np.pi / 2),
    "r02": (lambda t: np.sqrt(2.0) * np.sin(t), np.pi / 2),
    "r11": (lambda t: 2.0 * np.cos(t) ** 2, 0.0),
    "r22": (lambda t: 2.0 * np.sin(t) ** 2, 0.0),
    "r12": (lambda t: 2.0 * np.cos(t) * np.sin(t), 0.0),
}


@dataclass(frozen=True)
class AsymptoticForm:
    kind: str
    E: float
    h: Callable
    phase_shift: float

    def g(self, phi):
        phi = np.asarray(phi, dtype=float)
        s = np.sqrt(self.E)
        return np.cos(2.0 * np.pi * s * phi - np.pi / 4 - self.phase_shift) / (np.pi * np.sqrt(s * phi))

    def __call__(self, phi, theta):
        return self.h(np.asarray(theta, dtype=float)) * self.g(phi)


def asymptotic_leading(kind, E, phi=None, theta=None):
    """Leading term of a normalized kernel for large ``sqrt(E) phi``.

    ``kind`` is one of ``r, r01, r02, r11, r22, r12``.  Without ``phi`` the
    :class:`AsymptoticForm` is returned; otherwise it is evaluated at the
    polar displacement ``(phi, theta)``.  Valid once ``sqrt(E) phi >= 1``.
    """
    if kind not in _LEADING:
        raise InvalidArgumentError(f"unknown kernel kind {kind!r}")
    if not E > 1:
        raise InvalidArgumentError("energy must exceed 1")
    h, shift = _LEADING[kind]
    form = AsymptoticForm(kind, float(E), h, shift)
    if phi is None:
        return form
    return form(phi, 0.0 if theta is None else theta)
