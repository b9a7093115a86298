"""Moments of products of Hermite polynomials of jointly Gaussian vectors.

Two groups of standard Gaussians ``X_1..X_p`` (at one point) and
``Y_1..Y_q`` (at another) are independent within each group; the cross
covariances ``R[k, l] = E[X_k Y_l]`` are arbitrary.  Then

``E[prod H_{m_k}(X_k) prod H_{n_l}(Y_l)]
   = sum_N prod m_k! prod n_l! / prod N_kl! * prod R_kl^{N_kl}``

over non-negative integer matrices ``N`` with row sums ``m`` and column
sums ``n``.
"""
from functools import lru_cache
from math import factorial

import numpy as np

from ..errors import InvalidArgumentError, UnsupportedCaseError

MAX_DEGREE = 4


def _compositions(total, caps):
    # ways to write total as a sum bounded by caps, entry by entry
    if not caps:
        if total == 0:
            yield ()
        return
    for first in range(min(total, caps[0]) + 1):
        for rest in _compositions(total - first, caps[1:]):
            yield (first,) + rest


@lru_cache(maxsize=None)
def diagram_terms(left, right):
    """List of ``(coefficient, N)`` with ``N`` a tuple-of-tuples exponent matrix."""
    left, right = tuple(left), tuple(right)
    if any(d < 0 for d in left + right):
        raise InvalidArgumentError("Hermite degrees must be non-negative")
    if sum(left) > MAX_DEGREE or sum(right) > MAX_DEGREE:
        raise UnsupportedCaseError(f"total degree above {MAX_DEGREE} on one side")
    if sum(left) != sum(right):
        return ()
    terms = []

    def rec(i, cols, rows):
        if i == len(left):
            if all(c == 0 for c in cols):
                terms.append(tuple(rows))
            return
        for row in _compositions(left[i], cols):
            rec(i + 1, tuple(c - r for c, r in zip(cols, row)), rows + [row])

    rec(0, right, [])
    pref = np.prod([factorial(m) for m in left]) * np.prod([factorial(n) for n in right])
    out = []
    for N in terms:
        denom = np.prod([factorial(v) for row in N for v in row])
        out.append((int(pref // denom), N))
    return tuple(out)


def hermite_product_moment(left, right, cross):
    """Expected product of Hermite monomials at two points.

    Parameters
    ----------
    left, right : sequence of int
        Hermite degrees of each variable on either side (total degree at
        most four per side).
    cross : array_like, shape (len(left), len(right), ...)
        Cross covariances; trailing axes broadcast.

    Returns
    -------
    float or ndarray
    """
    left = tuple(int(d) for d in left)
    right = tuple(int(d) for d in right)
    R = np.asarray(cross, dtype=float)
    if R.shape[:2] != (len(left), len(right)):
        raise InvalidArgumentError(f"cross covariance must have shape ({len(left)}, {len(right)}, ...)")
    total = np.zeros(R.shape[2:])
    for coef, N in diagram_terms(left, right):
        term = np.full(R.shape[2:], float(coef))
        for k, row in enumerate(N):
            for l, e in enumerate(row):
                if e:
                    term = term * R[k, l] ** e
        total = total + term
    return float(total) if total.ndim == 0 else total
