"""Deterministic checks of covariance-integral asymptotics.

Covariances of the fourth-chaos constituents are double integrals over
``D1 x D2`` of polynomials in the normalized kernels.  Two routes are
provided:

* :func:`radial_reduction` -- the reduced one-dimensional form
  ``(1/E) int dpsi area(D1 & D2^{-psi/sqrt E}) psi int dtheta F``, which
  drops a remainder of order ``o(log E / E)``;
* :func:`exact_double_integral` -- the double integral itself, rewritten
  through the set covariogram ``g(z) = area(D1 & (D2 + z))`` as
  ``int F(z) g(z) dz`` and integrated in polar coordinates.

Leading constants are expressed in units of ``area(D1 & D2) log E / (pi^3 E)``.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gamma

import numpy as np
from numpy.polynomial.legendre import leggauss

from .chaos.diagram import diagram_terms
from .chaos.functionals import CROSS_TERMS, CROSS_WEIGHTS, LENGTH_TERMS, LENGTH_WEIGHTS
from .errors import InvalidArgumentError
from .geometry.domains import (
    Domain, Rectangle, area, covariogram, diam, eroded_overlap_area, intersection_area,
)
from .specfun import bessel_j

# canonical kernels: r00, r01, r02, r11, r22, r12; index pairs map here with a sign
KERNELS = ("r00", "r01", "r02", "r11", "r22", "r12")
_CANON = {
    (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (1, 0): (1, -1), (2, 0): (2, -1),
    (1, 1): (3, 1), (2, 2): (4, 1), (1, 2): (5, 1), (2, 1): (5, 1),
}
# leading forms r ~ h(theta) g(psi): h as (constant, power of cos, power of sin), phase shift of g
_H = ((1.0, 0, 0), (np.sqrt(2), 1, 0), (np.sqrt(2), 0, 1), (2.0, 2, 0), (2.0, 0, 2), (2.0, 1, 1))
_SHIFT = (0.0, np.pi / 2, np.pi / 2, 0.0, 0.0, 0.0)

PANEL_WIDTH = 0.25
PANEL_NODES = 12
ANGLE_NODES = 256


class RateTable:
    """Leading constants of the a- and b-covariances.

    ``a_rates[(i, j)]`` gives ``Cov(a_i(D1), a_j(D2))`` and ``b_constant``
    gives ``Cov(b_i(D1), b_j(D2))``, both in units of
    ``area(D1 & D2) log E / (pi^3 E)``.  The b-constants are ``n_{i,j} / 16``
    with the integer table ``n``: a direct expansion of each integrand gives
    that scale, and it is the one for which the combination ``b_E`` has
    variance consistent with ``11 area E log E / (32 pi)``.
    """

    A_RATES = {
        (1, 1): Fraction(9), (1, 2): Fraction(27, 2), (1, 3): Fraction(27, 2),
        (1, 4): Fraction(9, 2), (1, 5): Fraction(3), (1, 6): Fraction(3),
        (2, 2): Fraction(315, 8), (2, 3): Fraction(27, 8), (2, 4): Fraction(45, 8),
        (2, 5): Fraction(15, 2), (2, 6): Fraction(3, 2),
        (3, 3): Fraction(315, 8), (3, 4): Fraction(45, 8), (3, 5): Fraction(3, 2),
        (3, 6): Fraction(15, 2),
        (4, 4): Fraction(27, 8), (4, 5): Fraction(3, 2), (4, 6): Fraction(3, 2),
        (5, 5): Fraction(3, 2), (5, 6): Fraction(1, 2), (6, 6): Fraction(3, 2),
    }
    _N_GROUPS = {
        4: [(2, 7), (2, 8), (2, 9), (2, 10), (3, 6), (3, 8), (3, 9), (3, 10),
            (4, 7), (4, 8), (4, 9), (4, 10), (5, 6), (5, 8), (5, 9), (5, 10)],
        8: [(1, 2), (1, 3), (1, 4), (1, 5)],
        9: [(6, 7), (8, 8), (8, 9), (8, 10), (9, 9), (9, 10), (10, 10)],
        12: [(1, 8), (1, 9), (1, 10), (2, 3), (2, 5), (3, 4), (4, 5)],
        15: [(6, 8), (6, 9), (6, 10), (7, 8), (7, 9), (7, 10)],
        20: [(2, 6), (3, 7), (4, 6), (5, 7)],
        24: [(1, 1)],
        36: [(1, 6), (1, 7), (2, 2), (2, 4), (3, 3), (3, 5), (4, 4), (5, 5)],
        105: [(6, 6), (7, 7)],
    }
    B_SCALE = 16

    def __init__(self):
        n = np.zeros((10, 10), dtype=int)
        for v, pairs in self._N_GROUPS.items():
            for i, j in pairs:
                n[i - 1, j - 1] = n[j - 1, i - 1] = v
        self.n_table = n
        a = np.zeros((6, 6))
        for (i, j), v in self.A_RATES.items():
            a[i - 1, j - 1] = a[j - 1, i - 1] = float(v)
        self.a_rates = a

    def a_constant(self, i, j):
        return float(self.a_rates[i - 1, j - 1])

    def n(self, i, j):
        return int(self.n_table[i - 1, j - 1])

    def b_constant(self, i, j):
        return self.n(i, j) / self.B_SCALE

    def constant(self, pair):
        (f1, i), (f2, j) = parse_pair(pair)
        if f1 != f2:
            return 0.0
        return self.a_constant(i, j) if f1 == "a" else self.b_constant(i, j)


RATES = RateTable()


def parse_pair(pair):
    """Normalize ``("a1", "a4")`` or ``"a1,a4"`` to ``(("a", 1), ("a", 4))``."""
    if isinstance(pair, str):
        pair = pair.replace(" ", "").split(",")
    if len(pair) != 2:
        raise InvalidArgumentError(f"pair must name two functionals, got {pair!r}")
    out = []
    for p in pair:
        p = str(p)
        fam, idx = p[:1], p[1:]
        limit = {"a": 6, "b": 10}.get(fam)
        if limit is None or not idx.isdigit() or not 1 <= int(idx) <= limit:
            raise InvalidArgumentError(f"unknown functional {p!r}")
        out.append((fam, int(idx)))
    if out[0][0] != out[1][0]:
        raise InvalidArgumentError("pairs must be two a-functionals or two b-functionals")
    return tuple(out)


def _degrees(fam, i):
    return LENGTH_TERMS[f"a{i}"] if fam == "a" else CROSS_TERMS[f"b{i}"]


@lru_cache(maxsize=None)
def covariance_polynomial(pair):
    """Covariance integrand as ``{exponents over KERNELS: coefficient}``.

    Built from the diagram formula.  For b-functionals the two fields are
    independent copies, so only blocks pairing a field with itself survive,
    both with the same kernel.
    """
    (f1, i), (f2, j) = parse_pair(pair)
    left, right = _degrees(f1, i), _degrees(f2, j)
    poly = {}
    for coef, N in diagram_terms(left, right):
        N = np.array(N)
        if len(left) == 6:
            if N[:3, 3:].any() or N[3:, :3].any():
                continue
            blocks = (N[:3, :3], N[3:, 3:])
        else:
            blocks = (N,)
        e = [0] * 6
        sign = 1
        for blk in blocks:
            for (k, l), (c, s) in _CANON.items():
                q = int(blk[k, l])
                e[c] += q
                if s < 0 and q % 2:
                    sign = -sign
        key = tuple(e)
        poly[key] = poly.get(key, 0) + sign * coef
    return {k: v for k, v in poly.items() if v != 0}


def monomial_from_q(q):
    """Map a 3x3 exponent matrix over signed kernels to ``(exponents, sign)``."""
    q = np.asarray(q, dtype=int)
    if q.shape != (3, 3) or (q < 0).any():
        raise InvalidArgumentError("q must be a 3x3 matrix of non-negative integers")
    if q.sum() != 4:
        raise InvalidArgumentError(f"exponents must sum to 4, got {q.sum()}")
    e = [0] * 6
    sign = 1
    for (k, l), (c, s) in _CANON.items():
        e[c] += int(q[k, l])
        if s < 0 and q[k, l] % 2:
            sign = -sign
    return tuple(e), sign


def canonical_kernels(psi, c, s):
    """Normalized kernels at unit energy and polar displacement ``psi (c, s)``."""
    u = 2.0 * np.pi * psi
    j0, j1, j2 = bessel_j(0, u), bessel_j(1, u), bessel_j(2, u)
    r2 = np.sqrt(2.0)
    return (j0 + 0 * c, r2 * c * j1, r2 * s * j1,
            j0 + (1 - 2 * c * c) * j2, j0 + (1 - 2 * s * s) * j2, -2 * c * s * j2)


def _eval_poly(poly, K):
    total = 0.0
    for e, coef in poly.items():
        t = float(coef)
        for k, p in enumerate(e):
            if p:
                t = t * K[k] ** p
        total = total + t
    return total


def _panels(a, b, width=PANEL_WIDTH, nodes=PANEL_NODES):
    if b <= a:
        return np.zeros(0), np.zeros(0)
    n = max(1, int(np.ceil((b - a) / width)))
    edges = np.linspace(a, b, n + 1)
    x, w = leggauss(nodes)
    lo, hi = edges[:-1, None], edges[1:, None]
    return (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel(), (0.5 * (hi - lo) * w).ravel()


def _angular_closed_form(e):
    const, a, b = 1.0, 0, 0
    for k, p in enumerate(e):
        if p:
            h = _H[k]
            const *= h[0] ** p
            a += h[1] * p
            b += h[2] * p
    if a % 2 or b % 2:
        return 0.0
    return const * 2.0 * gamma((a + 1) / 2) * gamma((b + 1) / 2) / gamma((a + b) / 2 + 1)


def _leading_radial(e, psi):
    g = np.ones_like(psi)
    for k, p in enumerate(e):
        if p:
            g = g * (np.cos(2 * np.pi * psi - np.pi / 4 - _SHIFT[k]) / (np.pi * np.sqrt(psi))) ** p
    return g


def reduce_polynomials(polys, D1: Domain, D2: Domain, E, leading=False, chunk=4096):
    """Reduced radial form of ``int int F(x - y) dx dy`` for several kernel polynomials.

    Kernels are evaluated once and shared across the polynomials.
    """
    if not E > 1:
        raise InvalidArgumentError("energy must exceed 1")
    polys = list(polys)
    overlap = intersection_area(D1, D2)
    if overlap <= 0:
        return [0.0] * len(polys)
    s = np.sqrt(E)
    top = s * _overlap_diam(D1, D2)
    out = np.zeros(len(polys))
    if leading:
        psi, w = _panels(1.0, top)
        A = eroded_overlap_area(D1, D2, psi / s)
        for n, poly in enumerate(polys):
            for e, coef in poly.items():
                ang = _angular_closed_form(e)
                if ang:
                    out[n] += coef * ang * np.sum(w * A * psi * _leading_radial(e, psi))
        return list(out / E)
    psi, w = _panels(0.0, top)
    A = eroded_overlap_area(D1, D2, psi / s)
    th = 2 * np.pi * np.arange(ANGLE_NODES) / ANGLE_NODES
    c, sn = np.cos(th)[None, :], np.sin(th)[None, :]
    for k in range(0, len(psi), chunk):
        p = psi[k:k + chunk, None]
        K = canonical_kernels(p, c, sn)
        wk = w[k:k + chunk] * A[k:k + chunk] * psi[k:k + chunk]
        for n, poly in enumerate(polys):
            ang = _eval_poly(poly, K).mean(axis=1) * 2 * np.pi
            out[n] += np.sum(wk * ang)
    return list(out / E)


def reduce_polynomial(poly, D1: Domain, D2: Domain, E, leading=False):
    """Reduced radial form of ``int int F(x - y) dx dy`` for a kernel polynomial ``F``."""
    return reduce_polynomials([poly], D1, D2, E, leading=leading)[0]


def _overlap_diam(D1, D2):
    if isinstance(D1, Rectangle) and isinstance(D2, Rectangle):
        w = min(D1.x1, D2.x1) - max(D1.x0, D2.x0)
        h = min(D1.y1, D2.y1) - max(D1.y0, D2.y0)
        return float(np.hypot(max(w, 0), max(h, 0)))
    g = D1.to_shapely().intersection(D2.to_shapely())
    if g.is_empty:
        return 0.0
    from shapely import get_coordinates
    v = get_coordinates(g)
    d = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((d ** 2).sum(-1)).max())


def radial_reduction(q, D1: Domain, D2: Domain, E, leading=False):
    """Reduced radial integral of a single kernel monomial.

    ``q`` is a 3x3 matrix of exponents over the signed normalized kernels
    ``r~_{i,j}`` (``r~_{i,0} = -r~_{0,i}``), summing to 4.  Evaluates

    ``int_0^{diam(D1&D2)} dphi area(D1 & D2^{-phi}) int_0^{2pi} prod r~^q phi dtheta``

    after substituting ``psi = sqrt(E) phi``.  Radial quadrature uses
    Gauss-Legendre panels of width 1/4 (48 nodes per period of
    ``cos(2 pi psi)``).  The angular integral is a 256-point periodic
    trapezoid, or a Beta-function closed form with ``leading=True``, in
    which case the kernels are replaced by their large-argument forms on
    ``psi >= 1``.
    """
    e, sign = monomial_from_q(q)
    return sign * reduce_polynomial({e: 1}, D1, D2, E, leading=leading)


def _rect_kinks(D1: Rectangle, D2: Rectangle):
    kx = sorted({D1.x0 - D2.x1, D1.x1 - D2.x1, D1.x0 - D2.x0, D1.x1 - D2.x0})
    ky = sorted({D1.y0 - D2.y1, D1.y1 - D2.y1, D1.y0 - D2.y0, D1.y1 - D2.y0})
    return kx, ky


def exact_double_integral(poly, D1: Domain, D2: Domain, E, angle_nodes=16, chunk=2048):
    """``int_{D1} int_{D2} F(x - y) dx dy`` through the covariogram.

    For rectangles the covariogram is piecewise bilinear; the angular
    integral is split at every angle where a kink line is crossed and each
    piece gets Gauss-Legendre.  Other shapes use a 256-point periodic
    trapezoid in angle and a numerical covariogram (slow; small ``E`` only).
    """
    if not E > 0:
        raise InvalidArgumentError("energy must be positive")
    s = np.sqrt(E)
    b1, b2 = D1.bbox(), D2.bbox()
    # z = x - y ranges over D1 - D2
    zx = (b1[0] - b2[2], b1[2] - b2[0])
    zy = (b1[1] - b2[3], b1[3] - b2[1])
    rmax = max(np.hypot(a, b) for a in zx for b in zy)
    rmin = 0.0
    if zx[0] > 0 or zx[1] < 0 or zy[0] > 0 or zy[1] < 0:
        cx = min(max(0.0, zx[0]), zx[1])
        cy = min(max(0.0, zy[0]), zy[1])
        rmin = float(np.hypot(cx, cy))
    psi, w = _panels(s * rmin, s * rmax)
    rect = isinstance(D1, Rectangle) and isinstance(D2, Rectangle)
    total = 0.0
    if rect:
        kx, ky = _rect_kinks(D1, D2)
        gx, gw = leggauss(angle_nodes)
    for k in range(0, len(psi), chunk):
        p = psi[k:k + chunk]
        rad = p / s
        if rect:
            br = [np.zeros_like(p), np.full_like(p, np.pi / 2), np.full_like(p, np.pi),
                  np.full_like(p, 1.5 * np.pi), np.full_like(p, 2 * np.pi)]
            for v in kx:
                t = np.arccos(np.clip(v / rad, -1, 1))
                br += [t, 2 * np.pi - t]
            for v in ky:
                t = np.arcsin(np.clip(v / rad, -1, 1))
                br += [np.mod(t, 2 * np.pi), np.pi - t]
            br = np.sort(np.stack(br, 1), axis=1)
            lo, hi = br[:, :-1], br[:, 1:]
            th = (0.5 * (hi - lo))[..., None] * gx + (0.5 * (hi + lo))[..., None]
            tw = (0.5 * (hi - lo))[..., None] * gw
            th = th.reshape(len(p), -1)
            tw = tw.reshape(len(p), -1)
        else:
            th = np.tile(2 * np.pi * np.arange(ANGLE_NODES) / ANGLE_NODES, (len(p), 1))
            tw = np.full_like(th, 2 * np.pi / ANGLE_NODES)
        c, sn = np.cos(th), np.sin(th)
        P = p[:, None]
        z = np.stack([P / s * c, P / s * sn], -1)
        g = covariogram(D1, D2, z)
        F = _eval_poly(poly, canonical_kernels(P, c, sn))
        total += np.sum(w[k:k + chunk] * p * np.sum(F * g * tw, axis=1))
    return total / E


def rate_unit(D1, D2, E):
    """``area(D1 & D2) log E / (pi^3 E)``."""
    return intersection_area(D1, D2) * np.log(E) / (np.pi ** 3 * E)


def leading_constant(pair):
    """Leading constant derived from the asymptotic kernel forms.

    Each monomial contributes its angular average of the ``h`` factors times
    the mean over one period of the product of phase-shifted cosines.
    """
    total = 0.0
    t = (np.arange(64) + 0.5) / 64
    for e, coef in covariance_polynomial(tuple(pair) if not isinstance(pair, str) else pair).items():
        ang = _angular_closed_form(e) / (2 * np.pi)
        if not ang:
            continue
        cosprod = np.ones_like(t)
        for k, p in enumerate(e):
            if p:
                cosprod = cosprod * np.cos(2 * np.pi * t - np.pi / 4 - _SHIFT[k]) ** p
        total += coef * ang * cosprod.mean()
    return total


def covariance_rate_check(pair, E, D1: Domain, D2: Domain, exact=False):
    """Compare the reduced covariance integral with its predicted leading term.

    ``pair`` may also be a list of pairs, in which case a list of results is
    returned and the kernel evaluations are shared.

    Returns
    -------
    dict
        ``numeric`` (radial reduction of the full integrand), ``predicted``
        (table constant times ``area(D1 & D2) log E/(pi^3 E)``) and their
        ``ratio``; with ``exact=True`` also the covariogram double integral
        and its ratio.
    """
    single = isinstance(pair, str) or (len(pair) == 2 and isinstance(pair[0], str)
                                       and not ("," in pair[0]))
    pairs = [pair] if single else list(pair)
    keys = [tuple(f"{f}{i}" for f, i in parse_pair(p)) for p in pairs]
    polys = [covariance_polynomial(k) for k in keys]
    numeric = reduce_polynomials(polys, D1, D2, E)
    unit = rate_unit(D1, D2, E)
    results = []
    for key, poly, num in zip(keys, polys, numeric):
        predicted = RATES.constant(key) * unit
        out = {"pair": ",".join(key), "E": float(E), "numeric": float(num),
               "predicted": float(predicted),
               "ratio": float(num / predicted) if predicted else float("nan")}
        if exact:
            ex = exact_double_integral(poly, D1, D2, E)
            out["exact"] = float(ex)
            out["exact_ratio"] = float(ex / predicted) if predicted else float("nan")
        results.append(out)
    return results[0] if single else results


def oscillatory_remainder_check(E, D1: Domain, D2: Domain | None = None, parts=False):
    """Magnitude of the two cosine-modulated radial integrals for ``24 r^4``.

    ``cos^4 x = 3/8 + cos(4x)/8 + cos(2x)/2`` splits the leading integrand
    ``(48 pi / (pi^4 E)) area(...) cos^4(2 pi psi - pi/4) / psi`` into a
    constant channel and two oscillating channels; their sum of absolute
    values is returned (or all three channels with ``parts=True``).
    """
    if not E > 1:
        raise InvalidArgumentError("energy must exceed 1")
    D2 = D1 if D2 is None else D2
    s = np.sqrt(E)
    psi, w = _panels(1.0, s * _overlap_diam(D1, D2), width=1 / 16, nodes=8)
    A = eroded_overlap_area(D1, D2, psi / s)
    pre = 2 * np.pi * 24 / (np.pi ** 4 * E)
    base = w * A / psi
    const = pre * 3 / 8 * base.sum()
    osc8 = pre / 8 * np.sum(base * np.cos(8 * np.pi * psi - np.pi))
    osc4 = pre / 2 * np.sum(base * np.cos(4 * np.pi * psi - np.pi / 2))
    if parts:
        return {"constant": float(const), "cos8": float(osc8), "cos4": float(osc4),
                "unmodulated": float(pre * base.sum())}
    return float(abs(osc8) + abs(osc4))


def predictions(E, domains):
    """Closed-form means, variances and the limiting correlation matrix."""
    if not E > 1:
        raise InvalidArgumentError("energy must exceed 1")
    domains = list(domains)
    areas = np.array([area(D) for D in domains])
    m = len(domains)
    C = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            C[i, j] = intersection_area(domains[i], domains[j]) / np.sqrt(areas[i] * areas[j])
    return {
        "mean_length": areas * np.pi / np.sqrt(2) * np.sqrt(E),
        "mean_count": areas * np.pi * E,
        "var_length": areas * np.log(E) / (512 * np.pi),
        "var_count": 11 * areas * E * np.log(E) / (32 * np.pi),
        "C": C,
    }


@dataclass
class VarianceRate:
    """Leading variance of ``sum w_i X_i`` from a table of pair constants."""

    weights: dict
    constants: dict

    def total(self):
        names = list(self.weights)
        return sum(self.weights[a] * self.weights[b] * self.constants[(a, b)]
                   for a in names for b in names)


def length_variance_constant():
    """Leading ``Var(L4) / (area log E)``, assembled from the a-table."""
    names = list(LENGTH_WEIGHTS)
    consts = {(a, b): RATES.constant((a, b)) for a in names for b in names}
    s = VarianceRate(LENGTH_WEIGHTS, consts).total()
    # L4 = sqrt(2 pi^2 E)/128 * sum w a; Var ~ 2 pi^2 E / 128^2 * s / (pi^3 E)
    return 2 * np.pi ** 2 / 128 ** 2 * s / np.pi ** 3


def count_variance_constant():
    """Leading ``Var(N4) / (area E log E)`` from the a-table and the b-table."""
    names = list(LENGTH_WEIGHTS)
    sa = VarianceRate(LENGTH_WEIGHTS, {(a, b): RATES.constant((a, b)) for a in names for b in names}).total()
    bn = list(CROSS_WEIGHTS)
    sb = VarianceRate(CROSS_WEIGHTS, {(a, b): RATES.constant((a, b)) for a in bn for b in bn}).total()
    # a_E and a_hat_E carry (pi E / 64), b_E carries (pi E / 8)
    return (2 * (np.pi / 64) ** 2 * sa + (np.pi / 8) ** 2 * sb) / np.pi ** 3
