"""Realizations of the random monochromatic wave.

Three models share one interface (``value``, ``gradient``, ``laplacian``
and :func:`eval_grid`):

gaussian-spectral
    ``B(x) = J^{-1/2} sum_j xi_j cos(k <x, w_j>) + eta_j sin(k <x, w_j>)``
    with standard Gaussian ``xi, eta``.  Variance is exactly one and the
    gradient covariance exactly ``2 pi^2 E I`` for equispaced directions.
berry-phase
    ``sqrt(2/J) sum_j cos(k <x, w_j> + phi_j)`` with uniform directions and
    phases.  Gaussian only as ``J -> infinity``.
bessel-series
    ``Re sum_{|m|<=M} a_m J_|m|(k r) e^{i m theta}`` with complex Gaussian
    ``a_m``, ``E|a_m|^2 = 2``; valid inside a disk around the origin.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgumentError, OutOfDomainError
from .geometry.lattice import Grid
from .specfun import bessel_jn_all, wavenumber

MODELS = ("gaussian-spectral", "berry-phase", "bessel-series")
DIRECTION_RULES = ("equispaced", "uniform-random")
COMPLEX_SEED_XOR = 0x5DEECE66D2B7E151
DEFAULT_J = 256
BESSEL_TAIL = 1e-12


@dataclass(frozen=True)
class WaveSpec:
    E: float
    J: int = DEFAULT_J
    model: str = "gaussian-spectral"
    direction_rule: str = "equispaced"
    M: int | None = None
    seed: int = 0
    radius: float | None = None  # validity radius for the Bessel-series model

    def __post_init__(self):
        if not (np.isfinite(self.E) and self.E > 0):
            raise InvalidArgumentError(f"energy must be positive, got {self.E!r}")
        if self.model not in MODELS:
            raise InvalidArgumentError(f"unknown model {self.model!r}")
        if self.direction_rule not in DIRECTION_RULES:
            raise InvalidArgumentError(f"unknown direction rule {self.direction_rule!r}")
        if self.model != "bessel-series" and (int(self.J) != self.J or self.J < 1):
            raise InvalidArgumentError("J must be a positive integer")
        if self.model == "bessel-series" and self.M is None and self.radius is None:
            raise InvalidArgumentError("bessel-series needs M or a validity radius")
        if self.M is not None and self.M < 0:
            raise InvalidArgumentError("M must be non-negative")


def auto_directions(E, diameter, minimum=DEFAULT_J):
    """Number of plane-wave directions that keeps aliasing negligible.

    With ``J`` equispaced directions on the half circle the covariance error
    at distance ``d`` is of order ``J_{2J}(k d)``, tiny once ``2J`` exceeds
    ``k d`` by a few multiples of ``(k d)^{1/3}``.
    """
    kd = wavenumber(E) * diameter
    need = 0.5 * (kd + 6.0 * np.cbrt(kd) + 20.0)
    return int(max(minimum, 8 * np.ceil(need / 8)))


@dataclass
class PlaneWaveRealization:
    """Finite sum of plane waves ``sum_j A_j cos(k<x,w_j>) + B_j sin(k<x,w_j>)``."""

    E: float
    directions: np.ndarray
    cos_coef: np.ndarray
    sin_coef: np.ndarray
    model: str = "gaussian-spectral"

    @property
    def k(self):
        return wavenumber(self.E)

    def _phase(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != 2:
            raise InvalidArgumentError("points need a trailing axis of length 2")
        return self.k * (x @ self.directions.T)

    def value(self, x):
        p = self._phase(x)
        out = np.cos(p) @ self.cos_coef + np.sin(p) @ self.sin_coef
        return float(out) if out.ndim == 0 else out

    def gradient(self, x):
        p = self._phase(x)
        dc = -np.sin(p) * self.cos_coef + np.cos(p) * self.sin_coef
        return self.k * (dc @ self.directions)

    def laplacian(self, x):
        # sum of second derivatives, computed term by term
        p = self._phase(x)
        w2 = (self.directions ** 2).sum(1)
        f = np.cos(p) * self.cos_coef + np.sin(p) * self.sin_coef
        return -(self.k ** 2) * (f @ w2)

    def _grid_tables(self, grid: Grid):
        kx = self.k * np.outer(grid.xs, self.directions[:, 0])
        ky = self.k * np.outer(grid.ys, self.directions[:, 1])
        return np.cos(kx), np.sin(kx), np.cos(ky), np.sin(ky)

    def _right_factors(self, cy, sy, gradient):
        # cos(p + q) = cx cy - sx sy, sin(p + q) = sx cy + cx sy
        def right(a, b):
            return np.vstack([(a * cy + b * sy).T, (b * cy - a * sy).T])

        out = [right(self.cos_coef, self.sin_coef)]
        if gradient:
            for axis in (0, 1):
                kw = self.k * self.directions[:, axis]
                out.append(right(kw * self.sin_coef, -kw * self.cos_coef))
        return out

    def iter_grid(self, grid: Grid, gradient=False, rows=64):
        """Yield ``(r0, r1, values[, gradients])`` for blocks of grid rows."""
        cx, sx, cy, sy = self._grid_tables(grid)
        rights = self._right_factors(cy, sy, gradient)
        for r0 in range(0, grid.nx, rows):
            r1 = min(r0 + rows, grid.nx)
            left = np.hstack([cx[r0:r1], sx[r0:r1]])
            parts = [left @ R for R in rights]
            if gradient:
                yield r0, r1, parts[0], np.stack(parts[1:])
            else:
                yield r0, r1, parts[0]

    def eval_grid(self, grid: Grid, gradient=False):
        cx, sx, cy, sy = self._grid_tables(grid)
        left = np.hstack([cx, sx])
        parts = [left @ R for R in self._right_factors(cy, sy, gradient)]
        if not gradient:
            return parts[0]
        return parts[0], np.stack(parts[1:])


@dataclass
class BesselSeriesRealization:
    """``Re sum_m c_m J_m(k r) e^{i m theta}`` for ``|m| <= M``, valid for ``r <= radius``."""

    E: float
    M: int
    coef: np.ndarray  # complex, index m + M, J_|m| convention folded in
    radius: float
    model: str = field(default="bessel-series")

    @property
    def k(self):
        return wavenumber(self.E)

    def _prepare(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != 2:
            raise InvalidArgumentError("points need a trailing axis of length 2")
        r = np.hypot(x[..., 0], x[..., 1])
        if np.any(r > self.radius * (1 + 1e-12)):
            raise OutOfDomainError(f"point outside validity disk of radius {self.radius:g}")
        return x, r

    def _cylinder(self, x, order_pad=0):
        # J_m(kr) e^{i m theta} for m = -(M+pad) .. M+pad, as (2N+1, ...)
        x, r = self._prepare(x)
        n = self.M + order_pad
        jn = bessel_jn_all(n, self.k * r)
        z = np.exp(1j * np.arctan2(x[..., 1], x[..., 0]))
        m = np.arange(-n, n + 1)
        sign = np.where(m < 0, (-1.0) ** np.abs(m), 1.0)
        jm = sign.reshape((-1,) + (1,) * r.ndim) * jn[np.abs(m)]
        zm = z[None] ** m.reshape((-1,) + (1,) * r.ndim)
        return jm * zm

    def value(self, x):
        cyl = self._cylinder(x)
        out = np.real(np.tensordot(self.coef, cyl, axes=(0, 0)))
        return float(out) if out.ndim == 0 else out

    def gradient(self, x):
        # d/dx C_m = k/2 (C_{m-1} - C_{m+1}),  d/dy C_m = ik/2 (C_{m-1} + C_{m+1})
        cyl = self._cylinder(x, order_pad=1)
        lo, hi = cyl[:-2], cyl[2:]
        gx = 0.5 * self.k * np.real(np.tensordot(self.coef, lo - hi, axes=(0, 0)))
        gy = 0.5 * self.k * np.real(1j * np.tensordot(self.coef, lo + hi, axes=(0, 0)))
        return np.stack([gx, gy], axis=-1)

    def laplacian(self, x):
        # d/dx applied twice: k^2/4 (C_{m-2} - 2 C_m + C_{m+2}); same for y with a sign
        cyl = self._cylinder(x, order_pad=2)
        c = cyl[2:-2]
        dxx = 0.25 * self.k ** 2 * (cyl[:-4] - 2 * c + cyl[4:])
        dyy = -0.25 * self.k ** 2 * (cyl[:-4] + 2 * c + cyl[4:])
        return np.real(np.tensordot(self.coef, dxx + dyy, axes=(0, 0)))

    def eval_grid(self, grid: Grid, gradient=False):
        pts = grid.nodes()
        vals = self.value(pts)
        if not gradient:
            return vals
        return vals, np.moveaxis(self.gradient(pts), -1, 0)


@dataclass
class ComplexRealization:
    """Pair of independent real realizations ``B`` and ``B_hat``."""

    real: object
    imag: object

    @property
    def E(self):
        return self.real.E

    def value(self, x):
        return np.asarray(self.real.value(x)) + 1j * np.asarray(self.imag.value(x))


def bessel_truncation(E, radius, tail=BESSEL_TAIL):
    """Smallest ``M`` with ``|J_m(k radius)| < tail`` for every ``m > M``."""
    u = wavenumber(E) * radius
    nmax = int(u + 20 * np.cbrt(u + 1) + 40)
    j = np.abs(bessel_jn_all(nmax, u))
    above = np.nonzero(j >= tail)[0]
    return int(above[-1]) if above.size else 0


def bessel_radius(E, M, tail=BESSEL_TAIL):
    """Largest radius at which the order ``M + 1`` term is still below ``tail``."""
    k = wavenumber(E)
    lo, hi = 0.0, (M + 1) / k
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if bessel_truncation(E, mid, tail) <= M:
            lo = mid
        else:
            hi = mid
    return lo


def _directions(spec: WaveSpec, rng, J):
    if spec.direction_rule == "equispaced":
        # a random global rotation keeps the law isotropic at no cost
        theta = np.pi * (np.arange(J) + rng.uniform()) / J
    else:
        theta = rng.uniform(0.0, np.pi, J)
    return np.c_[np.cos(theta), np.sin(theta)]


def sample_wave(spec: WaveSpec, rng=None):
    """Draw one realization of the model described by ``spec``.

    Parameters
    ----------
    spec : WaveSpec
    rng : numpy.random.Generator, optional
        Defaults to ``default_rng(spec.seed)``.
    """
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    if spec.model == "gaussian-spectral":
        J = int(spec.J)
        w = _directions(spec, rng, J)
        xi = rng.standard_normal(J)
        eta = rng.standard_normal(J)
        s = 1.0 / np.sqrt(J)
        return PlaneWaveRealization(float(spec.E), w, s * xi, s * eta, spec.model)
    if spec.model == "berry-phase":
        J = int(spec.J)
        theta = rng.uniform(0.0, 2 * np.pi, J)
        phi = rng.uniform(0.0, 2 * np.pi, J)
        w = np.c_[np.cos(theta), np.sin(theta)]
        s = np.sqrt(2.0 / J)
        # cos(p + phi) = cos(phi) cos(p) - sin(phi) sin(p)
        return PlaneWaveRealization(float(spec.E), w, s * np.cos(phi), -s * np.sin(phi), spec.model)
    return sample_bessel_series(spec, rng)


def sample_bessel_series(spec: WaveSpec, rng=None):
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    if spec.M is None:
        radius = float(spec.radius)
        M = bessel_truncation(spec.E, radius)
    else:
        M = int(spec.M)
        radius = bessel_radius(spec.E, M) if spec.radius is None else float(spec.radius)
    a = rng.standard_normal(2 * M + 1) + 1j * rng.standard_normal(2 * M + 1)
    m = np.arange(-M, M + 1)
    # J_|m| = (-1)^m J_m for negative m
    coef = a * np.where(m < 0, (-1.0) ** np.abs(m), 1.0)
    return BesselSeriesRealization(float(spec.E), M, coef, radius)


def complex_seeds(seed):
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return seed, seed ^ COMPLEX_SEED_XOR


def sample_complex(spec: WaveSpec, rng=None) -> ComplexRealization:
    """Two independent realizations with seeds ``seed`` and ``seed ^ const``.

    When ``rng`` is given, the base seed is drawn from it.
    """
    base = spec.seed if rng is None else int(rng.integers(0, 2 ** 63))
    s1, s2 = complex_seeds(base)
    return ComplexRealization(sample_wave(replace(spec, seed=s1)),
                              sample_wave(replace(spec, seed=s2)))


def eval_grid(realization, grid: Grid, gradient=False):
    """Field (and optionally gradient, shape ``(2, nx, ny)``) on grid nodes.

    Plane-wave models use angle addition to factor the sum into a single
    matrix product; results agree with pointwise evaluation to rounding.
    """
    return realization.eval_grid(grid, gradient=gradient)
