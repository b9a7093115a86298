"""Common zeros of two sampled fields (phase singularities of B + i B_hat)."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..errors import InvalidArgumentError
from .domains import Domain
from .lattice import Grid

NEWTON_MAXITER = 30
NEWTON_TOL = 1e-10


@dataclass
class VortexResult:
    count: int
    locations: np.ndarray
    residuals: np.ndarray
    winding: np.ndarray


def _bilinear(c, s, t):
    a00, a10, a01, a11 = c
    return a00 * (1 - s) * (1 - t) + a10 * s * (1 - t) + a01 * (1 - s) * t + a11 * s * t


def _bilinear_grad(c, s, t):
    a00, a10, a01, a11 = c
    ds = (a10 - a00) * (1 - t) + (a11 - a01) * t
    dt = (a01 - a00) * (1 - s) + (a11 - a10) * s
    return ds, dt


def _winding(u, v):
    # corners in counterclockwise order; edges of a bilinear map are straight
    ang = np.arctan2(v, u)
    d = np.diff(np.concatenate([ang, ang[:1]]), axis=0)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return np.rint(d.sum(0) / (2 * np.pi)).astype(int)


def locate_vortices(U, V, grid: Grid):
    """Candidate cells, Newton refinement and winding test over the whole grid.

    Returns locations, residuals and winding numbers after merging duplicates
    closer than half a cell.
    """
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if U.shape != grid.shape or V.shape != grid.shape:
        raise InvalidArgumentError("component arrays must match the grid")
    empty = (np.zeros((0, 2)), np.zeros(0), np.zeros(0, dtype=int))
    if grid.nx < 2 or grid.ny < 2:
        return empty

    def corners(A):
        return A[:-1, :-1], A[1:, :-1], A[:-1, 1:], A[1:, 1:]

    def changes(A):
        c = corners(A >= 0)
        s = c[0].astype(int) + c[1] + c[2] + c[3]
        return (s > 0) & (s < 4)

    ii, jj = np.nonzero(changes(U) & changes(V))
    if ii.size == 0:
        return empty
    cu = [a[ii, jj] for a in corners(U)]
    cv = [a[ii, jj] for a in corners(V)]
    # corner order for winding: 00, 10, 11, 01
    w = _winding(np.stack([cu[0], cu[1], cu[3], cu[2]]), np.stack([cv[0], cv[1], cv[3], cv[2]]))
    keep = np.abs(w) == 1
    ii, jj, w = ii[keep], jj[keep], w[keep]
    cu = [a[keep] for a in cu]
    cv = [a[keep] for a in cv]
    s = np.full(ii.size, 0.5)
    t = np.full(ii.size, 0.5)
    live = np.ones(ii.size, dtype=bool)
    for _ in range(NEWTON_MAXITER):
        if not live.any():
            break
        f = _bilinear(cu, s, t)
        g = _bilinear(cv, s, t)
        fs, ft = _bilinear_grad(cu, s, t)
        gs, gt = _bilinear_grad(cv, s, t)
        det = fs * gt - ft * gs
        det = np.where(det == 0, np.finfo(float).tiny, det)
        ds = (gt * f - ft * g) / det
        dt = (fs * g - gs * f) / det
        ds = np.where(live, ds, 0.0)
        dt = np.where(live, dt, 0.0)
        s = np.clip(s - ds, -0.5, 1.5)
        t = np.clip(t - dt, -0.5, 1.5)
        live &= np.hypot(ds, dt) >= NEWTON_TOL
    # a root of the interpolant exists in every cell with nonzero winding
    s = np.clip(s, 0.0, 1.0)
    t = np.clip(t, 0.0, 1.0)
    h = grid.spacing
    loc = np.c_[grid.x0 + (ii + s) * h, grid.y0 + (jj + t) * h]
    res = np.hypot(_bilinear(cu, s, t), _bilinear(cv, s, t))
    if len(loc) > 1:
        tree = cKDTree(loc)
        pairs = tree.query_pairs(0.5 * h, output_type="ndarray")
        if len(pairs):
            drop = np.zeros(len(loc), dtype=bool)
            for a, b in pairs:
                if not drop[a]:
                    drop[b] = True
            loc, res, w = loc[~drop], res[~drop], w[~drop]
    return loc, res, w


def vortex_count(U, V, grid: Grid, D: Domain, E=None) -> VortexResult:
    """Number of common zeros of two sampled fields inside ``D``.

    Parameters
    ----------
    U, V : ndarray, shape grid.shape
        Real and imaginary components sampled at the grid nodes.
    grid : Grid
    D : Domain
    E : float, optional
        When given the spacing is checked against ``1/(8 sqrt(E))``.
    """
    if E is not None:
        grid.check_resolution(E)
    loc, res, w = locate_vortices(U, V, grid)
    inside = D.contains(loc) if len(loc) else np.zeros(0, dtype=bool)
    return VortexResult(int(np.count_nonzero(inside)), loc[inside], res[inside], w[inside])
