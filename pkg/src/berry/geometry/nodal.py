"""Nodal-line length by marching squares, with exact clipping to the domain."""
from dataclasses import dataclass

import numpy as np
import shapely

from ..errors import InvalidArgumentError, UnsupportedCaseError
from .domains import Disk, Domain, Polygon, Rectangle
from .lattice import Grid


@dataclass
class NodalResult:
    length: float
    segment_count: int
    segments: np.ndarray | None = None


def _crossing(va, vb):
    return va / (va - vb)


def nodal_segments(values, grid: Grid, center_values=None):
    """Zero-level segments of the bilinear-free linear interpolant.

    Crossings on cell edges are found by linear interpolation.  Saddle
    cells (alternating corner signs) are resolved by the sign at the cell
    center: ``center_values`` if given, otherwise the mean of the corners.

    Returns
    -------
    ndarray of shape (n, 2, 2)
        Segment endpoints.
    """
    V = np.asarray(values, dtype=float)
    if V.shape != grid.shape:
        raise InvalidArgumentError(f"values shape {V.shape} does not match grid {grid.shape}")
    if V.shape[0] < 2 or V.shape[1] < 2:
        return np.zeros((0, 2, 2))
    h = grid.spacing
    v00, v10 = V[:-1, :-1], V[1:, :-1]
    v01, v11 = V[:-1, 1:], V[1:, 1:]
    p00, p10, p01, p11 = v00 >= 0, v10 >= 0, v01 >= 0, v11 >= 0
    code = p00.astype(np.int8) | (p10 << 1) | (p11 << 2) | (p01 << 3)
    active = (code != 0) & (code != 15)
    ii, jj = np.nonzero(active)
    if ii.size == 0:
        return np.zeros((0, 2, 2))
    a, b, c, d = v00[ii, jj], v10[ii, jj], v11[ii, jj], v01[ii, jj]
    pa, pb, pc, pd = p00[ii, jj], p10[ii, jj], p11[ii, jj], p01[ii, jj]
    x = grid.x0 + ii * h
    y = grid.y0 + jj * h
    # edge crossing points: bottom (a-b), right (b-c), top (d-c), left (a-d)
    with np.errstate(divide="ignore", invalid="ignore"):
        eb = np.stack([x + h * _crossing(a, b), y], -1)
        er = np.stack([x + h, y + h * _crossing(b, c)], -1)
        et = np.stack([x + h * _crossing(d, c), y + h], -1)
        el = np.stack([x, y + h * _crossing(a, d)], -1)
    hb, hr, ht, hl = pa != pb, pb != pc, pd != pc, pa != pd
    ncross = hb.astype(int) + hr + ht + hl
    segs = []
    two = ncross == 2
    if np.any(two):
        pts = np.stack([eb, er, et, el], 1)[two]
        mask = np.stack([hb, hr, ht, hl], 1)[two]
        segs.append(pts[mask].reshape(-1, 2, 2))
    four = ncross == 4
    if np.any(four):
        if center_values is not None:
            cv = np.asarray(center_values, dtype=float)
            if cv.shape != (grid.nx - 1, grid.ny - 1):
                raise InvalidArgumentError("center_values must have one entry per cell")
            center = cv[ii, jj][four]
        else:
            center = 0.25 * (a + b + c + d)[four]
        # center agrees with corner a (and c): separate b and d
        join_ac = (center >= 0) == pa[four]
        B, R, T, L = eb[four], er[four], et[four], el[four]
        s1 = np.where(join_ac[:, None, None], np.stack([B, R], 1), np.stack([L, B], 1))
        s2 = np.where(join_ac[:, None, None], np.stack([T, L], 1), np.stack([R, T], 1))
        segs += [s1, s2]
    return np.concatenate(segs) if segs else np.zeros((0, 2, 2))


def _clip_rectangle(segs, D: Rectangle):
    # Liang-Barsky, vectorized
    p0 = segs[:, 0]
    dvec = segs[:, 1] - p0
    t0 = np.zeros(len(segs))
    t1 = np.ones(len(segs))
    for k, lo, hi in ((0, D.x0, D.x1), (1, D.y0, D.y1)):
        dk = dvec[:, k]
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = (lo - p0[:, k]) / dk
            tb = (hi - p0[:, k]) / dk
        par = dk == 0
        lo_t = np.where(par, -np.inf, np.minimum(ta, tb))
        hi_t = np.where(par, np.inf, np.maximum(ta, tb))
        outside = par & ((p0[:, k] < lo) | (p0[:, k] > hi))
        t0 = np.maximum(t0, lo_t)
        t1 = np.where(outside, -1.0, np.minimum(t1, hi_t))
    return np.maximum(t1 - t0, 0.0) * np.hypot(dvec[:, 0], dvec[:, 1])


def _clip_disk(segs, D: Disk):
    p0 = segs[:, 0] - np.array([D.cx, D.cy])
    dvec = segs[:, 1] - segs[:, 0]
    A = (dvec ** 2).sum(1)
    Bq = 2 * (p0 * dvec).sum(1)
    C = (p0 ** 2).sum(1) - D.radius ** 2
    disc = Bq * Bq - 4 * A * C
    ok = (disc > 0) & (A > 0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    Asafe = np.where(A > 0, A, 1.0)
    ta = np.clip((-Bq - sq) / (2 * Asafe), 0, 1)
    tb = np.clip((-Bq + sq) / (2 * Asafe), 0, 1)
    return np.where(ok, tb - ta, 0.0) * np.sqrt(A)


def _clip_shapely(segs, D: Domain):
    lines = shapely.linestrings(segs)
    return shapely.length(shapely.intersection(lines, D.to_shapely()))


def clipped_lengths(segs, D: Domain):
    """Length of each segment that lies inside ``D``."""
    if len(segs) == 0:
        return np.zeros(0)
    if isinstance(D, Rectangle):
        return _clip_rectangle(segs, D)
    if isinstance(D, Disk):
        return _clip_disk(segs, D)
    if isinstance(D, Polygon):
        return _clip_shapely(segs, D)
    raise UnsupportedCaseError(f"cannot clip to {type(D).__name__}")


def nodal_length(values, grid: Grid, D: Domain, E=None, center_values=None,
                 keep_segments=False) -> NodalResult:
    """Length of the zero set of a sampled field inside ``D``.

    Parameters
    ----------
    values : ndarray, shape grid.shape
        Field sampled at the grid nodes.
    grid : Grid
        Must cover ``D``.
    D : Domain
    E : float, optional
        Energy of the field; when given the spacing is checked against
        ``1/(8 sqrt(E))``.
    center_values : ndarray, optional
        Field at cell centers, used to resolve saddle cells.
    """
    if E is not None:
        grid.check_resolution(E)
    x0, y0, x1, y1 = grid.extent()
    bx0, by0, bx1, by1 = D.bbox()
    tol = 1e-9 * grid.spacing
    if bx0 < x0 - tol or by0 < y0 - tol or bx1 > x1 + tol or by1 > y1 + tol:
        raise InvalidArgumentError("grid does not cover the domain")
    segs = nodal_segments(values, grid, center_values)
    lengths = clipped_lengths(segs, D)
    keep = lengths > 0
    return NodalResult(float(lengths.sum()), int(np.count_nonzero(keep)),
                       segs[keep] if keep_segments else None)
