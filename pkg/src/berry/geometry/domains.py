"""Planar domains: rectangles, disks and simple polygons.

Areas, diameters, intersections, erosions and dilations.  Rectangles and
disks use closed forms; general polygons go through shapely, with a raster
fallback for offsets that shapely cannot resolve.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import shapely
import shapely.affinity
from shapely.geometry import Polygon as _SPolygon

from ..errors import InvalidArgumentError, UnsupportedCaseError

DISK_VERTICES = 1024
RASTER_SIZE = 2048
_QUAD_SEGS = 256


class Domain:
    """Common interface.  Subclasses are immutable value objects."""

    kind = "domain"

    def area(self) -> float:
        raise NotImplementedError

    def diam(self) -> float:
        raise NotImplementedError

    def bbox(self):
        raise NotImplementedError

    def contains(self, pts):
        raise NotImplementedError

    def to_shapely(self):
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _no_extra(self, rest):
        if rest:
            raise InvalidArgumentError(f"unknown domain fields {sorted(rest)}")
        return self


def _check_finite(*vals):
    for v in vals:
        if not np.isfinite(v):
            raise InvalidArgumentError("domain parameters must be finite")


@dataclass(frozen=True)
class Rectangle(Domain):
    """Axis-aligned rectangle ``[x0, x0 + width] x [y0, y0 + height]``."""

    x0: float
    y0: float
    width: float
    height: float
    kind = "rectangle"

    def __post_init__(self):
        _check_finite(self.x0, self.y0, self.width, self.height)
        if self.width <= 0 or self.height <= 0:
            raise InvalidArgumentError("rectangle sides must be positive")

    @property
    def x1(self):
        return self.x0 + self.width

    @property
    def y1(self):
        return self.y0 + self.height

    def area(self):
        return self.width * self.height

    def diam(self):
        return float(np.hypot(self.width, self.height))

    def perimeter(self):
        return 2.0 * (self.width + self.height)

    def bbox(self):
        return (self.x0, self.y0, self.x1, self.y1)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)

    def vertices(self):
        return np.array([[self.x0, self.y0], [self.x1, self.y0],
                         [self.x1, self.y1], [self.x0, self.y1]])

    def to_shapely(self):
        return shapely.box(self.x0, self.y0, self.x1, self.y1)

    def to_dict(self):
        return {"type": "rectangle", "x0": self.x0, "y0": self.y0,
                "width": self.width, "height": self.height}


@dataclass(frozen=True)
class Disk(Domain):
    cx: float
    cy: float
    radius: float
    kind = "disk"

    def __post_init__(self):
        _check_finite(self.cx, self.cy, self.radius)
        if self.radius <= 0:
            raise InvalidArgumentError("disk radius must be positive")

    def area(self):
        return np.pi * self.radius ** 2

    def diam(self):
        return 2.0 * self.radius

    def perimeter(self):
        return 2.0 * np.pi * self.radius

    def bbox(self):
        r = self.radius
        return (self.cx - r, self.cy - r, self.cx + r, self.cy + r)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.hypot(pts[..., 0] - self.cx, pts[..., 1] - self.cy) <= self.radius

    def to_shapely(self, n=DISK_VERTICES):
        t = 2.0 * np.pi * np.arange(n) / n
        return _SPolygon(np.c_[self.cx + self.radius * np.cos(t), self.cy + self.radius * np.sin(t)])

    def to_dict(self):
        return {"type": "disk", "cx": self.cx, "cy": self.cy, "radius": self.radius}


class Polygon(Domain):
    """Simple polygon.  Vertices are stored counterclockwise."""

    kind = "polygon"

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidArgumentError("polygon needs at least three (x, y) vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("polygon vertices must be finite")
        if np.allclose(v[0], v[-1]):
            v = v[:-1]
        poly = _SPolygon(v)
        if not poly.is_valid or poly.area <= 0:
            raise InvalidArgumentError("polygon must be simple with positive area")
        if _signed_area(v) < 0:
            v = v[::-1]
        self._v = v
        self._v.setflags(write=False)

    @property
    def vertices(self):
        return self._v

    def __eq__(self, other):
        return isinstance(other, Polygon) and np.array_equal(self._v, other._v)

    def __hash__(self):
        return hash(self._v.tobytes())

    def __repr__(self):
        return f"Polygon({self._v.tolist()!r})"

    @cached_property
    def _shape(self):
        return _SPolygon(self._v)

    def area(self):
        return float(_signed_area(self._v))

    def diam(self):
        d = self._v[:, None, :] - self._v[None, :, :]
        return float(np.sqrt((d ** 2).sum(-1)).max())

    def perimeter(self):
        return float(self._shape.length)

    def is_convex(self):
        return bool(np.isclose(self._shape.convex_hull.area, self.area(), rtol=1e-12))

    def bbox(self):
        return tuple(self._shape.bounds)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        return shapely.intersects_xy(self._shape, pts[..., 0], pts[..., 1])

    def to_shapely(self):
        return self._shape

    def to_dict(self):
        return {"type": "polygon", "vertices": self._v.tolist()}


def _signed_area(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def domain_from_dict(d: dict) -> Domain:
    """Build a domain from ``{"type": ..., <params>}``."""
    if not isinstance(d, dict) or "type" not in d:
        raise InvalidArgumentError("domain record needs a 'type' field")
    d = dict(d)
    kind = d.pop("type")
    try:
        if kind == "rectangle":
            return Rectangle(float(d.pop("x0")), float(d.pop("y0")),
                             float(d.pop("width")), float(d.pop("height")))._no_extra(d)
        if kind == "disk":
            return Disk(float(d.pop("cx")), float(d.pop("cy")), float(d.pop("radius")))._no_extra(d)
        if kind == "polygon":
            return Polygon(d.pop("vertices"))._no_extra(d)
    except KeyError as exc:
        raise InvalidArgumentError(f"{kind} domain is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"bad {kind} domain parameters: {exc}") from None
    raise InvalidArgumentError(f"unknown domain type {kind!r}")


def area(D: Domain) -> float:
    return float(D.area())


def diam(D: Domain) -> float:
    return float(D.diam())


def _lens_area(d, r1, r2):
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return np.pi * min(r1, r2) ** 2
    a1 = r1 * r1 * np.arccos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = r2 * r2 * np.arccos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    k = 0.5 * np.sqrt(max((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2), 0.0))
    return a1 + a2 - k


def intersection_area(D1: Domain, D2: Domain) -> float:
    """Area of ``D1 & D2``.

    Exact for rectangle pairs, disk pairs and polygon pairs.  A disk meeting
    any other shape is replaced by its inscribed 1024-gon.
    """
    if isinstance(D1, Rectangle) and isinstance(D2, Rectangle):
        w = min(D1.x1, D2.x1) - max(D1.x0, D2.x0)
        h = min(D1.y1, D2.y1) - max(D1.y0, D2.y0)
        return max(w, 0.0) * max(h, 0.0)
    if isinstance(D1, Disk) and isinstance(D2, Disk):
        return float(_lens_area(np.hypot(D1.cx - D2.cx, D1.cy - D2.cy), D1.radius, D2.radius))
    return float(D1.to_shapely().intersection(D2.to_shapely()).area)


def _raster_offset_area(D: Domain, eta: float, erode: bool, n=RASTER_SIZE):
    """Raster estimate of the erosion or dilation area by ``eta``.

    Each cell contributes a coverage fraction from the signed distance to
    the offset boundary, which makes the estimate second-order in the cell
    size for boundaries that are straight at the cell scale.
    """
    x0, y0, x1, y1 = D.bbox()
    if not erode:
        x0, y0, x1, y1 = x0 - eta, y0 - eta, x1 + eta, y1 + eta
    side = max(x1 - x0, y1 - y0) / n
    nx = int(np.ceil((x1 - x0) / side))
    ny = int(np.ceil((y1 - y0) / side))
    xs = x0 + (np.arange(nx) + 0.5) * side
    ys = y0 + (np.arange(ny) + 0.5) * side
    edges = boundary_segments(D)
    total = 0.0
    for chunk in np.array_split(np.arange(nx), max(1, nx // 128)):
        X, Y = np.meshgrid(xs[chunk], ys, indexing="ij")
        pts = np.stack([X, Y], -1)
        dist = segment_distance(pts, edges)
        signed = np.where(D.contains(pts), dist, -dist)
        f = signed - eta if erode else eta + signed
        total += np.clip(0.5 + f / side, 0.0, 1.0).sum()
    return total * side * side


def boundary_segments(D: Domain, disk_vertices=DISK_VERTICES):
    """Boundary as an ``(m, 2, 2)`` array of segments."""
    if isinstance(D, Disk):
        v = np.asarray(D.to_shapely(disk_vertices).exterior.coords)[:-1]
    elif isinstance(D, Rectangle):
        v = D.vertices()
    elif isinstance(D, Polygon):
        v = D.vertices
    else:
        raise UnsupportedCaseError(f"no boundary for {type(D).__name__}")
    return np.stack([v, np.roll(v, -1, axis=0)], axis=1)


def segment_distance(pts, segs):
    """Distance from each point to the nearest segment."""
    pts = np.asarray(pts, dtype=float)
    best = np.full(pts.shape[:-1], np.inf)
    for a, b in segs:
        ab = b - a
        t = ((pts - a) @ ab) / (ab @ ab)
        t = np.clip(t, 0.0, 1.0)
        proj = a + t[..., None] * ab
        best = np.minimum(best, np.sqrt(((pts - proj) ** 2).sum(-1)))
    return best


def erosion_area(D: Domain, eta: float) -> float:
    """Area of ``{x in D : dist(x, boundary) >= eta}``."""
    if eta < 0:
        raise InvalidArgumentError("erosion radius must be non-negative")
    if eta == 0:
        return area(D)
    if isinstance(D, Rectangle):
        return max(D.width - 2 * eta, 0.0) * max(D.height - 2 * eta, 0.0)
    if isinstance(D, Disk):
        return np.pi * max(D.radius - eta, 0.0) ** 2
    try:
        g = D.to_shapely().buffer(-eta, quad_segs=_QUAD_SEGS)
        if g.is_valid:
            return float(g.area)
    except Exception:  # noqa: BLE001 - shapely raises GEOS errors of several types
        pass
    return _raster_offset_area(D, eta, erode=True)


def dilation_area(D: Domain, eta: float) -> float:
    """Area of ``{x : dist(x, D) <= eta}``."""
    if eta < 0:
        raise InvalidArgumentError("dilation radius must be non-negative")
    if isinstance(D, Rectangle):
        return D.area() + D.perimeter() * eta + np.pi * eta ** 2
    if isinstance(D, Disk):
        return np.pi * (D.radius + eta) ** 2
    if D.is_convex():
        return D.area() + D.perimeter() * eta + np.pi * eta ** 2
    try:
        g = D.to_shapely().buffer(eta, quad_segs=_QUAD_SEGS)
        if g.is_valid:
            return float(g.area)
    except Exception:  # noqa: BLE001
        pass
    return _raster_offset_area(D, eta, erode=False)


def eroded(D: Domain, eta: float):
    """The erosion ``D^{-eta}`` as a domain-like shapely-backed object, or None."""
    if isinstance(D, Rectangle):
        w, h = D.width - 2 * eta, D.height - 2 * eta
        if w <= 0 or h <= 0:
            return None
        return Rectangle(D.x0 + eta, D.y0 + eta, w, h)
    if isinstance(D, Disk):
        if eta >= D.radius:
            return None
        return Disk(D.cx, D.cy, D.radius - eta)
    g = D.to_shapely().buffer(-eta, quad_segs=_QUAD_SEGS)
    return None if g.is_empty else g


def eroded_overlap_area(D1: Domain, D2: Domain, etas):
    """``area(D1 & D2^{-eta})`` for an array of erosion radii."""
    etas = np.asarray(etas, dtype=float)
    if isinstance(D1, Rectangle) and isinstance(D2, Rectangle):
        w = np.minimum(D1.x1, D2.x1 - etas) - np.maximum(D1.x0, D2.x0 + etas)
        h = np.minimum(D1.y1, D2.y1 - etas) - np.maximum(D1.y0, D2.y0 + etas)
        ok = (D2.width - 2 * etas > 0) & (D2.height - 2 * etas > 0)
        return np.where(ok, np.maximum(w, 0) * np.maximum(h, 0), 0.0)
    if isinstance(D1, Disk) and isinstance(D2, Disk):
        d = np.hypot(D1.cx - D2.cx, D1.cy - D2.cy)
        return np.array([_lens_area(d, D1.radius, D2.radius - e) if e < D2.radius else 0.0
                         for e in etas.ravel()]).reshape(etas.shape)
    s1 = D1.to_shapely()
    out = np.empty(etas.size)
    for i, e in enumerate(etas.ravel()):
        g = eroded(D2, e)
        if g is None:
            out[i] = 0.0
        else:
            g = g.to_shapely() if isinstance(g, Domain) else g
            out[i] = s1.intersection(g).area
    return out.reshape(etas.shape)


def covariogram(D1: Domain, D2: Domain, z):
    """``area(D1 & (D2 + z))`` for displacements ``z`` of shape ``(..., 2)``."""
    z = np.asarray(z, dtype=float)
    if isinstance(D1, Rectangle) and isinstance(D2, Rectangle):
        zx, zy = z[..., 0], z[..., 1]
        w = np.minimum(D1.x1, D2.x1 + zx) - np.maximum(D1.x0, D2.x0 + zx)
        h = np.minimum(D1.y1, D2.y1 + zy) - np.maximum(D1.y0, D2.y0 + zy)
        return np.maximum(w, 0.0) * np.maximum(h, 0.0)
    if isinstance(D1, Disk) and isinstance(D2, Disk):
        d = np.hypot(D1.cx - D2.cx - z[..., 0], D1.cy - D2.cy - z[..., 1])
        return np.vectorize(lambda t: _lens_area(t, D1.radius, D2.radius))(d)
    s1, s2 = D1.to_shapely(), D2.to_shapely()
    flat = z.reshape(-1, 2)
    out = np.array([s1.intersection(shapely.affinity.translate(s2, a, b)).area for a, b in flat])
    return out.reshape(z.shape[:-1])


def union_bbox(domains):
    boxes = np.array([D.bbox() for D in domains])
    return (boxes[:, 0].min(), boxes[:, 1].min(), boxes[:, 2].max(), boxes[:, 3].max())


def boundary_quadrature(D: Domain, step: float):
    """Nodes, outward unit normals and weights for line integrals over the boundary.

    Rectangles and polygons use edge midpoints (composite midpoint rule),
    disks the periodic trapezoid rule, which is spectrally accurate.
    """
    if step <= 0:
        raise InvalidArgumentError("step must be positive")
    if isinstance(D, Disk):
        n = max(16, int(np.ceil(D.perimeter() / step)))
        t = 2.0 * np.pi * np.arange(n) / n
        nrm = np.c_[np.cos(t), np.sin(t)]
        pts = np.c_[D.cx, D.cy] + D.radius * nrm
        return pts, nrm, np.full(n, D.perimeter() / n)
    segs = boundary_segments(D)
    pts, nrms, wts = [], [], []
    for a, b in segs:
        L = float(np.hypot(*(b - a)))
        m = max(1, int(np.ceil(L / step)))
        s = (np.arange(m) + 0.5) / m
        pts.append(a + s[:, None] * (b - a))
        t = (b - a) / L
        nrms.append(np.tile([t[1], -t[0]], (m, 1)))  # outward for ccw order
        wts.append(np.full(m, L / m))
    return np.concatenate(pts), np.concatenate(nrms), np.concatenate(wts)


__all__ = [
    "Domain", "Rectangle", "Disk", "Polygon", "domain_from_dict", "area", "diam",
    "intersection_area", "erosion_area", "dilation_area", "eroded", "eroded_overlap_area",
    "covariogram", "union_bbox", "boundary_quadrature", "boundary_segments",
    "segment_distance", "DISK_VERTICES",
]
