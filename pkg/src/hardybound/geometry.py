"""Domains with exact distance-to-boundary and nearest-boundary-point queries.

Every shape implements vectorised ``contains``, ``_distance`` and ``_project``
on arrays of shape ``(m, dim)``; the module-level functions add membership
checks and single-point conveniences.  Projection ties (points with more than
one nearest boundary point) resolve to the lexicographically smallest
candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CoverageError, GeometryError, OutsideDomainError, ParameterDomainError

_TIE_RTOL = 1e-12


def _as_points(x, dim: int) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise GeometryError(f"expected points of dimension {dim}, got shape {np.shape(x)}")
    return pts


def _lexmin(cands: np.ndarray, dist: np.ndarray):
    """Pick, per row, the lexicographically smallest candidate among the nearest ones.

    ``cands`` has shape (m, F, dim) and ``dist`` (m, F).  Returns chosen points
    (m, dim) and the feature index (m,).
    """
    dmin = dist.min(axis=1)
    valid = dist <= dmin[:, None] + _TIE_RTOL * (1.0 + np.abs(dmin[:, None]))
    for k in range(cands.shape[2]):
        vals = np.where(valid, cands[:, :, k], np.inf)
        m = vals.min(axis=1)
        valid &= vals <= m[:, None] + _TIE_RTOL * (1.0 + np.abs(m[:, None]))
    idx = np.argmax(valid, axis=1)
    rows = np.arange(cands.shape[0])
    return cands[rows, idx], idx


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the boundary together with the feature it lies on."""

    location: np.ndarray
    source: str

    def __eq__(self, other):
        if not isinstance(other, BoundaryPoint):
            return NotImplemented
        return self.source == other.source and np.array_equal(self.location, other.location)

    def __hash__(self):
        return hash((self.source, tuple(np.asarray(self.location).tolist())))


class Domain:
    """Base class.  Subclasses are immutable dataclasses."""

    kind: str = "domain"
    bounded: bool = False

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def contains(self, x) -> np.ndarray:
        raise NotImplementedError

    def _distance(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _project(self, pts: np.ndarray):
        """Return (nearest points (m, dim), list of source labels)."""
        raise NotImplementedError

    def boundary_samples(self, m: int) -> list[BoundaryPoint]:
        raise GeometryError(f"{self.kind} is unbounded; boundary sampling requires a bounded domain")

    def bounding_box(self):
        raise GeometryError(f"{self.kind} is unbounded and has no bounding box")

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class HalfSpace(Domain):
    """``{x : normal . x > offset}`` with the normal pointing into the domain."""

    normal: tuple
    offset: float = 0.0
    kind = "half-space"

    def __post_init__(self):
        nu = np.asarray(self.normal, dtype=float)
        norm = np.linalg.norm(nu)
        if nu.ndim != 1 or nu.size < 2 or not norm > 0:
            raise GeometryError("half-space normal must be a nonzero vector of dimension >= 2")
        object.__setattr__(self, "normal", tuple((nu / norm).tolist()))
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @property
    def dim(self):
        return len(self.normal)

    def contains(self, x):
        pts = _as_points(x, self.dim)
        return pts @ np.asarray(self.normal) > self.offset

    def _distance(self, pts):
        return pts @ np.asarray(self.normal) - self.offset

    def _project(self, pts):
        nu = np.asarray(self.normal)
        d = self._distance(pts)
        return pts - d[:, None] * nu, ["plane"] * len(pts)

    def to_config(self):
        return {"shape": "half-space", "normal": list(self.normal), "offset": self.offset}


def _sphere_projection(pts, center, radius):
    diff = pts - center
    r = np.linalg.norm(diff, axis=1)
    out = np.empty_like(pts)
    ok = r > 0
    out[ok] = center + radius * diff[ok] / r[ok, None]
    # Every sphere point is nearest to the centre; the lexicographic minimum is c - R e_1.
    fallback = np.array(center, dtype=float)
    fallback[0] -= radius
    out[~ok] = fallback
    return out


def _sphere_samples(center, radius, m):
    center = np.asarray(center, dtype=float)
    dim = center.size
    if dim == 2:
        theta = 2 * np.pi * np.arange(m) / m
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    elif dim == 3:
        i = np.arange(m) + 0.5
        phi = np.arccos(1 - 2 * i / m)
        theta = np.pi * (1 + 5**0.5) * i
        dirs = np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=1)
    else:
        rng = np.random.default_rng(0)
        dirs = rng.standard_normal((m, dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return center + radius * dirs


@dataclass(frozen=True)
class Ball(Domain):
    center: tuple
    radius: float
    kind = "ball"
    bounded = True

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise GeometryError("ball center must be a point of dimension >= 2")
        if not self.radius > 0:
            raise GeometryError(f"radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "center", tuple(c.tolist()))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return len(self.center)

    def contains(self, x):
        pts = _as_points(x, self.dim)
        return np.linalg.norm(pts - np.asarray(self.center), axis=1) < self.radius

    def _distance(self, pts):
        return self.radius - np.linalg.norm(pts - np.asarray(self.center), axis=1)

    def _project(self, pts):
        return _sphere_projection(pts, np.asarray(self.center), self.radius), ["sphere"] * len(pts)

    def boundary_samples(self, m):
        locs = _sphere_samples(self.center, self.radius, m)
        return [BoundaryPoint(loc, "sphere") for loc in locs]

    def bounding_box(self):
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius

    def to_config(self):
        return {"shape": "ball", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class BallComplement(Domain):
    center: tuple
    radius: float
    kind = "ball-complement"

    def __post_init__(self):
        Ball.__post_init__(self)

    @property
    def dim(self):
        return len(self.center)

    def contains(self, x):
        pts = _as_points(x, self.dim)
        return np.linalg.norm(pts - np.asarray(self.center), axis=1) > self.radius

    def _distance(self, pts):
        return np.linalg.norm(pts - np.asarray(self.center), axis=1) - self.radius

    def _project(self, pts):
        return _sphere_projection(pts, np.asarray(self.center), self.radius), ["sphere"] * len(pts)

    def to_config(self):
        return {"shape": "ball-complement", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Annulus(Domain):
    center: tuple
    r_in: float
    r_out: float
    kind = "annulus"
    bounded = True

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise GeometryError("annulus center must be a point of dimension >= 2")
        if not (0 < self.r_in < self.r_out):
            raise GeometryError(f"annulus radii must satisfy 0 < r_in < r_out, got {self.r_in}, {self.r_out}")
        object.__setattr__(self, "center", tuple(c.tolist()))
        object.__setattr__(self, "r_in", float(self.r_in))
        object.__setattr__(self, "r_out", float(self.r_out))

    @property
    def dim(self):
        return len(self.center)

    def contains(self, x):
        pts = _as_points(x, self.dim)
        r = np.linalg.norm(pts - np.asarray(self.center), axis=1)
        return (r > self.r_in) & (r < self.r_out)

    def _distance(self, pts):
        r = np.linalg.norm(pts - np.asarray(self.center), axis=1)
        return np.minimum(r - self.r_in, self.r_out - r)

    def _project(self, pts):
        c = np.asarray(self.center)
        r = np.linalg.norm(pts - c, axis=1)
        cands = np.stack(
            [_sphere_projection(pts, c, self.r_in), _sphere_projection(pts, c, self.r_out)], axis=1
        )
        dist = np.stack([np.abs(r - self.r_in), np.abs(self.r_out - r)], axis=1)
        loc, idx = _lexmin(cands, dist)
        return loc, [("inner", "outer")[i] for i in idx]

    def boundary_samples(self, m):
        m_in = max(1, int(round(m * self.r_in / (self.r_in + self.r_out))))
        m_out = max(1, m - m_in)
        inner = [BoundaryPoint(x, "inner") for x in _sphere_samples(self.center, self.r_in, m_in)]
        outer = [BoundaryPoint(x, "outer") for x in _sphere_samples(self.center, self.r_out, m_out)]
        return inner + outer

    def bounding_box(self):
        c = np.asarray(self.center)
        return c - self.r_out, c + self.r_out

    def to_config(self):
        return {"shape": "annulus", "center": list(self.center), "r_in": self.r_in, "r_out": self.r_out}


@dataclass(frozen=True)
class Box(Domain):
    """Open axis-aligned box ``lo < x < hi``."""

    lo: tuple
    hi: tuple
    kind = "box"
    bounded = True

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size < 2:
            raise GeometryError("box corners must be points of equal dimension >= 2")
        if not np.all(hi > lo):
            raise GeometryError("box requires hi > lo componentwise")
        object.__setattr__(self, "lo", tuple(lo.tolist()))
        object.__setattr__(self, "hi", tuple(hi.tolist()))

    @property
    def dim(self):
        return len(self.lo)

    def contains(self, x):
        pts = _as_points(x, self.dim)
        return np.all((pts > np.asarray(self.lo)) & (pts < np.asarray(self.hi)), axis=1)

    def _face_distances(self, pts):
        return np.concatenate([pts - np.asarray(self.lo), np.asarray(self.hi) - pts], axis=1)

    def _distance(self, pts):
        return self._face_distances(pts).min(axis=1)

    def _project(self, pts):
        dim = self.dim
        dist = self._face_distances(pts)
        cands = np.repeat(pts[:, None, :], 2 * dim, axis=1)
        for k in range(dim):
            cands[:, k, k] = self.lo[k]
            cands[:, dim + k, k] = self.hi[k]
        loc, idx = _lexmin(cands, dist)
        return loc, [f"face{i % dim}{'-' if i < dim else '+'}" for i in idx]

    def boundary_samples(self, m):
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        dim = self.dim
        area = []
        for k in range(dim):
            others = [j for j in range(dim) if j != k]
            area.append(float(np.prod(hi[others] - lo[others])))
        total = 2 * sum(area)
        out = []
        for k in range(dim):
            others = [j for j in range(dim) if j != k]
            share = max(1, int(round(m * area[k] / total)))
            per_axis = max(1, int(round(share ** (1.0 / (dim - 1)))))
            axes = [lo[j] + (hi[j] - lo[j]) * (np.arange(per_axis) + 0.5) / per_axis for j in others]
            mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim - 1)
            for side, val in (("-", lo[k]), ("+", hi[k])):
                pts = np.empty((len(mesh), dim))
                pts[:, others] = mesh
                pts[:, k] = val
                out.extend(BoundaryPoint(x, f"face{k}{side}") for x in pts)
        return out

    def bounding_box(self):
        return np.asarray(self.lo), np.asarray(self.hi)

    def to_config(self):
        return {"shape": "box", "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class BoxComplement(Domain):
    """Exterior of the closed box ``[lo, hi]``."""

    lo: tuple
    hi: tuple
    kind = "box-complement"

    def __post_init__(self):
        Box.__post_init__(self)

    @property
    def dim(self):
        return len(self.lo)

    def contains(self, x):
        pts = _as_points(x, self.dim)
        return ~np.all((pts >= np.asarray(self.lo)) & (pts <= np.asarray(self.hi)), axis=1)

    def _distance(self, pts):
        return np.linalg.norm(pts - np.clip(pts, self.lo, self.hi), axis=1)

    def _project(self, pts):
        return np.clip(pts, self.lo, self.hi), ["box"] * len(pts)

    def to_config(self):
        return {"shape": "box-complement", "lo": list(self.lo), "hi": list(self.hi)}


def _segments_intersect(a, b, c, d) -> bool:
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    def on_seg(p, q, r):
        return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])

    o1, o2, o3, o4 = orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (
        (o1 == 0 and on_seg(a, b, c))
        or (o2 == 0 and on_seg(a, b, d))
        or (o3 == 0 and on_seg(c, d, a))
        or (o4 == 0 and on_seg(c, d, b))
    )


@dataclass(frozen=True)
class Polygon(Domain):
    """Simple planar polygon, vertices listed counterclockwise."""

    vertices: tuple
    kind = "polygon"
    bounded = True

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim == 1:
            if v.size % 2:
                raise GeometryError("flat polygon vertex array must have even length")
            v = v.reshape(-1, 2)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise GeometryError("polygon needs at least three 2D vertices")
        x, y = v[:, 0], v[:, 1]
        area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        if not area > 0:
            raise GeometryError("polygon vertices must be listed counterclockwise")
        m = len(v)
        for i in range(m):
            for j in range(i + 1, m):
                if j == i + 1 or (i == 0 and j == m - 1):
                    continue
                if _segments_intersect(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]):
                    raise GeometryError(f"polygon is not simple: edges {i} and {j} intersect")
        object.__setattr__(self, "vertices", tuple(map(tuple, v.tolist())))

    @property
    def dim(self):
        return 2

    @property
    def _v(self):
        return np.asarray(self.vertices)

    def _segment_projections(self, pts):
        a = self._v
        b = np.roll(a, -1, axis=0)
        ab = b - a
        t = np.einsum("mek,ek->me", pts[:, None, :] - a[None], ab) / np.sum(ab * ab, axis=1)
        t = np.clip(t, 0.0, 1.0)
        cands = a[None] + t[:, :, None] * ab[None]
        dist = np.linalg.norm(pts[:, None, :] - cands, axis=2)
        return cands, dist, t

    def contains(self, x):
        pts = _as_points(x, 2)
        a = self._v
        b = np.roll(a, -1, axis=0)
        px, py = pts[:, 0:1], pts[:, 1:2]
        cond = (a[None, :, 1] > py) != (b[None, :, 1] > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a[None, :, 0] + (py - a[None, :, 1]) * (b[None, :, 0] - a[None, :, 0]) / (
                b[None, :, 1] - a[None, :, 1]
            )
        inside = np.sum(cond & (px < xint), axis=1) % 2 == 1
        _, dist, _ = self._segment_projections(pts)
        return inside & (dist.min(axis=1) > 0)

    def _distance(self, pts):
        _, dist, _ = self._segment_projections(pts)
        return dist.min(axis=1)

    def _project(self, pts):
        cands, dist, t = self._segment_projections(pts)
        loc, idx = _lexmin(cands, dist)
        m = len(self.vertices)
        tt = t[np.arange(len(pts)), idx]
        labels = []
        for e, s in zip(idx, tt):
            if s <= 0.0:
                labels.append(f"vertex{e}")
            elif s >= 1.0:
                labels.append(f"vertex{(e + 1) % m}")
            else:
                labels.append(f"edge{e}")
        return loc, labels

    def boundary_samples(self, m):
        a = self._v
        b = np.roll(a, -1, axis=0)
        lengths = np.linalg.norm(b - a, axis=1)
        total = lengths.sum()
        out = []
        for e, (pa, pb, ln) in enumerate(zip(a, b, lengths)):
            k = max(1, int(round(m * ln / total)))
            for s in np.arange(k) / k:
                out.append(BoundaryPoint(pa + s * (pb - pa), f"edge{e}" if s > 0 else f"vertex{e}"))
        return out

    def bounding_box(self):
        return self._v.min(axis=0), self._v.max(axis=0)

    def to_config(self):
        return {"shape": "polygon", "vertices": [c for v in self.vertices for c in v]}


@dataclass(frozen=True)
class PuncturedSpace(Domain):
    """``R^n`` minus one point; the distance is the distance to that point."""

    point: tuple
    kind = "punctured-space"

    def __post_init__(self):
        y = np.asarray(self.point, dtype=float)
        if y.ndim != 1 or y.size < 2:
            raise GeometryError("puncture must be a point of dimension >= 2")
        object.__setattr__(self, "point", tuple(y.tolist()))

    @property
    def dim(self):
        return len(self.point)

    def contains(self, x):
        pts = _as_points(x, self.dim)
        return np.any(pts != np.asarray(self.point), axis=1)

    def _distance(self, pts):
        return np.linalg.norm(pts - np.asarray(self.point), axis=1)

    def _project(self, pts):
        return np.repeat(np.asarray(self.point)[None], len(pts), axis=0), ["puncture"] * len(pts)

    def to_config(self):
        return {"shape": "punctured-space", "point": list(self.point)}


def unit_square() -> Box:
    return Box((0.0, 0.0), (1.0, 1.0))


def unit_disk() -> Ball:
    return Ball((0.0, 0.0), 1.0)


def l_shape() -> Polygon:
    """``[-1, 1]^2`` minus the closed quadrant ``[0, 1]^2``; re-entrant corner at the origin."""
    return Polygon(((-1, -1), (1, -1), (1, 0), (0, 0), (0, 1), (-1, 1)))


def random_star_polygon(rng: np.random.Generator, m: int = 8, r_min: float = 0.45, r_max: float = 1.0) -> Polygon:
    """Random simple polygon, star-shaped about the origin, with ``m`` vertices."""
    while True:
        gaps = rng.uniform(0.5, 1.5, size=m)
        theta = np.cumsum(gaps) / gaps.sum() * 2 * np.pi + rng.uniform(0, 2 * np.pi)
        radii = rng.uniform(r_min, r_max, size=m)
        verts = np.stack([radii * np.cos(theta), radii * np.sin(theta)], axis=1)
        try:
            return Polygon(verts)
        except GeometryError:
            continue


def domain_from_config(cfg: dict) -> Domain:
    """Build a domain from ``{"shape": tag, ...numeric parameters}``."""
    cfg = dict(cfg)
    shape = cfg.pop("shape", None)
    builders = {
        "half-space": HalfSpace,
        "ball": Ball,
        "ball-complement": BallComplement,
        "annulus": Annulus,
        "box": Box,
        "box-complement": BoxComplement,
        "polygon": Polygon,
        "punctured-space": PuncturedSpace,
    }
    if shape not in builders:
        raise GeometryError(f"domain.shape: unknown shape {shape!r}; expected one of {sorted(builders)}")
    try:
        return builders[shape](**cfg)
    except TypeError as exc:
        raise GeometryError(f"domain: bad parameters for {shape}: {exc}") from None


# -- point queries ---------------------------------------------------------------


def _checked(domain: Domain, x) -> np.ndarray:
    pts = _as_points(x, domain.dim)
    inside = domain.contains(pts)
    if not np.all(inside):
        bad = pts[~inside][0]
        raise OutsideDomainError(f"point {bad.tolist()} is not in the {domain.kind} domain")
    return pts


def distances(domain: Domain, x) -> np.ndarray:
    """Vectorised distance to the boundary for points of the domain."""
    return domain._distance(_checked(domain, x))


def distance(domain: Domain, x) -> float:
    """Euclidean distance from ``x`` to the boundary of ``domain``."""
    return float(distances(domain, x)[0])


def projections(domain: Domain, x):
    """Vectorised nearest boundary points: (locations (m, dim), source labels)."""
    return domain._project(_checked(domain, x))


def project_to_boundary(domain: Domain, x) -> BoundaryPoint:
    loc, src = projections(domain, x)
    return BoundaryPoint(loc[0], src[0])


def distance_gradient(domain: Domain, x) -> np.ndarray:
    """Unit vectors ``(x - P(x)) / d(x)``, the a.e. gradient of the distance."""
    pts = _checked(domain, x)
    loc, _ = domain._project(pts)
    d = domain._distance(pts)
    return (pts - loc) / d[:, None]


def truncate(domain: Domain, eps: float) -> Callable[[np.ndarray], np.ndarray]:
    """Membership predicate of ``{x in domain : d(x) > eps}``; works on batches of points."""
    if not eps > 0:
        raise ParameterDomainError(f"eps must be positive, got {eps!r}")

    def member(x):
        pts = _as_points(x, domain.dim)
        out = np.zeros(len(pts), dtype=bool)
        inside = domain.contains(pts)
        out[inside] = domain._distance(pts[inside]) > eps
        return out if np.ndim(x) > 1 else bool(out[0])

    return member


# -- covering sets -------------------------------------------------------------------


def _covering_matrix(pts, d, proj, ys, eps):
    """Boolean matrix (samples, centres) of membership in the covering sets."""
    diff = pts[:, None, :] - ys[None, :, :]
    dist_y = np.linalg.norm(diff, axis=2)
    normal = pts - proj
    cos = np.einsum("mck,mk->mc", diff, normal) / (dist_y * d[:, None] + 1e-300)
    return (dist_y < (1 + eps) * d[:, None]) & (cos > 1 - eps) & (d[:, None] > eps / 2)


def _check_eps(eps):
    if not (0 < eps < 1):
        raise ParameterDomainError(f"eps must lie in (0, 1), got {eps!r}")


def in_covering_set(domain: Domain, y, eps: float, x) -> bool:
    """Membership of ``x`` in the cone-like set attached to boundary point ``y``."""
    _check_eps(eps)
    pts = _checked(domain, x)
    loc = y.location if isinstance(y, BoundaryPoint) else y
    ys = _as_points(loc, domain.dim)
    d = domain._distance(pts)
    proj, _ = domain._project(pts)
    return bool(_covering_matrix(pts, d, proj, ys, eps)[0, 0])


def uncovered_samples(domain: Domain, centers, eps: float, samples) -> np.ndarray:
    """Samples of the truncated domain lying in none of the covering sets."""
    _check_eps(eps)
    pts = _as_points(samples, domain.dim)
    pts = pts[truncate(domain, eps)(pts)]
    if len(pts) == 0:
        return pts
    ys = np.array([c.location if isinstance(c, BoundaryPoint) else c for c in centers], dtype=float)
    if ys.size == 0:
        return pts
    d = domain._distance(pts)
    proj, _ = domain._project(pts)
    covered = np.zeros(len(pts), dtype=bool)
    for start in range(0, len(ys), 256):
        covered |= _covering_matrix(pts, d, proj, ys[start : start + 256], eps).any(axis=1)
    return pts[~covered]


def default_samples(domain: Domain, eps: float, spacing: float | None = None) -> np.ndarray:
    """Lattice points of the truncated domain, spacing ``eps / 4`` unless given."""
    lo, hi = domain.bounding_box()
    spacing = eps / 4 if spacing is None else spacing
    axes = [np.arange(a + spacing / 2, b, spacing) for a, b in zip(lo, hi)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.dim)
    return pts[truncate(domain, eps)(pts)]


def build_covering(domain: Domain, eps: float, sample_budget: int, samples=None) -> list[BoundaryPoint]:
    """Greedy set cover of the sampled truncated domain by covering sets.

    ``sample_budget`` boundary points are drawn uniformly along the boundary and
    serve as the candidate centres.  Raises :class:`CoverageError` (carrying the
    uncovered points) if the candidates cannot cover every sample.
    """
    if not domain.bounded:
        raise GeometryError(f"covering requires a bounded domain, got {domain.kind}")
    _check_eps(eps)
    if sample_budget < 1:
        raise ParameterDomainError(f"sample_budget must be >= 1, got {sample_budget!r}")
    pts = default_samples(domain, eps) if samples is None else _as_points(samples, domain.dim)
    pts = pts[truncate(domain, eps)(pts)]
    cands = domain.boundary_samples(sample_budget)
    if len(pts) == 0:
        return []
    ys = np.array([c.location for c in cands])
    d = domain._distance(pts)
    proj, _ = domain._project(pts)
    cover = _covering_matrix(pts, d, proj, ys, eps)
    reachable = cover.any(axis=1)
    if not reachable.all():
        bad = pts[~reachable]
        raise CoverageError(
            f"{len(bad)} of {len(pts)} samples are not covered by {len(cands)} boundary candidates",
            uncovered=bad,
        )
    chosen = []
    remaining = np.ones(len(pts), dtype=bool)
    while remaining.any():
        gain = cover[remaining].sum(axis=0)
        j = int(np.argmax(gain))
        chosen.append(cands[j])
        remaining &= ~cover[:, j]
    return chosen
