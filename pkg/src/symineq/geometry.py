"""Bounded polygonal domains in the plane.

A domain is one counterclockwise outer ring plus optional clockwise holes.
Everything here is a pure function of immutable vertex data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# ray parameter tolerance for edge intersections
T_TOL = 1e-12
# relative (to diameter) guard band around the boundary for ray origins
GUARD = 1e-9


class GeometryError(ValueError):
    """Invalid polygon data, or a ray query that the geometry cannot answer."""


class NoHit(GeometryError):
    """A ray from an interior point escaped; only possible for corrupted geometry."""


def _signed_area(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_cross(p1, p2, q1, q2) -> bool:
    """Closed-segment intersection test (touching counts)."""

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        scale = max(abs(b[0] - a[0]) + abs(b[1] - a[1]), 1e-300) * max(
            abs(c[0] - a[0]) + abs(c[1] - a[1]), 1e-300
        )
        if abs(v) <= 1e-14 * scale:
            return 0
        return 1 if v > 0 else -1

    def on_seg(a, b, c):
        return min(a[0], b[0]) - 1e-15 <= c[0] <= max(a[0], b[0]) + 1e-15 and min(
            a[1], b[1]
        ) - 1e-15 <= c[1] <= max(a[1], b[1]) + 1e-15

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    if d1 == 0 and on_seg(q1, q2, p1):
        return True
    if d2 == 0 and on_seg(q1, q2, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, q1):
        return True
    if d4 == 0 and on_seg(p1, p2, q2):
        return True
    return False


@dataclass(frozen=True)
class RayHit:
    """First boundary point seen from ``x`` along a direction.

    ``edge`` and ``u`` locate ``zeta`` on the polygon (edge index and the
    parameter along that edge), which is what trace interpolation needs.
    """

    zeta: tuple[float, float]
    b_dist: float
    edge: int = -1
    u: float = 0.0

    @property
    def finite(self) -> bool:
        return math.isfinite(self.b_dist)


INFINITE = math.inf


@dataclass(frozen=True, eq=False)
class PolyDomain:
    rings: tuple[np.ndarray, ...]
    edges: np.ndarray = field(init=False, repr=False)
    bounding_box: tuple[float, float, float, float] = field(init=False)
    perimeter: float = field(init=False)
    area: float = field(init=False)

    def __post_init__(self):
        rings = []
        for k, ring in enumerate(self.rings):
            r = np.asarray(ring, dtype=float)
            if r.ndim != 2 or r.shape[1] != 2 or len(r) < 3:
                raise GeometryError(f"ring {k}: need at least 3 planar vertices")
            if np.allclose(r[0], r[-1]):
                r = r[:-1]
            if not np.all(np.isfinite(r)):
                raise GeometryError(f"ring {k}: non-finite vertex")
            area = _signed_area(r)
            if area == 0.0:
                raise GeometryError(f"ring {k}: degenerate (zero area)")
            # outer ring counterclockwise, holes clockwise
            if (k == 0) != (area > 0):
                r = r[::-1]
            r.setflags(write=False)
            rings.append(r)
        object.__setattr__(self, "rings", tuple(rings))

        starts = np.concatenate(rings)
        ends = np.concatenate([np.roll(r, -1, axis=0) for r in rings])
        edges = np.stack([starts, ends], axis=1)
        lengths = np.hypot(*(edges[:, 1] - edges[:, 0]).T)
        if np.any(lengths == 0):
            raise GeometryError("repeated vertex (zero-length edge)")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        self._check_simple()

        outer = rings[0]
        for k, hole in enumerate(rings[1:], start=1):
            if not np.all(contains_points(_OuterOnly(outer), hole)):
                raise GeometryError(f"hole {k} is not strictly inside the outer ring")
        lo, hi = outer.min(axis=0), outer.max(axis=0)
        object.__setattr__(self, "bounding_box", (lo[0], lo[1], hi[0], hi[1]))
        object.__setattr__(self, "perimeter", float(math.fsum(lengths)))
        object.__setattr__(self, "area", float(sum(_signed_area(r) for r in rings)))

    def _check_simple(self):
        e = self.edges
        ring_of = np.concatenate([np.full(len(r), k) for k, r in enumerate(self.rings)])
        offsets = np.cumsum([0] + [len(r) for r in self.rings])
        m = len(e)
        for i in range(m):
            for j in range(i + 1, m):
                if ring_of[i] == ring_of[j]:
                    n = len(self.rings[ring_of[i]])
                    a, b = i - offsets[ring_of[i]], j - offsets[ring_of[j]]
                    if b - a == 1 or (a == 0 and b == n - 1):
                        continue
                if _segments_cross(e[i, 0], e[i, 1], e[j, 0], e[j, 1]):
                    raise GeometryError(
                        f"boundary self-intersects: edges {i} and {j} meet"
                    )

    @property
    def diameter(self) -> float:
        pts = self.rings[0]
        d = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(*(self.edges[:, 1] - self.edges[:, 0]).T)

    def to_json(self) -> list:
        return [r.tolist() for r in self.rings]


class _OuterOnly:
    """Minimal stand-in so the hole check can reuse ``contains_points``."""

    def __init__(self, ring):
        self.edges = np.stack([ring, np.roll(ring, -1, axis=0)], axis=1)
        self.rings = (ring,)


def boundary_distance(domain, pts) -> np.ndarray:
    """Euclidean distance from each point to the polygon boundary."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    a = domain.edges[:, 0]
    d = domain.edges[:, 1] - a
    out = np.full(len(pts), np.inf)
    for k in range(len(a)):
        w = pts - a[k]
        t = np.clip((w @ d[k]) / (d[k] @ d[k]), 0.0, 1.0)
        out = np.minimum(out, np.hypot(*(w - t[:, None] * d[k]).T))
    return out


def contains_points(domain, pts, *, tol: float | None = None) -> np.ndarray:
    """Vectorised even-odd test; points on the boundary are outside."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    for (x1, y1), (x2, y2) in domain.edges:
        straddles = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= straddles & (x < xc)
    if tol is None:
        lo = domain.rings[0].min(axis=0)
        hi = domain.rings[0].max(axis=0)
        tol = 1e-12 * float(np.hypot(*(hi - lo)))
    if inside.any():
        on_bd = boundary_distance(domain, pts[inside]) <= tol
        idx = np.flatnonzero(inside)
        inside[idx[on_bd]] = False
    return inside


def contains(domain: PolyDomain, x) -> bool:
    return bool(contains_points(domain, [x])[0])


def _first_hits(domain: PolyDomain, x, thetas: np.ndarray):
    """Smallest positive ray parameter per direction, with edge index and edge parameter."""
    a = domain.edges[:, 0]
    e = domain.edges[:, 1] - a
    w = a - np.asarray(x, dtype=float)
    # solve x + t*theta = a + u*e  =>  t*theta - u*e = w
    th = thetas[:, None, :]
    den = th[..., 0] * (-e[None, :, 1]) - th[..., 1] * (-e[None, :, 0])
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t = (w[None, :, 0] * (-e[None, :, 1]) - w[None, :, 1] * (-e[None, :, 0])) / den
        u = (th[..., 0] * w[None, :, 1] - th[..., 1] * w[None, :, 0]) / den
    scale = np.abs(e).sum(-1)[None, :] + np.abs(w).sum(-1)[None, :]
    ok = (np.abs(den) > 1e-14 * np.abs(e).sum(-1)[None, :]) & (t > T_TOL * scale)
    ok &= (u >= -T_TOL) & (u <= 1 + T_TOL)
    t = np.where(ok, t, np.inf)
    j = np.argmin(t, axis=1)
    rows = np.arange(len(thetas))
    return t[rows, j], j, np.clip(u[rows, j], 0.0, 1.0)


def check_ray_origin(domain: PolyDomain, x) -> None:
    if not contains(domain, x):
        raise GeometryError(f"ray origin {tuple(x)} is not inside the domain")
    if boundary_distance(domain, [x])[0] <= GUARD * domain.diameter:
        raise GeometryError(f"ray origin {tuple(x)} lies in the boundary guard band")


def ray_first_hit(domain: PolyDomain, x, theta) -> RayHit:
    """First point of the boundary met by the ray ``x + t*theta``, ``t > 0``.

    Vertices count as hits; the minimum is taken over all edge
    intersections with a ``1e-12`` tolerance on the ray parameter.
    """
    theta = np.asarray(theta, dtype=float)
    if abs(np.hypot(*theta) - 1.0) > 1e-12:
        raise ValueError("theta must be a unit vector")
    check_ray_origin(domain, x)
    t, j, u = _first_hits(domain, x, theta[None, :])
    if not np.isfinite(t[0]):
        raise NoHit(f"ray from {tuple(x)} along {tuple(theta)} left a bounded domain")
    z = np.asarray(x, dtype=float) + t[0] * theta
    return RayHit((float(z[0]), float(z[1])), float(t[0]), int(j[0]), float(u[0]))


def ray_fan(domain: PolyDomain, x, n_theta: int):
    """First hits for ``n_theta`` uniform directions offset by half a step.

    Returns ``(b_dist, edge, u, thetas)`` arrays. The half-step offset keeps
    rays off axis-aligned vertex directions.
    """
    check_ray_origin(domain, x)
    ang = 2.0 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    thetas = np.column_stack([np.cos(ang), np.sin(ang)])
    t, j, u = _first_hits(domain, x, thetas)
    if not np.all(np.isfinite(t)):
        raise NoHit(f"some ray from {tuple(x)} left a bounded domain")
    return t, j, u, thetas


@dataclass(frozen=True, eq=False)
class BoundaryNodes:
    """Midpoint nodes on the boundary with arclength weights."""

    points: np.ndarray
    weights: np.ndarray
    edge: np.ndarray
    u: np.ndarray
    h_b: float

    def __len__(self):
        return len(self.weights)


def boundary_discretize(domain: PolyDomain, h_b: float) -> BoundaryNodes:
    """Split each edge into ``ceil(length / h_b)`` equal pieces, one node per piece."""
    if not h_b > 0:
        raise ValueError("h_b must be positive")
    pts, wts, eid, us = [], [], [], []
    for k, ((a, b), length) in enumerate(zip(domain.edges, domain.edge_lengths)):
        m = max(1, math.ceil(length / h_b - 1e-9))
        u = (np.arange(m) + 0.5) / m
        pts.append(a + u[:, None] * (b - a))
        wts.append(np.full(m, length / m))
        eid.append(np.full(m, k))
        us.append(u)
    return BoundaryNodes(
        np.concatenate(pts), np.concatenate(wts), np.concatenate(eid), np.concatenate(us), h_b
    )


def interpolate_on_edges(nodes: BoundaryNodes, values, edge, u) -> np.ndarray:
    """Piecewise-linear interpolation of nodal values at points given by (edge, u)."""
    values = np.asarray(values, dtype=float)
    edge = np.asarray(edge)
    u = np.asarray(u, dtype=float)
    out = np.empty(len(edge))
    for k in np.unique(edge):
        sel = nodes.edge == k
        hit = edge == k
        out[hit] = np.interp(u[hit], nodes.u[sel], values[sel])
    return out


# ---------------------------------------------------------------- Frostman


@dataclass(frozen=True)
class FrostmanProbe:
    """Sampling plan for the Frostman sup.

    Centers are every ``center_stride``-th cell center in each direction;
    radii are ``n_radii`` log-spaced values from ``r_min_cells * h`` to the
    domain diameter. ``refined()`` returns a plan whose samples contain these.
    """

    center_stride: int = 8
    n_radii: int = 17
    r_min_cells: float = 4.0

    def refined(self) -> FrostmanProbe:
        return FrostmanProbe(
            max(1, self.center_stride // 2), 2 * self.n_radii - 1, self.r_min_cells
        )


def frostman_constant(measure, alpha: float, probe: FrostmanProbe = FrostmanProbe()) -> float:
    """Lower estimate of ``sup mu(B_r(x) ∩ Ω) / r**alpha`` over the probe.

    ``measure`` is a ``CellMeasure`` (see :mod:`symineq.rearrange`); its cells
    are Ω-cells, so the intersection with Ω is automatic.
    """
    if not 1.0 < alpha <= 2.0:
        raise ValueError("alpha must lie in (1, 2] in the plane")
    grid = measure.grid
    if probe.center_stride < 1 or probe.n_radii < 1:
        raise ValueError("empty probe set")
    ii, jj = np.nonzero(measure.mask)
    pick = (ii % probe.center_stride == 0) & (jj % probe.center_stride == 0)
    centers = grid.centers()[ii[pick], jj[pick]]
    if len(centers) == 0:
        raise ValueError("empty probe set")
    pts = grid.centers()[measure.mask]
    w = measure.weights[measure.mask]
    if w.sum() == 0:
        return 0.0
    diam = float(np.hypot(grid.nx, grid.ny) * grid.h)
    r_min = probe.r_min_cells * grid.h
    radii = np.geomspace(r_min, max(diam, r_min), probe.n_radii)
    best = 0.0
    for c in centers:
        d = np.hypot(*(pts - c).T)
        order = np.argsort(d, kind="stable")
        cum = np.concatenate([[0.0], np.cumsum(w[order])])
        k = np.searchsorted(d[order], radii, side="left")  # cells with d < r
        best = max(best, float(np.max(cum[k] / radii**alpha)))
    return best


# ----------------------------------------------------------------- presets


def _star(n_points=5, r_out=0.5, r_in=0.2, center=(0.5, 0.5)):
    k = np.arange(2 * n_points)
    r = np.where(k % 2 == 0, r_out, r_in)
    ang = np.pi / 2 + np.pi * k / n_points
    return np.column_stack([center[0] + r * np.cos(ang), center[1] + r * np.sin(ang)])


def _rooms(width=0.04):
    # three unit-ish rooms joined by narrow corridors of the given width
    w2 = width / 2
    c = 0.5
    return np.array(
        [
            (0.0, 0.0), (1.0, 0.0), (1.0, c - w2), (1.5, c - w2), (1.5, 0.0),
            (2.5, 0.0), (2.5, c - w2), (3.0, c - w2), (3.0, 0.0), (4.0, 0.0),
            (4.0, 1.0), (3.0, 1.0), (3.0, c + w2), (2.5, c + w2), (2.5, 1.0),
            (1.5, 1.0), (1.5, c + w2), (1.0, c + w2), (1.0, 1.0), (0.0, 1.0),
        ]
    )


PRESETS = {
    "square": lambda: [[(0, 0), (1, 0), (1, 1), (0, 1)]],
    "L-shape": lambda: [[(0, 0), (1, 0), (1, 0.5), (0.5, 0.5), (0.5, 1), (0, 1)]],
    "star": lambda: [_star()],
    "rooms": lambda: [_rooms()],
    "square-with-hole": lambda: [
        [(0, 0), (1, 0), (1, 1), (0, 1)],
        [(0.375, 0.375), (0.375, 0.625), (0.625, 0.625), (0.625, 0.375)],
    ],
}
PRESETS["rooms-and-passages"] = PRESETS["rooms"]


def preset(name: str) -> PolyDomain:
    try:
        rings = PRESETS[name]()
    except KeyError:
        raise GeometryError(f"unknown domain preset {name!r}; have {sorted(PRESETS)}") from None
    return PolyDomain(tuple(np.asarray(r, dtype=float) for r in rings))


def parse_rings(obj) -> PolyDomain:
    """Build a domain from a list of rings (outer first), or ``{"rings": [...]}``."""
    if isinstance(obj, dict):
        obj = obj.get("rings", obj.get("vertices"))
    if not isinstance(obj, list) or not obj:
        raise GeometryError("polygon must be a non-empty list of rings")
    try:
        single = np.asarray(obj, dtype=float).ndim == 2
    except ValueError:  # ragged: several rings
        single = False
    if single:
        obj = [obj]
    return PolyDomain(tuple(np.asarray(r, dtype=float) for r in obj))


def load_polygon(path: str | Path) -> PolyDomain:
    """Read a polygon file.

    JSON: a list of rings, each a list of ``[x, y]`` pairs, outer ring first.
    Plain text: one ``x y`` pair per line, rings separated by blank lines,
    ``#`` starts a comment.
    """
    text = Path(path).read_text()
    if Path(path).suffix.lower() == ".json" or text.lstrip().startswith(("[", "{")):
        return parse_rings(json.loads(text))
    rings, cur = [], []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            if cur:
                rings.append(cur)
                cur = []
            continue
        x, y = line.replace(",", " ").split()
        cur.append((float(x), float(y)))
    if cur:
        rings.append(cur)
    return parse_rings(rings)


def resolve_domain(spec) -> PolyDomain:
    """A preset name, a polygon file path, or an in-line ring list."""
    if isinstance(spec, PolyDomain):
        return spec
    if isinstance(spec, str):
        if spec in PRESETS:
            return preset(spec)
        if Path(spec).exists():
            return load_polygon(spec)
        raise GeometryError(f"unknown domain {spec!r}")
    return parse_rings(spec)
