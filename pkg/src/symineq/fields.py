"""Trial vector fields, masked grids and the symmetric gradient."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import BoundaryNodes, PolyDomain, contains_points


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centred lattice; arrays are indexed ``[i, j]`` with ``i`` along x."""

    x0: float
    y0: float
    h: float
    nx: int
    ny: int

    def centers(self) -> np.ndarray:
        xs = self.x0 + (np.arange(self.nx) + 0.5) * self.h
        ys = self.y0 + (np.arange(self.ny) + 0.5) * self.h
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([X, Y], axis=-1)

    @property
    def cell_area(self) -> float:
        return self.h * self.h


def make_grid(domain: PolyDomain, N: int) -> tuple[Grid, np.ndarray]:
    """Grid with ``N`` cells across the longer bounding-box side, plus the Ω mask.

    A cell is in Ω iff its center is.
    """
    if N < 2:
        raise ValueError("grid resolution N must be at least 2")
    x0, y0, x1, y1 = domain.bounding_box
    h = max(x1 - x0, y1 - y0) / N
    nx = max(1, math.ceil((x1 - x0) / h - 1e-9))
    ny = max(1, math.ceil((y1 - y0) / h - 1e-9))
    grid = Grid(float(x0), float(y0), float(h), nx, ny)
    mask = contains_points(domain, grid.centers().reshape(-1, 2)).reshape(nx, ny)
    return grid, mask


@dataclass(frozen=True, eq=False)
class GridField:
    """Samples on a masked grid; ``values`` has shape ``(..., nx, ny)``, zero off the mask."""

    grid: Grid
    mask: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape[-2:] != self.mask.shape:
            raise ValueError("values and mask disagree in shape")

    def magnitude(self) -> np.ndarray:
        if self.values.ndim == 2:
            return np.abs(self.values)
        return np.sqrt((self.values**2).sum(axis=0))


@dataclass(frozen=True, eq=False)
class TensorField:
    """Symmetric 2x2 matrix per cell, stored as the three entries (e11, e12, e22)."""

    grid: Grid
    mask: np.ndarray
    e11: np.ndarray
    e12: np.ndarray
    e22: np.ndarray
    dropped: int = 0

    def matrix(self) -> np.ndarray:
        return np.stack(
            [np.stack([self.e11, self.e12], -1), np.stack([self.e12, self.e22], -1)], -2
        )

    def frobenius(self) -> np.ndarray:
        """Pointwise Frobenius norm, zero off the mask."""
        f = np.sqrt(self.e11**2 + 2.0 * self.e12**2 + self.e22**2)
        return np.where(self.mask, f, 0.0)


def _partial(v: np.ndarray, mask: np.ndarray, h: float, axis: int):
    """Second-order difference along ``axis``: central, else one-sided, else undefined."""
    pad = [(0, 0), (0, 0)]
    pad[axis] = (2, 2)
    vp = np.pad(np.where(mask, v, 0.0), pad)
    mp = np.pad(mask, pad)
    n = mask.shape[axis]

    def sh(arr, k):
        sl = [slice(None), slice(None)]
        sl[axis] = slice(2 + k, 2 + k + n)
        return arr[tuple(sl)]

    m_m2, m_m1, m_p1, m_p2 = (sh(mp, k) for k in (-2, -1, 1, 2))
    u0 = v
    central = (sh(vp, 1) - sh(vp, -1)) / (2 * h)
    forward = (-3 * u0 + 4 * sh(vp, 1) - sh(vp, 2)) / (2 * h)
    backward = (3 * u0 - 4 * sh(vp, -1) + sh(vp, -2)) / (2 * h)
    use_c = m_m1 & m_p1
    use_f = ~use_c & m_p1 & m_p2
    use_b = ~use_c & ~use_f & m_m1 & m_m2
    out = np.where(use_c, central, np.where(use_f, forward, np.where(use_b, backward, 0.0)))
    return out, use_c | use_f | use_b


def sym_gradient(u: GridField) -> TensorField:
    """Finite-difference symmetric gradient ``(D + D^T) / 2`` of a 2-component field.

    Cells with no usable second-order stencil in some direction are dropped
    from the output mask (a warning reports how many).
    """
    if u.values.shape[0] != 2 or u.values.ndim != 3:
        raise ValueError("sym_gradient needs a two-component field")
    h = u.grid.h
    d1x, ok1 = _partial(u.values[0], u.mask, h, 0)
    d1y, ok2 = _partial(u.values[0], u.mask, h, 1)
    d2x, _ = _partial(u.values[1], u.mask, h, 0)
    d2y, _ = _partial(u.values[1], u.mask, h, 1)
    mask = u.mask & ok1 & ok2
    dropped = int(u.mask.sum() - mask.sum())
    if dropped:
        warnings.warn(f"sym_gradient: dropped {dropped} cells without a usable stencil")
    z = lambda a: np.where(mask, a, 0.0)  # noqa: E731
    return TensorField(u.grid, mask, z(d1x), z(0.5 * (d1y + d2x)), z(d2y), dropped)


# ------------------------------------------------------------------ trials


class UnknownTrial(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Trial:
    """Closed-form vector field with its symmetric gradient.

    ``u(pts)`` maps ``(..., 2)`` points to ``(..., 2)`` values; ``eps(pts)``
    returns ``(..., 2, 2)`` symmetric matrices.
    """

    spec: dict
    u: Callable[[np.ndarray], np.ndarray]
    eps: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    focus: tuple = ()  # ((x, y, feature_length), ...) where quadrature should refine

    def scaled(self, lam: float) -> Trial:
        return Trial(
            dict(self.spec, scale=self.spec.get("scale", 1.0) * lam),
            lambda p: lam * self.u(p),
            lambda p: lam * self.eps(p),
            self.label,
            self.focus,
        )

    def eps_frobenius(self, pts) -> np.ndarray:
        e = self.eps(np.asarray(pts, dtype=float))
        return np.sqrt((e**2).sum(axis=(-1, -2)))

    def sample(self, grid: Grid, mask: np.ndarray) -> GridField:
        vals = self.u(grid.centers())
        vals = np.where(mask[..., None], vals, 0.0)
        return GridField(grid, mask, np.moveaxis(vals, -1, 0))

    def eps_field(self, grid: Grid, mask: np.ndarray) -> TensorField:
        e = self.eps(grid.centers())
        z = lambda a: np.where(mask, a, 0.0)  # noqa: E731
        return TensorField(grid, mask, z(e[..., 0, 0]), z(e[..., 0, 1]), z(e[..., 1, 1]))


def _sym(m):
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def _rigid(b=(0.0, 0.0), omega=0.0):
    b = np.asarray(b, dtype=float)
    w = float(omega)

    def u(p):
        out = np.empty_like(p, dtype=float)
        out[..., 0] = b[0] - w * p[..., 1]
        out[..., 1] = b[1] + w * p[..., 0]
        return out

    return u, lambda p: np.zeros(p.shape[:-1] + (2, 2))


def _linear(A, b=(0.0, 0.0)):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    E = _sym(A)
    return (lambda p: p @ A.T + b), (lambda p: np.broadcast_to(E, p.shape[:-1] + (2, 2)).copy())


# radial profiles: each returns (phi(r), phi'(r)); all vanish at r = 0


def _phi_power(gamma=2.0, c=1.0):
    if gamma <= 0:
        raise ValueError("power profile needs gamma > 0 for continuity at the center")

    def f(r):
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = c * r**gamma
            at0 = 0.0 if gamma > 1 else (c if gamma == 1 else np.inf)
            dphi = np.where(r > 0, c * gamma * r ** (gamma - 1), at0)
        return phi, dphi

    return f


def _phi_bump(R=0.25, c=1.0):
    def f(r):
        s = r / R
        inside = s < 1
        phi = np.where(inside, c * s * (1 - s**2) ** 2, 0.0)
        dphi = np.where(inside, c / R * ((1 - s**2) ** 2 - 4 * s**2 * (1 - s**2)), 0.0)
        return phi, dphi

    return f


def _phi_trunclog(R=0.5, k=2.0, c=1.0):
    # linear ramp up to delta = R e^{-k}, then log(R/r) down to 0 at R
    delta = R * math.exp(-k)

    def f(r):
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = np.where(r < delta, k * r / delta, np.where(r < R, np.log(R / r), 0.0))
            dphi = np.where(r < delta, k / delta, np.where(r < R, -1.0 / r, 0.0))
        return c * phi, c * dphi

    return f


PROFILES = {"power": _phi_power, "bump": _phi_bump, "truncated-log": _phi_trunclog}


def _radial(phi="power", center=(0.5, 0.5), **params):
    try:
        prof = PROFILES[phi](**params)
    except KeyError:
        raise UnknownTrial(f"unknown radial profile {phi!r}") from None
    x0 = np.asarray(center, dtype=float)

    def u(p):
        d = p - x0
        r = np.hypot(d[..., 0], d[..., 1])
        val, _ = prof(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            fac = np.where(r > 0, val / r, 0.0)
        return fac[..., None] * d

    def eps(p):
        # grad(phi(r) e_r) = phi' e e^T + (phi / r) (I - e e^T), already symmetric
        d = p - x0
        r = np.hypot(d[..., 0], d[..., 1])
        val, dval = prof(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            e = np.where(r[..., None] > 0, d / r[..., None], 0.0)
            q = np.where(r > 0, val / r, dval)
        ee = e[..., :, None] * e[..., None, :]
        eye = np.eye(2)
        return dval[..., None, None] * ee + q[..., None, None] * (eye - ee)

    return u, eps


def _log_profile(R, k):
    # psi = min(k, log(R/r))_+, Lipschitz with a plateau of height k
    def f(r):
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log(R / r)
        psi = np.clip(lg, 0.0, k)
        dpsi = np.where((lg > 0) & (lg < k), -1.0 / np.where(r > 0, r, 1.0), 0.0)
        return psi, dpsi

    return f


def _directional(profile="truncated-log", center=(0.5, 0.5), direction=(1.0, 0.0), **params):
    """Scalar radial profile times a fixed vector: ``psi(|x - x0|) e``."""
    if profile == "truncated-log":
        prof = _log_profile(params.get("R", 0.5), params.get("k", 2.0))
    elif profile == "bump":
        R = params.get("R", 0.25)

        def prof(r):
            s = r / R
            inside = s < 1
            return (
                np.where(inside, (1 - s**2) ** 2, 0.0),
                np.where(inside, -4 * s * (1 - s**2) / R, 0.0),
            )
    else:
        raise UnknownTrial(f"unknown directional profile {profile!r}")
    x0 = np.asarray(center, dtype=float)
    e = np.asarray(direction, dtype=float)
    e = e / np.hypot(*e)
    c = params.get("c", 1.0)

    def u(p):
        d = p - x0
        return c * prof(np.hypot(d[..., 0], d[..., 1]))[0][..., None] * e

    def eps(p):
        d = p - x0
        r = np.hypot(d[..., 0], d[..., 1])
        _, dpsi = prof(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            grad = np.where(r[..., None] > 0, dpsi[..., None] * d / np.where(r > 0, r, 1.0)[..., None], 0.0)
        g = c * e[..., :, None] * grad[..., None, :]  # d u_i / d x_j = e_i dpsi/dx_j
        return _sym(g)

    return u, eps


def make_trial(spec: dict) -> Trial:
    """Build a closed-form trial from a tagged record.

    Tags: ``rigid`` (b, omega), ``linear`` (A, b), ``radial`` (phi in
    power/bump/truncated-log, center, profile parameters), ``directional``
    (scalar profile times a fixed direction), ``sum`` (terms).
    An optional ``scale`` multiplies the whole field.
    """
    spec = dict(spec)
    tag = spec.pop("tag", None)
    scale = float(spec.pop("scale", 1.0))
    label = spec.pop("label", tag or "")
    if tag == "rigid":
        u, eps = _rigid(**spec)
    elif tag == "linear":
        u, eps = _linear(**spec)
    elif tag == "radial":
        u, eps = _radial(**spec)
    elif tag == "directional":
        u, eps = _directional(**spec)
    elif tag == "sum":
        parts = [make_trial(t) for t in spec.get("terms", [])]
        if not parts:
            raise UnknownTrial("sum needs at least one term")
        u = lambda p: sum(t.u(p) for t in parts)  # noqa: E731
        eps = lambda p: sum(t.eps(p) for t in parts)  # noqa: E731
    else:
        raise UnknownTrial(f"unknown trial tag {tag!r}")
    full = dict(spec, tag=tag)
    focus = tuple(_parts_focus(parts)) if tag == "sum" else _focus(tag, spec)
    trial = Trial(full, u, eps, label, focus)
    return trial.scaled(scale) if scale != 1.0 else trial


def _parts_focus(parts):
    for t in parts:
        yield from t.focus


def _focus(tag, spec) -> tuple:
    """Singular points of a closed-form trial and the length scale to resolve there."""
    c = spec.get("center", (0.5, 0.5))
    shape = spec.get("phi", spec.get("profile"))
    if tag == "radial" and shape == "power" and spec.get("gamma", 2.0) < 1:
        return ((float(c[0]), float(c[1]), 0.0),)
    if tag in ("radial", "directional") and shape == "truncated-log":
        R = spec.get("R", 0.5)
        return ((float(c[0]), float(c[1]), R * math.exp(-spec.get("k", 2.0))),)
    return ()


def quadrature_points(grid: Grid, mask: np.ndarray, focus=(), c: float = 8.0,
                      default_depth: int = 10, max_depth: int = 40):
    """Cell-center quadrature on the mask, refined dyadically around ``focus`` points.

    Around each ``(x, y, ell)`` every cell of size ``hc`` whose center lies
    within ``c * hc`` is split into four, until cells are below ``ell / 4``
    (or ``default_depth`` levels when ``ell`` is 0). Children of a masked cell
    are all kept, so the total area equals that of the base grid.
    Returns ``(points, cell_size, area)``.
    """
    pts = grid.centers()[mask]
    hl = np.full(len(pts), grid.h)
    off = np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]], dtype=float)
    for x, y, ell in focus:
        if ell <= 0:
            depth = default_depth
        else:
            depth = min(max_depth, math.ceil(math.log2(4 * grid.h) - math.log2(ell)))  # no overflow for tiny ell
        depth = max(0, depth)
        hc = grid.h
        for _ in range(depth):
            sel = (hl == hc) & (np.hypot(pts[:, 0] - x, pts[:, 1] - y) < c * hc)
            if not sel.any():
                break
            kids = (pts[sel][:, None, :] + 0.25 * hc * off[None]).reshape(-1, 2)
            pts = np.concatenate([pts[~sel], kids])
            hl = np.concatenate([hl[~sel], np.full(len(kids), 0.5 * hc)])
            hc *= 0.5
    return pts, hl, hl * hl


def make_trial_field(spec: dict, domain: PolyDomain, N: int):
    """Closed-form trial together with its samples on the masked grid of ``domain``."""
    trial = make_trial(spec)
    grid, mask = make_grid(domain, N)
    return trial, trial.sample(grid, mask)


def boundary_trace(trial: Trial, nodes: BoundaryNodes) -> np.ndarray:
    """Exact trial values at boundary nodes, shape ``(M, 2)``."""
    return trial.u(nodes.points)


DEFAULT_CATALOG = [
    {"tag": "rigid", "b": [1.0, 0.5], "omega": 0.0, "label": "rigid-translation"},
    {"tag": "rigid", "b": [0.2, -0.3], "omega": 0.7, "label": "rigid-rotation"},
    {"tag": "linear", "A": [[1.0, 0.3], [-0.2, 0.5]], "label": "linear"},
    {"tag": "radial", "phi": "power", "gamma": 2.0, "center": [0.3, 0.3], "label": "radial-r2"},
    {"tag": "radial", "phi": "power", "gamma": 0.5, "center": [0.3, 0.3], "label": "radial-sqrt"},
    {"tag": "radial", "phi": "bump", "R": 0.2, "center": [0.25, 0.25], "label": "radial-bump"},
    {"tag": "directional", "profile": "truncated-log", "R": 0.2, "k": 2.0,
     "center": [0.25, 0.25], "direction": [1.0, 1.0], "label": "trunclog"},
    {"tag": "sum", "label": "rigid+bump", "terms": [
        {"tag": "rigid", "b": [0.5, 0.0], "omega": 0.2},
        {"tag": "radial", "phi": "bump", "R": 0.2, "center": [0.25, 0.25]},
    ]},
]
