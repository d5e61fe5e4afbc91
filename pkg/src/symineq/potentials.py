"""Riesz potential of order one on masked grids, and the boundary potential ``T``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft, integrate

from .fields import GridField, Trial
from .geometry import BoundaryNodes, PolyDomain, interpolate_on_edges, ray_fan


@lru_cache(maxsize=None)
def self_cell_constant() -> float:
    """``int_{[-1/2,1/2]^2} |z|^{-1} dz`` by 1-D quadrature in polar form.

    Equals ``4 log(1 + sqrt 2)``; the two are cross-checked on first use.
    """
    # 8 * int_0^{pi/4} (1/(2 cos t)) dt
    val, _ = integrate.quad(lambda t: 0.5 / math.cos(t), 0.0, math.pi / 4, epsabs=0, epsrel=1e-13)
    val *= 8.0
    closed = 4.0 * math.log(1.0 + math.sqrt(2.0))
    if abs(val - closed) > 1e-12 * closed:
        raise RuntimeError(f"self-cell constant mismatch: {val} vs {closed}")
    return val


@dataclass(frozen=True)
class KernelPlan:
    method: str = "fft"
    c0: float = 0.0

    def __post_init__(self):
        if self.method not in ("direct", "fft"):
            raise ValueError(f"unknown potential method {self.method!r}")
        if self.c0 == 0.0:
            object.__setattr__(self, "c0", self_cell_constant())


def _kernel_block(nx: int, ny: int, h: float, c0: float) -> np.ndarray:
    """``h^2/|z|`` on the (2nx, 2ny) wrapped offset lattice, ``h c0`` at the origin."""
    di = np.fft.fftfreq(2 * nx, 1.0 / (2 * nx))
    dj = np.fft.fftfreq(2 * ny, 1.0 / (2 * ny))
    I, J = np.meshgrid(di, dj, indexing="ij")
    r = np.hypot(I, J)
    with np.errstate(divide="ignore"):
        k = h / r
    k[0, 0] = h * c0
    return k


def riesz_potential(f: GridField, plan: KernelPlan = KernelPlan()) -> GridField:
    """``If(x) = sum_y f(y) h^2/|x - y| + f(x) h c0`` over masked cells.

    The fft route zero-pads to twice the grid per side, so the circular
    convolution equals the aperiodic sum.
    """
    if not f.mask.any():
        raise ValueError("empty mask")
    if f.values.ndim != 2:
        raise ValueError("riesz_potential takes a scalar field")
    g = f.grid
    vals = np.where(f.mask, f.values, 0.0)
    if plan.method == "fft":
        K = _kernel_block(g.nx, g.ny, g.h, plan.c0)
        F = np.zeros_like(K)
        F[: g.nx, : g.ny] = vals
        out = fft.irfft2(fft.rfft2(K) * fft.rfft2(F), s=K.shape)[: g.nx, : g.ny]
    else:
        out = _direct(vals, f.mask, g.h, plan.c0)
    return GridField(g, f.mask, np.where(f.mask, out, 0.0))


def _direct(vals, mask, h, c0, chunk=2048):
    idx = np.argwhere(mask)
    src = vals[mask]
    keep = src != 0
    sidx, src = idx[keep], src[keep]
    out = np.zeros(mask.shape)
    res = np.empty(len(idx))
    for a in range(0, len(idx), chunk):
        t = idx[a : a + chunk]
        d = np.hypot(t[:, None, 0] - sidx[None, :, 0], t[:, None, 1] - sidx[None, :, 1])
        with np.errstate(divide="ignore"):
            k = np.where(d > 0, h / d, h * c0)
        res[a : a + chunk] = k @ src
    out[mask] = res
    return out


def riesz_at(f: GridField, plan: KernelPlan, cells) -> np.ndarray:
    """Potential at selected cells ``[(i, j), ...]`` by direct summation."""
    cells = np.atleast_2d(np.asarray(cells))
    src_idx = np.argwhere(f.mask)
    src = f.values[f.mask]
    d = np.hypot(cells[:, None, 0] - src_idx[None, :, 0], cells[:, None, 1] - src_idx[None, :, 1])
    with np.errstate(divide="ignore"):
        k = np.where(d > 0, f.grid.h / d, f.grid.h * plan.c0)
    return k @ src


def boundary_potential(g, domain: PolyDomain, x, n_theta: int = 256,
                       nodes: BoundaryNodes | None = None) -> float:
    """``(2 pi / n) sum_j |g(zeta(x, theta_j))|`` over uniform directions.

    ``g`` is either a callable on boundary points, or nodal values on
    ``nodes`` that are interpolated linearly along the edge that was hit.
    """
    if n_theta < 16:
        raise ValueError("n_theta must be at least 16")
    t, edge, u, thetas = ray_fan(domain, x, n_theta)
    if callable(g):
        z = np.asarray(x, dtype=float) + t[:, None] * thetas
        gv = np.asarray(g(z), dtype=float)
        if gv.ndim == 2:
            gv = np.hypot(gv[:, 0], gv[:, 1])
    else:
        if nodes is None:
            raise ValueError("nodal boundary data needs the node set")
        gv = interpolate_on_edges(nodes, g, edge, u)
    return 2.0 * math.pi / n_theta * float(np.sum(np.abs(gv)))


def pointwise_rhs(trial: Trial, domain: PolyDomain, x, potential: GridField | None = None,
                  cell=None, n_theta: int = 256, plan: KernelPlan = KernelPlan(),
                  eps_mag: GridField | None = None):
    """Both summands of the pointwise bound at ``x``: ``(T|u|(x), I|Eu|(x))``.

    ``potential`` (a precomputed ``I|Eu|`` field) and ``cell`` (the grid index
    of ``x``) are used when given; otherwise ``eps_mag`` is summed directly.
    """
    T = boundary_potential(lambda z: trial.u(z), domain, x, n_theta)
    if potential is not None:
        I = float(potential.values[tuple(cell)])
    elif eps_mag is not None:
        I = float(riesz_at(eps_mag, plan, [cell])[0])
    else:
        raise ValueError("need a precomputed potential or |Eu| samples")
    return T, I
