"""Discrete measures and decreasing rearrangements.

A rearrangement here is a right-continuous, non-increasing step function on
``[0, inf)``: level ``levels[i]`` on ``[breakpoints[i], breakpoints[i+1])``
and zero from ``breakpoints[-1]`` on.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .fields import Grid
from .geometry import BoundaryNodes


@dataclass(frozen=True, eq=False)
class CellMeasure:
    """Nonnegative mass per grid cell (zero off the mask)."""

    grid: Grid
    mask: np.ndarray
    weights: np.ndarray
    label: str = "lebesgue"
    alpha: float = 2.0

    def __post_init__(self):
        if np.any(self.weights < 0):
            raise ValueError("cell weights must be nonnegative")

    @property
    def total(self) -> float:
        return float(self.weights[self.mask].sum())

    def active(self) -> np.ndarray:
        return self.weights[self.mask]


def lebesgue_cells(grid: Grid, mask: np.ndarray) -> CellMeasure:
    return CellMeasure(grid, mask, np.where(mask, grid.cell_area, 0.0))


def point_power_density(grid: Grid, mask: np.ndarray, alpha: float, center) -> CellMeasure:
    """Frostman-type measure with density ``|x - x0|**(alpha - 2)``.

    The distance is floored at half a cell so a cell centered on ``x0`` stays finite.
    """
    if not 1.0 < alpha <= 2.0:
        raise ValueError("alpha must lie in (1, 2]")
    c = grid.centers()
    r = np.hypot(c[..., 0] - center[0], c[..., 1] - center[1])
    r = np.maximum(r, 0.5 * grid.h)
    w = np.where(mask, r ** (alpha - 2.0) * grid.cell_area, 0.0)
    return CellMeasure(grid, mask, w, label=f"frostman(alpha={alpha})", alpha=alpha)


def boundary_measure(nodes: BoundaryNodes) -> np.ndarray:
    return nodes.weights


@dataclass(frozen=True, eq=False)
class DecreasingProfile:
    breakpoints: np.ndarray  # 0 = s_0 < s_1 < ... < s_k
    levels: np.ndarray  # v_1 > ... > v_k > 0

    def __post_init__(self):
        b, v = self.breakpoints, self.levels
        if len(b) != len(v) + 1 or (len(b) and b[0] != 0.0):
            raise ValueError("breakpoints must start at 0 and have one more entry than levels")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(v) >= 0) or np.any(v < 0):
            raise ValueError("levels must be strictly decreasing and nonnegative")

    @classmethod
    def from_steps(cls, steps) -> DecreasingProfile:
        """From ``[(right_endpoint, level), ...]`` pairs, as in the CSV form."""
        steps = list(steps)
        if not steps:
            return cls.zero()
        ends, lv = zip(*steps)
        return cls(np.concatenate([[0.0], np.asarray(ends, float)]), np.asarray(lv, float))

    @classmethod
    def zero(cls) -> DecreasingProfile:
        return cls(np.zeros(1), np.zeros(0))

    @property
    def support(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def top(self) -> float:
        return float(self.levels[0]) if len(self.levels) else 0.0

    def is_zero(self) -> bool:
        return len(self.levels) == 0

    def scaled(self, lam: float) -> DecreasingProfile:
        if lam == 0:
            return self.zero()
        return DecreasingProfile(self.breakpoints, abs(lam) * self.levels)

    def __call__(self, s):
        return profile_eval(self, s)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["breakpoint", "level"])
        for s, v in zip(self.breakpoints[1:], self.levels):
            w.writerow([repr(float(s)), repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> DecreasingProfile:
        rows = list(csv.reader(io.StringIO(text)))
        return cls.from_steps((float(s), float(v)) for s, v in rows[1:])


def decreasing_rearrangement(values, weights) -> DecreasingProfile:
    """Rearrange ``|values|`` with respect to the point masses ``weights``.

    Stable descending sort, cumulative masses as breakpoints, equal values
    merged into one step. Zero values and zero masses carry no support.
    """
    v = np.abs(np.asarray(values, dtype=float)).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if v.shape != w.shape:
        raise ValueError("values and weights must align")
    if np.any(w < 0):
        raise ValueError("negative weights")
    keep = (v > 0) & (w > 0)
    v, w = v[keep], w[keep]
    if len(v) == 0:
        return DecreasingProfile.zero()
    order = np.argsort(-v, kind="stable")
    v, w = v[order], w[order]
    # merge ties: one step per distinct value
    new = np.concatenate([[True], v[1:] != v[:-1]])
    starts = np.flatnonzero(new)
    mass = np.add.reduceat(w, starts)
    return DecreasingProfile(np.concatenate([[0.0], np.cumsum(mass)]), v[starts])


def rearrange_cells(values: np.ndarray, measure: CellMeasure) -> DecreasingProfile:
    """Rearrangement of a grid array (shape of the mask) under a cell measure."""
    return decreasing_rearrangement(values[measure.mask], measure.active())


def profile_eval(p: DecreasingProfile, s):
    """Right-continuous evaluation; zero at and beyond the last breakpoint."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("profile coordinate must be nonnegative")
    idx = np.searchsorted(p.breakpoints, s, side="right") - 1
    padded = np.concatenate([p.levels, [0.0]])
    out = padded[np.minimum(idx, len(p.levels))]
    return float(out) if out.ndim == 0 else out


def distribution(values, weights, t) -> np.ndarray:
    """``nu({|f| > t})`` by direct weighted sum."""
    v = np.abs(np.asarray(values, dtype=float)).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.array([w[v > ti].sum() for ti in t])


def profile_distribution(p: DecreasingProfile, t) -> np.ndarray:
    """Lebesgue measure of ``{f* > t}`` read off the profile."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.array([p.widths[p.levels > ti].sum() for ti in t])


def with_midpoints(pts) -> np.ndarray:
    """Sorted points, the midpoints between neighbours, and one point past the end."""
    pts = np.unique(np.concatenate([[0.0], np.asarray(pts, dtype=float)]))
    mids = 0.5 * (pts[1:] + pts[:-1])
    return np.unique(np.concatenate([pts, mids, [1.5 * pts[-1] + 1.0]]))


def scan_grid(*profiles: DecreasingProfile) -> np.ndarray:
    """Breakpoints of all profiles plus midpoints: step functions are determined there."""
    return with_midpoints(np.concatenate([p.breakpoints for p in profiles]))


def subadditivity_check(f, g, weights) -> float:
    """Max over a scan grid of ``(f+g)*(s) - f*(s/2) - g*(s/2)``; should be ``<= 0``."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    fs = decreasing_rearrangement(f, weights)
    gs = decreasing_rearrangement(g, weights)
    hs = decreasing_rearrangement(f + g, weights)
    # jumps of s -> f*(s/2) sit at twice the breakpoints of f*
    s = with_midpoints(np.concatenate([hs.breakpoints, 2 * fs.breakpoints, 2 * gs.breakpoints]))
    return float(np.max(hs(s) - fs(s / 2) - gs(s / 2)))
