"""One-dimensional Hardy-type kernels on non-increasing step functions.

For ``phi`` a step function with cumulative integral ``Phi`` and
``a = (n-1)/alpha``:

    K1(s) = s**-a * Phi(s**(n/alpha))
    K2(s) = int_{s**(n/alpha)}^inf r**(-(n-1)/n) phi(r) dr
    K3(s) = s**-a * Phi(s**a)

All three are evaluated in closed form: ``Phi`` is piecewise linear and the
weight in ``K2`` has an elementary antiderivative on each step.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .norms import NormSpec
from .rearrange import DecreasingProfile, decreasing_rearrangement

StepFn = DecreasingProfile

KERNELS = ("K1", "K2", "K3")


def _check_s(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(~(s > 0)):
        raise ValueError("kernels are defined for s > 0")
    return s


def _check_params(alpha, n):
    if n < 2:
        raise ValueError("dimension n must be at least 2")
    if not n - 1 < alpha <= n:
        raise ValueError("alpha must lie in (n-1, n]")


def cumulative(phi: StepFn, t) -> np.ndarray:
    """``Phi(t) = int_0^t phi``; exact, since ``Phi`` is linear between breakpoints."""
    if phi.is_zero():
        return np.zeros_like(np.asarray(t, dtype=float))
    C = np.concatenate([[0.0], np.cumsum(phi.levels * phi.widths)])
    return np.interp(t, phi.breakpoints, C)


def _weighted_tail(phi: StepFn, c, n: int) -> np.ndarray:
    """``int_c^inf r**(-(n-1)/n) phi(r) dr`` using the antiderivative ``n r**(1/n)``."""
    c = np.asarray(c, dtype=float)
    if phi.is_zero():
        return np.zeros_like(c)
    b = phi.breakpoints
    F = n * b ** (1.0 / n)
    P = np.concatenate([[0.0], np.cumsum(phi.levels * np.diff(F))])
    i = np.clip(np.searchsorted(b, c, side="right") - 1, 0, len(phi.levels))
    lv = np.concatenate([phi.levels, [0.0]])[i]
    cc = np.minimum(c, b[-1])
    head = P[i] + lv * (n * cc ** (1.0 / n) - F[i])
    return P[-1] - head


def kernel_K1(phi: StepFn, s, alpha: float = 2.0, n: int = 2):
    _check_params(alpha, n)
    s = _check_s(s)
    out = s ** (-(n - 1) / alpha) * cumulative(phi, s ** (n / alpha))
    return float(out) if out.ndim == 0 else out


def kernel_K2(phi: StepFn, s, alpha: float = 2.0, n: int = 2):
    _check_params(alpha, n)
    s = _check_s(s)
    out = _weighted_tail(phi, s ** (n / alpha), n)
    return float(out) if out.ndim == 0 else out


def kernel_K3(phi: StepFn, s, alpha: float = 2.0, n: int = 2):
    _check_params(alpha, n)
    s = _check_s(s)
    a = (n - 1) / alpha
    out = s ** (-a) * cumulative(phi, s**a)
    return float(out) if out.ndim == 0 else out


def kernel(kid: str, phi: StepFn, s, alpha: float = 2.0, n: int = 2):
    try:
        fn = {"K1": kernel_K1, "K2": kernel_K2, "K3": kernel_K3}[kid]
    except KeyError:
        raise ValueError(f"unknown kernel {kid!r}") from None
    return fn(phi, s, alpha, n)


def kernel_cuts(kid: str, phi: StepFn, alpha: float, n: int) -> np.ndarray:
    """Values of ``s`` where the kernel output has a kink (breakpoints pulled back)."""
    e = (n - 1) / alpha if kid == "K3" else n / alpha
    b = phi.breakpoints[1:]
    return b ** (1.0 / e)


# ------------------------------------------------------------------ families


def step_fn(breaks, levels) -> StepFn:
    """Step function from breakpoints ``0 = b0 < ...`` and non-increasing levels.

    Equal neighbouring levels are merged and zero levels dropped.
    """
    breaks = np.asarray(breaks, dtype=float)
    levels = np.asarray(levels, dtype=float)
    if np.any(np.diff(levels) > 0):
        raise ValueError("levels must be non-increasing")
    return decreasing_rearrangement(levels, np.diff(breaks))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _cell_averages(f, edges: np.ndarray) -> np.ndarray:
    """Averages of ``f`` over ``[edges[i], edges[i+1]]`` (all edges > 0), Gauss-Legendre in ``log r``."""
    la, lb = np.log(edges[:-1]), np.log(edges[1:])
    mid, half = 0.5 * (la + lb), 0.5 * (lb - la)
    u = mid[:, None] + half[:, None] * _GL_X[None, :]
    r = np.exp(u)
    integral = half * np.sum(_GL_W * r * f(r), axis=1)
    return integral / np.diff(edges)


def _discretize(f, M: float, steps: int, decades: float, head_integral: float) -> StepFn:
    """Interval averages of a decreasing ``f`` on a geometric partition of ``(0, M)``.

    The first cell is ``(0, M 10**-decades)``; its integral is passed in closed form.
    """
    if not 2 <= steps <= 1000:
        raise ValueError("steps must lie in [2, 1000]")
    rmin = M * 10.0 ** (-decades)
    edges = np.geomspace(rmin, M, steps)
    avg = np.concatenate([[head_integral / rmin], _cell_averages(f, edges)])
    # averaging a decreasing function keeps it decreasing; clean rounding noise
    avg = np.minimum.accumulate(avg)
    return step_fn(np.concatenate([[0.0], edges]), avg)


def characteristic(a: float = 1.0) -> StepFn:
    if not a > 0:
        raise ValueError("characteristic(a) needs a > 0")
    return DecreasingProfile(np.array([0.0, float(a)]), np.array([1.0]))


def power(gamma: float, M: float = 1.0, steps: int = 400, decades: float = 8.0) -> StepFn:
    """Step discretization of ``r**-gamma`` on ``(0, M)``, ``0 <= gamma < 1``."""
    if not 0 <= gamma < 1:
        raise ValueError("power profile needs 0 <= gamma < 1")
    rmin = M * 10.0 ** (-decades)
    return _discretize(lambda r: r ** (-gamma), M, steps, decades, rmin ** (1 - gamma) / (1 - gamma))


def power_log(gamma: float, delta: float, M: float = 1.0, steps: int = 400, decades: float = 8.0) -> StepFn:
    """Step discretization of ``r**-gamma (1 + log(M/r))**-delta`` on ``(0, M)``."""
    if not (0 <= gamma < 1 and delta >= 0):
        raise ValueError("power-log profile needs 0 <= gamma < 1, delta >= 0")
    f = lambda r: r ** (-gamma) * (1.0 + np.log(M / r)) ** (-delta)
    rmin = M * 10.0 ** (-decades)
    # r = rmin e^{-x} removes the endpoint singularity
    ell = 1.0 + math.log(M / rmin)
    head, _ = integrate.quad(lambda x: math.exp(-(1 - gamma) * x) * (ell + x) ** (-delta), 0, np.inf,
                             epsabs=0, epsrel=1e-12, limit=200)
    head *= rmin ** (1 - gamma)
    return _discretize(f, M, steps, decades, head)


FAMILY_TAGS = {"characteristic": characteristic, "power": power, "power-log": power_log}


def monotone_family(spec) -> list[tuple[dict, StepFn]]:
    """Build ``[(params, phi), ...]`` from a tagged spec or a list of specs.

    A spec is ``{"tag": ..., **params}``; ``{"tag": "catalog", "size": k, "M": ...}``
    expands to :func:`catalog_family`.
    """
    if isinstance(spec, (list, tuple)):
        out = []
        for s in spec:
            out.extend(monotone_family(s))
        return out
    spec = dict(spec)
    tag = spec.pop("tag", None)
    if tag == "catalog":
        return catalog_family(**spec)
    if tag not in FAMILY_TAGS:
        raise ValueError(f"unknown family tag {tag!r}")
    return [({"tag": tag, **spec}, FAMILY_TAGS[tag](**spec))]


def catalog_family(size: int = 30, M: float = 1.0, steps: int = 400, gamma_max: float = 0.45,
                   plog_gamma: float = 0.5) -> list[tuple[dict, StepFn]]:
    """A fixed parameter box sampled with ``size`` members.

    Thirds: characteristic functions ``chi_(0,a)`` with ``a`` log-spaced in
    ``[1e-3 M, M]``; powers ``r**-gamma`` with ``gamma`` in ``[0, gamma_max]``;
    power-logs with fixed ``plog_gamma`` and ``delta`` in ``[0.6, 2]``.
    Enlarging ``size`` refines the same box.
    """
    if size < 3:
        raise ValueError("catalog needs at least 3 members")
    k1 = k2 = size // 3
    k3 = size - k1 - k2
    specs = [{"tag": "characteristic", "a": float(a)} for a in np.geomspace(1e-3 * M, M, k1)]
    specs += [{"tag": "power", "gamma": float(g), "M": M, "steps": steps}
              for g in np.linspace(0.0, gamma_max, k2)]
    specs += [{"tag": "power-log", "gamma": plog_gamma, "delta": float(d), "M": M, "steps": steps}
              for d in np.linspace(0.6, 2.0, k3)]
    return monotone_family(specs)


# -------------------------------------------------------------------- sweeps


def sample_points(cuts, lo: float, hi: float, per_decade: int = 64) -> np.ndarray:
    """Log-spaced points on ``[lo, hi]`` plus every cut inside it."""
    k = max(2, int(math.ceil(per_decade * math.log10(hi / lo))) + 1)
    pts = np.geomspace(lo, hi, k)
    cuts = np.asarray(cuts, dtype=float)
    cuts = cuts[(cuts > lo) & (cuts < hi)]
    return np.unique(np.concatenate([pts, cuts]))


def output_profile(kid: str, phi: StepFn, alpha: float, n: int, L: float,
                   per_decade: int = 64, decades: float = 12.0) -> DecreasingProfile:
    """Rearrangement of ``chi_(0,L) K(phi)`` from a midpoint step model.

    The kernel output is evaluated at the geometric midpoint of every cell of
    :func:`sample_points` on ``[L 10**-decades, L]``; the first cell ``(0, lo)``
    takes the value at ``lo/2``.
    """
    lo = L * 10.0 ** (-decades)
    s = sample_points(kernel_cuts(kid, phi, alpha, n), lo, L, per_decade)
    mids = np.concatenate([[0.5 * lo], np.sqrt(s[:-1] * s[1:])])
    widths = np.concatenate([[lo], np.diff(s)])
    vals = kernel(kid, phi, mids, alpha, n)
    return decreasing_rearrangement(vals, widths)


@dataclass
class HardySweep:
    kernel: str
    source: NormSpec
    target: NormSpec
    family: list = field(default_factory=list)  # [(params, StepFn), ...]
    alpha: float = 2.0
    n: int = 2
    L: float = 1.0  # target interval (0, L)
    M: float = 1.0  # source support (0, M)
    per_decade: int = 64
    label: str = ""

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        _check_params(self.alpha, self.n)
        if not (self.L > 0 and self.M > 0):
            raise ValueError("L and M must be positive")


@dataclass
class SweepResult:
    sweep: HardySweep
    rows: list  # dicts with frozen keys, see CSV_COLUMNS
    sup: float
    argmax: int

    CSV_COLUMNS = ("member", "params", "source_norm", "target_norm", "ratio", "disc_err")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r["member"], json.dumps(r["params"], sort_keys=True),
                        repr(r["source_norm"]), repr(r["target_norm"]), repr(r["ratio"]), repr(r["disc_err"])])
        return buf.getvalue()

    def summary(self) -> dict:
        sw = self.sweep
        return {"label": sw.label, "kernel": sw.kernel, "alpha": sw.alpha, "n": sw.n, "L": sw.L, "M": sw.M,
                "source": sw.source.to_dict(), "target": sw.target.to_dict(), "members": len(self.rows),
                "sup_ratio": self.sup, "argmax": self.argmax,
                "max_disc_err": max((r["disc_err"] for r in self.rows), default=0.0)}


def member_ratio(sw: HardySweep, phi: StepFn) -> tuple[float, float, float, float]:
    """``(source, target, ratio, disc_err)``; ``disc_err`` compares against half the sampling density."""
    src = sw.source(phi, sw.M)
    if phi.is_zero() or src == 0:
        return 0.0, 0.0, 0.0, 0.0
    out = output_profile(sw.kernel, phi, sw.alpha, sw.n, sw.L, sw.per_decade)
    coarse = output_profile(sw.kernel, phi, sw.alpha, sw.n, sw.L, sw.per_decade // 2)
    tgt = sw.target(out, sw.L)
    tgt_c = sw.target(coarse, sw.L)
    err = abs(tgt - tgt_c) / tgt if tgt > 0 else 0.0
    return src, tgt, tgt / src, err


def reduction_sweep(sw: HardySweep) -> SweepResult:
    """Per-member ratios ``||chi_(0,L) K phi||_target / ||phi||_source`` and their sup.

    The sup is an empirical lower bound for the best constant, nothing more.
    """
    if not sw.family:
        raise ValueError("empty family")
    rows = []
    for k, (params, phi) in enumerate(sw.family):
        src, tgt, ratio, err = member_ratio(sw, phi)
        rows.append({"member": k, "params": params, "source_norm": src, "target_norm": tgt,
                     "ratio": ratio, "disc_err": err})
    ratios = [r["ratio"] for r in rows]
    i = int(np.argmax(ratios))
    return SweepResult(sw, rows, float(ratios[i]), i)


def subcritical_sweep(size: int = 30, p: float = 1.5, n: int = 2, alpha: float = 2.0) -> HardySweep:
    """``K1`` from ``L^p`` into ``L^{alpha p/(n-p)}`` on unit intervals."""
    if not 1 < p < n:
        raise ValueError("subcritical sweep needs 1 < p < n")
    return HardySweep("K1", NormSpec.lebesgue(p), NormSpec.lebesgue(alpha * p / (n - p)),
                      catalog_family(size), alpha, n, label=f"subcritical(p={p})")


def critical_sweep(size: int = 30, n: int = 2, alpha: float = 2.0) -> HardySweep:
    """``K2`` from ``L^n(0,1)`` into the Lorentz-Zygmund space ``L^{inf,n;-1}(0,1)``."""
    return HardySweep("K2", NormSpec.lebesgue(n), NormSpec.lorentz_zygmund(n),
                      catalog_family(size), alpha, n, label="critical")


NAMED_SWEEPS = {"subcritical": subcritical_sweep, "critical": critical_sweep}
