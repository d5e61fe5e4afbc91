"""Rearrangement-invariant norms evaluated on decreasing step profiles.

Every norm here depends on a function only through its decreasing
rearrangement, so all functions take a :class:`DecreasingProfile`.
Step profiles let the Lebesgue and Lorentz norms be integrated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .rearrange import DecreasingProfile


class NormError(ValueError):
    pass


class LuxemburgDiverged(NormError):
    pass


# ------------------------------------------------------------ Lebesgue / Lorentz


def lebesgue_norm(p: float, f: DecreasingProfile) -> float:
    if not p >= 1:
        raise NormError(f"Lebesgue exponent must be >= 1, got {p}")
    if f.is_zero():
        return 0.0
    top = f.top
    if math.isinf(p):
        return top
    # factor out the top level so large exponents do not overflow
    return top * float(np.sum((f.levels / top) ** p * f.widths)) ** (1.0 / p)


def lorentz_admissible(p: float, q: float) -> bool:
    if 1 < p < math.inf:
        return 1 <= q <= math.inf
    return p == q and p in (1, math.inf)


def lorentz_norm(p: float, q: float, f: DecreasingProfile) -> float:
    """``|| s**(1/p - 1/q) f*(s) ||_{L^q(0, inf)}``, integrated exactly per step."""
    if not lorentz_admissible(p, q):
        raise NormError(f"inadmissible Lorentz parameters (p, q) = ({p}, {q})")
    if f.is_zero():
        return 0.0
    if p == q:
        return lebesgue_norm(p, f)
    s = f.breakpoints
    top = f.top
    v = f.levels / top
    if math.isinf(q):
        # sup of s^{1/p} f*(s): approached at the right end of each step
        return top * float(np.max(v * s[1:] ** (1.0 / p)))
    r = q / p
    pieces = v**q * (p / q) * np.diff(s**r)
    return top * float(np.sum(pieces)) ** (1.0 / q)


# ------------------------------------------------------------ Lorentz-Zygmund


def _lz_remainder(y: np.ndarray, q: float) -> np.ndarray:
    """``int_y^inf t**(-q) / (e**t - 1) dt`` for ``y >= log 2``, all at once."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        return y

    def integrand(z):
        t = y + z
        with np.errstate(over="ignore"):
            return t ** (-q) / np.expm1(t)

    val, _ = integrate.quad_vec(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-13)
    return val


def lz_weight_antiderivative(s, m: float, q: float) -> np.ndarray:
    """``G(s) = int_0^s dt / (t log(1 + m/t)**q)`` for ``0 <= s <= m``.

    With ``y = log(1 + m/t)`` the integral becomes
    ``y**(1-q)/(q-1) + int_y^inf t**(-q)/(e**t - 1) dt``.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.zeros_like(s)
    pos = s > 0
    y = np.log1p(m / s[pos])
    out[pos] = y ** (1.0 - q) / (q - 1.0) + _lz_remainder(y, q)
    return out


def lorentz_zygmund_norm(q: float, f: DecreasingProfile, m: float) -> float:
    """``|| s**(-1/q) log(1 + m/s)**(-1) f*(s) ||_{L^q(0, m)}``."""
    if not 1 < q < math.inf:
        raise NormError("Lorentz-Zygmund norm needs 1 < q < inf")
    if not (0 < m < math.inf):
        raise NormError("Lorentz-Zygmund norm needs a finite total mass")
    if f.is_zero():
        return 0.0
    s = np.minimum(f.breakpoints, m)
    top = f.top
    G = lz_weight_antiderivative(s, m, q)
    pieces = (f.levels / top) ** q * np.diff(G)
    return top * float(np.sum(pieces)) ** (1.0 / q)


# ------------------------------------------------------------------- Orlicz


@dataclass(frozen=True)
class YoungFunction:
    """Convex Young function ``A`` from a tagged family.

    Families: ``power(p)``, ``exp_sigma(sigma)`` ~ ``e^{t^sigma} - 1``,
    ``zygmund(p, sigma)`` ~ ``t^p log^sigma(1 + t)``, ``double_exp(sigma)``
    ~ ``e^{e^{t^sigma}} - e``. Where the raw expression is not convex near 0
    it is replaced by its tangent line through the origin up to ``t0``.
    """

    family: str
    p: float = 1.0
    sigma: float = 1.0
    t0: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.family not in ("power", "exp_sigma", "zygmund", "double_exp"):
            raise NormError(f"unknown Young family {self.family!r}")
        if self.family == "power" and self.p < 1:
            raise NormError("power Young function needs p >= 1")
        if self.family in ("exp_sigma", "double_exp") and self.sigma <= 0:
            raise NormError("exponential Young functions need sigma > 0")
        if self.family == "zygmund" and self.p <= 1:
            raise NormError("Zygmund Young function needs p > 1")
        object.__setattr__(self, "t0", self._glue_point())

    @classmethod
    def power(cls, p):
        return cls("power", p=p)

    @classmethod
    def exp_sigma(cls, sigma):
        return cls("exp_sigma", sigma=sigma)

    @classmethod
    def zygmund(cls, p, sigma):
        return cls("zygmund", p=p, sigma=sigma)

    @classmethod
    def double_exp(cls, sigma):
        return cls("double_exp", sigma=sigma)

    def raw(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if self.family == "power":
                return t**self.p
            if self.family == "exp_sigma":
                return np.expm1(t**self.sigma)
            if self.family == "double_exp":
                return np.exp(np.exp(t**self.sigma)) - math.e
            out = t**self.p * np.log1p(t) ** self.sigma
            return np.where(t > 0, out, 0.0)

    def _glue_point(self) -> float:
        # tangent from the origin touches where raw(t)/t is minimal
        if self.family == "exp_sigma" and self.sigma < 1:
            # sigma*u = 1 - e^{-u} with u = t^sigma
            g = lambda u: self.sigma * u - (-math.expm1(-u))  # noqa: E731
            u0 = optimize.brentq(g, 1e-12, 1e6, xtol=1e-15, rtol=1e-15)
            return u0 ** (1.0 / self.sigma)
        if self.family == "zygmund" and self.p + self.sigma < 1 + 1e-12:
            slope = lambda lt: float(np.log(self.raw(np.exp(lt)) / np.exp(lt)))  # noqa: E731
            res = optimize.minimize_scalar(slope, bounds=(-30.0, 30.0), method="bounded",
                                           options={"xatol": 1e-12})
            return float(np.exp(res.x))
        return 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.t0 > 0:
            slope = float(self.raw(self.t0)) / self.t0
            return np.where(t < self.t0, slope * t, self.raw(t))
        return self.raw(t)

    def to_dict(self) -> dict:
        return {"family": self.family, "p": self.p, "sigma": self.sigma}


def modular(A: YoungFunction, f: DecreasingProfile, lam: float) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        val = float(np.sum(A(f.levels / lam) * f.widths))
    return val if math.isfinite(val) else math.inf


def luxemburg_norm(A: YoungFunction, f: DecreasingProfile, *, max_doublings: int = 200) -> float:
    """``inf{lam > 0 : int A(f*/lam) ds <= 1}`` by bracketing and bisection.

    The modular is non-increasing in ``lam``; bisection runs on ``log lam``
    until the bracket collapses to adjacent floats.
    """
    if f.is_zero():
        return 0.0
    lam0 = float(np.sum(f.levels * f.widths)) / f.support
    lo = hi = lam0
    for _ in range(max_doublings):
        if modular(A, f, hi) <= 1.0:
            break
        hi *= 2.0
    else:
        raise LuxemburgDiverged("modular never dropped to 1 within the bracket bound")
    for _ in range(max_doublings):
        if modular(A, f, lo) > 1.0:
            break
        lo *= 0.5
    else:
        return 0.0
    if hi == lo:
        hi = 2.0 * lo
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if not lo < mid < hi:
            break
        if modular(A, f, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def exp_equiv_norm(sigma: float, f: DecreasingProfile, m: float) -> float:
    """``sup_{0<s<m} (1 + log(m/s))**(-1/sigma) f*(s)``.

    On each step the weight increases in ``s``, so the sup over a step is
    the left limit at its right end (capped at ``m``).
    """
    if sigma <= 0:
        raise NormError("sigma must be positive")
    if f.is_zero():
        return 0.0
    right = np.minimum(f.breakpoints[1:], m)
    left = f.breakpoints[:-1]
    live = left < m
    w = (1.0 + np.log(m / right[live])) ** (-1.0 / sigma)
    return float(np.max(w * f.levels[live]))


# --------------------------------------------------------------- NormSpec


NORM_TAGS = ("lebesgue", "lorentz", "lorentz_zygmund", "orlicz", "exp_equiv", "sup")


@dataclass(frozen=True)
class NormSpec:
    """Tagged description of a rearrangement-invariant norm.

    ``p``/``q`` parametrise Lebesgue, Lorentz and Lorentz-Zygmund norms;
    ``young`` the Orlicz (Luxemburg) norm; ``sigma`` the weighted-sup
    equivalent of ``exp L^sigma``.
    """

    tag: str
    p: float = math.nan
    q: float = math.nan
    sigma: float = math.nan
    young: YoungFunction | None = None

    def __post_init__(self):
        t = self.tag
        if t not in NORM_TAGS:
            raise NormError(f"unknown norm tag {t!r}")
        if t == "lebesgue" and not self.p >= 1:
            raise NormError("Lebesgue norm needs p >= 1")
        if t == "lorentz" and not lorentz_admissible(self.p, self.q):
            raise NormError(f"inadmissible Lorentz parameters ({self.p}, {self.q})")
        if t == "lorentz_zygmund" and not 1 < self.q < math.inf:
            raise NormError("Lorentz-Zygmund norm needs 1 < q < inf")
        if t == "orlicz" and self.young is None:
            raise NormError("Orlicz norm needs a Young function")
        if t == "exp_equiv" and not self.sigma > 0:
            raise NormError("exp_equiv needs sigma > 0")

    @classmethod
    def lebesgue(cls, p):
        return cls("sup") if math.isinf(p) else cls("lebesgue", p=p)

    @classmethod
    def lorentz(cls, p, q):
        return cls("lorentz", p=p, q=q)

    @classmethod
    def lorentz_zygmund(cls, q):
        return cls("lorentz_zygmund", q=q)

    @classmethod
    def orlicz(cls, young: YoungFunction):
        return cls("orlicz", young=young)

    @classmethod
    def exp_equiv(cls, sigma):
        return cls("exp_equiv", sigma=sigma)

    @classmethod
    def sup(cls):
        return cls("sup")

    def __call__(self, f: DecreasingProfile, m: float | None = None) -> float:
        return evaluate(self, f, m)

    def describe(self) -> str:
        if self.tag == "lebesgue":
            return f"L^{self.p:g}"
        if self.tag == "sup":
            return "L^inf"
        if self.tag == "lorentz":
            return f"L^({self.p:g},{self.q:g})"
        if self.tag == "lorentz_zygmund":
            return f"L^(inf,{self.q:g};-1)"
        if self.tag == "exp_equiv":
            return f"expL^{self.sigma:g}[sup-form]"
        y = self.young
        if y.family == "power":
            return f"L^{y.p:g}[Luxemburg]"
        if y.family == "exp_sigma":
            return f"expL^{y.sigma:g}"
        if y.family == "double_exp":
            return f"expexpL^{y.sigma:g}"
        return f"L^{y.p:g}(logL)^{y.sigma:g}"

    def to_dict(self) -> dict:
        d = {"tag": self.tag}
        for k in ("p", "q", "sigma"):
            v = getattr(self, k)
            if not math.isnan(v):
                d[k] = v
        if self.young is not None:
            d["young"] = self.young.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> NormSpec:
        d = dict(d)
        y = d.pop("young", None)
        if y is not None:
            y = YoungFunction(**y)
        return cls(young=y, **d)


def evaluate(spec: NormSpec, f: DecreasingProfile, m: float | None = None) -> float:
    """Evaluate ``spec`` on ``f``; ``m`` is the total mass of the underlying space."""
    t = spec.tag
    if t == "lebesgue":
        return lebesgue_norm(spec.p, f)
    if t == "sup":
        return f.top
    if t == "lorentz":
        return lorentz_norm(spec.p, spec.q, f)
    if t == "orlicz":
        return luxemburg_norm(spec.young, f)
    if m is None:
        raise NormError(f"{t} needs the total mass of the measure space")
    if t == "lorentz_zygmund":
        return lorentz_zygmund_norm(spec.q, f, m)
    return exp_equiv_norm(spec.sigma, f, m)
