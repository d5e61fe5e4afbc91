"""Pointwise, rearrangement and Sobolev-type reports for closed-form trials.

Every report is a ratio ``lhs / rhs`` whose sup over trials is an empirical
lower bound for an unquantified constant. Nothing here certifies an upper
bound.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import hardy
from .fields import GridField, Trial, make_grid, make_trial, quadrature_points, sym_gradient
from .geometry import (
    FrostmanProbe,
    GeometryError,
    PolyDomain,
    boundary_discretize,
    boundary_distance,
    check_ray_origin,
    frostman_constant,
)
from .norms import NormSpec, YoungFunction
from .potentials import KernelPlan, boundary_potential, riesz_potential
from .rearrange import CellMeasure, DecreasingProfile, decreasing_rearrangement

OK, UNDEFINED, VIOLATION = "ok", "undefined", "violation"


def _ratio(lhs: float, rhs: float) -> tuple[float, str]:
    if rhs > 0:
        return lhs / rhs, OK
    if lhs > 0:
        return math.inf, VIOLATION
    return math.nan, UNDEFINED


# ------------------------------------------------------------------ setup


def domain_anchor(domain: PolyDomain, n: int = 64) -> np.ndarray:
    """The deepest point of ``domain`` on an ``n``-cell lattice (first one on ties)."""
    grid, mask = make_grid(domain, n)
    pts = grid.centers()[mask]
    d = boundary_distance(domain, pts)
    return pts[int(np.argmax(d))]


@dataclass(frozen=True)
class MeasureSpec:
    """``lebesgue`` (alpha = n) or ``frostman``: density ``|x - x0|**(alpha - 2)``."""

    kind: str = "lebesgue"
    alpha: float = 2.0
    center: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("lebesgue", "frostman"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind == "lebesgue" and self.alpha != 2.0:
            raise ValueError("Lebesgue measure in the plane has alpha = 2")
        if not 1.0 < self.alpha <= 2.0:
            raise ValueError("alpha must lie in (1, 2]")

    @classmethod
    def from_dict(cls, d) -> MeasureSpec:
        if d is None or d == "lebesgue":
            return cls()
        d = dict(d)
        c = d.get("center")
        return cls(d.get("kind", "frostman"), float(d.get("alpha", 2.0)), tuple(float(v) for v in c) if c is not None else None)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "alpha": self.alpha}
        if self.center is not None:
            out["center"] = list(self.center)
        return out


@dataclass(eq=False)
class Setup:
    """Discretization of one domain: grid, boundary nodes, measure, potential plan."""

    domain: PolyDomain
    N: int = 128
    measure: MeasureSpec = field(default_factory=MeasureSpec)
    n_theta: int = 256
    h_b: float | None = None
    plan: KernelPlan = field(default_factory=KernelPlan)
    eps_source: str = "closed"  # or "fd"

    def __post_init__(self):
        if self.eps_source not in ("closed", "fd"):
            raise ValueError("eps_source must be 'closed' or 'fd'")
        self.grid, self.mask = make_grid(self.domain, self.N)
        if not self.mask.any():
            raise GeometryError("grid too coarse: no cell center inside the domain")
        if self.h_b is None:
            self.h_b = self.grid.h
        self.nodes = boundary_discretize(self.domain, self.h_b)
        self.perimeter = float(self.nodes.weights.sum())
        if self.measure.kind == "frostman" and self.measure.center is None:
            self.measure = MeasureSpec("frostman", self.measure.alpha,
                                       tuple(float(v) for v in domain_anchor(self.domain)))

    @property
    def alpha(self) -> float:
        return self.measure.alpha

    def mu_weights(self, pts, hl, area) -> np.ndarray:
        if self.measure.kind == "lebesgue":
            return area
        x0 = self.measure.center
        r = np.maximum(np.hypot(pts[:, 0] - x0[0], pts[:, 1] - x0[1]), 0.5 * hl)
        return area * r ** (self.alpha - 2.0)

    def cell_measure(self) -> CellMeasure:
        pts = self.grid.centers()
        hl = np.full(self.mask.shape, self.grid.h)
        w = self.mu_weights(pts.reshape(-1, 2), hl.ravel(), np.full(hl.size, self.grid.cell_area))
        w = np.where(self.mask, w.reshape(self.mask.shape), 0.0)
        return CellMeasure(self.grid, self.mask, w, self.measure.kind, self.alpha)

    def frostman(self, probe: FrostmanProbe = FrostmanProbe()) -> float:
        return frostman_constant(self.cell_measure(), self.alpha, probe)

    def meta(self) -> dict:
        return {"N": self.N, "h": self.grid.h, "n_theta": self.n_theta, "h_b": self.h_b,
                "boundary_nodes": len(self.nodes), "measure": self.measure.to_dict(),
                "potential_method": self.plan.method, "eps_source": self.eps_source}


@dataclass(frozen=True, eq=False)
class Sampled:
    """A trial evaluated on a setup: the three rearrangements every report uses."""

    u_mu: DecreasingProfile  # |u| w.r.t. mu
    eps_leb: DecreasingProfile  # |Eu| w.r.t. Lebesgue
    trace: DecreasingProfile  # |u| on the boundary w.r.t. arclength
    mu_total: float
    area: float
    perimeter: float
    n_points: int


def sample_trial(trial: Trial, setup: Setup, refine: bool = True) -> Sampled:
    if setup.eps_source == "fd":
        g = trial.sample(setup.grid, setup.mask)
        E = sym_gradient(g)
        pts = setup.grid.centers()[setup.mask]
        hl = np.full(len(pts), setup.grid.h)
        area = np.full(len(pts), setup.grid.cell_area)
        u_abs = np.hypot(*g.values[:, setup.mask])
        eps_abs = np.where(E.mask, E.frobenius(), 0.0)[setup.mask]
    else:
        pts, hl, area = quadrature_points(setup.grid, setup.mask, trial.focus if refine else ())
        uv = trial.u(pts)
        u_abs = np.hypot(uv[:, 0], uv[:, 1])
        eps_abs = trial.eps_frobenius(pts)
    mu = setup.mu_weights(pts, hl, area)
    tr = trial.u(setup.nodes.points)
    return Sampled(
        decreasing_rearrangement(u_abs, mu),
        decreasing_rearrangement(eps_abs, area),
        decreasing_rearrangement(np.hypot(tr[:, 0], tr[:, 1]), setup.nodes.weights),
        float(mu.sum()), float(area.sum()), setup.perimeter, len(pts),
    )


# ------------------------------------------------------------- inequalities


KINDS = ("subcritical", "critical_exp", "critical_LZ", "supercritical", "lorentz", "zygmund",
         "remark_exp_lorentz")
PART_NAMES = ("i", "ii", "iii", "iv")


@dataclass(frozen=True)
class InequalitySpec:
    """An inequality ``||u||_Y <= C (||Eu||_X + ||u||_Z)`` from the catalog.

    ``part="auto"`` picks the Lorentz or Zygmund case dictated by ``(p, q)``
    or ``(p, sigma)``; an explicit part that contradicts them is rejected.
    """

    kind: str
    p: float = math.nan
    q: float = math.nan
    sigma: float = math.nan
    part: str = ""
    n: int = 2
    alpha: float = 2.0

    def __post_init__(self):
        k, n, p = self.kind, self.n, self.p
        if k not in KINDS:
            raise ValueError(f"unknown inequality {k!r}")
        if n != 2:
            raise ValueError("only planar domains are supported (n = 2)")
        if not n - 1 < self.alpha <= n:
            raise ValueError("alpha must lie in (n-1, n]")
        if k == "subcritical" and not 1 < p < n:
            raise ValueError("subcritical needs 1 < p < n")
        if k == "supercritical" and not p > n:
            raise ValueError("supercritical needs p > n")
        if k in ("critical_exp", "critical_LZ"):
            object.__setattr__(self, "p", float(n))
        if k == "remark_exp_lorentz":
            if not self.q > 1:
                raise ValueError("remark_exp_lorentz needs q > 1")
            object.__setattr__(self, "p", float(n))
        if k == "lorentz":
            if not (p > 1 and 1 <= self.q <= math.inf):
                raise ValueError("lorentz needs p > 1 and 1 <= q <= inf")
            self._set_part(self._lorentz_part())
            if self.part == "ii" and math.isinf(self.q):
                raise ValueError("lorentz part (ii) needs a finite q (Lorentz-Zygmund target)")
        if k == "zygmund":
            if not (p > 1 and math.isfinite(self.sigma)):
                raise ValueError("zygmund needs p > 1 and a finite sigma")
            self._set_part(self._zygmund_part())

    def _lorentz_part(self) -> str:
        p, q, n = self.p, self.q, self.n
        if p < n:
            return "i"
        if p == n and q > 1:
            return "ii"
        return "iii"

    def _zygmund_part(self) -> str:
        p, s, n = self.p, self.sigma, self.n
        if p < n:
            return "i"
        if p == n and s < n - 1:
            return "ii"
        if p == n and s == n - 1:
            return "iii"
        return "iv"

    def _set_part(self, forced: str):
        if self.part in ("", "auto"):
            object.__setattr__(self, "part", forced)
        elif self.part != forced:
            raise ValueError(f"{self.kind}(p={self.p:g}) violates the hypotheses of part "
                             f"({self.part}); its parameters fall under part ({forced})")

    @property
    def id(self) -> str:
        k = self.kind
        if k in ("critical_exp", "critical_LZ"):
            return k
        if k in ("subcritical", "supercritical"):
            return f"{k}({self.p:g})"
        if k == "remark_exp_lorentz":
            return f"{k}({self.q:g})"
        if k == "lorentz":
            return f"lorentz({self.p:g},{self.q:g},{self.part})"
        return f"zygmund({self.p:g},{self.sigma:g},{self.part})"

    def norms(self) -> tuple[NormSpec, NormSpec, NormSpec]:
        """``(Y, X, Z)``: target on ``(Omega, mu)``, gradient on ``Omega``, trace on the boundary."""
        k, p, q, s, n, a = self.kind, self.p, self.q, self.sigma, self.n, self.alpha
        sup = NormSpec.sup()
        if k == "subcritical":
            return (NormSpec.lebesgue(a * p / (n - p)), NormSpec.lebesgue(p),
                    NormSpec.lebesgue(p * (n - 1) / (n - p)))
        if k == "critical_exp":
            e = NormSpec.orlicz(YoungFunction.exp_sigma(n / (n - 1)))
            return e, NormSpec.lebesgue(n), e
        if k == "critical_LZ":
            z = NormSpec.lorentz_zygmund(n)
            return z, NormSpec.lebesgue(n), z
        if k == "supercritical":
            return sup, NormSpec.lebesgue(p), sup
        if k == "remark_exp_lorentz":
            e = NormSpec.orlicz(YoungFunction.exp_sigma(q / (q - 1)))
            return e, NormSpec.lorentz(n, q), e
        if k == "lorentz":
            X = NormSpec.lorentz(p, q)
            if self.part == "i":
                return (NormSpec.lorentz(a * p / (n - p), q), X, NormSpec.lorentz(p * (n - 1) / (n - p), q))
            if self.part == "ii":
                z = NormSpec.lorentz_zygmund(q)
                return z, X, z
            return sup, X, sup
        # zygmund
        X = NormSpec.orlicz(YoungFunction.zygmund(p, s))
        if self.part == "i":
            Y = NormSpec.orlicz(YoungFunction.zygmund(p * a / (n - p), s * a / (n - p)))
            Z = NormSpec.orlicz(YoungFunction.zygmund(p * (n - 1) / (n - p), s * (n - 1) / (n - p)))
            return Y, X, Z
        if self.part == "ii":
            e = NormSpec.orlicz(YoungFunction.exp_sigma(n / (n - 1 - s)))
            return e, X, e
        if self.part == "iii":
            e = NormSpec.orlicz(YoungFunction.double_exp(n / (n - 1)))
            return e, X, e
        return sup, X, sup

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "alpha": self.alpha}
        for key in ("p", "q", "sigma"):
            v = getattr(self, key)
            if not math.isnan(v):
                d[key] = v
        if self.part:
            d["part"] = self.part
        return d

    @classmethod
    def parse(cls, text: str, alpha: float = 2.0) -> InequalitySpec:
        """``subcritical(1.5)``, ``critical_exp``, ``lorentz(1.5,1.5,i)``, ``zygmund(2,1,auto)``, ..."""
        m = re.fullmatch(r"\s*([A-Za-z_]+)\s*(?:\((.*)\))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse inequality {text!r}")
        kind, args = m.group(1), [a.strip() for a in (m.group(2) or "").split(",") if a.strip()]
        num = lambda a: math.inf if a in ("inf", "oo") else float(a)  # noqa: E731
        try:
            if kind in ("subcritical", "supercritical"):
                (p,) = args
                return cls(kind, p=num(p), alpha=alpha)
            if kind in ("critical_exp", "critical_LZ"):
                if args:
                    raise ValueError
                return cls(kind, alpha=alpha)
            if kind == "remark_exp_lorentz":
                (q,) = args
                return cls(kind, q=num(q), alpha=alpha)
            if kind == "lorentz":
                p, q, *part = args
                return cls(kind, p=num(p), q=num(q), part=part[0] if part else "auto", alpha=alpha)
            if kind == "zygmund":
                p, s, *part = args
                return cls(kind, p=num(p), sigma=num(s), part=part[0] if part else "auto", alpha=alpha)
        except ValueError as exc:
            if str(exc) and "unpack" not in str(exc):
                raise
            raise ValueError(f"wrong arguments for {kind!r}: {text!r}") from None
        raise ValueError(f"unknown inequality {kind!r}")

    @classmethod
    def from_config(cls, item, alpha: float = 2.0) -> InequalitySpec:
        if isinstance(item, str):
            return cls.parse(item, alpha)
        d = dict(item)
        d.setdefault("alpha", alpha)
        return cls(**d)


@dataclass
class InequalityReport:
    inequality: str
    trial: str
    Y: str
    X: str
    Z: str
    lhs: float
    rhs_eps: float
    rhs_trace: float
    ratio: float
    status: str
    meta: dict = field(default_factory=dict)

    CSV_COLUMNS = ("inequality", "trial", "Y", "X", "Z", "lhs", "rhs_eps", "rhs_trace", "ratio", "status",
                   "N", "n_points", "h_b", "measure")

    def row(self) -> list:
        m = self.meta
        return [self.inequality, self.trial, self.Y, self.X, self.Z, repr(self.lhs), repr(self.rhs_eps),
                repr(self.rhs_trace), repr(self.ratio), self.status, m.get("N", ""), m.get("n_points", ""),
                repr(m["h_b"]) if "h_b" in m else "", m.get("measure", {}).get("kind", "")]

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("inequality", "trial", "Y", "X", "Z", "lhs", "rhs_eps", "rhs_trace", "ratio", "status", "meta")}


def sobolev_report(trial: Trial, setup: Setup, spec: InequalitySpec, sampled: Sampled | None = None) -> InequalityReport:
    """``||u||_Y(mu)`` against ``||Eu||_X + ||u||_Z(boundary)``, all through rearrangements."""
    if spec.alpha != setup.alpha:
        raise ValueError(f"inequality alpha {spec.alpha} does not match the measure alpha {setup.alpha}")
    smp = sampled if sampled is not None else sample_trial(trial, setup)
    Y, X, Z = spec.norms()
    lhs = Y(smp.u_mu, smp.mu_total)
    a = X(smp.eps_leb, smp.area)
    b = Z(smp.trace, smp.perimeter)
    ratio, status = _ratio(lhs, a + b)
    meta = dict(setup.meta(), n_points=smp.n_points, mu_total=smp.mu_total, area=smp.area,
                perimeter=smp.perimeter)
    return InequalityReport(spec.id, trial.label, Y.describe(), X.describe(), Z.describe(),
                            lhs, a, b, ratio, status, meta)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(InequalityReport.CSV_COLUMNS)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


# --------------------------------------------------------------- pointwise


@dataclass
class PointwiseReport:
    trial: str
    points: np.ndarray
    u_abs: np.ndarray
    T: np.ndarray
    I: np.ndarray
    ratios: np.ndarray  # nan where both sides vanish
    sup: float
    violations: int
    meta: dict = field(default_factory=dict)

    CSV_COLUMNS = ("x", "y", "u_abs", "T", "I", "ratio")

    @property
    def status(self) -> str:
        if self.violations:
            return VIOLATION
        return UNDEFINED if math.isnan(self.sup) else OK

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for p, a, t, i, r in zip(self.points, self.u_abs, self.T, self.I, self.ratios):
            w.writerow([repr(float(p[0])), repr(float(p[1])), repr(float(a)), repr(float(t)),
                        repr(float(i)), repr(float(r))])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"trial": self.trial, "sup_ratio": self.sup, "samples": len(self.points),
                "violations": self.violations, "status": self.status, "meta": self.meta}


def sample_cells(setup: Setup, per_side: int = 32) -> np.ndarray:
    """Grid cells containing the lattice ``(m + 1/2) / per_side`` of the bounding box.

    The lattice is resolution-independent, so refinement studies compare the
    same physical points up to half a cell.
    """
    x0, y0, x1, y1 = setup.domain.bounding_box
    t = (np.arange(per_side) + 0.5) / per_side
    X, Yy = np.meshgrid(x0 + t * (x1 - x0), y0 + t * (y1 - y0), indexing="ij")
    g = setup.grid
    i = np.clip(((X - g.x0) / g.h).astype(int), 0, g.nx - 1).ravel()
    j = np.clip(((Yy - g.y0) / g.h).astype(int), 0, g.ny - 1).ravel()
    cells = np.unique(np.column_stack([i, j]), axis=0)
    return cells[setup.mask[cells[:, 0], cells[:, 1]]]


def pointwise_report(trial: Trial, setup: Setup, per_side: int = 32) -> PointwiseReport:
    """``|u(x)| / (T|u|(x) + I|Eu|(x))`` at interior sample cells."""
    g = setup.grid
    if setup.eps_source == "fd":
        E = sym_gradient(trial.sample(g, setup.mask))
        mag = np.where(E.mask, E.frobenius(), 0.0)
    else:
        mag = np.where(setup.mask, trial.eps_frobenius(g.centers()), 0.0)
    pot = riesz_potential(GridField(g, setup.mask, mag), setup.plan)
    cells = sample_cells(setup, per_side)
    pts, ua, T, I = [], [], [], []
    trace = lambda z: trial.u(z)  # noqa: E731
    for i, j in cells:
        x = np.array([g.x0 + (i + 0.5) * g.h, g.y0 + (j + 0.5) * g.h])
        try:
            check_ray_origin(setup.domain, x)
        except GeometryError:
            continue
        pts.append(x)
        ua.append(float(np.hypot(*trial.u(x))))
        T.append(boundary_potential(trace, setup.domain, x, setup.n_theta))
        I.append(float(pot.values[i, j]))
    pts, ua, T, I = map(np.asarray, (pts, ua, T, I))
    den = T + I
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(den > 0, ua / den, np.where(ua > 0, np.inf, np.nan))
    violations = int(np.sum(np.isinf(ratios)))
    finite = ratios[np.isfinite(ratios)]
    sup = float(finite.max()) if finite.size else math.nan
    return PointwiseReport(trial.label, pts, ua, T, I, ratios, sup, violations, setup.meta())


# ---------------------------------------------------------- rearrangement


@dataclass
class RearrangementReport:
    trial: str
    s: np.ndarray
    lhs: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    ratios: np.ndarray
    sup: float
    violations: int
    c_dilation: float
    meta: dict = field(default_factory=dict)

    CSV_COLUMNS = ("s", "lhs", "K1", "K2", "K3", "ratio")

    @property
    def status(self) -> str:
        if self.violations:
            return VIOLATION
        return UNDEFINED if math.isnan(self.sup) else OK

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for row in zip(self.s, self.lhs, self.k1, self.k2, self.k3, self.ratios):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"trial": self.trial, "sup_ratio": self.sup, "c_dilation": self.c_dilation,
                "violations": self.violations, "status": self.status, "meta": self.meta}


def rearrangement_report(trial: Trial, setup: Setup, c_dilation: float = 0.5, n_s: int = 97,
                         s_decades: float = 6.0, sampled: Sampled | None = None) -> RearrangementReport:
    """Per-``s`` ratio of ``|u|*_mu(c s)`` to ``K1 + K2`` of ``|Eu|*`` plus ``K3`` of the trace.

    ``s`` runs log-spaced over ``[mu(Omega) 10**-s_decades, mu(Omega)/c]``;
    beyond the right end the left side vanishes.
    """
    if not c_dilation > 0:
        raise ValueError("c_dilation must be positive")
    smp = sampled if sampled is not None else sample_trial(trial, setup)
    a, n = setup.alpha, 2
    hi = smp.mu_total / c_dilation
    s = np.geomspace(hi * 10.0 ** (-s_decades), hi, n_s)
    lhs = smp.u_mu(c_dilation * s)
    k1 = hardy.kernel_K1(smp.eps_leb, s, a, n)
    k2 = hardy.kernel_K2(smp.eps_leb, s, a, n)
    k3 = hardy.kernel_K3(smp.trace, s, a, n)
    rhs = k1 + k2 + k3
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, np.nan))
    violations = int(np.sum(np.isinf(ratios)))
    finite = ratios[np.isfinite(ratios)]
    sup = float(finite.max()) if finite.size else math.nan
    return RearrangementReport(trial.label, s, lhs, k1, k2, k3, ratios, sup, violations, c_dilation,
                               dict(setup.meta(), n_points=smp.n_points))


# --------------------------------------------------------- constant search


@dataclass(frozen=True)
class TrialBox:
    """A trial template with up to six free parameters in a box.

    ``params`` maps a dotted path into the template (``"gamma"``,
    ``"center.0"``) to ``(lo, hi)``.
    """

    template: dict
    params: dict

    def __post_init__(self):
        if not 1 <= len(self.params) <= 6:
            raise ValueError("parameter box must have dimension 1..6")
        for k, (lo, hi) in self.params.items():
            if not lo <= hi:
                raise ValueError(f"empty range for {k}")

    @property
    def names(self) -> list:
        return list(self.params)

    def bounds(self) -> np.ndarray:
        return np.array([self.params[k] for k in self.names], dtype=float)

    def spec(self, x) -> dict:
        out = _deepcopy(self.template)
        for k, v in zip(self.names, x):
            _set_path(out, k, float(v))
        return out


def _deepcopy(obj):
    if isinstance(obj, dict):
        return {k: _deepcopy(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_deepcopy(v) for v in obj]
    return obj


def _set_path(obj, path: str, value):
    keys = path.split(".")
    for k in keys[:-1]:
        obj = obj[int(k)] if isinstance(obj, list) else obj[k]
    last = keys[-1]
    if isinstance(obj, list):
        obj[int(last)] = value
    else:
        obj[last] = value


@dataclass
class SearchResult:
    best_ratio: float
    best_params: dict
    evaluations: int
    history: list  # (params dict, ratio) in evaluation order


def constant_search(spec: InequalitySpec, box: TrialBox, setup: Setup, budget: int = 50, seed: int = 0,
                    init=(), step0: float = 0.25, min_step: float = 1e-3) -> SearchResult:
    """Coordinate ascent with shrinking steps on the Sobolev ratio.

    Starts from the best of ``init`` (points in parameter space) and one
    seeded random point of the box. Steps are fractions of the box width;
    a sweep with no improvement halves them. Stops after ``budget``
    evaluations or once every step is below ``min_step``.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    rng = np.random.default_rng(seed)
    B = box.bounds()
    lo, hi = B[:, 0], B[:, 1]
    width = hi - lo
    history = []

    def f(x):
        x = np.clip(x, lo, hi)
        r = sobolev_report(make_trial(box.spec(x)), setup, spec).ratio
        r = r if math.isfinite(r) else -math.inf
        history.append(({k: float(v) for k, v in zip(box.names, x)}, r))
        return r

    starts = [np.asarray(x, dtype=float) for x in init] + [lo + rng.random(len(lo)) * width]
    best_x, best = None, -math.inf
    for x in starts:
        if len(history) >= budget:
            break
        r = f(x)
        if r > best:
            best_x, best = np.clip(x, lo, hi), r
    steps = step0 * width
    while len(history) < budget and np.any(steps >= min_step * np.maximum(width, 1e-300)):
        improved = False
        for d in rng.permutation(len(lo)):
            if steps[d] == 0:
                continue
            for sign in (1.0, -1.0):
                if len(history) >= budget:
                    break
                y = best_x.copy()
                y[d] = np.clip(y[d] + sign * steps[d], lo[d], hi[d])
                if y[d] == best_x[d]:
                    continue
                r = f(y)
                if r > best:
                    best_x, best, improved = y, r, True
                    break
        if not improved:
            steps = 0.5 * steps
    return SearchResult(best, {k: float(v) for k, v in zip(box.names, best_x)}, len(history), history)


def radial_power_box(center_box=((0.2, 0.8), (0.2, 0.8))) -> TrialBox:
    return TrialBox({"tag": "radial", "phi": "power", "gamma": 2.0, "center": [0.5, 0.5], "label": "radial-power"},
                    {"gamma": (0.3, 3.0), "center.0": center_box[0], "center.1": center_box[1]})


def rigid_box() -> TrialBox:
    return TrialBox({"tag": "rigid", "b": [1.0, 0.0], "omega": 0.0, "label": "rigid"},
                    {"b.0": (-2.0, 2.0), "b.1": (-2.0, 2.0), "omega": (-2.0, 2.0)})

