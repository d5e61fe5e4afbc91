"""Command line: ``symineq run|geom|hardy|verify``.

Exit status: 0 when everything ran and nothing was flagged, 1 on invalid
input (config, geometry, inequality parameters), 2 when a report flagged a
violation candidate or a stability gate failed.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__, hardy
from .fields import DEFAULT_CATALOG, make_trial
from .geometry import FrostmanProbe, resolve_domain
from .norms import NormSpec
from .potentials import KernelPlan
from .verify import (
    InequalitySpec,
    MeasureSpec,
    Setup,
    TrialBox,
    VIOLATION,
    constant_search,
    pointwise_report,
    radial_power_box,
    rearrangement_report,
    reports_to_csv,
    rigid_box,
    sample_trial,
    sobolev_report,
)

EXIT_OK, EXIT_INVALID, EXIT_FLAGGED = 0, 1, 2

DEFAULTS = {
    "domain": "square",
    "grid": 128,
    "n_theta": 256,
    "h_b": None,
    "measure": "lebesgue",
    "potential_method": "fft",
    "eps_source": "closed",
    "seed": 0,
    "trials": "default",
    "inequalities": [],
    "pointwise": False,
    "rearrangement": False,
    "frostman": "auto",  # certify only Frostman measures unless true/false
    "hardy": [],
    "search": [],
    "gates": {},
}

KNOWN_KEYS = set(DEFAULTS) | {"out", "label"}


class ConfigError(ValueError):
    pass


# everything raised for bad user input derives from ValueError (GeometryError,
# UnknownTrial, NormError included); KeyError/TypeError come from malformed records
INPUT_ERRORS = (ValueError, KeyError, TypeError, OSError)


def _clean(obj):
    """JSON-ready copy: numpy scalars to floats, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def _dump(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def load_config(path: str | Path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def normalize_config(cfg: dict) -> dict:
    unknown = set(cfg) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = dict(DEFAULTS)
    out.update(cfg)
    if not isinstance(out["grid"], int) or out["grid"] < 8:
        raise ConfigError("grid must be an integer >= 8")
    if not isinstance(out["n_theta"], int) or out["n_theta"] < 16:
        raise ConfigError("n_theta must be an integer >= 16")
    if out["potential_method"] not in ("fft", "direct"):
        raise ConfigError("potential_method must be 'fft' or 'direct'")
    return out


def _trial_specs(trials):
    if trials == "default":
        return DEFAULT_CATALOG
    if isinstance(trials, str):
        return json.loads(Path(trials).read_text())
    return trials


def _label(spec, k):
    return spec.get("label") or f"trial{k}"


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def _search_box(item) -> TrialBox:
    box = item.get("box", "radial_power")
    if box == "radial_power":
        return radial_power_box()
    if box == "rigid":
        return rigid_box()
    return TrialBox(box["template"], {k: tuple(v) for k, v in box["params"].items()})


def _sweep_from(item) -> hardy.HardySweep:
    if isinstance(item, str):
        item = {"name": item}
    item = dict(item)
    name = item.pop("name", None)
    if name in hardy.NAMED_SWEEPS:
        return hardy.NAMED_SWEEPS[name](**item)
    try:
        return hardy.HardySweep(
            kernel=item["kernel"],
            source=NormSpec.from_dict(item["source"]),
            target=NormSpec.from_dict(item["target"]),
            family=hardy.monotone_family(item["family"]),
            alpha=float(item.get("alpha", 2.0)),
            n=int(item.get("n", 2)),
            L=float(item.get("L", 1.0)),
            M=float(item.get("M", 1.0)),
            per_decade=int(item.get("per_decade", 64)),
            label=item.get("label", name or "custom"),
        )
    except KeyError as exc:
        raise ConfigError(f"hardy sweep is missing {exc}") from None


class Run:
    """Validated config plus everything needed to execute it."""

    def __init__(self, cfg: dict):
        self.cfg = normalize_config(cfg)
        c = self.cfg
        self.domain = resolve_domain(c["domain"])
        self.measure = MeasureSpec.from_dict(c["measure"])
        self.setup = Setup(self.domain, c["grid"], self.measure, c["n_theta"], c["h_b"],
                           KernelPlan(c["potential_method"]), c["eps_source"])
        self.trial_specs = list(_trial_specs(c["trials"]))
        self.trials = [make_trial(dict(t, label=_label(t, k))) for k, t in enumerate(self.trial_specs)]
        labels = [t.label for t in self.trials]
        if len(set(labels)) != len(labels):
            raise ConfigError("trial labels must be unique")
        self.inequalities = [InequalitySpec.from_config(i, self.setup.alpha) for i in c["inequalities"]]
        self.sweeps = [_sweep_from(s) for s in c["hardy"]]
        self.searches = []
        for s in c["search"]:
            ineq = InequalitySpec.from_config(s["inequality"], self.setup.alpha)
            self.searches.append((ineq, _search_box(s), int(s.get("budget", 50)), s.get("init", [])))
            if self.searches[-1][2] < 1:
                raise ConfigError("search budget must be positive")

    def execute(self, out: Path) -> tuple[int, dict]:
        c, st = self.cfg, self.setup
        rep = out / "reports"
        files, flags = [], []
        summary = {}

        def write(name, text):
            rep.mkdir(parents=True, exist_ok=True)
            (rep / name).write_text(text)
            files.append(f"reports/{name}")

        gates = c["gates"] or {}
        certify = c["frostman"] if c["frostman"] != "auto" else st.measure.kind == "frostman"
        if certify:
            probe = FrostmanProbe()
            est = st.frostman(probe)
            est2 = st.frostman(probe.refined())
            geo = {"area": self.domain.area, "perimeter": self.domain.perimeter,
                   "diameter": self.domain.diameter, "edges": len(self.domain.edges),
                   "cells": int(st.mask.sum()), "mu_total": float(st.cell_measure().total),
                   "frostman_alpha": st.alpha, "frostman_estimate": est, "frostman_estimate_refined": est2,
                   "measure": st.measure.to_dict()}
            write("geometry.json", _dump(geo))
            if not (math.isfinite(est) and math.isfinite(est2)):
                flags.append("frostman estimate not finite")
            summary["frostman"] = est2

        if self.sweeps:
            hs = []
            for k, sw in enumerate(self.sweeps):
                res = hardy.reduction_sweep(sw)
                name = _safe(sw.label or f"sweep{k}")
                write(f"hardy_{k:02d}_{name}.csv", res.to_csv())
                hs.append(res.summary())
                tol = gates.get("hardy_disc_err", 0.01)
                if not math.isfinite(res.sup) or hs[-1]["max_disc_err"] > tol:
                    flags.append(f"hardy sweep {sw.label}: sup {res.sup}, disc_err {hs[-1]['max_disc_err']}")
            write("hardy.json", _dump(hs))
            summary["hardy"] = [h["sup_ratio"] for h in hs]

        sampled = {}
        if self.inequalities:
            reports = []
            for t in self.trials:
                sampled[t.label] = smp = sample_trial(t, st)
                for ineq in self.inequalities:
                    reports.append(sobolev_report(t, st, ineq, smp))
            write("sobolev.csv", reports_to_csv(reports))
            write("sobolev.json", _dump([r.to_dict() for r in reports]))
            bad = [f"{r.inequality}/{r.trial}" for r in reports if r.status == VIOLATION]
            if bad:
                flags.append(f"sobolev violation candidates: {bad}")
            summary["sobolev_rows"] = len(reports)

        if c["pointwise"]:
            rows = []
            refine = gates.get("pointwise_refinement")
            fine = _refined(st) if refine else None
            for t in self.trials:
                r = pointwise_report(t, st)
                write(f"pointwise_{_safe(t.label)}.csv", r.to_csv())
                s = r.summary()
                if fine is not None:
                    s["sup_ratio_2N"] = f2 = pointwise_report(t, fine).sup
                    if _unstable(r.sup, f2, refine):
                        flags.append(f"pointwise {t.label} unstable: {r.sup} vs {f2}")
                rows.append(s)
                if r.violations:
                    flags.append(f"pointwise violation candidates for {t.label}")
            write("pointwise.json", _dump(rows))

        if c["rearrangement"]:
            opts = c["rearrangement"] if isinstance(c["rearrangement"], dict) else {}
            cd = float(opts.get("c_dilation", 0.5))
            rows = []
            refine = gates.get("rearrangement_refinement")
            fine = _refined(st) if refine else None
            for t in self.trials:
                r = rearrangement_report(t, st, cd, sampled=sampled.get(t.label))
                write(f"rearrangement_{_safe(t.label)}.csv", r.to_csv())
                s = r.summary()
                if fine is not None:
                    s["sup_ratio_2N"] = f2 = rearrangement_report(t, fine, cd).sup
                    if _unstable(r.sup, f2, refine):
                        flags.append(f"rearrangement {t.label} unstable: {r.sup} vs {f2}")
                rows.append(s)
                if r.violations:
                    flags.append(f"rearrangement violation candidates for {t.label}")
            write("rearrangement.json", _dump(rows))

        if self.searches:
            rows = []
            for k, (ineq, box, budget, init) in enumerate(self.searches):
                res = constant_search(ineq, box, st, budget, c["seed"], init)
                rows.append({"inequality": ineq.id, "template": box.template, "box": box.params,
                             "budget": budget, "seed": c["seed"], "best_ratio": res.best_ratio,
                             "best_params": res.best_params, "evaluations": res.evaluations})
            write("search.json", _dump(rows))

        summary["flags"] = flags
        return (EXIT_FLAGGED if flags else EXIT_OK), {"files": files, "summary": summary}


def _refined(st: Setup) -> Setup:
    return Setup(st.domain, 2 * st.N, st.measure, st.n_theta, None, st.plan, st.eps_source)


def _unstable(a, b, tol) -> bool:
    if not (math.isfinite(a) and math.isfinite(b)):
        return not (math.isnan(a) and math.isnan(b))
    return abs(b - a) > tol * max(abs(a), abs(b))


def versions() -> dict:
    return {"symineq": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__}


def run_config(cfg: dict, out: str | Path | None = None) -> int:
    """Validate, execute, write ``manifest.json``; returns the exit status."""
    try:
        run = Run(cfg)
    except INPUT_ERRORS as exc:
        print(f"symineq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(out or run.cfg.get("out") or "symineq-out")
    out.mkdir(parents=True, exist_ok=True)
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    status, info = run.execute(out)
    manifest = {"config": run.cfg, "versions": versions(), "started": started,
                "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "exit_status": status, **info}
    (out / "manifest.json").write_text(_dump(manifest))
    for f in info["summary"].get("flags", []):
        print(f"symineq: flagged: {f}", file=sys.stderr)
    return status


def manifest_config(path: str | Path) -> dict:
    """The config stored in a manifest; re-running it reproduces the reports."""
    return json.loads(Path(path).read_text())["config"]


# ---------------------------------------------------------------- parsers


def _add_common(p):
    p.add_argument("--grid", type=int, help="cells across the longer bounding-box side")
    p.add_argument("--ntheta", type=int, help="directions for the boundary potential")
    p.add_argument("--potential-method", choices=("fft", "direct"))
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")


def _overrides(cfg: dict, a) -> dict:
    cfg = dict(cfg)
    for key, attr in (("grid", "grid"), ("n_theta", "ntheta"), ("potential_method", "potential_method"),
                      ("seed", "seed"), ("out", "out")):
        v = getattr(a, attr, None)
        if v is not None:
            cfg[key] = v
    return cfg


def cmd_run(a) -> int:
    try:
        cfg = load_config(a.config)
    except ConfigError as exc:
        print(f"symineq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    cfg = _overrides(cfg, a)
    return run_config(cfg, cfg.get("out"))


def cmd_geom(a) -> int:
    cfg = {"domain": a.domain, "grid": a.grid or 128, "inequalities": []}
    if a.frostman != 2.0:
        m = {"kind": "frostman", "alpha": a.frostman}
        if a.center:
            m["center"] = a.center
        cfg["measure"] = m
    if a.out:
        return run_config(cfg, a.out)
    try:
        run = Run(cfg)
    except INPUT_ERRORS as exc:
        print(f"symineq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    st = run.setup
    est = st.frostman(FrostmanProbe().refined())
    print(_dump({"area": run.domain.area, "perimeter": run.domain.perimeter, "diameter": run.domain.diameter,
                 "edges": len(run.domain.edges), "cells": int(st.mask.sum()), "measure": st.measure.to_dict(),
                 "frostman_estimate": est}), end="")
    return EXIT_OK if math.isfinite(est) else EXIT_FLAGGED


def cmd_hardy(a) -> int:
    if Path(a.sweep).exists():
        item = json.loads(Path(a.sweep).read_text())
    else:
        item = {"name": a.sweep}
        if a.size:
            item["size"] = a.size
    cfg = {"hardy": [item], "frostman": False}
    if a.out:
        return run_config(cfg, a.out)
    try:
        sw = _sweep_from(item)
    except INPUT_ERRORS as exc:
        print(f"symineq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    res = hardy.reduction_sweep(sw)
    sys.stdout.write(res.to_csv())
    print(_dump(res.summary()), file=sys.stderr, end="")
    return EXIT_OK if math.isfinite(res.sup) else EXIT_FLAGGED


def cmd_verify(a) -> int:
    cfg = {"domain": a.domain, "inequalities": [a.inequality], "trials": a.trials or "default",
           "pointwise": a.pointwise, "rearrangement": {"c_dilation": a.c_dilation} if a.rearrangement else False,
           "frostman": False}
    if a.frostman is not None:
        cfg["measure"] = {"kind": "frostman", "alpha": a.frostman}
    cfg = _overrides(cfg, a)
    if a.out:
        return run_config(cfg, a.out)
    try:
        run = Run(cfg)
    except INPUT_ERRORS as exc:
        print(f"symineq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    reports = [sobolev_report(t, run.setup, ineq) for t in run.trials for ineq in run.inequalities]
    sys.stdout.write(reports_to_csv(reports))
    return EXIT_FLAGGED if any(r.status == VIOLATION for r in reports) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symineq", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="execute a JSON run config")
    p.add_argument("config")
    _add_common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("geom", help="domain summary and Frostman estimate")
    p.add_argument("domain", help="preset name or polygon file")
    p.add_argument("--frostman", type=float, default=2.0, metavar="ALPHA")
    p.add_argument("--center", type=float, nargs=2, metavar=("X", "Y"))
    _add_common(p)
    p.set_defaults(fn=cmd_geom)

    p = sub.add_parser("hardy", help="Hardy-kernel sweep (named or JSON file)")
    p.add_argument("sweep", help="subcritical, critical, or a JSON sweep file")
    p.add_argument("--size", type=int, help="family size for named sweeps")
    _add_common(p)
    p.set_defaults(fn=cmd_hardy)

    p = sub.add_parser("verify", help="Sobolev reports for one inequality over a trial catalog")
    p.add_argument("inequality", help="e.g. subcritical(1.5), critical_exp, zygmund(2,1,auto)")
    p.add_argument("--domain", default="square")
    p.add_argument("--trials", help="JSON file with trial specs (default catalog otherwise)")
    p.add_argument("--frostman", type=float, metavar="ALPHA", help="use a Frostman measure")
    p.add_argument("--pointwise", action="store_true", help="also write pointwise reports (needs --out)")
    p.add_argument("--rearrangement", action="store_true", help="also write rearrangement reports (needs --out)")
    p.add_argument("--c-dilation", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    return a.fn(a)


if __name__ == "__main__":
    sys.exit(main())
