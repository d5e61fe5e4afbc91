"""Largest Sobolev ratio per inequality over the trial catalog, on several domains."""

import argparse

from symineq.fields import DEFAULT_CATALOG, make_trial
from symineq.geometry import resolve_domain
from symineq.verify import InequalitySpec, MeasureSpec, Setup, sample_trial, sobolev_report

SUITE = ["subcritical(1.5)", "critical_exp", "critical_LZ", "supercritical(3)", "lorentz(1.5,1.5,i)",
         "zygmund(1.5,1,i)", "zygmund(2,1,auto)", "zygmund(2,0.5,ii)", "remark_exp_lorentz(2)"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--domains", nargs="+", default=["square", "L-shape", "rooms-and-passages"])
    ap.add_argument("--grid", type=int, default=128)
    ap.add_argument("--frostman", type=float)
    a = ap.parse_args()

    measure = MeasureSpec("frostman", a.frostman) if a.frostman else MeasureSpec()
    alpha = measure.alpha
    specs = [InequalitySpec.parse(s, alpha) for s in SUITE]
    trials = [make_trial(t) for t in DEFAULT_CATALOG]
    for name in a.domains:
        st = Setup(resolve_domain(name), a.grid, measure)
        smp = {t.label: sample_trial(t, st) for t in trials}
        print(f"== {name} (N={a.grid}, {measure.kind}, alpha={alpha:g})")
        for s in specs:
            reps = [sobolev_report(t, st, s, smp[t.label]) for t in trials]
            best = max(reps, key=lambda r: r.ratio)
            flag = " VIOLATION" if any(r.status == "violation" for r in reps) else ""
            print(f"  {s.id:24s} sup {best.ratio:.5f}  ({best.trial}){flag}")


if __name__ == "__main__":
    main()
