"""Critical-case ratios along the truncated-log family as the truncation level k doubles."""

import argparse

from symineq.fields import make_trial
from symineq.geometry import resolve_domain
from symineq.verify import InequalitySpec, Setup, sobolev_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--domain", default="square")
    ap.add_argument("--grid", type=int, default=128)
    ap.add_argument("--ks", type=float, nargs="+", default=[1, 2, 4, 8, 16])
    ap.add_argument("--center", type=float, nargs=2, default=[0.25, 0.25])
    ap.add_argument("--R", type=float, default=0.2)
    a = ap.parse_args()

    st = Setup(resolve_domain(a.domain), a.grid)
    specs = [InequalitySpec.parse(s) for s in ("critical_exp", "critical_LZ", "remark_exp_lorentz(2)")]
    prev = {}
    print("k      " + "  ".join(f"{s.id:>22s}" for s in specs))
    for k in a.ks:
        t = make_trial({"tag": "directional", "profile": "truncated-log", "R": a.R, "k": k,
                        "center": a.center, "direction": [1.0, 1.0], "label": f"k={k:g}"})
        cells = []
        for s in specs:
            r = sobolev_report(t, st, s).ratio
            d = f"({r / prev[s.id] - 1:+.3f})" if s.id in prev else ""
            cells.append(f"{r:.5f} {d:>9s}")
            prev[s.id] = r
        print(f"{k:<6g} " + "  ".join(f"{c:>22s}" for c in cells))


if __name__ == "__main__":
    main()
