import math

import numpy as np
import pytest

from symineq.fields import make_trial
from symineq.geometry import contains, preset
from symineq.verify import (
    OK,
    InequalityReport,
    InequalitySpec,
    MeasureSpec,
    Setup,
    TrialBox,
    constant_search,
    domain_anchor,
    pointwise_report,
    rearrangement_report,
    reports_to_csv,
    rigid_box,
    sample_trial,
    sobolev_report,
)

TRANSLATION = {"tag": "rigid", "b": [0.75, 0.5], "omega": 0.0, "label": "translation"}


@pytest.fixture(scope="module")
def sq64():
    return Setup(preset("square"), 64)


def test_parse_catalog():
    ids = ["subcritical(1.5)", "critical_exp", "critical_LZ", "supercritical(3)",
           "lorentz(1.5,1.5,i)", "zygmund(1.5,1,i)", "remark_exp_lorentz(2)"]
    for s in ids:
        assert InequalitySpec.parse(s).id == s
    assert InequalitySpec.parse("zygmund(2,1,auto)").part == "iii"
    assert InequalitySpec.parse("zygmund(2,0.5)").part == "ii"
    assert InequalitySpec.parse("lorentz(2,1)").part == "iii"
    assert InequalitySpec.parse("lorentz(2,3)").part == "ii"
    assert InequalitySpec.parse("lorentz(3,inf)").part == "iii"
    assert InequalitySpec.parse("zygmund(3,1)").part == "iv"


@pytest.mark.parametrize("bad", ["subcritical(2.5)", "supercritical(1.5)", "lorentz(2,1,ii)",
                                 "zygmund(2,1,ii)", "mystery(1)", "subcritical", "critical_exp(2)",
                                 "remark_exp_lorentz(1)", "subcritical(1.5", "lorentz(2,inf)"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        InequalitySpec.parse(bad)


def test_contradictory_part_message():
    with pytest.raises(ValueError, match=r"part \(ii\).*part \(iii\)"):
        InequalitySpec.parse("zygmund(2,1,ii)")


def test_norm_wiring():
    Y, X, Z = InequalitySpec.parse("subcritical(1.5)").norms()
    assert (Y.describe(), X.describe(), Z.describe()) == ("L^6", "L^1.5", "L^3")
    Y, X, Z = InequalitySpec.parse("subcritical(1.5)", alpha=1.5).norms()
    assert Y.describe() == "L^4.5"
    Y, _, Z = InequalitySpec.parse("critical_LZ").norms()
    assert Y == Z and Y.tag == "lorentz_zygmund"


def test_from_config_roundtrip():
    s = InequalitySpec.parse("zygmund(2,0.5,ii)")
    assert InequalitySpec.from_config(s.to_dict()) == s


def test_measure_spec():
    assert MeasureSpec.from_dict("lebesgue") == MeasureSpec()
    m = MeasureSpec.from_dict({"kind": "frostman", "alpha": 1.5, "center": [0.5, 0.5]})
    assert m.center == (0.5, 0.5)
    with pytest.raises(ValueError):
        MeasureSpec("lebesgue", 1.5)
    with pytest.raises(ValueError):
        MeasureSpec("frostman", 0.9)
    with pytest.raises(ValueError):
        MeasureSpec("hausdorff")


def test_anchor_inside():
    for name in ("square", "L-shape", "star"):
        d = preset(name)
        a = domain_anchor(d)
        assert contains(d, a)
    np.testing.assert_allclose(domain_anchor(preset("square")), [0.5 - 1 / 128, 0.5 - 1 / 128])


def test_rigid_subcritical_ratio(sq64):
    # |u| constant: ||u||_6 = |b|, ||u||_{L^3(boundary)} = |b| 4^{1/3}
    r = sobolev_report(make_trial(TRANSLATION), sq64, InequalitySpec.parse("subcritical(1.5)"))
    assert r.rhs_eps == 0.0
    assert r.ratio == pytest.approx(4 ** (-1 / 3), rel=1e-12)
    assert r.status == OK


def test_scale_invariance(sq64):
    spec = InequalitySpec.parse("supercritical(3)")
    t = make_trial({"tag": "radial", "phi": "bump", "R": 0.2, "center": [0.4, 0.4], "label": "b"})
    a = sobolev_report(t, sq64, spec).ratio
    b = sobolev_report(t.scaled(37.5), sq64, spec).ratio
    assert b == pytest.approx(a, rel=1e-12)


def test_alpha_mismatch(sq64):
    with pytest.raises(ValueError):
        sobolev_report(make_trial(TRANSLATION), sq64, InequalitySpec.parse("subcritical(1.5)", alpha=1.5))


def test_zero_trial_undefined(sq64):
    t = make_trial({"tag": "rigid", "b": [0.0, 0.0], "label": "zero"})
    r = sobolev_report(t, sq64, InequalitySpec.parse("subcritical(1.5)"))
    assert r.status == "undefined" and math.isnan(r.ratio)


def test_frostman_setup():
    st = Setup(preset("L-shape"), 32, MeasureSpec("frostman", 1.5))
    assert st.measure.center is not None and st.alpha == 1.5
    assert math.isfinite(st.frostman())
    smp = sample_trial(make_trial(TRANSLATION), st)
    assert smp.mu_total > 0 and smp.area == pytest.approx(0.75)


def test_fd_matches_closed_on_linear(sq64):
    t = make_trial({"tag": "linear", "A": [[1.0, 0.3], [-0.2, 0.5]], "label": "lin"})
    spec = InequalitySpec.parse("subcritical(1.5)")
    fd = Setup(preset("square"), 64, eps_source="fd")
    assert sobolev_report(t, fd, spec).ratio == pytest.approx(sobolev_report(t, sq64, spec).ratio, rel=1e-10)


def test_csv_columns(sq64):
    r = sobolev_report(make_trial(TRANSLATION), sq64, InequalitySpec.parse("critical_LZ"))
    lines = reports_to_csv([r]).splitlines()
    assert lines[0].split(",") == list(InequalityReport.CSV_COLUMNS)
    assert len(lines) == 2


def test_pointwise_translation(sq64):
    r = pointwise_report(make_trial(TRANSLATION), sq64, per_side=8)
    assert r.violations == 0
    np.testing.assert_allclose(r.ratios, 1 / (2 * math.pi), rtol=1e-12)
    assert r.to_csv().splitlines()[0] == "x,y,u_abs,T,I,ratio"


def test_rearrangement_report(sq64):
    t = make_trial({"tag": "radial", "phi": "bump", "R": 0.2, "center": [0.3, 0.3], "label": "bump"})
    r = rearrangement_report(t, sq64)
    assert r.violations == 0 and math.isfinite(r.sup) and r.sup > 0
    assert len(r.s) == 97
    with pytest.raises(ValueError):
        rearrangement_report(t, sq64, c_dilation=0.0)


def test_trial_box_paths():
    box = rigid_box()
    spec = box.spec([0.1, 0.2, 0.3])
    assert spec["b"] == [0.1, 0.2] and spec["omega"] == 0.3
    assert box.template["b"] == [1.0, 0.0]
    with pytest.raises(ValueError):
        TrialBox({"tag": "rigid"}, {})
    with pytest.raises(ValueError):
        TrialBox({"tag": "rigid"}, {"omega": (1.0, 0.0)})


def test_constant_search_deterministic(sq64):
    spec = InequalitySpec.parse("subcritical(1.5)")
    a = constant_search(spec, rigid_box(), sq64, budget=8, seed=3)
    b = constant_search(spec, rigid_box(), sq64, budget=8, seed=3)
    assert a.evaluations == 8 and a.history == b.history
    # rigid fields: ratio is at most the translation value on the square
    assert a.best_ratio <= 4 ** (-1 / 3) + 1e-12
    with pytest.raises(ValueError):
        constant_search(spec, rigid_box(), sq64, budget=0)
