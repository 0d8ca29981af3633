import json

import numpy as np
import pytest

from abfinsler.classify import (
    CONSISTENT,
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    VIOLATION,
    FitUndefined,
    Tolerances,
    classify_metric,
    cs0_check,
    draw_samples,
    gpr_fit,
    predicate_residuals,
    predicate_scan,
    s_scan,
    semi_c_fit,
    theorem_check,
)
from abfinsler.finsler import point_state
from abfinsler.metric import make_spec
from abfinsler.phi import make_phi
from abfinsler.zoo import CATALOG
from conftest import samples, zoo

TOL = Tolerances()


def test_tolerance_validation_and_verdicts():
    with pytest.raises(ValueError):
        Tolerances(eps_tensor=1e-2)
    assert TOL.verdict(1e-9) == HOLDS
    assert TOL.verdict(2e-3) == FAILS
    assert TOL.verdict(1e-5) == INCONCLUSIVE


def test_sampler_is_seeded_and_normalized():
    a = draw_samples(zoo("hopf-matsumoto"), 5, 11)
    b = draw_samples(zoo("hopf-matsumoto"), 5, 11)
    for p, q in zip(a.samples, b.samples):
        assert np.array_equal(p.x, q.x) and np.array_equal(p.y, q.y)
        assert p.ps.F == pytest.approx(1.0, abs=1e-14)


def test_sampler_counts_rejections_for_half_space_profiles():
    ss = samples("hopf-kropina")
    assert ss.rejected > 0 and sum(ss.reasons.values()) == ss.rejected
    assert all(s.fr.sc.s > 0 for s in ss.samples)


@pytest.mark.parametrize("entry", sorted(CATALOG))
def test_hierarchy_monotonicity(entry):
    eps = TOL.eps_tensor
    for smp in samples(entry).samples:
        r = predicate_residuals(smp.ps)
        if r["riemannian"] <= eps:
            assert r["berwald"] <= eps
        if r["berwald"] <= eps:
            assert r["landsberg"] <= eps
        if r["landsberg"] <= eps:
            assert r["weakly_landsberg"] <= eps and r["p_reducible"] <= eps
        if r["c_reducible"] <= eps:
            assert r["p_reducible"] <= eps


@pytest.mark.parametrize("entry", ["hopf-randers", "hopf-kropina", "rk-change", "euclid-randers"])
def test_gpr_reduces_to_p_reducible_when_m_vanishes(entry):
    for smp in samples(entry).samples[:60]:
        fit = gpr_fit(smp.ps)
        assert fit.m_degenerate and fit.lam == 0.0
        pr = predicate_residuals(smp.ps)["p_reducible"]
        assert abs(fit.residual - pr) <= 1e-10


def test_semi_c_on_c_reducible_points_gives_p_one():
    for smp in samples("hopf-randers").samples[:30]:
        fit = semi_c_fit(smp.ps)
        assert fit.p == pytest.approx(1.0, abs=1e-8)
        assert fit.residual <= TOL.eps_fit


def test_semi_c_on_matsumoto_with_varying_p():
    fits = [semi_c_fit(s.ps) for s in samples("hopf-matsumoto").samples]
    assert max(f.residual for f in fits) <= TOL.eps_fit
    ps_ = [f.p for f in fits]
    assert max(ps_) - min(ps_) > 1e-2
    assert all(abs(f.p + f.q - 1) <= 1e-15 for f in fits)


RIEM = make_spec(2, [["1 + 0.1*x1^2"], ["0", "1"]], ["0.1", "0.2"], make_phi("riemannian"), id="riem")


def test_riemannian_point_fits():
    ps = point_state(RIEM, [0.1, 0.2], [1.0, 0.3])
    with pytest.raises(FitUndefined):
        semi_c_fit(ps)
    fit = gpr_fit(ps)
    assert fit.lam == 0.0 and np.abs(fit.a).max() <= 1e-14 and fit.residual <= 1e-14


def test_gpr_fails_on_matsumoto():
    res = [gpr_fit(s.ps).residual for s in samples("hopf-matsumoto").samples]
    assert np.mean(np.array(res) >= TOL.nonzero_floor) > 0.5


def test_few_samples_are_inconclusive():
    ss = draw_samples(zoo("hopf-randers"), 5, 0)
    out = predicate_scan(zoo("hopf-randers"), ss)
    assert all(v["verdict"] == INCONCLUSIVE and "diagnostic" in v for v in out.values())


def test_s_scan_on_berwald_entry():
    out = s_scan(zoo("euclid-randers"), samples("euclid-randers", 30, 4))
    assert out["max_abs_S"] <= TOL.eps_S and out["c"] == pytest.approx(0.0, abs=1e-12)
    assert out["verdict"] == HOLDS


def test_cs0_case_b_on_hopf():
    out = cs0_check(zoo("hopf-matsumoto"), [s.x for s in samples("hopf-matsumoto").samples[:20]])
    assert out["case_b"]["max_r"] <= 1e-12 and out["case_b"]["max_s_vec"] <= 1e-12


@pytest.mark.parametrize("c", [0.5, -0.7])
def test_cs0_case_a_on_hyperbolic_half_space(c):
    """b = c d(ln x3) on a = delta/x3^2: closed, |b| = |c|, and Hess(ln x3) = -(a - d ln x3 d ln x3), so eps = -1/c."""
    a = [["1/x3^2"], ["0", "1/x3^2"], ["0", "0", "1/x3^2"]]
    spec = make_spec(3, a, ["0", "0", f"{c}/x3"], make_phi("randers"), box=[(-1, 1), (-1, 1), (0.5, 2)], id="hyperbolic")
    xs = np.random.default_rng(1).uniform([-1, -1, 0.5], [1, 1, 2], (10, 3))
    out = cs0_check(spec, xs)["case_a"]
    assert out["max_r_residual"] <= 1e-12
    assert out["max_s_vec"] <= 1e-12
    assert out["epsilon"]["min"] == pytest.approx(-1 / c, rel=1e-12)
    assert out["epsilon"]["max"] == pytest.approx(-1 / c, rel=1e-12)
    # Randers does not satisfy the phi-condition of case (a)
    assert out["phi_condition_residual"] > 1e-3


def _fake(b_berwald, c_red, gpr_v, s_v):
    preds = {"berwald": {"verdict": b_berwald, "max_residual": 1.0}, "c_reducible": {"verdict": c_red, "max_residual": 1.0}}
    return preds, {"verdict": gpr_v, "max_residual": 0.0}, {"verdict": s_v, "max_abs_S": 0.0}


@pytest.mark.parametrize(
    "verdicts, outcome",
    [
        ((FAILS, FAILS, HOLDS, HOLDS), VIOLATION),
        ((FAILS, FAILS, FAILS, HOLDS), CONSISTENT),
        ((HOLDS, FAILS, HOLDS, HOLDS), CONSISTENT),
        ((FAILS, HOLDS, HOLDS, HOLDS), CONSISTENT),
        ((FAILS, FAILS, INCONCLUSIVE, HOLDS), "INCONCLUSIVE"),
        ((INCONCLUSIVE, FAILS, HOLDS, HOLDS), "INCONCLUSIVE"),
    ],
)
def test_theorem_logic(verdicts, outcome):
    preds, gpr, sres = _fake(*verdicts)
    assert theorem_check(None, None, TOL, preds, gpr, sres)["outcome"] == outcome


def test_report_is_deterministic_and_complete():
    a = classify_metric(zoo("hopf-randers"), 20, 3)
    b = classify_metric(zoo("hopf-randers"), 20, 3)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    for key in ("schema_version", "tool_version", "metric", "sampling", "tolerances", "predicates", "fits", "theorem", "crosscheck"):
        assert key in a
    assert a["sampling"]["seed"] == 3 and a["sampling"]["samples"] == 20
    assert a["fits"]["generalized_p_reducible"]["lambda"]["count"] == 20
