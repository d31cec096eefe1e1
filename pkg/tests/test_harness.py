from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cweno_nonlocal import harness as hs
from cweno_nonlocal.limiter import BoundPair
from cweno_nonlocal.timestep import Trace


# smoothstep of degree 17 ------------------------------------------------------

def test_smoothstep_endpoints_and_flatness():
    assert hs.smoothstep17(0.0) == pytest.approx(0.0, abs=1e-14)
    assert hs.smoothstep17(1.0) == pytest.approx(1.0, abs=1e-12)
    c = np.polynomial.Polynomial(hs._smoothstep_coeffs())
    for d in range(1, 9):
        dc = c.deriv(d)
        assert abs(dc(0.0)) < 1e-9 and abs(dc(1.0)) < 1e-6 * max(1.0, np.abs(dc.coef).max())


def test_smoothstep_closed_form_at_half_and_symmetry():
    # odd symmetry about (1/2, 1/2) follows from the equal number of end conditions
    x = np.linspace(0, 1, 41)
    assert np.allclose(hs.smoothstep17(x) + hs.smoothstep17(1 - x), 1.0, atol=1e-12)
    assert hs.smoothstep17(0.5) == pytest.approx(0.5, abs=1e-13)


def test_smoothstep_is_monotone_and_clipped():
    x = np.linspace(-0.5, 1.5, 2001)
    y = hs.smoothstep17(x)
    assert np.all(np.diff(y) >= -1e-14)
    assert y[0] == pytest.approx(0.0, abs=1e-14) and y[-1] == pytest.approx(1.0, abs=1e-12)


def test_maxprinciple_profile_shape():
    p = hs.maxprinciple_profile
    assert p(0.0) == pytest.approx(0.0, abs=1e-14)
    assert p(0.5) == pytest.approx(1.0, abs=1e-12)
    x = np.linspace(0, 1, 101)
    assert np.allclose(p(x), p(1 - x), atol=1e-12)
    assert p(np.array([0.375, 0.625])) == pytest.approx([1.0, 1.0], abs=1e-12)


# error norms and rates --------------------------------------------------------

def test_error_norms_against_self_vanish():
    u = np.linspace(0, 1, 8)
    assert hs.error_norms(u, u, 0.1) == (0.0, 0.0)
    assert hs.error_norms(u, np.repeat(u, 4), 0.1) == (0.0, 0.0)


def test_error_norms_single_cell_discrepancy():
    ref = np.zeros(16)
    ref[5] = 4.0  # block mean 1.0 in coarse cell 1
    L1, Linf = hs.error_norms(np.zeros(4), ref, 0.25)
    assert L1 == pytest.approx(0.25) and Linf == pytest.approx(1.0)


def test_error_norms_reject_non_nested_grids():
    with pytest.raises(ValueError):
        hs.error_norms(np.zeros(3), np.zeros(8), 0.1)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=8), st.integers(1, 6))
def test_restriction_preserves_mass(vals, factor):
    fine = np.repeat(np.array(vals), factor) + np.tile(np.linspace(-1, 1, factor), len(vals))
    coarse = hs.restrict(fine, factor)
    assert coarse.sum() * factor == pytest.approx(fine.sum(), abs=1e-9)


def test_rates_of_halving_errors():
    rates = hs.rates_from_errors([1.0, 0.5, 0.25])
    assert rates[0] is None and rates[1:] == [1.0, 1.0]
    assert hs.rates_from_errors([1.0, 0.0])[1] is None


def test_table_csv_is_deterministic():
    rows = [hs.ErrorReport(0, 0.05, 1e-3, 2e-3), hs.ErrorReport(1, 0.025, 1.25e-4, 2.5e-4, 3.0, 3.0)]
    text = hs.table_csv(rows)
    assert text == hs.table_csv(rows)
    assert text.splitlines() == ["n,L1,rate,Linf,rate", "0,1.000000e-03,,2.000000e-03,",
                                 "1,1.250000e-04,3.0000,2.500000e-04,3.0000"]


def test_error_report_rejects_negative_norm():
    with pytest.raises(ValueError):
        hs.ErrorReport(0, 0.1, L1=-1.0)


# configuration ----------------------------------------------------------------

@pytest.mark.parametrize("kw", [dict(case="nope"), dict(scheme=4), dict(kernel=7), dict(eta=0.0), dict(T=-1.0),
                                dict(safety=0.0), dict(n=None, h=None), dict(n=None, h=0.3),
                                dict(bounds=(1.0, 0.0))])
def test_run_config_validation(kw):
    with pytest.raises(ValueError):
        hs.RunConfig(**kw)


def test_run_config_defaults_follow_the_case():
    cfg = hs.RunConfig(case="maxprinciple", scheme=5, n=1)
    assert cfg.method == "tsrk5" and cfg.grid.n_cells == 40 and cfg.final_time == 0.05
    assert hs.RunConfig(scheme=7).method == "rk7"
    assert hs.RunConfig(h=0.1).grid.n_cells == 20
    assert hs.mesh_size(2) == pytest.approx(1 / 80)


def test_plain_and_sedimentation_step_rules():
    cfg = hs.RunConfig(n=0)
    m = cfg.model()
    assert cfg.step_size() == pytest.approx(0.9 * 0.05 / (0.05 * m.w_at_zero + 1))
    sed = hs.RunConfig(case="sedimentation", n=0)
    m = sed.model()
    assert sed.step_size() == pytest.approx(0.9 * 0.05 / (3 * 0.05 * m.w_at_zero + 1))


def test_bootstrap_step_only_for_two_step_methods():
    assert hs.RunConfig(case="maxprinciple", scheme=3).bootstrap_step() is None
    cfg = hs.RunConfig(case="maxprinciple", scheme=5, n=2)
    assert 0 < cfg.bootstrap_step() <= cfg.step_size()


# whole runs -------------------------------------------------------------------

def test_zero_sedimentation_data_stays_zero(monkeypatch):
    monkeypatch.setitem(hs.CASES, "sedimentation", replace(hs.CASES["sedimentation"], rho0=np.zeros_like))
    res = hs.run_experiment(hs.RunConfig(case="sedimentation", scheme=5, n=0))
    assert np.all(res.averages == 0.0)


@pytest.mark.parametrize("scheme", [3, 5, 7])
def test_constant_traffic_state_is_preserved(monkeypatch, scheme):
    monkeypatch.setitem(hs.CASES, "smooth", replace(hs.CASES["smooth"], rho0=lambda x: np.full_like(x, 0.3)))
    res = hs.run_experiment(hs.RunConfig(scheme=scheme, n=0))
    assert np.allclose(res.averages, 0.3, atol=1e-14, rtol=0)


@pytest.mark.parametrize("case,scheme", [("smooth", 5), ("nonsmooth", 3), ("maxprinciple", 5)])
def test_periodic_runs_conserve_mass(case, scheme):
    cfg = hs.RunConfig(case=case, scheme=scheme, n=0, limiter=case == "maxprinciple")
    res = hs.run_experiment(cfg)
    from cweno_nonlocal.quadrature import initial_cell_averages, radau_rule
    u0 = initial_cell_averages(cfg.spec.rho0, res.grid, radau_rule(cfg.g + 1))
    assert res.averages.sum() == pytest.approx(u0.sum(), rel=1e-12)
    assert res.steps * res.tau == pytest.approx(cfg.final_time)


def test_smooth_cweno3_coarse_error_magnitude():
    # L1 error at h = 1/20 against a fine reference is about 2.3e-4
    cfg = hs.RunConfig(scheme=3, n=0)
    rows = hs.convergence_table(cfg, [0, 1], n_ref=3)
    assert 2.33e-4 / 3 < rows[0].L1 < 3 * 2.33e-4
    assert rows[1].L1_rate > 2.5


def test_nonsmooth_cweno7_fine_mesh_stays_plausible():
    res = hs.run_experiment(hs.RunConfig(case="nonsmooth", scheme=7, h=1 / 800))
    u = res.averages
    assert u.min() > 0.05 - 0.02 and u.max() < 0.95 + 0.02
    # mass moves right: the jam front at x = 0.4 spreads and the tail at -0.5 stays sharp
    x = res.grid.centers
    assert u[np.abs(x + 0.8) < 0.05].max() < 0.06
    tv = np.abs(np.diff(np.concatenate([u, u[:1]]))).sum()
    assert tv < 2 * 0.9 + 0.1


# audit ------------------------------------------------------------------------

def test_audit_flags_both_sides():
    tr = Trace()
    tr.record(0.0, np.array([0.0, 1.0]))
    tr.record(0.1, np.array([-1e-3, 1.0]))
    tr.record(0.2, np.array([0.0, 1.0 + 1e-3]))
    rep = hs.maxprinciple_audit(tr, BoundPair(0.0, 1.0))
    assert not rep.ok
    assert [k for k, _, _ in rep.below] == [1] and [k for k, _, _ in rep.above] == [2]
    assert "status VIOLATION" in rep.text()


def test_audit_accepts_roundoff_excursions():
    tr = Trace()
    tr.record(0.0, np.array([-1e-15, 1.0 + 1e-15]))
    rep = hs.maxprinciple_audit(tr, BoundPair(0.0, 1.0))
    assert rep.ok and "status ok" in rep.text()
