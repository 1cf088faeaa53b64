import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coulomb_pair.field import Admissibility, ChargeConfig, NotAdmissibleError, Q_prime
from coulomb_pair.regime import (CaseTag, Regime, RegimeError, SupportKind, case_tag,
                                 check_derivative_form, classify, enclosed_fraction, g_c,
                                 g_s, solve_density_zero, solve_inner_radius,
                                 solve_outer_radius, transition_point)

from conftest import A1, A2, B, C, SINGLE, WEAK_B, admissible_configs, bisect, random_admissible


def test_g_c_examples():
    assert g_c(A1, 0.0) == pytest.approx(2.875, rel=1e-15)
    for cfg in (A1, A2, B, C):
        assert g_c(cfg, 0.0) == pytest.approx(cfg.gamma2 / cfg.h2**3 - cfg.gamma1 / cfg.h1**3, rel=1e-14)
    # transition gamma2/gamma1 = (h2/h1)^d
    cfg = ChargeConfig(3, 1.0, 8.0, 1.0, 2.0)
    assert abs(g_c(cfg, 0.0)) < 1e-15


def test_g_s_examples():
    for cfg in (A1, B, C, WEAK_B):
        assert g_s(cfg, 0.0) == 1.0
        assert g_s(cfg, 1e8) == pytest.approx(1 - cfg.gamma2 + cfg.gamma1, abs=1e-9)
    rs = bisect(lambda R: g_s(A1, R), 0.5, 2.0)
    assert rs == pytest.approx(1.021, abs=5e-4)
    assert abs(g_s(A1, rs)) < 1e-12


def test_solve_outer_radius_examples():
    rs = solve_outer_radius(SINGLE)
    assert rs == pytest.approx(1 / math.sqrt(2 ** (2 / 3) - 1), rel=1e-12)
    assert rs == pytest.approx(bisect(lambda R: g_s(SINGLE, R), 0.1, 10.0), rel=1e-12)
    assert rs == pytest.approx(1.30477, abs=1e-5)
    ra = solve_outer_radius(A1)
    assert ra == pytest.approx(bisect(lambda R: g_s(A1, R), 0.1, 10.0), rel=1e-12)
    assert solve_outer_radius(WEAK_B) == math.inf


def test_solve_outer_radius_not_admissible():
    with pytest.raises(NotAdmissibleError, match="no equilibrium measure exists"):
        solve_outer_radius(ChargeConfig(3, 1.0, 1.5, 1.0, 1.0))


@settings(max_examples=200)
@given(admissible_configs(dims=(2, 3, 4, 5)))
def test_outer_radius_properties(cfg):
    R = solve_outer_radius(cfg)
    assert abs(g_s(cfg, R)) < 1e-12
    c = max(1, cfg.d - 2)
    assert abs(check_derivative_form(cfg, R)) < 1e-9 * c
    # the root is bracketed to one ulp: the sign flips across neighbours
    lo, hi = np.nextafter(R, 0), np.nextafter(R, math.inf)
    assert g_s(cfg, lo) >= -1e-12 and g_s(cfg, hi) <= 1e-12


def test_g_s_single_sign_change(rng):
    r = np.geomspace(1e-4, 1e6, 20000)
    for cfg in random_admissible(rng, 50, dims=(2, 3, 4)):
        s = np.sign(g_s(cfg, r))
        s = s[s != 0]
        assert np.count_nonzero(np.diff(s)) == 1


def test_g_s_derivative_identity(rng):
    r = np.geomspace(0.05, 50, 200)
    for cfg in random_admissible(rng, 20, dims=(2, 3, 4, 5)):
        h = 1e-3 * r
        fd = (g_s(cfg, r - 2 * h) - 8 * g_s(cfg, r - h) + 8 * g_s(cfg, r + h) - g_s(cfg, r + 2 * h)) / (12 * h)
        an = -cfg.d * r ** (cfg.d - 1) * g_c(cfg, r)
        scale = np.maximum(np.abs(an), 1e-3 * np.max(np.abs(an)))
        assert np.max(np.abs(fd - an) / scale) < 1e-6


def test_enclosed_fraction_is_one_minus_g_s(rng):
    r = np.geomspace(1e-3, 1e3, 50)
    for cfg in random_admissible(rng, 20):
        np.testing.assert_allclose(enclosed_fraction(cfg, r), 1 - g_s(cfg, r), rtol=0, atol=1e-13)


def test_solve_inner_radius_examples():
    r0 = solve_inner_radius(B)
    assert r0 == pytest.approx(bisect(lambda s: Q_prime(B, s), 0.5, 3.0), rel=1e-12)
    assert abs(Q_prime(B, r0)) < 1e-10
    r0w = solve_inner_radius(WEAK_B)
    assert r0w == pytest.approx(bisect(lambda s: Q_prime(WEAK_B, s), 1.0, 20.0), rel=1e-12)
    assert abs(Q_prime(WEAK_B, r0w)) < 1e-10
    assert r0w == pytest.approx(5.973, abs=5e-3)
    beta = (1 / 3) ** (2 / 3)
    assert r0 == pytest.approx(math.sqrt((beta * 4 - 1) / (1 - beta)), rel=1e-14)


@pytest.mark.parametrize("cfg", [A1, A2, C, SINGLE])
def test_inner_radius_outside_case_b(cfg):
    with pytest.raises(RegimeError, match="no inner radius in this regime"):
        solve_inner_radius(cfg)


def test_inner_radius_random_case_b(rng):
    n = 0
    while n < 100:
        d = int(rng.choice([2, 3, 4]))
        h1 = float(rng.uniform(0.2, 2))
        h2 = h1 * float(rng.uniform(1.1, 3))
        g1 = float(rng.uniform(0.1, 5))
        g2 = g1 + float(rng.uniform(1.01, 5))
        cfg = ChargeConfig(d, g1, g2, h1, h2)
        if case_tag(cfg) is not CaseTag.B:
            continue
        n += 1
        r0 = solve_inner_radius(cfg)
        assert abs(Q_prime(cfg, r0)) < 1e-10
        assert abs(enclosed_fraction(cfg, r0)) < 1e-12


def test_solve_density_zero_examples():
    rc = solve_density_zero(A1)
    assert rc == pytest.approx(bisect(lambda r: g_c(A1, r), 1.0, 20.0), rel=1e-12)
    assert rc == pytest.approx(4.858, abs=5e-4)
    assert abs(g_c(A1, rc)) < 1e-12
    assert solve_density_zero(ChargeConfig(3, 1.0, 8.0, 1.0, 2.0)) == 0.0
    assert solve_density_zero(A2) is None
    with pytest.raises(ValueError):
        solve_density_zero(SINGLE)


def test_classify_examples():
    r = classify(A1)
    assert (r.case, r.kind) == (CaseTag.A1, SupportKind.BALL)
    assert r.support.outer == pytest.approx(1.021, abs=5e-4)
    r = classify(B)
    assert (r.case, r.kind) == (CaseTag.B, SupportKind.SHELL)
    assert r.support.inner == pytest.approx(1.3331, abs=5e-4)
    assert r.support.outer == pytest.approx(3.30, abs=5e-3)
    assert classify(A2).kind is SupportKind.BALL
    assert classify(C).kind is SupportKind.BALL
    cfg = ChargeConfig(3, 8.0, 9.0, 2.0, 2.05)
    r = classify(cfg)
    assert (8 / 9) ** (1 / 3) <= 2 / 2.05 <= (9 / 8) ** 0.5
    assert r.admissibility is Admissibility.WEAKLY_ADMISSIBLE
    assert r.kind is SupportKind.WHOLE_SPACE


def test_classify_weak_regimes():
    # partition of the weakly admissible line gamma2 - gamma1 = 1
    weak_a1 = classify(ChargeConfig(3, 1.0, 2.0, 2.0, 1.0))
    assert weak_a1.case is CaseTag.A1 and weak_a1.kind is SupportKind.BALL
    weak_a2 = classify(ChargeConfig(3, 0.2, 1.2, 2.0, 1.0))
    assert weak_a2.case is CaseTag.A2 and weak_a2.kind is SupportKind.WHOLE_SPACE
    weak_b = classify(WEAK_B)
    assert weak_b.kind is SupportKind.COMPLEMENT_OF_BALL
    assert weak_b.support.outer == math.inf
    weak_c = classify(ChargeConfig(3, 0.1, 1.1, 1.0, 2.0))
    assert weak_c.case is CaseTag.C and weak_c.kind is SupportKind.WHOLE_SPACE
    single = classify(ChargeConfig(2, 1.0, 2.0, 1.0, 1.0))
    assert single.kind is SupportKind.WHOLE_SPACE


def test_classify_not_admissible():
    with pytest.raises(NotAdmissibleError):
        classify(ChargeConfig(3, 1.0, 1.5, 1.0, 1.0))


def test_case_ties_and_conventions():
    assert case_tag(ChargeConfig(3, 1.0, 4.0, 2.0, 1.0)) is CaseTag.A2   # ratio = (h1/h2)^2
    assert case_tag(ChargeConfig(3, 1.0, 8.0, 1.0, 2.0)) is CaseTag.C    # ratio = (h2/h1)^d
    assert case_tag(ChargeConfig(3, 1.0, 3.0, 1.5, 1.5)) is CaseTag.A2
    assert case_tag(ChargeConfig(3, 0.0, 3.0, 2.0, 1.0)) is CaseTag.A2
    assert case_tag(ChargeConfig(3, 0.0, 3.0, 1.0, 2.0)) is CaseTag.C


@pytest.mark.parametrize("h1,h2", [(2.0, 1.0), (1.0, 2.0)])
@pytest.mark.parametrize("d", [2, 3])
def test_partition_at_point_m(h1, h2, d):
    g1, g2 = transition_point(h1, h2, d)
    assert g2 - g1 == pytest.approx(1.0, rel=1e-14)
    at_m = ChargeConfig(d, g1, g1 + 1.0, h1, h2)
    # ties resolve to A2 / C, and both give whole-space support on the weak line
    assert case_tag(at_m) in (CaseTag.A2, CaseTag.C)
    assert classify(at_m, tol=1e-9).kind is SupportKind.WHOLE_SPACE
    # moving along the weak line past M changes the regime
    past = ChargeConfig(d, g1 * 1.1, g1 * 1.1 + 1.0, h1, h2)
    reg = classify(past, tol=1e-9)
    if h2 < h1:
        assert (reg.case, reg.kind) == (CaseTag.A1, SupportKind.BALL)
    else:
        assert (reg.case, reg.kind) == (CaseTag.B, SupportKind.COMPLEMENT_OF_BALL)
    before = ChargeConfig(d, g1 * 0.9, g1 * 0.9 + 1.0, h1, h2)
    assert classify(before, tol=1e-9).kind is SupportKind.WHOLE_SPACE


def test_outer_radius_vs_density_zero_ordering(rng):
    seen = {CaseTag.A1: 0, CaseTag.B: 0}
    for cfg in random_admissible(rng, 2000, dims=(2, 3, 4)):
        if cfg.gamma1 == 0 or cfg.h1 == cfg.h2:
            continue
        reg = classify(cfg)
        if reg.case is CaseTag.A1:
            assert reg.support.outer < reg.r_c
            seen[CaseTag.A1] += 1
        elif reg.case is CaseTag.B:
            assert reg.r_c is None or reg.r_c < reg.support.outer
            assert 0 < reg.support.inner < reg.support.outer
            seen[CaseTag.B] += 1
    assert min(seen.values()) > 20


def test_transition_continuity_case_c():
    h1, h2, d = 1.0, 2.0, 3
    for eps in (1e-2, 1e-4, 1e-6, 1e-8):
        cfg = ChargeConfig(d, 1.0, (h2 / h1) ** d * (1 + eps), h1, h2)
        assert case_tag(cfg) is CaseTag.C
        assert 0 < g_c(cfg, 0.0) <= 2 * eps * 1.0


@settings(max_examples=100)
@given(admissible_configs(dims=(2, 3)))
def test_regime_json_round_trip(cfg):
    reg = classify(cfg)
    again = Regime.from_dict(reg.to_dict())
    assert again == reg
