import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ultrarel import wavecurves as wc
from ultrarel.eos import DomainError, EosParams
from ultrarel.states import PrimitiveState, char_speeds, to_invariants
from ultrarel.wavecurves import Family

from oracles import rh_shock_at_rest


def delta_mp(sigma, gamma):
    mpmath.mp.dps = 40
    s, g = mpmath.mpf(sigma), mpmath.mpf(gamma)
    return (g / 2 * mpmath.log((1 + (g - 1) * mpmath.e ** s) / (1 + (g - 1) * mpmath.e ** -s))
            - (g - 1) * s)


def test_taub_examples(p43):
    assert wc.taub_n_ratio(1.0, p43) == 1.0
    assert wc.taub_n_ratio(2.0, p43) == pytest.approx(math.sqrt(2.8), rel=1e-15)
    for x in (0.1, 0.7, 3.0, 40.0):
        assert wc.taub_n_ratio(x, p43) * wc.taub_n_ratio(1 / x, p43) == pytest.approx(1.0,
                                                                                   rel=1e-14)
    with pytest.raises(DomainError):
        wc.taub_n_ratio(0.0, p43)


def test_sigma_jump_values(p43):
    assert wc.sigma_jump(0.0, p43) == 0.0
    assert wc.sigma_jump(1.0, p43) == pytest.approx(float(delta_mp(1, 4 / 3)), rel=1e-13)
    assert wc.sigma_jump(1.0, p43) == pytest.approx(0.0195900535106, abs=1e-12)
    with pytest.raises(DomainError):
        wc.sigma_jump(-0.1, p43)


def test_sigma_jump_matches_integrated_derivative(p43):
    mpmath.mp.dps = 30
    integral = mpmath.quad(lambda s: wc.sigma_jump_deriv(float(s), p43), [0, 1])
    assert float(integral) == pytest.approx(wc.sigma_jump(1.0, p43), rel=1e-12)


def test_sigma_jump_against_mpmath(params):
    for s in (1e-3, 0.1, 0.5, 2.0, 7.0, 30.0, 400.0):
        assert wc.sigma_jump(s, params) == pytest.approx(float(delta_mp(s, params.gamma)),
                                                         rel=1e-12, abs=1e-300)


def test_sigma_jump_deriv_large_sigma(params):
    # stays finite where e**sigma overflows
    assert wc.sigma_jump_deriv(800.0, params) == pytest.approx((2 - params.gamma) / 2, rel=1e-14)
    d = wc.sigma_jump_deriv(np.array([0.0, 1.0, 1e3]), params)
    assert d[0] == 0.0 and np.all(np.isfinite(d))


def test_sigma_jump_taub_route(params):
    for s in (0.01, 0.3, 1.0, 4.0, 12.0):
        for rho, S in ((1.0, 1.0), (7.3, 0.4)):
            assert wc.sigma_jump_from_taub(s, params, rho, S) == pytest.approx(
                wc.sigma_jump(s, params), rel=1e-9, abs=1e-14)


def test_relative_velocity_formula(params):
    a, a2 = params.a, params.a2
    for s in (0.05, 1.0, 5.0):
        e = math.exp(s)
        expect = a * (e - 1) / math.sqrt((1 + a2 * e) * (e + a2))
        assert wc.relative_velocity(s, params) == pytest.approx(expect, rel=1e-14)


def test_shock_state_matches_rh_root_find(params):
    k = params.a / (1 + params.a2)
    for fam, sign in ((Family.ONE, 1.0), (Family.THREE, -1.0)):
        for s in (0.02, 0.8, 3.0, 9.0):
            # a large S keeps the entropy positive behind a strong 3-shock
            sp = wc.shock_curve(PrimitiveState(1.0, 0.0, 100.0), fam, s, params)
            dphi, dSig, speed = rh_shock_at_rest(math.exp(sign * s), params.gamma)
            # the reference root-find loses ~1e-10 to cancellation at large compression
            assert sp.right.rapidity == pytest.approx(dphi, rel=1e-9)
            assert sp.speed == pytest.approx(speed, rel=1e-9)
            dr, ds, dS = wc.shock_increments(s, fam, params)
            assert dr == pytest.approx(dphi - k * sign * s, abs=1e-9)
            assert ds == pytest.approx(dphi + k * sign * s, abs=1e-9)
            assert dS == pytest.approx(dSig, abs=1e-9)


def test_zero_shock(p43):
    left = PrimitiveState(2.0, 0.3, 1.0)
    for fam, idx in ((Family.ONE, 0), (Family.THREE, 2)):
        sp = wc.shock_curve(left, fam, 0.0, p43)
        assert sp.right == left
        assert sp.speed == char_speeds(left, p43)[idx]
        lax = wc.lax_check(sp.left, sp.right, sp.speed, fam, p43)
        assert lax.degenerate and not lax.admissible


def test_shock_geometry(p43):
    left = PrimitiveState(2.0, 0.3, 1.0)
    one = wc.shock_curve(left, Family.ONE, 1.2, p43)
    three = wc.shock_curve(left, Family.THREE, 1.2, p43)
    assert one.right.rho > left.rho and three.right.rho < left.rho
    assert one.downstream is one.right and three.downstream is three.left
    assert one.right.S > left.S and three.right.S < left.S
    assert one.right.v < left.v and three.right.v < left.v
    # mass flux is the same measured on either side
    for sp in (one, three):
        assert wc.mass_flux(sp.right, sp.speed, p43) == pytest.approx(sp.mass_flux, rel=1e-12)


def test_mirror_symmetry(params):
    for s in (0.1, 1.0, 3.0):
        r1, s1, S1 = wc.shock_increments(s, 1, params)
        r3, s3, S3 = wc.shock_increments(s, 3, params)
        assert (r1, s1) == (s3, r3) and S1 == -S3
    with pytest.raises(ValueError):
        wc.shock_increments(1.0, Family.CONTACT, params)


def test_lax_admissible_and_reversed(params, rng):
    for _ in range(50):
        left = PrimitiveState(float(rng.uniform(0.1, 10)), float(rng.uniform(-0.9, 0.9)), 3.0)
        for fam in (Family.ONE, Family.THREE):
            sp = wc.shock_curve(left, fam, float(rng.uniform(0.01, 3)), params)
            assert wc.lax_check(sp.left, sp.right, sp.speed, fam, params).admissible
            # the same discontinuity read the other way is an expansion shock
            assert not wc.lax_check(sp.right, sp.left, sp.speed, fam, params).admissible


def test_rarefaction(p43):
    left = PrimitiveState(2.0, 0.3, 1.0)
    assert wc.rarefaction_curve(left, Family.ONE, 0.0, p43) == left
    eps = 0.4
    right = wc.rarefaction_curve(left, Family.ONE, eps, p43)
    assert math.log(left.rho) - math.log(right.rho) == pytest.approx(
        (1 + p43.a2) / (2 * p43.a) * eps, rel=1e-13)
    assert right.rapidity - left.rapidity == pytest.approx(eps / 2, rel=1e-13)
    assert right.S == pytest.approx(left.S, rel=1e-15)
    three = wc.rarefaction_curve(left, Family.THREE, eps, p43)
    assert to_invariants(three, p43).r == pytest.approx(to_invariants(left, p43).r, abs=1e-15)
    with pytest.raises(DomainError):
        wc.rarefaction_curve(left, Family.ONE, -1.0, p43)


def test_contact(p43):
    left = PrimitiveState(2.0, 0.3, 1.0)
    assert wc.contact(left, 0.0, p43) == left
    right = wc.contact(left, 0.25, p43)
    assert (right.rho, right.v) == (left.rho, left.v)
    iL, iR = to_invariants(left, p43), to_invariants(right, p43)
    assert (iL.r, iL.s) == (iR.r, iR.s)
    assert iR.Sigma - iL.Sigma == pytest.approx(0.25, rel=1e-13)


def test_strength_inverse(params):
    for om in (1e-9, 1e-3, 0.5, 3.0, 20.0):
        s = wc.sigma_from_strength(om, params)
        assert wc.shock_strength(s, params) == pytest.approx(om, rel=1e-13)
    assert wc.sigma_from_strength(0.0, params) == 0.0


def test_slope_bound_examples():
    p = EosParams(4 / 3)
    assert wc.shock_slope_bound(p) == pytest.approx(0.0717968, abs=1e-7)
    for g in np.linspace(1.01, 1.99, 30):
        assert 0 < wc.shock_slope_bound(EosParams(float(g))) < 1


def test_shock_slope_below_bound(params):
    omegas = np.geomspace(1e-6, 20, 200)
    slopes = [wc.shock_slope(float(o), params) for o in omegas]
    assert max(slopes) <= wc.shock_slope_bound(params) + 1e-14
    # leaves tangent to the rarefaction line s = const and steepens towards the bound
    assert abs(slopes[0]) < 1e-5
    assert np.all(np.diff(slopes) > 0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 5.0), st.floats(0.0, 5.0), st.sampled_from([1.1, 4 / 3, 1.75]))
def test_delta_superadditive(w1, w2, gamma):
    p = EosParams(gamma)
    lhs = wc.delta_of_strength(w1 + w2, p)
    rhs = wc.delta_of_strength(w1, p) + wc.delta_of_strength(w2, p)
    assert lhs >= rhs - 1e-14


def test_delta_strength_derivative(params):
    h = 1e-5
    for om in (0.1, 1.0, 4.0):
        fd = (wc.delta_of_strength(om + h, params) - wc.delta_of_strength(om - h, params)) / (2 * h)
        assert wc.delta_of_strength_deriv(om, params) == pytest.approx(fd, rel=1e-6)


def test_shock_speed_monotone(p43):
    left = PrimitiveState(1.0, 0.2, 1.0)
    sig = np.linspace(0, 5, 60)
    s1 = [wc.shock_speed(left, float(s), 1, p43) for s in sig]
    s3 = [wc.shock_speed(left, float(s), 3, p43) for s in sig]
    assert np.all(np.diff(s1) < 0)
    assert np.all(np.diff(s3) < 0)


def test_shock_curve_rejects_contact_family(p43):
    with pytest.raises(ValueError):
        wc.shock_curve(PrimitiveState(1.0, 0.0, 1.0), Family.CONTACT, 1.0, p43)
