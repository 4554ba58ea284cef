from __future__ import annotations

import random
from fractions import Fraction

import pytest

from bpzverify.evalconfig import Geometry, PointConfig, evaluate_p
from bpzverify.jet import Jet, NilCoeff
from bpzverify.oracle_jet import (
    JetConfig, apply_L_analytic, apply_word_analytic, dr_constant_term, logderiv_f, p_nil,
    random_point, render_integrand_lincomb, verify_integrand_bpz,
)
from bpzverify.ratfunc import ChiMode, chi
from bpzverify.termalg import Q0
from bpzverify.virasoro import RuleKind, RuleParams, apply_L, apply_word
from bpzverify.termalg import LinComb

from conftest import MODES

F = Fraction


def one(cfg, order=None):
    return Jet.constant(cfg.nvars, cfg.r if order is None else order, NilCoeff.scalar(1))


def test_logderiv_t_is_minus_rc_p1(mode):
    pt = (F(0), F(1), F(5, 2), F(-3))
    for r in (1, 2, 4):
        cfg = JetConfig(3, r, mode, pt)
        got = logderiv_f(0, cfg).constant_term()
        want = p_nil(1, pt) * (chi(mode) * -(r - 1))
        assert got == want
        if r == 1:
            assert logderiv_f(0, cfg).is_zero()


def test_logderiv_hand_value(mode):
    cfg = JetConfig(2, 3, mode, (0, 1, 2))
    got = logderiv_f(1, cfg).constant_term()
    a1, a2 = NilCoeff.var(1), NilCoeff.var(2)
    want = a1 * a2 * F(1, 2) + a1 * (chi(mode) * F(3 - 1, 2))
    assert got == want


def test_coincident_points_rejected():
    with pytest.raises(ValueError):
        JetConfig(2, 2, ChiMode.GAMMA_HALF, (0, 1, 1))


def test_L1_on_one(mode):
    pt = (F(1, 3), F(2), F(-7, 4))
    cfg = JetConfig(2, 2, mode, pt)
    got = apply_L_analytic(1, one(cfg), cfg).constant_term()
    assert got == p_nil(1, pt) * -chi(mode)


def test_r1_has_no_pure_constant(mode):
    cfg = JetConfig(3, 1, mode, (0, 1, 3, 4))
    for n in (1, 2, 3):
        got = NilCoeff() + apply_L_analytic(n, one(cfg), cfg).constant_term()
        assert got.scalar_part() == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cross_check_integrand_rule(n, mode):
    rng = random.Random(n)
    for r in range(max(n, 2), 5):
        pt = random_point(4, rng)
        cfg = JetConfig(4, r, mode, pt)
        got = apply_L_analytic(n, one(cfg), cfg).constant_term()
        rule = apply_L(n, Q0, RuleParams(r, mode, RuleKind.INTEGRAND))
        assert got == render_integrand_lincomb(rule, pt)


def test_cross_check_words(mode):
    # words of the INTEGRAND rule stay q-free and match the analytic operator
    r = 4
    pt = random_point(4, random.Random(9))
    cfg = JetConfig(4, r, mode, pt)
    params = RuleParams(r, mode, RuleKind.INTEGRAND)
    memo = {}
    for word in [(1, 1), (2, 1), (1, 2), (1, 1, 1), (2, 2), (1, 3)]:
        rule = apply_word(word, LinComb.single(Q0), params)
        assert apply_word_analytic(word, cfg, memo).constant_term() == render_integrand_lincomb(rule, pt)


def test_p_nil_matches_evalconfig():
    pt = (F(1, 2), F(3), F(-1), F(7, 3))
    weights = [0.3, -1.2, 2.5]
    cfg = PointConfig(Geometry.SPHERE, float(pt[0]), [(float(x), w) for x, w in zip(pt[1:], weights)])
    for n in (1, 2, 3):
        nil = p_nil(n, pt)
        val = sum(float(c.constant_value()) * weights[NilCoeff.subset(m)[0] - 1] for m, c in nil.terms.items())
        assert abs(val - evaluate_p(cfg, n)) < 1e-12


def test_render_rejects_q():
    with pytest.raises(ValueError):
        render_integrand_lincomb(apply_L(1, Q0, RuleParams(2, ChiMode.GAMMA_HALF)), (0, 1, 2))


def test_order_exhausted():
    cfg = JetConfig(2, 1, ChiMode.GAMMA_HALF, (0, 1, 2))
    g = apply_L_analytic(1, one(cfg), cfg)
    with pytest.raises(ValueError):
        apply_L_analytic(1, g, cfg)


def test_verify_small(mode):
    rep = verify_integrand_bpz(2, mode, 2, trials=10, seed=1)
    assert rep["all_zero"] and len(rep["trials"]) == 10
    assert rep["N"] == 2 and rep["seed"] == 1 and rep["mode"] == mode.value
    assert verify_integrand_bpz(1, mode, 2, trials=2)["all_zero"]


def test_verify_r4(mode):
    assert verify_integrand_bpz(4, mode, 4, trials=5, seed=2)["all_zero"]


def test_verify_errors():
    with pytest.raises(ValueError):
        verify_integrand_bpz(3, ChiMode.GAMMA_HALF, 2)
    with pytest.raises(ValueError):
        verify_integrand_bpz(2, ChiMode.GAMMA_HALF, 2, trials=0)


def test_deterministic_and_parallel():
    a = verify_integrand_bpz(3, ChiMode.TWO_OVER_GAMMA, 3, trials=4, seed=7)
    b = verify_integrand_bpz(3, ChiMode.TWO_OVER_GAMMA, 3, trials=4, seed=7, workers=2)
    assert a == b
    pts = {tuple(t["point"]) for t in a["trials"]}
    assert len(pts) == 4


def test_oracle_detects_wrong_operator():
    # D_3 built for the other chi does not annihilate f
    pt = random_point(3, random.Random(0))
    cfg = JetConfig(3, 3, ChiMode.GAMMA_HALF, pt)
    assert dr_constant_term(cfg).is_zero()
    from bpzverify.bsa import bsa_operator
    memo, total = {}, NilCoeff()
    for comp, coeff in bsa_operator(3, ChiMode.TWO_OVER_GAMMA).entries:
        total = total + apply_word_analytic(comp, cfg, memo).constant_term() * coeff
    assert not total.is_zero()


def test_random_points_distinct():
    rng = random.Random(0)
    for _ in range(50):
        p = random_point(6, rng)
        assert len(set(p)) == 7
        assert all(abs(x.numerator) <= 100 * x.denominator and x.denominator <= 16 for x in p)
