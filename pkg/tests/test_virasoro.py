from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from bpzverify.ratfunc import ChiMode, chi
from bpzverify.termalg import LinComb, Q0, canonicalize
from bpzverify.virasoro import (
    GROUPS, RuleBudgetError, RuleKind, RuleParams, apply_L, apply_L_lincomb, apply_word,
    check_commutator, rule_coefficients,
)

import goldens
from conftest import MODES, keys_up_to


def test_golden_r2(mode):
    params = RuleParams(2, mode)
    start = LinComb.single(Q0)
    assert apply_L(1, Q0, params) == goldens.r2_L1(mode)
    assert apply_word((1, 1), start, params) == goldens.r2_L1L1(mode)
    assert apply_L(2, Q0, params) == goldens.r2_L2(mode)
    x2 = chi(mode) * chi(mode)
    assert not (apply_L(2, Q0, params).scale(x2) + apply_word((1, 1), start, params))


def test_golden_r3(mode):
    params = RuleParams(3, mode)
    start = LinComb.single(Q0)
    assert apply_word((1, 1), start, params) == goldens.r3_L1L1(mode)
    assert apply_L(2, Q0, params) == goldens.r3_L2(mode)
    x2 = chi(mode) * chi(mode)
    partial = apply_L(2, Q0, params).scale(x2) + apply_word((1, 1), start, params).scale(Fraction(1, 4))
    assert partial == goldens.r3_partial(mode)


def test_r3_L3_and_reduced_form(mode):
    params = RuleParams(3, mode)
    x = chi(mode)
    assert apply_L(3, Q0, params) == goldens.r3_L3(mode)
    # (chi/2 - chi^3) L_{-1} P_2 Q_0 + (chi^3 - chi/2) L_{-1} Q_2 = -(chi^4 - chi^2/2) [bracket]
    lhs = (apply_L(1, canonicalize([2], []), params).scale(x / 2 - x ** 3)
           + apply_L(1, canonicalize([], [2]), params).scale(x ** 3 - x / 2))
    assert lhs == goldens.r3_L3_from_partial(mode).scale(-(x ** 4 - x * x / 2))


def test_shift_group_example():
    params = RuleParams(3, ChiMode.GAMMA_HALF)
    out = apply_L(1, canonicalize([2], []), params)
    assert out[canonicalize([3], [])] == 2


@pytest.mark.parametrize("r", range(1, 7))
def test_grading(r, mode):
    params = RuleParams(r, mode)
    for k in keys_up_to(r - 1):
        for n in range(1, r - k.degree + 1):
            out = apply_L(n, k, params)
            assert all(key.degree == k.degree + n for key in out.keys())


def test_budget_enforced():
    params = RuleParams(2, ChiMode.GAMMA_HALF)
    with pytest.raises(RuleBudgetError):
        apply_L(3, Q0, params)
    with pytest.raises(RuleBudgetError):
        apply_L(1, canonicalize([2], []), params)
    with pytest.raises(ValueError):
        apply_L(0, Q0, params)
    with pytest.raises(ValueError):
        RuleParams(0, ChiMode.GAMMA_HALF)


def test_integrand_is_q_free_projection(mode):
    for r in range(2, 6):
        full = RuleParams(r, mode)
        integ = RuleParams(r, mode, RuleKind.INTEGRAND)
        for k in keys_up_to(r - 1):
            if k.q:
                with pytest.raises(ValueError):
                    apply_L(1, k, integ)
                continue
            for n in range(1, r - k.degree + 1):
                a = apply_L(n, k, integ)
                b = apply_L(n, k, full)
                assert a == LinComb({key: c for key, c in b.items() if not key.q})


def test_linearity(mode):
    params = RuleParams(5, mode)
    ks = keys_up_to(2)
    x = chi(mode)
    v = LinComb({k: x ** i + i for i, k in enumerate(ks)})
    for n in (1, 2, 3):
        direct = LinComb()
        for k, c in v.items():
            direct.iadd_scaled(c, apply_L(n, k, params))
        assert apply_L_lincomb(n, v, params) == direct
    assert apply_word((), v, params) == v


def test_commutator_examples():
    for r in (3, 4):
        for m in MODES:
            assert check_commutator(1, 2, Q0, RuleParams(r, m))
    assert check_commutator(2, 2, canonicalize([1], [1]), RuleParams(6, ChiMode.GAMMA_HALF))
    assert check_commutator(1, 3, canonicalize([1], [1]), RuleParams(6, ChiMode.TWO_OVER_GAMMA))
    with pytest.raises(RuleBudgetError):
        check_commutator(2, 2, canonicalize([1], []), RuleParams(4, ChiMode.GAMMA_HALF))


def commutator_cases(rmax=6):
    for r in range(2, rmax + 1):
        for k in keys_up_to(r - 2):
            for n, m in itertools.product(range(1, r + 1), repeat=2):
                if n + m + k.degree <= r:
                    yield r, n, m, k


@pytest.mark.parametrize("m_", MODES, ids=lambda m: m.value)
def test_commutator_exhaustive(m_):
    count = 0
    for r, n, m, k in commutator_cases():
        assert check_commutator(n, m, k, RuleParams(r, m_)), (r, n, m, k)
        count += 1
    assert count > 100


def test_rule_table_groups():
    c = rule_coefficients(2, 3, ChiMode.GAMMA_HALF)
    assert tuple(c) == GROUPS
