from __future__ import annotations

import json

import pytest

from bpzverify import bsa, virasoro
from bpzverify.bsa import (
    bsa_coefficient, bsa_operator, compositions, expand_Dr, verify_bpz,
)
from bpzverify.ratfunc import ChiMode, chi
from bpzverify.termalg import LinComb, Q0
from bpzverify.virasoro import GROUPS, RuleParams, apply_word

import goldens
from conftest import MODES, perturbed_rule


def test_compositions():
    assert compositions(3) == [(3,), (1, 2), (2, 1), (1, 1, 1)]
    assert compositions(1) == [(1,)]
    for r in range(1, 13):
        cs = compositions(r)
        assert len(cs) == 2 ** (r - 1)
        assert len(set(cs)) == len(cs)
        assert all(sum(c) == r for c in cs)
    with pytest.raises(ValueError):
        compositions(0)


def test_bsa_d2_d3(mode):
    x = chi(mode)
    for c, f in goldens.D2.items():
        assert bsa_coefficient(c, 2, mode) == f(x)
    for c, f in goldens.D3.items():
        assert bsa_coefficient(c, 3, mode) == f(x)


def test_reversal_symmetry():
    for r in range(1, 13):
        for m in MODES:
            for c in compositions(r):
                assert bsa_coefficient(c, r, m) == bsa_coefficient(c[::-1], r, m)


def test_bsa_coefficient_errors():
    with pytest.raises(ValueError):
        bsa_coefficient((1, 1), 3, ChiMode.GAMMA_HALF)
    with pytest.raises(ValueError):
        bsa_coefficient((0, 2), 2, ChiMode.GAMMA_HALF)


def test_expand_r2_empty(mode):
    assert not expand_Dr(2, mode)


def test_degree_purity(mode):
    # every key of every word image, hence of any partial sum, has degree r
    for r in range(2, 6):
        params = RuleParams(r, mode)
        for c in compositions(r):
            img = apply_word(c, LinComb.single(Q0), params)
            assert all(k.degree == r for k in img.keys())


@pytest.mark.parametrize("r", range(2, 7))
def test_main_theorem(r, mode):
    rep = verify_bpz(r, mode)
    assert rep.all_zero and not rep.table
    assert rep.n_compositions == 2 ** (r - 1)


@pytest.mark.parametrize("r", [3, 4, 5])
def test_convention_independence(r, mode):
    # compare word by word before the cancellation, then the totals
    op = bsa_operator(r, mode)
    params = RuleParams(r, mode)
    right = LinComb()
    left = LinComb()
    for c, coeff in op.entries:
        right.iadd_scaled(coeff, apply_word(c, LinComb.single(Q0), params))
        left.iadd_scaled(coeff, apply_word(c[::-1], LinComb.single(Q0), params))
    assert right == left
    assert expand_Dr(r, mode, convention="left") == expand_Dr(r, mode, convention="right")


def test_parallel_matches_serial():
    stats_a, stats_b = {}, {}
    a = expand_Dr(4, ChiMode.TWO_OVER_GAMMA, workers=2, stats=stats_a)
    b = expand_Dr(4, ChiMode.TWO_OVER_GAMMA, stats=stats_b)
    assert a == b and stats_a == stats_b


def test_report_serialization():
    rep = verify_bpz(3, ChiMode.GAMMA_HALF)
    d = rep.to_json()
    assert d["all_zero"] and d["lambda"] == [] and d["chi_mode"] == "gamma/2"
    assert set(d["meta"]) == {"elapsed_ms"}
    d.pop("meta")
    again = verify_bpz(3, ChiMode.GAMMA_HALF).to_json()
    again.pop("meta")
    assert json.dumps(d) == json.dumps(again)
    assert rep.to_csv() == "r,chi_mode,p,q,value\n"


def test_expand_rejects_small_r():
    with pytest.raises(ValueError):
        expand_Dr(1, ChiMode.GAMMA_HALF)
    with pytest.raises(ValueError):
        expand_Dr(3, ChiMode.GAMMA_HALF, convention="middle")


@pytest.mark.parametrize("group", GROUPS)
def test_fault_injection(group, mode, monkeypatch):
    monkeypatch.setattr(virasoro, "rule_coefficients", perturbed_rule(group, 1))
    rep = verify_bpz(3, mode)
    assert not rep.all_zero, f"perturbing {group} went unnoticed"
    assert rep.to_json()["lambda"]
    monkeypatch.undo()
    assert verify_bpz(3, mode).all_zero


def test_nonzero_table_is_reported(monkeypatch):
    monkeypatch.setattr(virasoro, "rule_coefficients", perturbed_rule("weight", 1))
    rep = verify_bpz(2, ChiMode.GAMMA_HALF)
    csv_lines = rep.to_csv().splitlines()
    assert len(csv_lines) == 1 + len(rep.table)
    assert bsa.verify_bpz is verify_bpz


@pytest.mark.slow
def test_stretch_r8():
    for m in MODES:
        assert verify_bpz(8, m).all_zero
