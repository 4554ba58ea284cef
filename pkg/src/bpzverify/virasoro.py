"""Action of the lowering operators ``L_{-n}`` on basis terms ``P_n Q_q``.

The FULL rule acts on the whole P/Q algebra with no perturbation terms; the
INTEGRAND rule keeps only the pure-P groups and acts on the integrand ``f``
(``q`` must be empty there).

Each group of the rule carries one coefficient, produced by
:func:`rule_coefficients`. Keeping them in one table makes the rule easy to
audit and lets the fault-injection tests perturb a single entry.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ratfunc import GAMMA, ONE, ChiMode, RatFunc, background_charge, chi
from .termalg import LinComb, TermKey, canonicalize

__all__ = [
    "RuleKind",
    "RuleParams",
    "RuleBudgetError",
    "rule_coefficients",
    "apply_L",
    "apply_L_lincomb",
    "apply_word",
    "check_commutator",
]


class RuleBudgetError(ValueError):
    """The rule was requested outside its validity range."""


class RuleKind(enum.Enum):
    FULL = "full"
    INTEGRAND = "integrand"


@dataclass(frozen=True)
class RuleParams:
    r: int
    mode: ChiMode
    kind: RuleKind = RuleKind.FULL

    def __post_init__(self):
        if not isinstance(self.r, int) or self.r < 1:
            raise ValueError(f"r must be an integer >= 1, got {self.r!r}")
        object.__setattr__(self, "mode", ChiMode(self.mode))
        object.__setattr__(self, "kind", RuleKind(self.kind))


# Names of the rule's coefficient groups, in the order they are emitted.
GROUPS = (
    "shift",      # n_i P_{n_i+n} / P_{n_i}, scaled by n_i
    "pp",         # P_i P_{n-i}
    "weight",     # P_n
    "pt",         # P_i T_{p+1}^{n-i}
    "t_new",      # T_{p+1}^n
    "tt",         # T_{p+2}^{n-i} T_{p+1}^i
    "ptj",        # P_i T_j^{n-i}
    "tj",         # T_j^n, constant part
    "tj_q",       # T_j^n, scaled by q_j
    "tptj",       # T_{p+1}^{n-i} T_j^i
    "tjtj",       # T_{j'}^{n-i} T_j^i
)


def rule_coefficients(n: int, r: int, mode: ChiMode) -> dict[str, RatFunc]:
    """Coefficient of each rule group for ``L_{-n}`` at degenerate order ``r``."""
    x = chi(mode)
    Q = background_charge()
    rc = x * (r - 1)
    half = Fraction(1, 2)
    return {
        "shift": ONE,
        "pp": -ONE,
        "weight": Q * (n - 1) - rc,
        "pt": RatFunc.const(2),
        "t_new": rc - GAMMA.inverse() * (2 * (n - 1)),
        "tt": -ONE,
        "ptj": -GAMMA,
        "tj": GAMMA * Q * (half * (n - 1)) - GAMMA * rc * half,
        "tj_q": ONE,
        "tptj": GAMMA,
        "tjtj": GAMMA * GAMMA * Fraction(-1, 4),
    }


_COEFF_CACHE: dict = {}


def _coeffs(n: int, params: RuleParams) -> dict[str, RatFunc]:
    # cache keyed on the function object so monkeypatched rules are honoured
    key = (rule_coefficients, n, params.r, params.mode)
    c = _COEFF_CACHE.get(key)
    if c is None:
        c = rule_coefficients(n, params.r, params.mode)
        _COEFF_CACHE[key] = c
    return c


def _emit(out: dict, p, q, coeff: RatFunc) -> None:
    if not coeff:
        return
    key = canonicalize(p, q)
    old = out.get(key)
    if old is None:
        out[key] = coeff
    else:
        new = old + coeff
        if new:
            out[key] = new
        else:
            del out[key]


def apply_L(n: int, k: TermKey, params: RuleParams) -> LinComb:
    """Expand ``L_{-n} P_{k.p} Q_{k.q}`` in the term basis."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    deg = k.degree
    full = params.kind is RuleKind.FULL
    if full and n + deg > params.r:
        raise RuleBudgetError(
            f"L_-{n} on {k.label()} needs degree budget {n + deg} > r={params.r}"
        )
    if not full and k.q:
        raise ValueError("INTEGRAND rule acts on q-empty terms only")

    c = _coeffs(n, params)
    p, q = list(k.p), list(k.q)
    out: dict = {}

    for idx, ni in enumerate(p):
        rest = p[:idx] + p[idx + 1:]
        _emit(out, rest + [ni + n], q, c["shift"] * ni)
    for i in range(1, n):
        _emit(out, p + [i, n - i], q, c["pp"])
    _emit(out, p + [n], q, c["weight"])
    if not full:
        return LinComb(out)

    for i in range(1, n):
        _emit(out, p + [i], q + [n - i], c["pt"])
    _emit(out, p, q + [n], c["t_new"])
    for i in range(1, n):
        _emit(out, p, q + [i, n - i], c["tt"])

    for j, qj in enumerate(q):
        for i in range(1, n):
            raised = list(q)
            raised[j] += n - i
            _emit(out, p + [i], raised, c["ptj"])
        raised = list(q)
        raised[j] += n
        _emit(out, p, raised, c["tj"] + c["tj_q"] * qj)
        for i in range(1, n):
            raised = list(q)
            raised[j] += i
            _emit(out, p, raised + [n - i], c["tptj"])
        for jp in range(len(q)):
            for i in range(1, n):
                raised = list(q)
                raised[jp] += n - i
                raised[j] += i
                _emit(out, p, raised, c["tjtj"])
    return LinComb(out)


def apply_L_lincomb(n: int, v: LinComb, params: RuleParams, cache: dict | None = None) -> LinComb:
    """Linear extension of :func:`apply_L` to a combination."""
    out = LinComb()
    for k, coeff in v.items():
        if cache is not None:
            img = cache.get((n, k))
            if img is None:
                img = cache[(n, k)] = apply_L(n, k, params)
        else:
            img = apply_L(n, k, params)
        out.iadd_scaled(coeff, img)
    return out


def apply_word(word: Sequence[int], start: LinComb, params: RuleParams,
               cache: dict | None = None) -> LinComb:
    """Apply ``L_{-n_1} ... L_{-n_k}`` to ``start``; the rightmost factor acts first."""
    v = start
    for n in reversed(tuple(word)):
        v = apply_L_lincomb(n, v, params, cache)
    return v


def check_commutator(n: int, m: int, k: TermKey, params: RuleParams) -> bool:
    """Whether ``[L_{-n}, L_{-m}] = (m - n) L_{-(n+m)}`` holds exactly on ``k``."""
    if n + m + k.degree > params.r:
        raise RuleBudgetError(
            f"commutator ({n},{m}) on {k.label()} exceeds budget r={params.r}"
        )
    start = LinComb.single(k)
    lhs = apply_word((n, m), start, params) - apply_word((m, n), start, params)
    rhs = apply_L(n + m, k, params).scale(m - n)
    return lhs == rhs
