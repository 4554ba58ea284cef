"""Exact check of ``D_r f = 0`` on the Coulomb-gas integrand, without the rewrite rule.

The integrand is

    f(t, t_1..t_N) = prod_{i<j} (t_j - t_i)^(-a_i a_j / 2) * prod_i (t_i - t)^((r-1) chi a_i / 2)

with weights ``a_i`` treated as nilpotent symbols (``a_i^2 = 0``). Functions
are tracked as ``g * f`` where ``g`` is a :class:`~bpzverify.jet.Jet` with
:class:`~bpzverify.jet.NilCoeff` coefficients in the variables
``(t, t_1, .., t_N)`` (variable 0 is ``t``). Applying ``L_{-n}`` maps ``g`` to
``L_{-n}(g f) / f`` via the product rule and the closed-form log-derivatives
of ``f``; each application costs one order of the jet.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .bsa import bsa_operator
from .jet import Jet, JetOrderError, NilCoeff, inv_power_jet
from .ratfunc import ChiMode, RatFunc, chi, conformal_weight
from .termalg import LinComb

__all__ = [
    "JetConfig",
    "jet_arith",
    "jet_recip",
    "jet_partial",
    "logderiv_f",
    "apply_L_analytic",
    "apply_word_analytic",
    "dr_constant_term",
    "random_point",
    "p_nil",
    "render_integrand_lincomb",
    "verify_integrand_bpz",
]


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown jet operation {op!r}")


def jet_recip(a: Jet) -> Jet:
    return a.recip()


def jet_partial(a: Jet, var: int) -> Jet:
    return a.partial(var)


@dataclass
class JetConfig:
    """Base point and parameters for the integrand; caches derived jets."""

    N: int
    r: int
    mode: ChiMode
    point: tuple  # (t, t_1, .., t_N) as Fractions
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.mode = ChiMode(self.mode)
        self.point = tuple(Fraction(x) for x in self.point)
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if len(self.point) != self.N + 1:
            raise ValueError(f"point needs {self.N + 1} coordinates, got {len(self.point)}")
        if len(set(self.point)) != len(self.point):
            raise ValueError(f"base-point coordinates must be pairwise distinct: {self.point}")

    @property
    def nvars(self) -> int:
        return self.N + 1

    def inv_power(self, l: int, m: int, order: int) -> Jet:
        """Jet of ``(t_l - t)^(-m)``."""
        key = ("inv", l, m, order)
        j = self._cache.get(key)
        if j is None:
            j = inv_power_jet(self.nvars, order, self.point[l] - self.point[0], m, l, 0)
            self._cache[key] = j
        return j

    def unit(self) -> NilCoeff:
        return NilCoeff.scalar(1)

    def logderiv(self, l: int, order: int) -> Jet:
        return logderiv_f(l, self, order)

    def delta(self, l: int) -> NilCoeff:
        key = ("delta", l)
        d = self._cache.get(key)
        if d is None:
            d = conformal_weight(NilCoeff.var(l))
            self._cache[key] = d
        return d


def logderiv_f(l: int, cfg: JetConfig, order: int | None = None) -> Jet:
    """Jet of ``d log f / d v_l`` (``l = 0`` is ``t``, ``l >= 1`` is ``t_l``)."""
    if order is None:
        order = cfg.r
    key = ("logd", l, order)
    hit = cfg._cache.get(key)
    if hit is not None:
        return hit
    nv, p = cfg.nvars, cfg.point
    rc_half = chi(cfg.mode) * Fraction(cfg.r - 1, 2)
    out = Jet(nv, order)
    if l == 0:
        for i in range(1, cfg.N + 1):
            if not rc_half:
                break
            out = out + inv_power_jet(nv, order, p[i] - p[0], 1, i, 0).scale(NilCoeff.var(i, -rc_half))
    elif 1 <= l <= cfg.N:
        for j in range(1, cfg.N + 1):
            if j == l:
                continue
            c = NilCoeff.var(l) * NilCoeff.var(j) * Fraction(-1, 2)
            out = out + inv_power_jet(nv, order, p[l] - p[j], 1, l, j).scale(c)
        if rc_half:
            out = out + inv_power_jet(nv, order, p[l] - p[0], 1, l, 0).scale(NilCoeff.var(l, rc_half))
    else:
        raise ValueError(f"variable index {l} out of range 0..{cfg.N}")
    cfg._cache[key] = out
    return out


def apply_L_analytic(n: int, g: Jet, cfg: JetConfig) -> Jet:
    """Return ``g'`` with ``g' f = L_{-n}(g f)``; the jet order drops by one.

    ``cfg`` supplies the integrand data: ``nvars``, ``N``, ``logderiv``,
    ``inv_power`` and ``delta``. Any coefficient ring works, which lets the
    floating-point oracle reuse this routine.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if g.order < 1:
        raise JetOrderError("jet order exhausted; cannot apply another L_{-n}")
    o = g.order - 1
    if n == 1:
        return g.partial(0) + g.mul(cfg.logderiv(0, o), o)
    out = Jet(cfg.nvars, o)
    for l in range(1, cfg.N + 1):
        d = g.partial(l) + g.mul(cfg.logderiv(l, o), o)
        out = out - d.mul(cfg.inv_power(l, n - 1, o))
        out = out + g.truncate(o).mul(cfg.inv_power(l, n, o)).scale(cfg.delta(l) * (n - 1))
    return out


def apply_word_analytic(word, cfg: JetConfig, memo: dict | None = None) -> Jet:
    """Apply ``L_{-n_1} .. L_{-n_k}`` (rightmost first) to ``g = 1`` at order ``r``."""
    word = tuple(word)
    if memo is None:
        memo = {}
    if word in memo:
        return memo[word]
    if not word:
        g = Jet.constant(cfg.nvars, cfg.r, cfg.unit())
    else:
        g = apply_L_analytic(word[0], apply_word_analytic(word[1:], cfg, memo), cfg)
    memo[word] = g
    return g


def _as_nil(c) -> NilCoeff:
    if isinstance(c, NilCoeff):
        return c
    return NilCoeff.scalar(c)


def dr_constant_term(cfg: JetConfig) -> NilCoeff:
    """Constant term of ``D_r f / f`` at the base point, over all weight subsets."""
    op = bsa_operator(cfg.r, cfg.mode)
    memo: dict = {}
    total = NilCoeff()
    for comp, coeff in op.entries:
        g = apply_word_analytic(comp, cfg, memo)
        total = total + _as_nil(g.constant_term()) * coeff
    return total


def random_point(N: int, rng: random.Random, num_bound: int = 100, den_bound: int = 16) -> tuple:
    """``N + 1`` pairwise distinct small rationals (rejection sampling)."""
    pts: list[Fraction] = []
    seen = set()
    while len(pts) < N + 1:
        x = Fraction(rng.randint(-num_bound, num_bound), rng.randint(1, den_bound))
        if x not in seen:
            seen.add(x)
            pts.append(x)
    return tuple(pts)


def p_nil(n: int, point) -> NilCoeff:
    """``P_n = sum_l a_l / (2 (t_l - t)^n)`` at an exact base point."""
    t = Fraction(point[0])
    return sum(
        (NilCoeff.var(l, RatFunc.const(Fraction(1, 2) / (Fraction(x) - t) ** n))
         for l, x in enumerate(point[1:], start=1)),
        NilCoeff(),
    )


def render_integrand_lincomb(v: LinComb, point) -> NilCoeff:
    """Evaluate a q-free combination with each ``P_n`` replaced by :func:`p_nil`."""
    total = NilCoeff()
    for k, c in v.items():
        if k.q:
            raise ValueError(f"term {k.label()} carries Q-indices; only q-free terms render")
        term = NilCoeff.scalar(c)
        for n in k.p:
            term = term * p_nil(n, point)
        total = total + term
    return total


def _trial(args):
    r, mode, N, point = args
    cfg = JetConfig(N, r, mode, point)
    return dr_constant_term(cfg)


def verify_integrand_bpz(r: int, mode: ChiMode, N: int, trials: int = 10, seed: int = 0,
                         *, workers: int = 1) -> dict:
    """Check ``D_r f = 0`` exactly at ``trials`` random rational base points.

    Randomized identity testing: a nonzero rational function of the base
    point would be caught with overwhelming probability, but a pass is not a
    certificate.
    """
    mode = ChiMode(mode)
    if not isinstance(r, int) or r < 1:
        raise ValueError(f"r must be an integer >= 1, got {r!r}")
    if N < r:
        raise ValueError(f"need N >= r, got N={N}, r={r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    points = [random_point(N, rng) for _ in range(trials)]
    jobs = [(r, mode, N, p) for p in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial, jobs))
    else:
        results = [_trial(j) for j in jobs]
    rows = []
    for p, res in zip(points, results):
        row = {"point": [str(x) for x in p], "zero": res.is_zero()}
        if not res.is_zero():
            row["residual"] = res.to_json()
        rows.append(row)
    return {
        "r": r,
        "mode": mode.value,
        "N": N,
        "seed": seed,
        "trials": rows,
        "all_zero": all(row["zero"] for row in rows),
    }
