"""Floating-point check of ``D_r C^(l) = 0`` for real Coulomb gas integrals.

With ``gamma = i g`` and every weight ``alpha_j = i a_j`` purely imaginary,
all exponents of the integrand

    f^(l) = prod_{i<j} (t_j - t_i)^(-alpha_i alpha_j / 2) prod_i (t_i - t)^(-alpha_0 alpha_i / 2)
            prod_{s,i} (x_s - t_i)^(-gamma alpha_i / 2) prod_s (x_s - t)^(-gamma alpha_0 / 2)
            prod_{s<s'} (x_s' - x_s)^(-gamma^2 / 2),        alpha_0 = -(r-1) chi,

are real. ``D_r`` acts on ``(t, t_1..t_N)`` only, so it is applied under the
integral sign: for a batch of screening positions ``x`` the log-derivatives
of ``f^(l)`` are closed-form, and the jet machinery of
:mod:`bpzverify.oracle_jet` runs with numpy-array coefficients. The
resulting per-composition integrands are integrated together over the
ordered chamber ``t_{N-1} < x_1 < .. < x_l < t_N``.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .bsa import bsa_operator
from .jet import Jet, inv_power_jet
from .oracle_jet import apply_word_analytic
from .quadrature import QuadratureError, integrate_simplex
from .ratfunc import ChiMode, chi

__all__ = [
    "CoulombConfig",
    "ConfigError",
    "default_config",
    "branch_power",
    "exponents",
    "integrand",
    "apply_Dr_integrand",
    "dr_components",
    "verify_coulomb_bpz",
]

NORMALIZATION = (
    "normalized_residual = |sum_w c_w I_w| / max_w |c_w I_w|, where w runs over the "
    "compositions of r, c_w is the BSA coefficient and I_w is the integral of "
    "(L_{-w} f)(x) over the chamber; 0 when every term vanishes"
)


class ConfigError(ValueError):
    """Invalid Coulomb configuration."""


@dataclass(frozen=True)
class CoulombConfig:
    r: int
    mode: ChiMode
    N: int
    l: int
    t: float
    t_points: tuple
    g: float
    a: tuple
    tol: float = 1e-6
    quad_tol: float = 1e-10
    max_subdiv: int = 2 ** 14

    def __post_init__(self):
        object.__setattr__(self, "mode", ChiMode(self.mode))
        object.__setattr__(self, "t_points", tuple(float(x) for x in self.t_points))
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.r, int) or self.r < 1:
            raise ConfigError(f"r must be an integer >= 1, got {self.r!r}")
        if not isinstance(self.N, int) or self.N < 2:
            raise ConfigError(f"N must be an integer >= 2, got {self.N!r}")
        if not isinstance(self.l, int) or self.l < 0:
            raise ConfigError(f"l must be an integer >= 0, got {self.l!r}")
        if len(self.t_points) != self.N or len(self.a) != self.N:
            raise ConfigError("t_points and a must both have N entries")
        pts = (float(self.t),) + self.t_points
        if any(not math.isfinite(x) for x in pts):
            raise ConfigError("points must be finite")
        if any(x >= y for x, y in zip(pts, pts[1:])):
            raise ConfigError(f"need t < t_1 < .. < t_N, got {pts}")
        if not self.g > 0:
            raise ConfigError("g must be positive")
        if any(not x > 0 for x in self.a):
            raise ConfigError("weights a_j must be positive")
        edge = min(self.g * self.a[-2] / 2, self.g * self.a[-1] / 2)
        if edge < self.r:
            raise ConfigError(
                f"endpoint vanishing order min(g a_(N-1)/2, g a_N/2) = {edge} < r = {self.r}"
            )
        if not self.tol > 0 or not self.quad_tol > 0:
            raise ConfigError("tolerances must be positive")
        if self.max_subdiv < 1:
            raise ConfigError("max_subdiv must be >= 1")

    def to_json(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        d["t_points"] = list(self.t_points)
        d["a"] = list(self.a)
        return d

    @classmethod
    def from_json(cls, data: dict, **overrides) -> CoulombConfig:
        known = {f for f in cls.__dataclass_fields__}
        merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
        extra = set(merged) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        try:
            return cls(**merged)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path, **overrides) -> CoulombConfig:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_json(data, **overrides)


def default_config(r: int, mode, N: int | None = None, l: int = 1, g: float = 1.0,
                   **kw) -> CoulombConfig:
    """Evenly spaced points ``t = 0, t_i = i`` with the last two weights at the threshold."""
    N = max(r, 2) if N is None else N
    edge = 2.0 * r / g
    a = [1.0] * (N - 2) + [edge, edge]
    return CoulombConfig(r=r, mode=mode, N=N, l=l, t=0.0,
                         t_points=tuple(float(i) for i in range(1, N + 1)), g=g, a=tuple(a), **kw)


def branch_power(base, exponent):
    """``base**exponent`` with ``(-1)**c = exp(i pi c)`` for negative real bases."""
    base = np.asarray(base, dtype=float)
    mag = np.abs(base) ** exponent
    if np.any(base < 0):
        phase = np.where(base < 0, cmath.exp(1j * math.pi * exponent), 1.0)
        return mag * phase
    return mag


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-12 * max(1.0, abs(z)):
        raise ConfigError(f"{what} is not real: {z}")
    return z.real


@dataclass(frozen=True)
class Exponents:
    pair: dict            # (i, j) with i < j -> exponent of (t_j - t_i)
    deg: tuple            # index i-1 -> exponent of (t_i - t)
    screen: tuple         # index i-1 -> exponent of (x_s - t_i)
    screen_t: float       # exponent of (x_s - t)
    screen_pair: float    # exponent of (x_s' - x_s)
    delta: tuple          # conformal weights Delta_{alpha_i}
    coeffs: tuple = field(default=())  # (composition, BSA coefficient)


def exponents(cfg: CoulombConfig) -> Exponents:
    gamma = 1j * cfg.g
    alpha = [1j * x for x in cfg.a]
    x = complex(chi(cfg.mode).evaluate(gamma))
    alpha0 = -(cfg.r - 1) * x
    Q = gamma / 2 + 2 / gamma
    n = cfg.N
    pair = {
        (i, j): _real(-alpha[i - 1] * alpha[j - 1] / 2, "pair exponent")
        for i in range(1, n + 1) for j in range(i + 1, n + 1)
    }
    deg = tuple(_real(-alpha0 * a / 2, "degenerate exponent") for a in alpha)
    screen = tuple(_real(-gamma * a / 2, "screening exponent") for a in alpha)
    screen_t = _real(-gamma * alpha0 / 2, "screening-degenerate exponent")
    screen_pair = _real(-gamma * gamma / 2, "screening pair exponent")
    delta = tuple(_real(a / 2 * (Q - a / 2), "conformal weight") for a in alpha)
    coeffs = tuple(
        (comp, _real(complex(c.evaluate(gamma)), "BSA coefficient"))
        for comp, c in bsa_operator(cfg.r, cfg.mode).entries
    )
    return Exponents(pair, deg, screen, screen_t, screen_pair, delta, coeffs)


class _NumericContext:
    """Integrand data for :func:`apply_L_analytic` at a batch of screening positions."""

    def __init__(self, cfg: CoulombConfig, ex: Exponents, X: np.ndarray):
        self.cfg, self.ex = cfg, ex
        self.N, self.r = cfg.N, cfg.r
        self.nvars = cfg.N + 1
        self.point = (cfg.t,) + cfg.t_points
        self.X = X  # (M, l)
        self._cache: dict = {}

    def unit(self):
        return 1.0

    def delta(self, l: int) -> float:
        return self.ex.delta[l - 1]

    def inv_power(self, l: int, m: int, order: int) -> Jet:
        key = ("inv", l, m, order)
        j = self._cache.get(key)
        if j is None:
            j = self._cache[key] = inv_power_jet(self.nvars, order, self.point[l] - self.point[0], m, l, 0)
        return j

    def logderiv(self, l: int, order: int) -> Jet:
        key = ("logd", l, order)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        nv, p, ex = self.nvars, self.point, self.ex
        out = Jet(nv, order)
        if l == 0:
            for i in range(1, self.N + 1):
                if ex.deg[i - 1]:
                    out = out + inv_power_jet(nv, order, p[i] - p[0], 1, i, 0).scale(-ex.deg[i - 1])
            if ex.screen_t:
                for s in range(self.X.shape[1]):
                    out = out + inv_power_jet(nv, order, self.X[:, s] - p[0], 1, None, 0).scale(-ex.screen_t)
        else:
            for j in range(1, self.N + 1):
                if j != l:
                    e = ex.pair[(min(l, j), max(l, j))]
                    out = out + inv_power_jet(nv, order, p[l] - p[j], 1, l, j).scale(e)
            if ex.deg[l - 1]:
                out = out + inv_power_jet(nv, order, p[l] - p[0], 1, l, 0).scale(ex.deg[l - 1])
            for s in range(self.X.shape[1]):
                out = out + inv_power_jet(nv, order, self.X[:, s] - p[l], 1, None, l).scale(-ex.screen[l - 1])
        self._cache[key] = out
        return out


def _check_chamber(cfg: CoulombConfig, X: np.ndarray) -> None:
    if X.shape[1] != cfg.l:
        raise ConfigError(f"expected {cfg.l} screening variables, got {X.shape[1]}")
    if cfg.l == 0:
        return
    lo, hi = cfg.t_points[-2], cfg.t_points[-1]
    ok = (X[:, 0] > lo) & (X[:, -1] < hi)
    if cfg.l > 1:
        ok &= np.all(np.diff(X, axis=1) > 0, axis=1)
    if not np.all(ok):
        raise ConfigError("screening variables must satisfy t_(N-1) < x_1 < .. < x_l < t_N")


def _integrand_batch(cfg: CoulombConfig, ex: Exponents, X: np.ndarray) -> np.ndarray:
    pts = (cfg.t,) + cfg.t_points
    pref = 1.0
    for (i, j), e in ex.pair.items():
        pref *= (pts[j] - pts[i]) ** e
    for i in range(1, cfg.N + 1):
        pref *= (pts[i] - pts[0]) ** ex.deg[i - 1]
    val = np.full(X.shape[0], pref, dtype=complex)
    for s in range(cfg.l):
        xs = X[:, s]
        for i in range(1, cfg.N + 1):
            val = val * branch_power(xs - pts[i], ex.screen[i - 1])
        val = val * (xs - pts[0]) ** ex.screen_t
        for s2 in range(s + 1, cfg.l):
            val = val * (X[:, s2] - xs) ** ex.screen_pair
    return val


def _word_factors(cfg: CoulombConfig, ex: Exponents, X: np.ndarray) -> np.ndarray:
    """``(M, K)`` array of ``(L_{-w} f) / f`` for each composition ``w``."""
    ctx = _NumericContext(cfg, ex, X)
    memo: dict = {}
    cols = []
    for comp, _ in ex.coeffs:
        c0 = apply_word_analytic(comp, ctx, memo).constant_term()
        cols.append(np.broadcast_to(np.asarray(c0, dtype=float), (X.shape[0],)))
    return np.stack(cols, axis=1)


def dr_components(cfg: CoulombConfig, X, ex: Exponents | None = None) -> np.ndarray:
    """``(M, 1 + K)``: column 0 is ``f^(l)``, column ``1 + w`` is ``c_w L_{-w} f^(l)``."""
    X = np.asarray(X, dtype=float).reshape(-1, cfg.l) if cfg.l else np.zeros((1, 0))
    _check_chamber(cfg, X)
    ex = ex or exponents(cfg)
    f = _integrand_batch(cfg, ex, X)
    w = _word_factors(cfg, ex, X)
    c = np.array([co for _, co in ex.coeffs])
    return np.concatenate([f[:, None], f[:, None] * w * c[None, :]], axis=1)


def integrand(x, cfg: CoulombConfig) -> complex:
    """``f^(l)`` at one ordered point ``x`` of the chamber."""
    X = np.asarray(x, dtype=float).reshape(1, -1)
    _check_chamber(cfg, X)
    return complex(_integrand_batch(cfg, exponents(cfg), X)[0])


def apply_Dr_integrand(cfg: CoulombConfig, x) -> complex:
    """``(D_r f^(l))(t, t_1..t_N; x)`` computed from closed-form log-derivatives."""
    comps = dr_components(cfg, np.asarray(x, dtype=float).reshape(1, -1))
    return complex(comps[0, 1:].sum())


def verify_coulomb_bpz(cfg: CoulombConfig, quad_tol: float | None = None) -> dict:
    """Integrate every BSA word term over the chamber and report the normalized residual."""
    ex = exponents(cfg)
    qtol = cfg.quad_tol if quad_tol is None else quad_tol
    words = [list(comp) for comp, _ in ex.coeffs]
    report = {
        "r": cfg.r,
        "chi_mode": cfg.mode.value,
        "N": cfg.N,
        "l": cfg.l,
        "config": cfg.to_json(),
        "normalization": NORMALIZATION,
    }
    if cfg.l == 0:
        vals = dr_components(cfg, np.zeros((1, 0)), ex)[0]
        err = np.zeros_like(vals, dtype=float)
        intervals = 0
    else:
        bounds = (cfg.t_points[-2], cfg.t_points[-1])
        try:
            res = integrate_simplex(lambda X: dr_components(cfg, X, ex), cfg.l, bounds,
                                    tol=qtol, limit=cfg.max_subdiv, abs_floor=0.0, norm="max")
        except QuadratureError as exc:
            report.update(status="inconclusive", reason=str(exc))
            return report
        vals, err, intervals = res.value, res.error, res.intervals
    terms = vals[1:]
    residual = abs(terms.sum())
    scale = float(np.max(np.abs(terms))) if terms.size else 0.0
    normalized = residual / scale if scale > 0 else 0.0
    report.update(
        value=[float(vals[0].real), float(vals[0].imag)],
        residual=float(residual),
        residual_error_bound=float(np.sum(err[1:])),
        scale=scale,
        normalized_residual=float(normalized),
        tol=cfg.tol,
        quad_tol=qtol,
        quad_intervals=int(intervals),
        terms=[
            {"word": w, "coefficient": co, "value": [float(v.real), float(v.imag)]}
            for w, (_, co), v in zip(words, ex.coeffs, terms)
        ],
        status="pass" if normalized <= cfg.tol else "fail",
    )
    return report
