"""Adaptive Gauss--Kronrod quadrature over ordered simplices.

The ordered chamber ``a < x_1 < .. < x_l < b`` is integrated as an iterated
integral. Each inner variable is mapped to the unit interval,
``x_{k+1} = x_k + (b - x_k) u``, and the inner integrals for a whole batch
of outer nodes run in lockstep as one vector-valued adaptive integral. The
integrand receives every node of a refinement round in a single call, which
keeps Python overhead low when it is expensive (numeric jets).

Intervals are refined in rounds: every interval whose error exceeds its
equal share of the target is bisected. Sums are taken in a fixed interval
order so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["QuadResult", "QuadratureError", "gk21", "adaptive_gk", "integrate_simplex"]

# 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG10 = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# full node/weight vectors on [-1, 1]
NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
W_KRONROD = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_wg_half = np.zeros(10)
_wg_half[1::2] = _WG10  # Gauss nodes are the odd-indexed Kronrod nodes
W_GAUSS = np.concatenate([_wg_half, [0.0], _wg_half[::-1]])


class QuadratureError(RuntimeError):
    """Adaptive refinement hit its limits; carries the best estimate so far."""

    def __init__(self, msg, value=None, error=None):
        super().__init__(msg)
        self.value = value
        self.error = error


@dataclass
class QuadResult:
    value: np.ndarray | complex | float
    error: np.ndarray | float
    intervals: int
    evaluations: int


def gk21(f: Callable, a: float, b: float):
    """One Gauss--Kronrod step on ``[a, b]``; returns (kronrod, |kronrod - gauss|)."""
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    y = np.asarray(f(c + h * NODES))
    k = h * np.tensordot(W_KRONROD, y, axes=(0, 0))
    g = h * np.tensordot(W_GAUSS, y, axes=(0, 0))
    return k, np.abs(k - g)


def adaptive_gk(f: Callable, a: float, b: float, tol: float = 1e-10,
                limit: int = 2 ** 14, abs_floor: float = 1.0, norm: str = "componentwise"):
    """Vector-valued adaptive integral of ``f`` over ``[a, b]``.

    ``f(u)`` takes a 1-d array of ``P`` nodes and returns either an array of
    shape ``(P, *S)`` or a pair ``(values, errors)`` of that shape, where
    ``errors`` bounds the error of nested inner integrals at each node. The
    returned value has shape ``S``; convergence requires, componentwise,
    ``error <= tol * (abs_floor + |value|)``. With ``norm="max"`` every
    component is held to ``tol * max(abs_floor, max |value|)`` instead, which
    suits vectors whose components are later combined.
    """
    if norm not in ("componentwise", "max"):
        raise ValueError(f"unknown norm {norm!r}")
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    evals = 0

    def run(lo, hi):
        nonlocal evals
        c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
        u = (c[:, None] + h[:, None] * NODES[None, :]).ravel()
        out = f(u)
        evals += u.size
        if isinstance(out, tuple):
            y, ey = out
            y, ey = np.asarray(y), np.asarray(ey)
        else:
            y, ey = np.asarray(out), None
        shape = y.shape[1:]
        y = y.reshape((lo.size, NODES.size) + shape)
        hb = h.reshape((-1,) + (1,) * len(shape))
        k = hb * np.tensordot(y, W_KRONROD, axes=([1], [0])).reshape((lo.size,) + shape)
        g = hb * np.tensordot(y, W_GAUSS, axes=([1], [0])).reshape((lo.size,) + shape)
        err = np.abs(k - g)
        if ey is not None:
            ey = ey.reshape((lo.size, NODES.size) + shape)
            err = err + hb * np.tensordot(ey, W_KRONROD, axes=([1], [0])).reshape(err.shape)
        return k, err

    val, err = run(lo, hi)
    while True:
        total = val.sum(axis=0)
        total_err = err.sum(axis=0)
        if norm == "max":
            scale = max(abs_floor, float(np.max(np.abs(total))) if total.size else 0.0)
            target = np.full(np.shape(total), tol * scale)
        else:
            target = tol * (abs_floor + np.abs(total))
        if np.all(total_err <= target):
            return QuadResult(total, total_err, lo.size, evals)
        # ratio of each interval's error to the target, worst component
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.nan_to_num((err / target).reshape(lo.size, -1), nan=0.0,
                                  posinf=np.inf).max(axis=1)
        share = 1.0 / lo.size
        split = ratio > share * 0.5
        split[np.argmax(ratio)] = True
        if lo.size + int(split.sum()) > limit:
            raise QuadratureError(
                f"no convergence within {limit} subintervals",
                value=total, error=total_err,
            )
        if np.any((hi[split] - lo[split]) < 1e-14 * max(1.0, abs(b - a))):
            raise QuadratureError("subinterval width underflow", value=total, error=total_err)
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        nval, nerr = run(new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nval])
        err = np.concatenate([err[keep], nerr])
        order = np.argsort(lo, kind="stable")  # deterministic summation order
        lo, hi, val, err = lo[order], hi[order], val[order], err[order]


def integrate_simplex(h: Callable, l: int, bounds: tuple[float, float], tol: float = 1e-10,
                      limit: int = 2 ** 14, *, abs_floor: float = 1.0,
                      norm: str = "componentwise") -> QuadResult:
    """Integrate ``h`` over ``bounds[0] < x_1 < .. < x_l < bounds[1]``.

    ``h(X)`` takes an array of shape ``(M, l)`` (rows are ordered points)
    and returns shape ``(M,)`` or ``(M, *S)``. ``limit`` caps the number of
    subintervals per axis; ``abs_floor`` and ``norm`` are passed to
    :func:`adaptive_gk` at every level.
    """
    if l < 1:
        raise ValueError("integrate_simplex needs l >= 1")
    a, b = float(bounds[0]), float(bounds[1])
    if not a < b:
        raise ValueError(f"empty domain ({a}, {b})")
    inner_tol = tol * 0.1

    def level(prefix: np.ndarray, depth: int):
        # integral over x_{depth+1}..x_l for each row of prefix (M, depth)
        m = prefix.shape[0]
        lower = prefix[:, -1] if depth else np.full(m, a)
        jac = b - lower

        def f(u):
            x = lower[None, :] + jac[None, :] * u[:, None]  # (P, M)
            pts = np.concatenate(
                [np.broadcast_to(prefix[None], (u.size,) + prefix.shape), x[..., None]], axis=2
            ).reshape(u.size * m, depth + 1)
            if depth + 1 == l:
                y = np.asarray(h(pts))
                ey = None
            else:
                res = level(pts, depth + 1)
                y, ey = res.value, res.error
            y = y.reshape((u.size, m) + y.shape[1:])
            jb = jac.reshape((1, m) + (1,) * (y.ndim - 2))
            if ey is None:
                return y * jb
            return y * jb, ey.reshape(y.shape) * jb

        return adaptive_gk(f, 0.0, 1.0, tol if depth == 0 else inner_tol, limit,
                           abs_floor, norm)

    res = level(np.zeros((1, 0)), 0)
    value = res.value[0]
    error = res.error[0]
    return QuadResult(value, error, res.intervals, res.evaluations)
