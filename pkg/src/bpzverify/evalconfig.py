"""Numeric rendering of term-algebra combinations at concrete point sets.

A :class:`PointConfig` fixes the degenerate point and the insertions. On the
sphere ``P_n = sum_l alpha_l / (2 (z_l - z)^n)``. On the upper half-plane
each bulk insertion ``z_i`` also contributes its mirror ``conj(z_i)`` with the
same weight, and boundary insertions ``t_j`` (real) carry weights
``beta_j``; the degenerate point is then real.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .termalg import LinComb

__all__ = ["Geometry", "PointConfig", "evaluate_p", "evaluate_lincomb", "as_sphere"]


class Geometry(enum.Enum):
    SPHERE = "sphere"
    BOUNDARY = "boundary"


def _c(x) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", ""))
    return complex(x)


def _cj(z: complex):
    return [z.real, z.imag]


@dataclass(frozen=True)
class PointConfig:
    """Point set for :func:`evaluate_p`.

    ``insertions`` are ``(location, weight)`` pairs: sphere insertions, or
    bulk insertions in the upper half-plane for BOUNDARY. ``boundary`` holds
    the real boundary insertions ``(t_j, beta_j)`` and must be empty on the
    sphere.
    """

    geometry: Geometry
    degenerate: complex
    insertions: tuple = ()
    boundary: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "geometry", Geometry(self.geometry))
        object.__setattr__(self, "degenerate", _c(self.degenerate))
        object.__setattr__(self, "insertions", tuple((_c(z), _c(a)) for z, a in self.insertions))
        object.__setattr__(self, "boundary", tuple((_c(t), _c(b)) for t, b in self.boundary))
        self.validate()

    def validate(self) -> None:
        if self.geometry is Geometry.SPHERE:
            if self.boundary:
                raise ValueError("sphere configurations take no boundary insertions")
        else:
            if self.degenerate.imag != 0:
                raise ValueError("the degenerate point must be real on the boundary")
            if any(z.imag <= 0 for z, _ in self.insertions):
                raise ValueError("bulk insertions must lie in the upper half-plane")
            if any(t.imag != 0 for t, _ in self.boundary):
                raise ValueError("boundary insertions must be real")
        locs = [self.degenerate] + [z for z, _ in self.points()]
        if len(set(locs)) != len(locs):
            raise ValueError("locations must be pairwise distinct and avoid the degenerate point")

    def points(self) -> list[tuple[complex, complex]]:
        """Effective insertion list, mirror images included."""
        if self.geometry is Geometry.SPHERE:
            return list(self.insertions)
        out = []
        for z, a in self.insertions:
            out.append((z, a))
            out.append((z.conjugate(), a))
        out.extend(self.boundary)
        return out

    def to_json(self) -> dict:
        return {
            "geometry": self.geometry.value,
            "degenerate": _cj(self.degenerate),
            "insertions": [[_cj(z), _cj(a)] for z, a in self.insertions],
            "boundary": [[_cj(t), _cj(b)] for t, b in self.boundary],
        }

    @classmethod
    def from_json(cls, data: dict) -> PointConfig:
        try:
            return cls(
                geometry=data["geometry"],
                degenerate=data["degenerate"],
                insertions=tuple(tuple(p) for p in data.get("insertions", ())),
                boundary=tuple(tuple(p) for p in data.get("boundary", ())),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed point configuration: {exc}") from exc

    @classmethod
    def load(cls, path) -> PointConfig:
        return cls.from_json(json.loads(Path(path).read_text()))


def as_sphere(cfg: PointConfig) -> PointConfig:
    """Sphere configuration with the same effective insertions."""
    return PointConfig(Geometry.SPHERE, cfg.degenerate, tuple(cfg.points()))


def evaluate_p(cfg: PointConfig, n: int) -> complex:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    z = cfg.degenerate
    total = 0j
    for zl, a in cfg.points():
        d = zl - z
        if d == 0:
            raise ZeroDivisionError("insertion coincides with the degenerate point")
        total += a / (2 * d ** n)
    return total


def evaluate_lincomb(cfg: PointConfig, v: LinComb, q_values: Mapping, gamma0) -> complex:
    """``sum coeff(gamma0) * prod_n P_n * q_values[q]`` over the terms of ``v``.

    ``q_values`` is keyed by the q-multiset as a descending tuple (``()`` for
    ``Q_0``).
    """
    cache: dict[int, complex] = {}
    total = 0j
    for k, coeff in v.items():
        if k.q not in q_values:
            raise KeyError(f"no value supplied for Q{list(k.q)}")
        c = complex(coeff.evaluate(gamma0))  # RatFuncZeroDivision at a pole
        term = c * complex(q_values[k.q])
        for n in k.p:
            if n not in cache:
                cache[n] = evaluate_p(cfg, n)
            term *= cache[n]
        total += term
    return total

