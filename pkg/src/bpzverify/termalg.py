"""Basis terms ``P_n Q_q`` and finite linear combinations over Q(gamma)."""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, NamedTuple

from .ratfunc import ONE, RatFunc

__all__ = ["TermKey", "LinComb", "canonicalize", "add_scaled", "total_degree", "Q0"]


class TermKey(NamedTuple):
    """Multiset pair identifying ``P_{p_part} Q_{q_part}``.

    Both parts are stored sorted in descending order. The empty/empty key is
    the bare correlation ``Q_0``.
    """

    p: tuple[int, ...]
    q: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.p) + sum(self.q)

    def label(self) -> str:
        ps = "".join(f"P{n}" for n in self.p)
        qs = "Q" + (",".join(str(x) for x in self.q) if self.q else "0")
        return ps + qs


def canonicalize(p_raw: Iterable[int] = (), q_raw: Iterable[int] = ()) -> TermKey:
    """Canonical key for the multisets ``p_raw`` and ``q_raw``."""
    p = tuple(sorted((int(x) for x in p_raw), reverse=True))
    q = tuple(sorted((int(x) for x in q_raw), reverse=True))
    if (p and p[-1] < 1) or (q and q[-1] < 1):
        raise ValueError(f"term entries must be >= 1, got p={p}, q={q}")
    return TermKey(p, q)


Q0 = TermKey((), ())


def total_degree(k: TermKey) -> int:
    return k.degree


def _sort_key(k: TermKey):
    return (k.p, k.q)


class LinComb:
    """Finite map ``TermKey -> RatFunc`` with zero coefficients pruned.

    Values are treated as immutable once handed out; the in-place helpers
    (:meth:`iadd_term`, :meth:`iadd_scaled`) are meant for building a fresh
    combination locally.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[TermKey, RatFunc] | Iterable = ()):
        self._terms: dict[TermKey, RatFunc] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for k, c in items:
            self.iadd_term(k, c)

    @classmethod
    def single(cls, key: TermKey, coeff=ONE) -> LinComb:
        return cls({key: RatFunc.const(coeff)})

    def iadd_term(self, key: TermKey, coeff) -> None:
        coeff = RatFunc.const(coeff) if not isinstance(coeff, RatFunc) else coeff
        if not coeff:
            return
        old = self._terms.get(key)
        if old is None:
            self._terms[key] = coeff
            return
        new = old + coeff
        if new:
            self._terms[key] = new
        else:
            del self._terms[key]

    def iadd_scaled(self, c: RatFunc, other: LinComb) -> None:
        if not c:
            return
        if c == ONE:
            for k, v in other._terms.items():
                self.iadd_term(k, v)
        else:
            for k, v in other._terms.items():
                self.iadd_term(k, c * v)

    def copy(self) -> LinComb:
        out = LinComb()
        out._terms = dict(self._terms)
        return out

    # mapping-ish interface ------------------------------------------------

    def __getitem__(self, key: TermKey) -> RatFunc:
        return self._terms[key]

    def get(self, key: TermKey, default=None):
        return self._terms.get(key, default)

    def __contains__(self, key):
        return key in self._terms

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def keys(self) -> list[TermKey]:
        return sorted(self._terms, key=_sort_key)

    def items(self) -> Iterator[tuple[TermKey, RatFunc]]:
        """Items in deterministic canonical-key order."""
        for k in self.keys():
            yield k, self._terms[k]

    def __iter__(self):
        return iter(self.keys())

    # algebra ---------------------------------------------------------------

    def __add__(self, other: LinComb) -> LinComb:
        out = self.copy()
        out.iadd_scaled(ONE, other)
        return out

    def __sub__(self, other: LinComb) -> LinComb:
        out = self.copy()
        out.iadd_scaled(-ONE, other)
        return out

    def __neg__(self) -> LinComb:
        return self.scale(-ONE)

    def scale(self, c) -> LinComb:
        c = RatFunc.const(c) if not isinstance(c, RatFunc) else c
        out = LinComb()
        if c:
            out._terms = {k: c * v for k, v in self._terms.items()}
        return out

    def __eq__(self, other):
        if not isinstance(other, LinComb):
            return NotImplemented
        return self._terms == other._terms

    def max_degree(self) -> int:
        return max((k.degree for k in self._terms), default=0)

    def to_json(self) -> list[dict]:
        return [
            {"p": list(k.p), "q": list(k.q), "lambda": v.to_string()}
            for k, v in self.items()
        ]

    @classmethod
    def from_json(cls, rows) -> LinComb:
        return cls(
            (canonicalize(row["p"], row["q"]), RatFunc.parse(row.get("lambda", row.get("value"))))
            for row in rows
        )

    def __repr__(self):
        body = ", ".join(f"{k.label()}: {v}" for k, v in self.items())
        return f"LinComb({{{body}}})"


def add_scaled(acc: LinComb, c, v: LinComb) -> LinComb:
    """Return ``acc + c * v`` as a new combination."""
    out = acc.copy()
    out.iadd_scaled(RatFunc.const(c) if not isinstance(c, RatFunc) else c, v)
    return out
