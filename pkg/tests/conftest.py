from __future__ import annotations

import time
from contextlib import contextmanager
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from bpzverify import virasoro
from bpzverify.ratfunc import GAMMA, ChiMode, RatFunc, chi
from bpzverify.termalg import canonicalize

MODES = [ChiMode.GAMMA_HALF, ChiMode.TWO_OVER_GAMMA]

small_int = st.integers(min_value=-9, max_value=9)
poly = st.lists(small_int, min_size=1, max_size=4)
nonzero_poly = poly.filter(lambda p: any(p))


@st.composite
def ratfuncs(draw, nonzero=False):
    num = draw(nonzero_poly if nonzero else poly)
    den = draw(nonzero_poly)
    return RatFunc.from_coeffs(num, den)


@pytest.fixture(params=MODES, ids=lambda m: m.value)
def mode(request):
    return request.param


def rf(x) -> RatFunc:
    return RatFunc.const(Fraction(x))


def perturbed_rule(group: str, delta=1):
    """``rule_coefficients`` with one group's coefficient shifted by ``delta``."""
    original = virasoro.rule_coefficients

    def patched(n, r, mode):
        c = dict(original(n, r, mode))
        c[group] = c[group] + delta
        return c

    return patched


def keys_up_to(d: int):
    """All canonical keys of total degree <= d."""
    def partitions(n, top=None):
        top = n if top is None else top
        if n == 0:
            yield ()
            return
        for k in range(min(n, top), 0, -1):
            for rest in partitions(n - k, k):
                yield (k,) + rest

    out = []
    for total in range(d + 1):
        for dp in range(total + 1):
            for p in partitions(dp):
                for q in partitions(total - dp):
                    out.append(canonicalize(p, q))
    return out


ACCEPTANCE: list[str] = []


@contextmanager
def criterion(number: int, title: str):
    """Record one PASS/FAIL line for the acceptance summary."""
    t0 = time.perf_counter()
    status = "FAIL"
    try:
        yield
        status = "PASS"
    finally:
        ACCEPTANCE.append(f"criterion {number}: {status}  {title}  ({time.perf_counter() - t0:.2f}s)")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


G = GAMMA
__all__ = ["MODES", "ratfuncs", "rf", "G", "chi", "perturbed_rule", "keys_up_to", "criterion"]
