"""Exact verification of the Benoit--Saint-Aubin form of the BPZ equations.

The core engine expands ``D_r Q_0`` in a term algebra over Q(gamma) and checks
that every coefficient vanishes. Two independent oracles cross-check the
result: an exact jet computation on the Coulomb-gas integrand, and a
floating-point quadrature of real Coulomb gas integrals.
"""

from __future__ import annotations

from .bsa import VerificationReport, bsa_coefficient, compositions, expand_Dr, verify_bpz
from .ratfunc import ChiMode, RatFunc, chi
from .termalg import LinComb, TermKey, canonicalize
from .virasoro import RuleKind, RuleParams, apply_L, apply_word, check_commutator

__version__ = "0.1.0"

__all__ = [
    "ChiMode",
    "RatFunc",
    "chi",
    "LinComb",
    "TermKey",
    "canonicalize",
    "RuleKind",
    "RuleParams",
    "apply_L",
    "apply_word",
    "check_commutator",
    "compositions",
    "bsa_coefficient",
    "expand_Dr",
    "verify_bpz",
    "VerificationReport",
]
