"""Exact operation-count models for the four LMMSE variants.

Counts are multiply-and-add operations (MADs) split into addition and
multiplication columns, evaluated in exact integer arithmetic so that
ratios and log plots are bitwise reproducible.  The spectral ("swp-")
variants assume a radix-2 FFT, hence the power-of-two requirement and the
log2 N terms; the direct variants are dominated by dense factorizations
and products, hence the N^3 terms.

Known quirk, kept on purpose: for ``direct-known`` the authoritative MADs
polynomial is 3 N^3 + N even though its addition and multiplication
columns sum to 2 N^3 + N.  The headline reduction ratios are defined in
terms of the MADs column, so that column wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SWP_KNOWN = "swp-known"
DIRECT_KNOWN = "direct-known"
SWP_UNKNOWN = "swp-unknown"
DIRECT_UNKNOWN = "direct-unknown"

#: Methods with a complexity model, in display order.
COMPLEXITY_METHODS = (SWP_KNOWN, SWP_UNKNOWN, DIRECT_KNOWN, DIRECT_UNKNOWN)

_UNKNOWN_CCM = (SWP_UNKNOWN, DIRECT_UNKNOWN)
_SWP = (SWP_KNOWN, SWP_UNKNOWN)


@dataclass(frozen=True)
class ComplexityProfile:
    """Exact per-estimate operation counts for one method at size (n, t)."""

    method: str
    n: int
    t: int
    additions: int
    multiplications: int
    mads: int


def _exact_log2(n: int) -> int:
    log2n = n.bit_length() - 1
    if 1 << log2n != n:
        raise ValueError(f"spectral methods require a power-of-two antenna count, got {n}")
    return log2n


def profile(method: str, n: int, t: int = 1) -> ComplexityProfile:
    """Evaluate the closed-form operation counts for one method.

    ``t`` is the number of observation slots; it only enters the
    unknown-covariance methods (where the sample covariance is
    accumulated) and is carried through unchanged for the others.
    """
    if method not in COMPLEXITY_METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {COMPLEXITY_METHODS}")
    if n < 2:
        raise ValueError(f"antenna count must be at least 2, got {n}")
    if method in _UNKNOWN_CCM and t < 1:
        raise ValueError(f"slot count must be at least 1, got {t}")

    if method == SWP_KNOWN:
        log2n = _exact_log2(n)
        additions = n + 2 * n * log2n
        multiplications = n + n * log2n
        mads = 2 * n + 3 * n * log2n
    elif method == DIRECT_KNOWN:
        additions = 3 * n * n * (n - 1) // 2 + n
        multiplications = n * n * (n + 3) // 2
        mads = 3 * n**3 + n
    elif method == SWP_UNKNOWN:
        log2n = _exact_log2(n)
        additions = t * n * n + 2 * n * log2n + (2 - t) * n + t - 1
        multiplications = t * n * n + n * log2n + n
        mads = 2 * t * n * n + 3 * n * log2n + (3 - t) * n + t - 1
    else:  # DIRECT_UNKNOWN
        additions = (2 * t + 3) * (n**3 - n * n) // 2 + n
        multiplications = ((2 * t + 3) * n**3 + 3 * n * n) // 2
        mads = (2 * t + 3) * n**3 - t * n * n + n
    return ComplexityProfile(method, n, t, additions, multiplications, mads)


def ratio(a: ComplexityProfile, b: ComplexityProfile) -> float:
    """MADs ratio a / b for profiles of the same problem size."""
    if a.n != b.n:
        raise ValueError(f"profiles have different antenna counts: {a.n} vs {b.n}")
    if a.method in _UNKNOWN_CCM and b.method in _UNKNOWN_CCM and a.t != b.t:
        raise ValueError(f"profiles have different slot counts: {a.t} vs {b.t}")
    return a.mads / b.mads


@dataclass(frozen=True)
class MadsRow:
    """One point of a complexity-versus-antennas sweep."""

    method: str
    n: int
    mads: int
    log10_mads: float


def sweep_mads(methods, n_list, t: int) -> list[MadsRow]:
    """Tabulate MADs over antenna counts for plotting, one row per (method, n).

    Rows are emitted curve-major (all sizes of one method, then the next),
    with ``log10_mads`` computed from the exact integer counts.
    """
    rows = []
    for method in methods:
        for n in n_list:
            p = profile(method, n, t)
            rows.append(MadsRow(method, n, p.mads, math.log10(p.mads)))
    return rows
