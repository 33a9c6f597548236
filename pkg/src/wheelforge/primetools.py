"""Applications of the wheel: consecutive-prime windows and interval prime statistics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import cycle
from typing import Iterable, Optional

import numpy as np

from .errors import ResourceCapError, UsageError
from .levels import first_primes, nth_prime
from .wheel import IN_MEMORY_MAX_K, pattern_build

SIEVE_BUDGET = 10**9


def reference_sieve(limit: int) -> np.ndarray:
    """All primes ``<= limit`` by an odd-only sieve of Eratosthenes."""
    if limit > SIEVE_BUDGET:
        raise ResourceCapError(f"reference sieve limit {limit} exceeds {SIEVE_BUDGET}")
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # index i stands for 2*i + 1
    odd = np.ones((limit + 1) // 2, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2::p] = False
    return np.concatenate(([2], 2 * np.flatnonzero(odd) + 1)).astype(np.int64)


def prime_count_table(limit: int) -> np.ndarray:
    """``table[x] = pi(x)`` for ``0 <= x <= limit``."""
    flags = np.zeros(limit + 1, dtype=np.int64)
    flags[reference_sieve(limit)] = 1
    return np.cumsum(flags)


@dataclass
class PrimeWindow:
    """Survivors of the level ``n-1`` wheel in ``(p_n, p_n * p_{n+1})``, square removed."""

    n: int
    lo: int
    hi: int
    excluded: int
    primes: list[int]
    verified_against_sieve: bool = False
    below_stated_range: bool = False

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "lo": self.lo,
            "hi": self.hi,
            "excluded": self.excluded,
            "primes": list(self.primes),
            "verified_against_sieve": self.verified_against_sieve,
        }


def _wheel_survivors(k: int, upto: int):
    """Survivors of the level-``k`` wheel in ``[1, upto)``, streamed from its gaps."""
    x = 1
    for g in cycle(pattern_build(k).gaps.tolist()):
        if x >= upto:
            return
        yield x
        x += g


def consecutive_primes_from_block(n: int) -> PrimeWindow:
    """Walk the level ``n-1`` gap pattern and keep what lies in the prime window.

    The result is checked against :func:`reference_sieve`; a mismatch is
    reported through ``verified_against_sieve``, not raised.
    """
    if n < 2:
        raise UsageError("the consecutive-prime window needs n >= 2")
    if n - 1 > IN_MEMORY_MAX_K:
        raise ResourceCapError(f"n={n} needs the level {n - 1} pattern; in-memory cap is {IN_MEMORY_MAX_K}")
    p, p_next = first_primes(n + 1)[-2:]
    lo, hi, sq = p, p * p_next, p * p
    found = [q for q in _wheel_survivors(n - 1, hi) if q > lo and q != sq]
    ref = reference_sieve(hi - 1)
    expected = ref[ref > lo].tolist()
    return PrimeWindow(
        n=n,
        lo=lo,
        hi=hi,
        excluded=sq,
        primes=found,
        verified_against_sieve=found == expected,
        below_stated_range=n < 3,
    )


def first_block_survivors_below_square(n: int) -> list[int]:
    """Survivors ``q`` of the level ``n-1`` first block with ``p_n < q < p_n**2``."""
    if n < 2:
        raise UsageError("needs n >= 2")
    p = nth_prime(n)
    block = math.prod(first_primes(n - 1))
    upto = min(p * p, block + 1)
    return [q for q in _wheel_survivors(n - 1, upto) if q > p]


def square_in_first_block(n: int) -> bool:
    """``p_n * (p_n - 1) < p_1 * ... * p_{n-1}``."""
    if n < 2:
        raise UsageError("needs n >= 2")
    primes = first_primes(n)
    p = primes[-1]
    return p * (p - 1) < math.prod(primes[:-1])


def q_n(n: int) -> int:
    """Largest prime below ``p_n**2``."""
    if n < 2:
        raise UsageError("needs n >= 2")
    p = nth_prime(n)
    ref = reference_sieve(p * p - 1)
    return int(ref[-1])


@dataclass
class IntervalStats:
    """Prime-occupied intervals ``[(j-1)c, jc)`` for ``j = 1..m`` against ``pi(mc)``.

    ``lower_ok`` tests ``pi(mc) / c <= chi_sum`` (exactly, as
    ``pi(mc) <= c * chi_sum``) and is ``None`` for the degenerate ``c = 1``;
    ``upper_ok`` tests ``chi_sum < pi(mc)`` and is ``None`` when ``c < 3``.
    """

    c: int
    m: int
    chi_sum: int
    pi_mc: int
    lower_ok: Optional[bool]
    upper_ok: Optional[bool]

    @property
    def lower(self) -> float:
        return self.pi_mc / self.c

    @property
    def bounds_hold(self) -> bool:
        return self.lower_ok is not False and self.upper_ok is not False


def _bounds(c: int, chi_sum, pi_mc):
    lower = None if c == 1 else pi_mc <= c * chi_sum
    upper = None if c < 3 else chi_sum < pi_mc
    return lower, upper


def _chi_cumulative(c: int, m_max: int, is_prime: np.ndarray) -> np.ndarray:
    """``out[m-1]`` = number of the first ``m`` intervals holding a prime."""
    occupied = is_prime[: m_max * c].reshape(m_max, c).any(axis=1)
    return np.cumsum(occupied, dtype=np.int64)


def _prime_flags(limit: int) -> np.ndarray:
    flags = np.zeros(limit + 1, dtype=bool)
    flags[reference_sieve(limit)] = True
    return flags


def chi_interval_sum(c: int, m: int) -> IntervalStats:
    if c < 1 or m < 1:
        raise UsageError("c and m must be positive")
    limit = c * m
    flags = _prime_flags(limit)
    chi_sum = int(_chi_cumulative(c, m, flags)[-1])
    pi_mc = int(flags.sum())
    lower, upper = _bounds(c, chi_sum, pi_mc)
    return IntervalStats(c, m, chi_sum, pi_mc, lower, upper)


def interval_series(c: int, m_max: int, flags: Optional[np.ndarray] = None) -> list[IntervalStats]:
    """:class:`IntervalStats` for every ``m`` in ``1..m_max``."""
    if c < 1 or m_max < 1:
        raise UsageError("c and m must be positive")
    if flags is None:
        flags = _prime_flags(c * m_max)
    chi = _chi_cumulative(c, m_max, flags)
    pi = np.cumsum(flags, dtype=np.int64)[c * np.arange(1, m_max + 1)]
    out = []
    for m, (s, p) in enumerate(zip(chi.tolist(), pi.tolist()), start=1):
        lower, upper = _bounds(c, s, p)
        out.append(IntervalStats(c, m, s, p, lower, upper))
    return out


@dataclass
class SweepReport:
    c_values: list[int]
    m_max: int
    checked: int = 0
    violations: list[tuple[int, int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "c_values": self.c_values,
            "m_max": self.m_max,
            "checked": self.checked,
            "violations": [{"c": c, "m": m, "bound": b} for c, m, b in self.violations],
        }


def chi_bounds_sweep(c_list: Iterable[int], m_max: int) -> SweepReport:
    """Check both bounds for every ``c`` and every ``1 <= m <= m_max``.

    This is an empirical record: the inequality is only promised for large
    ``m``, so violations are collected rather than raised.
    """
    c_values = sorted(set(int(c) for c in c_list))
    if not c_values or c_values[0] < 1 or m_max < 1:
        raise UsageError("need positive c values and m_max")
    flags = _prime_flags(c_values[-1] * m_max)
    report = SweepReport(c_values, m_max)
    for c in c_values:
        for st in interval_series(c, m_max, flags):
            report.checked += 1
            if st.lower_ok is False:
                report.violations.append((c, st.m, "lower"))
            if st.upper_ok is False:
                report.violations.append((c, st.m, "upper"))
    return report


def _flag(v: Optional[bool]) -> str:
    return "skipped" if v is None else str(v).lower()


def interval_stats_csv(rows: Iterable[IntervalStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["c", "m", "chi_sum", "pi_mc", "lower_ok", "upper_ok"])
    for st in rows:
        writer.writerow([st.c, st.m, st.chi_sum, st.pi_mc, _flag(st.lower_ok), _flag(st.upper_ok)])
    return buf.getvalue()
