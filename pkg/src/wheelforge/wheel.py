"""Gap patterns of the integers coprime to the first ``k`` primes.

Two independent constructions live here:

* :func:`pattern_build` grows the pattern level by level with
  :func:`pattern_refine` (replicate the previous pattern ``p`` times, strike
  the survivors ``p*h``, merge the gaps on either side of each strike);
* :func:`pattern_sieve_oracle` marks multiples directly over ``[1, L+1]``.

The two must agree gap for gap wherever both fit in memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import ResourceCapError, UsageError
from .levels import WheelLevel, as_level, nth_prime

#: Largest level whose full gap list is held in memory (T_9 * 4 bytes ~ 146 MB).
IN_MEMORY_MAX_K = 9

GAP_DTYPE = np.int32
POS_DTYPE = np.int64


@dataclass(frozen=True, eq=False)
class Pattern:
    """One period of survivor gaps at a wheel level.

    ``gaps`` is stored read-only so patterns can be cached and shared.
    Period and length are derived from the gaps, never trusted from outside,
    which lets a corrupted pattern be represented and then fail verification.
    """

    level: WheelLevel
    gaps: np.ndarray

    def __post_init__(self):
        gaps = np.ascontiguousarray(self.gaps, dtype=GAP_DTYPE)
        gaps.setflags(write=False)
        object.__setattr__(self, "gaps", gaps)

    @property
    def period(self) -> int:
        return int(self.gaps.size)

    @property
    def length(self) -> int:
        return int(self.gaps.sum(dtype=np.int64))

    def survivors(self) -> np.ndarray:
        """Survivors of the first block, ``1 = x_1 < ... < x_T``."""
        pos = np.empty(self.period, dtype=POS_DTYPE)
        pos[0] = 1
        np.cumsum(self.gaps[:-1], dtype=POS_DTYPE, out=pos[1:])
        pos[1:] += 1
        return pos

    def histogram(self):
        from .histogram import GapHistogram

        return GapHistogram.from_gaps(self.gaps)

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.level == other.level and np.array_equal(self.gaps, other.gaps)

    def __hash__(self):
        return hash((self.level, self.period, self.length))

    def to_json_dict(self, max_gaps: Optional[int] = None) -> dict:
        """Serialisable form; ``gaps`` is dropped when longer than ``max_gaps``."""
        out = {
            "k": self.level.k,
            "primes": list(self.level.primes),
            "period": self.period,
            "length": self.length,
        }
        if max_gaps is None or self.period <= max_gaps:
            out["gaps"] = self.gaps.tolist()
        return out


def primorial(level: WheelLevel | int) -> int:
    """``L = p_1 * ... * p_k``."""
    return math.prod(as_level(level).primes)


def euler_period(level: WheelLevel | int) -> int:
    """``T = (p_1 - 1) * ... * (p_k - 1)``."""
    return math.prod(p - 1 for p in as_level(level).primes)


def _check_in_memory(level: WheelLevel, what: str):
    if level.k > IN_MEMORY_MAX_K:
        raise ResourceCapError(
            f"{what} holds the whole pattern in memory; k={level.k} exceeds "
            f"k <= {IN_MEMORY_MAX_K} (use the streaming scan instead)"
        )


def base_pattern() -> Pattern:
    """Level 1: the odd numbers, a single gap of 2."""
    return Pattern(WheelLevel(1), np.array([2], dtype=GAP_DTYPE))


def pattern_sieve_oracle(level: WheelLevel | int) -> Pattern:
    """Build the pattern by crossing out multiples over ``[1, L+1]``."""
    level = as_level(level)
    _check_in_memory(level, "the sieve oracle")
    L = primorial(level)
    alive = np.ones(L + 2, dtype=bool)
    alive[0] = False
    for p in level.primes:
        alive[p::p] = False
    xs = np.flatnonzero(alive)
    del alive
    T = euler_period(level)
    # survivors in [1, L] plus the first survivor L+1 of the next block
    if xs.size != T + 1 or xs[-1] != L + 1 or xs[-2] != L - 1:
        raise AssertionError(f"sieve oracle block structure broken at k={level.k}")
    return Pattern(level, np.diff(xs).astype(GAP_DTYPE))


def pattern_refine(prev: Pattern, p_next: int) -> Pattern:
    """Lift ``prev`` to the next level by striking multiples of ``p_next``.

    The previous block is replicated ``p_next`` times. Deletion targets are
    ``p_next * h`` for every survivor ``h`` of the previous first block; they
    are matched against the replicated survivors copy by copy, in ascending
    order, so each copy costs one merge of two sorted lists.
    """
    k = prev.level.k
    expected = nth_prime(k + 1)
    if p_next != expected:
        raise UsageError(f"level {k} refines with p_{k + 1} = {expected}, got {p_next}")
    level = WheelLevel(k + 1)
    _check_in_memory(level, "pattern_refine")

    L_prev, T_prev = prev.length, prev.period
    base = prev.survivors()
    targets = base * p_next
    L_new = L_prev * p_next

    out = np.empty((p_next - 1) * T_prev, dtype=GAP_DTYPE)
    filled = 0
    last: Optional[int] = None
    deleted = 0
    t_lo = 0
    for copy in range(p_next):
        offset = copy * L_prev
        pos = base + offset
        t_hi = int(np.searchsorted(targets, offset + L_prev, side="right"))
        hits = targets[t_lo:t_hi]
        t_lo = t_hi
        keep = np.ones(pos.size, dtype=bool)
        if hits.size:
            idx = np.searchsorted(pos, hits)
            if not np.array_equal(pos[idx], hits):
                raise AssertionError("deletion target is not a survivor of the replicated block")
            keep[idx] = False
            deleted += hits.size
        kept = pos[keep]
        if last is not None:
            kept = np.concatenate(([last], kept))
        d = np.diff(kept)
        out[filled:filled + d.size] = d
        filled += d.size
        last = int(kept[-1])
    out[filled] = L_new + 1 - last
    filled += 1

    if deleted != T_prev or filled != out.size:
        raise AssertionError(
            f"refinement to k={k + 1}: {deleted} deletions (expected {T_prev}), "
            f"{filled} gaps (expected {out.size})"
        )
    return Pattern(level, out)


@lru_cache(maxsize=4)
def _build(k: int) -> Pattern:
    if k == 1:
        return base_pattern()
    prev = _build(k - 1)
    return pattern_refine(prev, nth_prime(k))


def pattern_build(level: WheelLevel | int) -> Pattern:
    """Pattern at ``level``, grown from ``{2}`` by repeated refinement."""
    level = as_level(level)
    _check_in_memory(level, "pattern_build")
    return _build(level.k)


@dataclass(frozen=True)
class VerificationReport:
    """Named structural findings for one pattern.

    ``None`` marks a check that does not apply (the mirror, last-gap and
    central-gap statements only make sense for ``k >= 2``).
    """

    k: int
    period_matches: bool
    length_matches: bool
    all_gaps_even: bool
    palindrome_holds: Optional[bool]
    last_gap_is_2: Optional[bool]
    central_gap_is_4: Optional[bool]

    FINDINGS = (
        "period_matches",
        "length_matches",
        "palindrome_holds",
        "last_gap_is_2",
        "central_gap_is_4",
        "all_gaps_even",
    )

    @property
    def ok(self) -> bool:
        return not self.failures()

    def failures(self) -> list[str]:
        return [name for name in self.FINDINGS if getattr(self, name) is False]

    def to_json_dict(self) -> dict:
        out = {"k": self.k, "ok": self.ok}
        out.update({name: getattr(self, name) for name in self.FINDINGS})
        return out


def verify_pattern(p: Pattern) -> VerificationReport:
    """Evaluate every structural finding; never stops at the first failure."""
    gaps = p.gaps
    level = p.level
    T = gaps.size
    palindrome = last2 = central4 = None
    if level.k >= 2 and T >= 1:
        head = gaps[:-1]
        palindrome = bool(np.array_equal(head, head[::-1]))
        last2 = bool(gaps[-1] == 2)
        central4 = bool(head.size % 2 == 1 and head[(T - 2) // 2] == 4)
    return VerificationReport(
        k=level.k,
        period_matches=T == euler_period(level),
        length_matches=p.length == primorial(level),
        all_gaps_even=bool(np.all(gaps % 2 == 0)),
        palindrome_holds=palindrome,
        last_gap_is_2=last2,
        central_gap_is_4=central4,
    )


def prefix_sums_coprime(p: Pattern, indices) -> bool:
    """Check that ``1 + gaps[0] + ... + gaps[j]`` avoids every basis prime."""
    csum = np.cumsum(p.gaps, dtype=np.int64)
    values = 1 + csum[np.asarray(indices, dtype=np.int64)]
    return all(math.gcd(int(v), primorial(p.level)) == 1 for v in values)
