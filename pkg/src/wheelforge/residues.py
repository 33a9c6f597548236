"""Residue vectors modulo the basis primes and the counting arguments built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import UsageError
from .histogram import GapHistogram
from .levels import WheelLevel, as_level, nth_prime


@dataclass(frozen=True)
class ResidueVector:
    """``(x mod p_1, ..., x mod p_k)``."""

    level: WheelLevel
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if len(coords) != self.level.k:
            raise UsageError(f"expected {self.level.k} coordinates, got {len(coords)}")
        for c, p in zip(coords, self.level.primes):
            if not 0 <= c < p:
                raise UsageError(f"coordinate {c} out of range for modulus {p}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def signed(cls, level: WheelLevel | int, coords) -> "ResidueVector":
        """Build from coordinates that may be negative (``-1`` means ``p - 1``)."""
        level = as_level(level)
        return cls(level, tuple(c % p for c, p in zip(coords, level.primes)))


def to_residues(x: int, level: WheelLevel | int) -> ResidueVector:
    level = as_level(level)
    return ResidueVector(level, tuple(x % p for p in level.primes))


def from_residues(rv: ResidueVector) -> int:
    """Chinese-remainder inverse of :func:`to_residues`, in ``[0, L)``."""
    x, modulus = 0, 1
    for c, p in zip(rv.coords, rv.level.primes):
        # lift x (mod modulus) to the solution mod modulus*p
        t = ((c - x) * pow(modulus, -1, p)) % p
        x += modulus * t
        modulus *= p
    return x


def is_rprime(rv: ResidueVector) -> bool:
    """True when no coordinate is zero, i.e. the integer survives the sieve."""
    return all(rv.coords)


def multiplicity_small_gaps(level: WheelLevel | int) -> int:
    """Closed form for the number of 2-gaps (equally, 4-gaps) in one period."""
    level = as_level(level)
    if level.k < 2:
        raise UsageError("the small-gap multiplicity is defined for k >= 2")
    return math.prod(p - 2 for p in level.primes[1:])


def count_gap(source, g: int) -> int:
    """Occurrences of gap ``g`` in one period of a pattern, scan or histogram."""
    if isinstance(source, GapHistogram):
        hist = source
    elif hasattr(source, "histogram"):
        hist = source.histogram
        if callable(hist):
            hist = hist()
    else:
        raise TypeError(f"no histogram available on {type(source).__name__}")
    return hist.count(g)


def max_skip_lower_bound(level: WheelLevel | int) -> int:
    """``2 * p_{k-1}``: the trivial floor for the largest gap."""
    level = as_level(level)
    if level.k < 2:
        raise UsageError("the max-skip bound is defined for k >= 2")
    return 2 * level.primes[-2]


def extremal_candidates(level: WheelLevel | int) -> tuple[int, int]:
    """Centres of the two residue patterns ``(0, ..., 0, -1, +1)`` and ``(0, ..., 0, +1, -1)``.

    Every integer within ``p_{k-1} - 1`` of such a centre shares a factor
    with the basis, so each centre sits inside a gap of width at least
    ``2 * p_{k-1}``. The pair is mirror-symmetric: it sums to ``L``.
    """
    level = as_level(level)
    if level.k < 3:
        raise UsageError("extremal candidates are defined for k >= 3")
    zeros = [0] * (level.k - 2)
    a = from_residues(ResidueVector.signed(level, zeros + [-1, 1]))
    b = from_residues(ResidueVector.signed(level, zeros + [1, -1]))
    return a, b


class _ResidueWalker:
    """Per-prime remainders advanced by add-and-wrap, without division."""

    def __init__(self, x: int, level: WheelLevel):
        self.primes = level.primes
        self.rem = [x % p for p in self.primes]

    def step(self, delta: int):
        # |delta| == 1 keeps every update a single compare-and-wrap
        rem = self.rem
        for i, p in enumerate(self.primes):
            r = rem[i] + delta
            if r == p:
                r = 0
            elif r < 0:
                r = p - 1
            rem[i] = r

    def coprime(self) -> bool:
        return all(self.rem)


def _walk(x: int, level: WheelLevel, delta: int) -> int:
    walker = _ResidueWalker(x, level)
    y = x
    while True:
        walker.step(delta)
        y += delta
        if walker.coprime():
            return y


def next_rprime_gap(x: int, level: WheelLevel | int) -> tuple[int, int]:
    """Next survivor after the survivor ``x`` and the gap between them."""
    level = as_level(level)
    if not is_rprime(to_residues(x, level)):
        raise UsageError(f"{x} is not coprime to the basis {level.primes}")
    y = _walk(x, level, +1)
    return y, y - x


def enclosing_gap(x: int, level: WheelLevel | int) -> tuple[int, int]:
    """Survivors ``(a, b)`` with ``a < x < b`` and nothing coprime strictly between.

    ``x`` itself must be r-composite.
    """
    level = as_level(level)
    if is_rprime(to_residues(x, level)):
        raise UsageError(f"{x} is itself coprime to the basis")
    return _walk(x, level, -1), _walk(x, level, +1)


def central_residue_table(level: WheelLevel | int) -> list[dict]:
    """Classify ``C-2 .. C+2`` around the symmetry axis ``C = L / 2``."""
    level = as_level(level)
    if level.k < 2:
        raise UsageError("the symmetry axis is defined for k >= 2")
    centre = math.prod(level.primes[1:])
    rows = []
    for offset in range(-2, 3):
        rv = to_residues(centre + offset, level)
        rows.append({"offset": offset, "value": centre + offset,
                     "coords": rv.coords, "rprime": is_rprime(rv)})
    return rows


@dataclass(frozen=True)
class RecurrenceCheck:
    k: int
    t_k: int
    t_next: int
    period_k: int
    p_next: int
    rough_holds: bool
    strict_holds: bool

    @property
    def both(self) -> tuple[bool, bool]:
        return self.rough_holds, self.strict_holds


def multiplicity_recurrence_check(
    k: int,
    hist_k: Optional[GapHistogram] = None,
    hist_next: Optional[GapHistogram] = None,
) -> RecurrenceCheck:
    """Test ``t_{k+1} >= t_k * p_{k+1} - T_k`` and ``t_{k+1} > T_k``.

    ``t`` is the measured count of 2-gaps, taken from histograms (scanned
    when not supplied) so the check never leans on the closed form.
    """
    from .engine import ScanConfig, scan_level

    level = as_level(k)
    if hist_k is None:
        hist_k = scan_level(ScanConfig(level)).histogram
    if hist_next is None:
        hist_next = scan_level(ScanConfig(level.next())).histogram
    t_k, t_next = hist_k.count(2), hist_next.count(2)
    period_k = hist_k.total_count
    p_next = nth_prime(level.k + 1)
    return RecurrenceCheck(
        k=level.k,
        t_k=t_k,
        t_next=t_next,
        period_k=period_k,
        p_next=p_next,
        rough_holds=t_next >= t_k * p_next - period_k,
        strict_holds=t_next > period_k,
    )
