"""Segmented, memory-bounded scan of a wheel block.

The block ``[1, L+1]`` is split into contiguous chunks (one per worker) and
each chunk is walked in fixed-size segments. Only odd integers are stored;
the prime 2 is handled by construction. Each segment carries its last
survivor into the next so that gaps straddling a boundary are counted once,
and chunk partials are stitched in order by the controller. The merged
result does not depend on the segment length or the worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import ResourceCapError, UsageError
from .histogram import GapHistogram
from .levels import WheelLevel, as_level
from .wheel import primorial

DEFAULT_SEGMENT_LENGTH = 1 << 25
DEFAULT_POSITIONS_CAP = 64
#: Largest level whose full block is scanned without ``long_run``.
DESK_MAX_K = 10


@dataclass(frozen=True)
class ScanConfig:
    """What to scan and how.

    ``range`` is a half-open interval ``[lo, hi)`` inside ``[1, L+2)``;
    ``None`` means the full block ``[1, L+1]``.
    """

    level: WheelLevel
    segment_length: int = DEFAULT_SEGMENT_LENGTH
    worker_count: int = 1
    range: Optional[tuple[int, int]] = None
    positions_cap: int = DEFAULT_POSITIONS_CAP
    long_run: bool = False

    def __post_init__(self):
        object.__setattr__(self, "level", as_level(self.level))
        if self.level.k < 2:
            raise UsageError("scans are defined for k >= 2")
        if self.segment_length < 2 * self.level.largest:
            raise UsageError(
                f"segment_length {self.segment_length} is below the minimum "
                f"2 * p_k = {2 * self.level.largest}"
            )
        if self.worker_count < 1:
            raise UsageError("worker_count must be >= 1")
        if self.positions_cap < 0:
            raise UsageError("positions_cap must be >= 0")
        lo, hi = self.bounds
        if not 1 <= lo <= hi <= primorial(self.level) + 2:
            raise UsageError(f"range [{lo}, {hi}) is not inside [1, L+2)")

    @property
    def bounds(self) -> tuple[int, int]:
        if self.range is None:
            return 1, primorial(self.level) + 2
        return int(self.range[0]), int(self.range[1])

    @property
    def is_full_block(self) -> bool:
        return self.bounds == (1, primorial(self.level) + 2)


@dataclass
class ScanResult:
    level: WheelLevel
    bounds: tuple[int, int]
    histogram: GapHistogram
    gap_count: int
    survivor_count: int
    max_gap: int
    max_gap_multiplicity: int
    max_gap_positions: list[int]
    first_survivor: Optional[int]
    last_survivor: Optional[int]
    elapsed: float = field(default=0.0, compare=False)

    def to_json_dict(self, histogram_csv: Optional[str] = None, verified: bool = False) -> dict:
        return {
            "k": self.level.k,
            "max_gap": self.max_gap,
            "multiplicity": self.max_gap_multiplicity,
            "positions": list(self.max_gap_positions),
            "gap_count": self.gap_count,
            "histogram_csv": histogram_csv,
            "elapsed_ms": int(round(self.elapsed * 1000)),
            "verified": verified,
        }


class _Partial:
    """Running statistics over an ordered run of survivors."""

    def __init__(self, positions_cap: int):
        self.cap = positions_cap
        self.counts = np.zeros(0, dtype=np.int64)
        self.survivors = 0
        self.first: Optional[int] = None
        self.last: Optional[int] = None
        self.max_gap = 0
        self.max_mult = 0
        self.max_pos: list[int] = []

    def _note_max(self, value: int, mult: int, lefts):
        if value > self.max_gap:
            self.max_gap, self.max_mult, self.max_pos = value, 0, []
        if value == self.max_gap:
            self.max_mult += mult
            room = self.cap - len(self.max_pos)
            if room > 0:
                self.max_pos.extend(int(x) for x in lefts[:room])

    def add_counts(self, counts: np.ndarray):
        if counts.size > self.counts.size:
            counts = counts.astype(np.int64, copy=True)
            counts[: self.counts.size] += self.counts
            self.counts = counts
        else:
            self.counts[: counts.size] += counts

    def feed(self, values: np.ndarray):
        """Append ascending survivors, stitching to the carried last survivor."""
        if values.size == 0:
            return
        self.survivors += values.size
        if self.last is not None:
            values = np.concatenate(([self.last], values))
        else:
            self.first = int(values[0])
        if values.size >= 2:
            gaps = np.diff(values)
            self.add_counts(np.bincount(gaps))
            top = int(gaps.max())
            if top >= self.max_gap:
                lefts = values[:-1][gaps == top]
                self._note_max(top, lefts.size, lefts)
        self.last = int(values[-1])

    def absorb(self, other: "_Partial"):
        """Append a later, disjoint partial (sequential stitch)."""
        if other.first is None:
            return
        if self.last is not None:
            bridge = other.first - self.last
            counts = np.zeros(bridge + 1, dtype=np.int64)
            counts[bridge] = 1
            self.add_counts(counts)
            if bridge >= self.max_gap:
                self._note_max(bridge, 1, [self.last])
        else:
            self.first = other.first
        self.add_counts(other.counts)
        if other.max_gap and other.max_gap >= self.max_gap:
            self._note_max(other.max_gap, other.max_mult, other.max_pos)
        self.survivors += other.survivors
        self.last = other.last


def _odd_survivors(primes: tuple[int, ...], lo: int, hi: int, buf: np.ndarray) -> np.ndarray:
    """Survivors in ``[lo, hi)``, all odd, ascending."""
    first_odd = lo | 1
    if first_odd >= hi:
        return np.zeros(0, dtype=np.int64)
    n = (hi - first_odd + 1) // 2
    alive = buf[:n]
    alive[:] = True
    for p in primes:
        if p == 2:
            continue
        m = -(-first_odd // p) * p
        if not m & 1:
            m += p
        start = (m - first_odd) // 2
        if start < n:
            alive[start::p] = False
    return first_odd + 2 * np.flatnonzero(alive).astype(np.int64)


def _scan_chunk(primes, lo, hi, segment_length, positions_cap) -> _Partial:
    part = _Partial(positions_cap)
    buf = np.empty((segment_length + 1) // 2 + 1, dtype=bool)
    for a in range(lo, hi, segment_length):
        b = min(a + segment_length, hi)
        part.feed(_odd_survivors(primes, a, b, buf))
    return part


def _chunk_bounds(lo: int, hi: int, workers: int) -> list[tuple[int, int]]:
    if hi <= lo:
        return [(lo, hi)]
    step = -(-(hi - lo) // workers)
    return [(a, min(a + step, hi)) for a in range(lo, hi, step)] or [(lo, hi)]


def scan_level(cfg: ScanConfig) -> ScanResult:
    """Stream the configured range and return its gap statistics."""
    level = cfg.level
    lo, hi = cfg.bounds
    desk_span = primorial(WheelLevel(min(DESK_MAX_K, level.k))) + 2
    if hi - lo > desk_span and not cfg.long_run:
        raise ResourceCapError(
            f"scanning {hi - lo} integers at k={level.k} exceeds the desk-scale "
            f"ceiling (full blocks through k={DESK_MAX_K}); pass long_run=True"
        )
    start = time.perf_counter()
    chunks = _chunk_bounds(lo, hi, cfg.worker_count)
    args = [(level.primes, a, b, cfg.segment_length, cfg.positions_cap) for a, b in chunks]
    if len(args) == 1:
        partials = [_scan_chunk(*args[0])]
    else:
        with ProcessPoolExecutor(max_workers=len(args)) as pool:
            partials = list(pool.map(_scan_chunk, *zip(*args)))
    total = _Partial(cfg.positions_cap)
    for part in partials:
        total.absorb(part)
    hist = GapHistogram.from_bincount(total.counts)
    return ScanResult(
        level=level,
        bounds=(lo, hi),
        histogram=hist,
        gap_count=hist.total_count,
        survivor_count=total.survivors,
        max_gap=total.max_gap,
        max_gap_multiplicity=total.max_mult,
        max_gap_positions=total.max_pos,
        first_survivor=total.first,
        last_survivor=total.last,
        elapsed=time.perf_counter() - start,
    )


class MaxSkip(NamedTuple):
    value: int
    multiplicity: int
    positions: list[int]


def max_skip(level: WheelLevel | int, cfg: Optional[ScanConfig] = None) -> MaxSkip:
    """Largest gap of the level, how often it occurs, and where (left endpoints)."""
    level = as_level(level)
    if cfg is None:
        cfg = ScanConfig(level)
    elif cfg.level != level:
        raise UsageError("scan config is for a different level")
    res = scan_level(cfg)
    return MaxSkip(res.max_gap, res.max_gap_multiplicity, res.max_gap_positions)


def defect(level: WheelLevel | int, measured_max: int) -> int:
    """How far a measured maximum gap sits above ``2 * p_{k-1}``.

    ``level`` may be a bare ``k`` beyond the scan cap, so that published
    maxima at large levels can be compared without constructing a level.
    """
    from .levels import first_primes

    k = level.k if isinstance(level, WheelLevel) else int(level)
    if k < 2:
        raise UsageError("defect is defined for k >= 2")
    return measured_max - 2 * first_primes(k)[-2]
