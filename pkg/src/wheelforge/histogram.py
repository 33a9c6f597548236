"""Sparse gap histograms over one period."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np


@dataclass
class GapHistogram:
    """Map from gap value to occurrence count.

    Keys are unbounded even integers, stored sparsely. Adding two histograms
    is commutative, which is what makes per-worker accumulation safe to merge.
    """

    entries: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_gaps(cls, gaps) -> "GapHistogram":
        gaps = np.asarray(gaps)
        if gaps.size == 0:
            return cls()
        return cls.from_bincount(np.bincount(gaps))

    @classmethod
    def from_bincount(cls, counts: np.ndarray) -> "GapHistogram":
        nz = np.flatnonzero(counts)
        return cls({int(g): int(counts[g]) for g in nz})

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> "GapHistogram":
        return cls({int(g): int(c) for g, c in mapping.items() if c})

    def count(self, gap: int) -> int:
        return self.entries.get(gap, 0)

    @property
    def total_count(self) -> int:
        return sum(self.entries.values())

    @property
    def total_length(self) -> int:
        return sum(g * c for g, c in self.entries.items())

    @property
    def max_gap(self) -> int:
        return max(self.entries) if self.entries else 0

    def mode(self) -> int:
        """Most frequent gap; ties go to the smaller gap."""
        return min(self.entries, key=lambda g: (-self.entries[g], g))

    def odd_multiplicities(self, exclude: Iterable[int] = (2, 4)) -> list[int]:
        """Gap values outside ``exclude`` whose count is odd."""
        skip = set(exclude)
        return [g for g, c in sorted(self.entries.items()) if g not in skip and c % 2]

    def __add__(self, other: "GapHistogram") -> "GapHistogram":
        merged = dict(self.entries)
        for g, c in other.entries.items():
            merged[g] = merged.get(g, 0) + c
        return GapHistogram(merged)

    def __eq__(self, other):
        if not isinstance(other, GapHistogram):
            return NotImplemented
        return self.entries == other.entries

    def items(self):
        return sorted(self.entries.items())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["gap", "count"])
        writer.writerows(self.items())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GapHistogram":
        rows = csv.DictReader(io.StringIO(text))
        return cls({int(r["gap"]): int(r["count"]) for r in rows})
