"""Published max-skip observations, shipped as data with a per-row ``verified`` flag."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional


@dataclass(frozen=True)
class Claim:
    k: int
    prime: int
    max_skip: Optional[int]
    multiplicity: Optional[int]
    defect: Optional[int]
    verified: bool

    @property
    def label(self) -> str:
        if self.verified:
            return "paper value (verified)"
        return "paper value (unverified at this scale)"

    def compare(self, max_gap: int, multiplicity: int) -> Optional[bool]:
        """Whether a measurement agrees with every stated field; ``None`` if nothing is stated."""
        checks = []
        if self.max_skip is not None:
            checks.append(self.max_skip == max_gap)
        if self.multiplicity is not None:
            checks.append(self.multiplicity == multiplicity)
        return all(checks) if checks else None

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "prime": self.prime,
            "max_skip": self.max_skip,
            "multiplicity": self.multiplicity,
            "defect": self.defect,
            "verified": self.verified,
            "label": self.label,
        }


@lru_cache(maxsize=None)
def claims() -> tuple[Claim, ...]:
    text = resources.files("wheelforge").joinpath("data/published_claims.json").read_text("utf-8")
    return tuple(Claim(**row) for row in json.loads(text)["rows"])


def claim_for(k: int) -> Optional[Claim]:
    for c in claims():
        if c.k == k:
            return c
    return None
