"""Wheel levels: the basis of the first ``k`` primes and the caps that bound them."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import ResourceCapError, UsageError

#: Hard ceiling on the basis size; ``prod(first 14 primes) < 2**63``.
HARD_CAP_K = 14
CAP_ENV_VAR = "WHEELFORGE_CAP_K"


def cap_k() -> int:
    """Return the active level cap, honouring ``WHEELFORGE_CAP_K``."""
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None or raw.strip() == "":
        return HARD_CAP_K
    try:
        value = int(raw)
    except ValueError as exc:
        raise UsageError(f"{CAP_ENV_VAR}={raw!r} is not an integer") from exc
    if not 1 <= value <= HARD_CAP_K:
        raise UsageError(f"{CAP_ENV_VAR} must lie in [1, {HARD_CAP_K}], got {value}")
    return value


@lru_cache(maxsize=None)
def first_primes(count: int) -> tuple[int, ...]:
    """The first ``count`` primes, by trial division against earlier primes."""
    if count < 0:
        raise UsageError("count must be non-negative")
    found: list[int] = []
    candidate = 2
    while len(found) < count:
        limit = math.isqrt(candidate)
        if all(candidate % p for p in found if p <= limit):
            found.append(candidate)
        candidate += 1 if candidate == 2 else 2
    return tuple(found)


def nth_prime(n: int) -> int:
    """``p_n`` with ``p_1 = 2``."""
    if n < 1:
        raise UsageError(f"prime index must be >= 1, got {n}")
    return first_primes(n)[-1]


@dataclass(frozen=True)
class WheelLevel:
    """The basis ``p_1 = 2, ..., p_k``.

    Construction validates ``k`` against the active cap, so holding a
    ``WheelLevel`` guarantees the primorial fits in a signed 64-bit integer.
    """

    k: int
    primes: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool):
            raise UsageError(f"level index must be an int, got {self.k!r}")
        if self.k < 1:
            raise UsageError(f"level index must be >= 1, got {self.k}")
        cap = cap_k()
        if self.k > cap:
            raise ResourceCapError(f"level k={self.k} exceeds the cap k <= {cap}")
        object.__setattr__(self, "primes", first_primes(self.k))

    @property
    def largest(self) -> int:
        return self.primes[-1]

    @property
    def primorial(self) -> int:
        return math.prod(self.primes)

    @property
    def totient(self) -> int:
        return math.prod(p - 1 for p in self.primes)

    def next(self) -> "WheelLevel":
        return WheelLevel(self.k + 1)


def as_level(level: WheelLevel | int) -> WheelLevel:
    """Accept either a ``WheelLevel`` or a bare ``k``."""
    if isinstance(level, WheelLevel):
        return level
    return WheelLevel(level)
