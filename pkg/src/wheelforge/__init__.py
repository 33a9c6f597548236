"""Gap patterns of wheels over the first k primes, and what they say about primes."""

__version__ = "0.1.0"

from .errors import ResourceCapError, UsageError, WheelForgeError
from .levels import WheelLevel
from .wheel import (
    Pattern,
    VerificationReport,
    euler_period,
    pattern_build,
    pattern_refine,
    pattern_sieve_oracle,
    primorial,
    verify_pattern,
)
from .histogram import GapHistogram
from .engine import ScanConfig, ScanResult, defect, max_skip, scan_level

__all__ = [
    "GapHistogram",
    "Pattern",
    "ResourceCapError",
    "ScanConfig",
    "ScanResult",
    "UsageError",
    "VerificationReport",
    "WheelForgeError",
    "WheelLevel",
    "defect",
    "euler_period",
    "max_skip",
    "pattern_build",
    "pattern_refine",
    "pattern_sieve_oracle",
    "primorial",
    "scan_level",
    "verify_pattern",
]
