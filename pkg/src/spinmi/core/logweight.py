"""Signed log-domain scalars.

Partition functions and their ratios overflow double precision well before
the system sizes of interest, so every engine communicates through
(log magnitude, sign) pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class LogWeight:
    """A real number w stored as (log|w|, sign(w)).

    sign 0 encodes an exact zero (log_magnitude is then -inf by convention).
    """

    log_magnitude: float
    sign: int = 1

    ZERO: "LogWeight" = None  # set below

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if self.sign == 0 and self.log_magnitude != -math.inf:
            object.__setattr__(self, "log_magnitude", -math.inf)

    @classmethod
    def from_float(cls, value: float) -> "LogWeight":
        if value == 0.0:
            return cls(-math.inf, 0)
        return cls(math.log(abs(value)), 1 if value > 0 else -1)

    def to_float(self) -> float:
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogWeight") -> "LogWeight":
        if self.sign == 0 or other.sign == 0:
            return LogWeight(-math.inf, 0)
        return LogWeight(self.log_magnitude + other.log_magnitude, self.sign * other.sign)

    def __truediv__(self, other: "LogWeight") -> "LogWeight":
        if other.sign == 0:
            raise ZeroDivisionError("division by exact-zero LogWeight")
        if self.sign == 0:
            return LogWeight(-math.inf, 0)
        return LogWeight(self.log_magnitude - other.log_magnitude, self.sign * other.sign)

    def __add__(self, other: "LogWeight") -> "LogWeight":
        """Overflow-safe signed log-sum-exp."""
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.log_magnitude >= other.log_magnitude else (other, self)
        delta = lo.log_magnitude - hi.log_magnitude  # <= 0
        term = lo.sign * hi.sign * math.exp(delta)
        if term <= -1.0:
            # exact cancellation (term == -1) or rounding just below it
            total = 1.0 + term
            if total <= 0.0:
                return LogWeight(-math.inf, 0)
        return LogWeight(hi.log_magnitude + math.log1p(term), hi.sign)

    def __neg__(self) -> "LogWeight":
        return LogWeight(self.log_magnitude, -self.sign)

    def __float__(self) -> float:
        return self.to_float()


LogWeight.ZERO = LogWeight(-math.inf, 0)
