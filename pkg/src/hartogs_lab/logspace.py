"""Signed log-magnitude numbers for quantities like b**(2n+2) at |n| ~ 200."""

import math
from dataclasses import dataclass

import numpy as np

NEG_INF = -math.inf


def log_diff_exp(x, y):
    """log(e^x - e^y) for x >= y, computed as x + log1p(-e^(y - x))."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        out = x + np.log1p(-np.exp(y - x))
    return out if out.ndim else float(out)


def log_add_exp(x, y):
    return np.logaddexp(x, y)


@dataclass(frozen=True)
class LogValue:
    """``sign * exp(log_magnitude)``; zero is ``sign == 0`` with magnitude -inf."""

    log_magnitude: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.sign == 0 and self.log_magnitude != NEG_INF:
            object.__setattr__(self, "log_magnitude", NEG_INF)
        if self.sign != 0 and not math.isfinite(self.log_magnitude):
            if self.log_magnitude == NEG_INF:
                object.__setattr__(self, "sign", 0)
            else:
                raise OverflowError("LogValue magnitude is not finite")

    @classmethod
    def zero(cls):
        return cls(NEG_INF, 0)

    @classmethod
    def from_float(cls, x):
        if x == 0:
            return cls.zero()
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    @classmethod
    def from_log(cls, log_magnitude, sign=1):
        return cls(float(log_magnitude), sign)

    def __float__(self):
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_magnitude)
        except OverflowError:
            return self.sign * math.inf

    @property
    def value(self):
        return float(self)

    def __neg__(self):
        return LogValue(self.log_magnitude, -self.sign)

    def __mul__(self, other):
        other = _coerce(other)
        if self.sign == 0 or other.sign == 0:
            return LogValue.zero()
        return LogValue(self.log_magnitude + other.log_magnitude, self.sign * other.sign)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("LogValue division by zero")
        if self.sign == 0:
            return LogValue.zero()
        return LogValue(self.log_magnitude - other.log_magnitude, self.sign * other.sign)

    def __add__(self, other):
        other = _coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.log_magnitude >= other.log_magnitude else (other, self)
        if hi.sign == lo.sign:
            return LogValue(float(np.logaddexp(hi.log_magnitude, lo.log_magnitude)), hi.sign)
        if hi.log_magnitude == lo.log_magnitude:
            return LogValue.zero()
        return LogValue(log_diff_exp(hi.log_magnitude, lo.log_magnitude), hi.sign)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __lt__(self, other):
        return float((self - _coerce(other)).sign) < 0

    def __le__(self, other):
        return (self - _coerce(other)).sign <= 0


def _coerce(x):
    if isinstance(x, LogValue):
        return x
    return LogValue.from_float(float(x))
