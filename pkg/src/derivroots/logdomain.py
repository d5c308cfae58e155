"""Overflow-safe complex arithmetic on the (log-magnitude, argument) scale.

A value z is stored as ``(log_mag, arg)`` with ``z = exp(log_mag) * exp(i*arg)``
and ``log_mag = -inf`` encoding zero.  Sums are formed by factoring out the
larger magnitude, so chains of products and additions stay finite for
log-magnitudes up to about +-1e6, far beyond double range.

Two layers live here: a scalar :class:`LogComplex` for one-off evaluations,
and vectorized kernels on numpy arrays in "log form" (a complex array ``w``
with ``w.real = log|z|`` and ``w.imag = arg z``), used by the batched
elementary-symmetric-function evaluators.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

_TWO_PI = 2.0 * math.pi
_NEG_INF = float("-inf")


def wrap_angle(a):
    """Wrap angles (scalar or array) into (-pi, pi]."""
    return np.pi - np.mod(np.pi - a, _TWO_PI)


def _wrap_scalar(a: float) -> float:
    if -math.pi < a <= math.pi:
        return a
    return math.pi - (math.pi - a) % _TWO_PI


@dataclass(frozen=True)
class LogComplex:
    """A complex number represented by natural-log magnitude and argument."""

    log_mag: float
    arg: float

    @staticmethod
    def zero() -> "LogComplex":
        return LogComplex(_NEG_INF, 0.0)

    @staticmethod
    def one() -> "LogComplex":
        return LogComplex(0.0, 0.0)

    @classmethod
    def from_complex(cls, z) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return cls.zero()
        w = cmath.log(z)
        return cls(w.real, w.imag)

    @classmethod
    def from_polar(cls, log_mag: float, arg: float) -> "LogComplex":
        if log_mag == _NEG_INF:
            return cls.zero()
        return cls(log_mag, _wrap_scalar(arg))

    def to_complex(self) -> complex:
        """Back to a plain complex; overflows to inf past log_mag ~709."""
        if self.log_mag == _NEG_INF:
            return 0j
        return cmath.exp(complex(self.log_mag, self.arg))

    def is_zero(self) -> bool:
        return self.log_mag == _NEG_INF

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero() or other.is_zero():
            return LogComplex.zero()
        return LogComplex.from_polar(self.log_mag + other.log_mag,
                                     self.arg + other.arg)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        if other.is_zero():
            raise ZeroDivisionError("division by a log-domain zero")
        if self.is_zero():
            return LogComplex.zero()
        return LogComplex.from_polar(self.log_mag - other.log_mag,
                                     self.arg - other.arg)

    def __neg__(self) -> "LogComplex":
        if self.is_zero():
            return self
        return LogComplex.from_polar(self.log_mag, self.arg + math.pi)

    def __add__(self, other: "LogComplex") -> "LogComplex":
        la, ta, lb, tb = self.log_mag, self.arg, other.log_mag, other.arg
        if lb > la:
            la, ta, lb, tb = lb, tb, la, ta
        if lb == _NEG_INF:
            return LogComplex(la, ta)
        # a + b = a * (1 + b/a) with |b/a| <= 1, so the factor never overflows
        f = 1.0 + cmath.exp(complex(lb - la, tb - ta))
        if f == 0:
            return LogComplex.zero()
        lf = cmath.log(f)
        return LogComplex.from_polar(la + lf.real, ta + lf.imag)

    def __sub__(self, other: "LogComplex") -> "LogComplex":
        return self + (-other)

    def __pow__(self, k: int) -> "LogComplex":
        if k == 0:
            return LogComplex.one()
        if self.is_zero():
            if k < 0:
                raise ZeroDivisionError("zero to a negative power")
            return self
        return LogComplex.from_polar(self.log_mag * k, self.arg * k)


def rel_diff(a: LogComplex, b: LogComplex) -> float:
    """|a - b| / |b| computed without leaving the log domain."""
    if b.is_zero():
        return 0.0 if a.is_zero() else math.inf
    d = a - b
    if d.is_zero():
        return 0.0
    return math.exp(d.log_mag - b.log_mag)


# ---------------------------------------------------------------------------
# vectorized log-form kernels
# ---------------------------------------------------------------------------

def clog(z: np.ndarray) -> np.ndarray:
    """Complex array -> log form (log|z| + i*arg z); zeros map to -inf."""
    z = np.asarray(z, dtype=np.complex128)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(z)


def log_mul(w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    out = w1 + w2
    return out.real + 1j * wrap_angle(out.imag)


def log_add(w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """Elementwise log-form addition, stable for any magnitude spread."""
    w1 = np.asarray(w1, dtype=np.complex128)
    w2 = np.asarray(w2, dtype=np.complex128)
    take1 = w1.real >= w2.real
    big = np.where(take1, w1, w2)
    small = np.where(take1, w2, w1)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        f = 1.0 + np.exp(small - big)
        out = big + np.log(f)
    both_zero = (w1.real == _NEG_INF) & (w2.real == _NEG_INF)
    out = np.where(both_zero, np.complex128(complex(_NEG_INF, 0.0)), out)
    return out.real + 1j * wrap_angle(out.imag)


def elem_sym_log(y: np.ndarray, k: int) -> np.ndarray:
    """Elementary symmetric functions of log-form values.

    ``y`` has shape ``(n,) + tail`` where the leading axis indexes the
    variables and every trailing slot is an independent problem instance.
    Returns log-form ``e_0 .. e_k`` with shape ``(k+1,) + tail`` via the
    running recurrence, O(n*k) vector operations.
    """
    y = np.asarray(y, dtype=np.complex128)
    n = y.shape[0]
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of values n={n}")
    tail = y.shape[1:]
    state = np.full((k + 1,) + tail, complex(_NEG_INF, 0.0), dtype=np.complex128)
    state[0] = 0.0
    for m in range(n):
        for j in range(min(m + 1, k), 0, -1):
            state[j] = log_add(state[j], log_mul(y[m], state[j - 1]))
    return state
