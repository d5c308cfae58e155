"""Polynomial construction, differentiation, and overflow-safe evaluation of
the normalized derivative ratio e_k(1/(z - X_1), ..., 1/(z - X_n)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import PoleError, ValidationError
from .logdomain import LogComplex, clog

_LN2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class PolyCoefficients:
    """Monic-friendly coefficient form, index j holding the coefficient of z^j.

    Coefficients are stored as ``mantissa * 2**scale2`` so that degree-n
    products of unit-scale roots, whose middle coefficients grow like
    sqrt(binomial(n, n/2)), stay representable far past double range.  For
    desk-scale polynomials every scale2 entry is small and ``coeffs`` gives
    back plain complex values.
    """

    mantissa: np.ndarray
    scale2: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(np.asarray(self.mantissa, dtype=np.complex128))
        e = np.ascontiguousarray(np.asarray(self.scale2, dtype=np.int64))
        if m.ndim != 1 or m.shape != e.shape or m.size == 0:
            raise ValidationError("mantissa and scale2 must be matching 1-d arrays")
        if m[-1] == 0:
            raise ValidationError("leading coefficient must be non-zero")
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "scale2", e)

    @classmethod
    def from_complex(cls, coeffs: Sequence[complex]) -> "PolyCoefficients":
        c = np.asarray(coeffs, dtype=np.complex128)
        a = np.abs(c)
        _, ex = np.frexp(a)
        m = np.ldexp(c.real, -ex) + 1j * np.ldexp(c.imag, -ex)
        return cls(m, ex.astype(np.int64))

    @property
    def degree(self) -> int:
        return len(self.mantissa) - 1

    @property
    def monic(self) -> bool:
        return self.coeff(self.degree) == 1.0 + 0.0j

    def coeff(self, j: int) -> complex:
        e = int(self.scale2[j])
        if abs(e) > 1020:
            raise OverflowError(f"coefficient {j} is out of double range (2**{e})")
        m = self.mantissa[j]
        return complex(math.ldexp(m.real, e), math.ldexp(m.imag, e))

    @property
    def coeffs(self) -> np.ndarray:
        """Plain complex coefficient array; raises if any entry overflows."""
        return np.array([self.coeff(j) for j in range(len(self.mantissa))])

    def coeff_log2_mag(self) -> np.ndarray:
        """log2 of each coefficient magnitude (-inf for zeros)."""
        with np.errstate(divide="ignore"):
            return np.log2(np.abs(self.mantissa)) + self.scale2

    def coeff_log(self, j: int) -> LogComplex:
        m = self.mantissa[j]
        if m == 0:
            return LogComplex.zero()
        return LogComplex.from_polar(
            math.log(abs(m)) + int(self.scale2[j]) * _LN2,
            math.atan2(m.imag, m.real))


def coeffs_from_roots(roots: Sequence[complex]) -> PolyCoefficients:
    """Monic polynomial with exactly the given multiset of roots.

    A balanced product tree (fixed left-to-right pairwise merging) keeps the
    merge work O(n^2) with O(log n) depth and deterministic output.
    """
    roots = np.asarray(roots, dtype=np.complex128)
    if roots.size == 0:
        return PolyCoefficients.from_complex([1.0 + 0.0j])
    level = [PolyCoefficients.from_complex([-r, 1.0 + 0.0j]) for r in roots]
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            a, b = level[i], level[i + 1]
            cm, ce = _kernels.conv_scaled(a.mantissa, a.scale2,
                                          b.mantissa, b.scale2)
            nxt.append(PolyCoefficients(cm, ce))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def derivative(p: PolyCoefficients, k: int) -> PolyCoefficients:
    """k-fold derivative; coefficient j of the result is coeffs[j+k]*(j+k)!/j!."""
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValidationError("k must be a non-negative integer")
    if k > p.degree:
        raise ValidationError(f"k={k} exceeds the degree {p.degree}")
    if k == 0:
        return p
    om, oe = _kernels.derivative_scaled(p.mantissa, p.scale2, int(k))
    return PolyCoefficients(om, oe)


def poly_eval(p: PolyCoefficients, z: complex) -> LogComplex:
    """Horner evaluation with a running power-of-two exponent, so neither a
    large |z| at high degree nor huge coefficients can overflow."""
    log_mag, arg = _kernels.eval_log_scaled(p.mantissa, p.scale2, complex(z))
    if log_mag == -np.inf:
        return LogComplex.zero()
    return LogComplex.from_polar(float(log_mag), float(arg))


def elem_sym(values: Sequence[LogComplex], k: int) -> LogComplex:
    """e_k of log-domain values via the length-(k+1) running recurrence."""
    values = list(values)
    n = len(values)
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValidationError("k must be a non-negative integer")
    if k > n:
        raise ValidationError(f"k={k} exceeds the number of values n={n}")
    state = [LogComplex.zero()] * (k + 1)
    state[0] = LogComplex.one()
    for m, y in enumerate(values):
        for j in range(min(m + 1, k), 0, -1):
            state[j] = state[j] + y * state[j - 1]
    return state[k]


def eval_Lnk(roots: Sequence[complex], z: complex, k: int) -> LogComplex:
    """e_k over Y_i = 1/(z - X_i); equals P^(k)(z) / (k! P(z)) identically."""
    roots = np.asarray(roots, dtype=np.complex128)
    z = complex(z)
    dz = z - roots
    if np.any(dz == 0):
        raise PoleError("z coincides with a root")
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValidationError("k must be a non-negative integer")
    if k > roots.size:
        raise ValidationError(f"k={k} exceeds the number of roots n={roots.size}")
    y = -clog(dz)
    values = [LogComplex.from_polar(float(w.real), float(w.imag)) for w in y]
    return elem_sym(values, int(k))


def log_factorial(k: int) -> LogComplex:
    """k! as a positive log-domain value (lgamma, never an integer factorial)."""
    return LogComplex(math.lgamma(k + 1), 0.0)
