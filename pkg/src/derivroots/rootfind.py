"""All zeros of a polynomial (and of its k-th derivative) via simultaneous
Aberth-Ehrlich iteration, certified by backward-error residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import RootFindError, ValidationError
from .measures import EmpiricalMeasure
from .polycore import PolyCoefficients, coeffs_from_roots, derivative

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RootFindConfig:
    max_iterations: int = 200
    residual_tol: float = 1e-10
    polish_steps: int = 3

    def __post_init__(self):
        if self.max_iterations <= 0:
            raise ValidationError("max_iterations must be positive")
        if not self.residual_tol > 0:
            raise ValidationError("residual_tol must be positive")
        if self.polish_steps < 0:
            raise ValidationError("polish_steps must be non-negative")


@dataclass(frozen=True, eq=False)
class CertifiedRoots:
    """All degree-many roots with multiplicity, plus scaled residuals
    |p(root)| / (sum_j |c_j| |root|^j); converged iff all residuals are at
    or below the configured tolerance."""

    roots: np.ndarray
    residuals: np.ndarray
    converged: bool
    iterations: int


def _init_radius(p: PolyCoefficients) -> float:
    """Starting circle: the smaller of the Cauchy bound 1 + max|c_j/c_d| and
    the Fujiwara-style bound 2 max_j |c_(d-j)/c_d|^(1/j).  Both bound every
    root; the Cauchy radius alone becomes astronomically loose once middle
    coefficients grow combinatorially."""
    lg = p.coeff_log2_mag()
    d = p.degree
    lead = lg[d]
    rel = lg[:d] - lead
    finite = rel[np.isfinite(rel)]
    if finite.size == 0:
        return 0.0  # monomial: all roots at the origin
    mx = float(np.max(finite))
    cauchy = 1.0 + 2.0 ** mx if mx < 512 else math.inf
    j = np.arange(1, d + 1, dtype=float)
    fuji = 2.0 * 2.0 ** float(np.nanmax(np.where(
        np.isfinite(rel[::-1]), rel[::-1] / j, -np.inf)))
    return max(min(cauchy, fuji), 1e-12)


def all_roots(p: PolyCoefficients, cfg: Optional[RootFindConfig] = None,
              initial: Optional[Sequence[complex]] = None) -> CertifiedRoots:
    """Aberth-Ehrlich iteration from a circle of golden-angle-spread starting
    points, followed by Newton polish; returns every root with multiplicity.

    Non-convergence is reported through ``converged=False`` with the best
    iterates rather than an exception, so callers decide how to proceed.
    """
    cfg = cfg or RootFindConfig()
    d = p.degree
    if d < 1:
        raise ValidationError("polynomial must have degree at least 1")
    lg = p.coeff_log2_mag()
    if not np.any(np.isfinite(lg[:d])):
        # exact monomial c * z^d: the zero set is exactly {0} with multiplicity
        zeros = np.zeros(d, dtype=np.complex128)
        return CertifiedRoots(zeros, np.zeros(d), True, 0)
    if initial is not None:
        w = np.asarray(initial, dtype=np.complex128).copy()
        if w.shape != (d,):
            raise ValidationError("initial guesses must match the degree")
    else:
        radius = _init_radius(p)
        idx = np.arange(1, d + 1, dtype=float)
        angles = 2.0 * math.pi * np.mod(idx * _GOLDEN, 1.0)
        w = radius * np.exp(1j * angles)
    w, resid, sweeps, ok = _kernels.aberth_iterate(
        p.mantissa, p.scale2, w, int(cfg.max_iterations), float(cfg.residual_tol))
    if cfg.polish_steps:
        w = _kernels.newton_polish(p.mantissa, p.scale2, w, int(cfg.polish_steps))
        resid = _kernels.residuals_scaled(p.mantissa, p.scale2, w)
        ok = bool(np.all(resid <= cfg.residual_tol))
    order = np.lexsort((w.imag, w.real))
    return CertifiedRoots(w[order], resid[order], bool(ok), int(sweeps))


def derivative_zero_measure(roots: Sequence[complex], k: int,
                            cfg: Optional[RootFindConfig] = None) -> EmpiricalMeasure:
    """Empirical measure on the zeros of the k-th derivative of the monic
    polynomial with the given roots: n-k points, each with weight 1/(n-k)."""
    roots = np.asarray(roots, dtype=np.complex128)
    n = roots.size
    if not 1 <= k < n:
        raise ValidationError(f"need 1 <= k < n, got k={k}, n={n}")
    if np.all(roots == roots[0]):
        # (z - a)^n differentiates to a shifted monomial: the zeros are exact
        return EmpiricalMeasure.from_points(np.full(n - k, roots[0]))
    cert = all_roots(derivative(coeffs_from_roots(roots), k), cfg)
    if not cert.converged:
        worst = float(np.max(cert.residuals))
        raise RootFindError(
            f"derivative zero search did not certify: worst residual {worst:.3e}")
    return EmpiricalMeasure.from_points(cert.roots)
