"""Empirical measures, smooth compactly-supported test functions, and the
discrepancy/energy diagnostics used to compare a zero set against the root
measure it should converge to.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate
from scipy.special import i0e

from .errors import ValidationError
from .sampler import (ComplexGaussian, FiniteAtomic, Mixture, RootDistribution,
                      UniformCircle, UniformDisk, _disk_arc_angle)

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Uniform weights 1/count on a finite point set in the plane."""

    points: np.ndarray
    weight: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        if pts.ndim != 1 or pts.size == 0:
            raise ValidationError("points must be a non-empty 1-d array")
        if abs(self.weight * pts.size - 1.0) > 1e-12:
            raise ValidationError("weight * count must equal 1 within 1e-12")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points) -> "EmpiricalMeasure":
        pts = np.asarray(points, dtype=np.complex128)
        return cls(pts, 1.0 / pts.size)

    @property
    def count(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class TestFunction:
    """The standard smooth bump on a disk.

    phi(z) = exp(1 - 1/(1 - t)) with t = |(z - center)/radius|^2 < 1, else 0;
    phi(center) = 1, infinitely differentiable, support = closed disk.  The
    Laplacian is available in closed form:
    (4/radius^2) * exp(1 - 1/(1-t)) * (t^2 + t - 1) / (1-t)^4.
    """

    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError("bump radius must be positive")
        object.__setattr__(self, "center", complex(self.center))

    def _t(self, z):
        u = (np.asarray(z, dtype=np.complex128) - self.center) / self.radius
        return u.real ** 2 + u.imag ** 2

    def value(self, z):
        t = self._t(z)
        inside = t < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(inside, np.exp(1.0 - 1.0 / np.where(inside, 1.0 - t, 1.0)), 0.0)
        return out if out.ndim else float(out)

    def laplacian(self, z):
        t = self._t(z)
        inside = t < 1.0
        om = np.where(inside, 1.0 - t, 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            core = np.exp(1.0 - 1.0 / om) * (t * t + t - 1.0) / om ** 4
        out = np.where(inside, (4.0 / self.radius ** 2) * core, 0.0)
        return out if out.ndim else float(out)

    __call__ = value


class IntegralResult(NamedTuple):
    value: float
    error: float
    converged: bool


def integrate_empirical(m: EmpiricalMeasure,
                        f: Union[TestFunction, Callable]) -> float:
    """weight * sum f(points); f may be a TestFunction or any callable
    (e.g. a TestFunction's laplacian)."""
    func = f.value if isinstance(f, TestFunction) else f
    return float(m.weight * np.sum(func(m.points)))


def integrate_distribution(dist: RootDistribution, f: TestFunction,
                           budget: int = 200) -> IntegralResult:
    """integral of the bump against the root measure.

    Exact for atoms; 1-d adaptive quadrature in polar coordinates around the
    bump center for disk and Gaussian measures, arc quadrature for circles.
    """
    if not isinstance(f, TestFunction):
        raise ValidationError("integrate_distribution needs a TestFunction")
    if isinstance(dist, FiniteAtomic):
        val = sum(w * f.value(p) for p, w in dist.atoms)
        return IntegralResult(float(val), 0.0, True)
    if isinstance(dist, Mixture):
        value = err = 0.0
        ok = True
        for d, w in dist.components:
            r = integrate_distribution(d, f, budget)
            value += w * r.value
            err += w * r.error
            ok = ok and r.converged
        return IntegralResult(value, err, ok)
    if isinstance(dist, UniformCircle):
        return _circle_bump_integral(dist.radius, f, budget)
    if isinstance(dist, UniformDisk):
        r0 = dist.radius
        d = abs(f.center)
        area = math.pi * r0 * r0

        def g(s):
            return f.value(f.center + s) * _disk_arc_angle(d, r0, s) * s / area

        hi = min(f.radius, d + r0)
        if hi <= max(0.0, d - r0):
            return IntegralResult(0.0, 0.0, True)
        val, err, ok = _quad(g, 0.0, hi, budget,
                             points=_interior_points(0.0, hi, (abs(r0 - d),)))
        return IntegralResult(val, err, ok)
    if isinstance(dist, ComplexGaussian):
        d = abs(f.center - dist.mean)
        s2 = dist.sigma ** 2

        def g(s):
            ring = (2.0 * s / s2) * math.exp(-((s - d) ** 2) / s2) \
                * float(i0e(2.0 * s * d / s2))
            return f.value(f.center + s) * ring

        val, err, ok = _quad(g, 0.0, f.radius, budget)
        return IntegralResult(val, err, ok)
    raise ValidationError(f"unsupported distribution {type(dist).__name__}")


def _circle_bump_integral(r0: float, f: TestFunction, budget: int) -> IntegralResult:
    d = abs(f.center)
    if d == 0:
        # every circle point sits at the same bump height
        return IntegralResult(float(f.value(r0 + 0j)), 0.0, True)
    # support meets the circle on an arc |theta - theta_c| <= tmax
    cos_t = (r0 * r0 + d * d - f.radius ** 2) / (2.0 * r0 * d)
    if cos_t >= 1.0:
        return IntegralResult(0.0, 0.0, True)
    tmax = math.pi if cos_t <= -1.0 else math.acos(cos_t)
    theta_c = math.atan2(f.center.imag, f.center.real)

    def g(t):
        return f.value(r0 * np.exp(1j * (theta_c + t)))

    val, err, ok = _quad(g, -tmax, tmax, budget)
    return IntegralResult(val / _TWO_PI, err / _TWO_PI, ok)


def _interior_points(a, b, pts):
    inner = [p for p in pts if a < p < b]
    return inner or None


def _quad(f, a, b, budget, points=None) -> Tuple[float, float, bool]:
    res = integrate.quad(f, a, b, limit=max(10, int(budget)), points=points,
                         full_output=1)
    return res[0], res[1], len(res) == 3


def bump_family(dist: RootDistribution,
                radii: Optional[Sequence[float]] = None) -> Tuple[TestFunction, ...]:
    """Default discrepancy family: bumps at three radii on center lattices of
    spacing equal to the radius, covering the support's 2-neighborhood."""
    cover = dist.bounding_radius() + 2.0
    if radii is None:
        radii = (cover / 2.0, cover / 4.0, cover / 8.0)
    fams = []
    for rho in radii:
        offs = np.arange(-cover, cover + rho / 2.0, rho)
        for x in offs:
            for y in offs:
                fams.append(TestFunction(complex(x, y), rho))
    return tuple(fams)


@functools.lru_cache(maxsize=32)
def _family_integrals(dist: RootDistribution,
                      family: Tuple[TestFunction, ...]) -> np.ndarray:
    return np.array([integrate_distribution(dist, f).value for f in family])


def discrepancy(m: EmpiricalMeasure, dist: RootDistribution,
                family: Optional[Sequence[TestFunction]] = None) -> float:
    """max over the bump family of |empirical integral - measure integral|."""
    fam = tuple(family) if family is not None else bump_family(dist)
    ref = _family_integrals(dist, fam)
    emp = np.array([integrate_empirical(m, f) for f in fam])
    return float(np.max(np.abs(emp - ref)))


def energy_distance(m: EmpiricalMeasure, ref_sample: Sequence[complex]) -> float:
    """2 E|X-Y| - E|X-X'| - E|Y-Y'| over the two point sets (V-statistics)."""
    x = np.asarray(m.points, dtype=np.complex128)
    y = np.asarray(ref_sample, dtype=np.complex128)
    if y.ndim != 1 or y.size == 0:
        raise ValidationError("ref_sample must be a non-empty 1-d collection")
    e = 2.0 * _mean_abs_diff(x, y) - _mean_abs_diff(x, x) - _mean_abs_diff(y, y)
    return max(e, 0.0)


def _mean_abs_diff(a: np.ndarray, b: np.ndarray, chunk: int = 512) -> float:
    total = 0.0
    for lo in range(0, a.size, chunk):
        blk = a[lo:lo + chunk]
        total += float(np.abs(blk[:, None] - b[None, :]).sum())
    return total / (a.size * b.size)
