"""Root measures on the complex plane: reproducible sampling and the
inverse-distance moment that detects the exceptional set where
``integral |y - z|^-1 dmu(y)`` diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import integrate
from scipy.special import ellipk, i0e

from .errors import ValidationError

_TWO_PI = 2.0 * math.pi
_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class SeedSpec:
    """A (master seed, stream index) pair naming one reproducible stream.

    The pair keys a Philox counter-based generator, so streams with distinct
    indices are statistically independent and the draw for a given pair is
    identical regardless of process, thread count, or evaluation order.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not isinstance(self.master_seed, int):
            raise ValidationError("master_seed must be an integer")
        if not isinstance(self.stream_index, int) or self.stream_index < 0:
            raise ValidationError("stream_index must be a non-negative integer")

    def child(self, offset: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.stream_index + offset)

    def generator(self, jump: int = 0) -> np.random.Generator:
        bitgen = np.random.Philox(key=[self.master_seed % (1 << 64),
                                       self.stream_index])
        if jump:
            bitgen = bitgen.jumped(jump)
        return np.random.Generator(bitgen)


class InverseMomentResult(NamedTuple):
    value: float
    error: float
    converged: bool


class RootDistribution:
    """Base class for the measures roots are drawn from."""

    def is_degenerate(self) -> bool:
        """True iff the support is a single point."""
        raise NotImplementedError

    def bounding_radius(self) -> float:
        """Radius of a centered disk holding (essentially) all of the mass."""
        raise NotImplementedError

    def _sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def _inverse_moment(self, z: complex, budget: int,
                        within: Optional[float]) -> InverseMomentResult:
        raise NotImplementedError


@dataclass(frozen=True)
class UniformDisk(RootDistribution):
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError("uniform_disk radius must be positive")

    def is_degenerate(self) -> bool:
        return False

    def bounding_radius(self) -> float:
        return self.radius

    def _sample(self, n, rng):
        r = self.radius * np.sqrt(rng.random(n))
        theta = _TWO_PI * rng.random(n)
        return r * np.exp(1j * theta)

    def _inverse_moment(self, z, budget, within):
        d = abs(z)
        r0 = self.radius
        hi = d + r0 if within is None else min(within, d + r0)
        area = math.pi * r0 * r0
        # polar coordinates centered at z remove the 1/|y-z| singularity:
        # the ring at radius s contributes arc_angle(s)/area * ds
        lo_flat = min(abs(r0 - d), hi) if d < r0 else 0.0
        value = _TWO_PI * lo_flat / area
        start = abs(r0 - d)
        if hi <= start:
            return InverseMomentResult(value, 0.0, True)
        f = lambda s: _disk_arc_angle(d, r0, s) / area
        est, err, ok = _quad(f, start, hi, budget)
        return InverseMomentResult(value + est, err, ok)


@dataclass(frozen=True)
class UniformCircle(RootDistribution):
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError("uniform_circle radius must be positive")

    def is_degenerate(self) -> bool:
        return False

    def bounding_radius(self) -> float:
        return self.radius

    def _sample(self, n, rng):
        return self.radius * np.exp(1j * _TWO_PI * rng.random(n))

    def _inverse_moment(self, z, budget, within):
        d = abs(z)
        r0 = self.radius
        if within is None:
            if d == 0:
                return InverseMomentResult(1.0 / r0, 0.0, True)
            m = 4.0 * r0 * d / (r0 + d) ** 2
            val = 4.0 / (_TWO_PI * (r0 + d)) * float(ellipk(m))
            return InverseMomentResult(val, 0.0, True)
        if d == 0:
            val = 1.0 / r0 if within >= r0 else 0.0
            return InverseMomentResult(val, 0.0, True)
        if d == r0:
            # arc through z itself: the 1/|y-z| line singularity diverges
            return InverseMomentResult(math.inf, 0.0, True)
        cos_t = (r0 * r0 + d * d - within * within) / (2.0 * r0 * d)
        if cos_t >= 1.0:
            return InverseMomentResult(0.0, 0.0, True)
        tmax = math.pi if cos_t <= -1.0 else math.acos(cos_t)
        f = lambda t: 1.0 / math.sqrt(r0 * r0 + d * d - 2.0 * r0 * d * math.cos(t))
        est, err, ok = _quad(f, 0.0, tmax, budget)
        return InverseMomentResult(2.0 * est / _TWO_PI, err / math.pi, ok)


@dataclass(frozen=True)
class ComplexGaussian(RootDistribution):
    """Standard complex normal: Re and Im are N(0, sigma^2/2), E|Z-mean|^2 = sigma^2."""

    mean: complex = 0j
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError("complex_gaussian sigma must be positive")
        object.__setattr__(self, "mean", complex(self.mean))

    def is_degenerate(self) -> bool:
        return False

    def bounding_radius(self) -> float:
        return abs(self.mean) + 4.0 * self.sigma

    def _sample(self, n, rng):
        parts = rng.standard_normal((2, n))
        return self.mean + self.sigma * (parts[0] + 1j * parts[1]) / math.sqrt(2.0)

    def _inverse_moment(self, z, budget, within):
        d = abs(z - self.mean)
        s2 = self.sigma * self.sigma
        hi = np.inf if within is None else within

        def f(r):
            return (2.0 / s2) * math.exp(-((r - d) ** 2) / s2) \
                * float(i0e(2.0 * r * d / s2))

        est, err, ok = _quad(f, 0.0, hi, budget)
        return InverseMomentResult(est, err, ok)


@dataclass(frozen=True)
class FiniteAtomic(RootDistribution):
    atoms: Tuple[Tuple[complex, float], ...]

    def __post_init__(self):
        atoms = tuple((complex(p), float(w)) for p, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValidationError("finite_atomic needs at least one atom")
        weights = [w for _, w in atoms]
        if any(w <= 0 for w in weights):
            raise ValidationError("atom weights must be strictly positive")
        if abs(sum(weights) - 1.0) > _WEIGHT_TOL:
            raise ValidationError("atom weights must sum to 1 within 1e-12")

    def is_degenerate(self) -> bool:
        return len({p for p, _ in self.atoms}) == 1

    def bounding_radius(self) -> float:
        return max(abs(p) for p, _ in self.atoms)

    def points(self) -> np.ndarray:
        return np.array([p for p, _ in self.atoms], dtype=np.complex128)

    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    def _sample(self, n, rng):
        idx = rng.choice(len(self.atoms), size=n, p=self.weights())
        return self.points()[idx]

    def _inverse_moment(self, z, budget, within):
        z = complex(z)
        total = 0.0
        for p, w in self.atoms:
            dist = abs(p - z)
            if within is not None and dist > within:
                continue
            if p == z:
                return InverseMomentResult(math.inf, 0.0, True)
            total += w / dist
        return InverseMomentResult(total, 0.0, True)


@dataclass(frozen=True)
class Mixture(RootDistribution):
    components: Tuple[Tuple[RootDistribution, float], ...]

    def __post_init__(self):
        comps = tuple((d, float(w)) for d, w in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValidationError("mixture needs at least one component")
        if any(not isinstance(d, RootDistribution) for d, _ in comps):
            raise ValidationError("mixture components must be RootDistributions")
        weights = [w for _, w in comps]
        if any(w <= 0 for w in weights):
            raise ValidationError("mixture weights must be strictly positive")
        if abs(sum(weights) - 1.0) > _WEIGHT_TOL:
            raise ValidationError("mixture weights must sum to 1 within 1e-12")

    def is_degenerate(self) -> bool:
        pts = set()
        for d, _ in self.components:
            if not d.is_degenerate():
                return False
            if isinstance(d, FiniteAtomic):
                pts.update(p for p, _ in d.atoms)
        return len(pts) <= 1

    def bounding_radius(self) -> float:
        return max(d.bounding_radius() for d, _ in self.components)

    def _sample(self, n, rng):
        idx = rng.choice(len(self.components),
                         size=n, p=[w for _, w in self.components])
        out = np.empty(n, dtype=np.complex128)
        for ci, (dist, _) in enumerate(self.components):
            mask = idx == ci
            cnt = int(mask.sum())
            if cnt:
                out[mask] = dist._sample(cnt, rng)
        return out

    def _inverse_moment(self, z, budget, within):
        value = err = 0.0
        ok = True
        for dist, w in self.components:
            res = dist._inverse_moment(z, budget, within)
            value += w * res.value
            err += w * res.error
            ok = ok and res.converged
        return InverseMomentResult(value, err, ok)


def _disk_arc_angle(d: float, r0: float, s: float) -> float:
    """Angular measure of the circle |y - z| = s lying inside the disk B_r0(0),
    where d = |z|.  Piecewise smooth with kinks at |r0 - d| and r0 + d."""
    if s <= 0:
        return _TWO_PI if d < r0 else 0.0
    if d < r0 and s <= r0 - d:
        return _TWO_PI
    if s >= r0 + d or s <= d - r0:
        return 0.0
    c = (d * d + s * s - r0 * r0) / (2.0 * d * s)
    return 2.0 * math.acos(max(-1.0, min(1.0, c)))


def _quad(f, a, b, budget) -> Tuple[float, float, bool]:
    res = integrate.quad(f, a, b, limit=max(10, int(budget)), full_output=1)
    value, err = res[0], res[1]
    converged = len(res) == 3  # scipy appends an explanation on trouble
    return value, err, converged


def sample_roots(dist: RootDistribution, n: int, seed: SeedSpec) -> np.ndarray:
    """Draw n i.i.d. roots from dist; bitwise-deterministic given the seed."""
    if not isinstance(dist, RootDistribution):
        raise ValidationError("dist must be a RootDistribution")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValidationError("n must be a positive integer")
    return dist._sample(int(n), seed.generator())


def mu_inverse_moment(dist: RootDistribution, z: complex, budget: int = 200,
                      within: Optional[float] = None) -> InverseMomentResult:
    """integral of |y - z|^-1 dmu(y), optionally restricted to |y - z| <= within.

    Closed form for atomic and circle measures; adaptive quadrature in polar
    coordinates centered at z (which removes the singularity) for disk and
    Gaussian.  Returns +inf exactly when z is an atom of dist; an exhausted
    budget is reported through ``converged=False`` rather than an exception.
    """
    if not isinstance(dist, RootDistribution):
        raise ValidationError("dist must be a RootDistribution")
    return dist._inverse_moment(complex(z), budget, within)


_DIST_KINDS = {
    "uniform_disk": UniformDisk,
    "uniform_circle": UniformCircle,
    "complex_gaussian": ComplexGaussian,
    "finite_atomic": FiniteAtomic,
    "mixture": Mixture,
}


def dist_from_spec(obj: dict) -> RootDistribution:
    """Build a distribution from its config-file dictionary form."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError("distribution must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "uniform_disk":
        return UniformDisk(radius=_as_float(obj, "radius"))
    if kind == "uniform_circle":
        return UniformCircle(radius=_as_float(obj, "radius"))
    if kind == "complex_gaussian":
        return ComplexGaussian(mean=_as_complex(obj.get("mean", 0)),
                               sigma=_as_float(obj, "sigma", default=1.0))
    if kind == "finite_atomic":
        atoms = obj.get("atoms")
        if not isinstance(atoms, list) or not atoms:
            raise ValidationError("finite_atomic.atoms must be a non-empty list")
        return FiniteAtomic(tuple((_as_complex(a["point"]), float(a["weight"]))
                                  for a in atoms))
    if kind == "mixture":
        comps = obj.get("components")
        if not isinstance(comps, list) or not comps:
            raise ValidationError("mixture.components must be a non-empty list")
        return Mixture(tuple((dist_from_spec(c["distribution"]), float(c["weight"]))
                             for c in comps))
    raise ValidationError(f"unknown distribution kind '{kind}'")


def dist_to_spec(dist: RootDistribution) -> dict:
    if isinstance(dist, UniformDisk):
        return {"kind": "uniform_disk", "radius": dist.radius}
    if isinstance(dist, UniformCircle):
        return {"kind": "uniform_circle", "radius": dist.radius}
    if isinstance(dist, ComplexGaussian):
        return {"kind": "complex_gaussian",
                "mean": [dist.mean.real, dist.mean.imag], "sigma": dist.sigma}
    if isinstance(dist, FiniteAtomic):
        return {"kind": "finite_atomic",
                "atoms": [{"point": [p.real, p.imag], "weight": w}
                          for p, w in dist.atoms]}
    if isinstance(dist, Mixture):
        return {"kind": "mixture",
                "components": [{"distribution": dist_to_spec(d), "weight": w}
                               for d, w in dist.components]}
    raise ValidationError(f"cannot serialize {type(dist).__name__}")


def _as_float(obj, key, default=None):
    if key not in obj:
        if default is not None:
            return default
        raise ValidationError(f"missing field '{key}'")
    return float(obj[key])


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise ValidationError(f"cannot read complex value from {v!r}")
