"""Monte Carlo and analytic apparatus for anti-concentration of elementary
symmetric polynomials of i.i.d. complex values: small-ball probability
estimates, the multi-affine anti-concentration bound, the Bernoulli-split
rank statistic, and the derivative-order schedules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .errors import (DegenerateDistributionError, HypothesisViolation,
                     ValidationError)
from .logdomain import clog, elem_sym_log
from .sampler import FiniteAtomic, RootDistribution, SeedSpec

_WILSON_Z = 1.959963984540054  # two-sided 95%
_CHUNK = 4096  # fixed trial chunk; fixed so results never depend on memory/workers


@dataclass(frozen=True)
class KSchedule:
    """How the derivative order k grows with n.

    ``paper``      max(1, floor(log n / (5 log log n))), natural logs;
    ``fixed``      a constant k0;
    ``sublinear``  floor(n**beta) for beta in (0, 1), so k = o(n).
    """

    mode: str
    k0: Optional[int] = None
    beta: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("paper", "fixed", "sublinear"):
            raise ValidationError(f"unknown k_schedule mode '{self.mode}'")
        if self.mode == "fixed":
            if self.k0 is None or self.k0 < 1:
                raise ValidationError("fixed schedule needs k0 >= 1")
        if self.mode == "sublinear":
            if self.beta is None or not 0.0 < self.beta < 1.0:
                raise ValidationError("sublinear schedule needs beta in (0, 1)")

    @classmethod
    def paper(cls) -> "KSchedule":
        return cls("paper")

    @classmethod
    def fixed(cls, k0: int) -> "KSchedule":
        return cls("fixed", k0=k0)

    @classmethod
    def sublinear(cls, beta: float) -> "KSchedule":
        return cls("sublinear", beta=beta)


def k_schedule(n: int, s: KSchedule) -> int:
    if n < 3:
        raise ValidationError("need n >= 3 so that log log n is positive")
    if s.mode == "paper":
        return max(1, math.floor(math.log(n) / (5.0 * math.log(math.log(n)))))
    if s.mode == "fixed":
        if s.k0 >= n:
            raise ValidationError(f"fixed k0={s.k0} must be below n={n}")
        return s.k0
    return max(1, math.floor(n ** s.beta))


@dataclass(frozen=True)
class AntiConcEstimate:
    """Monte Carlo estimate of P(|e_k(Y_1..Y_n)| <= exp(-epsilon n))."""

    n: int
    k: int
    epsilon: float
    trials: int
    hits: int
    p_hat: float
    ci95: Tuple[float, float]
    seed: SeedSpec

    def to_record(self) -> dict:
        return {
            "n": self.n, "k": self.k, "epsilon": self.epsilon,
            "trials": self.trials, "hits": self.hits, "p_hat": self.p_hat,
            "ci95": [self.ci95[0], self.ci95[1]],
            "seed": [self.seed.master_seed, self.seed.stream_index],
        }


def wilson_interval(hits: int, trials: int,
                    z: float = _WILSON_Z) -> Tuple[float, float]:
    p = hits / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def estimate_small_ball(dist: RootDistribution, z: complex, n: int, k: int,
                        epsilon: float, trials: int, seed: SeedSpec,
                        direct: bool = False,
                        allow_degenerate: bool = False) -> AntiConcEstimate:
    """Count trials where log|e_k| <= -epsilon*n over Y_i = 1/(z - X_i)
    (or Y_i = X_i directly when ``direct``), with a Wilson 95% interval.

    Trials are drawn in fixed-size chunks from jumped substreams of the
    seed's Philox stream, so the estimate is reproducible and independent
    of scheduling or chunk execution order.
    """
    if not 0 <= k <= n:
        raise ValidationError(f"need 0 <= k <= n, got k={k}, n={n}")
    if trials < 1:
        raise ValidationError("trials must be positive")
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive")
    z = complex(z)
    if not allow_degenerate:
        if dist.is_degenerate():
            if direct:
                raise DegenerateDistributionError("Y is almost surely constant")
            atoms = dist.atoms if isinstance(dist, FiniteAtomic) else ()
            if any(p == z for p, _ in atoms):
                raise DegenerateDistributionError(
                    "z is the single atom: 1/(z - X) is undefined")
            raise DegenerateDistributionError(
                "1/(z - X) is almost surely constant")
    threshold = -epsilon * n
    hits = 0
    done = 0
    chunk_idx = 0
    while done < trials:
        rows = min(_CHUNK, trials - done)
        rng = seed.generator(jump=chunk_idx)
        x = dist._sample(rows * n, rng).reshape(rows, n)
        y = x if direct else 1.0 / (z - x)
        logmag = elem_sym_log(clog(y.T), k)[k].real
        hits += int(np.sum(logmag <= threshold))
        done += rows
        chunk_idx += 1
    return AntiConcEstimate(n=n, k=k, epsilon=float(epsilon), trials=trials,
                            hits=hits, p_hat=hits / trials,
                            ci95=wilson_interval(hits, trials), seed=seed)


def mnv_bound(d: int, p: float, r: float, B: float = 1.0) -> float:
    """The multi-affine anti-concentration bound
    B * d^(4/3) * (log rt)^(1/2) / rt^(1/(4d+1)) with rt = 2^d alpha^d r and
    alpha = min(p, 1-p), evaluated in the log domain.

    B is an absolute constant the source result does not pin down; callers
    supply it (default 1) and downstream reporting flags it as such.
    """
    if d < 1:
        raise ValidationError("d must be a positive integer")
    if not 0.0 < p < 1.0:
        raise ValidationError("p must be in (0, 1)")
    if not r > 0:
        raise ValidationError("r must be positive")
    if not B > 0:
        raise ValidationError("B must be positive")
    alpha = min(p, 1.0 - p)
    log_rt = d * math.log(2.0 * alpha) + math.log(r)
    if log_rt < math.log(3.0):
        raise HypothesisViolation(
            f"need 2^d alpha^d r >= 3, got log value {log_rt:.6g}")
    core = (4.0 / 3.0) * math.log(d) + 0.5 * math.log(log_rt) \
        - log_rt / (4.0 * d + 1.0)
    # B multiplies outside the exponential so scaling in B is exact
    return B * math.exp(core)


def rank_statistic(y_plus, y_minus, k: int) -> int:
    """Number of consecutive disjoint k-blocks whose gap product
    prod |y+_j - y-_j| reaches 2^k (products accumulated in log2, so the
    boundary case counts exactly)."""
    yp = np.asarray(y_plus, dtype=np.complex128)
    ym = np.asarray(y_minus, dtype=np.complex128)
    if yp.shape != ym.shape or yp.ndim != 1:
        raise ValidationError("y_plus and y_minus must be 1-d of equal length")
    n = yp.size
    if not 1 <= k <= n:
        raise ValidationError(f"need 1 <= k <= n, got k={k}, n={n}")
    nblocks = n // k
    gaps = np.abs(yp[:nblocks * k] - ym[:nblocks * k])
    with np.errstate(divide="ignore"):
        log2g = np.log2(gaps).reshape(nblocks, k)
    return int(np.sum(log2g.sum(axis=1) >= k))


def epsilon_threshold_check(n: int, eps_k: float) -> float:
    """(1/2 - 1/(8 eps)) * log log n: the leading term of the log of the
    small-ball bound when k = eps * log n / log log n.  Zero at eps = 1/4,
    divergently negative as n grows for eps <= 1/5."""
    if n < 16:
        raise ValidationError("need n >= 16")
    if not 0.0 < eps_k <= 0.5:
        raise ValidationError("eps_k must lie in (0, 1/2]")
    return (0.5 - 1.0 / (8.0 * eps_k)) * math.log(math.log(n))


class BernoulliSplit(NamedTuple):
    """Pilot-estimated recentering t, scale kappa, and tail mass q with
    P(Re Y - t > kappa) >= q and P(Re Y - t < -kappa) >= q, plus the
    Bernoulli parameter p = P(Re Y - t > 0)."""

    t: float
    kappa: float
    q: float
    p: float


def bernoulli_split_pilot(dist: RootDistribution, z: complex, seed: SeedSpec,
                          pilot: int = 10_000,
                          direct: bool = False) -> BernoulliSplit:
    """Estimate (t, kappa, q) from pilot samples of Y.

    The source result assumes such constants exist for any non-degenerate Y
    but gives no procedure; this convention takes t as the median of Re Y
    and kappa as half the interquartile range.
    """
    rng = seed.generator()
    x = dist._sample(pilot, rng)
    y = x if direct else 1.0 / (complex(z) - x)
    re = np.real(y)
    t = float(np.median(re))
    q25, q75 = np.quantile(re, [0.25, 0.75])
    kappa = max(float(q75 - q25) / 2.0, 1e-12)
    q = float(min(np.mean(re - t > kappa), np.mean(re - t < -kappa)))
    p = float(np.mean(re - t > 0))
    return BernoulliSplit(t=t, kappa=kappa, q=q, p=p)


def rank_diagnostic(dist: RootDistribution, z: complex, n: int, k: int,
                    seed: SeedSpec, direct: bool = False) -> dict:
    """Empirical rank of the Bernoulli-split coefficients at one (n, k).

    Rescales gaps by the pilot kappa (so the 2^k threshold matches the
    unit-kappa normalization) and reports the q^(2k) n / (2k) reference
    level the rank is expected to clear with high probability.
    """
    split = bernoulli_split_pilot(dist, z, seed.child(1), direct=direct)
    rng = seed.generator()
    need = 4 * n + 64
    plus = np.empty(0, dtype=np.complex128)
    minus = np.empty(0, dtype=np.complex128)
    for _ in range(64):
        x = dist._sample(need, rng)
        y = x if direct else 1.0 / (complex(z) - x)
        re = np.real(y) - split.t
        plus = np.concatenate([plus, y[re > 0]])
        minus = np.concatenate([minus, y[re <= 0]])
        if plus.size >= n and minus.size >= n:
            break
    else:
        raise DegenerateDistributionError(
            "could not collect both sign classes; Y looks degenerate")
    rank = rank_statistic(plus[:n] / split.kappa, minus[:n] / split.kappa, k)
    return {
        "rank": rank,
        "blocks": n // k,
        "reference": split.q ** (2 * k) * n / (2.0 * k),
        "t": split.t,
        "kappa": split.kappa,
        "q": split.q,
        "p": split.p,
    }
