"""Log-field evaluation, the Poisson kernel and integral, and numerical
checks of the Poisson-Jensen identity and of the distributional-Laplacian
pairing with smooth test functions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import QuadratureError, RootFindError, ValidationError
from .logdomain import clog, elem_sym_log
from .measures import TestFunction
from .polycore import coeffs_from_roots, derivative, eval_Lnk
from .rootfind import RootFindConfig, all_roots

_TWO_PI = 2.0 * math.pi
_NODE_CLEARANCE = 1e-6


@dataclass(frozen=True)
class AnnulusConfig:
    """Inner evaluation disk B_r and quadrature circle |w| = R."""

    r: float
    R: float
    quad_nodes: int = 4096

    def __post_init__(self):
        if not 0 < self.r < self.R:
            raise ValidationError("need 0 < r < R")
        q = self.quad_nodes
        if q <= 0 or (q & (q - 1)) != 0:
            raise ValidationError("quad_nodes must be a positive power of two")


def choose_annulus(roots: Sequence[complex], zeros: Sequence[complex] = (),
                   r: Optional[float] = None, R: Optional[float] = None,
                   quad_nodes: int = 4096) -> AnnulusConfig:
    """Default R = 2*(1 + max|root|), nudged outward until every root and
    zero keeps distance >= 1e-6 from the circle; almost every R works, so
    any deterministic jitter is fine."""
    pts = np.concatenate([np.asarray(roots, dtype=np.complex128),
                          np.asarray(zeros, dtype=np.complex128)])
    if R is None:
        top = float(np.max(np.abs(pts))) if pts.size else 0.0
        R = 2.0 * (1.0 + top)
    for _ in range(64):
        if pts.size == 0 or np.min(np.abs(np.abs(pts) - R)) >= _NODE_CLEARANCE:
            break
        R *= 1.0 + 1e-5
    if r is None:
        r = R / 2.0
    return AnnulusConfig(r=float(r), R=float(R), quad_nodes=quad_nodes)


def poisson_kernel(R: float, r, phi):
    """(R^2 - r^2) / (R^2 + r^2 - 2 R r cos phi) for 0 <= r < R."""
    r_arr = np.asarray(r, dtype=float)
    if not R > 0:
        raise ValidationError("R must be positive")
    if np.any(r_arr < 0) or np.any(r_arr >= R):
        raise ValidationError("need 0 <= r < R")
    out = (R * R - r_arr ** 2) / (R * R + r_arr ** 2 - 2.0 * R * r_arr * np.cos(phi))
    return out if out.ndim else float(out)


def log_abs_Lnk_at(roots: Sequence[complex], k: int, points: np.ndarray,
                   chunk: int = 1 << 16) -> np.ndarray:
    """log|L_n^(k)| at many points via the batched log-domain recurrence."""
    roots = np.asarray(roots, dtype=np.complex128)
    pts = np.asarray(points, dtype=np.complex128).ravel()
    out = np.empty(pts.size)
    for lo in range(0, pts.size, chunk):
        blk = pts[lo:lo + chunk]
        y = -clog(blk[None, :] - roots[:, None])
        out[lo:lo + chunk] = elem_sym_log(y, k)[k].real
    return out.reshape(np.asarray(points).shape)


def _derivative_zeros(roots: np.ndarray, k: int,
                      rf_cfg: Optional[RootFindConfig]) -> np.ndarray:
    if k == 0:
        return roots.copy()
    cert = all_roots(derivative(coeffs_from_roots(roots), k), rf_cfg)
    if not cert.converged:
        worst = float(np.max(cert.residuals))
        raise RootFindError(
            f"zeros of the k-th derivative not certified: worst residual {worst:.3e}")
    return cert.roots


def poisson_integral(roots: Sequence[complex], k: int, z: complex,
                     cfg: AnnulusConfig,
                     zeros: Optional[Sequence[complex]] = None) -> float:
    """(1/2pi) integral of log|L_n^(k)(R e^(i theta))| P_R(|z|, theta - arg z)
    by the trapezoid rule on quad_nodes equispaced angles.

    log magnitudes are read directly off the log-domain evaluation, never
    exponentiated.  If a node lands within 1e-6 of a root (pole) or of a
    supplied zero, the node set is rotated by half a spacing and retried
    once; a second clash raises.
    """
    roots = np.asarray(roots, dtype=np.complex128)
    z = complex(z)
    if abs(z) >= cfg.r:
        raise ValidationError("z must lie strictly inside B_r")
    guard_pts = roots if zeros is None else np.concatenate(
        [roots, np.asarray(zeros, dtype=np.complex128)])
    m = cfg.quad_nodes
    for offset in (0.0, 0.5):
        theta = _TWO_PI * (np.arange(m) + offset) / m
        nodes = cfg.R * np.exp(1j * theta)
        if guard_pts.size and np.min(
                np.abs(nodes[:, None] - guard_pts[None, :])) < _NODE_CLEARANCE:
            continue
        logl = log_abs_Lnk_at(roots, k, nodes)
        if not np.all(np.isfinite(logl)):
            continue
        kern = poisson_kernel(cfg.R, abs(z), theta - np.angle(z))
        return float(np.mean(logl * kern))
    raise QuadratureError("quadrature nodes persistently clash with zeros/poles")


def _blaschke_log(R: float, z: complex, w: np.ndarray) -> float:
    """sum of log |R (z - w_j) / (R^2 - conj(w_j) z)|."""
    if w.size == 0:
        return 0.0
    num = np.abs(R * (z - w))
    den = np.abs(R * R - np.conj(w) * z)
    return float(np.sum(np.log(num) - np.log(den)))


def poisson_jensen_residual(roots: Sequence[complex], k: int, z: complex,
                            cfg: AnnulusConfig,
                            rf_cfg: Optional[RootFindConfig] = None) -> float:
    """|log|L(z)| - (Poisson integral + zero corrections - pole corrections)|.

    The identity is exact, so the returned value measures quadrature and
    root-certification error only.
    """
    roots = np.asarray(roots, dtype=np.complex128)
    z = complex(z)
    if abs(z) >= cfg.r:
        raise ValidationError("z must lie strictly inside B_r")
    lhs = eval_Lnk(roots, z, k)
    if lhs.is_zero():
        raise ValidationError("z is a zero of the derivative ratio")
    zeros = _derivative_zeros(roots, k, rf_cfg)
    integral = poisson_integral(roots, k, z, cfg, zeros=zeros)
    rhs = (integral
           + _blaschke_log(cfg.R, z, zeros[np.abs(zeros) < cfg.R])
           - _blaschke_log(cfg.R, z, roots[np.abs(roots) < cfg.R]))
    return abs(lhs.log_mag - rhs)


class LaplacianCheck(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def laplacian_identity_residual(roots: Sequence[complex], k: int,
                                f: TestFunction, grid_step: float,
                                rf_cfg: Optional[RootFindConfig] = None
                                ) -> LaplacianCheck:
    """Check (1/(2 pi n)) integral log|L_n^(k)| Lap(f) dm against
    (1/n) [sum f(derivative zeros) - sum f(roots)] by midpoint quadrature
    over the support of f.

    Note the 2 pi: the distributional Laplacian of log|z| carries mass
    2 pi at the origin, so the pairing needs it to balance the point sums.
    """
    roots = np.asarray(roots, dtype=np.complex128)
    n = roots.size
    if not grid_step > 0:
        raise ValidationError("grid_step must be positive")
    zeros = _derivative_zeros(roots, k, rf_cfg)
    rhs = float(np.sum(f.value(zeros)) - np.sum(f.value(roots))) / n

    h = float(grid_step)
    half = f.radius
    nx = max(1, math.ceil(2.0 * half / h))
    x0 = f.center.real - half
    y0 = f.center.imag - half
    crowd = np.concatenate([roots, zeros])
    for _ in range(2):
        if _min_node_distance(crowd, x0, y0, h, nx, nx) >= 1e-4 * h:
            break
        # one deterministic origin jitter, then proceed regardless
        x0 += 0.318 * h
        y0 += 0.271 * h
    xs = x0 + (np.arange(nx) + 0.5) * h
    ys = y0 + (np.arange(nx) + 0.5) * h
    nodes = xs[None, :] + 1j * ys[:, None]
    lap = f.laplacian(nodes)
    mask = lap != 0.0
    logl = log_abs_Lnk_at(roots, k, nodes[mask])
    lhs = h * h * float(np.sum(logl * lap[mask])) / (_TWO_PI * n)
    return LaplacianCheck(lhs, rhs, abs(lhs - rhs))


def _min_node_distance(points: np.ndarray, x0: float, y0: float,
                       h: float, nx: int, ny: int) -> float:
    """Distance from the nearest midpoint-grid node to any of the points."""
    if points.size == 0:
        return math.inf
    ix = np.clip(np.round((points.real - x0) / h - 0.5), 0, nx - 1)
    iy = np.clip(np.round((points.imag - y0) / h - 0.5), 0, ny - 1)
    gx = x0 + (ix + 0.5) * h
    gy = y0 + (iy + 0.5) * h
    return float(np.min(np.hypot(points.real - gx, points.imag - gy)))


@dataclass(frozen=True, eq=False)
class LogField:
    """(1/n) log|L_n^(k)| sampled on a midpoint lattice over B_r.

    Values may be -inf at zeros and +inf at poles; the L2 statistic clips
    them at +-1e6/n and reports how many nodes were clipped.
    """

    values: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    r: float
    grid_step: float
    n: int
    k: int
    rotate: float = 0.0

    def nodes(self) -> np.ndarray:
        grid = self.xs[None, :] + 1j * self.ys[:, None]
        if self.rotate:
            grid = grid * np.exp(1j * self.rotate)
        return grid

    def to_csv(self, path, metadata: Optional[dict] = None) -> None:
        grid = self.nodes()
        with open(path, "w", newline="") as fh:
            for key, val in (metadata or {}).items():
                fh.write(f"# {key}={val}\n")
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "value"])
            for i in range(grid.shape[0]):
                for j in range(grid.shape[1]):
                    writer.writerow([repr(grid[i, j].real), repr(grid[i, j].imag),
                                     repr(float(self.values[i, j]))])


def log_field(roots: Sequence[complex], k: int, r: float, grid_step: float,
              rotate: float = 0.0) -> LogField:
    """Sample (1/n) log|L_n^(k)| on the midpoint lattice covering B_r; the
    optional rotation spins the lattice (used to check rotational symmetry)."""
    roots = np.asarray(roots, dtype=np.complex128)
    if not (r > 0 and grid_step > 0):
        raise ValidationError("r and grid_step must be positive")
    n = roots.size
    h = float(grid_step)
    m = max(1, math.ceil(2.0 * r / h))
    xs = -r + (np.arange(m) + 0.5) * h
    ys = xs.copy()
    grid = xs[None, :] + 1j * ys[:, None]
    if rotate:
        grid = grid * np.exp(1j * rotate)
    vals = log_abs_Lnk_at(roots, k, grid) / n
    return LogField(vals, xs, ys, float(r), h, n, int(k), float(rotate))


def l2_statistic_detail(field: LogField) -> Tuple[float, int]:
    """Grid-midpoint value of (1/n^2) integral over B_r of (log|L|)^2, with
    values clipped at +-1e6/n, plus the number of clipped nodes."""
    grid = field.nodes()
    mask = np.abs(grid) <= field.r
    vals = field.values[mask]
    limit = 1e6 / field.n
    clipped = int(np.sum(np.abs(vals) > limit))
    vals = np.clip(vals, -limit, limit)
    h = field.grid_step
    return float(np.sum(vals * vals) * h * h), clipped


def l2_statistic(field: LogField) -> float:
    return l2_statistic_detail(field)[0]
