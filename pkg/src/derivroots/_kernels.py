"""Numba kernels for extended-range polynomial arithmetic.

Coefficients are carried as ``mantissa * 2**exponent`` with a complex128
mantissa normalized to |m| in [0.5, 1) (or exactly 0) and an int64 exponent.
This keeps product trees, Horner evaluation, and the simultaneous root
iteration well-defined for coefficient profiles spanning thousands of
binary orders of magnitude, which plain doubles cannot represent once the
degree reaches the low thousands.
"""

import math

import numpy as np
from numba import njit, prange

# contributions this far below the running scale are dropped (2**DROP
# underflows to zero anyway); renormalize accumulators past 2**+-RENORM
_DROP = -1100
_RENORM = 512
_LN2 = math.log(2.0)


@njit(cache=True)
def _ldexp_c(z, e):
    return complex(math.ldexp(z.real, e), math.ldexp(z.imag, e))


@njit(cache=True)
def _normalize(z, e):
    """Rescale (z, e) so |z| lands in [0.5, 1); zero keeps exponent 0."""
    a = abs(z)
    if a == 0.0:
        return 0.0 + 0.0j, np.int64(0)
    _, ex = math.frexp(a)
    return _ldexp_c(z, -ex), np.int64(e + ex)


@njit(cache=True)
def conv_scaled(am, ae, bm, be):
    """Convolution of two scaled coefficient arrays."""
    la = am.shape[0]
    lb = bm.shape[0]
    lc = la + lb - 1
    cm = np.zeros(lc, dtype=np.complex128)
    ce = np.zeros(lc, dtype=np.int64)
    for kk in range(lc):
        i0 = kk - lb + 1
        if i0 < 0:
            i0 = 0
        i1 = kk if kk < la - 1 else la - 1
        emax = np.int64(-(1 << 62))
        found = False
        for i in range(i0, i1 + 1):
            j = kk - i
            if am[i] != 0 and bm[j] != 0:
                e = ae[i] + be[j]
                if e > emax:
                    emax = e
                found = True
        if not found:
            continue
        s = 0.0 + 0.0j
        for i in range(i0, i1 + 1):
            j = kk - i
            if am[i] != 0 and bm[j] != 0:
                d = int(ae[i] + be[j] - emax)
                if d > _DROP:
                    s += _ldexp_c(am[i] * bm[j], d)
        cm[kk], ce[kk] = _normalize(s, emax)
    return cm, ce


@njit(cache=True)
def derivative_scaled(cm, ce, k):
    """k-fold derivative; the factorial ratio (j+k)!/j! is built as a running
    product with its own exponent so it never overflows."""
    deg = cm.shape[0] - 1
    nd = deg - k + 1
    om = np.zeros(nd, dtype=np.complex128)
    oe = np.zeros(nd, dtype=np.int64)
    for j in range(nd):
        rm = 1.0
        re = np.int64(0)
        for i in range(1, k + 1):
            rm *= j + i
            _, ex = math.frexp(rm)
            if ex > _RENORM:
                rm = math.ldexp(rm, -ex)
                re += ex
        m, e = _normalize(cm[j + k] * rm, ce[j + k] + re)
        om[j] = m
        oe[j] = e
    return om, oe


@njit(cache=True)
def horner_scaled(cm, ce, w):
    """Evaluate p, p', and the running magnitude sum at w.

    Returns (p, dp, s, e): value ~ p * 2**e, derivative ~ dp * 2**e and
    scale ~ s * 2**e share one exponent, so ratios of any two need no
    exponent arithmetic at all.
    """
    deg = cm.shape[0] - 1
    aw = abs(w)
    acc = 0.0 + 0.0j
    dacc = 0.0 + 0.0j
    sacc = 0.0
    e = np.int64(0)
    for j in range(deg, -1, -1):
        dacc = dacc * w + acc
        acc = acc * w
        sacc = sacc * aw
        if cm[j] != 0:
            d = int(ce[j] - e)
            if d > 0:
                # incoming coefficient dominates: rescale the accumulators
                acc = _ldexp_c(acc, -d)
                dacc = _ldexp_c(dacc, -d)
                sacc = math.ldexp(sacc, -d)
                e = ce[j]
                acc += cm[j]
                sacc += abs(cm[j])
            elif d > _DROP:
                t = _ldexp_c(cm[j], d)
                acc += t
                sacc += abs(t)
        m = abs(acc)
        if sacc > m:
            m = sacc
        md = abs(dacc)
        if md > m:
            m = md
        if m > 0.0:
            _, ex = math.frexp(m)
            if ex > _RENORM or ex < -_RENORM:
                acc = _ldexp_c(acc, -ex)
                dacc = _ldexp_c(dacc, -ex)
                sacc = math.ldexp(sacc, -ex)
                e += ex
    return acc, dacc, sacc, e


@njit(cache=True)
def eval_log_scaled(cm, ce, w):
    """log|p(w)| and arg p(w) from the scaled Horner evaluation."""
    acc, _, _, e = horner_scaled(cm, ce, w)
    if acc == 0:
        return -np.inf, 0.0
    return math.log(abs(acc)) + e * _LN2, math.atan2(acc.imag, acc.real)


@njit(cache=True, parallel=True)
def residuals_scaled(cm, ce, w):
    """Backward-error style residuals |p(w_i)| / scale(p, w_i)."""
    m = w.shape[0]
    out = np.empty(m)
    for i in prange(m):
        p, _, s, _ = horner_scaled(cm, ce, w[i])
        out[i] = abs(p) / s if s > 0.0 else 0.0
    return out


@njit(cache=True, parallel=True)
def aberth_iterate(cm, ce, w, max_iter, tol):
    """Jacobi-style Aberth-Ehrlich sweeps on the scaled polynomial.

    All updates in one sweep read the previous sweep's iterates, so results
    are bit-identical for any thread count.  Returns (w, residuals,
    sweeps_used, converged).
    """
    m = w.shape[0]
    resid = np.empty(m)
    corr = np.empty(m, dtype=np.complex128)
    sweeps = 0
    for it in range(max_iter):
        for i in prange(m):
            p, dp, s, _ = horner_scaled(cm, ce, w[i])
            resid[i] = abs(p) / s if s > 0.0 else 0.0
            if p == 0:
                corr[i] = 0.0 + 0.0j
                continue
            ssum = 0.0 + 0.0j
            for j in range(m):
                if j != i:
                    dz = w[i] - w[j]
                    if dz != 0:
                        ssum += 1.0 / dz
            if dp == 0:
                corr[i] = 0.0 + 0.0j
                continue
            nratio = p / dp
            den = 1.0 - nratio * ssum
            step = nratio if den == 0 else nratio / den
            # keep moves bounded; protects against near-singular denominators
            limit = 1.0 + abs(w[i])
            astep = abs(step)
            if astep > limit:
                step *= limit / astep
            corr[i] = step
        done = True
        for i in range(m):
            if resid[i] > tol:
                done = False
                break
        if done:
            return w, resid, sweeps, True
        for i in range(m):
            w[i] = w[i] - corr[i]
        sweeps = it + 1
    for i in prange(m):
        p, _, s, _ = horner_scaled(cm, ce, w[i])
        resid[i] = abs(p) / s if s > 0.0 else 0.0
    ok = True
    for i in range(m):
        if resid[i] > tol:
            ok = False
            break
    return w, resid, sweeps, ok


@njit(cache=True, parallel=True)
def newton_polish(cm, ce, w, steps):
    m = w.shape[0]
    for i in prange(m):
        x = w[i]
        for _ in range(steps):
            p, dp, _, _ = horner_scaled(cm, ce, x)
            if p == 0 or dp == 0:
                break
            x = x - p / dp
        w[i] = x
    return w
