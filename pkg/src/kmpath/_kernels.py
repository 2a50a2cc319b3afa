"""Hot loops: Euler-Maruyama stepping, bin accumulation, implicit time marching.

Each kernel exists twice: a numba version (``*_jit``) and a numpy version
(``*_np``). The module-level names without suffix point at whichever one
``KMPATH_DISABLE_JIT`` selects. Both versions perform the same floating
point operations in the same order wherever that is practical, so results
agree bit-for-bit for the simulator and the binning; the tridiagonal solve
differs only by rounding (LAPACK vs. an inline Thomas sweep).
"""
import numpy as np
from scipy.linalg import solve_banded

from ._jit import USE_JIT, njit

# failure codes reported by the simulator kernels
OK = 0
DIVERGED = 1
NEGATIVE_DIFFUSION = 2


# --------------------------------------------------------------------------
# Euler-Maruyama
# --------------------------------------------------------------------------

@njit
def _horner(c, x):
    out = c[c.size - 1]
    for j in range(c.size - 2, -1, -1):
        out = out * x + c[j]
    return out


@njit
def em_paths_jit(drift, diff2, x0, noise, dt, guard, hold):
    n_paths, n_steps = noise.shape
    out = np.empty((n_paths, n_steps + 1))
    status = np.zeros(n_paths, dtype=np.int64)
    fail_step = np.full(n_paths, -1, dtype=np.int64)
    sqdt = np.sqrt(dt)
    for p in range(n_paths):
        x = x0[p]
        out[p, 0] = x
        frozen = False
        for k in range(n_steps):
            if not frozen:
                s2 = _horner(diff2, x)
                if s2 < 0.0:
                    status[p] = NEGATIVE_DIFFUSION
                    fail_step[p] = k
                    break
                xn = x + _horner(drift, x) * dt + np.sqrt(s2) * sqdt * noise[p, k]
                if not (abs(xn) <= guard):
                    if hold:
                        frozen = True
                    else:
                        status[p] = DIVERGED
                        fail_step[p] = k + 1
                        out[p, k + 1] = xn
                        break
                else:
                    x = xn
            out[p, k + 1] = x
    return out, status, fail_step


def _horner_np(c, x):
    out = np.full_like(x, c[-1])
    for a in c[-2::-1]:
        out = out * x + a
    return out


def em_paths_np(drift, diff2, x0, noise, dt, guard, hold):
    n_paths, n_steps = noise.shape
    out = np.empty((n_paths, n_steps + 1))
    status = np.zeros(n_paths, dtype=np.int64)
    fail_step = np.full(n_paths, -1, dtype=np.int64)
    sqdt = np.sqrt(dt)
    x = np.array(x0, dtype=float)
    out[:, 0] = x
    live = np.ones(n_paths, dtype=bool)
    frozen = np.zeros(n_paths, dtype=bool)
    for k in range(n_steps):
        s2 = _horner_np(diff2, x)
        neg = live & ~frozen & (s2 < 0.0)
        if neg.any():
            status[neg] = NEGATIVE_DIFFUSION
            fail_step[neg] = k
            live &= ~neg
        with np.errstate(invalid="ignore", over="ignore"):
            xn = x + _horner_np(drift, x) * dt + np.sqrt(np.maximum(s2, 0.0)) * sqdt * noise[:, k]
        step = live & ~frozen
        bad = step & ~(np.abs(xn) <= guard)
        if bad.any():
            if hold:
                frozen |= bad
            else:
                status[bad] = DIVERGED
                fail_step[bad] = k + 1
                out[bad, k + 1] = xn[bad]
                live &= ~bad
        step &= ~bad
        x = np.where(step, xn, x)
        out[live, k + 1] = x[live]
        if not live.any():
            break
    return out, status, fail_step


# --------------------------------------------------------------------------
# coordinate binning
# --------------------------------------------------------------------------

@njit
def bin_sums_jit(x, dx, lo, hi, n_bins):
    counts = np.zeros(n_bins, dtype=np.int64)
    s1 = np.zeros(n_bins)
    s2 = np.zeros(n_bins)
    scale = n_bins / (hi - lo)
    for i in range(x.size):
        xi = x[i]
        if xi < lo or xi > hi:
            continue
        j = int(np.floor((xi - lo) * scale))
        if j >= n_bins:
            j = n_bins - 1
        counts[j] += 1
        s1[j] += dx[i]
        s2[j] += dx[i] * dx[i]
    return counts, s1, s2


def bin_sums_np(x, dx, lo, hi, n_bins):
    keep = (x >= lo) & (x <= hi)
    xk = x[keep]
    dk = dx[keep]
    j = np.floor((xk - lo) * (n_bins / (hi - lo))).astype(np.int64)
    np.minimum(j, n_bins - 1, out=j)
    counts = np.bincount(j, minlength=n_bins).astype(np.int64)
    s1 = np.bincount(j, weights=dk, minlength=n_bins)
    s2 = np.bincount(j, weights=dk * dk, minlength=n_bins)
    return counts, s1, s2


# --------------------------------------------------------------------------
# theta-scheme time marching for  W dp/dt = L p  with tridiagonal L
# --------------------------------------------------------------------------

@njit
def march_jit(lo, di, up, w, thetas, dt, p0, store_every):
    """``lo[i]``, ``di[i]``, ``up[i]`` are L[i, i-1], L[i, i], L[i, i+1]."""
    n = p0.size
    n_steps = thetas.size
    n_store = n_steps // store_every + 1
    out = np.empty((n_store, n))
    out[0] = p0
    p = p0.copy()
    rhs = np.empty(n)
    cp = np.empty(n)
    dp = np.empty(n)
    s = 1
    for k in range(n_steps):
        th = thetas[k]
        a_e = (1.0 - th) * dt
        a_i = th * dt
        for i in range(n):
            r = w[i] * p[i] + a_e * di[i] * p[i]
            if i > 0:
                r += a_e * lo[i] * p[i - 1]
            if i < n - 1:
                r += a_e * up[i] * p[i + 1]
            rhs[i] = r
        # Thomas sweep on (W - a_i L) p_new = rhs
        b0 = w[0] - a_i * di[0]
        cp[0] = (-a_i * up[0]) / b0
        dp[0] = rhs[0] / b0
        for i in range(1, n):
            a = -a_i * lo[i]
            b = w[i] - a_i * di[i]
            denom = b - a * cp[i - 1]
            cp[i] = (-a_i * up[i]) / denom if i < n - 1 else 0.0
            dp[i] = (rhs[i] - a * dp[i - 1]) / denom
        p[n - 1] = dp[n - 1]
        for i in range(n - 2, -1, -1):
            p[i] = dp[i] - cp[i] * p[i + 1]
        if (k + 1) % store_every == 0:
            out[s] = p
            s += 1
    return out


def march_np(lo, di, up, w, thetas, dt, p0, store_every):
    n = p0.size
    n_steps = thetas.size
    out = np.empty((n_steps // store_every + 1, n))
    out[0] = p0
    p = p0.copy()
    ab_cache = {}
    s = 1
    for k in range(n_steps):
        th = float(thetas[k])
        a_e = (1.0 - th) * dt
        rhs = w * p + a_e * di * p
        rhs[1:] += a_e * lo[1:] * p[:-1]
        rhs[:-1] += a_e * up[:-1] * p[1:]
        ab = ab_cache.get(th)
        if ab is None:
            a_i = th * dt
            ab = np.zeros((3, n))
            ab[0, 1:] = -a_i * up[:-1]
            ab[1] = w - a_i * di
            ab[2, :-1] = -a_i * lo[1:]
            ab_cache[th] = ab
        p = solve_banded((1, 1), ab, rhs, check_finite=False)
        if (k + 1) % store_every == 0:
            out[s] = p
            s += 1
    return out


if USE_JIT:
    em_paths = em_paths_jit
    bin_sums = bin_sums_jit
    march = march_jit
else:
    em_paths = em_paths_np
    bin_sums = bin_sums_np
    march = march_np
