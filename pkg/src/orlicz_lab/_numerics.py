"""Small vectorized root-finding and optimization helpers shared across modules."""

from __future__ import annotations

import math

import numpy as np

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def log_grid(lo: float, hi: float, per_decade: int = 8) -> np.ndarray:
    """Log-spaced grid that hits every power of ten between ``lo`` and ``hi``."""
    a, b = math.log10(lo), math.log10(hi)
    n = int(round((b - a) * per_decade)) + 1
    return np.logspace(a, b, max(n, 2))


def fsum(values) -> float:
    """Compensated sum; keeps modular evaluations accurate at the 1e-12 level."""
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size and not np.all(np.isfinite(arr)):
        return float(np.sum(arr))
    return math.fsum(arr)


def increasing_inverse(h, t, cap: float = np.inf, rtol: float = 1e-13,
                       max_iter: int = 200) -> np.ndarray:
    """Generalized inverse ``inf{x >= 0 : h(x) >= t}`` of a nondecreasing map.

    ``h`` must accept and return arrays. Targets that ``h`` never reaches below
    ``cap`` map to ``inf``; targets reached already at ``x = 0`` map to 0.
    """
    t = np.asarray(t, dtype=float)
    shape = t.shape
    t = t.ravel()
    out = np.full(t.shape, np.nan)
    with np.errstate(all="ignore"):
        h0 = np.asarray(h(np.zeros(1)), dtype=float)[0]
    if not np.isfinite(h0):
        h0 = 0.0
    out[t <= h0] = 0.0
    todo = np.flatnonzero(np.isnan(out))
    if todo.size == 0:
        return out.reshape(shape)
    tt = t[todo]
    hi = np.ones_like(tt)
    with np.errstate(all="ignore"):
        for _ in range(80):
            short = h(hi) < tt
            if not short.any():
                break
            hi = np.where(short, np.minimum(hi * 16.0, cap), hi)
            if np.all(hi[short] >= cap):
                break
        reach = h(hi) >= tt
        lo = hi / 16.0
        for _ in range(80):
            big = reach & (h(lo) >= tt)
            if not big.any():
                break
            hi = np.where(big, lo, hi)
            lo = np.where(big, lo / 16.0, lo)
        # Illinois false position on (log x, log h) with periodic bisection;
        # power-like maps are nearly linear there, so few steps are needed
        logt = np.log(tt)
        ulo, uhi = np.log(lo), np.log(hi)
        vlo = np.log(h(lo)) - logt
        vhi = np.log(h(hi)) - logt
        last = np.zeros(tt.shape, dtype=int)
        width = math.log1p(rtol)
        for it in range(max_iter):
            active = reach & (uhi - ulo > width)
            if not active.any():
                break
            bis = (it % 4 == 3) | ~np.isfinite(vlo) | ~np.isfinite(vhi) | (vhi <= vlo)
            cand = ulo - vlo * (uhi - ulo) / (vhi - vlo)
            ok = ~bis & (cand > ulo) & (cand < uhi)
            mid = np.where(ok, cand, 0.5 * (ulo + uhi))
            hm = h(np.exp(mid))
            vm = np.log(hm) - logt
            up = active & (hm >= tt)
            down = active & ~up
            vlo = np.where(up & (last == 1), 0.5 * vlo, vlo)
            vhi = np.where(down & (last == -1), 0.5 * vhi, vhi)
            uhi = np.where(up, mid, uhi)
            vhi = np.where(up, vm, vhi)
            ulo = np.where(down, mid, ulo)
            vlo = np.where(down, vm, vlo)
            # landing on the target to working precision ends the search
            hit = active & (np.abs(vm) < 1e-14)
            uhi = np.where(hit, mid, uhi)
            ulo = np.where(hit, mid - width, ulo)
            last = np.where(up, 1, np.where(down, -1, last))
        hi = np.exp(uhi)
    res = np.where(reach, hi, np.inf)
    out[todo] = res
    return out.reshape(shape)


def golden_max(g, a, b, iters: int = 90):
    """Vectorized golden-section maximization of a unimodal ``g`` on ``[a, b]``.

    Returns ``(argmax, max)`` arrays.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        left = gc >= gd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        d_new = np.where(left, c, a + INVPHI * (b - a))
        c_new = np.where(left, b - INVPHI * (b - a), d)
        g_new = g(np.where(left, c_new, d_new))
        gc, gd = np.where(left, g_new, gd), np.where(left, gc, g_new)
        c, d = c_new, d_new
    x = np.where(gc >= gd, c, d)
    return x, np.maximum(gc, gd)


def golden_min_scalar(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 300):
    """Scalar golden-section minimization; returns ``(xmin, fmin, iterations)``."""
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while abs(b - a) > tol * max(1.0, abs(a) + abs(b)) and it < max_iter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
        it += 1
    if fc <= fd:
        return c, fc, it
    return d, fd, it
