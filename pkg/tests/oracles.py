"""Independent reference implementations used only by the tests."""

import math

import numpy as np
from scipy import optimize


def naive_dft(values, N, d, sign=-1):
    """Direct double sum over coordinates, scaled by N^-d for the forward sign."""
    coords = np.array(np.unravel_index(np.arange(N ** d), (N,) * d)).T
    phase = (coords @ coords.T) % N
    kernel = np.exp(sign * 2j * np.pi * phase / N)
    out = kernel @ np.asarray(values, dtype=complex)
    return out / N ** d if sign < 0 else out


def legendre(phi_scalar, y, x_hi=None):
    """sup_x (x y - phi(x)) by a dense grid followed by bounded refinement."""
    x_hi = x_hi or max(10.0, 10.0 * y) + 10.0
    xs = np.linspace(0.0, x_hi, 20001)
    vals = xs * y - np.array([phi_scalar(x) for x in xs])
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    res = optimize.minimize_scalar(lambda x: -(x * y - phi_scalar(x)), bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-14})
    return max(vals[i], -res.fun)


def luxemburg_bisect(a, phi_scalar, w=1.0, iters=200):
    """inf{k : sum w phi(a/k) <= 1} by plain bisection."""
    a = np.abs(np.asarray(a))
    if not np.any(a):
        return 0.0
    lo, hi = 0.0, 1.0
    while sum(w * phi_scalar(v / hi) for v in a) > 1:
        hi *= 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if sum(w * phi_scalar(v / mid) for v in a) > 1:
            lo = mid
        else:
            hi = mid
    return hi


def amemiya_power_closed_form(a, p, w=1.0):
    """Orlicz norm of |a| for Phi = x^p: p (p-1)^(1/p-1) (sum w a^p)^(1/p)."""
    A = float(np.sum(w * np.abs(a) ** p))
    return p * (p - 1) ** (1 / p - 1) * A ** (1 / p)


def l1_min_socp(dims, S_members, observed):
    """min sum |u| subject to the observed Fourier coefficients (cvxpy SOCP)."""
    import cvxpy as cp

    n = dims.size
    kept = np.setdiff1d(np.arange(n), np.asarray(S_members, dtype=int))
    coords = dims.coords()
    A = np.exp(-2j * np.pi * ((coords[kept] @ coords.T) % dims.N) / dims.N) / n
    u = cp.Variable(n, complex=True)
    prob = cp.Problem(cp.Minimize(cp.sum(cp.abs(u))), [A @ u == observed])
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return prob.value, u.value


def min_l1_by_enumeration(dims, S_members, observed, max_support=2):
    """Best L1 value over supports of size <= max_support that reproduce the data exactly.

    Only an upper bound on the true minimum in general; exact when the minimizer is
    that sparse.
    """
    import itertools

    n = dims.size
    kept = np.setdiff1d(np.arange(n), np.asarray(S_members, dtype=int))
    coords = dims.coords()
    A = np.exp(-2j * np.pi * ((coords[kept] @ coords.T) % dims.N) / dims.N) / n
    best = math.inf
    for k in range(1, max_support + 1):
        for T in itertools.combinations(range(n), k):
            sol, *_ = np.linalg.lstsq(A[:, T], observed, rcond=None)
            if np.max(np.abs(A[:, T] @ sol - observed)) <= 1e-10 * max(1, np.max(np.abs(observed))):
                best = min(best, float(np.sum(np.abs(sol))))
    return best
