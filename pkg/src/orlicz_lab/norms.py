"""Luxemburg and Orlicz norms over counting or normalized measures on site sets.

``luxemburg_norm`` is the gauge norm ``inf{k : sum_A w Phi(|f|/k) <= 1}``.
The Orlicz (dual) norm is computed two independent ways: the one-dimensional
Amemiya minimization (production path) and a direct constrained maximization
over the conjugate modular ball (small-instance oracle).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import optimize

from ._numerics import fsum, golden_min_scalar
from .errors import InvalidInputError, OracleScopeError
from .group import GroupDims, Signal, SiteSet
from .young import YoungFunction, _raw_inverse, conjugate, inverse

DUAL_SUP_CAP = 64


@dataclass(frozen=True)
class MeasureSpec:
    base: SiteSet
    normalized: bool = False

    @classmethod
    def counting(cls, sites: SiteSet) -> "MeasureSpec":
        return cls(sites, False)

    @classmethod
    def uniform(cls, sites: SiteSet) -> "MeasureSpec":
        """Normalized measure ``counting / |A|``."""
        return cls(sites, True)

    @classmethod
    def full(cls, dims: GroupDims, normalized: bool = False) -> "MeasureSpec":
        return cls(SiteSet.full(dims), normalized)

    @property
    def weight(self) -> float:
        return 1.0 / len(self.base) if self.normalized else 1.0


@dataclass(frozen=True)
class NormReport:
    value: float
    method: str  # Bisection, Amemiya, DualSup, ClosedForm
    modular_at_value: float
    iterations: int

    def to_dict(self) -> dict:
        return asdict(self)

    def __float__(self) -> float:
        return self.value


def _values(f) -> np.ndarray:
    return f.values if isinstance(f, Signal) else np.asarray(f)


def _magnitudes(f, mu: MeasureSpec) -> np.ndarray:
    if len(mu.base) == 0:
        raise InvalidInputError("measure base set is empty")
    v = _values(f).ravel()
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("non-finite signal entries")
    return np.abs(v[mu.base.array])


def _default_mu(f, mu):
    if mu is not None:
        return mu
    if not isinstance(f, Signal):
        raise InvalidInputError("pass a MeasureSpec for raw arrays")
    return MeasureSpec.full(f.dims)


def modular(a: np.ndarray, phi: YoungFunction, w: float, k: float) -> float:
    return w * fsum(phi.raw(a / k))


# ---------------------------------------------------------------------------
# gauge norm

def luxemburg_norm(f, phi: YoungFunction, mu: MeasureSpec | None = None,
                   method: str = "auto", target: float = 1.0,
                   rtol: float = 1e-12, max_iter: int = 200) -> NormReport:
    """Gauge norm ``inf{k > 0 : sum_A w Phi(|f|/k) <= target}``.

    Exact power laws ``c x**q`` use the closed form unless ``method="bisection"``.
    """
    mu = _default_mu(f, mu)
    a = _magnitudes(f, mu)
    w = mu.weight
    M = float(a.max()) if a.size else 0.0
    if M == 0.0:
        return NormReport(0.0, "ClosedForm", 0.0, 0)
    if method == "auto" and phi.power_law is not None:
        c, q = phi.power_law
        if math.isinf(q):
            return NormReport(M, "ClosedForm", 0.0, 0)
        # scale by M first to avoid overflow in a**q
        val = M * (c * w * fsum((a / M) ** q) / target) ** (1.0 / q)
        return NormReport(val, "ClosedForm", modular(a, phi, w, val), 0)
    return _gauge_by_root(a, phi, w, target, rtol, max_iter)


def _gauge_by_root(a, phi, w, target, rtol, max_iter) -> NormReport:
    M = float(a.max())
    n_pos = int(np.count_nonzero(a))
    # w Phi(M/k) <= modular(k) <= n w Phi(M/k) brackets the root
    lo = M / float(_raw_inverse(phi, np.array([target / w]))[0])
    hi = M / float(_raw_inverse(phi, np.array([target / (n_pos * w)]))[0])
    if not (np.isfinite(lo) and lo > 0):
        lo = M * 1e-300 ** 0.5
    if not np.isfinite(hi):
        hi = M * 1e150
    lo, hi = lo * (1 - 1e-6), hi * (1 + 1e-6)
    F = lambda s: min(modular(a, phi, w, math.exp(s)), 1e300) - target
    slo, shi = math.log(lo), math.log(hi)
    for _ in range(100):
        if F(slo) >= 0:
            break
        slo -= 1.0
    for _ in range(100):
        if F(shi) <= 0:
            break
        shi += 1.0
    if F(shi) == 0:
        k = math.exp(shi)
        return NormReport(k, "Bisection", modular(a, phi, w, k), 0)
    if phi.derivative is not None:
        s, iters = _safeguarded_newton(a, phi, w, target, slo, shi, max_iter)
    else:
        s, res = optimize.brentq(F, slo, shi, xtol=1e-15, rtol=max(rtol / 10, 1e-15),
                                 maxiter=max_iter, full_output=True, disp=False)
        iters = res.iterations
    # the gauge is the smallest feasible k: step up until the modular is below target
    k = math.exp(s)
    m = modular(a, phi, w, k)
    if m > target * (1 + 1e-12):
        k_up = k * (1 + rtol)
        if modular(a, phi, w, k_up) <= target * (1 + 1e-12):
            k = k_up
            m = modular(a, phi, w, k)
    return NormReport(k, "Bisection", m, iters)


def _safeguarded_newton(a, phi, w, target, slo, shi, max_iter):
    """Root of ``modular(e^s) = target`` in ``s``, Newton steps kept inside the bracket."""
    s = 0.5 * (slo + shi)
    for it in range(1, max_iter + 1):
        u = a * math.exp(-s)
        with np.errstate(all="ignore"):
            F = min(w * fsum(phi.raw(u)), 1e300) - target
            slope = -w * fsum(phi.derivative(u) * u)
        if F == 0:
            return s, it
        if F > 0:
            slo = s
        else:
            shi = s
        step = F / slope if slope < 0 and math.isfinite(slope) else math.nan
        nxt = s - step
        if not (slo < nxt < shi):
            nxt = 0.5 * (slo + shi)
        if abs(nxt - s) <= 1e-15 * max(1.0, abs(s)) or shi - slo <= 1e-15 * max(1.0, abs(s)):
            return nxt, it
        s = nxt
    return s, max_iter


def j_phi(f, phi: YoungFunction, dims: GroupDims | None = None) -> float:
    """``inf{k : N^-d sum Phi(|f|/k) <= Phi(1)}``."""
    dims = dims or f.dims
    mu = MeasureSpec.full(dims, normalized=True)
    return luxemburg_norm(f, phi, mu, target=float(phi(1.0))).value


# ---------------------------------------------------------------------------
# Orlicz norm

def orlicz_norm_amemiya(f, phi: YoungFunction, mu: MeasureSpec | None = None,
                        method: str = "auto") -> NormReport:
    """``inf_{k>0} (1 + sum_A w Phi(k|f|)) / k`` by golden section in ``log k``."""
    mu = _default_mu(f, mu)
    a = _magnitudes(f, mu)
    w = mu.weight
    M = float(a.max()) if a.size else 0.0
    if M == 0.0:
        return NormReport(0.0, "ClosedForm", 0.0, 0)
    if method == "auto" and phi.power_law is not None:
        c, q = phi.power_law
        if math.isinf(q):
            return NormReport(M, "ClosedForm", 0.0, 0)
        S = w * fsum((a / M) ** q)
        if q == 1:
            return NormReport(c * S * M, "ClosedForm", 0.0, 0)
        val = M * q / (q - 1) * (c * (q - 1) * S) ** (1 / q)
        return NormReport(val, "ClosedForm", 0.0, 0)
    u = a / M
    obj = lambda s: (1.0 + w * fsum(phi.raw(math.exp(s) * u))) * math.exp(-s)
    s0 = -math.log(_gauge_by_root(u, phi, w, 1.0, 1e-10, 200).value)
    lo, hi = s0 - 1.0, s0 + 2.0
    for _ in range(60):
        if obj(lo) > obj(s0):
            break
        lo -= 1.0
    for _ in range(60):
        if obj(hi) > obj(s0):
            break
        hi += 1.0
    s, val, it = golden_min_scalar(obj, lo, hi, tol=1e-13)
    return NormReport(val * M, "Amemiya", w * fsum(phi.raw(math.exp(s) * u)), it)


def _radial_scale(u: np.ndarray, psi: YoungFunction, w: float) -> float:
    """Largest ``t`` with ``sum w Psi(t u) <= 1`` for a nonnegative direction ``u``."""
    F = lambda t: min(w * fsum(psi.raw(t * u)), 1e300) - 1.0
    lo, hi = 0.0, 1.0
    while F(hi) < 0:
        lo, hi = hi, hi * 2
    while lo == 0.0 and F(hi / 2) >= 0:
        hi /= 2
    lo = lo or hi / 2
    t = optimize.brentq(F, lo, hi, xtol=1e-16, rtol=1e-15)
    while F(t) > 0:
        t *= 1 - 1e-15
    return t


def orlicz_norm_dual_sup(f, phi: YoungFunction, mu: MeasureSpec | None = None,
                         restarts: int = 20, seed: int = 0, cap: int = DUAL_SUP_CAP,
                         seeds: list | None = None) -> NormReport:
    """Direct maximization of ``sum_A w |f| g`` over ``{g >= 0 : sum_A w Psi(g) <= 1}``.

    Each start is a random feasible point (plus the uniform-on-support point and
    any caller-supplied ``seeds``); SLSQP ascends from it and the endpoint is
    radially projected back onto the modular ball, so every candidate is
    feasible and the returned value is a lower bound on the norm.
    """
    mu = _default_mu(f, mu)
    if len(mu.base) > cap:
        raise OracleScopeError(f"dual-sup oracle limited to {cap} sites, got {len(mu.base)}")
    a = _magnitudes(f, mu)
    w = mu.weight
    M = float(a.max()) if a.size else 0.0
    if M == 0.0:
        return NormReport(0.0, "ClosedForm", 0.0, 0)
    u = a / M
    n = u.size
    psi = conjugate(phi)
    gmax = float(inverse(psi, 1.0 / w))
    dpsi = psi.derivative
    rng = np.random.default_rng(seed)

    starts = []
    on = (u > 0).astype(float)
    starts.append(on)
    for s in seeds or []:
        starts.append(np.abs(np.asarray(s, dtype=float)))
    for _ in range(restarts):
        starts.append(rng.random(n))

    cons = {"type": "ineq", "fun": lambda g: 1.0 - w * fsum(psi.raw(g))}
    if dpsi is not None:
        cons["jac"] = lambda g: -w * dpsi(g)
    best, best_g, total_it = -1.0, None, 0
    for g0 in starts:
        if not np.any(g0 > 0):
            continue
        g0 = g0 * _radial_scale(g0, psi, w)
        res = optimize.minimize(lambda g: -w * float(u @ g), g0, jac=lambda g: -w * u,
                                bounds=[(0.0, gmax)] * n, constraints=[cons],
                                method="SLSQP", options={"ftol": 1e-15, "maxiter": 500})
        total_it += int(res.nit)
        g = np.clip(res.x, 0.0, gmax)
        if w * fsum(psi.raw(g)) > 1.0:
            g = g * _radial_scale(g, psi, w)
        val = w * float(u @ g)
        if val > best:
            best, best_g = val, g
    return NormReport(best * M, "DualSup", w * fsum(psi.raw(best_g)), total_it)


def indicator_orlicz_norm(E: SiteSet, phi: YoungFunction, dims: GroupDims | None = None) -> float:
    """Orlicz norm of ``1_E`` under the normalized measure on the whole group."""
    dims = dims or E.dims
    if len(E) == 0:
        raise InvalidInputError("E must be nonempty")
    ratio = dims.size / len(E)
    return float(inverse(conjugate(phi), ratio)) / ratio


# ---------------------------------------------------------------------------
# plain Lebesgue quantities

def lp_norm(f, p: float, mu: MeasureSpec | None = None) -> float:
    mu = _default_mu(f, mu)
    a = _magnitudes(f, mu)
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    M = float(a.max()) if a.size else 0.0
    if M == 0:
        return 0.0
    return M * (mu.weight * fsum((a / M) ** p)) ** (1.0 / p)
