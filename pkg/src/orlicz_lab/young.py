"""Young functions as values, and the scalar calculus performed on them.

A :class:`YoungFunction` wraps a vectorized evaluator together with whatever
closed forms are known for it (inverse, derivative, convex conjugate).  Every
operation falls back to a numerical route when a closed form is missing, so
derived functions (conjugates, the ``theta`` construction, compositions) behave
exactly like the built-in families.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np
from scipy import integrate

from ._numerics import golden_max, increasing_inverse, log_grid
from .errors import (DomainError, InvalidInputError, PreconditionError,
                     UnboundedInverseError)

DEFAULT_CAP = 1e12
# relative growth allowed between the last two quarters of a grid before a
# ratio is called unbounded
TAIL_GROWTH_TOL = 1e-3

ArrayMap = Callable[[np.ndarray], np.ndarray]


def _fmt(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)


@dataclass(frozen=True, eq=False)
class YoungFunction:
    """A convex nondecreasing map on ``[0, inf)`` with ``Phi(0) = 0``.

    ``evaluator``, ``inverse_fn`` and ``derivative`` act elementwise on float
    arrays.  ``conjugate_factory`` builds the closed-form conjugate when one is
    known.  Arguments beyond ``domain_cap`` evaluate to ``inf``.
    """

    family: str
    params: Mapping[str, float]
    evaluator: ArrayMap
    label: str
    inverse_fn: ArrayMap | None = None
    derivative: ArrayMap | None = None
    conjugate_factory: Callable[[], "YoungFunction"] | None = None
    domain_cap: float = DEFAULT_CAP
    nice: bool = True
    base: "YoungFunction | None" = field(default=None, repr=False)
    # (c, q) when the function is exactly c * x**q; q = inf marks the
    # indicator of [0, 1] (conjugate of x)
    power_law: tuple[float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def __call__(self, x):
        return evaluate(self, x)

    def __repr__(self) -> str:
        return f"YoungFunction({self.label})"

    def raw(self, x: np.ndarray) -> np.ndarray:
        """Unchecked vectorized evaluation for hot loops (``x >= 0`` assumed)."""
        with np.errstate(all="ignore"):
            out = self.evaluator(np.minimum(x, self.domain_cap))
        if self.domain_cap < np.inf:
            out = np.where(x > self.domain_cap, np.inf, out)
        return out


@dataclass(frozen=True)
class MonotoneMap:
    """Increasing scalar map with a numerical inverse."""

    forward: ArrayMap
    backward: ArrayMap
    label: str

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self.forward(arr)
        return float(out) if arr.ndim == 0 else out

    def inverse(self, y):
        arr = np.asarray(y, dtype=float)
        out = self.backward(arr)
        return float(out) if arr.ndim == 0 else out


@dataclass(frozen=True)
class IndexEstimate:
    alpha_a: float
    beta_a: float
    alpha_inf: float
    beta_inf: float
    grid: tuple
    residual: float


@dataclass(frozen=True)
class GrowthComparison:
    relation: str  # Precedes, Succeeds, Equivalent, Incomparable
    witness_K: float
    witness_x0: float
    grid: tuple
    violation_x: float | None = None


# ---------------------------------------------------------------------------
# evaluation and inverse

def _as_out(x, arr):
    return float(arr) if np.ndim(x) == 0 else arr


def evaluate(phi: YoungFunction, x):
    """``Phi(x)``; ``inf`` past the domain cap."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"{phi.label} evaluated at a negative or NaN argument")
    return _as_out(x, phi.raw(arr))


def inverse(phi: YoungFunction, y):
    """Generalized inverse ``inf{x >= 0 : Phi(x) >= y}`` (relative accuracy 1e-12)."""
    arr = np.asarray(y, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"inverse of {phi.label} at a negative or NaN value")
    out = _raw_inverse(phi, arr)
    if np.any(np.isinf(out) & np.isfinite(arr)):
        bad = arr[np.isinf(out) & np.isfinite(arr)].ravel()[0]
        raise UnboundedInverseError(f"{phi.label} never reaches {bad:g} below its domain cap")
    return _as_out(y, out)


def _raw_inverse(phi: YoungFunction, arr: np.ndarray) -> np.ndarray:
    if phi.inverse_fn is not None:
        with np.errstate(all="ignore"):
            out = np.asarray(phi.inverse_fn(arr), dtype=float)
        return np.where(arr == 0, 0.0, out)
    return increasing_inverse(phi.raw, arr, cap=phi.domain_cap)


# ---------------------------------------------------------------------------
# built-in families

def power(p: float) -> YoungFunction:
    """``x**p`` for ``p >= 1``."""
    p = float(p)
    if p < 1:
        raise InvalidInputError("power exponent must be >= 1")
    deriv = (lambda x: np.ones_like(x)) if p == 1 else (lambda x: p * x ** (p - 1))
    return YoungFunction(
        family="Power", params={"p": p}, label=f"power(p={_fmt(p)})",
        evaluator=lambda x: x ** p,
        inverse_fn=lambda y: y ** (1.0 / p),
        derivative=deriv,
        conjugate_factory=lambda: _power_conjugate(p),
        nice=p > 1, power_law=(1.0, p),
    )


def _power_conjugate(p: float) -> YoungFunction:
    label = f"conjugate(power(p={_fmt(p)}))"
    if p == 1:
        # indicator of [0, 1]: 0 up to 1, infinite beyond
        return YoungFunction(
            family="Composed", params={"p": 1.0}, label=label,
            evaluator=lambda y: np.where(y <= 1.0, 0.0, np.inf),
            inverse_fn=lambda t: np.where(t > 0, 1.0, 0.0),
            derivative=lambda y: np.where(y < 1.0, 0.0, np.inf),
            conjugate_factory=lambda: power(1.0), nice=False,
            power_law=(1.0, math.inf),
        )
    q = p / (p - 1.0)
    return YoungFunction(
        family="Composed", params={"p": p}, label=label,
        evaluator=lambda y: (p - 1.0) * (y / p) ** q,
        inverse_fn=lambda t: p * (t / (p - 1.0)) ** (1.0 / q),
        derivative=lambda y: (y / p) ** (1.0 / (p - 1.0)),
        conjugate_factory=lambda: power(p),
        power_law=((p - 1.0) * p ** -q, q),
    )


def power_log(p: float, alpha: float) -> YoungFunction:
    """``x**p * log(x + 1)**alpha`` with the natural logarithm."""
    p, alpha = float(p), float(alpha)
    if p < 1 or alpha < 0:
        raise InvalidInputError("powerlog needs p >= 1 and alpha >= 0")

    def ev(x):
        return x ** p * np.log1p(x) ** alpha

    def deriv(x):
        L = np.log1p(x)
        with np.errstate(all="ignore"):
            d = p * x ** (p - 1) * L ** alpha + alpha * x ** p * L ** (alpha - 1) / (1 + x)
        return np.where(x > 0, d, 0.0)

    return YoungFunction(family="PowerLog", params={"p": p, "alpha": alpha},
                         label=f"powerlog(p={_fmt(p)},alpha={_fmt(alpha)})",
                         evaluator=ev, derivative=deriv)


def limonova(alpha: float) -> YoungFunction:
    """``x**2 ln^a(e + x) / ln^a(e + 1/x)``, extended by 0 at the origin."""
    a = float(alpha)

    def ev(x):
        with np.errstate(all="ignore"):
            v = x ** 2 * np.log(math.e + x) ** a / np.log(math.e + 1.0 / x) ** a
        return np.where(x > 0, v, 0.0)

    def deriv(x):
        with np.errstate(all="ignore"):
            A = np.log(math.e + x)
            B = np.log(math.e + 1.0 / x)
            d = (2 * x * A ** a * B ** -a
                 + a * x ** 2 * A ** (a - 1) * B ** -a / (math.e + x)
                 + a * A ** a * B ** (-a - 1) / (math.e + 1.0 / x))
        return np.where(x > 0, d, 0.0)

    return YoungFunction(family="Limonova", params={"alpha": a},
                         label=f"limonova(alpha={_fmt(a)})", evaluator=ev, derivative=deriv)


def _burstein_x0(alpha: float) -> float:
    # smallest x0 >= e where x^2 log^a x is increasing and convex
    x = math.e
    while True:
        L = math.log(x)
        d1 = 2 * x * L ** alpha + alpha * x * L ** (alpha - 1)
        d2 = 2 * L ** alpha + 3 * alpha * L ** (alpha - 1) + alpha * (alpha - 1) * L ** (alpha - 2)
        if d1 > 0 and d2 > 0:
            return x
        x *= 1.01


def burstein(alpha: float) -> YoungFunction:
    """``x**2 log^a x`` beyond ``x0``, glued continuously to ``c x**2`` below."""
    a = float(alpha)
    x0 = _burstein_x0(a)
    c = math.log(x0) ** a

    def ev(x):
        with np.errstate(all="ignore"):
            tail = x ** 2 * np.log(x) ** a
        return np.where(x >= x0, tail, c * x ** 2)

    def deriv(x):
        with np.errstate(all="ignore"):
            L = np.log(x)
            tail = 2 * x * L ** a + a * x * L ** (a - 1)
        return np.where(x >= x0, tail, 2 * c * x)

    return YoungFunction(family="Burstein", params={"alpha": a, "x0": x0, "c": c},
                         label=f"burstein(alpha={_fmt(a)})", evaluator=ev, derivative=deriv)


def tabulated(xs, ys, label: str = "tabulated", nice: bool = False) -> YoungFunction:
    """Piecewise-linear interpolant of convex samples; ``inf`` past the last node."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs[0] != 0 or ys[0] != 0 or np.any(np.diff(xs) <= 0):
        raise InvalidInputError("tabulated nodes must start at (0, 0) and increase")
    slopes = np.diff(ys) / np.diff(xs)
    if np.any(np.diff(slopes) < -1e-12 * np.maximum(1, np.abs(slopes[1:]))):
        raise InvalidInputError("tabulated samples are not convex")

    def deriv(x):
        idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(slopes) - 1)
        return slopes[idx]

    return YoungFunction(family="Tabulated", params={"nodes": float(len(xs))}, label=label,
                         evaluator=lambda x: np.interp(x, xs, ys), derivative=deriv,
                         domain_cap=float(xs[-1]), nice=nice)


def exp_growth(xmax: float = 60.0, n: int = 4001) -> YoungFunction:
    """Tabulated ``e^x - 1 - x``, a Young function outside Delta-2."""
    xs = np.linspace(0.0, xmax, n)
    return tabulated(xs, np.expm1(xs) - xs, label=f"expgrowth(xmax={_fmt(xmax)})", nice=True)


def scaled(phi: YoungFunction, c: float) -> YoungFunction:
    """``c * Phi``; its conjugate is ``c * Psi(y / c)``."""
    c = float(c)
    if c <= 0:
        raise InvalidInputError("scale must be positive")
    inv = None
    if phi.inverse_fn is not None:
        inv = lambda y: phi.inverse_fn(y / c)
    deriv = None if phi.derivative is None else (lambda x: c * phi.derivative(x))

    def conj():
        psi = conjugate(phi)
        return YoungFunction(
            family="Composed", params={"c": c}, label=f"conjugate({label})",
            evaluator=lambda y: c * psi.raw(y / c),
            inverse_fn=lambda t: c * _raw_inverse(psi, t / c),
            derivative=None if psi.derivative is None else (lambda y: psi.derivative(y / c)),
            conjugate_factory=lambda: out, nice=psi.nice,
            power_law=None if psi.power_law is None or math.isinf(psi.power_law[1])
            else (c * psi.power_law[0] * c ** -psi.power_law[1], psi.power_law[1]))

    label = f"scaled(c={_fmt(c)},{phi.label})"
    out = YoungFunction(family="Composed", params={"c": c}, label=label,
                        evaluator=lambda x: c * phi.evaluator(x), inverse_fn=inv,
                        derivative=deriv, conjugate_factory=conj,
                        domain_cap=phi.domain_cap, nice=phi.nice, base=phi,
                        power_law=None if phi.power_law is None
                        else (c * phi.power_law[0], phi.power_law[1]))
    return out


# ---------------------------------------------------------------------------
# conjugate

def conjugate(phi: YoungFunction, method: str = "auto") -> YoungFunction:
    """Complementary Young function ``Psi(y) = sup_x (x y - Phi(x))``.

    ``method`` is ``"auto"`` (closed form when known), ``"derivative"`` (solve
    ``Phi'(x) = y``) or ``"golden"`` (golden-section maximization).
    """
    if method == "auto" and phi.conjugate_factory is not None:
        return phi.conjugate_factory()
    use_derivative = method in ("auto", "derivative") and phi.derivative is not None
    if method == "derivative" and phi.derivative is None:
        raise InvalidInputError(f"{phi.label} has no derivative")
    solve = _argmax_by_derivative(phi) if use_derivative else _argmax_by_golden(phi)
    last: dict = {}

    def argmax(y):
        # value and slope are usually requested back to back at the same point
        y = np.asarray(y, dtype=float)
        key = (y.shape, y.tobytes())
        if last.get("key") != key:
            last["x"] = solve(y)
            last["key"] = key
        return last["x"]

    def ev(y):
        x = argmax(y)
        with np.errstate(all="ignore"):
            val = x * y - phi.raw(x)
        val = np.where(np.isinf(x), np.inf, np.maximum(val, 0.0))
        return np.where(y == 0, 0.0, val)

    inv = _conjugate_inverse(phi) if use_derivative else None
    return YoungFunction(family="Composed", params={}, label=f"conjugate({phi.label})",
                         evaluator=ev, derivative=argmax, inverse_fn=inv,
                         conjugate_factory=lambda: phi, domain_cap=np.inf,
                         nice=phi.nice, base=phi)


def _conjugate_inverse(phi: YoungFunction) -> ArrayMap:
    # Along the curve y = phi'(x) the conjugate equals x phi'(x) - Phi(x), which
    # is increasing in x, so one scalar inversion replaces a nested one.  Writing
    # y = (t + Phi(x)) / x also covers flat pieces where phi' jumps.
    dphi = phi.derivative

    def gain(x):
        with np.errstate(all="ignore"):
            return x * dphi(x) - phi.raw(x)

    def inv(t):
        t = np.asarray(t, dtype=float)
        x = increasing_inverse(gain, t, cap=phi.domain_cap)
        with np.errstate(all="ignore"):
            y = (t + phi.raw(x)) / x
        return np.where(t > 0, y, 0.0)
    return inv


def _argmax_by_derivative(phi: YoungFunction) -> ArrayMap:
    def argmax(y):
        x = increasing_inverse(phi.derivative, y, cap=phi.domain_cap)
        if phi.domain_cap < np.inf:
            x = np.where(np.isinf(x), phi.domain_cap, x)
        return x
    return argmax


def _argmax_by_golden(phi: YoungFunction) -> ArrayMap:
    cap = phi.domain_cap

    def argmax(y):
        y = np.asarray(y, dtype=float)
        b = np.maximum(1.0, y)
        with np.errstate(all="ignore"):
            g = lambda x: x * y - phi.raw(x)
            for _ in range(200):
                grow = (g(2 * b) >= g(b)) & (2 * b <= cap)
                if not grow.any():
                    break
                b = np.where(grow, 2 * b, b)
            runaway = (g(2 * b) >= g(b)) & (2 * b > cap) & ~np.isfinite(cap)
            x, best = golden_max(g, np.zeros_like(b), np.minimum(2 * b, cap))
            probes = np.linspace(0.0, 1.0, 17)[:, None] * np.minimum(2 * b, cap)[None, :]
            worst = np.max(g(probes) - best[None, :], axis=0)
        if np.any(worst > 1e-9 * np.maximum(1.0, np.abs(best))):
            raise InvalidInputError(f"conjugate of {phi.label}: maximization failed to localize")
        return np.where(runaway, np.inf, x)

    def vec(y):
        y = np.asarray(y, dtype=float)
        return argmax(y.ravel()).reshape(y.shape)
    return vec


# ---------------------------------------------------------------------------
# derived constructions

def _grid_for(phi: YoungFunction, lo: float = 1e-8, hi: float = 1e8, per_decade: int = 4):
    return log_grid(lo, min(hi, phi.domain_cap), per_decade)


def theta_from(phi: YoungFunction, numeric: bool = False) -> YoungFunction:
    """Young function ``Theta`` with ``Theta^{-1}(x) = x^{-1/2} Phi^{-1}(x)``."""
    p = phi.params.get("p")
    if phi.family == "Power" and not numeric and p < 2:
        return power(1.0 / (1.0 / p - 0.5))
    top = float(phi.raw(np.array([phi.domain_cap]))[0]) if phi.domain_cap < np.inf else 1e300

    def h(x):
        with np.errstate(all="ignore"):
            v = _raw_inverse(phi, x) / np.sqrt(x)
        return np.where(x > 0, v, 0.0)

    grid = log_grid(1e-8, min(1e8, top), 4)
    vals = h(grid)
    drop = np.flatnonzero(np.diff(vals) < -1e-12 * np.abs(vals[1:]))
    if drop.size:
        raise PreconditionError(
            f"x^(-1/2) Phi^(-1)(x) decreases near x={grid[drop[0] + 1]:g} for {phi.label}")
    if vals[-1] <= vals[0] * (1 + 1e-9):
        raise PreconditionError(
            f"x^(-1/2) Phi^(-1)(x) is constant from x={grid[0]:g} for {phi.label}; Theta degenerates")
    return YoungFunction(family="Composed", params={}, label=f"theta({phi.label})",
                         evaluator=lambda t: increasing_inverse(h, t, cap=top),
                         inverse_fn=h, domain_cap=np.inf, base=phi)


def _midpoint_convex(ev: ArrayMap, grid: np.ndarray) -> np.ndarray:
    a, b = grid[:-2], grid[2:]
    m = 0.5 * (a + b)
    fa, fb, fm = ev(a), ev(b), ev(m)
    tol = 1e-12 * np.maximum(1.0, fb)
    return np.flatnonzero(fm > 0.5 * (fa + fb) + tol)


def sqrt_compose(phi: YoungFunction, numeric: bool = False) -> YoungFunction:
    """``Psi(x) = Phi(sqrt(x))``; requires ``Phi`` to dominate ``x**2``."""
    if phi.family == "Power" and not numeric:
        p = phi.params["p"]
        if p < 2:
            raise PreconditionError(f"{phi.label} grows slower than x^2")
        return power(p / 2.0)
    ev = lambda x: phi.raw(np.sqrt(x))
    grid = log_grid(1e-6, min(1e12, phi.domain_cap ** 2), 4)
    bad = _midpoint_convex(ev, grid)
    if bad.size:
        raise PreconditionError(f"Phi(sqrt x) is not convex near x={grid[bad[0] + 1]:g}")
    if precedes(power(2.0), phi).relation not in ("Precedes", "Equivalent"):
        raise PreconditionError(f"{phi.label} does not dominate x^2")
    inv = None if phi.inverse_fn is None else (lambda y: phi.inverse_fn(y) ** 2)
    deriv = None
    if phi.derivative is not None:
        def deriv(x):
            s = np.sqrt(x)
            with np.errstate(all="ignore"):
                d = phi.derivative(s) / (2 * s)
            return np.where(x > 0, d, 0.0)
    return YoungFunction(family="Composed", params={}, label=f"sqrtcompose({phi.label})",
                         evaluator=ev, inverse_fn=inv, derivative=deriv,
                         domain_cap=phi.domain_cap ** 2, base=phi)


def recovery_psi(phi: YoungFunction, gate_margin: float = 0.25) -> MonotoneMap:
    """The map ``x -> x^{1/2} Phi^{-1}(1/x)`` and its inverse.

    Requires the upper Matuszewska-Orlicz index at infinity to exceed 2; the
    finite-grid estimate must clear ``2 + gate_margin``.
    """
    est = matuszewska(phi)
    if not est.alpha_inf > 2 + gate_margin:
        raise PreconditionError(
            f"alpha_inf estimate {est.alpha_inf:.4g} of {phi.label} does not exceed 2")

    def fwd(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = np.sqrt(x) * _raw_inverse(phi, 1.0 / x)
        return np.where(x > 0, v, 0.0)

    grid = log_grid(1e-8, 1e8, 4)
    vals = fwd(grid)
    drop = np.flatnonzero(np.diff(vals) <= 0)
    if drop.size:
        raise PreconditionError(f"x^(1/2) Phi^(-1)(1/x) is not increasing near x={grid[drop[0] + 1]:g}")
    return MonotoneMap(forward=fwd, backward=lambda y: increasing_inverse(fwd, y),
                       label=f"recoverypsi({phi.label})")


# ---------------------------------------------------------------------------
# growth comparisons and indices

def _tail_bounded(r: np.ndarray) -> bool:
    n = len(r)
    q3, q4 = r[n // 2: 3 * n // 4], r[3 * n // 4:]
    if not np.all(np.isfinite(q4)):
        return False
    return bool(np.max(q4) <= np.max(q3) * (1 + TAIL_GROWTH_TOL))


def _dominance(phi1, phi2, grid):
    with np.errstate(all="ignore"):
        a, b = phi1.raw(grid), phi2.raw(grid)
        r = np.where(b > 0, a / b, np.where(a > 0, np.inf, 0.0))
    n = len(grid)
    if not _tail_bounded(r):
        q4 = r[3 * n // 4:]
        return False, math.inf, math.nan, float(grid[3 * n // 4 + int(np.argmax(q4))])
    ok = r <= 1.0 + 1e-12
    tail_ok = np.flip(np.cumprod(np.flip(ok)).astype(bool))
    if tail_ok[3 * n // 4]:
        i = int(np.argmax(tail_ok))
        return True, 1.0, float(grid[i]), None
    K = float(np.max(r[n // 2:]))
    return True, K, float(grid[n // 2]), None


def precedes(phi1: YoungFunction, phi2: YoungFunction, grid=None) -> GrowthComparison:
    """Decide ``Phi1 < Phi2`` (eventual domination up to a constant) on a log grid."""
    if grid is None:
        grid = log_grid(1e-3, min(phi1.domain_cap, phi2.domain_cap, 1e10), 8)
    grid = np.asarray(grid, dtype=float)
    fwd = _dominance(phi1, phi2, grid)
    bwd = _dominance(phi2, phi1, grid)
    g = tuple(grid.tolist())
    if fwd[0] and bwd[0]:
        return GrowthComparison("Equivalent", fwd[1], fwd[2], g)
    if fwd[0]:
        return GrowthComparison("Precedes", fwd[1], fwd[2], g)
    if bwd[0]:
        return GrowthComparison("Succeeds", bwd[1], bwd[2], g, violation_x=fwd[3])
    return GrowthComparison("Incomparable", math.inf, math.nan, g, violation_x=fwd[3])


def delta2_nabla2(phi: YoungFunction, x0: float = 1.0, K2_max: float = 1e6) -> dict:
    """Grid tests for the Delta-2 and nabla-2 growth conditions beyond ``x0``."""
    grid = log_grid(x0, min(1e10, phi.domain_cap), 8)
    with np.errstate(all="ignore"):
        base = phi.raw(grid)
        ratio = phi.raw(2 * grid) / base
    report: dict = {"x0": x0}
    if _tail_bounded(ratio):
        report.update(in_delta2=True, K1=float(np.max(ratio)))
    else:
        report.update(in_delta2=False, K1=math.inf,
                      delta2_trend=[float(v) for v in ratio[-4:]])

    def margin(K):
        with np.errstate(all="ignore"):
            return float(np.min(phi.raw(K * grid) / (K * base)))

    if not margin(K2_max) >= 2.0:
        report.update(in_nabla2=False, K2=math.inf, nabla2_trend=margin(K2_max))
        return report
    lo, hi = 1.0, K2_max
    for _ in range(200):
        if hi <= lo * (1 + 1e-14):
            break
        mid = math.sqrt(lo * hi)
        if margin(mid) >= 2.0:
            hi = mid
        else:
            lo = mid
    report.update(in_nabla2=True, K2=hi)
    return report


def matuszewska(phi: YoungFunction) -> IndexEstimate:
    """Grid estimates of the four Matuszewska-Orlicz indices."""
    xs = log_grid(1e-8, min(1e9, phi.domain_cap / 1e3), 8)
    t_small = log_grid(1e-3, 1e-1, 4)[::-1]
    t_large = log_grid(10.0, 1e3, 4)
    tail = xs[3 * len(xs) // 4:]
    with np.errstate(all="ignore"):
        base_all, base_tail = phi.raw(xs), phi.raw(tail)

        def ratio_curves(ts):
            ma = np.array([np.max(phi.raw(t * xs) / base_all) for t in ts])
            mi = np.array([np.max(phi.raw(t * tail) / base_tail) for t in ts])
            return np.log(ma) / np.log(ts), np.log(mi) / np.log(ts)

        a_small, i_small = ratio_curves(t_small)
        a_large, i_large = ratio_curves(t_large)
    curves = [a_small, a_large, i_small, i_large]
    limits = [float(c[-1]) for c in curves]
    residual = max(float(np.max(np.abs(c[-3:] - c[-1]))) if np.all(np.isfinite(c)) else math.inf
                   for c in curves)
    return IndexEstimate(alpha_a=limits[0], beta_a=limits[1], alpha_inf=limits[2],
                         beta_inf=limits[3], grid=tuple(np.concatenate([t_small, t_large]).tolist()),
                         residual=residual)


def derivative_of(phi: YoungFunction) -> ArrayMap:
    """Analytic derivative when known, otherwise a central finite difference."""
    if phi.derivative is not None:
        return phi.derivative

    def fd(x):
        h = 1e-6 * np.maximum(x, 1e-6)
        return (phi.raw(x + h) - phi.raw(np.maximum(x - h, 0.0))) / (x + h - np.maximum(x - h, 0.0))
    return fd


def bak_constants(phi: YoungFunction, r: float = 1.0, c: float = 2.0,
                  u_max: float = 1e8) -> dict:
    """Constants ``C0, C1`` of the interpolation hypotheses and ``C = max(2, r C0 C1)``.

    The derivative is truncated to vanish on ``[0, 1]`` when it does not already
    (reported as ``surrogate_used``).  Unbounded grid trends are reported as
    hypothesis failures rather than raised.
    """
    dphi = derivative_of(phi)
    probe = np.concatenate([np.linspace(0.0, 1.0, 11)[1:-1], [1.0 - 1e-9]])
    surrogate = bool(np.any(dphi(probe) > 1e-12))

    def phi_t(t):
        t = np.asarray(t, dtype=float)
        return np.where(t > 1.0, dphi(t), 0.0)

    u = log_grid(1.0, min(u_max, phi.domain_cap), 8)[1:]
    edges = np.concatenate([[1.0], u])
    pieces = [integrate.quad(lambda t: float(phi_t(np.array([t]))[0]) * t ** -r, a, b,
                             limit=200, epsabs=0.0, epsrel=1e-12)[0]
              for a, b in zip(edges[:-1], edges[1:])]
    integral = np.cumsum(pieces)
    with np.errstate(all="ignore"):
        ratio0 = integral / (phi_t(u) * u ** (1 - r))
    report = {"r": r, "c": c, "surrogate_used": surrogate, "hypothesis_ok": True, "failures": []}
    if _tail_bounded(ratio0):
        report["C0"] = float(np.max(ratio0))
    else:
        report["C0"] = math.inf
        report["hypothesis_ok"] = False
        report["failures"].append({"condition": "C0", "trend": [float(v) for v in ratio0[-4:]]})

    lam = log_grid(1.0, 1e4, 8)[1:]
    ts = log_grid(c, 1e4, 8)
    L, T = np.meshgrid(lam, ts, indexing="ij")
    with np.errstate(all="ignore"):
        ratio1 = phi_t(L) * phi_t(T) / phi_t(L * T)
    row_max = np.max(ratio1, axis=1)
    if _tail_bounded(row_max) and _tail_bounded(np.max(ratio1, axis=0)):
        report["C1"] = float(np.max(ratio1))
    else:
        report["C1"] = math.inf
        report["hypothesis_ok"] = False
        report["failures"].append({"condition": "C1", "trend": [float(v) for v in row_max[-4:]]})
    report["C"] = max(2.0, r * report["C0"] * report["C1"])
    return report


# ---------------------------------------------------------------------------
# text form

_FAMILY_BUILDERS = {
    "power": (power, ("p",)),
    "powerlog": (power_log, ("p", "alpha")),
    "limonova": (limonova, ("alpha",)),
    "burstein": (burstein, ("alpha",)),
    "expgrowth": (exp_growth, ("xmax",)),
}

_CALL = re.compile(r"^\s*([a-z]+)\s*\((.*)\)\s*$", re.S)


def _split_args(body: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return [s.strip() for s in parts]


def parse_young(text: str) -> YoungFunction:
    """Parse the declarative form, e.g. ``powerlog(p=2,alpha=1)`` or ``conjugate(power(p=3))``."""
    m = _CALL.match(text)
    if not m:
        raise InvalidInputError(f"cannot parse Young function {text!r}")
    name, body = m.group(1), m.group(2)
    args = _split_args(body)
    if name == "conjugate":
        return conjugate(parse_young(body))
    if name == "scaled":
        key, val = args[0].split("=")
        if key.strip() != "c" or len(args) != 2:
            raise InvalidInputError(f"bad scaled form {text!r}")
        return scaled(parse_young(args[1]), float(val))
    if name not in _FAMILY_BUILDERS:
        raise InvalidInputError(f"unknown Young family {name!r}")
    builder, keys = _FAMILY_BUILDERS[name]
    kwargs = {}
    for a in args:
        key, _, val = a.partition("=")
        kwargs[key.strip()] = float(val)
    if set(kwargs) != set(keys):
        raise InvalidInputError(f"{name} expects parameters {keys}, got {tuple(kwargs)}")
    return builder(**kwargs)


def to_text(phi: YoungFunction) -> str:
    return phi.label
