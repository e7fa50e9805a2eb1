"""Lower-bound searches for restriction and Lambda constants of frequency sets.

Both searches maximize a scale-invariant norm ratio.  Candidates come from a
deterministic scan (deltas, characters, flat spectra), then seeded Gaussian
samples, then L-BFGS ascent on the log-ratio using the implicit gradient of
the gauge norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import InvalidInputError, PreconditionError
from .group import GroupDims, Signal, SiteSet, complex_normal, dft, idft
from .inequalities import InequalityReport, make_report
from .norms import MeasureSpec, lp_norm, luxemburg_norm
from .young import YoungFunction, conjugate, derivative_of, inverse, matuszewska, power, precedes

ASCENT_ITERS = 200
ASCENT_FTOL = 1e-10


@dataclass(frozen=True)
class RestrictionEstimate:
    S: SiteSet
    phi: YoungFunction
    psi: YoungFunction
    c_lower: float
    witness: Signal
    trials: int
    method: str  # DeltaScan, RandomSample, ProjectedAscent

    def to_dict(self) -> dict:
        return {"S": list(self.S.members), "phi": self.phi.label, "psi": self.psi.label,
                "c_lower": self.c_lower, "trials": self.trials, "method": self.method,
                "N": self.S.dims.N, "d": self.S.dims.d}


@dataclass(frozen=True)
class LambdaEstimate:
    S: SiteSet
    phi: YoungFunction
    k_lower: float
    witness: Signal
    restarts: int

    def to_dict(self) -> dict:
        return {"S": list(self.S.members), "phi": self.phi.label, "k_lower": self.k_lower,
                "restarts": self.restarts, "N": self.S.dims.N, "d": self.S.dims.d}


def _follows(a: YoungFunction, b: YoungFunction) -> bool:
    return precedes(a, b).relation in ("Precedes", "Equivalent")


def gauge_gradient(values: np.ndarray, phi: YoungFunction, w: float, k: float) -> np.ndarray:
    """Gradient of the gauge norm in the ``re + i im`` convention.

    Differentiates ``sum w Phi(|v|/k) = 1`` implicitly:
    ``dk/d|v_i| = k Phi'(|v_i|/k) / sum_j Phi'(|v_j|/k)|v_j|``.
    """
    a = np.abs(values)
    dphi = derivative_of(phi)
    with np.errstate(all="ignore"):
        slope = dphi(a / k)
        denom = float(np.sum(slope * a))
        unit = np.where(a > 0, values / np.where(a > 0, a, 1.0), 0.0)
    if not (denom > 0 and math.isfinite(denom)):
        return np.zeros_like(values)
    return k * slope / denom * unit


def _pack(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag])


def _unpack(x: np.ndarray) -> np.ndarray:
    n = x.size // 2
    return x[:n] + 1j * x[n:]


def _ascend(neg_log_ratio, z0: np.ndarray) -> np.ndarray:
    res = optimize.minimize(neg_log_ratio, _pack(z0), jac=True, method="L-BFGS-B",
                            options={"maxiter": ASCENT_ITERS, "ftol": ASCENT_FTOL, "gtol": 1e-12})
    return _unpack(res.x)


# ---------------------------------------------------------------------------
# restriction constant


def restriction_ratio(f: Signal, S: SiteSet, phi: YoungFunction, psi: YoungFunction) -> float:
    """``N^d ||fhat||_{Psi, mu_S} / ||f||_Phi`` with the counting measure on the group."""
    dims = f.dims
    den = luxemburg_norm(f, phi, MeasureSpec.full(dims)).value
    if den == 0:
        return 0.0
    num = luxemburg_norm(dft(f), psi, MeasureSpec.uniform(S)).value
    return dims.size * num / den


def _restriction_objective(S: SiteSet, phi, psi):
    dims = S.dims
    idx = S.array
    w_S = 1.0 / len(S)
    on_S, whole = MeasureSpec.uniform(S), MeasureSpec.full(dims)

    def fun(x):
        f = _unpack(x)
        if not np.any(f):
            return 0.0, np.zeros_like(x)
        F = np.fft.fftn(f.reshape(dims.shape)).ravel() / dims.size
        FS = F[idx]
        num = luxemburg_norm(F, psi, on_S).value
        den = luxemburg_norm(f, phi, whole).value
        if num == 0 or den == 0:
            return 0.0, np.zeros_like(x)
        g_num = np.zeros(dims.size, dtype=complex)
        g_num[idx] = gauge_gradient(FS, psi, w_S, num) / num
        # pull back through the forward transform: grad_f = idft(g) / N^d
        g_f = np.fft.ifftn(g_num.reshape(dims.shape)).ravel()
        g = g_f - gauge_gradient(f, phi, 1.0, den) / den
        return -(math.log(num) - math.log(den)), -_pack(g)
    return fun


def _check_restriction_hypotheses(phi, psi):
    if not _follows(power(1.0), phi):
        raise PreconditionError(f"x does not precede {phi.label}")
    if not _follows(phi, psi):
        raise PreconditionError(f"{phi.label} does not precede {psi.label}")


def _scan_candidates(S: SiteSet) -> list[Signal]:
    dims = S.dims
    out = []
    delta = np.zeros(dims.size, dtype=complex)
    delta[0] = 1.0
    # every delta has the same |fhat| = N^-d, so one represents all translates
    out.append(Signal(dims, delta))
    out.append(Signal(dims, np.ones(dims.size)))
    flat = np.zeros(dims.size, dtype=complex)
    flat[S.array] = 1.0
    out.append(idft(Signal(dims, flat)))
    for m in S.members[:64]:
        spike = np.zeros(dims.size, dtype=complex)
        spike[m] = 1.0
        out.append(idft(Signal(dims, spike)))
    return out


def estimate_restriction_constant(S: SiteSet, phi: YoungFunction, psi: YoungFunction,
                                  budget: int = 0, seed: int = 0) -> RestrictionEstimate:
    """Best ratio found; a lower bound on the restriction constant of ``S``.

    ``budget`` Gaussian samples are drawn, then ``ceil(budget / 10)`` ascent
    runs start from the best candidate and from fresh samples.
    """
    if len(S) == 0:
        raise InvalidInputError("S must be nonempty")
    if budget < 0:
        raise InvalidInputError("budget must be >= 0")
    _check_restriction_hypotheses(phi, psi)
    dims = S.dims
    best, best_f, method = -1.0, None, "DeltaScan"
    trials = 0
    for f in _scan_candidates(S):
        r = restriction_ratio(f, S, phi, psi)
        trials += 1
        if r > best:
            best, best_f = r, f
    if budget == 0:
        return RestrictionEstimate(S, phi, psi, best, best_f, trials, method)

    rng = np.random.default_rng(seed)
    for _ in range(budget):
        f = Signal(dims, complex_normal(rng, dims.size))
        r = restriction_ratio(f, S, phi, psi)
        trials += 1
        if r > best:
            best, best_f, method = r, f, "RandomSample"
    objective = _restriction_objective(S, phi, psi)
    starts = [best_f.values] + [complex_normal(rng, dims.size)
                                for _ in range(math.ceil(budget / 10) - 1)]
    for z0 in starts:
        z = _ascend(objective, np.asarray(z0, dtype=complex))
        f = Signal(dims, z)
        r = restriction_ratio(f, S, phi, psi)
        trials += 1
        if r > best:
            best, best_f, method = r, f, "ProjectedAscent"
    return RestrictionEstimate(S, phi, psi, best, best_f, trials, method)


# ---------------------------------------------------------------------------
# Lambda constant


def lambda_ratio(f: Signal, phi: YoungFunction) -> float:
    """``||f||_{Phi, mu} / ||f||_{2, mu}`` under the normalized measure on the group."""
    mu = MeasureSpec.full(f.dims, normalized=True)
    den = lp_norm(f, 2.0, mu)
    return luxemburg_norm(f, phi, mu).value / den if den > 0 else 0.0


def _check_lambda_hypotheses(phi: YoungFunction):
    if phi.family == "Power" and phi.params["p"] >= 2:
        return
    if matuszewska(phi).alpha_inf < 2 - 1e-6:
        raise PreconditionError(f"upper index of {phi.label} at infinity is below 2")


def _lambda_objective(S: SiteSet, phi):
    dims = S.dims
    idx = S.array
    w = 1.0 / dims.size
    mu = MeasureSpec.full(dims, normalized=True)

    def fun(x):
        a = _unpack(x)
        full = np.zeros(dims.size, dtype=complex)
        full[idx] = a
        f = np.fft.ifftn(full.reshape(dims.shape)).ravel() * dims.size
        num = luxemburg_norm(f, phi, mu).value
        den2 = float(np.sum(np.abs(a) ** 2))
        if num == 0 or den2 == 0:
            return 0.0, np.zeros_like(x)
        g_f = gauge_gradient(f, phi, w, num) / num
        # f = W^H a, so grad_a = W grad_f = N^d dft(grad_f)
        g_a = np.fft.fftn(g_f.reshape(dims.shape)).ravel()[idx]
        g = g_a - a / den2
        return -(math.log(num) - 0.5 * math.log(den2)), -_pack(g)
    return fun


def _spectral(S: SiteSet, coeffs: np.ndarray) -> Signal:
    full = np.zeros(S.dims.size, dtype=complex)
    full[S.array] = coeffs
    return idft(Signal(S.dims, full))


def estimate_lambda_constant(S: SiteSet, phi: YoungFunction, budget: int = 4,
                             seed: int = 0) -> LambdaEstimate:
    """Largest ``||f||_{Phi,mu} / ||f||_{2,mu}`` found over signals with spectrum in ``S``.

    Starts: the flat spectrum (a spike at the origin), then ``budget`` seeded
    Gaussian spectra; each start is refined by ascent.
    """
    if len(S) == 0:
        raise InvalidInputError("S must be nonempty")
    _check_lambda_hypotheses(phi)
    rng = np.random.default_rng(seed)
    starts = [np.ones(len(S), dtype=complex)]
    starts += [complex_normal(rng, len(S)) for _ in range(max(0, budget))]
    objective = _lambda_objective(S, phi)
    best, best_f = -1.0, None
    for z0 in starts:
        for coeffs in (z0, _ascend(objective, z0) if len(S) > 1 else z0):
            f = _spectral(S, coeffs)
            r = lambda_ratio(f, phi)
            if r > best:
                best, best_f = r, f
    return LambdaEstimate(S, phi, best, best_f, len(starts))


def sample_generic_set(dims: GroupDims, expected_size: float, seed: int = 0) -> SiteSet:
    """Independent Bernoulli inclusion with probability ``expected_size / N^d``."""
    if not 0 < expected_size <= dims.size:
        raise InvalidInputError("expected_size must lie in (0, N^d]")
    prob = expected_size / dims.size
    rng = np.random.default_rng(seed)
    return SiteSet.from_mask(dims, rng.random(dims.size) < prob)


def generic_size(dims: GroupDims, phi: YoungFunction) -> float:
    """``Phi^-1(N^d)^2``, capped at the group size."""
    return min(float(dims.size), float(inverse(phi, float(dims.size))) ** 2)


# ---------------------------------------------------------------------------
# from a Lambda bound to a restriction bound


@dataclass(frozen=True)
class LambdaRestrictionReport:
    worst_slack: float
    holds: bool
    stated_form_worst_slack: float
    stated_form_holds: bool
    constant_underestimated: bool
    reports: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"worst_slack": self.worst_slack, "holds": self.holds,
                "stated_form_worst_slack": self.stated_form_worst_slack,
                "stated_form_holds": self.stated_form_holds,
                "constant_underestimated": self.constant_underestimated,
                "reports": [r.to_dict() for r in self.reports]}


def lambda_to_restriction(S: SiteSet, phi: YoungFunction, lambda_K: float,
                          signals: list[Signal] | None = None, d_prime: float | None = None,
                          trials: int = 16, seed: int = 0) -> LambdaRestrictionReport:
    """``||fhat||_{2,mu_S} <= 2 K D' (Phi*)^-1(N^-d) |S|^-1/2 ||f||_{Phi*}`` for spectrum in ``S``.

    ``K`` is ``lambda_K`` raised to the signal's own Lambda ratio when that is
    larger (flagged as an underestimate); ``D'`` likewise takes the signal's own
    counting-to-normalized ratio.  The same bound without the Hoelder factor 2
    is evaluated alongside as ``stated_rhs``.
    """
    if len(S) == 0:
        raise InvalidInputError("S must be nonempty")
    if not _follows(power(2.0), phi):
        raise PreconditionError(f"x^2 does not precede {phi.label}")
    dims = S.dims
    conj = conjugate(phi)
    if signals is None:
        rng = np.random.default_rng(seed)
        signals = [_spectral(S, np.ones(len(S)))]
        signals += [_spectral(S, complex_normal(rng, len(S))) for _ in range(trials)]
    inv_conj = float(inverse(conj, 1.0 / dims.size))
    full_norm = MeasureSpec.full(dims, normalized=True)
    reports, under = [], False
    for i, f in enumerate(signals):
        lhs = lp_norm(dft(f), 2.0, MeasureSpec.uniform(S))
        own_K = lambda_ratio(f, phi)
        counting = luxemburg_norm(f, conj, MeasureSpec.full(dims)).value
        normalized = luxemburg_norm(f, conj, full_norm).value
        own_D = normalized / (inv_conj * counting) if counting > 0 else 0.0
        K = max(lambda_K, own_K)
        D = max(d_prime if d_prime is not None else own_D, own_D)
        under |= own_K > lambda_K * (1 + 1e-9)
        base = inv_conj * len(S) ** -0.5 * counting
        rep = make_report("LAMBDA_TO_RESTRICTION", lhs, 2 * K * D * base, f"signal={i}",
                          details={"K_used": K, "own_K": own_K, "D_used": D, "own_D": own_D,
                                   "stated_rhs": lambda_K * D * base})
        reports.append(rep)
    worst = min(r.slack / max(1.0, r.rhs) for r in reports)
    stated_slacks = [r.details["stated_rhs"] - r.lhs for r in reports]
    stated_worst = min(s / max(1.0, r.details["stated_rhs"]) for s, r in zip(stated_slacks, reports))
    return LambdaRestrictionReport(
        worst_slack=worst, holds=all(r.holds for r in reports),
        stated_form_worst_slack=stated_worst,
        stated_form_holds=all(s >= -1e-9 * max(1.0, r.details["stated_rhs"])
                             for s, r in zip(stated_slacks, reports)),
        constant_underestimated=under, reports=reports)
