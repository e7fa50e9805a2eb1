"""Recovering a sparse signal from a spectrum with erased frequencies.

``basis_pursuit`` finds the minimum-L1 signal that matches the observed
frequencies.  It runs Douglas-Rachford splitting between the complex
soft-threshold (prox of ``sum |u|``) and the exact projection onto the affine
set ``{u : dft(u) = observed off S}``, then polishes by least squares on the
detected support.  Certificates predict success from support sizes alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, PreconditionError
from .group import GroupDims, Signal, SiteSet, complex_normal, dft, idft, support
from .restriction import _check_lambda_hypotheses
from .young import YoungFunction, delta2_nabla2, inverse, power, precedes, recovery_psi

SUCCESS_TOL = 1e-6
SUPPORT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class RecoveryProblem:
    dims: GroupDims
    S: SiteSet
    observed: np.ndarray  # spectrum on the complement of S, in index order
    truth: Signal | None = None

    def __post_init__(self):
        obs = np.asarray(self.observed, dtype=complex).ravel()
        if obs.size != self.dims.size - len(self.S):
            raise InvalidInputError(f"expected {self.dims.size - len(self.S)} observed values, got {obs.size}")
        object.__setattr__(self, "observed", obs)
        if self.truth is not None:
            ref = dft(self.truth).values[self.kept.array]
            if not np.allclose(ref, obs, rtol=0, atol=1e-12 * max(1.0, float(np.max(np.abs(obs), initial=0)))):
                raise InvalidInputError("observed values disagree with dft(truth) off S")

    @property
    def kept(self) -> SiteSet:
        return self.S.complement()

    @classmethod
    def from_truth(cls, truth: Signal, S: SiteSet) -> "RecoveryProblem":
        kept = S.complement()
        return cls(truth.dims, S, dft(truth).values[kept.array], truth)

    @classmethod
    def from_spectrum(cls, spectrum: Signal, S: SiteSet) -> "RecoveryProblem":
        """Drop the erased frequencies from a full spectrum."""
        return cls(spectrum.dims, S, spectrum.values[S.complement().array])


@dataclass(frozen=True)
class Certificate:
    name: str
    predicted_success: bool
    margin: float
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RecoveryResult:
    recovered: Signal
    objective: float
    solver_iters: int
    residual: float
    converged: bool
    success: bool | None = None
    certificates: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"objective": self.objective, "solver_iters": self.solver_iters,
                "residual": self.residual, "converged": self.converged, "success": self.success,
                "certificates": [{"name": c.name, "predicted_success": c.predicted_success,
                                  "margin": c.margin, **c.details} for c in self.certificates]}


# ---------------------------------------------------------------------------
# solver


def _project(z: np.ndarray, dims: GroupDims, kept: np.ndarray, obs: np.ndarray) -> np.ndarray:
    Z = np.fft.fftn(z.reshape(dims.shape)).ravel() / dims.size
    Z[kept] = obs
    return np.fft.ifftn(Z.reshape(dims.shape)).ravel() * dims.size


def _shrink(z: np.ndarray, t: float) -> np.ndarray:
    mag = np.abs(z)
    scale = np.where(mag > t, 1.0 - t / np.where(mag > 0, mag, 1.0), 0.0)
    return z * scale


def residual(u: np.ndarray, problem: RecoveryProblem) -> float:
    U = np.fft.fftn(u.reshape(problem.dims.shape)).ravel() / problem.dims.size
    return float(np.max(np.abs(U[problem.kept.array] - problem.observed), initial=0.0))


def _polish(x: np.ndarray, problem: RecoveryProblem) -> np.ndarray | None:
    """Least-squares fit of the constraints on the support of ``x``; None if inconsistent."""
    dims = problem.dims
    mag = np.abs(x)
    if mag.max() == 0:
        return None
    T = np.flatnonzero(mag > 1e-7 * mag.max())
    kept = problem.kept.array
    if T.size > kept.size:
        return None
    coords = dims.coords()
    phase = (coords[kept] @ coords[T].T) % dims.N
    A = np.exp(-2j * np.pi * phase / dims.N) / dims.size
    sol, *_ = np.linalg.lstsq(A, problem.observed, rcond=None)
    u = np.zeros(dims.size, dtype=complex)
    u[T] = sol
    return u


def basis_pursuit(problem: RecoveryProblem, step: float = 1.0, max_iter: int = 50000,
                  tol: float = 1e-10, init: np.ndarray | None = None) -> RecoveryResult:
    """Minimize ``sum |u(x)|`` subject to ``dft(u) = observed`` off ``S``.

    ``step`` is the prox parameter relative to the scale of the minimum-energy
    solution.  A result that hits ``max_iter`` has ``converged=False``.
    """
    dims = problem.dims
    kept = problem.kept.array
    if kept.size == 0:
        raise InvalidInputError("no frequencies observed")
    obs = problem.observed
    base = _project(np.zeros(dims.size, dtype=complex), dims, kept, obs)
    scale = float(np.max(np.abs(base)))
    if scale == 0.0:
        zero = Signal(dims, np.zeros(dims.size))
        return _finalize(problem, zero, 0, True)
    if len(problem.S) == 0:
        return _finalize(problem, Signal(dims, base), 1, True)
    obs_s = obs / scale
    z = (np.asarray(init, dtype=complex) / scale) if init is not None else base / scale
    x = _project(z, dims, kept, obs_s)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        y = _shrink(2 * x - z, step)
        z = z + y - x
        x_new = _project(z, dims, kept, obs_s)
        change = np.max(np.abs(x_new - x))
        x = x_new
        if change <= tol * max(1.0, float(np.max(np.abs(x)))) and np.max(np.abs(y - x)) <= 1e3 * tol:
            converged = True
            break
    x = x * scale
    candidate = _polish(x, problem)
    if candidate is not None and residual(candidate, problem) <= 1e-9 * max(1.0, float(np.max(np.abs(obs)))) \
            and np.sum(np.abs(candidate)) <= np.sum(np.abs(x)) * (1 + 1e-8):
        x = candidate
    else:
        x = _project(x, dims, kept, obs)
    return _finalize(problem, Signal(dims, x), it, converged)


def _finalize(problem, recovered: Signal, iters: int, converged: bool) -> RecoveryResult:
    success = None
    if problem.truth is not None:
        t = problem.truth.values
        norm = float(np.linalg.norm(t))
        err = float(np.linalg.norm(recovered.values - t))
        success = bool(err <= SUCCESS_TOL * norm) if norm > 0 else bool(err <= SUCCESS_TOL)
    return RecoveryResult(recovered=recovered, objective=float(np.sum(recovered.abs())),
                          solver_iters=iters, residual=residual(recovered.values, problem),
                          converged=converged, success=success)


# ---------------------------------------------------------------------------
# certificates


def _truth_support_size(problem: RecoveryProblem) -> int:
    if problem.truth is None:
        raise InvalidInputError("certificate needs the true signal")
    return len(support(problem.truth, SUPPORT_TOL))


def certificate_classical(problem: RecoveryProblem) -> Certificate:
    """``|E| |S| < N^d / 2``."""
    nE = _truth_support_size(problem)
    half = problem.dims.size / 2
    margin = half - nE * len(problem.S)
    return Certificate("classical", bool(margin > 0), float(margin))


def recovery_restriction_bound(nS: int, total: int, phi: YoungFunction, C: float) -> float:
    """Largest admissible ``|E|``: ``n^3 Phi^-1(|S|/n)^2 / (4 C^2 |S|^3)``.

    ``C`` bounds ``||hhat||_{2,mu_S}`` by ``C n^-1 ||h||_Phi`` for ``h`` with
    spectrum in ``S``.
    """
    return total ** 3 * float(inverse(phi, nS / total)) ** 2 / (4 * C ** 2 * nS ** 3)


def recovery_restriction_stated_bound(nS: int, total: int, phi: YoungFunction, C: float) -> float:
    """The same bound with ``n^4`` in the numerator."""
    return total * recovery_restriction_bound(nS, total, phi, C)


def recovery_restriction_power_form(nE, nS, total, p, C):
    """``|E| |S|^((3p-2)/p) <= n^((4p-2)/p) / (4 C^2)``; same ratio as the ``n^4`` bound."""
    return nE * nS ** ((3 * p - 2) / p), total ** ((4 * p - 2) / p) / (4 * C ** 2)


def certified_l2_restriction_constant(dims: GroupDims, phi: YoungFunction) -> float:
    """``n Phi^-1(1/n)``: a valid ``C`` for every ``S``.

    From ``||hhat||_{2,mu_S} <= ||hhat||_inf <= n^-1 ||h||_1 <= Phi^-1(1/n) ||h||_Phi``.
    """
    return dims.size * float(inverse(phi, 1.0 / dims.size))


def certified_restriction_constant(dims: GroupDims, phi: YoungFunction, psi: YoungFunction) -> float:
    """``n Phi^-1(1/n) / Psi^-1(1)``: a valid ``(Phi, Psi)`` restriction constant for every ``S``."""
    return certified_l2_restriction_constant(dims, phi) / float(inverse(psi, 1.0))


def certificate_restriction(problem: RecoveryProblem, phi: YoungFunction, psi: YoungFunction,
                            C: float | None = None) -> Certificate:
    """``|E| <= n^3 Phi^-1(|S|/n)^2 / (4 C^2 |S|^3)``.

    Without ``C`` the certified constant ``n Phi^-1(1/n)`` is used.  The
    ``n^4`` variant is reported in ``details``.
    """
    if precedes(power(1.0), phi).relation not in ("Precedes", "Equivalent"):
        raise PreconditionError(f"x does not precede {phi.label}")
    if precedes(phi, psi).relation not in ("Precedes", "Equivalent"):
        raise PreconditionError(f"{phi.label} does not precede {psi.label}")
    nE, nS, n = _truth_support_size(problem), len(problem.S), problem.dims.size
    mode = "supplied" if C is not None else "certified"
    if C is None:
        C = certified_l2_restriction_constant(problem.dims, phi)
    if nS == 0:
        return Certificate("restriction", True, math.inf, {"mode": mode, "C": C})
    bound = recovery_restriction_bound(nS, n, phi, C)
    stated = n * bound
    return Certificate("restriction", bool(nE <= bound), float(bound - nE),
                       {"mode": mode, "C": C, "bound": bound, "stated_bound": stated,
                        "stated_predicted_success": bool(nE <= stated)})


def recovery_random_threshold(total: int, phi: YoungFunction, D: float) -> float:
    """``(1/2) Psi^-1(1 / (Psi(1/n) D))`` with ``Psi(x) = x^(1/2) Phi^-1(1/x)``."""
    rpsi = recovery_psi(phi)
    return 0.5 * rpsi.inverse(1.0 / (rpsi(1.0 / total) * D))


def recovery_random_power_form(total: int, q: float, D: float) -> float:
    return total / (2 * D ** (1.0 / (0.5 - 1.0 / q)))


def certified_random_constant(S: SiteSet, phi: YoungFunction) -> float | None:
    """``|S|^(1/2 - 1/q)`` for ``Phi = x^q``; None for other families.

    For spectrum in ``S``, ``||h||_inf <= |S|^(1/2) ||h||_{2,mu}``; interpolating
    gives the Lambda bound, and the normalized/counting ratio is exactly 1.
    """
    if phi.family != "Power":
        return None
    q = phi.params["p"]
    return max(1, len(S)) ** (0.5 - 1.0 / q)


def certificate_random(problem: RecoveryProblem, phi: YoungFunction, D: float | None = None) -> Certificate:
    """``|E| < (1/2) Psi^-1(1/(Psi(1/n) D))``.

    Without ``D`` the certified value for power laws is used; other families
    need an explicit ``D`` (reported as ``mode="supplied"``).
    """
    _check_lambda_hypotheses(phi)
    if not delta2_nabla2(phi).get("in_delta2"):
        raise PreconditionError(f"{phi.label} is not in Delta-2")
    nE, n = _truth_support_size(problem), problem.dims.size
    mode = "supplied"
    if D is None:
        D = certified_random_constant(problem.S, phi)
        mode = "certified"
        if D is None:
            raise PreconditionError(f"no certified constant for {phi.label}; pass D")
    threshold = recovery_random_threshold(n, phi, D)
    return Certificate("random", bool(nE < threshold), float(threshold - nE),
                       {"mode": mode, "D": D, "threshold": threshold})


# ---------------------------------------------------------------------------
# phase experiment


@dataclass(frozen=True)
class PhaseRow:
    E: int
    S: int
    trials: int
    success_rate: float
    cert_classical: float
    cert_restriction: float
    cert_random: float
    unsound: int  # trials where a certificate predicted success but recovery failed

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _phase_trial(dims, nE, nS, rng, phi_r, psi_r, phi_rand):
    support_idx = rng.choice(dims.size, size=nE, replace=False)
    v = np.zeros(dims.size, dtype=complex)
    v[support_idx] = complex_normal(rng, nE)
    truth = Signal(dims, v)
    S = SiteSet(dims, tuple(rng.choice(dims.size, size=nS, replace=False).tolist()))
    problem = RecoveryProblem.from_truth(truth, S)
    result = basis_pursuit(problem)
    certs = [certificate_classical(problem), certificate_restriction(problem, phi_r, psi_r),
             certificate_random(problem, phi_rand)]
    return result.success, certs


def phase_experiment(dims: GroupDims, grid, trials: int, seed: int = 0,
                     phi: YoungFunction | None = None, psi: YoungFunction | None = None,
                     phi_random: YoungFunction | None = None) -> list[PhaseRow]:
    """Success rate of ``basis_pursuit`` per ``(|E|, |S|)`` cell.

    Each trial draws a random support of size ``|E|`` with complex Gaussian
    values and a uniformly random erased set of exactly ``|S|`` frequencies.
    """
    if trials <= 0:
        return []
    phi = phi or power(2.0)
    psi = psi or power(2.0)
    phi_random = phi_random or power(4.0)
    rows = []
    for cell, (nE, nS) in enumerate(grid):
        nE, nS = int(nE), int(nS)
        if not (0 <= nE <= dims.size and 0 <= nS < dims.size):
            raise InvalidInputError(f"cell ({nE}, {nS}) does not fit N^d = {dims.size}")
        wins = unsound = 0
        votes = np.zeros(3)
        for t in range(trials):
            rng = np.random.default_rng([seed, cell, t])
            ok, certs = _phase_trial(dims, nE, nS, rng, phi, psi, phi_random)
            wins += bool(ok)
            predicted = [c.predicted_success for c in certs]
            votes += predicted
            if any(predicted) and not ok:
                unsound += 1
        rows.append(PhaseRow(nE, nS, trials, wins / trials, *(float(v) for v in votes / trials), unsound))
    return rows
