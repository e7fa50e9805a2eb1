"""Registry of Orlicz-space inequalities with one verifier per entry.

Each entry knows how to draw a seeded random instance, check the entry's
hypotheses on it, and evaluate both sides.  ``verify`` turns one instance into
an :class:`InequalityReport`; ``sweep`` aggregates many seeded trials.

Entries with an unspecified constant (``BAK_INTERP``, ``HAUSDORFF_YOUNG``)
report the observed ratio as ``empirical_constant`` and are only asserted when
a constant is supplied.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from ._numerics import fsum, log_grid
from .errors import InvalidInputError, PreconditionError
from .group import GroupDims, Signal, SiteSet, complex_normal, dft, idft, support
from .norms import MeasureSpec, j_phi, lp_norm, luxemburg_norm, orlicz_norm_amemiya
from .young import (YoungFunction, _midpoint_convex, _raw_inverse, bak_constants, burstein,
                    conjugate, derivative_of, inverse, limonova, power, power_log, precedes,
                    scaled, theta_from)

REL_TOL = 1e-9
SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class InequalityReport:
    """One evaluated inequality.  ``sense`` is ``"<="`` (lhs <= rhs) or ``">="``."""

    id: str
    lhs: float
    rhs: float
    slack: float
    holds: bool | None
    ratio: float
    instance_digest: str
    empirical_constant: float | None = None
    hypothesis_ok: bool = True
    sense: str = "<="
    note: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _clean(asdict(self))


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _clean(obj.item())
    return obj


def make_report(id: str, lhs: float, rhs: float, digest: str, sense: str = "<=",
                tol: float = REL_TOL, **extra) -> InequalityReport:
    lhs, rhs = float(lhs), float(rhs)
    slack = rhs - lhs if sense == "<=" else lhs - rhs
    bound = rhs if sense == "<=" else lhs
    holds = bool(slack >= -tol * max(1.0, abs(bound))) if not math.isnan(slack) else False
    ratio = lhs / rhs if rhs != 0 else (0.0 if lhs == 0 else math.inf)
    return InequalityReport(id=id, lhs=lhs, rhs=rhs, slack=slack, holds=holds, ratio=ratio,
                            instance_digest=digest, sense=sense, **extra)


def hypothesis_report(id: str, digest: str, reason: str, **extra) -> InequalityReport:
    return InequalityReport(id=id, lhs=math.nan, rhs=math.nan, slack=math.nan, holds=None,
                            ratio=math.nan, instance_digest=digest, hypothesis_ok=False,
                            note=reason, **extra)


@dataclass(frozen=True)
class Instance:
    dims: GroupDims
    f: Signal | None = None
    g: Signal | None = None
    A: SiteSet | None = None
    S: SiteSet | None = None
    phi: YoungFunction | None = None
    psi: YoungFunction | None = None
    theta: YoungFunction | None = None
    p: float | None = None
    normalized: bool = True
    direction: str = "C"
    constant: float | None = None
    digest: str = ""


@dataclass(frozen=True)
class RegistryEntry:
    id: str
    statement: str
    constant_free: bool
    hypothesis_checker: Callable[[Instance], str | None]
    evaluate: Callable[[Instance], InequalityReport]
    generate: Callable[[np.random.Generator], Instance]


# ---------------------------------------------------------------------------
# hypothesis checks (cached per Young-function object)

@lru_cache(maxsize=None)
def _dominated_by(phi1: YoungFunction, phi2: YoungFunction) -> bool:
    return precedes(phi1, phi2).relation in ("Precedes", "Equivalent")


@lru_cache(maxsize=None)
def _power_root_convex(phi: YoungFunction, p: float) -> bool:
    """``s -> Phi(s^(1/p))`` is midpoint convex on a log grid."""
    grid = log_grid(1e-6, min(1e12, phi.domain_cap ** p), 4)
    ev = lambda s: phi.raw(s ** (1.0 / p))
    return _midpoint_convex(ev, grid).size == 0


@lru_cache(maxsize=None)
def _inverse_product_ok(phi: YoungFunction, psi: YoungFunction, theta: YoungFunction) -> str | None:
    grid = log_grid(1e-8, 1e8, 4)
    a = _raw_inverse(phi, grid)
    b = _raw_inverse(psi, grid) * _raw_inverse(theta, grid)
    bad = np.flatnonzero(a < b * (1 - 1e-10))
    if bad.size:
        x = grid[bad[0]]
        return f"inverse product condition fails at x={x:g}"
    return None


@lru_cache(maxsize=None)
def _derivative_growth_exponent(psi: YoungFunction, r_max: int = 8) -> float | None:
    """Smallest integer ``r`` with ``Psi' < x^r``, or None."""
    d = derivative_of(psi)
    wrapped = YoungFunction(family="Composed", params={}, label=f"d({psi.label})",
                            evaluator=lambda x: d(x), domain_cap=psi.domain_cap)
    for r in range(1, r_max + 1):
        if _dominated_by(wrapped, power(float(r))):
            return float(r)
    return None


def _require_nice(phi: YoungFunction) -> str | None:
    return None if phi.nice else f"{phi.label} is not a nice Young function"


def _spectrum_inside(f: Signal, S: SiteSet) -> bool:
    inside = set(S.members)
    return all(m in inside for m in support(dft(f), SUPPORT_TOL))


# ---------------------------------------------------------------------------
# instance generation

DIMS_POOL = [(2, 1), (3, 1), (4, 1), (5, 1), (6, 1), (7, 1), (8, 1), (12, 1), (16, 1), (32, 1),
             (64, 1), (2, 2), (3, 2), (4, 2), (8, 2), (2, 3), (4, 3), (2, 4), (2, 5), (2, 6)]


def _pool():
    nice = [power(1.5), power(2.0), power(3.0), power(4.0), power(1.25),
            power_log(2.0, 1.0), power_log(1.5, 0.5), limonova(2.0), burstein(1.0)]
    weights = np.array([0.17, 0.17, 0.15, 0.14, 0.12, 0.07, 0.07, 0.06, 0.05])
    return nice, weights / weights.sum()


NICE_POOL, NICE_WEIGHTS = _pool()


def _pick(rng, items, weights=None):
    return items[int(rng.choice(len(items), p=weights))]


def _dims(rng) -> GroupDims:
    N, d = DIMS_POOL[int(rng.integers(len(DIMS_POOL)))]
    return GroupDims(N, d)


def _random_set(rng, dims: GroupDims, min_size: int = 1) -> SiteSet:
    k = int(rng.integers(min_size, dims.size + 1))
    return SiteSet(dims, tuple(rng.choice(dims.size, size=k, replace=False).tolist()))


def _random_signal(rng, dims: GroupDims, on: SiteSet | None = None) -> Signal:
    v = np.zeros(dims.size, dtype=complex)
    idx = np.arange(dims.size) if on is None else on.array
    vals = complex_normal(rng, idx.size)
    if rng.random() < 0.2:
        vals = vals.real.astype(complex)
    v[idx] = vals * 10.0 ** rng.uniform(-2, 2)
    return Signal(dims, v)


def _spectral_signal(rng, dims: GroupDims, S: SiteSet) -> Signal:
    return idft(_random_signal(rng, dims, S))


def _comb_signal(rng, dims: GroupDims) -> Signal | None:
    """Character times the indicator of a subgroup ``a Z_N`` (d = 1, composite N)."""
    divs = [a for a in range(2, dims.N) if dims.N % a == 0]
    if dims.d != 1 or not divs:
        return None
    a = divs[int(rng.integers(len(divs)))]
    shift = int(rng.integers(dims.N))
    x = np.arange(dims.N)
    v = np.where(x % a == 0, np.exp(2j * np.pi * shift * x / dims.N), 0.0)
    return Signal(dims, v)


def _digest(id: str, dims: GroupDims, **parts) -> str:
    tail = ",".join(f"{k}={v}" for k, v in parts.items())
    return f"{id}|N={dims.N},d={dims.d}|{tail}"


# ---------------------------------------------------------------------------
# the entries


def _holder_2c_gen(rng) -> Instance:
    dims = _dims(rng)
    A = SiteSet.full(dims) if rng.random() < 0.5 else _random_set(rng, dims)
    phi = _pick(rng, NICE_POOL, NICE_WEIGHTS)
    return Instance(dims, f=_random_signal(rng, dims), g=_random_signal(rng, dims), A=A,
                    phi=phi, psi=conjugate(phi), normalized=True,
                    digest=_digest("HOLDER_2C", dims, phi=phi.label, A=len(A)))


def _holder_2c_eval(inst: Instance) -> InequalityReport:
    mu = MeasureSpec(inst.A, inst.normalized)
    idx = inst.A.array
    lhs = mu.weight * fsum(np.abs(inst.f.values[idx] * inst.g.values[idx]))
    rhs = (2 * luxemburg_norm(inst.f, inst.phi, mu).value
           * luxemburg_norm(inst.g, inst.psi, mu).value)
    return make_report("HOLDER_2C", lhs, rhs, inst.digest)


def _holder_1c_eval(inst: Instance) -> InequalityReport:
    mu = MeasureSpec(inst.A, True)
    idx = inst.A.array
    lhs = mu.weight * fsum(np.abs(inst.f.values[idx] * inst.g.values[idx]))
    rhs = (orlicz_norm_amemiya(inst.f, inst.phi, mu).value
           * luxemburg_norm(inst.g, inst.psi, mu).value)
    return make_report("HOLDER_1C", lhs, rhs, inst.digest)


def _retag(inst: Instance, id: str) -> Instance:
    return replace(inst, digest=id + inst.digest[inst.digest.index("|"):])


def _lp_exponent_choices(phi: YoungFunction) -> list[float]:
    top = {"Power": phi.params.get("p"), "PowerLog": phi.params.get("p"),
           "Limonova": 2.0, "Burstein": 2.0}.get(phi.family, 1.0)
    return sorted({1.0, 0.5 * (1.0 + top), float(top)})


def _lp_gen(rng) -> Instance:
    dims = _dims(rng)
    phi = _pick(rng, NICE_POOL, NICE_WEIGHTS)
    p = _pick(rng, _lp_exponent_choices(phi))
    A = SiteSet.full(dims) if rng.random() < 0.3 else _random_set(rng, dims)
    normalized = bool(rng.random() < 0.4)
    return Instance(dims, f=_random_signal(rng, dims), A=A, phi=phi, p=p, normalized=normalized,
                    digest=_digest("LP_FROM_PHI", dims, phi=phi.label, p=p, A=len(A),
                                   normalized=normalized))


def _lp_check(inst: Instance) -> str | None:
    if not _dominated_by(power(inst.p), inst.phi):
        return f"x^{inst.p:g} does not precede {inst.phi.label}"
    if not _power_root_convex(inst.phi, inst.p):
        return f"Phi(s^(1/{inst.p:g})) is not convex for {inst.phi.label}"
    return None


def _lp_eval(inst: Instance) -> InequalityReport:
    mu = MeasureSpec(inst.A, inst.normalized)
    lhs = lp_norm(inst.f, inst.p, mu)
    norm = luxemburg_norm(inst.f, inst.phi, mu).value
    if inst.normalized:
        coeff = float(inverse(inst.phi, 1.0))
    else:
        n = len(inst.A)
        coeff = n ** (1.0 / inst.p) * float(inverse(inst.phi, 1.0 / n))
    return make_report("LP_FROM_PHI", lhs, coeff * norm, inst.digest)


def _phi_l1_gen(rng) -> Instance:
    dims = _dims(rng)
    S = _random_set(rng, dims)
    phi = _pick(rng, NICE_POOL, NICE_WEIGHTS)
    return Instance(dims, f=_spectral_signal(rng, dims, S), S=S, phi=phi,
                    digest=_digest("PHI_FROM_L1", dims, phi=phi.label, S=len(S)))


def _phi_l1_check(inst: Instance) -> str | None:
    if not _spectrum_inside(inst.f, inst.S):
        return "spectrum of f leaves S"
    return None


def _phi_l1_eval(inst: Instance) -> InequalityReport:
    dims = inst.dims
    frac = len(inst.S) / dims.size
    lhs = luxemburg_norm(inst.f, inst.phi, MeasureSpec.full(dims)).value
    coeff = frac / float(inverse(inst.phi, frac))
    return make_report("PHI_FROM_L1", lhs, coeff * fsum(inst.f.abs()), inst.digest)


def _l1_mu_gen(rng) -> Instance:
    dims = _dims(rng)
    E = _random_set(rng, dims)
    phi = _pick(rng, NICE_POOL, NICE_WEIGHTS)
    return Instance(dims, f=_random_signal(rng, dims, E), A=E, phi=phi,
                    digest=_digest("L1_FROM_MU", dims, phi=phi.label, E=len(E)))


def _l1_mu_check(inst: Instance) -> str | None:
    inside = set(inst.A.members)
    if any(x not in inside for x in support(inst.f)):
        return "f is not supported in E"
    return None


def _l1_mu_eval(inst: Instance) -> InequalityReport:
    E = inst.A
    lhs = fsum(inst.f.abs())
    rhs = len(E) * float(inverse(inst.phi, 1.0)) * luxemburg_norm(inst.f, inst.phi, MeasureSpec.uniform(E)).value
    return make_report("L1_FROM_MU", lhs, rhs, inst.digest)


def _normalize_gen(rng) -> Instance:
    dims = _dims(rng)
    A = _random_set(rng, dims)
    phi = _pick(rng, NICE_POOL, NICE_WEIGHTS)
    return Instance(dims, f=_random_signal(rng, dims), A=A, phi=phi,
                    digest=_digest("NORMALIZE", dims, phi=phi.label, A=len(A)))


def _normalize_eval(inst: Instance) -> InequalityReport:
    lhs = luxemburg_norm(inst.f, inst.phi, MeasureSpec.counting(inst.A)).value
    rhs = len(inst.A) * luxemburg_norm(inst.f, inst.phi, MeasureSpec.uniform(inst.A)).value
    return make_report("NORMALIZE", lhs, rhs, inst.digest)


def _norm_vs_mu_gen(rng) -> Instance:
    dims = _dims(rng)
    phi = _pick(rng, NICE_POOL, NICE_WEIGHTS)
    f = _comb_signal(rng, dims) if rng.random() < 0.4 else None
    if f is None:
        S = _random_set(rng, dims)
        f = _spectral_signal(rng, dims, S)
    S = support(dft(f), SUPPORT_TOL)
    E = support(f, SUPPORT_TOL)
    return Instance(dims, f=f, A=E, S=S, phi=phi,
                    digest=_digest("NORM_VS_MU", dims, phi=phi.label, E=len(E), S=len(S)))


def _norm_vs_mu_check(inst: Instance) -> str | None:
    if len(inst.A) == 0:
        return "f vanishes"
    return _phi_l1_check(inst)


def _norm_vs_mu_eval(inst: Instance) -> InequalityReport:
    dims, E, S = inst.dims, inst.A, inst.S
    frac = len(S) / dims.size
    lhs = luxemburg_norm(inst.f, inst.phi, MeasureSpec.counting(E)).value
    coeff = len(E) * len(S) * float(inverse(inst.phi, 1.0)) / (dims.size * float(inverse(inst.phi, frac)))
    rhs = coeff * luxemburg_norm(inst.f, inst.phi, MeasureSpec.uniform(E)).value
    return make_report("NORM_VS_MU", lhs, rhs, inst.digest)


def _power_triples():
    out = []
    for a, b in [(2.0, 2.0), (1.5, 3.0), (2.0, 4.0), (3.0, 3.0), (1.25, 5.0), (4.0, 4.0)]:
        c = 1.0 / (1.0 / a + 1.0 / b)
        if c >= 1:
            out.append((power(c), power(a), power(b)))
    return out


def _triple_pool():
    triples = _power_triples()
    for phi in (power(1.5), power(1.25)):
        triples.append((phi, power(2.0), theta_from(phi)))
    half_identity = scaled(power(1.0), 0.5)
    for phi in (power(3.0), power_log(2.0, 1.0), limonova(2.0)):
        triples.append((half_identity, phi, conjugate(phi)))
    triples.append((power_log(1.2, 0.5), power(2.0), theta_from(power_log(1.2, 0.5))))
    weights = np.array([1.0] * (len(triples) - 4) + [0.6, 0.3, 0.3, 0.08])
    return triples, weights / weights.sum()


TRIPLES, TRIPLE_WEIGHTS = _triple_pool()


def _triple_gen(id: str):
    def gen(rng) -> Instance:
        dims = _dims(rng)
        A = _random_set(rng, dims)
        phi, psi, theta = _pick(rng, TRIPLES, TRIPLE_WEIGHTS)
        return Instance(dims, f=_random_signal(rng, dims), g=_random_signal(rng, dims), A=A,
                        phi=phi, psi=psi, theta=theta,
                        digest=_digest(id, dims, phi=phi.label, psi=psi.label,
                                       theta=theta.label, A=len(A)))
    return gen


def _triple_check(inst: Instance) -> str | None:
    return _inverse_product_ok(inst.phi, inst.psi, inst.theta)


def _gen_young_eval(inst: Instance) -> InequalityReport:
    idx = inst.A.array
    x, y = np.abs(inst.f.values[idx]), np.abs(inst.g.values[idx])
    left = inst.phi.raw(x * y)
    right_f, right_g = inst.psi.raw(x), inst.theta.raw(y)
    pointwise = left - right_f - right_g
    scale = np.maximum(1.0, right_f + right_g)
    worst = float(np.max(pointwise / scale))
    rep = make_report("GEN_YOUNG", fsum(left), fsum(right_f) + fsum(right_g), inst.digest,
                      details={"worst_pointwise_relative": worst})
    if worst > REL_TOL:
        rep = replace(rep, holds=False, note="pointwise inequality fails")
    return rep


def _gen_holder_eval(inst: Instance) -> InequalityReport:
    mu = MeasureSpec.counting(inst.A)
    fg = Signal(inst.dims, inst.f.values * inst.g.values)
    lhs = luxemburg_norm(fg, inst.phi, mu).value
    rhs = 2 * luxemburg_norm(inst.f, inst.psi, mu).value * luxemburg_norm(inst.g, inst.theta, mu).value
    return make_report("GEN_HOLDER", lhs, rhs, inst.digest)


@lru_cache(maxsize=None)
def _bak_constant(phi: YoungFunction) -> float:
    return float(bak_constants(phi)["C"])


def _bak_gen(rng) -> Instance:
    dims = _dims(rng)
    E = _random_set(rng, dims)
    phi = _pick(rng, NICE_POOL, NICE_WEIGHTS)
    direction = "C" if rng.random() < 0.5 else "D"
    return Instance(dims, f=_random_signal(rng, dims), A=E, phi=phi, direction=direction,
                    digest=_digest("BAK_INTERP", dims, phi=phi.label, E=len(E), direction=direction))


def _bak_eval(inst: Instance) -> InequalityReport:
    E = inst.A
    counting = luxemburg_norm(inst.f, inst.phi, MeasureSpec.counting(E)).value
    normalized = luxemburg_norm(inst.f, inst.phi, MeasureSpec.uniform(E)).value
    if inst.direction == "C":
        lhs, base = counting, float(inverse(inst.phi, float(len(E)))) * normalized
    else:
        lhs, base = normalized, float(inverse(inst.phi, 1.0 / len(E))) * counting
    observed = lhs / base if base > 0 else 0.0
    const = inst.constant if inst.constant is not None else _bak_constant(inst.phi)
    return make_report("BAK_INTERP", lhs, const * base, inst.digest, empirical_constant=observed,
                       details={"direction": inst.direction, "constant_used": const})


def normalized_power_pair(p: float) -> YoungFunction:
    """``x^p / p``: the only multiple of ``x^p`` with ``Phi(1) + Phi*(1) = 1``."""
    return scaled(power(p), 1.0 / p)


HY_POOL = [power(1.5), power(2.0), power(1.25), power_log(1.2, 0.5),
           normalized_power_pair(1.5), normalized_power_pair(1.8)]
HY_WEIGHTS = np.array([0.2, 0.2, 0.15, 0.1, 0.2, 0.15])


def _hy_gen(rng) -> Instance:
    dims = _dims(rng)
    phi = _pick(rng, HY_POOL, HY_WEIGHTS)
    return Instance(dims, f=_random_signal(rng, dims), phi=phi, psi=conjugate(phi),
                    digest=_digest("HAUSDORFF_YOUNG", dims, phi=phi.label))


def _hy_check(inst: Instance) -> str | None:
    if not _dominated_by(inst.phi, power(2.0)):
        return f"{inst.phi.label} does not precede x^2"
    if _derivative_growth_exponent(inst.psi) is None:
        return "derivative of the conjugate grows faster than every tested power"
    return None


def _is_normalized_pair(phi, psi) -> bool:
    return abs(float(phi(1.0)) + float(psi(1.0)) - 1.0) <= 1e-9


def _hy_eval(inst: Instance) -> InequalityReport:
    dims = inst.dims
    full = MeasureSpec.full(dims)
    fhat = dft(inst.f)
    lhs = luxemburg_norm(fhat, inst.psi, full).value
    base = float(inverse(inst.phi, 1.0 / (dims.size * float(inst.phi(1.0))))) \
        * luxemburg_norm(inst.f, inst.phi, full).value
    observed = lhs / base if base > 0 else 0.0
    details = {"r": _derivative_growth_exponent(inst.psi)}
    if _is_normalized_pair(inst.phi, inst.psi):
        jf = j_phi(inst.f, inst.phi, dims)
        jh = j_phi(fhat.scale(dims.size), inst.psi, dims)
        details["k0_ratio"] = jh / jf if jf > 0 else 0.0
    else:
        details["k0_ratio"] = None
        details["j_form"] = "pair not normalized; J-form out of hypothesis"
    const = inst.constant
    asserted = const is not None
    rep = make_report("HAUSDORFF_YOUNG", lhs, (const if asserted else observed) * base, inst.digest,
                      empirical_constant=observed, details=details)
    if not asserted:
        rep = replace(rep, note="no constant supplied; ratio recorded only")
    return rep


def _no_check(inst: Instance) -> str | None:
    return None


def _nice_only(inst: Instance) -> str | None:
    return _require_nice(inst.phi)


REGISTRY: dict[str, RegistryEntry] = {e.id: e for e in [
    RegistryEntry("HOLDER_2C", "||fg||_{L1(mu)} <= 2 ||f||_{Phi,mu} ||g||_{Phi*,mu}", True,
                  _nice_only, _holder_2c_eval, _holder_2c_gen),
    RegistryEntry("HOLDER_1C", "||fg||_{L1(mu_A)} <= ||f||_{(Phi),mu_A} ||g||_{Phi*,mu_A}", True,
                  _nice_only, _holder_1c_eval, lambda rng: _retag(_holder_2c_gen(rng), "HOLDER_1C")),
    RegistryEntry("LP_FROM_PHI", "||f||_{Lp(A)} <= |A|^(1/p) Phi^-1(1/|A|) ||f||_{Phi,A}; "
                  "normalized: ||f||_{Lp(mu_A)} <= Phi^-1(1) ||f||_{Phi,mu_A}", True,
                  _lp_check, _lp_eval, _lp_gen),
    RegistryEntry("PHI_FROM_L1", "||f||_Phi <= |S| / (N^d Phi^-1(|S|/N^d)) ||f||_1 when fhat is supported in S",
                  True, _phi_l1_check, _phi_l1_eval, _phi_l1_gen),
    RegistryEntry("L1_FROM_MU", "||f||_1 <= |E| Phi^-1(1) ||f||_{Phi,mu_E} when supp f in E", True,
                  _l1_mu_check, _l1_mu_eval, _l1_mu_gen),
    RegistryEntry("NORMALIZE", "||f||_{Phi,A} <= |A| ||f||_{Phi,mu_A}", True,
                  _no_check, _normalize_eval, _normalize_gen),
    RegistryEntry("NORM_VS_MU", "||f||_{Phi,E} <= |E||S| Phi^-1(1) / (N^d Phi^-1(|S|/N^d)) "
                  "||f||_{Phi,mu_E}", True, _norm_vs_mu_check, _norm_vs_mu_eval, _norm_vs_mu_gen),
    RegistryEntry("GEN_YOUNG", "Phi(xy) <= Psi(x) + Theta(y) when Phi^-1 >= Psi^-1 Theta^-1", True,
                  _triple_check, _gen_young_eval, _triple_gen("GEN_YOUNG")),
    RegistryEntry("GEN_HOLDER", "||fg||_{Phi,A} <= 2 ||f||_{Psi,A} ||g||_{Theta,A} "
                  "when Phi^-1 >= Psi^-1 Theta^-1", True,
                  _triple_check, _gen_holder_eval, _triple_gen("GEN_HOLDER")),
    RegistryEntry("BAK_INTERP", "||f||_{Phi,E} <= C' Phi^-1(|E|) ||f||_{Phi,mu_E} and "
                  "||f||_{Phi,mu_E} <= D' Phi^-1(1/|E|) ||f||_{Phi,E}", False,
                  _nice_only, _bak_eval, _bak_gen),
    RegistryEntry("HAUSDORFF_YOUNG", "||fhat||_{Phi*} <= K Phi^-1(N^-d / Phi(1)) ||f||_Phi", False,
                  _hy_check, _hy_eval, _hy_gen),
]}

CONSTANT_FREE = tuple(k for k, e in REGISTRY.items() if e.constant_free)


def verify(id: str, instance: Instance) -> InequalityReport:
    """Check the entry's hypotheses on ``instance``, then evaluate both sides."""
    if id not in REGISTRY:
        raise InvalidInputError(f"unknown inequality id {id!r}")
    entry = REGISTRY[id]
    try:
        reason = entry.hypothesis_checker(instance)
    except PreconditionError as exc:
        reason = str(exc)
    if reason is not None:
        return hypothesis_report(id, instance.digest, reason)
    return entry.evaluate(instance)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSummary:
    id: str
    trials: int
    pass_count: int
    fail_count: int
    hypothesis_count: int
    worst_slack: float
    worst_digest: str
    empirical_constant: float | None
    empirical_digest: str

    def to_dict(self) -> dict:
        return _clean(asdict(self))


def run_trial(id: str, seed: int, trial: int,
              generator: Callable[[np.random.Generator], Instance] | None = None) -> InequalityReport:
    rng = np.random.default_rng([seed, trial])
    gen = generator or REGISTRY[id].generate
    inst = gen(rng)
    inst = replace(inst, digest=f"{inst.digest}|seed={seed}|trial={trial}")
    return verify(id, inst)


def _trial_star(args):
    return run_trial(*args)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("ORLICZ_WORKERS", "1")))
    except ValueError:
        return 1


def iter_reports(id: str, trials: int, seed: int = 0, generator=None, workers: int | None = None):
    """Yield reports in trial order; parallel runs give the same sequence."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or generator is not None:
        for t in range(trials):
            yield run_trial(id, seed, t, generator)
        return
    with ProcessPoolExecutor(workers) as pool:
        yield from pool.map(_trial_star, [(id, seed, t) for t in range(trials)], chunksize=64)


def summarize(id: str, reports) -> SweepSummary:
    n = passed = failed = hyp = 0
    worst, worst_digest = math.inf, ""
    emp, emp_digest = None, ""
    for r in reports:
        n += 1
        if not r.hypothesis_ok:
            hyp += 1
            continue
        if r.holds:
            passed += 1
        else:
            failed += 1
        rel = r.slack / max(1.0, abs(r.rhs if r.sense == "<=" else r.lhs))
        if rel < worst:
            worst, worst_digest = rel, r.instance_digest
        if r.empirical_constant is not None and (emp is None or r.empirical_constant > emp):
            emp, emp_digest = r.empirical_constant, r.instance_digest
    return SweepSummary(id, n, passed, failed, hyp, worst, worst_digest, emp, emp_digest)


def sweep(id: str, trials: int, seed: int = 0, generator=None,
          workers: int | None = None) -> SweepSummary:
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    return summarize(id, iter_reports(id, trials, seed, generator, workers))
