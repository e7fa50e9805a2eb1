"""One test per acceptance criterion; each prints a PASS/FAIL line.

The lines are also collected and repeated in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from orlicz_lab import group
from orlicz_lab.cli import main
from orlicz_lab.group import GroupDims, Signal, SiteSet, complex_normal, dft, idft, make_signal
from orlicz_lab.inequalities import sweep
from orlicz_lab.norms import (MeasureSpec, indicator_orlicz_norm, luxemburg_norm,
                              orlicz_norm_amemiya, orlicz_norm_dual_sup)
from orlicz_lab.recovery import (RecoveryProblem, basis_pursuit, certificate_classical,
                                 phase_experiment, recovery_random_power_form,
                                 recovery_random_threshold, recovery_restriction_stated_bound,
                                 recovery_restriction_power_form)
from orlicz_lab.restriction import estimate_lambda_constant, sample_generic_set
from orlicz_lab.uncertainty import (UPInstance, annihilating_up_display, annihilating_up_power_form,
                                    classical_up, comb_signal, l2_branch_interpolated_display,
                                    l2_branch_power_form, lambda_up_display, lambda_up_power_form,
                                    restriction_up_display, restriction_up_power_form, up_sweep)
from orlicz_lab.young import (burstein, conjugate, limonova, power, power_log, scaled)
from oracles import l1_min_socp, legendre, naive_dft

RESULTS: list[str] = []


def record(number, title, ok, detail=""):
    line = f"criterion {number} [{title}]: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
    RESULTS.append(line)
    print(line)
    assert ok, line


def _sq(x):
    return np.einsum("ij,ij->i", x.real, x.real) + np.einsum("ij,ij->i", x.imag, x.imag)


def _fourier_dims():
    # all (N, d) with N^d <= 4096 and d >= 2; in one dimension every N <= 512 plus larger sizes
    out = [(N, 1) for N in range(2, 513)] + [(N, 1) for N in (1000, 1021, 1024, 2048, 2310, 4093, 4096)]
    for d in range(2, 13):
        N = 2
        while N ** d <= 4096:
            out.append((N, d))
            N += 1
    return out


def test_criterion_1_fourier_core():
    start = time.perf_counter()
    worst = 0.0
    # one seeded Gaussian pool; each dims uses the leading N^d entries of every row
    pool = np.random.default_rng(1).standard_normal((1000, 2 * 4096)).view(complex)
    for N, d in _fourier_dims():
        dims = GroupDims(N, d)
        v = np.ascontiguousarray(pool[:, :dims.size])
        F = group.dft_batch(v, dims)
        back = group.idft_batch(F, dims)
        energy = _sq(v)
        worst = max(worst, float(np.max(np.abs(energy - dims.size * _sq(F)) / energy)),
                    float(np.max(np.sqrt(_sq(back - v) / energy))))
    naive = 0.0
    for N, d in [(N, d) for d in (1, 2, 3, 4) for N in range(2, 257) if N ** d <= 256]:
        dims = GroupDims(N, d)
        x = complex_normal(np.random.default_rng([7, N, d]), dims.size)
        ref = naive_dft(x, N, d)
        got = dft(Signal(dims, x), method="separable").values
        naive = max(naive, float(np.linalg.norm(got - ref) / np.linalg.norm(ref)))
    elapsed = time.perf_counter() - start
    record(1, "Fourier core", worst <= 1e-12 and naive <= 1e-12 and elapsed < 30,
           f"round-trip {worst:.1e}, naive {naive:.1e}, {elapsed:.1f}s")


FAMILIES = [power(1.5), power(2), power(3), power(4), power_log(2, 1), power_log(1.5, 0.5),
            limonova(2), burstein(1), scaled(power(3), 0.5)]


def test_criterion_2_young_calculus():
    ys = np.logspace(-2, 2, 40)
    conj_err = 0.0
    for p in (1.5, 2, 3, 4):
        closed = (p - 1) * (ys / p) ** (p / (p - 1))
        for method in ("auto", "numeric"):
            conj_err = max(conj_err, float(np.max(np.abs(conjugate(power(p), method=method)(ys) / closed - 1))))
        # grid Legendre oracle at a few points
        for y in (0.5, 2.0):
            conj_err = max(conj_err, abs(float(conjugate(power(p))(y)) / legendre(lambda x: x ** p, y) - 1))
    grid = np.logspace(-3, 3, 100)
    bi_err = max(float(np.max(np.abs(conjugate(conjugate(phi), method="numeric")(grid) / phi(grid) - 1)))
                 for phi in FAMILIES)
    xs = np.logspace(-2, 2, 50)
    X, Y = np.meshgrid(xs, xs)
    slack = min(float(np.min(phi(X.ravel()) + conjugate(phi)(Y.ravel()) - X.ravel() * Y.ravel()))
                for phi in FAMILIES)
    record(2, "Young calculus", conj_err <= 1e-9 and bi_err <= 1e-8 and slack >= -1e-9,
           f"conjugate {conj_err:.1e}, biconjugate {bi_err:.1e}, min slack {slack:.1e}")


def test_criterion_3_norm_engine():
    phis = [power(1.5), power(3), power_log(2, 1), power_log(1.5, 0.5), limonova(2), burstein(1)]
    agree = sandwich = 0.0
    sandwich_ok = True
    for seed in range(200):
        rng = np.random.default_rng([3, seed])
        N = int(rng.integers(2, 65))
        dims = GroupDims(N, 1)
        A = SiteSet(dims, tuple(rng.choice(N, size=int(rng.integers(1, N + 1)), replace=False).tolist()))
        f = Signal(dims, complex_normal(rng, N) * 10 ** rng.uniform(-2, 2))
        mu = MeasureSpec(A, bool(rng.random() < 0.5))
        phi = phis[int(rng.integers(len(phis)))]
        am = orlicz_norm_amemiya(f, phi, mu).value
        ds = orlicz_norm_dual_sup(f, phi, mu).value
        lux = luxemburg_norm(f, phi, mu).value
        agree = max(agree, abs(am - ds) / am)
        sandwich_ok &= lux * (1 - 1e-9) <= am <= 2 * lux * (1 + 1e-9) and lux <= ds * (1 + 1e-6) <= 2 * lux * (1 + 1e-5)
    indicator = 0.0
    for seed in range(50):
        rng = np.random.default_rng([33, seed])
        N = int(rng.integers(2, 65))
        dims = GroupDims(N, 1)
        E = SiteSet(dims, tuple(rng.choice(N, size=int(rng.integers(1, N + 1)), replace=False).tolist()))
        phi = phis[int(rng.integers(len(phis)))]
        ref = orlicz_norm_dual_sup(Signal(dims, E.indicator()), phi, MeasureSpec.full(dims, normalized=True)).value
        indicator = max(indicator, abs(indicator_orlicz_norm(E, phi) - ref) / ref)
    record(3, "norm engine", agree <= 1e-6 and indicator <= 1e-6 and sandwich_ok,
           f"amemiya/dual-sup {agree:.1e}, indicator {indicator:.1e}, sandwich {sandwich_ok}")


CRITERION_4_IDS = ["HOLDER_2C", "HOLDER_1C", "LP_FROM_PHI", "PHI_FROM_L1", "L1_FROM_MU",
                   "NORMALIZE", "GEN_YOUNG", "GEN_HOLDER"]


def test_criterion_4_constant_free_registry():
    start = time.perf_counter()
    failures, hyp = {}, {}
    for id in CRITERION_4_IDS:
        s = sweep(id, 10000, seed=2024, workers=1)
        failures[id] = s.fail_count
        hyp[id] = s.hypothesis_count
    elapsed = time.perf_counter() - start
    bad = {k: v for k, v in failures.items() if v}
    record(4, "constant-free registry", not bad and elapsed < 300,
           f"8 x 10000 trials, failures {bad or 0}, hypothesis reports {sum(hyp.values())}, {elapsed:.0f}s")


THEOREM_SWEEPS = ["restriction-I", "restriction-II-above", "restriction-II-below",
                  "annihilating-pair-above", "annihilating-pair-below",
                  "annihilating-up-above", "annihilating-up-below", "lambda"]


def _power_form_errors():
    rng = np.random.default_rng(55)
    err = 0.0
    for _ in range(200):
        n = int(rng.choice([64, 256, 1024, 4096]))
        nE, nS = int(rng.integers(1, n + 1)), int(rng.integers(1, n))
        C = float(rng.uniform(0.2, 5))
        p_low = float(rng.uniform(1.05, 2.0))
        p_high = float(rng.uniform(2.5, 8.0))
        lhs, rhs = restriction_up_display(nE, nS, n, power(p_low), power(3), C)
        plhs, prhs = restriction_up_power_form(nE, nS, n, p_low, C)
        err = max(err, abs((plhs / prhs) / (lhs / rhs) ** (1 / (2 - 1 / p_low)) - 1))
        lhs, rhs = l2_branch_interpolated_display(nE, nS, n, power(p_low), C, 1.0)
        plhs, prhs = l2_branch_power_form(nE, nS, n, p_low, C)
        err = max(err, abs(plhs / lhs - 1), abs(prhs / rhs - 1))
        lhs, rhs = annihilating_up_display(nE, nS, n, power(p_low), power(3), C)
        plhs, prhs = annihilating_up_power_form(nE, nS, n, p_low, C)
        err = max(err, abs(plhs / lhs - 1), abs(prhs / rhs - 1))
        lhs, rhs = lambda_up_display(nE, n, power(p_high), C)
        plhs, prhs = lambda_up_power_form(nE, n, p_high, C)
        err = max(err, abs((plhs / prhs) / (lhs / rhs) ** (1 / (1 - 2 / p_high)) - 1))
        plhs, prhs = recovery_restriction_power_form(nE, nS, n, p_low, C)
        err = max(err, abs((plhs / prhs) / (nE / recovery_restriction_stated_bound(nS, n, power(p_low), C)) - 1))
        err = max(err, abs(recovery_random_threshold(n, power(p_high), C)
                           / recovery_random_power_form(n, p_high, C) - 1))
    return err


def test_criterion_5_uncertainty_theorems():
    equal = True
    for N, d in [(8, 1), (16, 1), (12, 1), (4, 2), (2, 5)]:
        dims = GroupDims(N, d)
        signals = [make_signal("delta", dims, x0=1), Signal(dims, np.ones(dims.size))]
        signals += [comb_signal(dims, a) for a in range(1, N + 1) if N % a == 0]
        for f in signals:
            rep = classical_up(UPInstance.from_signal(f))
            equal &= rep.lhs == dims.size
    violations, hyp = {}, {}
    for name in THEOREM_SWEEPS:
        reports = up_sweep(name, 1000, seed=5)
        violations[name] = sum(r.holds is False for r in reports)
        hyp[name] = sum(r.hypothesis_ok is False for r in reports)
    algebra = _power_form_errors()
    bad = {k: v for k, v in violations.items() if v}
    record(5, "uncertainty theorems", equal and not bad and algebra <= 1e-9,
           f"classical equality {equal}, violations {bad or 0}, "
           f"hypothesis reports {sum(hyp.values())}/{1000 * len(THEOREM_SWEEPS)}, algebra {algebra:.1e}")


def test_criterion_6_recovery():
    rates = []
    for N in (16, 32):
        dims = GroupDims(N, 1)
        grid = [(e, s) for e in range(1, N) for s in range(1, N) if 0 < e * s < N / 2]
        rows = phase_experiment(dims, grid, 50, seed=N)
        rates.append(min(r.success_rate for r in rows if r.cert_classical == 1.0))
    oracle = 0.0
    for seed in range(30):
        rng = np.random.default_rng([6, seed])
        dims = GroupDims(*[(16, 1), (32, 1), (4, 2), (2, 5), (5, 2)][seed % 5])
        v = np.zeros(dims.size, dtype=complex)
        v[rng.choice(dims.size, size=int(rng.integers(1, 6)), replace=False)] = complex_normal(rng, 1)[0]
        v[v != 0] = complex_normal(rng, int(np.count_nonzero(v)))
        S = SiteSet(dims, tuple(rng.choice(dims.size, size=int(rng.integers(1, dims.size // 2)), replace=False).tolist()))
        problem = RecoveryProblem.from_truth(Signal(dims, v), S)
        ref, _ = l1_min_socp(dims, S.members, problem.observed)
        oracle = max(oracle, abs(basis_pursuit(problem).objective - ref) / max(ref, 1e-12))
    record(6, "recovery", min(rates) == 1.0 and oracle <= 1e-6,
           f"certified success {min(rates):.0%}, objective vs conic oracle {oracle:.1e}")


def test_criterion_7_lambda_estimates():
    square = 0.0
    for seed in range(5):
        rng = np.random.default_rng([7, seed])
        dims = GroupDims(int(rng.choice([16, 64, 256])), 1)
        S = SiteSet(dims, tuple(rng.choice(dims.size, size=int(rng.integers(1, 12)), replace=False).tolist()))
        square = max(square, abs(estimate_lambda_constant(S, power(2), seed=seed).k_lower - 1))
    medians = {}
    for p in (3.0, 4.0):
        for N in (64, 256, 1024):
            dims = GroupDims(N, 1)
            size = math.ceil(N ** (2 / p))
            ks = [estimate_lambda_constant(sample_generic_set(dims, size, seed=s), power(p), seed=s).k_lower
                  for s in range(20)]
            medians[(p, N)] = float(np.median(ks))
    spread = max(max(medians[(p, N)] for N in (64, 256, 1024)) / min(medians[(p, N)] for N in (64, 256, 1024))
                 for p in (3.0, 4.0))
    shown = ", ".join(f"p={p:g} N={N}: {m:.3f}" for (p, N), m in medians.items())
    record(7, "Lambda estimates", square <= 1e-9 and spread <= 3,
           f"|k-1| for squares {square:.1e}, band factor {spread:.2f}; {shown}")
    assert spread <= 10


def test_criterion_8_determinism(tmp_path):
    runs = [
        ["verify", "--id", "GEN_HOLDER", "--trials", "200", "--seed", "8"],
        ["up", "--theorem", "annihilating-pair-below", "--trials", "50", "--seed", "8"],
        ["norms", "--signal", "gaussian", "--phi", "limonova(alpha=2)", "--trials", "5", "--seed", "8"],
        ["lambda-estimate", "--N", "64", "--phi", "power(p=4)", "--seed", "8", "--budget", "2"],
        ["phase", "--N", "16", "--trials", "5", "--seed", "8"],
    ]
    identical = True
    for i, args in enumerate(runs):
        outs = []
        for rep in "ab":
            out = tmp_path / f"{i}{rep}"
            assert main([*args, "--out", str(out)]) == 0
            outs.append(out)
        for name in ("reports.jsonl", "summary.csv"):
            identical &= (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    record(8, "determinism", identical, f"{len(runs)} commands run twice")
