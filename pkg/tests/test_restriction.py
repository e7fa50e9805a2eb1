import math

import numpy as np
import pytest

from orlicz_lab.errors import InvalidInputError, PreconditionError
from orlicz_lab.group import GroupDims, Signal, SiteSet, complex_normal, dft
from orlicz_lab.restriction import (estimate_lambda_constant, estimate_restriction_constant,
                                    generic_size, lambda_ratio, lambda_to_restriction,
                                    restriction_ratio, sample_generic_set)
from orlicz_lab.young import power, power_log


def test_full_set_square_pair_constant_is_one():
    dims = GroupDims(8, 1)
    est = estimate_restriction_constant(SiteSet.full(dims), power(2), power(2))
    assert est.method == "DeltaScan"
    assert est.c_lower == pytest.approx(1.0, rel=1e-12)


def test_single_frequency_constant_signal():
    # S = {0}, f = 1: fhat(0) = 1, ||1||_{x^2} over Z_8 is sqrt(8)
    dims = GroupDims(8, 1)
    S = SiteSet(dims, (0,))
    r = restriction_ratio(Signal(dims, np.ones(8)), S, power(2), power(2))
    assert r == pytest.approx(8 / math.sqrt(8), rel=1e-12)


def test_zero_budget_is_deterministic_and_seeded_runs_repeat():
    dims = GroupDims(16, 1)
    S = SiteSet(dims, (1, 4, 9))
    a = estimate_restriction_constant(S, power(1.5), power(3))
    b = estimate_restriction_constant(S, power(1.5), power(3), seed=123)
    assert a.c_lower == b.c_lower and a.trials == b.trials
    c = estimate_restriction_constant(S, power(1.5), power(3), budget=10, seed=4)
    d = estimate_restriction_constant(S, power(1.5), power(3), budget=10, seed=4)
    assert c.c_lower == d.c_lower and c.witness.values.tobytes() == d.witness.values.tobytes()
    assert c.c_lower >= a.c_lower


@pytest.mark.parametrize("seed", range(4))
def test_square_pair_bound_on_full_set_is_not_exceeded(seed):
    # Plancherel: N ||fhat||_{2, mu_full} = ||f||_2 exactly
    dims = GroupDims(8, 1)
    est = estimate_restriction_constant(SiteSet.full(dims), power(2), power(2), budget=20, seed=seed)
    assert est.c_lower <= 1 + 1e-9


def test_restriction_rejects_bad_pairs():
    dims = GroupDims(8, 1)
    S = SiteSet(dims, (0, 1))
    with pytest.raises(PreconditionError):
        estimate_restriction_constant(S, power(3), power(2))
    with pytest.raises(InvalidInputError):
        estimate_restriction_constant(SiteSet(dims, ()), power(2), power(2))
    with pytest.raises(InvalidInputError):
        estimate_restriction_constant(S, power(2), power(2), budget=-1)


def test_lambda_constant_of_square_is_one():
    dims = GroupDims(32, 1)
    S = SiteSet(dims, (0, 3, 7, 20))
    est = estimate_lambda_constant(S, power(2), budget=4, seed=1)
    assert est.k_lower == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("phi", [power(3), power(4), power_log(3, 1)], ids=lambda f: f.label)
def test_lambda_single_frequency_closed_form(phi):
    # one frequency gives a constant-modulus signal: ||c||_{Phi,mu} = |c| / Phi^-1(1)
    from orlicz_lab.young import inverse
    dims = GroupDims(16, 1)
    est = estimate_lambda_constant(SiteSet(dims, (5,)), phi, budget=2)
    assert est.k_lower == pytest.approx(1.0 / float(inverse(phi, 1.0)), rel=1e-10)


def test_lambda_witness_spectrum_lies_in_set():
    dims = GroupDims(16, 1)
    S = SiteSet(dims, (1, 2, 6, 11))
    est = estimate_lambda_constant(S, power(4), budget=3, seed=2)
    off = np.delete(dft(est.witness).values, S.array)
    assert np.max(np.abs(off)) <= 1e-12 * np.max(np.abs(dft(est.witness).values))
    assert est.k_lower == pytest.approx(lambda_ratio(est.witness, power(4)), rel=1e-12)


def test_lambda_ascent_beats_sampling():
    dims = GroupDims(32, 1)
    S = SiteSet(dims, (0, 1, 3, 8, 13))
    rng = np.random.default_rng(0)
    sampled = 0.0
    for _ in range(50):
        full = np.zeros(32, dtype=complex)
        full[S.array] = complex_normal(rng, len(S))
        sampled = max(sampled, lambda_ratio(Signal(dims, np.fft.ifft(full) * 32), power(4)))
    assert estimate_lambda_constant(S, power(4), budget=4).k_lower >= sampled * (1 - 1e-9)


def test_lambda_gate():
    dims = GroupDims(8, 1)
    with pytest.raises(PreconditionError):
        estimate_lambda_constant(SiteSet(dims, (0, 1)), power(1.5))
    with pytest.raises(PreconditionError):
        estimate_lambda_constant(SiteSet(dims, (0, 1)), power_log(1.5, 1))


def test_generic_set_sizes():
    dims = GroupDims(256, 1)
    assert generic_size(dims, power(4)) == pytest.approx(16.0, rel=1e-12)
    assert generic_size(dims, power(2)) == 256.0
    assert sample_generic_set(dims, 256.0, seed=3) == SiteSet.full(dims)
    with pytest.raises(InvalidInputError):
        sample_generic_set(dims, 0.0)


def test_generic_set_mean_size():
    dims = GroupDims(64, 1)
    k = 8.0
    sizes = np.array([len(sample_generic_set(dims, k, seed=s)) for s in range(10000)])
    sigma = math.sqrt(64 * (k / 64) * (1 - k / 64) / 10000)
    assert abs(sizes.mean() - k) <= 3 * sigma


@pytest.mark.parametrize("p", [3.0, 4.0])
def test_lambda_to_restriction_holds_with_measured_constant(p):
    dims = GroupDims(32, 1)
    S = SiteSet(dims, (0, 2, 5, 11, 17))
    K = estimate_lambda_constant(S, power(p), budget=4, seed=0).k_lower
    rep = lambda_to_restriction(S, power(p), K, trials=16, seed=1)
    assert rep.holds and rep.worst_slack >= -1e-9
    assert isinstance(rep.stated_form_holds, bool)
    for r in rep.reports:
        assert r.rhs == pytest.approx(2 * r.details["stated_rhs"] * r.details["K_used"] / K, rel=1e-12)


def test_lambda_to_restriction_flags_underestimate():
    dims = GroupDims(16, 1)
    S = SiteSet(dims, (0, 3, 4))
    rep = lambda_to_restriction(S, power(4), 0.5, trials=4)
    assert rep.constant_underestimated and rep.holds
    with pytest.raises(PreconditionError):
        lambda_to_restriction(S, power(1.5), 1.0)
