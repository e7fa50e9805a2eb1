import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz_lab.errors import InvalidInputError, OracleScopeError
from orlicz_lab.group import GroupDims, Signal, SiteSet, complex_normal, make_signal
from orlicz_lab.norms import (MeasureSpec, indicator_orlicz_norm, j_phi, lp_norm, luxemburg_norm,
                              modular, orlicz_norm_amemiya, orlicz_norm_dual_sup)
from orlicz_lab.young import burstein, inverse, limonova, power, power_log
from oracles import amemiya_power_closed_form, luxemburg_bisect

NONPOWER = [power_log(2, 1), power_log(1.5, 0.5), limonova(2), burstein(1)]


def test_luxemburg_indicator_examples():
    dims = GroupDims(8, 1)
    E = SiteSet(dims, (0, 2, 5, 7))
    f = Signal(dims, E.indicator())
    assert luxemburg_norm(f, power(2), MeasureSpec.counting(E)).value == pytest.approx(2.0, rel=1e-15)
    for phi in NONPOWER:
        r = luxemburg_norm(f, phi, MeasureSpec.counting(E))
        assert r.value == pytest.approx(1 / inverse(phi, 1 / 4), rel=1e-10)
        assert r.value == pytest.approx(luxemburg_bisect(np.ones(4), lambda x: phi(x)), rel=1e-10)
        assert luxemburg_norm(f, phi, MeasureSpec.uniform(E)).value == pytest.approx(1 / inverse(phi, 1.0), rel=1e-10)


def test_bisection_report_sits_on_unit_modular():
    dims = GroupDims(16, 1)
    f = Signal(dims, complex_normal(np.random.default_rng(2), 16))
    for phi in NONPOWER + [power(3)]:
        r = luxemburg_norm(f, phi, method="bisection")
        assert abs(r.modular_at_value - 1) <= 1e-9
        assert r.value == pytest.approx(luxemburg_bisect(f.values, lambda x: phi(x)), rel=1e-10)


def test_zero_and_nonfinite_inputs():
    dims = GroupDims(4, 1)
    zero = Signal(dims, np.zeros(4))
    assert luxemburg_norm(zero, power(2)).value == 0.0
    assert luxemburg_norm(zero, power(2)).method == "ClosedForm"
    assert orlicz_norm_amemiya(zero, limonova(2)).value == 0.0
    assert orlicz_norm_dual_sup(zero, power(2)).value == 0.0
    with pytest.raises(InvalidInputError):
        luxemburg_norm(np.array([1.0, np.inf]), power(2), MeasureSpec.full(GroupDims(2, 1)))
    with pytest.raises(InvalidInputError):
        luxemburg_norm(zero, power(2), MeasureSpec.counting(SiteSet(dims, ())))


def test_amemiya_indicator_example():
    dims = GroupDims(4, 1)
    f = Signal(dims, SiteSet(dims, (0, 1)).indicator())
    mu = MeasureSpec.full(dims, normalized=True)
    assert orlicz_norm_amemiya(f, power(2), mu).value == pytest.approx(math.sqrt(2), rel=1e-12)
    assert orlicz_norm_amemiya(f, power(2), mu, method="golden").value == pytest.approx(math.sqrt(2), rel=1e-10)
    assert indicator_orlicz_norm(SiteSet(dims, (0, 1)), power(2)) == pytest.approx(math.sqrt(2), rel=1e-12)


def test_indicator_formula_full_group_matches_dual_sup():
    dims = GroupDims(8, 1)
    E = SiteSet.full(dims)
    f = Signal(dims, E.indicator())
    mu = MeasureSpec.full(dims, normalized=True)
    for phi in [power(3)] + NONPOWER:
        assert indicator_orlicz_norm(E, phi) == pytest.approx(orlicz_norm_dual_sup(f, phi, mu).value, rel=1e-6)


def test_dual_sup_delta_matches_amemiya():
    dims = GroupDims(8, 1)
    f = make_signal("delta", dims)
    assert orlicz_norm_dual_sup(f, power(2)).value == pytest.approx(orlicz_norm_amemiya(f, power(2)).value, rel=1e-6)


def test_dual_sup_cap():
    dims = GroupDims(128, 1)
    with pytest.raises(OracleScopeError):
        orlicz_norm_dual_sup(make_signal("delta", dims), power(2))


def test_j_phi_examples():
    dims = GroupDims(8, 1)
    for phi in [power(3)] + NONPOWER:
        assert j_phi(Signal(dims, np.full(8, 2.5)), phi) == pytest.approx(2.5, rel=1e-10)
        assert j_phi(Signal(dims, np.zeros(8)), phi) == 0.0
    f = Signal(dims, complex_normal(np.random.default_rng(5), 8))
    assert j_phi(f, power(2)) == pytest.approx(np.linalg.norm(f.values) / math.sqrt(8), rel=1e-12)


@pytest.mark.parametrize("p", [1.25, 1.5, 2.0, 3.0, 4.0])
def test_amemiya_power_closed_form_oracle(p):
    rng = np.random.default_rng(int(p * 100))
    a = np.abs(complex_normal(rng, 20))
    mu = MeasureSpec.full(GroupDims(20, 1), normalized=True)
    ref = amemiya_power_closed_form(a, p, w=1 / 20)
    assert orlicz_norm_amemiya(a, power(p), mu).value == pytest.approx(ref, rel=1e-12)
    assert orlicz_norm_amemiya(a, power(p), mu, method="golden").value == pytest.approx(ref, rel=1e-9)


def _random_instance(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(2, 33))
    dims = GroupDims(N, 1)
    k = int(rng.integers(1, N + 1))
    A = SiteSet(dims, tuple(rng.choice(N, size=k, replace=False).tolist()))
    f = Signal(dims, complex_normal(rng, N) * 10 ** rng.uniform(-2, 2))
    phi = [power(1.5), power(3)] + NONPOWER
    return f, MeasureSpec(A, bool(rng.random() < 0.5)), phi[int(rng.integers(len(phi)))]


@pytest.mark.parametrize("seed", range(12))
def test_amemiya_matches_dual_sup(seed):
    f, mu, phi = _random_instance(seed)
    am = orlicz_norm_amemiya(f, phi, mu).value
    ds = orlicz_norm_dual_sup(f, phi, mu).value
    assert abs(am - ds) <= 1e-6 * am


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_gauge_orlicz_sandwich(seed):
    f, mu, phi = _random_instance(seed)
    lux = luxemburg_norm(f, phi, mu).value
    am = orlicz_norm_amemiya(f, phi, mu).value
    assert lux * (1 - 1e-9) <= am <= 2 * lux * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3))
def test_homogeneity(seed, c):
    f, mu, phi = _random_instance(seed)
    base = luxemburg_norm(f, phi, mu).value
    assert luxemburg_norm(f.scale(c), phi, mu).value == pytest.approx(abs(c) * base, rel=1e-10)
    base_b = luxemburg_norm(f, phi, mu, method="bisection").value
    assert luxemburg_norm(f.scale(c), phi, mu, method="bisection").value == pytest.approx(abs(c) * base_b, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_normalization_comparison(seed):
    f, mu, phi = _random_instance(seed)
    A = mu.base
    counting = luxemburg_norm(f, phi, MeasureSpec.counting(A)).value
    normalized = luxemburg_norm(f, phi, MeasureSpec.uniform(A)).value
    assert counting <= len(A) * normalized * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([1.0, 1.25, 1.5, 2.0]))
def test_lp_from_phi_bound(seed, p):
    f, mu, _ = _random_instance(seed)
    phi = power_log(2, 1)
    A = mu.base
    lhs = lp_norm(f, p, MeasureSpec.counting(A))
    rhs = len(A) ** (1 / p) * inverse(phi, 1 / len(A)) * luxemburg_norm(f, phi, MeasureSpec.counting(A)).value
    assert lhs <= rhs * (1 + 1e-9)


def test_modular_uses_weight():
    a = np.array([1.0, 2.0])
    assert modular(a, power(2), 0.5, 1.0) == pytest.approx(2.5)
