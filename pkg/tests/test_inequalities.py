import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz_lab.errors import InvalidInputError
from orlicz_lab.group import GroupDims, Signal, SiteSet, complex_normal, make_signal
from orlicz_lab.inequalities import (CONSTANT_FREE, REGISTRY, Instance, iter_reports,
                                     normalized_power_pair, run_trial, sweep, verify)
from orlicz_lab.young import conjugate, power, power_log, scaled

EXPECTED_IDS = {"HOLDER_2C", "HOLDER_1C", "LP_FROM_PHI", "PHI_FROM_L1", "L1_FROM_MU", "NORMALIZE",
                "NORM_VS_MU", "GEN_YOUNG", "GEN_HOLDER", "BAK_INTERP", "HAUSDORFF_YOUNG"}


def test_registry_contents():
    assert set(REGISTRY) == EXPECTED_IDS
    assert set(CONSTANT_FREE) == EXPECTED_IDS - {"BAK_INTERP", "HAUSDORFF_YOUNG"}
    assert not REGISTRY["BAK_INTERP"].constant_free and not REGISTRY["HAUSDORFF_YOUNG"].constant_free


def test_holder_two_constant_on_constants():
    dims = GroupDims(8, 1)
    one = Signal(dims, np.ones(8))
    phi = power(2)
    rep = verify("HOLDER_2C", Instance(dims, f=one, g=one, A=SiteSet.full(dims), phi=phi, psi=conjugate(phi)))
    # ||1||_{x^2, mu} = 1 and ||1||_{y^2/4, mu} = 1/2
    assert rep.lhs == pytest.approx(1.0) and rep.rhs == pytest.approx(1.0)
    assert rep.holds


def test_degenerate_identity_triple_is_rejected():
    dims = GroupDims(4, 1)
    one = Signal(dims, np.ones(4))
    rep = verify("GEN_YOUNG", Instance(dims, f=one, g=one, A=SiteSet.full(dims),
                                       phi=power(1), psi=power(1), theta=power(1)))
    assert rep.hypothesis_ok is False and rep.holds is None


@pytest.mark.parametrize("phi", [power(2), power(3), power_log(2, 1)], ids=lambda f: f.label)
def test_phi_from_l1_delta_is_equality(phi):
    dims = GroupDims(8, 1)
    f = make_signal("delta", dims)
    rep = verify("PHI_FROM_L1", Instance(dims, f=f, S=SiteSet.full(dims), phi=phi))
    assert rep.holds and rep.ratio == pytest.approx(1.0, rel=1e-12)


def test_phi_from_l1_checks_spectrum():
    dims = GroupDims(8, 1)
    f = make_signal("delta", dims)
    rep = verify("PHI_FROM_L1", Instance(dims, f=f, S=SiteSet(dims, (0, 1)), phi=power(2)))
    assert rep.hypothesis_ok is False


def test_bak_constant_is_one_for_squares():
    rng = np.random.default_rng(0)
    worst = 0.0
    for t in range(200):
        dims = GroupDims(int(rng.integers(2, 33)), 1)
        k = int(rng.integers(1, dims.size + 1))
        E = SiteSet(dims, tuple(rng.choice(dims.size, size=k, replace=False).tolist()))
        f = Signal(dims, complex_normal(rng, dims.size))
        for direction in "CD":
            rep = verify("BAK_INTERP", Instance(dims, f=f, A=E, phi=power(2), direction=direction, constant=1.0))
            assert rep.holds
            worst = max(worst, rep.empirical_constant)
    assert worst <= 1 + 1e-9


@pytest.mark.parametrize("N", [4, 8, 16, 32])
def test_hausdorff_young_square_constant(N):
    dims = GroupDims(N, 1)
    f = Signal(dims, complex_normal(np.random.default_rng(N), N))
    phi = power(2)
    rep = verify("HAUSDORFF_YOUNG", Instance(dims, f=f, phi=phi, psi=conjugate(phi)))
    # ||fhat||_{y^2/4} = ||fhat||_2 / 2 and Phi^-1(N^-1) ||f||_2 = N^-1/2 ||f||_2
    assert rep.empirical_constant == pytest.approx(0.5, abs=1e-12)
    assert 0.5 <= rep.empirical_constant + 1e-12 and rep.empirical_constant <= 2


def test_hausdorff_young_j_form_only_for_normalized_pairs():
    dims = GroupDims(8, 1)
    f = Signal(dims, complex_normal(np.random.default_rng(1), 8))
    phi = normalized_power_pair(1.5)
    assert float(phi(1.0)) + float(conjugate(phi)(1.0)) == pytest.approx(1.0, abs=1e-12)
    rep = verify("HAUSDORFF_YOUNG", Instance(dims, f=f, phi=phi, psi=conjugate(phi)))
    assert rep.details["k0_ratio"] is not None
    other = verify("HAUSDORFF_YOUNG", Instance(dims, f=f, phi=power(1.5), psi=conjugate(power(1.5))))
    assert other.details["k0_ratio"] is None


def test_hausdorff_young_asserts_supplied_constant():
    dims = GroupDims(8, 1)
    f = Signal(dims, complex_normal(np.random.default_rng(1), 8))
    phi = power(2)
    low = verify("HAUSDORFF_YOUNG", Instance(dims, f=f, phi=phi, psi=conjugate(phi), constant=0.25))
    assert low.holds is False
    ok = verify("HAUSDORFF_YOUNG", Instance(dims, f=f, phi=phi, psi=conjugate(phi), constant=0.5))
    assert ok.holds


@pytest.mark.parametrize("seed", range(25))
def test_gen_holder_reduces_to_holder_two_constant(seed):
    rng = np.random.default_rng(seed)
    dims = GroupDims(int(rng.integers(2, 17)), 1)
    A = SiteSet(dims, tuple(rng.choice(dims.size, size=int(rng.integers(1, dims.size + 1)), replace=False).tolist()))
    f = Signal(dims, complex_normal(rng, dims.size))
    g = Signal(dims, complex_normal(rng, dims.size))
    phi = [power(1.5), power(3), power_log(2, 1)][seed % 3]
    half = scaled(power(1), 0.5)
    gh = verify("GEN_HOLDER", Instance(dims, f=f, g=g, A=A, phi=half, psi=phi, theta=conjugate(phi)))
    h2 = verify("HOLDER_2C", Instance(dims, f=f, g=g, A=A, phi=phi, psi=conjugate(phi), normalized=False))
    # the gauge norm for x/2 is half the L1 norm; right sides coincide
    assert 2 * gh.lhs == pytest.approx(h2.lhs, rel=1e-9)
    assert gh.rhs == pytest.approx(h2.rhs, rel=1e-9)
    assert gh.holds and h2.holds


def test_unknown_id():
    with pytest.raises(InvalidInputError):
        verify("NOPE", Instance(GroupDims(2, 1)))
    with pytest.raises(InvalidInputError):
        sweep("HOLDER_1C", 0)


def test_holder_one_constant_sweep_at_fixed_size():
    dims = GroupDims(8, 1)

    def gen(rng):
        inst = REGISTRY["HOLDER_1C"].generate(rng)
        A = SiteSet.full(dims)
        return Instance(dims, f=Signal(dims, complex_normal(rng, 8)), g=Signal(dims, complex_normal(rng, 8)),
                        A=A, phi=inst.phi, psi=inst.psi, digest="HOLDER_1C|N=8")

    s = sweep("HOLDER_1C", 500, seed=3, generator=gen)
    assert s.pass_count == 500 and s.fail_count == 0


def test_normalize_sweep_worst_slack_nonnegative():
    s = sweep("NORMALIZE", 1000, seed=4)
    assert s.fail_count == 0 and s.worst_slack >= 0


@pytest.mark.parametrize("id", sorted(EXPECTED_IDS))
def test_every_entry_sweeps_cleanly(id):
    s = sweep(id, 150, seed=11)
    assert s.trials == 150
    assert s.fail_count == 0
    assert s.pass_count + s.hypothesis_count == 150


def test_sweep_is_deterministic_and_parallel_agrees():
    a = [r.to_dict() for r in iter_reports("GEN_YOUNG", 40, seed=9, workers=1)]
    b = [r.to_dict() for r in iter_reports("GEN_YOUNG", 40, seed=9, workers=2)]
    assert a == b
    assert run_trial("LP_FROM_PHI", 5, 17).to_dict() == run_trial("LP_FROM_PHI", 5, 17).to_dict()


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(CONSTANT_FREE)), st.integers(0, 2 ** 31), st.integers(0, 10 ** 6))
def test_constant_free_entries_property(id, seed, trial):
    rep = run_trial(id, seed, trial)
    assert rep.holds is not False
    if rep.hypothesis_ok:
        assert rep.slack >= -1e-9 * max(1.0, abs(rep.rhs))


def test_report_serializes_nonfinite_as_null():
    rep = verify("GEN_YOUNG", Instance(GroupDims(4, 1), f=Signal(GroupDims(4, 1), np.ones(4)),
                                       g=Signal(GroupDims(4, 1), np.ones(4)), A=SiteSet.full(GroupDims(4, 1)),
                                       phi=power(1), psi=power(1), theta=power(1)))
    d = rep.to_dict()
    assert d["lhs"] is None and d["slack"] is None and not math.isnan(d["ratio"] or 0.0)
