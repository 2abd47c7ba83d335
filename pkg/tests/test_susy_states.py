import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from susyphoton import fock_core, scalar_mcs, susy_states
from susyphoton.fock_core import FockVector
from susyphoton.scalar_mcs import McsSpec
from susyphoton.susy_states import SaoParams, SpinorState, SusySpec

orders = st.integers(1, 3).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, m - 1)))
labels = st.builds(complex, st.floats(-2.5, 2.5), st.floats(-2.5, 2.5)).filter(lambda z: abs(z) > 0.1)
couplings = st.floats(-3.0, 3.0)
amps = st.builds(complex, st.floats(-1.5, 1.5), st.floats(-1.5, 1.5)).filter(lambda a: abs(a) > 0.1)


def random_spinor(seed, dim=20):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(4, dim))
    return SpinorState(FockVector(c[0] + 1j * c[1]), FockVector(c[2] + 1j * c[3]))


def close(s, t, tol=1e-12):
    return (s - t).norm() <= tol


def test_hamiltonian_examples():
    dim = 8
    assert susy_states.susy_hamiltonian_apply(SpinorState.plus(0, dim)).norm() == 0.0
    s = SpinorState.minus(2, dim)
    assert close(susy_states.susy_hamiltonian_apply(s), 2.0 * s)
    a, b = random_spinor(1, dim), random_spinor(2, dim)
    lhs = susy_states.susy_hamiltonian_apply(a + 2j * b)
    rhs = susy_states.susy_hamiltonian_apply(a) + 2j * susy_states.susy_hamiltonian_apply(b)
    assert close(lhs, rhs, 1e-12)


def test_sao_apply_examples():
    s = random_spinor(3)
    out = susy_states.sao_apply(SaoParams(1, 0, 0, 1), s)
    assert np.allclose(out.upper.coeffs, fock_core.annihilate(s.upper).coeffs)
    out = susy_states.sao_apply(SaoParams(1, 1, 0, 1), SpinorState(FockVector.zeros(4), FockVector.basis(0, 4)))
    assert close(out, SpinorState.plus(0, 4))


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_sao_power_is_composition(m):
    k2 = 0.7
    s = random_spinor(m, 24)
    want = s
    for _ in range(m):
        want = susy_states.sao_apply(SaoParams(1, k2, 0, 1), want)
    assert close(susy_states.sao_power_apply(k2, m, s), want, 1e-10)


def test_sao_power_on_lower_ladder():
    m, k2, dim = 3, 1.3, 10
    out = susy_states.sao_power_apply(k2, m, SpinorState.minus(m, dim))
    want = SpinorState(m * k2 * math.sqrt(math.factorial(m - 1)) * FockVector.basis(0, dim), FockVector.zeros(dim))
    assert close(out, want)


def test_build_supercoherent_examples():
    z = 0.8 - 0.3j
    s = susy_states.build_supercoherent(SusySpec(1, 0, z, 0.0))
    v = scalar_mcs.build_mcs(McsSpec(1, 0, z)).vector
    assert np.max(np.abs(s.upper.coeffs - v.coeffs / math.sqrt(2))) < 1e-10
    assert np.max(np.abs(s.lower.coeffs - v.coeffs / math.sqrt(2))) < 1e-10
    s0 = susy_states.build_supercoherent(SusySpec(2, 0, 0.0, 1.0, 1.0, 0.0))
    assert close(s0, SpinorState.plus(0, s0.dim))
    s = susy_states.build_supercoherent(SusySpec(2, 1, 2.0, 1.0))
    assert susy_states.eigen_residual(s, 1.0, 2, 2.0) <= 1e-10


def test_alt_family_examples():
    spec = SusySpec(3, 1, 1.2, 0.5)
    s = susy_states.build_supercoherent_alt(spec, 1.0, 0.0)
    v = scalar_mcs.build_mcs(McsSpec(3, 1, 1.2)).vector
    assert np.max(np.abs(s.upper.coeffs - v.coeffs)) < 1e-12
    assert s.lower.norm() == 0.0
    assert SusySpec(2, 1, 1.0, 0.0).sj == 0
    s = susy_states.build_supercoherent_alt(SusySpec(3, 0, 1.0, 1.0), 1.0, 1.0)
    assert susy_states.eigen_residual(s, 1.0, 3, 1.0) <= 1e-10
    with pytest.raises(ValueError):
        susy_states.build_supercoherent_alt(spec, 0.0, 0.0)


def test_derivative_state_examples():
    d = susy_states.derivative_state(1, 0, 0.0, 8)
    assert np.allclose(d.coeffs, FockVector.basis(1, 8).coeffs)
    # d/dz keeps the subspace: a^dagger maps the odd ladder onto the even one
    d = susy_states.derivative_state(2, 0, 1.3, 40)
    assert np.all(d.coeffs[1::2] == 0) and d.norm() > 0
    susy_states.derivative_state(3, 2, 1 + 1j, 60)  # raises if the two forms disagree


def test_tilde_amplitudes_examples():
    t = susy_states.tilde_amplitudes(SusySpec(2, 0, 1.5, 2.0, 0.7, 1.1))
    assert t.a_tilde == pytest.approx(0.7)
    z, k2, a, c = 1.3 + 0.2j, 0.9, 0.6, 1.4
    t = susy_states.tilde_amplitudes(SusySpec(3, 2, z, k2, a, c))
    assert t.a_tilde == pytest.approx(math.sqrt(2) * a / z**2 + 2 * k2 * c / z**2)
    t = susy_states.tilde_amplitudes(SusySpec(2, 1, 1.0, 0.0))
    assert (t.a_tilde, t.c_tilde) == (pytest.approx(1), pytest.approx(1))
    with pytest.raises(ValueError):
        susy_states.tilde_amplitudes(SusySpec(2, 1, 0.0, 1.0))


def test_susy_normalization_examples():
    assert susy_states.susy_normalization(SusySpec(1, 0, 0.0, 0.0, 1.0, 0.0)) == pytest.approx(1.0)
    want = math.exp(-0.5) / math.sqrt(2)
    assert susy_states.susy_normalization(SusySpec(1, 0, 1.0, 1.0)) == pytest.approx(want, rel=1e-12)
    spec = SusySpec(2, 0, 1.0, 0.0)
    assert susy_states.susy_normalization(spec) == pytest.approx(susy_states.susy_normalization_oracle(spec),
                                                                 rel=1e-10)


def test_scs_like_minimum_uncertainty():
    for z in (0.3, 1 + 1j, -2.0):
        assert susy_states.hur_susy(SusySpec(1, 0, z, 0.0)) == pytest.approx(0.5, abs=1e-10)


def test_mandel_susy_caption_roots():
    assert susy_states.mandel_q_susy(SusySpec(1, 0, 2.0, 0.97561)) == pytest.approx(0.0, abs=1e-4)
    roots = susy_states.mandel_k2_roots(2, 0, 1.0)
    assert min(abs(r - 1.598698) for r in roots) < 1e-3
    with pytest.raises(ValueError):
        susy_states.mandel_q_susy(SusySpec(2, 0, 0.0, 1.0, 1.0, 0.0))


def test_subspace_invariance():
    for m in (1, 2, 3):
        assert susy_states.check_subspace_invariance(m, 1.5, 30) == 0


def test_zero_label_uses_oracle():
    spec = SusySpec(2, 1, 0.0, 1.0)
    assert susy_states.hur_susy(spec) == pytest.approx(susy_states.hur_susy_oracle(spec), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(orders, labels, couplings, amps, amps)
def test_eigen_residual_both_families(mj, z, k2, a, c):
    spec = SusySpec(*mj, z, k2, a, c)
    s = susy_states.build_supercoherent(spec)
    assert susy_states.eigen_residual(s, k2, spec.m, z) <= 1e-10
    t = susy_states.build_supercoherent_alt(spec, a, c)
    assert susy_states.eigen_residual(t, k2, spec.m, z) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(orders, labels, couplings, amps, amps)
def test_tilde_form_matches_recursion(mj, z, k2, a, c):
    spec = SusySpec(*mj, z, k2, a, c)
    s = susy_states.build_supercoherent(spec)
    t = susy_states.tilde_supercoherent(spec, s.dim).normalized()
    phase = susy_states.spinor_inner(t, s)
    assert close(s, (phase / abs(phase)) * t, 1e-10)


@settings(max_examples=30, deadline=None)
@given(orders, labels, couplings, amps, amps)
def test_closed_forms_match_oracle(mj, z, k2, a, c):
    spec = SusySpec(*mj, z, k2, a, c)
    rel = 1e-8
    assert susy_states.susy_normalization(spec) == pytest.approx(susy_states.susy_normalization_oracle(spec), rel=rel)
    for k in (0, 1):
        assert susy_states.s_variance_susy(spec, k) == pytest.approx(susy_states.s_variance_susy_oracle(spec, k),
                                                                     rel=rel)
    assert susy_states.hur_susy(spec) == pytest.approx(susy_states.hur_susy_oracle(spec), rel=rel)
    assert susy_states.mandel_q_susy(spec) == pytest.approx(susy_states.mandel_q_susy_oracle(spec), rel=rel,
                                                            abs=rel)
    assert susy_states.mean_energy_susy(spec) == pytest.approx(susy_states.mean_energy_susy_oracle(spec), rel=rel)


@settings(max_examples=30, deadline=None)
@given(orders, labels, couplings)
def test_hur_at_least_half(mj, z, k2):
    assert susy_states.hur_susy(SusySpec(*mj, z, k2)) >= 0.5 - 1e-10


@settings(max_examples=30, deadline=None)
@given(orders, labels, couplings)
def test_state_lives_in_one_subspace(mj, z, k2):
    m, j = mj
    s = susy_states.build_supercoherent(SusySpec(m, j, z, k2))
    assert susy_states.spinor_subspace_index(s, m, 1e-300) == j
