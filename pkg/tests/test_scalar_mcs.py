import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from susyphoton import fock_core, scalar_mcs
from susyphoton.fock_core import FockVector
from susyphoton.scalar_mcs import McsSpec

orders = st.integers(1, 4).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, m - 1)))
labels = st.builds(complex, st.floats(-2.5, 2.5), st.floats(-2.5, 2.5)).filter(lambda z: abs(z) > 0.05)


def test_build_mcs_m1_is_coherent():
    alpha = 1.3 - 0.4j
    st_ = scalar_mcs.build_mcs(McsSpec(1, 0, alpha))
    n = np.arange(st_.vector.dim)
    want = np.exp(-abs(alpha) ** 2 / 2) * np.array([alpha**k / math.sqrt(math.factorial(k)) for k in n])
    assert np.max(np.abs(st_.vector.coeffs - want)) < 1e-12


def test_build_mcs_zero_label():
    v = scalar_mcs.build_mcs(McsSpec(2, 0, 0)).vector
    assert np.allclose(v.coeffs, FockVector.basis(0, v.dim).coeffs)


def test_build_mcs_eigenvector_and_support():
    v = scalar_mcs.build_mcs(McsSpec(3, 2, 1.5)).vector
    res = fock_core.power_annihilate(v, 3) - 1.5**3 * v
    assert res.norm() < 1e-10
    off = [k for k in range(v.dim) if k % 3 != 2]
    assert np.all(v.coeffs[off] == 0)
    assert v.norm() == pytest.approx(1.0, abs=1e-14)


def test_build_mcs_tail_error():
    tight = fock_core.TruncationPolicy(override=12)
    with pytest.raises(fock_core.TruncationError):
        scalar_mcs.build_mcs(McsSpec(1, 0, 3.0), tight)


def test_spec_validation():
    with pytest.raises(ValueError):
        McsSpec(2, 2, 1.0)
    with pytest.raises(ValueError):
        McsSpec(0, 0, 1.0)


def test_normalization_examples():
    assert scalar_mcs.normalization(2, 0, 0.0) == pytest.approx(1.0)
    assert scalar_mcs.normalization(2, 1, 1.0) == pytest.approx(1 / math.sqrt(math.sinh(1.0)), rel=1e-12)
    assert scalar_mcs.normalization(2, 1, 1.0) == pytest.approx(0.922452, abs=1e-6)
    for j in range(3):
        assert scalar_mcs.normalization(3, j, 1.0) == pytest.approx(scalar_mcs.normalization_series(3, j, 1.0),
                                                                    rel=1e-12)


def test_scs_decomposition_examples():
    comps = scalar_mcs.scs_decomposition(McsSpec(2, 0, 1.2))
    assert [c.label for c in comps] == pytest.approx([1.2, -1.2])
    assert comps[0].weight == pytest.approx(comps[1].weight)
    one = scalar_mcs.scs_decomposition(McsSpec(1, 0, 0.8))
    assert len(one) == 1 and one[0].weight == pytest.approx(1.0)
    w = [c.weight for c in scalar_mcs.scs_decomposition(McsSpec(3, 1, 1.0))]
    om = cmath.exp(2j * math.pi / 3)
    assert [x / w[0] for x in w] == pytest.approx([1, om**2, om])


def test_s_moments_examples():
    q1, q2 = scalar_mcs.s_moments(McsSpec(1, 0, 0.9), 0)
    assert q1 == pytest.approx(math.sqrt(2) * 0.9)
    assert scalar_mcs.s_moments(McsSpec(2, 1, 1 + 1j), 0)[0] == 0.0
    p1, p2 = scalar_mcs.s_moments(McsSpec(3, 0, 1.0), 1)
    ratio = scalar_mcs.number_ratio(3, 0, 1.0)
    assert p2 == pytest.approx(ratio + 0.5, rel=1e-12)


def test_hur_limits_and_minimum():
    assert scalar_mcs.hur(McsSpec(1, 0, 2 - 1j)) == pytest.approx(0.5, abs=1e-10)
    assert scalar_mcs.hur(McsSpec(2, 1, 1e-4)) == pytest.approx(1.5, abs=1e-6)
    assert scalar_mcs.hur(McsSpec(3, 2, 1e-4)) == pytest.approx(2.5, abs=1e-6)


def test_mandel_examples():
    q = 2 / math.sinh(2)
    assert scalar_mcs.mandel_q(McsSpec(2, 0, 1.0)) == pytest.approx(q, rel=1e-12)
    assert scalar_mcs.mandel_q(McsSpec(2, 0, 1.0)) == pytest.approx(0.551441, abs=1e-6)
    assert scalar_mcs.mandel_q(McsSpec(2, 1, 1.0)) == pytest.approx(-q, rel=1e-12)
    assert scalar_mcs.mandel_q(McsSpec(1, 0, 1.7j)) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(ValueError):
        scalar_mcs.mandel_q(McsSpec(2, 0, 0.0))


def test_mandel_asymptotics():
    z = math.sqrt(5.0)
    for j in range(2):
        assert abs(scalar_mcs.mandel_q(McsSpec(2, j, z))) < 1e-3


def test_geometric_phase_m1():
    alpha = 0.7 + 0.3j
    got = scalar_mcs.geometric_phase_scalar(McsSpec(1, 0, alpha))
    assert got == pytest.approx(2 * math.pi * abs(alpha) ** 2, rel=1e-12)


def test_series_and_closed_sums_agree():
    for m in (1, 2, 3):
        for j in range(m):
            for x in (0.0, 0.01, 0.2, 1.0, 5.0, 20.0):
                a = scalar_mcs.norm_sum_series(m, j, x)
                b = scalar_mcs.norm_sum(m, j, x)
                assert b == pytest.approx(a, rel=1e-12, abs=1e-300)


def test_number_ratio_small_x_limit():
    for m in (1, 2, 3):
        for j in range(m):
            assert scalar_mcs.number_ratio(m, j, 1e-12) == pytest.approx(j, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(orders, labels)
def test_reassembly_matches_build(mj, z):
    m, j = mj
    spec = McsSpec(m, j, z)
    v = scalar_mcs.build_mcs(spec).vector
    r = scalar_mcs.reassemble(scalar_mcs.scs_decomposition(spec), v.dim)
    assert np.max(np.abs(r.coeffs - v.coeffs)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(orders, labels)
def test_closed_forms_match_oracle(mj, z):
    m, j = mj
    spec = McsSpec(m, j, z)
    for k in (0, 1):
        a1, a2 = scalar_mcs.s_moments(spec, k)
        b1, b2 = scalar_mcs.s_moments_oracle(spec, k)
        assert a1 == pytest.approx(b1, abs=1e-9)
        assert a2 == pytest.approx(b2, rel=1e-9)
    assert scalar_mcs.hur(spec) == pytest.approx(scalar_mcs.hur_oracle(spec), rel=1e-9)
    assert scalar_mcs.mandel_q(spec) == pytest.approx(scalar_mcs.mandel_q_oracle(spec), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(orders, labels)
def test_hur_bounded_below(mj, z):
    assert scalar_mcs.hur(McsSpec(*mj, z)) >= 0.5 - 1e-12


@settings(max_examples=40, deadline=None)
@given(orders, st.floats(1e-3, 3.0))
def test_normalization_matches_series(mj, r):
    m, j = mj
    assert scalar_mcs.normalization(m, j, r) == pytest.approx(scalar_mcs.normalization_series(m, j, r), rel=1e-12)


def test_normalization_at_origin():
    assert scalar_mcs.normalization(3, 0, 0.0) == 1.0
    with pytest.raises(ValueError):
        scalar_mcs.normalization(3, 1, 0.0)
