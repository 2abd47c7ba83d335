"""Multiphoton coherent states of the ordinary oscillator.

A multiphoton coherent state (MCS) with order ``m`` and subspace index
``j`` is the eigenvector of ``a**m`` living on the number states
``|mn + j>``.  We parametrize it by the root ``z`` (eigenvalue ``z**m``).

Most closed forms reduce to the subspace sums

    S_j(x) = sum_{k = j mod m} x**k / k!,        x = |z|**2,

which are ``exp(x)`` for ``m = 1``, ``cosh``/``sinh`` for ``m = 2`` and the
three trigonometric-exponential combinations for ``m = 3``.  Larger ``m``
and small ``x`` (where the ``m = 3`` expressions cancel badly) fall back to
the power series.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .fock_core import (
    DEFAULT_POLICY,
    FockVector,
    TruncationPolicy,
    coherent_series,
    moment,
    require_tail,
)

# below this x the m=3 closed forms lose more than ~1e-13 to cancellation
_CLOSED_FORM_MIN_X = 0.05


@dataclass(frozen=True)
class McsSpec:
    m: int
    j: int
    z: complex

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if int(self.j) != self.j or not 0 <= self.j < self.m:
            raise ValueError(f"j must satisfy 0 <= j < m, got j={self.j}, m={self.m}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "j", int(self.j))
        object.__setattr__(self, "z", complex(self.z))

    @property
    def x(self) -> float:
        return abs(self.z) ** 2


@dataclass(frozen=True)
class McsState:
    spec: McsSpec
    vector: FockVector
    norm_const: float


@dataclass(frozen=True)
class ScsComponent:
    label: complex
    weight: complex


def m_sub_j(m: int, j: int) -> int:
    """``m`` when ``j == 0``, else ``j``: the lower-ladder offset used throughout."""
    return m if j == 0 else j


# -- subspace sums ---------------------------------------------------------


def norm_sum_series(m: int, j: int, x: float) -> float:
    """``S_j(x)`` by direct summation with a term recurrence."""
    j %= m
    if x == 0.0:
        return 1.0 if j == 0 else 0.0
    term = math.exp(j * math.log(x) - math.lgamma(j + 1))
    total = term
    k = j
    while True:
        for i in range(1, m + 1):
            term *= x / (k + i)
        k += m
        total += term
        if term < 1e-18 * total:
            return total


def norm_sum_closed(m: int, j: int, x: float) -> float:
    """``S_j(x)`` from the elementary-function expressions (``m <= 3`` only)."""
    j %= m
    if m == 1:
        return math.exp(x)
    if m == 2:
        return math.cosh(x) if j == 0 else math.sinh(x)
    if m == 3:
        e, d = math.exp(x), 2.0 * math.exp(-x / 2.0)
        w = math.sqrt(3.0) * x / 2.0
        if j == 0:
            return (e + d * math.cos(w)) / 3.0
        if j == 1:
            return (e - d * math.sin(math.pi / 6.0 - w)) / 3.0
        return (e - d * math.sin(math.pi / 6.0 + w)) / 3.0
    raise ValueError("closed forms exist only for m <= 3")


def norm_sum(m: int, j: int, x: float) -> float:
    if m <= 3 and (m < 3 or x >= _CLOSED_FORM_MIN_X):
        return norm_sum_closed(m, j, x)
    return norm_sum_series(m, j, x)


def number_ratio(m: int, j: int, x: float) -> float:
    """``x S_{j-1}(x) / S_j(x)``, the mean photon number of the normalized MCS.

    The ``x -> 0`` limit is ``j mod m`` (the extremal state ``|j>``).
    """
    j %= m
    if x == 0.0:
        return float(j)
    return x * norm_sum(m, j - 1, x) / norm_sum(m, j, x)


def normalization(m: int, j: int, r: float) -> float:
    """The normalizing constant of the MCS with ``|z| = r``."""
    if r < 0:
        raise ValueError("r must be non-negative")
    s = norm_sum(m, j, r * r)
    if s == 0.0:
        raise ValueError(f"MCS with j={j} vanishes at r=0; no normalization")
    return 1.0 / math.sqrt(s)


def normalization_series(m: int, j: int, r: float) -> float:
    return 1.0 / math.sqrt(norm_sum_series(m, j, r * r))


# -- states ----------------------------------------------------------------


def mcs_series(m: int, j: int, z: complex, dim: int) -> np.ndarray:
    """Unnormalized ``sum_{k = j mod m} z**k / sqrt(k!) |k>`` on ``dim`` states."""
    c = coherent_series(z, dim)
    c[np.arange(dim) % m != j % m] = 0.0
    return c


def build_mcs(spec: McsSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> McsState:
    dim = policy.size(abs(spec.z), spec.m)
    if dim <= spec.j:
        raise ValueError(f"truncation {dim} cannot hold |{spec.j}>")
    raw = FockVector(mcs_series(spec.m, spec.j, spec.z, dim))
    if spec.z == 0 and spec.j > 0:
        # the series vanishes identically; the eigenstate is the extremal |j>
        vec = FockVector.basis(spec.j, dim)
        return McsState(spec, vec, math.inf)
    require_tail(raw, policy, f"MCS m={spec.m} j={spec.j} z={spec.z}")
    norm = raw.norm()
    return McsState(spec, raw * (1.0 / norm), 1.0 / norm)


def scs_decomposition(spec: McsSpec) -> list[ScsComponent]:
    """Write the MCS as ``m`` standard coherent states on the circle ``|label| = |z|``.

    Labels are ``z w**n`` with ``w = exp(2 pi i / m)``; weights are
    ``Nc exp(|z|^2 / 2) w**(-n j) / m`` so that summing normalized coherent
    states with these weights reproduces :func:`build_mcs`.
    """
    m, j, z = spec.m, spec.j, spec.z
    x = spec.x
    s = norm_sum(m, j, x)
    if s == 0.0:
        raise ValueError("the MCS at z=0 with j>0 is a number state, not a coherent-state sum")
    scale = math.exp(x / 2.0) / (m * math.sqrt(s))
    out = []
    for n in range(m):
        w = cmath.exp(2j * math.pi * n / m)
        out.append(ScsComponent(label=z * w, weight=scale * w ** (-j)))
    return out


def coherent_state(alpha: complex, dim: int) -> FockVector:
    """Normalized standard coherent state, truncated to ``dim`` states."""
    return FockVector(math.exp(-abs(alpha) ** 2 / 2.0) * coherent_series(alpha, dim))


def reassemble(components: list[ScsComponent], dim: int) -> FockVector:
    total = np.zeros(dim, dtype=complex)
    for comp in components:
        total += comp.weight * coherent_state(comp.label, dim).coeffs
    return FockVector(total)


# -- observables: closed forms ---------------------------------------------


def s_moments(spec: McsSpec, k: int) -> tuple[float, float]:
    """``(<s>, <s^2>)`` for the quadrature ``s = q`` (``k = 0``) or ``p`` (``k = 1``)."""
    if k not in (0, 1):
        raise ValueError("k must be 0 (position) or 1 (momentum)")
    z, m = spec.z, spec.m
    sign = -1.0 if k else 1.0
    if m == 1:
        mean = math.sqrt(2.0) * (z.imag if k else z.real)
    else:
        mean = 0.0
    delta = 1.0 if m in (1, 2) else 0.0
    second = number_ratio(m, spec.j, spec.x) + 0.5 + sign * (z.real**2 - z.imag**2) * delta
    return mean, second


def hur(spec: McsSpec) -> float:
    """The uncertainty product ``sigma_q sigma_p``."""
    q1, q2 = s_moments(spec, 0)
    p1, p2 = s_moments(spec, 1)
    return math.sqrt(max(q2 - q1 * q1, 0.0) * max(p2 - p1 * p1, 0.0))


def mandel_q(spec: McsSpec) -> float:
    m, j, x = spec.m, spec.j, spec.x
    if spec.z == 0 and j == 0:
        raise ValueError("Mandel Q is undefined at zero mean photon number")
    return number_ratio(m, j - 1, x) - number_ratio(m, j, x)


def geometric_phase_scalar(spec: McsSpec) -> float:
    """Geometric phase acquired over the partial loop of period ``2 pi / m``."""
    m, j = spec.m, spec.j
    ground = j + 0.5
    return -(2.0 * math.pi / m) * ground + (2.0 * math.pi / m) * (number_ratio(m, j, spec.x) + 0.5)


# -- observables: Fock-space oracle ----------------------------------------


def s_moments_oracle(spec: McsSpec, k: int, policy: TruncationPolicy = DEFAULT_POLICY):
    return quadrature_moments(build_mcs(spec, policy).vector, k)


def quadrature_moments(v: FockVector, k: int) -> tuple[float, float]:
    """``(<s>, <s^2>)`` of a normalized vector from ladder moments."""
    sign = -1.0 if k else 1.0
    a1 = moment(v, 0, 1)
    a2 = moment(v, 0, 2)
    n1 = moment(v, 1, 1).real
    mean = ((a1 + sign * a1.conjugate()) / (math.sqrt(2.0) * 1j**k)).real
    second = (sign * 2.0 * a2.real + 2.0 * n1 + 1.0) / 2.0
    return mean, second


def hur_oracle(spec: McsSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    v = build_mcs(spec, policy).vector
    q1, q2 = quadrature_moments(v, 0)
    p1, p2 = quadrature_moments(v, 1)
    return math.sqrt(max(q2 - q1 * q1, 0.0) * max(p2 - p1 * p1, 0.0))


def mandel_q_of(v: FockVector) -> float:
    n1 = moment(v, 1, 1).real
    if n1 <= 0.0:
        raise ValueError("Mandel Q is undefined at zero mean photon number")
    n2 = moment(v, 2, 2).real
    return (n2 - n1 * n1) / n1


def mandel_q_oracle(spec: McsSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    if spec.z == 0 and spec.j == 0:
        raise ValueError("Mandel Q is undefined at zero mean photon number")
    return mandel_q_of(build_mcs(spec, policy).vector)
