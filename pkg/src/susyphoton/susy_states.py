"""Spinor states of the supersymmetric oscillator and its multiphoton supercoherent states.

A spinor is a pair ``(upper, lower)``: ``upper[n]`` is the amplitude of
``(|n>, 0)`` with energy ``n w`` and ``lower[k]`` that of ``(0, |k>)`` with
energy ``(k + 1) w``.  The supercoherent states are eigenvectors of

    A^m = [[a^m, m k2 a^(m-1)], [0, a^m]]

with eigenvalue ``z**m``.  In terms of the unnormalized MCS series
``phi_j`` (see :mod:`scalar_mcs`) they read

    upper = at phi_j - k2 ct phi'_j,        lower = ct phi_p,   p = j - 1 mod m,

where ``phi'_j = d phi_j / dz = a^dagger phi_p``.  All closed forms below are
polynomials in ``x = |z|^2`` times the subspace sums ``S_k(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .fock_core import (
    DEFAULT_POLICY,
    FockVector,
    TruncationPolicy,
    annihilate,
    coherent_series,
    create,
    log_sqrt_factorial,
    power_annihilate,
    require_tail,
)
from .scalar_mcs import m_sub_j, mcs_series, norm_sum

#: angular frequency used when a caller does not pass one
OMEGA = 1.0


@dataclass(frozen=True)
class SpinorState:
    upper: FockVector
    lower: FockVector

    def __post_init__(self):
        if self.upper.dim != self.lower.dim:
            raise ValueError(f"spinor components differ in size: {self.upper.dim} vs {self.lower.dim}")

    @property
    def dim(self) -> int:
        return self.upper.dim

    @classmethod
    def plus(cls, n: int, dim: int) -> "SpinorState":
        """``(|n>, 0)``, energy ``n w``."""
        return cls(FockVector.basis(n, dim), FockVector.zeros(dim))

    @classmethod
    def minus(cls, n: int, dim: int) -> "SpinorState":
        """``(0, |n-1>)``, energy ``n w`` (requires ``n >= 1``)."""
        if n < 1:
            raise ValueError("the lower ladder starts at n = 1")
        return cls(FockVector.zeros(dim), FockVector.basis(n - 1, dim))

    def norm(self) -> float:
        return math.hypot(self.upper.norm(), self.lower.norm())

    def normalized(self) -> "SpinorState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero spinor")
        return self * (1.0 / n)

    def tail_mass(self) -> float:
        total = self.norm() ** 2
        if total == 0.0:
            return 0.0
        return (self.upper.tail_mass() * self.upper.norm() ** 2
                + self.lower.tail_mass() * self.lower.norm() ** 2) / total

    def __add__(self, other: "SpinorState") -> "SpinorState":
        return SpinorState(self.upper + other.upper, self.lower + other.lower)

    def __sub__(self, other: "SpinorState") -> "SpinorState":
        return SpinorState(self.upper - other.upper, self.lower - other.lower)

    def __mul__(self, scalar) -> "SpinorState":
        return SpinorState(self.upper * scalar, self.lower * scalar)

    __rmul__ = __mul__


def spinor_inner(s: SpinorState, t: SpinorState) -> complex:
    return complex(np.vdot(s.upper.coeffs, t.upper.coeffs) + np.vdot(s.lower.coeffs, t.lower.coeffs))


@dataclass(frozen=True)
class SaoParams:
    k1: complex = 1.0
    k2: complex = 0.0
    k3: complex = 0.0
    k4: complex = 1.0


@dataclass(frozen=True)
class SusySpec:
    m: int
    j: int
    z: complex
    k2: float
    a: complex = 1.0
    c: complex = 1.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if int(self.j) != self.j or not 0 <= self.j < self.m:
            raise ValueError(f"j must satisfy 0 <= j < m, got j={self.j}, m={self.m}")
        if isinstance(self.k2, complex) or not math.isfinite(float(self.k2)):
            raise ValueError("k2 must be a finite real number")
        if self.a == 0 and self.c == 0:
            raise ValueError("the amplitudes a_j and c_mj cannot both vanish")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "j", int(self.j))
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "k2", float(self.k2))
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def x(self) -> float:
        return abs(self.z) ** 2

    @property
    def mj(self) -> int:
        return m_sub_j(self.m, self.j)

    @property
    def p(self) -> int:
        """Subspace index of the lower component, ``m_j - 1``."""
        return self.mj - 1

    @property
    def sj(self) -> int:
        return (self.j + 1) * (0 if self.j == self.m - 1 else 1)


@dataclass(frozen=True)
class TildeAmps:
    a_tilde: complex
    c_tilde: complex


# -- operators ---------------------------------------------------------------


def susy_hamiltonian_apply(s: SpinorState, omega: float = OMEGA) -> SpinorState:
    n = np.arange(s.dim)
    return SpinorState(FockVector(omega * n * s.upper.coeffs), FockVector(omega * (n + 1) * s.lower.coeffs))


def sao_apply(p: SaoParams, s: SpinorState) -> SpinorState:
    """The general four-parameter operator ``[[k1 a, k2], [k3 a^2, k4 a]]``."""
    upper = p.k1 * annihilate(s.upper) + p.k2 * s.lower
    lower = p.k3 * power_annihilate(s.upper, 2) + p.k4 * annihilate(s.lower)
    return SpinorState(upper, lower)


def sao_power_apply(k2: float, m: int, s: SpinorState) -> SpinorState:
    """``A^m`` in closed matrix form (no composition)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    down = power_annihilate(s.lower, m - 1) if m > 1 else s.lower
    upper = power_annihilate(s.upper, m) + (m * k2) * down
    return SpinorState(upper, power_annihilate(s.lower, m))


def spinor_subspace_index(s: SpinorState, m: int, tol: float = 0.0) -> int | None:
    """``j`` if every populated level has energy ``= j (mod m)``, else ``None``."""
    up = np.nonzero(np.abs(s.upper.coeffs) > tol)[0]
    lo = np.nonzero(np.abs(s.lower.coeffs) > tol)[0] + 1
    levels = np.concatenate([up, lo])
    if levels.size == 0:
        return None
    residues = np.unique(levels % m)
    return int(residues[0]) if residues.size == 1 else None


def check_subspace_invariance(m: int, k2: float, dim: int) -> int:
    """Apply ``A^m`` to every basis spinor; return the number that leave their subspace."""
    failures = 0
    for n in range(dim):
        for basis in (SpinorState.plus(n, dim), SpinorState.minus(n + 1, dim)):
            image = sao_power_apply(k2, m, basis)
            if image.norm() == 0.0:
                continue
            if spinor_subspace_index(image, m) != spinor_subspace_index(basis, m):
                failures += 1
    return failures


# -- construction --------------------------------------------------------------


def _ladder_series(alpha: complex, m: int, offset: int, dim: int) -> np.ndarray:
    """Place ``alpha**n / sqrt((m n + offset)!)`` at index ``m n + offset``."""
    out = np.zeros(dim, dtype=complex)
    if offset >= dim:
        return out
    idx = np.arange(offset, dim, m)
    terms = np.empty(idx.size, dtype=complex)
    terms[0] = math.exp(-float(log_sqrt_factorial(offset)))
    if idx.size > 1:
        # ratio between consecutive terms: alpha / sqrt((k+1)...(k+m))
        steps = np.array([np.prod(np.arange(k + 1, k + m + 1, dtype=float)) for k in idx[:-1]])
        terms[1:] = terms[0] * np.cumprod(alpha / np.sqrt(steps))
    out[idx] = terms
    return out


def raw_supercoherent(spec: SusySpec, dim: int) -> SpinorState:
    """The unnormalized spinor from the coefficient recursion, with ``alpha = z**m``."""
    m, j, mj = spec.m, spec.j, spec.mj
    alpha = spec.z**m
    fj = math.exp(float(log_sqrt_factorial(j)))
    fp = math.exp(float(log_sqrt_factorial(mj - 1)))
    lower = spec.c * fp * _ladder_series(alpha, m, mj - 1, dim)
    idx = np.arange(dim)
    upper = spec.a * fj * _ladder_series(alpha, m, j, dim)
    upper = upper - spec.k2 * spec.c * fp * (idx - j) * _ladder_series(alpha, m, mj, dim)
    return SpinorState(FockVector(upper), FockVector(lower))


def build_supercoherent(spec: SusySpec, policy: TruncationPolicy = DEFAULT_POLICY) -> SpinorState:
    dim = policy.size(abs(spec.z), spec.m)
    raw = raw_supercoherent(spec, dim)
    if raw.norm() == 0.0:
        raise ValueError(f"supercoherent state vanishes for {spec}")
    if raw.tail_mass() > policy.tail_tol:
        require_tail(raw.upper if raw.upper.tail_mass() > raw.lower.tail_mass() else raw.lower,
                     policy, f"supercoherent m={spec.m} j={spec.j} z={spec.z}")
    return raw.normalized()


def derivative_state(m: int, j: int, z: complex, dim: int) -> FockVector:
    """``d phi_j / dz`` for the unnormalized MCS series, cross-checked against ``a^dagger phi_p``."""
    if not 0 <= j < m:
        raise ValueError("need 0 <= j < m")
    base = coherent_series(z, dim)
    series = np.zeros(dim, dtype=complex)
    series[1:] = np.sqrt(np.arange(1, dim)) * base[:-1]
    series[np.arange(dim) % m != j % m] = 0.0
    ladder = create(FockVector(mcs_series(m, (j - 1) % m, z, dim))).coeffs
    scale = max(float(np.max(np.abs(series))), 1.0)
    # the ladder form loses only the top entry to truncation
    if float(np.max(np.abs(series[:-1] - ladder[:-1]))) > 1e-11 * scale:
        raise RuntimeError("series and ladder forms of the derivative state disagree")
    return FockVector(series)


def build_supercoherent_alt(spec: SusySpec, chi1: complex, chi2: complex,
                            policy: TruncationPolicy = DEFAULT_POLICY) -> SpinorState:
    """``chi1 (phi_j, 0) + chi2 (k2 z* phi_sj - k2 phi'_sj, phi_j) / sqrt(2)``, normalized.

    Built from the unnormalized series; ``phi'_sj = a^dagger phi_j``.
    """
    if chi1 == 0 and chi2 == 0:
        raise ValueError("chi1 and chi2 cannot both vanish")
    m, j, z, k2 = spec.m, spec.j, spec.z, spec.k2
    dim = policy.size(abs(z), m)
    phi_j = mcs_series(m, j, z, dim)
    phi_s = mcs_series(m, spec.sj, z, dim)
    dphi = derivative_state(m, spec.sj, z, dim).coeffs
    fermionic = SpinorState(FockVector(phi_j), FockVector.zeros(dim))
    bosonic = SpinorState(FockVector((k2 * z.conjugate() * phi_s - k2 * dphi) / math.sqrt(2.0)),
                          FockVector(phi_j / math.sqrt(2.0)))
    state = chi1 * fermionic + chi2 * bosonic
    if state.norm() == 0.0:
        raise ValueError("the combination vanishes identically")
    if state.tail_mass() > policy.tail_tol:
        require_tail(state.upper, policy, f"alternative state m={m} j={j} z={z}")
    return state.normalized()


def tilde_amplitudes(spec: SusySpec) -> TildeAmps:
    if spec.z == 0:
        raise ValueError("tilde amplitudes need z != 0; use the raw recursion at the origin")
    z, j, mj = spec.z, spec.j, spec.mj
    ct = math.sqrt(math.factorial(mj - 1)) * z ** (-(mj - 1)) * spec.c
    at = math.sqrt(math.factorial(j)) * z ** (-j) * spec.a + j * spec.k2 / z * ct
    return TildeAmps(complex(at), complex(ct))


def tilde_supercoherent(spec: SusySpec, dim: int) -> SpinorState:
    """The unnormalized spinor in tilde form; equals :func:`raw_supercoherent` for ``z != 0``."""
    t = tilde_amplitudes(spec)
    phi_j = mcs_series(spec.m, spec.j, spec.z, dim)
    phi_p = mcs_series(spec.m, spec.p, spec.z, dim)
    dphi = derivative_state(spec.m, spec.j, spec.z, dim).coeffs
    return SpinorState(FockVector(t.a_tilde * phi_j - spec.k2 * t.c_tilde * dphi),
                       FockVector(t.c_tilde * phi_p))


def eigen_residual(s: SpinorState, k2: float, m: int, z: complex) -> float:
    return (sao_power_apply(k2, m, s) - s * (z**m)).norm()


# -- closed forms ----------------------------------------------------------------


@dataclass(frozen=True)
class _Sums:
    """Unnormalized expectation sums shared by the closed forms."""

    norm: float  # <Z|Z>
    number: float  # <Z|N|Z>
    second: float  # <Z|a^dagger^2 a^2|Z>
    energy: float  # <Z|H|Z> / w


def _sums(spec: SusySpec) -> _Sums:
    t = tilde_amplitudes(spec)
    m, x, z, k2 = spec.m, spec.x, spec.z, spec.k2
    j, p = spec.j, spec.p

    def S(k):
        return norm_sum(m, k, x)

    A, C = abs(t.a_tilde) ** 2, abs(t.c_tilde) ** 2
    cross = (t.a_tilde.conjugate() * t.c_tilde * z.conjugate()).real
    K = k2 * k2
    norm = A * S(j) + C * S(p) + K * C * (x * S(p - 1) + S(p)) - 2 * k2 * S(p) * cross
    number = (A * x * S(p) + C * x * S(p - 1) + K * C * (x * x * S(p - 2) + 3 * x * S(p - 1) + S(p))
              - 2 * k2 * (x * S(p - 1) + S(p)) * cross)
    second = x * (A * x * S(p - 1) + C * x * S(p - 2)
                  + K * C * (x * x * S(p - 3) + 5 * x * S(p - 2) + 4 * S(p - 1))
                  - 2 * k2 * (x * S(p - 2) + 2 * S(p - 1)) * cross)
    energy = number + C * S(p)
    return _Sums(norm, number, second, energy)


def susy_normalization(spec: SusySpec) -> float:
    """The constant that normalizes the raw spinor; direct norm at ``z = 0``."""
    if spec.z == 0:
        return 1.0 / raw_supercoherent(spec, spec.m + 2).norm()
    return 1.0 / math.sqrt(_sums(spec).norm)


def susy_normalization_oracle(spec: SusySpec, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    raw = raw_supercoherent(spec, policy.size(abs(spec.z), spec.m))
    return 1.0 / raw.norm()


def _ladder_moments(spec: SusySpec) -> tuple[complex, complex]:
    """Unnormalized ``<a>`` and ``<a^2>`` (zero unless ``m`` divides 1 or 2)."""
    t = tilde_amplitudes(spec)
    m, x, z, k2 = spec.m, spec.x, spec.z, spec.k2
    at, ct = t.a_tilde, t.c_tilde
    A, C = abs(at) ** 2, abs(ct) ** 2
    first = 0j
    if m == 1:
        s = norm_sum(1, 0, x)
        first = s * (z * (A + C + k2 * k2 * C * (x + 2))
                     - k2 * (at.conjugate() * ct * (x + 1) + at * ct.conjugate() * z * z))
    second = 0j
    if m in (1, 2):
        j, p = spec.j, spec.p

        def S(k):
            return norm_sum(m, k, x)

        second = (z * z * (A * S(j) + C * S(p) + k2 * k2 * C * (x * S(p - 1) + 3 * S(p)))
                  - k2 * at.conjugate() * ct * z * (x * S(p) + 2 * S(j))
                  - k2 * at * ct.conjugate() * z**3 * S(p))
    return complex(first), complex(second)


def s_moments_susy(spec: SusySpec, k: int) -> tuple[float, float]:
    """``(<s>, <s^2>)`` with ``s = q`` (``k = 0``) or ``p`` (``k = 1``) on both components."""
    if k not in (0, 1):
        raise ValueError("k must be 0 (position) or 1 (momentum)")
    if spec.z == 0:
        return s_moments_susy_oracle(spec, k)
    sums = _sums(spec)
    a1, a2 = _ladder_moments(spec)
    sign = -1.0 if k else 1.0
    mean = math.sqrt(2.0) * (a1.imag if k else a1.real) / sums.norm
    second = (2 * sums.number + sums.norm + 2 * sign * a2.real) / (2 * sums.norm)
    return mean, second


def s_variance_susy(spec: SusySpec, k: int) -> float:
    mean, second = s_moments_susy(spec, k)
    return second - mean * mean


def hur_susy(spec: SusySpec) -> float:
    return math.sqrt(max(s_variance_susy(spec, 0), 0.0) * max(s_variance_susy(spec, 1), 0.0))


def mandel_q_susy(spec: SusySpec) -> float:
    if spec.z == 0:
        return mandel_q_susy_oracle(spec)
    s = _sums(spec)
    if s.number <= 1e-300:
        raise ValueError("Mandel Q is undefined at zero mean photon number")
    return s.second / s.number - s.number / s.norm


def mean_energy_susy(spec: SusySpec, omega: float = OMEGA) -> float:
    """``<H>`` of the normalized supercoherent state."""
    if spec.z == 0:
        return mean_energy_susy_oracle(spec, omega)
    s = _sums(spec)
    return omega * s.energy / s.norm


# -- oracles -----------------------------------------------------------------------


def _component_moment(v: FockVector, p: int, q: int) -> complex:
    left = power_annihilate(v, p) if p else v
    right = power_annihilate(v, q) if q else v
    return complex(np.vdot(left.coeffs, right.coeffs))


def spinor_moment(s: SpinorState, p: int, q: int) -> complex:
    """``<(a^dagger)^p a^q>`` with the boson operators acting on both components."""
    return _component_moment(s.upper, p, q) + _component_moment(s.lower, p, q)


def spinor_quadrature_moments(s: SpinorState, k: int) -> tuple[float, float]:
    norm = s.norm() ** 2
    sign = -1.0 if k else 1.0
    a1 = spinor_moment(s, 0, 1) / norm
    a2 = spinor_moment(s, 0, 2) / norm
    n1 = spinor_moment(s, 1, 1).real / norm
    mean = ((a1 + sign * a1.conjugate()) / (math.sqrt(2.0) * 1j**k)).real
    return mean, (2 * sign * a2.real + 2 * n1 + 1) / 2


def s_moments_susy_oracle(spec: SusySpec, k: int, policy: TruncationPolicy = DEFAULT_POLICY):
    return spinor_quadrature_moments(build_supercoherent(spec, policy), k)


def s_variance_susy_oracle(spec: SusySpec, k: int, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    mean, second = s_moments_susy_oracle(spec, k, policy)
    return second - mean * mean


def hur_susy_oracle(spec: SusySpec, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    s = build_supercoherent(spec, policy)
    q1, q2 = spinor_quadrature_moments(s, 0)
    p1, p2 = spinor_quadrature_moments(s, 1)
    return math.sqrt(max(q2 - q1 * q1, 0.0) * max(p2 - p1 * p1, 0.0))


def mandel_q_spinor(s: SpinorState) -> float:
    norm = s.norm() ** 2
    n1 = spinor_moment(s, 1, 1).real / norm
    if n1 <= 1e-300:
        raise ValueError("Mandel Q is undefined at zero mean photon number")
    n2 = spinor_moment(s, 2, 2).real / norm
    return (n2 - n1 * n1) / n1


def mandel_q_susy_oracle(spec: SusySpec, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    return mandel_q_spinor(build_supercoherent(spec, policy))


def mean_energy_spinor(s: SpinorState, omega: float = OMEGA) -> float:
    return spinor_inner(s, susy_hamiltonian_apply(s, omega)).real / s.norm() ** 2


def mean_energy_susy_oracle(spec: SusySpec, omega: float = OMEGA,
                            policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    return mean_energy_spinor(build_supercoherent(spec, policy), omega)


# -- Poissonian crossings ------------------------------------------------------


def mandel_k2_roots(m: int, j: int, z: complex, a: complex = 1.0, c: complex = 1.0,
                    lo: float = -5.0, hi: float = 5.0, step: float = 0.05,
                    xtol: float = 1e-7) -> list[float]:
    """All sign changes of ``Q(k2)`` on ``[lo, hi]``, scanned at ``step`` and bisected to ``xtol``."""
    if not hi > lo or step <= 0:
        raise ValueError("need lo < hi and step > 0")

    def q(k2):
        return mandel_q_susy(SusySpec(m, j, z, k2, a, c))

    grid = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    vals = [q(k) for k in grid]
    roots = []
    for k0, k1, v0, v1 in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if v0 == 0.0:
            roots.append(float(k0))
        elif v0 * v1 < 0:
            roots.append(float(bisect(q, k0, k1, xtol=xtol)))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots
