"""Time evolution, evolution loops and geometric phases.

Both Hamiltonians are diagonal in the number basis, so evolution is a phase
per coefficient.  The scalar oscillator has levels ``n + 1/2``; the
supersymmetric one has ``n w`` on the upper component and ``(k + 1) w`` on the
lower component index ``k``.  States living on levels ``= j (mod m)`` return to
themselves after ``tau = 2 pi / (w m)`` up to the phase ``exp(-2 pi i j / m)``
(times ``exp(-i pi / m)`` from the zero-point energy in the scalar case).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock_core import FockVector
from .scalar_mcs import McsSpec, build_mcs, geometric_phase_scalar
from .susy_states import (
    OMEGA,
    SpinorState,
    SusySpec,
    mean_energy_spinor,
    mean_energy_susy,
    spinor_inner,
)

SCALAR, SUSY = "scalar", "susy"

#: loops with a lower return fidelity are rejected
CYCLIC_TOL = 1e-6

# angles this close below zero are reported as zero, not as -2 pi
_SNAP = 1e-12


class NotCyclicError(ArithmeticError):
    """The state does not return to itself (up to a phase) after one period."""


@dataclass(frozen=True)
class LoopReport:
    period: float
    total_phase: float  # ladder phase, principal value in (-2 pi, 0]
    fidelity: float
    geometric_phase: float
    offset_phase: float = 0.0  # zero-point contribution (scalar states only)
    mean_energy: float = field(default=0.0)


def evolve_scalar(v: FockVector, t: float, omega: float = 1.0) -> FockVector:
    n = np.arange(v.dim)
    return FockVector(np.exp(-1j * omega * (n + 0.5) * t) * v.coeffs, v.truncation_loss)


def evolve_susy(s: SpinorState, t: float, omega: float = OMEGA) -> SpinorState:
    n = np.arange(s.dim)
    upper = FockVector(np.exp(-1j * omega * n * t) * s.upper.coeffs)
    lower = FockVector(np.exp(-1j * omega * (n + 1) * t) * s.lower.coeffs)
    return SpinorState(upper, lower)


def principal_phase(angle: float) -> float:
    """Map an angle to ``(-2 pi, 0]``."""
    r = (-angle) % (2.0 * math.pi)
    if 2.0 * math.pi - r < _SNAP:
        r = 0.0
    return -r if r else 0.0


def phase_distance(a: float, b: float) -> float:
    """Distance between two angles on the circle."""
    d = (a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def _normalize(state, kind):
    if kind == SCALAR:
        return state * (1.0 / state.norm())
    if kind == SUSY:
        return state.normalized()
    raise ValueError(f"kind must be {SCALAR!r} or {SUSY!r}, got {kind!r}")


def _overlap(a, b, kind) -> complex:
    if kind == SCALAR:
        return complex(np.vdot(a.coeffs, b.coeffs))
    return spinor_inner(a, b)


def _evolve(state, t, omega, kind):
    return evolve_scalar(state, t, omega) if kind == SCALAR else evolve_susy(state, t, omega)


def _energy(state, omega, kind) -> float:
    if kind == SCALAR:
        n = np.arange(state.dim)
        return float(omega * np.sum((n + 0.5) * np.abs(state.coeffs) ** 2))
    return mean_energy_spinor(state, omega)


def loop_check(state, m: int, j: int, omega: float = OMEGA, kind: str = SUSY) -> LoopReport:
    """Evolve over ``tau = 2 pi / (w m)`` and read off fidelity and phases.

    ``j`` is only used to label the report; the phase is measured.
    """
    if m < 1 or not 0 <= j < m:
        raise ValueError("need m >= 1 and 0 <= j < m")
    if omega <= 0:
        raise ValueError("omega must be positive")
    psi = _normalize(state, kind)
    tau = 2.0 * math.pi / (omega * m)
    overlap = _overlap(psi, _evolve(psi, tau, omega, kind), kind)
    fidelity = min(abs(overlap), 1.0)
    if fidelity < 1.0 - CYCLIC_TOL:
        raise NotCyclicError(f"not cyclic at tau={tau:.6g}: fidelity {fidelity:.3e}")
    offset = -math.pi / m if kind == SCALAR else 0.0
    phi = principal_phase(math.atan2(overlap.imag, overlap.real) - offset)
    energy = _energy(psi, omega, kind)
    beta = phi + offset + tau * energy
    return LoopReport(tau, phi, fidelity, beta, offset, energy)


def geometric_phase(state, m: int, j: int, omega: float = OMEGA, kind: str = SUSY) -> float:
    return loop_check(state, m, j, omega, kind).geometric_phase


def geometric_phase_closed(spec, omega: float = OMEGA) -> float:
    """Closed-form geometric phase for an :class:`McsSpec` or :class:`SusySpec`."""
    if isinstance(spec, McsSpec):
        return geometric_phase_scalar(spec)
    if isinstance(spec, SusySpec):
        return -2.0 * math.pi * spec.j / spec.m + (2.0 * math.pi / spec.m) * mean_energy_susy(spec, omega) / omega
    raise TypeError(f"unsupported spec type {type(spec).__name__}")


def dynamical_phase_integral(state, m: int, omega: float = OMEGA, kind: str = SUSY,
                             steps: int = 10_000) -> float:
    """Trapezoid rule for ``int_0^tau <psi(t)|H|psi(t)> dt`` over the evolved states."""
    psi = _normalize(state, kind)
    tau = 2.0 * math.pi / (omega * m)
    ts = np.linspace(0.0, tau, steps + 1)
    n = np.arange(psi.dim)
    # rows are the evolved coefficient vectors psi(t); H is applied to each row
    if kind == SCALAR:
        levels = [(n + 0.5, psi.coeffs)]
    else:
        levels = [(n, psi.upper.coeffs), (n + 1.0, psi.lower.coeffs)]
    values = np.zeros(ts.size)
    for e, c in levels:
        rows = np.exp(-1j * omega * np.outer(ts, e)) * c
        values += np.einsum("tk,tk->t", rows.conj(), omega * e * rows).real
    return float(np.trapezoid(values, ts) if hasattr(np, "trapezoid") else np.trapz(values, ts))


def geometric_phase_integral(state, m: int, j: int, omega: float = OMEGA, kind: str = SUSY,
                             steps: int = 10_000) -> float:
    """``beta = phi + int <H> dt`` with the integral done numerically."""
    rep = loop_check(state, m, j, omega, kind)
    return rep.total_phase + rep.offset_phase + dynamical_phase_integral(state, m, omega, kind, steps)


@dataclass(frozen=True)
class PhaseRow:
    z: complex
    k2: float
    beta: float
    beta_ref: float  # the k2 = 0 value at the same z


@dataclass(frozen=True)
class PhaseSweep:
    rows: list[PhaseRow]
    violations: list[PhaseRow]
    slack: float

    @property
    def ok(self) -> bool:
        return not self.violations


def geometric_phase_sweep(specs: list[SusySpec], k2_list, omega: float = OMEGA,
                          slack: float = 1e-9) -> PhaseSweep:
    """Tabulate the closed-form geometric phase over specs x k2 and flag any k2 beating k2 = 0.

    Each spec supplies ``(m, j, z, a, c)``; its own ``k2`` is ignored.
    """
    rows, bad = [], []
    for base in specs:
        ref = geometric_phase_closed(_with_k2(base, 0.0), omega)
        for k2 in k2_list:
            beta = geometric_phase_closed(_with_k2(base, float(k2)), omega)
            row = PhaseRow(base.z, float(k2), beta, ref)
            rows.append(row)
            if ref > beta + slack:
                bad.append(row)
    return PhaseSweep(rows, bad, slack)


def _with_k2(spec: SusySpec, k2: float) -> SusySpec:
    return SusySpec(spec.m, spec.j, spec.z, k2, spec.a, spec.c)


def scalar_loop(spec: McsSpec, omega: float = 1.0) -> LoopReport:
    return loop_check(build_mcs(spec).vector, spec.m, spec.j, omega, SCALAR)
