"""Invariant suites behind ``susyphoton verify``.

Each check reduces a sweep to its worst measured value and compares it
with a tolerance.  ``quick`` runs a thin sweep in a few seconds; ``full``
covers the complete acceptance sweep, including every Wigner grid at full
resolution.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import dynamics, fock_core, phase_space, scalar_mcs, susy_states
from .fock_core import DEFAULT_POLICY, FockVector
from .scalar_mcs import McsSpec
from .susy_states import SusySpec

#: figure-caption k2 values where Q crosses zero, keyed by (m, j) for |z| = 1, 2, 3
CAPTION_ROOTS = {
    (1, 0): (1.6, 0.97561, 0.66298),
    (2, 0): (1.598698, 1.604011, 1.43425),
    (2, 1): (2.586, 0.951075, 0.48326),
    (3, 0): (-0.351633, 0.6805165, 1.386432),
    (3, 1): (-2.94005, 0.111063, 0.48317),
    (3, 2): (-2.116, -0.419157, -0.206622),
}


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    detail: str = ""

    def __post_init__(self):
        self.measured = float(self.measured)
        self.tolerance = float(self.tolerance)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.measured) and self.measured <= self.tolerance


@dataclass
class Report:
    level: str
    checks: list[Check] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "ok": self.ok,
            "elapsed_s": round(self.elapsed, 3),
            "checks": [dict(asdict(c), passed=c.passed) for c in self.checks],
            "failures": [c.name for c in self.checks if not c.passed],
        }


def rel_err(a: float, b: float) -> float:
    """``|a - b| / max(|b|, 1)``: relative for large values, absolute near zero."""
    return abs(a - b) / max(abs(b), 1.0)


def _worst(name: str, values, tol: float, detail: str = "") -> Check:
    vals = list(values)
    return Check(name, max(vals) if vals else 0.0, tol, detail)


def _sweep(level: str):
    if level == "quick":
        zs = [r * u for r in (0.5, 2.0) for u in (1, 1j)]
        k2s = (-2.0, 1.0)
    else:
        zs = [r * u for r in (0.5, 1.0, 2.0, 3.0) for u in (1, 1j)]
        k2s = (-2.0, 0.0, 1.0)
    return zs, k2s


def _susy_specs(level: str):
    zs, k2s = _sweep(level)
    for m in (1, 2, 3):
        for j in range(m):
            for z in zs:
                for k2 in k2s:
                    yield SusySpec(m, j, z, k2, 1.0, 1.0)


def _scalar_specs(level: str):
    zs = [r * u for r in (0.25, 0.5, 1, 2, 3) for u in (1, 1j, np.exp(1j * math.pi / 4))]
    if level == "quick":
        zs = zs[::3]
    for m in (1, 2, 3):
        for j in range(m):
            for z in zs:
                yield McsSpec(m, j, z)


# -- suites ------------------------------------------------------------------


def fock_checks(level: str) -> list[Check]:
    out = [Check(f"pha residual m={m}", fock_core.check_pha(m, 16 * m), 1e-9) for m in (1, 2, 3)]
    dim = 24
    leaks = 0
    for m in (1, 2, 3):
        for j in range(m):
            for n in range(dim):
                v = fock_core.FockVector.basis(n, dim)
                img = fock_core.power_annihilate(v, m)
                if img.norm() and fock_core.subspace_index(img, m) != n % m:
                    leaks += 1
    out.append(Check("scalar a^m keeps each subspace", leaks, 0))
    return out


def scalar_checks(level: str, policy=DEFAULT_POLICY) -> list[Check]:
    eig, recon, closed = [], [], []
    for spec in _scalar_specs(level):
        st = scalar_mcs.build_mcs(spec, policy)
        v = st.vector
        eig.append((fock_core.power_annihilate(v, spec.m) - v * (spec.z ** spec.m)).norm())
        recon.append(float(np.max(np.abs(scalar_mcs.reassemble(scalar_mcs.scs_decomposition(spec), v.dim).coeffs
                                          - v.coeffs))))
        for pol in (policy, policy.doubled()):
            vv = scalar_mcs.build_mcs(spec, pol).vector
            closed.append(rel_err(scalar_mcs.normalization(spec.m, spec.j, abs(spec.z)), st.norm_const))
            for k in (0, 1):
                a = scalar_mcs.s_moments(spec, k)
                b = scalar_mcs.quadrature_moments(vv, k)
                closed += [rel_err(a[0], b[0]), rel_err(a[1], b[1])]
            closed.append(rel_err(scalar_mcs.mandel_q(spec), scalar_mcs.mandel_q_of(vv)))
        closed.append(rel_err(scalar_mcs.geometric_phase_scalar(spec),
                              dynamics.loop_check(v, spec.m, spec.j, 1.0, dynamics.SCALAR).geometric_phase))
    limits = [abs(scalar_mcs.hur(McsSpec(m, j, 1e-4)) - (j + 0.5)) for m in (1, 2, 3) for j in range(m)]
    rng = np.random.default_rng(7)
    scs = [abs(scalar_mcs.hur(McsSpec(1, 0, complex(*rng.uniform(-2.1, 2.1, 2)))) - 0.5) for _ in range(20)]
    return [
        _worst("MCS eigen-residual", eig, 1e-9),
        _worst("SCS-circle reassembly", recon, 1e-10),
        _worst("scalar closed forms vs oracle (N and 2N)", closed, 1e-9),
        _worst("scalar HUR limit j+1/2 at |z|=1e-4", limits, 1e-6),
        _worst("SCS HUR = 1/2", scs, 1e-10),
        Check("m=2 |Q| at |z|^2=5", max(abs(scalar_mcs.mandel_q(McsSpec(2, j, math.sqrt(5)))) for j in (0, 1)), 1e-3),
    ]


def susy_checks(level: str, policy=DEFAULT_POLICY) -> list[Check]:
    eig, eig_alt, closed = [], [], []
    for spec in _susy_specs(level):
        s = susy_states.build_supercoherent(spec, policy)
        eig.append(susy_states.eigen_residual(s, spec.k2, spec.m, spec.z))
        alt = susy_states.build_supercoherent_alt(spec, 1.0, 1.0, policy)
        eig_alt.append(susy_states.eigen_residual(alt, spec.k2, spec.m, spec.z))
        for pol in (policy, policy.doubled()):
            so = susy_states.build_supercoherent(spec, pol)
            raw = susy_states.raw_supercoherent(spec, pol.size(abs(spec.z), spec.m))
            closed.append(rel_err(susy_states.susy_normalization(spec), 1.0 / raw.norm()))
            for k in (0, 1):
                a = susy_states.s_moments_susy(spec, k)
                b = susy_states.spinor_quadrature_moments(so, k)
                closed += [rel_err(a[0], b[0]), rel_err(a[1], b[1])]
            closed.append(rel_err(susy_states.mandel_q_susy(spec), susy_states.mandel_q_spinor(so)))
            closed.append(rel_err(susy_states.mean_energy_susy(spec), susy_states.mean_energy_spinor(so)))
    inv = sum(susy_states.check_subspace_invariance(m, k2, 20) for m in (1, 2, 3) for k2 in (-2.0, 1.0))
    kz = SusySpec(1, 0, 0.7 - 1.1j, 0.0)
    return [
        _worst("supercoherent eigen-residual", eig, 1e-10),
        _worst("alternative-family eigen-residual", eig_alt, 1e-10),
        _worst("SUSY closed forms vs oracle (N and 2N)", closed, 1e-8),
        Check("A^m keeps each spinor subspace", inv, 0),
        Check("SUSY m=1 k2=0 HUR = 1/2", abs(susy_states.hur_susy(kz) - 0.5), 1e-10),
    ]


def root_checks(level: str) -> list[Check]:
    dists = []
    items = CAPTION_ROOTS.items() if level == "full" else list(CAPTION_ROOTS.items())[::2]
    for (m, j), caps in items:
        for r, target in zip((1.0, 2.0, 3.0), caps):
            roots = susy_states.mandel_k2_roots(m, j, r)
            dists.append(min((abs(x - target) for x in roots), default=math.inf))
    return [_worst("caption k2 roots of Q", dists, 1e-3)]


def ceiling_check(level: str) -> list[Check]:
    step = 0.05 if level == "full" else 0.25
    axis = np.arange(-3.0, 3.0 + step / 2, step)
    best = max(susy_states.hur_susy(SusySpec(1, 0, complex(a, b), 50.0)) for a in axis for b in axis)
    return [Check("SUSY m=1 k2=50 HUR maximum in [1.4, 1.6]", abs(best - 1.5), 0.1, f"max={best:.6f}")]


def dynamics_checks(level: str, policy=DEFAULT_POLICY) -> list[Check]:
    fid, phi, beta = [], [], []
    for spec in _susy_specs(level):
        s = susy_states.build_supercoherent(spec, policy)
        rep = dynamics.loop_check(s, spec.m, spec.j)
        fid.append(1.0 - rep.fidelity)
        phi.append(dynamics.phase_distance(rep.total_phase, -2 * math.pi * spec.j / spec.m))
        beta.append(rel_err(dynamics.geometric_phase_closed(spec), rep.geometric_phase))
    for spec in _scalar_specs(level):
        rep = dynamics.scalar_loop(spec)
        fid.append(1.0 - rep.fidelity)
    steps = 10_000 if level == "full" else 2_000
    integ = []
    for spec in (SusySpec(2, 0, 1.0, 1.0), SusySpec(3, 2, 1 + 1j, -2.0)):
        s = susy_states.build_supercoherent(spec, policy)
        integ.append(rel_err(dynamics.geometric_phase_closed(spec),
                             dynamics.geometric_phase_integral(s, spec.m, spec.j, steps=steps)))
    mc = McsSpec(2, 0, 1.0)
    integ.append(rel_err(dynamics.geometric_phase_closed(mc),
                         dynamics.geometric_phase_integral(scalar_mcs.build_mcs(mc, policy).vector, 2, 0,
                                                           kind=dynamics.SCALAR, steps=steps)))
    radii = np.linspace(0.0, 3.0, 13 if level == "full" else 4)
    angles = np.linspace(0.0, 2 * math.pi, 9 if level == "full" else 3)[:-1]
    lattice = [SusySpec(m, j, r * np.exp(1j * t), 0.0) for m in (1, 2, 3) for j in range(m)
               for r in radii for t in angles]
    sweep = dynamics.geometric_phase_sweep(lattice, (-4.0, 0.0, 2.0))
    worst_gap = max((row.beta_ref - row.beta for row in sweep.rows), default=0.0)
    return [
        _worst("loop infidelity at tau", fid, 1e-10),
        _worst("SUSY loop phase = -2 pi j/m", phi, 1e-10),
        _worst("beta closed form vs loop expectation", beta, 1e-8),
        _worst("beta closed form vs trapezoid integral", integ, 1e-8),
        Check("k2=0 minimality of beta (max excess)", max(worst_gap, 0.0), 1e-9),
    ]


def wigner_checks(level: str) -> list[Check]:
    rng = np.random.default_rng(11)
    pairs = 20 if level == "full" else 4
    lattice = np.linspace(-2.0, 2.0, 5)
    Q, P = np.meshgrid(lattice, lattice, indexing="ij")
    dim = 64
    kern = []
    for _ in range(pairs):
        al = complex(*rng.uniform(-2.1, 2.1, 2))
        be = complex(*rng.uniform(-2.1, 2.1, 2))
        ca = FockVector(np.exp(-abs(al) ** 2 / 2) * fock_core.coherent_series(al, dim))
        cb = FockVector(np.exp(-abs(be) ** 2 / 2) * fock_core.coherent_series(be, dim))
        ra, rb = fock_core.create(ca), fock_core.create(cb)
        k = phase_space.GaussianPairKernel(al, be)
        kern.append(np.max(np.abs(phase_space.w_pair(k, Q, P) - phase_space.wigner_quadrature_oracle(ca, Q, P, cb))))
        kern.append(np.max(np.abs(phase_space.w_pair_cross(k, Q, P, "I")
                                  - phase_space.wigner_quadrature_oracle(ra, Q, P, cb))))
        kern.append(np.max(np.abs(phase_space.w_pair_cross(k, Q, P, "II")
                                  - phase_space.wigner_quadrature_oracle(ca, Q, P, rb))))
        kern.append(np.max(np.abs(phase_space.w_pair_deriv(k, Q, P)
                                  - phase_space.wigner_quadrature_oracle(ra, Q, P, rb))))
    grid = phase_space.GridSpec() if level == "full" else phase_space.GridSpec(nq=97, np=97)
    norms, negs, posit = [], [], []
    for spec in (McsSpec(2, 0, 2.5), McsSpec(2, 1, 2.5)):
        g = phase_space.wigner_scalar_mcs(spec, grid)
        norms.append(g.normalization_residual)
        negs.append(phase_space.negativity(g)[0])
    caption_states = [SusySpec(m, j, r, k2) for (m, j), caps in CAPTION_ROOTS.items()
                      for r, k2 in zip((1.0, 2.0, 3.0), caps)]
    if level == "quick":
        caption_states = caption_states[::6]
    # for m = 1 the component-summed W is a Gaussian times a quadratic whose minimum is
    # proportional to 1 - k2^2, so captions with |k2| < 1 cannot show negativity
    bounded = []
    for spec in caption_states:
        g = phase_space.wigner_susy(spec, grid)
        norms.append(g.normalization_residual)
        if spec.m == 1 and abs(spec.k2) < 1.0:
            bounded.append(-phase_space.negativity(g)[0])
        else:
            negs.append(phase_space.negativity(g)[0])
    for z in (0.5, 1.0 + 1.0j, 2.5):
        g = phase_space.wigner_susy(SusySpec(1, 0, z, 0.0), grid)
        norms.append(g.normalization_residual)
        posit.append(-phase_space.negativity(g)[0])
    return [
        _worst("pair kernels vs quadrature oracle", kern, 1e-8),
        _worst("Wigner grid normalization", norms, 1e-6),
        _worst("negativity of cats and caption states (min W)", negs, -1e-3),
        _worst("m=1 k2=0 non-negativity (-min W)", posit, 1e-9),
    ] + ([_worst("m=1 captions with |k2| < 1 non-negativity (-min W)", bounded, 1e-9)] if bounded else [])


SUITES = (fock_checks, scalar_checks, susy_checks, root_checks, ceiling_check, dynamics_checks, wigner_checks)


def run(level: str = "quick") -> Report:
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    start = time.perf_counter()
    report = Report(level)
    for suite in SUITES:
        try:
            report.checks.extend(suite(level))
        except Exception as exc:  # a crashing suite is a failed suite
            report.checks.append(Check(f"{suite.__name__} raised", math.inf, 0.0, repr(exc)))
    report.elapsed = time.perf_counter() - start
    return report

