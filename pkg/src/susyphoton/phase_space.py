"""Wigner functions of coherent-state superpositions and of general Fock vectors.

Every state handled here in closed form is a finite superposition of
normalized coherent states ``|l>`` and their images ``a^dagger |l>``.  The
Wigner function of such a mixture is a double sum of Gaussian pair kernels:
for the bra label ``alpha`` and the ket label ``beta``

    W_{alpha,beta}(q, p) = (1/pi) exp(-A^2 - B^2 + alpha* beta - (|alpha|^2 + |beta|^2)/2),
    A = q - (beta + alpha*)/sqrt(2),   B = p - (beta - alpha*)/(sqrt(2) i).

Putting ``a^dagger`` on the bra multiplies it by ``sqrt(2)(q + ip) - beta``
(variant I); on the ket, by ``sqrt(2)(q - ip) - alpha*`` (variant II); on
both, by the product of the two factors minus one.

The independent check is :func:`wigner_quadrature_oracle`, which expands
the wavefunction in Hermite functions and does the defining integral by
Gauss-Hermite quadrature.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .fock_core import DEFAULT_POLICY, FockVector, TruncationPolicy
from .scalar_mcs import McsSpec, build_mcs, scs_decomposition
from .susy_states import (
    SpinorState,
    SusySpec,
    build_supercoherent,
    susy_normalization,
    tilde_amplitudes,
)

SQRT2 = math.sqrt(2.0)

#: largest Fock dimension accepted by the quadrature oracle
ORACLE_MAX_DIM = 128

#: below this |z| the coherent-state sums cancel badly; use the Fock path
SMALL_Z = 0.2

#: grids whose normalization is off by more than this are rejected
GRID_REJECT = 1e-3

#: largest imaginary residue tolerated in an assembled mixture
IMAG_TOL = 1e-12

PLAIN, RAISED = "plain", "raised"


@dataclass(frozen=True)
class GaussianPairKernel:
    alpha: complex  # bra label
    beta: complex  # ket label


@dataclass(frozen=True)
class WignerGrid:
    q_min: float
    q_max: float
    p_min: float
    p_max: float
    nq: int
    np: int
    values: np.ndarray = field(repr=False)
    cell_area: float

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != (self.nq, self.np):
            raise ValueError(f"values must have shape ({self.nq}, {self.np}), got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("Wigner values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def q_axis(self) -> np.ndarray:
        return _centers(self.q_min, self.q_max, self.nq)

    @property
    def p_axis(self) -> np.ndarray:
        return _centers(self.p_min, self.p_max, self.np)

    @property
    def total(self) -> float:
        return float(self.values.sum() * self.cell_area)

    @property
    def normalization_residual(self) -> float:
        return abs(self.total - 1.0)


@dataclass(frozen=True)
class GridSpec:
    """Where to sample: ``[q_min, q_max] x [p_min, p_max]`` with cell-centered points."""

    q_min: float = -8.0
    q_max: float = 8.0
    p_min: float = -8.0
    p_max: float = 8.0
    nq: int = 257
    np: int = 257

    def __post_init__(self):
        if self.nq < 1 or self.np < 1:
            raise ValueError("grid resolution must be positive")
        if not (self.q_max > self.q_min and self.p_max > self.p_min):
            raise ValueError("grid ranges must be non-empty")

    @property
    def cell_area(self) -> float:
        return (self.q_max - self.q_min) / self.nq * (self.p_max - self.p_min) / self.np


def _centers(lo: float, hi: float, n: int) -> np.ndarray:
    step = (hi - lo) / n
    return lo + step * (np.arange(n) + 0.5)


def thread_count() -> int:
    """Worker threads for grid evaluation, capped by ``SUSYPHOTON_THREADS``."""
    cap = os.environ.get("SUSYPHOTON_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ValueError(f"SUSYPHOTON_THREADS must be an integer, got {cap!r}") from None
    return n


# -- kernels ---------------------------------------------------------------


def _gauss(alpha: complex, beta: complex, q, p):
    ac = complex(alpha).conjugate()
    beta = complex(beta)
    A = q - (beta + ac) / SQRT2
    B = p - (beta - ac) / (SQRT2 * 1j)
    log_amp = ac * beta - (abs(alpha) ** 2 + abs(beta) ** 2) / 2.0
    return np.exp(-A * A - B * B + log_amp) / math.pi


def w_pair(kernel: GaussianPairKernel, q, p):
    return _gauss(kernel.alpha, kernel.beta, np.asarray(q, float), np.asarray(p, float))


def w_pair_cross(kernel: GaussianPairKernel, q, p, variant: str):
    """``a^dagger`` on the bra (``"I"``) or on the ket (``"II"``)."""
    q, p = np.asarray(q, float), np.asarray(p, float)
    w = _gauss(kernel.alpha, kernel.beta, q, p)
    if variant == "I":
        return (SQRT2 * (q + 1j * p) - kernel.beta) * w
    if variant == "II":
        return (SQRT2 * (q - 1j * p) - complex(kernel.alpha).conjugate()) * w
    raise ValueError(f"variant must be 'I' or 'II', got {variant!r}")


def w_pair_deriv(kernel: GaussianPairKernel, q, p):
    """``a^dagger`` on both sides: the kernel of the derivative states."""
    q, p = np.asarray(q, float), np.asarray(p, float)
    w = _gauss(kernel.alpha, kernel.beta, q, p)
    bra = SQRT2 * (q + 1j * p) - kernel.beta
    ket = SQRT2 * (q - 1j * p) - complex(kernel.alpha).conjugate()
    return (bra * ket - 1.0) * w


@dataclass(frozen=True)
class MixtureTerm:
    """``coef * |label>`` (kind ``plain``) or ``coef * a^dagger |label>`` (kind ``raised``)."""

    coef: complex
    label: complex
    kind: str = PLAIN


def _pair_value(bra: MixtureTerm, ket: MixtureTerm, q, p):
    k = GaussianPairKernel(bra.label, ket.label)
    if bra.kind == PLAIN and ket.kind == PLAIN:
        w = w_pair(k, q, p)
    elif bra.kind == RAISED and ket.kind == PLAIN:
        w = w_pair_cross(k, q, p, "I")
    elif bra.kind == PLAIN and ket.kind == RAISED:
        w = w_pair_cross(k, q, p, "II")
    else:
        w = w_pair_deriv(k, q, p)
    return np.conj(bra.coef) * ket.coef * w


def mixture_values(terms: list[MixtureTerm], q, p) -> np.ndarray:
    """Complex Wigner sum over all ordered pairs of terms."""
    q, p = np.asarray(q, float), np.asarray(p, float)
    total = np.zeros(np.broadcast(q, p).shape, dtype=complex)
    for bra in terms:
        for ket in terms:
            total += _pair_value(bra, ket, q, p)
    return total


# -- grid evaluation -------------------------------------------------------


def _evaluate_rows(row_fn, grid: GridSpec, threads: int | None) -> np.ndarray:
    """Fill an ``nq x np`` array by calling ``row_fn(q, p_axis)`` per row.

    Rows are independent, so the result does not depend on scheduling.
    """
    qs = _centers(grid.q_min, grid.q_max, grid.nq)
    ps = _centers(grid.p_min, grid.p_max, grid.np)
    out = np.empty((grid.nq, grid.np), dtype=complex)

    def work(i):
        out[i] = row_fn(qs[i], ps)

    n = threads if threads is not None else thread_count()
    if n <= 1:
        for i in range(grid.nq):
            work(i)
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            list(pool.map(work, range(grid.nq)))
    return out


def _finish(values: np.ndarray, grid: GridSpec, check_norm: bool = True) -> WignerGrid:
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if residue > IMAG_TOL:
        raise ArithmeticError(f"Wigner mixture has imaginary residue {residue:.2e}")
    out = WignerGrid(grid.q_min, grid.q_max, grid.p_min, grid.p_max, grid.nq, grid.np,
                     values.real, grid.cell_area)
    if check_norm and out.normalization_residual > GRID_REJECT:
        raise ValueError(
            f"grid captures only {out.total:.6f} of the quasi-probability; enlarge the q/p ranges"
        )
    return out


def wigner_mixture(terms: list[MixtureTerm], grid: GridSpec = GridSpec(),
                   threads: int | None = None) -> WignerGrid:
    return _finish(_evaluate_rows(lambda q, ps: mixture_values(terms, q, ps), grid, threads), grid)


def mcs_terms(spec: McsSpec) -> list[MixtureTerm]:
    return [MixtureTerm(c.weight, c.label) for c in scs_decomposition(spec)]


def susy_terms(spec: SusySpec) -> tuple[list[MixtureTerm], list[MixtureTerm]]:
    """Coherent-state expansions of the normalized upper and lower components."""
    t = tilde_amplitudes(spec)
    m, j, p, z = spec.m, spec.j, spec.p, spec.z
    scale = math.exp(spec.x / 2.0) / m * susy_normalization(spec)
    upper, lower = [], []
    for n in range(m):
        w = np.exp(2j * math.pi * n / m)
        lam = z * w
        upper.append(MixtureTerm(t.a_tilde * scale * w ** (-j), lam, PLAIN))
        upper.append(MixtureTerm(-spec.k2 * t.c_tilde * scale * w ** (-p), lam, RAISED))
        lower.append(MixtureTerm(t.c_tilde * scale * w ** (-p), lam, PLAIN))
    return upper, lower


def wigner_scalar_mcs(spec: McsSpec, grid: GridSpec = GridSpec(), threads: int | None = None,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> WignerGrid:
    if abs(spec.z) < SMALL_Z:
        return wigner_fock(build_mcs(spec, policy).vector, grid, threads)
    return wigner_mixture(mcs_terms(spec), grid, threads)


def wigner_susy(spec: SusySpec, grid: GridSpec = GridSpec(), threads: int | None = None,
                policy: TruncationPolicy = DEFAULT_POLICY) -> WignerGrid:
    """Spinor Wigner function: the sum of the two component Wigner functions."""
    if abs(spec.z) < SMALL_Z:
        return wigner_spinor_fock(build_supercoherent(spec, policy), grid, threads)
    upper, lower = susy_terms(spec)

    def row(q, ps):
        return mixture_values(upper, q, ps) + mixture_values(lower, q, ps)

    return _finish(_evaluate_rows(row, grid, threads), grid)


# -- quadrature oracle -----------------------------------------------------


def hermite_functions(x, dim: int) -> np.ndarray:
    """Hermite functions without their Gaussian factor, shape ``(dim,) + x.shape``.

    ``h_0 = pi^(-1/4)``, ``h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}``;
    the position wavefunction of ``|n>`` is ``h_n(x) exp(-x^2/2)``.
    """
    x = np.asarray(x, float)
    out = np.empty((dim,) + x.shape)
    out[0] = math.pi ** -0.25
    if dim > 1:
        out[1] = SQRT2 * x * out[0]
    for n in range(1, dim - 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def wavefunction(v: FockVector, x) -> np.ndarray:
    x = np.asarray(x, float)
    return np.tensordot(v.coeffs, hermite_functions(x, v.dim), axes=1) * np.exp(-x * x / 2.0)


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.nonzero(np.abs(c) > 1e-18 * max(float(np.max(np.abs(c))), 1e-300))[0]
    return c[: nz[-1] + 1] if nz.size else c[:1]


# numpy's Gauss-Hermite weights underflow to nan beyond roughly 400 nodes
_MAX_NODES = 380


def _node_count(dim: int, p_max: float) -> int:
    """Nodes for the oracle: ``2N + 16`` for the polynomial part plus ``1.5 p^2`` for the oscillation."""
    n = 2 * dim + 16 + int(math.ceil(1.5 * p_max * p_max))
    if n > _MAX_NODES:
        raise ValueError(f"quadrature needs {n} nodes (N={dim}, |p|={p_max:g}); limit is {_MAX_NODES}")
    return n


def _cross_row(bra: np.ndarray, ket: np.ndarray, q: float, ps: np.ndarray) -> np.ndarray:
    """``(1/pi) int conj(psi_bra(q+y)) psi_ket(q-y) exp(2ipy) dy`` for every ``p`` in ``ps``."""
    dim = max(bra.size, ket.size)
    if dim > ORACLE_MAX_DIM:
        raise ValueError(f"quadrature oracle is limited to N <= {ORACLE_MAX_DIM}, got {dim}")
    y, w = hermgauss(_node_count(dim, float(np.max(np.abs(ps))) if ps.size else 0.0))
    left = np.conj(bra) @ hermite_functions(q + y, bra.size)
    right = ket @ hermite_functions(q - y, ket.size)
    weights = w * math.exp(-q * q) * left * right
    return np.exp(2j * np.outer(ps, y)) @ weights / math.pi


def wigner_quadrature_oracle(v: FockVector, q, p, ket: FockVector | None = None):
    """Wigner function of ``v`` (or the cross function ``<v| ... |ket>``) at ``(q, p)``.

    ``q`` and ``p`` broadcast against each other.  Raises for ``N > 128``.
    """
    bra_c = _trim(v.coeffs)
    ket_c = bra_c if ket is None else _trim(ket.coeffs)
    q, p = np.broadcast_arrays(np.asarray(q, float), np.asarray(p, float))
    out = np.empty(q.shape, dtype=complex)
    flat_q, flat_p, flat_out = q.reshape(-1), p.reshape(-1), out.reshape(-1)
    for i in range(flat_q.size):
        flat_out[i] = _cross_row(bra_c, ket_c, float(flat_q[i]), flat_p[i:i + 1])[0]
    return out.real if ket is None else out


def wigner_fock(v: FockVector, grid: GridSpec = GridSpec(), threads: int | None = None) -> WignerGrid:
    """Grid Wigner function of a Fock vector by the quadrature path."""
    c = _trim(v.coeffs / v.norm())
    return _finish(_evaluate_rows(lambda q, ps: _cross_row(c, c, q, ps), grid, threads), grid)


def wigner_spinor_fock(s: SpinorState, grid: GridSpec = GridSpec(), threads: int | None = None) -> WignerGrid:
    nrm = s.norm()
    up, lo = _trim(s.upper.coeffs / nrm), _trim(s.lower.coeffs / nrm)

    def row(q, ps):
        return _cross_row(up, up, q, ps) + _cross_row(lo, lo, q, ps)

    return _finish(_evaluate_rows(row, grid, threads), grid)


def spinor_quadrature_oracle(s: SpinorState, q, p) -> np.ndarray:
    nrm = s.norm()
    return (wigner_quadrature_oracle(s.upper * (1 / nrm), q, p)
            + wigner_quadrature_oracle(s.lower * (1 / nrm), q, p))


# -- diagnostics -----------------------------------------------------------


def negativity(grid: WignerGrid) -> tuple[float, float]:
    """``(min value, integrated |W| over negative cells)``."""
    vals = grid.values
    neg = vals[vals < 0]
    return float(vals.min()), float(-neg.sum() * grid.cell_area)


def marginal_residual(grid: WignerGrid, v: FockVector, rows: int = 9) -> float:
    """Max deviation of ``sum_p W dp`` from ``|psi(q)|^2`` over evenly spread q-rows."""
    idx = np.linspace(0, grid.nq - 1, rows).round().astype(int)
    dp = (grid.p_max - grid.p_min) / grid.np
    marg = grid.values[idx].sum(axis=1) * dp
    dens = np.abs(wavefunction(v * (1 / v.norm()), grid.q_axis[idx])) ** 2
    return float(np.max(np.abs(marg - dens)))


def lobe_centers(grid: WignerGrid, count: int, exclusion: float = 1.0) -> list[tuple[float, float]]:
    """Positions of the ``count`` highest local maxima, at least ``exclusion`` apart."""
    vals = grid.values
    order = np.argsort(vals, axis=None)[::-1]
    qa, pa = grid.q_axis, grid.p_axis
    found: list[tuple[float, float]] = []
    for flat in order:
        i, k = np.unravel_index(flat, vals.shape)
        pt = (float(qa[i]), float(pa[k]))
        if all(math.hypot(pt[0] - a, pt[1] - b) >= exclusion for a, b in found):
            found.append(pt)
            if len(found) == count:
                break
    return found
