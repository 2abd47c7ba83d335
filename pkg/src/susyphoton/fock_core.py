"""Truncated Fock-space vectors and ladder-operator actions.

Everything here is deliberately brute force: coefficient arrays over the
number basis ``|0>, ..., |N-1>`` and explicit ladder arithmetic.  The
closed-form expressions elsewhere in the package are checked against these
routines, so they must stay free of any shortcut that the closed forms use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

#: number of top basis states inspected by the tail-mass diagnostic
TAIL_GUARD = 8

#: tolerance on ``<v|v> = 1`` required by :func:`moment`
NORM_TOL = 1e-10

# sqrt(n!) switches from the direct product to lgamma above this index
_LOG_SWITCH = 150


@dataclass(frozen=True)
class FockVector:
    """Complex amplitudes over a truncated number basis.

    ``truncation_loss`` accumulates the squared magnitude of any amplitude
    pushed past the top basis state by :func:`create`.
    """

    coeffs: np.ndarray
    truncation_loss: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex, copy=True).reshape(-1)
        if c.size < 1:
            raise ValueError("a FockVector needs at least one basis state")
        if not np.all(np.isfinite(c)):
            raise ValueError("FockVector coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    @classmethod
    def basis(cls, n: int, dim: int) -> "FockVector":
        if not 0 <= n < dim:
            raise ValueError(f"basis index {n} outside truncation {dim}")
        c = np.zeros(dim, dtype=complex)
        c[n] = 1.0
        return cls(c)

    @classmethod
    def zeros(cls, dim: int) -> "FockVector":
        return cls(np.zeros(dim, dtype=complex))

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.coeffs, self.coeffs).real))

    def normalized(self) -> "FockVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return FockVector(self.coeffs / n, self.truncation_loss / n**2)

    def tail_mass(self, guard: int = TAIL_GUARD) -> float:
        """Probability mass in the top ``guard`` basis states (relative to the norm)."""
        total = float(np.vdot(self.coeffs, self.coeffs).real)
        if total == 0.0:
            return 0.0
        top = self.coeffs[max(self.dim - guard, 0):]
        return float(np.vdot(top, top).real) / total

    def __add__(self, other: "FockVector") -> "FockVector":
        _check_dims(self, other)
        return FockVector(self.coeffs + other.coeffs, self.truncation_loss + other.truncation_loss)

    def __sub__(self, other: "FockVector") -> "FockVector":
        _check_dims(self, other)
        return FockVector(self.coeffs - other.coeffs, self.truncation_loss + other.truncation_loss)

    def __mul__(self, scalar) -> "FockVector":
        return FockVector(self.coeffs * scalar, self.truncation_loss * abs(scalar) ** 2)

    __rmul__ = __mul__


@dataclass(frozen=True)
class TruncationPolicy:
    """Chooses the basis size for a state of label ``z`` and multiphoton order ``m``.

    ``N = ceil(|z|^2 + 10 sqrt(|z|^2 + 1)) + base + m``, times ``scale``;
    builders reject a state whose tail mass exceeds ``tail_tol``.
    """

    base: int = 24
    tail_tol: float = 1e-14
    override: int | None = None
    scale: int = 1

    def __post_init__(self):
        if self.base < 0:
            raise ValueError("base must be non-negative")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")
        if self.override is not None and self.override < 1:
            raise ValueError("override truncation must be >= 1")
        if self.scale < 1:
            raise ValueError("scale must be >= 1")

    def size(self, z_abs: float, m: int = 1) -> int:
        if self.override is not None:
            return self.scale * self.override
        x = float(z_abs) ** 2
        return self.scale * (int(math.ceil(x + 10.0 * math.sqrt(x + 1.0))) + self.base + m)

    def doubled(self) -> "TruncationPolicy":
        """Same policy at twice the basis size (for convergence checks)."""
        return replace(self, scale=2 * self.scale)


DEFAULT_POLICY = TruncationPolicy()


class TruncationError(ValueError):
    """A built state leaks more probability into the basis edge than allowed."""


def require_tail(v: FockVector, policy: TruncationPolicy, what: str = "state") -> None:
    tail = v.tail_mass()
    if tail > policy.tail_tol:
        raise TruncationError(
            f"{what}: tail mass {tail:.3e} exceeds {policy.tail_tol:.1e} at N={v.dim}; "
            "raise the truncation (larger base or explicit override)"
        )


def _check_dims(u: FockVector, v: FockVector) -> None:
    if u.dim != v.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {v.dim}")


def log_sqrt_factorial(n) -> np.ndarray:
    """``log(sqrt(n!))`` elementwise; a running sum below 150, lgamma above."""
    n = np.asarray(n)
    out = np.empty(n.shape, dtype=float)
    small = n <= _LOG_SWITCH
    table = np.concatenate([[0.0], np.cumsum(0.5 * np.log(np.arange(1, _LOG_SWITCH + 1)))])
    out[small] = table[n[small]]
    if np.any(~small):
        from scipy.special import gammaln

        out[~small] = 0.5 * gammaln(n[~small] + 1.0)
    return out


def coherent_series(z: complex, dim: int) -> np.ndarray:
    """Unnormalized amplitudes ``z**n / sqrt(n!)`` for ``n < dim``.

    Built by the running recurrence ``t_n = t_{n-1} z / sqrt(n)``, which never
    forms ``n!`` and so stays finite for any truncation.
    """
    out = np.empty(dim, dtype=complex)
    out[0] = 1.0
    if dim > 1:
        ratios = complex(z) / np.sqrt(np.arange(1, dim))
        out[1:] = np.cumprod(ratios)
    return out


def annihilate(v: FockVector) -> FockVector:
    c = v.coeffs
    out = np.zeros_like(c)
    out[:-1] = np.sqrt(np.arange(1, v.dim)) * c[1:]
    return FockVector(out, v.truncation_loss)


def create(v: FockVector) -> FockVector:
    """Apply the creation operator; the amplitude leaving the basis is booked as loss."""
    c = v.coeffs
    out = np.zeros_like(c)
    out[1:] = np.sqrt(np.arange(1, v.dim)) * c[:-1]
    lost = v.dim * abs(c[-1]) ** 2
    return FockVector(out, v.truncation_loss + lost)


def power_annihilate(v: FockVector, m: int) -> FockVector:
    if m < 1:
        raise ValueError("power must be >= 1")
    out = v
    for _ in range(m):
        out = annihilate(out)
    return out


def power_create(v: FockVector, m: int) -> FockVector:
    if m < 1:
        raise ValueError("power must be >= 1")
    out = v
    for _ in range(m):
        out = create(out)
    return out


def number(v: FockVector) -> FockVector:
    return FockVector(np.arange(v.dim) * v.coeffs, v.truncation_loss)


def inner(u: FockVector, v: FockVector) -> complex:
    _check_dims(u, v)
    return complex(np.vdot(u.coeffs, v.coeffs))


def moment(v: FockVector, p: int, q: int) -> complex:
    """Normal-ordered moment ``<v| (a^dagger)^p a^q |v>`` of a normalized vector.

    Evaluated as ``<a^p v, a^q v>``, which is exact on the truncated space.
    """
    if p < 0 or q < 0:
        raise ValueError("moment orders must be non-negative")
    if abs(inner(v, v).real - 1.0) > NORM_TOL:
        raise ValueError("moment() needs a normalized vector")
    left = power_annihilate(v, p) if p else v
    right = power_annihilate(v, q) if q else v
    return inner(left, right)


def check_pha(m: int, dim: int) -> float:
    """Max discrepancy of the polynomial-algebra commutator identity on ``|n>``.

    Left side: ``a^m (a^dagger)^m - (a^dagger)^m a^m`` by explicit ladder
    composition.  Right side: ``P(H + m) - P(H)`` with
    ``P(H) = prod_{j<m} (H - (j + 1/2))`` evaluated on the level ``n + 1/2``.
    Only ``n <= dim - 1 - 2m`` is used so no amplitude meets the top edge.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if dim <= 2 * m:
        raise ValueError(f"truncation {dim} too small for m={m}; need > {2 * m}")
    roots = np.arange(m) + 0.5

    def poly(e):
        return float(np.prod(e - roots))

    worst = 0.0
    for n in range(dim - 2 * m):
        ket = FockVector.basis(n, dim)
        lhs = power_annihilate(power_create(ket, m), m) - power_create(power_annihilate(ket, m), m)
        energy = n + 0.5
        rhs = (poly(energy + m) - poly(energy)) * ket.coeffs
        worst = max(worst, float(np.max(np.abs(lhs.coeffs - rhs))))
    return worst


def subspace_index(v: FockVector, m: int, tol: float = 0.0) -> int | None:
    """Return ``j`` if ``v`` is supported only on indices ``n = j (mod m)``, else ``None``."""
    support = np.nonzero(np.abs(v.coeffs) > tol)[0]
    if support.size == 0:
        return None
    residues = np.unique(support % m)
    return int(residues[0]) if residues.size == 1 else None
