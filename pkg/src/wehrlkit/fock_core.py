"""State representations in a truncated Fock basis.

Pure states are unit-norm coefficient vectors a_0..a_N; mixed states are
Hermitian positive-semidefinite unit-trace matrices in the same basis.
Phase-space points (x, omega) are identified with z = x - i*omega, which is
the argument the entire function attached to a state is evaluated at.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .errors import DimensionMismatch, NotPSD, TailTooLarge

NORM_TOL = 1e-12
PSD_TOL = 1e-10
TAIL_TOL = 1e-12


@dataclass(frozen=True)
class PhasePoint:
    """Point (x, omega) of phase space; z = x - i*omega is derived."""

    x: float
    omega: float

    @property
    def z(self) -> complex:
        return complex(self.x, -self.omega)

    @classmethod
    def from_z(cls, z: complex) -> "PhasePoint":
        z = complex(z)
        return cls(z.real, -z.imag)

    def abs2(self) -> float:
        return self.x * self.x + self.omega * self.omega


class FockVector:
    """Unit-norm pure state in the truncated Fock basis."""

    def __init__(self, coeffs):
        a = np.array(coeffs, dtype=complex).ravel()
        if a.size < 1:
            raise ValueError("a Fock vector needs at least one coefficient")
        norm = np.linalg.norm(a)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        a = a / norm
        a.setflags(write=False)
        self.coeffs = a

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def overlap(self, other: "FockVector") -> complex:
        """<self, other>, conjugate-linear in the first slot."""
        if other.dim != self.dim:
            raise DimensionMismatch(f"dims {self.dim} != {other.dim}")
        return complex(np.vdot(self.coeffs, other.coeffs))

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.coeffs, self.coeffs.conj()))

    def padded(self, dim: int) -> "FockVector":
        """Same state embedded in a larger truncation."""
        if dim < self.dim:
            raise ValueError("target dim smaller than current dim")
        out = np.zeros(dim, dtype=complex)
        out[: self.dim] = self.coeffs
        return FockVector(out)

    def __repr__(self):
        return f"FockVector(dim={self.dim})"


class DensityMatrix:
    """Hermitian PSD unit-trace matrix in the truncated Fock basis.

    The constructor symmetrizes and rescales the trace, so the stored
    entries are exactly Hermitian and the trace is 1 up to rounding.
    """

    def __init__(self, entries):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entries must form a square matrix")
        if m.shape[0] < 1:
            raise ValueError("dim >= 1 required")
        m = (m + m.conj().T) / 2.0
        tr = float(np.trace(m).real)
        if tr <= 0.0:
            raise ValueError(f"trace must be positive, got {tr}")
        m = m / tr
        w = np.linalg.eigvalsh(m)
        if w[0] < -PSD_TOL:
            raise NotPSD(f"smallest eigenvalue {w[0]:.3e} below -{PSD_TOL}")
        m.setflags(write=False)
        self.entries = m

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs (p_j, f_j) of a density matrix, weights descending."""

    weights: np.ndarray
    states: tuple

    def rebuild(self) -> DensityMatrix:
        dim = self.states[0].dim
        m = np.zeros((dim, dim), dtype=complex)
        for p, f in zip(self.weights, self.states):
            m += p * np.outer(f.coeffs, f.coeffs.conj())
        return DensityMatrix(m)


def coherent_tail_mass(z0_abs2: float, dim: int) -> float:
    """Probability mass of the coherent coefficient law beyond index dim-1."""
    lam = math.pi * z0_abs2
    return float(stats.poisson.sf(dim - 1, lam))


def safe_coherent_radius(dim: int, tol: float = TAIL_TOL) -> float:
    """Largest |z0| whose truncated coherent expansion keeps tail mass < tol."""
    hi = math.sqrt(dim / math.pi)
    if coherent_tail_mass(hi * hi, dim) < tol:
        return hi

    def f(r):
        return coherent_tail_mass(r * r, dim) - tol

    return float(optimize.brentq(f, 0.0, hi, xtol=1e-10))


def coherent_coeffs(x0: float, omega0: float, dim: int) -> np.ndarray:
    """Raw coherent coefficients (no tail guard, not renormalized)."""
    w = complex(x0, omega0)
    a = np.empty(dim, dtype=complex)
    a[0] = np.exp(1j * math.pi * x0 * omega0
                  - 0.5 * math.pi * (x0 * x0 + omega0 * omega0))
    for n in range(1, dim):
        a[n] = a[n - 1] * w * math.sqrt(math.pi / n)
    return a


def coherent_fock_vector(z0: PhasePoint, dim: int) -> FockVector:
    """Truncated expansion of the coherent state at z0.

    Coefficients a_n = e^{i pi x0 w0} e^{-pi|z0|^2/2} pi^{n/2} w^n / sqrt(n!)
    with w = x0 + i*w0, renormalized to unit norm after truncation.
    """
    if dim < 1:
        raise ValueError("dim >= 1 required")
    tail = coherent_tail_mass(z0.abs2(), dim)
    if tail >= TAIL_TOL:
        raise TailTooLarge(
            f"tail mass {tail:.2e} at dim={dim} for |z0|^2={z0.abs2():.3f}; "
            "increase dim"
        )
    return FockVector(coherent_coeffs(z0.x, z0.omega, dim))


def spectral_decompose(rho: DensityMatrix, cutoff: float = 1e-14) -> SpectralDecomposition:
    """Eigendecomposition of rho, discarding eigenvalues below cutoff."""
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    w, v = np.linalg.eigh(rho.entries)
    if w[0] < -PSD_TOL:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e}")
    order = np.argsort(w)[::-1]
    keep = [j for j in order if w[j] > cutoff]
    if not keep:  # numerically zero matrix cannot occur for unit trace
        keep = [order[0]]
    weights = np.array([w[j] for j in keep], dtype=float)
    states = tuple(FockVector(v[:, j]) for j in keep)
    return SpectralDecomposition(weights=weights, states=states)


def random_density_matrix(dim: int, rank: int, seed: int) -> DensityMatrix:
    """Ginibre-induced random state: GG*/tr(GG*) for complex Gaussian G."""
    if not (1 <= rank <= dim):
        raise ValueError(f"need 1 <= rank <= dim, got rank={rank}, dim={dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(m)


def random_fock_vector(dim: int, seed: int) -> FockVector:
    """Seeded random pure state (complex Gaussian, normalized)."""
    rng = np.random.default_rng(seed)
    return FockVector(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


# --- JSON state files -------------------------------------------------------
#
# {"dim": n, "kind": "pure"|"mixed", "re": [...], "im": [...]}
# with the matrix flattened row-major for mixed states.  Floats are
# serialized with repr, which round-trips doubles exactly.


def state_to_dict(state) -> dict:
    if isinstance(state, FockVector):
        return {
            "dim": state.dim,
            "kind": "pure",
            "re": state.coeffs.real.tolist(),
            "im": state.coeffs.imag.tolist(),
        }
    if isinstance(state, DensityMatrix):
        flat = state.entries.ravel()
        return {
            "dim": state.dim,
            "kind": "mixed",
            "re": flat.real.tolist(),
            "im": flat.imag.tolist(),
        }
    raise TypeError(f"unsupported state type {type(state)!r}")


def state_from_dict(doc: dict):
    dim = int(doc["dim"])
    kind = doc["kind"]
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc["im"], dtype=float)
    if kind == "pure":
        if re.size != dim:
            raise ValueError("pure state length does not match dim")
        return FockVector(re + 1j * im)
    if kind == "mixed":
        if re.size != dim * dim:
            raise ValueError("mixed state length does not match dim*dim")
        return DensityMatrix((re + 1j * im).reshape(dim, dim))
    raise ValueError(f"unknown kind {kind!r}")


def save_state(state, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_dict(state), fh)


def load_state(path):
    with open(path) as fh:
        return state_from_dict(json.load(fh))
