"""Log-Sobolev functional on the Fock space of entire functions.

A FockFunction is a unit-norm coefficient vector in the orthonormal
monomial basis of the Gaussian-weighted space with parameter h; scaling
z -> sqrt(h) z reduces everything to h = 1, where the Dirichlet form has
the closed form sum_n n |a_n|^2 and the family c e^{beta z - |beta|^2/(2 pi)}
saturates the inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import xlogy

from .errors import ConsistencyError
from .fock_core import FockVector
from .polarquad import PolarQuadrature

DEFICIT_FLOOR = -1e-8


class FockFunction:
    """Unit-norm entire function given by coefficients in the monomial basis."""

    def __init__(self, coeffs, h: float = 1.0):
        if h <= 0.0:
            raise ValueError("h must be positive")
        a = np.array(coeffs, dtype=complex).ravel()
        if a.size < 1:
            raise ValueError("at least one coefficient required")
        norm = np.linalg.norm(a)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero function")
        a = a / norm
        a.setflags(write=False)
        self.coeffs = a
        self.h = float(h)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def with_h(self, h: float) -> "FockFunction":
        """Same coefficients read against the Gaussian weight with given h."""
        return FockFunction(self.coeffs, h=h)

    def __repr__(self):
        return f"FockFunction(dim={self.dim}, h={self.h})"


def _scaled_rows(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """sum_n c_n pi^{n/2} z^n e^{-pi|z|^2/2} / sqrt(n!) at h = 1."""
    e = np.exp(-0.5 * math.pi * (z.real ** 2 + z.imag ** 2)).astype(complex)
    acc = coeffs[0] * e
    for n in range(1, coeffs.size):
        e = e * z * math.sqrt(math.pi / n)
        acc = acc + coeffs[n] * e
    return acc


def dirichlet_form(F: FockFunction) -> float:
    """Closed form sum_n n |a_n|^2 (h-independent by scaling)."""
    n = np.arange(F.dim, dtype=float)
    return float(np.sum(n * np.abs(F.coeffs) ** 2))


def _default_quad(dim: int) -> PolarQuadrature:
    return PolarQuadrature.for_dim(max(dim, 2))


def dirichlet_form_quadrature(F: FockFunction,
                              quad: PolarQuadrature | None = None) -> float:
    """(h/pi) integral of |dF/dz|^2 against the Gaussian measure.

    Independent route: the derivative series is integrated on the polar
    grid after the z -> sqrt(h) z reduction to h = 1.
    """
    if quad is None:
        quad = _default_quad(F.dim)
    if F.dim == 1:
        return 0.0
    dcoef = F.coeffs[1:] * np.sqrt(np.arange(1, F.dim))
    vals = np.abs(_scaled_rows(dcoef, quad.zb)) ** 2
    return quad.integrate(vals)


def entropy_term(F: FockFunction, quad: PolarQuadrature | None = None) -> float:
    """Integral of |F|^2 ln|F|^2 against the Gaussian measure.

    With q = |F|^2 e^{-s} (bounded by 1) the integrand is q ln q + q s,
    so nothing overflows however large the radial cutoff is.
    """
    if quad is None:
        quad = _default_quad(F.dim)
    q = np.abs(_scaled_rows(F.coeffs, quad.zb)) ** 2
    return quad.integrate(xlogy(q, q) + q * quad.s)


def optimizer_coeffs(beta: complex, dim: int) -> np.ndarray:
    """Coefficients of e^{beta z - |beta|^2/(2 pi)} in the monomial basis."""
    b = np.empty(dim, dtype=complex)
    b[0] = math.exp(-abs(beta) ** 2 / (2.0 * math.pi))
    for n in range(1, dim):
        b[n] = b[n - 1] * beta / math.sqrt(math.pi * n)
    return b


def _family_overlap_mag(coeffs: np.ndarray, beta: complex) -> float:
    """|<optimizer(beta), F>| for unit-norm coefficient vectors."""
    b = optimizer_coeffs(beta, coeffs.size)
    return abs(np.vdot(b, coeffs))


@dataclass(frozen=True)
class LogSobReport:
    """Deficit of the log-Sobolev inequality and distance to the optimizers."""

    dirichlet: float
    entropy: float
    deficit: float
    beta: complex
    distance2: float
    ratio: float | None

    def to_dict(self) -> dict:
        return {
            "dirichlet": self.dirichlet,
            "entropy": self.entropy,
            "deficit": self.deficit,
            "beta": [self.beta.real, self.beta.imag],
            "distance2": self.distance2,
            "ratio": self.ratio,
        }


def nearest_optimizer(F: FockFunction):
    """Maximize |<c e^{beta z - ...}, F>| over beta; phase c is then free.

    Returns (beta, distance^2) with distance^2 = 2 (1 - max overlap).
    """
    a = F.coeffs

    def neg(xy):
        return -_family_overlap_mag(a, complex(xy[0], xy[1]))

    seeds = [0j]
    if abs(a[0]) > 0.1 and F.dim > 1:
        ratio = a[1] / a[0]
        seeds += [math.pi * ratio, math.sqrt(math.pi) * ratio]
    grid = [complex(math.pi * x, math.pi * y)
            for x in np.arange(-3.0, 3.01, 0.25)
            for y in np.arange(-3.0, 3.01, 0.25)]
    grid.sort(key=lambda b: -_family_overlap_mag(a, b))
    seeds += grid[:3]

    best_val, best_b = -1.0, 0j
    for s in seeds:
        res = minimize(neg, np.array([s.real, s.imag]), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14,
                                "maxiter": 2000, "maxfev": 4000})
        if -res.fun > best_val:
            best_val, best_b = -res.fun, complex(res.x[0], res.x[1])
    return best_b, 2.0 * (1.0 - min(best_val, 1.0))


RATIO_FLOOR = 1e-12


def logsob_deficit(F: FockFunction, quad: PolarQuadrature | None = None) -> LogSobReport:
    """Dirichlet form minus entropy term, with the nearest-optimizer distance."""
    d = dirichlet_form(F)
    e = entropy_term(F, quad)
    deficit = d - e
    if deficit < DEFICIT_FLOOR:
        raise ConsistencyError(f"negative deficit {deficit:.3e}")
    beta, dist2 = nearest_optimizer(F)
    ratio = deficit / dist2 if dist2 > RATIO_FLOOR else None
    return LogSobReport(dirichlet=d, entropy=e, deficit=deficit,
                        beta=beta, distance2=dist2, ratio=ratio)


def bargmann_bridge(f: FockVector, verify: bool = True,
                    tol: float = 1e-6) -> FockFunction:
    """Entire function attached to a pure state (identity on coefficients).

    With `verify`, checks that the log-Sobolev deficit of the image equals
    the Wehrl entropy of the state minus one, evaluating both sides on the
    same quadrature nodes.
    """
    F = FockFunction(f.coeffs, h=1.0)
    if verify:
        from .entropy import phi_entropy, wehrl_symbol

        quad = _default_quad(F.dim)
        wehrl = -phi_entropy(f.projector(), wehrl_symbol(), quad=quad)
        deficit = dirichlet_form(F) - entropy_term(F, quad)
        if abs(deficit - (wehrl - 1.0)) > tol:
            raise ConsistencyError(
                f"bridge identity violated: deficit={deficit:.8f}, "
                f"wehrl-1={wehrl - 1.0:.8f}"
            )
    return F
