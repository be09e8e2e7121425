"""The Husimi density u_rho: fast evaluation, maximization, and oracles.

u_rho(x, omega) = <phi_(x,omega), rho phi_(x,omega)> is evaluated through the
eigendecomposition of rho and the entire-function representation

    u_rho(z) = sum_j p_j |F_j(z)|^2 e^{-pi|z|^2},   z = x - i*omega,

with F_j expanded in the orthonormal monomials pi^{n/2} z^n / sqrt(n!).
All arithmetic uses the pre-scaled basis e_n(z) e^{-pi|z|^2/2}, whose entries
stay in [0, 1], so no intermediate quantity can overflow.

`stft_quadrature` is an independent oracle: it synthesizes the state on a
real-line grid from Hermite functions and integrates the windowed transform
directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import BoundaryMaximum, ConsistencyError, ValueTooSmall
from .fock_core import (DensityMatrix, FockVector, PhasePoint,
                        spectral_decompose)

RANGE_TOL = 1e-12


def _as_density(state) -> DensityMatrix:
    if isinstance(state, FockVector):
        return state.projector()
    return state


class HusimiEvaluator:
    """Immutable fast evaluator for u_rho at batches of phase-space points."""

    def __init__(self, rho, cutoff: float = 1e-14):
        rho = _as_density(rho)
        dec = spectral_decompose(rho, cutoff)
        amps = np.vstack([f.coeffs for f in dec.states])
        self._amps = np.sqrt(dec.weights)[:, None] * amps  # (rank, dim)
        self.rho = rho
        self.dim = rho.dim
        self.rank = self._amps.shape[0]

    def values(self, zb) -> np.ndarray:
        """u_rho at points given as z = x - i*omega (any array shape)."""
        zb = np.asarray(zb, dtype=complex)
        scalar = zb.ndim == 0
        shape = zb.shape
        zf = np.atleast_1d(zb).ravel()
        # scaled basis recurrence: e_0 = exp(-pi|z|^2/2), e_n = e_{n-1} z sqrt(pi/n)
        e = np.exp(-0.5 * math.pi * (zf.real ** 2 + zf.imag ** 2)).astype(complex)
        g = self._amps[:, [0]] * e[None, :]
        for n in range(1, self.dim):
            e = e * zf * math.sqrt(math.pi / n)
            g += self._amps[:, [n]] * e[None, :]
        u = np.sum(np.abs(g) ** 2, axis=0)
        hi = u.max(initial=0.0)
        if hi > 1.0 + RANGE_TOL:
            raise ConsistencyError(f"u = {hi} exceeds 1 beyond tolerance")
        u = np.minimum(u, 1.0)
        return float(u[0]) if scalar else u.reshape(shape)

    def value(self, p: PhasePoint) -> float:
        return float(self.values(p.z))

    def value_xy(self, x: float, omega: float) -> float:
        return float(self.values(complex(x, -omega)))


def husimi_eval(rho, z: PhasePoint) -> float:
    """u_rho at a single phase-space point."""
    return HusimiEvaluator(rho).value(z)


@dataclass(frozen=True)
class MaxReport:
    """Global maximum T of u_rho and its location."""

    T: float
    zstar: PhasePoint
    iterations: int


def _fd_grad_hess_logu(ev: HusimiEvaluator, x: np.ndarray, h: float):
    pts = np.array([
        [x[0], x[1]],
        [x[0] + h, x[1]], [x[0] - h, x[1]],
        [x[0], x[1] + h], [x[0], x[1] - h],
        [x[0] + h, x[1] + h], [x[0] + h, x[1] - h],
        [x[0] - h, x[1] + h], [x[0] - h, x[1] - h],
    ])
    u = ev.values(pts[:, 0] - 1j * pts[:, 1])
    if np.any(u <= 0.0):
        return None, None
    f = np.log(u)
    g = np.array([(f[1] - f[2]) / (2 * h), (f[3] - f[4]) / (2 * h)])
    hxx = (f[1] - 2 * f[0] + f[2]) / h ** 2
    hyy = (f[3] - 2 * f[0] + f[4]) / h ** 2
    hxy = (f[5] - f[6] - f[7] + f[8]) / (4 * h ** 2)
    return g, np.array([[hxx, hxy], [hxy, hyy]])


def _newton_polish(ev: HusimiEvaluator, x0, max_steps: int = 10, fd: float = 1e-5):
    """Sharpen a maximizer of ln(u) with finite-difference Newton steps.

    Steps are accepted up to ulp-level value noise; the iteration stops on a
    genuine decrease, a non-concave Hessian (ridge maxima), or convergence.
    """
    x = np.array(x0, dtype=float)
    u_ref = ev.value_xy(x[0], x[1])
    steps = 0
    for _ in range(max_steps):
        g, hess = _fd_grad_hess_logu(ev, x, fd)
        if g is None:
            break
        w = np.linalg.eigvalsh(hess)
        if w.max() > -1e-8:
            break
        step = -np.linalg.solve(hess, g)
        norm = np.linalg.norm(step)
        if norm > 0.1:
            step *= 0.1 / norm
            norm = 0.1
        xn = x + step
        un = ev.value_xy(xn[0], xn[1])
        if un < u_ref - 1e-12:
            break
        x = xn
        u_ref = max(u_ref, un)
        steps += 1
        if norm < 1e-12:
            break
    return x, ev.value_xy(x[0], x[1]), steps


def _polar_grid(radius: float, step: float):
    pts = [(0.0, 0.0)]
    nr = int(round(radius / step))
    ring_start = 1
    for k in range(1, nr + 1):
        r = k * step
        n_theta = max(8, int(math.ceil(2.0 * math.pi * r / step)))
        th = 2.0 * math.pi * np.arange(n_theta) / n_theta
        if k == nr:
            ring_start = len(pts)
        pts.extend(zip(r * np.cos(th), r * np.sin(th)))
    return np.asarray(pts), ring_start


def husimi_max(rho, grid_radius: float = 4.0, grid_step: float = 0.1) -> MaxReport:
    """Locate T = max u_rho by multistart simplex descent plus Newton polish."""
    ev = rho if isinstance(rho, HusimiEvaluator) else HusimiEvaluator(rho)
    pts, ring_start = _polar_grid(grid_radius, grid_step)
    u = ev.values(pts[:, 0] - 1j * pts[:, 1])
    interior_max = u[:ring_start].max()
    if u[ring_start:].max() >= interior_max:
        raise BoundaryMaximum(
            f"grid maximum on the r={grid_radius} ring; increase grid_radius"
        )
    order = np.argsort(u)[::-1][:5]
    best_x, best_u, total_iter = None, -1.0, 0
    for idx in order:
        res = minimize(
            lambda xy: -ev.value_xy(xy[0], xy[1]),
            pts[idx],
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000,
                     "maxfev": 8000},
        )
        total_iter += res.nit
        x, val = res.x, -res.fun
        x, val, nsteps = _newton_polish(ev, x)
        total_iter += nsteps
        if val > best_u:
            best_u, best_x = val, x
    return MaxReport(T=float(best_u),
                     zstar=PhasePoint(float(best_x[0]), float(best_x[1])),
                     iterations=total_iter)


# --- real-line quadrature oracle --------------------------------------------


def hermite_rows(xs: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal Hermite functions h_0..h_{dim-1} on the given grid.

    h_0(x) = 2^{1/4} e^{-pi x^2}; normalized three-term recurrence in
    xi = sqrt(2 pi) x.  Stable for dim <= 32 on the ranges used here.
    """
    xs = np.asarray(xs, dtype=float)
    xi = math.sqrt(2.0 * math.pi) * xs
    rows = np.empty((dim, xs.size), dtype=float)
    rows[0] = 2.0 ** 0.25 * np.exp(-math.pi * xs ** 2)
    if dim > 1:
        rows[1] = math.sqrt(2.0) * xi * rows[0]
    for n in range(1, dim - 1):
        rows[n + 1] = (xi * math.sqrt(2.0 / (n + 1)) * rows[n]
                       - math.sqrt(n / (n + 1)) * rows[n - 1])
    return rows


def stft_quadrature(f: FockVector, z: PhasePoint, quad_points: int = 600) -> complex:
    """Windowed transform V f(x0, omega0) by direct real-line quadrature.

    Independent of the entire-function evaluation path: the state is
    synthesized from Hermite functions and integrated against the conjugated
    Gaussian window on a Gauss-Legendre grid.
    """
    if quad_points < 200:
        raise ValueError("quad_points >= 200 required")
    if f.dim > 32:
        raise ValueError("dim <= 32 required (Hermite evaluation stability window)")
    x0, w0 = z.x, z.omega
    center = x0 / 2.0
    half = 5.0 + abs(x0) / 2.0 + math.sqrt((2.0 * f.dim + 1.0) / (2.0 * math.pi))
    # keep ~10 nodes per oscillation of e^{-2 pi i w0 x}
    n = max(quad_points, int(40 * half * (1.0 + abs(w0))))
    nodes, weights = np.polynomial.legendre.leggauss(n)
    xs = center + half * nodes
    ws = half * weights
    fx = f.coeffs @ hermite_rows(xs, f.dim)
    window = 2.0 ** 0.25 * np.exp(-math.pi * (xs - x0) ** 2)
    phase = np.exp(-2j * math.pi * w0 * xs)
    return complex(np.sum(ws * phase * window * fx))


# --- log-Laplacian lower-bound probe ----------------------------------------


def _fd_laplacian_logu(ev: HusimiEvaluator, z: PhasePoint, h: float) -> float:
    pts = np.array([
        [z.x, z.omega],
        [z.x + h, z.omega], [z.x - h, z.omega],
        [z.x, z.omega + h], [z.x, z.omega - h],
    ])
    u = ev.values(pts[:, 0] - 1j * pts[:, 1])
    if np.any(u <= 0.0):
        raise ValueTooSmall("u vanished inside the finite-difference stencil")
    f = np.log(u)
    return float((f[1] + f[2] + f[3] + f[4] - 4.0 * f[0]) / h ** 2)


def log_laplacian_check(rho, z: PhasePoint, h: float = 1e-3,
                        with_error: bool = False):
    """Five-point Laplacian of ln(u_rho) at z, Richardson-refined at h/2.

    The caller asserts the result >= -4*pi - tol.  With `with_error` the
    difference of the two grids is returned as a reliability estimate; large
    values flag points (near zeros of u) where the stencil is untrustworthy.
    """
    if not (1e-4 <= h <= 1e-2):
        raise ValueError("h must lie in [1e-4, 1e-2]")
    ev = rho if isinstance(rho, HusimiEvaluator) else HusimiEvaluator(rho)
    u0 = ev.value(z)
    if u0 <= 1e-8:
        raise ValueTooSmall(f"u = {u0:.2e} <= 1e-8 at the probe point")
    coarse = _fd_laplacian_logu(ev, z, h)
    fine = _fd_laplacian_logu(ev, z, h / 2.0)
    value = (4.0 * fine - coarse) / 3.0
    if with_error:
        return value, abs(fine - coarse)
    return value
