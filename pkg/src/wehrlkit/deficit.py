"""Trace-norm distance to the coherent-state family.

D[rho] minimizes the trace distance between rho and the rank-one coherent
projectors over phase space; for pure states the closed forms
D[rho] = 2 sqrt(1-T) and D[f] = sqrt(2 (1-sqrt(T))) tie it to the Husimi
maximum.  The optimizer records its own minimizer separately from the
Husimi maximizer, since the two need not coincide for mixed states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .errors import ConsistencyError, DimensionMismatch
from .fock_core import (DensityMatrix, FockVector, PhasePoint,
                        coherent_coeffs, coherent_fock_vector,
                        safe_coherent_radius)
from .husimi import MaxReport, husimi_max

EIG_FLOOR = 1e-14


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Sum of absolute eigenvalues of rho - sigma."""
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dims {rho.dim} != {sigma.dim}")
    w = np.linalg.eigvalsh(rho.entries - sigma.entries)
    w = np.where(np.abs(w) < EIG_FLOOR, 0.0, w)
    return float(np.sum(np.abs(w)))


class DeficitMin(NamedTuple):
    """Minimized trace distance to the coherent family and its argmin."""

    value: float
    z0: PhasePoint
    iterations: int


def _dim_for_radius(radius: float, start: int = 8) -> int:
    """Smallest dim (in steps of 8) whose safe coherent radius covers radius."""
    d = max(8, start)
    while safe_coherent_radius(d) < radius:
        d += 8
    return d


def deficit_D(rho: DensityMatrix, grid_radius: float = 4.0,
              max_report: MaxReport | None = None) -> DeficitMin:
    """D[rho]: local descent seeded at the Husimi maximizer plus a grid.

    The state is zero-padded into a truncation large enough that coherent
    projectors near the maximizer carry tail mass below 1e-12; padding does
    not change rho as an operator.
    """
    if max_report is None:
        max_report = husimi_max(rho)
    zs = max_report.zstar
    target = max(2.0, math.hypot(zs.x, zs.omega) + 1.5)
    dim_work = max(rho.dim, _dim_for_radius(target, start=rho.dim))
    rad = safe_coherent_radius(dim_work) - 1e-6
    rho_big = np.zeros((dim_work, dim_work), dtype=complex)
    rho_big[: rho.dim, : rho.dim] = rho.entries

    def objective(xy):
        r = math.hypot(xy[0], xy[1])
        if r > rad:
            return 2.0 + (r - rad)  # any admissible value is <= 2
        c = coherent_coeffs(xy[0], xy[1], dim_work)
        w = np.linalg.eigvalsh(rho_big - np.outer(c, c.conj()))
        w = np.where(np.abs(w) < EIG_FLOOR, 0.0, w)
        return float(np.sum(np.abs(w)))

    d = 0.05
    seeds = [(zs.x, zs.omega)]
    seeds += [(zs.x + dx, zs.omega + dy)
              for dx in (-d, 0.0, d) for dy in (-d, 0.0, d)
              if not (dx == 0.0 and dy == 0.0)]
    # coarse sweep guards against a minimizer away from the Husimi maximizer
    grid = [(x, y)
            for x in np.arange(-grid_radius, grid_radius + 1e-9, 0.5)
            for y in np.arange(-grid_radius, grid_radius + 1e-9, 0.5)
            if math.hypot(x, y) <= min(grid_radius, rad)]
    gv = sorted(grid, key=objective)[:3]
    seeds += gv

    best_val, best_x, iters = math.inf, None, 0
    for s in seeds:
        res = minimize(objective, np.asarray(s, dtype=float),
                       method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": 1e-12,
                                "maxiter": 2000, "maxfev": 4000})
        iters += res.nit
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    return DeficitMin(value=best_val,
                      z0=PhasePoint(float(best_x[0]), float(best_x[1])),
                      iterations=iters)


def deficit_Df(f: FockVector, max_report: MaxReport | None = None) -> float:
    """D[f] = sqrt(2 (1 - sqrt(T))) for a unit-norm pure state.

    The Husimi maximum is cross-checked against the direct coherent-state
    overlap at the maximizer, which ties the unconstrained-amplitude
    identity D[rho] = 2 inf_c ||f - c phi|| to the trace-norm formula.
    """
    if max_report is None:
        max_report = husimi_max(f.projector())
    T = max_report.T
    zs = max_report.zstar
    dim_work = max(f.dim,
                   _dim_for_radius(math.hypot(zs.x, zs.omega) + 0.5, start=f.dim))
    coh = coherent_fock_vector(zs, dim_work)
    overlap = abs(np.vdot(coh.coeffs[: f.dim], f.coeffs)) ** 2
    if abs(overlap - T) > 1e-9:
        raise ConsistencyError(
            f"|<phi_z*, f>|^2 = {overlap:.12f} disagrees with T = {T:.12f}"
        )
    return math.sqrt(2.0 * (1.0 - math.sqrt(T)))


@dataclass(frozen=True)
class DeficitReport:
    """Bundle of maximum, distances, entropy value, and deficit ratio."""

    T: float
    zstar: PhasePoint
    D_rho: float
    D_f: float | None
    entropy_value: float
    reference: float
    deficit: float
    ratio: float | None
    z0_deficit: PhasePoint | None = None
    argmin_mismatch: float | None = None

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "zstar": [self.zstar.x, self.zstar.omega],
            "D_rho": self.D_rho,
            "D_f": self.D_f,
            "entropy_value": self.entropy_value,
            "reference": self.reference,
            "deficit": self.deficit,
            "ratio": self.ratio,
            "z0_deficit": None if self.z0_deficit is None
            else [self.z0_deficit.x, self.z0_deficit.omega],
            "argmin_mismatch": self.argmin_mismatch,
        }


RATIO_FLOOR = 1e-4


def build_deficit_report(rho: DensityMatrix, f: FockVector | None = None,
                         phi=None) -> DeficitReport:
    """Assemble the full report for one state (Wehrl symbol by default)."""
    from .entropy import coherent_reference, phi_entropy, wehrl_symbol

    if phi is None:
        phi = wehrl_symbol()
    if f is None:
        w, v = np.linalg.eigh(rho.entries)
        if w[-1] > 1.0 - 1e-10:
            f = FockVector(v[:, -1])
    rep = husimi_max(rho)
    dmin = deficit_D(rho, max_report=rep)
    value = phi_entropy(rho, phi)
    reference = coherent_reference(phi)
    deficit = reference - value
    ratio = deficit / dmin.value ** 2 if dmin.value > RATIO_FLOOR else None
    d_f = deficit_Df(f, max_report=rep) if f is not None else None
    mism = math.hypot(dmin.z0.x - rep.zstar.x, dmin.z0.omega - rep.zstar.omega)
    return DeficitReport(
        T=rep.T, zstar=rep.zstar, D_rho=dmin.value, D_f=d_f,
        entropy_value=value, reference=reference, deficit=deficit,
        ratio=ratio, z0_deficit=dmin.z0, argmin_mismatch=mism,
    )
