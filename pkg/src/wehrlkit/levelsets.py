"""Level-set geometry of the Husimi density.

The distribution function mu(t) = |{u_rho > t}| is computed by angular
decomposition: along each ray the sign changes of u - t are isolated on a
fine radial scan and refined by bisection, the super-level segments are
integrated in r, and the periodic trapezoid averages over rays.  On top of
mu sit the reference mu0(t) = (-ln t)_+, the accumulated difference H, the
crossing point t*, and the derivative/comparison checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import NoCrossing, RadiusTooSmall
from .fock_core import DensityMatrix, PhasePoint
from .husimi import HusimiEvaluator, husimi_max

EPS_T = 1e-6
COHERENT_T_TOL = 1e-10
BISECT_ITERS = 40


def _superlevel_bound(dim: int, s: float) -> float:
    """Upper bound on u at pi*r^2 = s: Cauchy-Schwarz gives a Poisson cdf."""
    return float(stats.poisson.cdf(dim - 1, s))


class RayLevelSolver:
    """Shared radial scan of u_rho along a fan of rays.

    One construction supports many levels: brackets for all requested t are
    refined in a single vectorized bisection pass.
    """

    def __init__(self, rho, rays: int = 256, rmax: float = 8.0,
                 scan_frac: float = 1e-3):
        self.ev = rho if isinstance(rho, HusimiEvaluator) else HusimiEvaluator(rho)
        if rays < 8:
            raise ValueError("rays >= 8 required")
        if rmax <= 0:
            raise ValueError("rmax must be positive")
        self.rays = rays
        self.rmax = float(rmax)
        theta = 2.0 * math.pi * np.arange(rays) / rays
        self.edir = np.exp(-1j * theta)  # z = r e^{-i theta} for (x,w) = r(cos,sin)
        step = scan_frac * rmax
        self.rgrid = np.arange(0.0, rmax + step / 2.0, step)
        self.U = self.ev.values(self.rgrid[None, :] * self.edir[:, None])

    def _check_radius(self, t: float) -> None:
        if _superlevel_bound(self.ev.dim, math.pi * self.rmax ** 2) >= t / 10.0:
            raise RadiusTooSmall(
                f"rmax={self.rmax} cannot certify emptiness of the level set "
                f"at t={t:.3e}"
            )

    def _brackets(self, levels: np.ndarray):
        """Crossing brackets (level, ray, left index) for all levels."""
        lev_idx, ray_idx, pos_idx, inside0 = [], [], [], []
        for k, t in enumerate(levels):
            self._check_radius(t)
            mask = self.U > t
            if mask[:, -1].any():
                raise RadiusTooSmall(
                    f"super-level set at t={t:.3e} touches rmax={self.rmax}"
                )
            rr, cc = np.nonzero(mask[:, :-1] != mask[:, 1:])
            lev_idx.append(np.full(rr.size, k))
            ray_idx.append(rr)
            pos_idx.append(cc)
            inside0.append(mask[:, 0])
        return (np.concatenate(lev_idx), np.concatenate(ray_idx),
                np.concatenate(pos_idx), np.vstack(inside0))

    def _refine(self, lev_idx, ray_idx, pos_idx, levels):
        """Vectorized bisection of all brackets to ~1e-12 in r."""
        lo = self.rgrid[pos_idx].copy()
        hi = self.rgrid[pos_idx + 1].copy()
        tval = levels[lev_idx]
        left_inside = self.U[ray_idx, pos_idx] > tval
        dirs = self.edir[ray_idx]
        for _ in range(BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            um = self.ev.values(mid * dirs)
            same = (um > tval) == left_inside
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        return 0.5 * (lo + hi)

    def mu_many(self, levels) -> np.ndarray:
        """Areas |{u > t}| for a batch of levels in (0, 1)."""
        levels = np.atleast_1d(np.asarray(levels, dtype=float))
        if np.any((levels <= 0.0) | (levels >= 1.0)):
            raise ValueError("levels must lie in (0, 1)")
        lev_idx, ray_idx, pos_idx, inside0 = self._brackets(levels)
        if lev_idx.size == 0:
            return np.zeros(levels.size)
        roots = self._refine(lev_idx, ray_idx, pos_idx, levels)
        # within each (level, ray) group (already ordered) boundaries alternate:
        # exit/entry signs come from parity and whether the ray starts inside.
        group = lev_idx.astype(np.int64) * self.rays + ray_idx
        first = np.ones(group.size, dtype=bool)
        first[1:] = group[1:] != group[:-1]
        start = np.where(first)[0]
        offsets = np.repeat(start, np.diff(np.append(start, group.size)))
        parity = np.arange(group.size) - offsets
        sign = np.where(parity % 2 == 0, 1.0, -1.0)
        sign = np.where(inside0[lev_idx, ray_idx], sign, -sign)
        contrib = sign * roots ** 2 / 2.0
        areas = np.zeros(levels.size)
        np.add.at(areas, lev_idx, contrib)
        return areas * (2.0 * math.pi / self.rays)

    def mu(self, t: float) -> float:
        return float(self.mu_many([t])[0])

    def segments(self, t: float):
        """Super-level segments per ray: arrays (ray_idx, r_lo, r_hi)."""
        levels = np.array([float(t)])
        lev_idx, ray_idx, pos_idx, inside0 = self._brackets(levels)
        roots = self._refine(lev_idx, ray_idx, pos_idx, levels) if lev_idx.size else np.empty(0)
        seg_ray, seg_lo, seg_hi = [], [], []
        for k in range(self.rays):
            b = roots[ray_idx == k]
            pts = list(b)
            if inside0[0, k]:
                pts = [0.0] + pts
            for lo, hi in zip(pts[0::2], pts[1::2]):
                seg_ray.append(k)
                seg_lo.append(lo)
                seg_hi.append(hi)
        return (np.asarray(seg_ray, dtype=int), np.asarray(seg_lo),
                np.asarray(seg_hi))

    def superlevel_integral(self, t: float, shift: float = 0.0,
                            gl_nodes: int = 24) -> float:
        """Integral of (u - shift) over {u > t} via per-segment Gauss rules."""
        seg_ray, seg_lo, seg_hi = self.segments(t)
        if seg_ray.size == 0:
            return 0.0
        x, w = np.polynomial.legendre.leggauss(gl_nodes)
        half = (seg_hi - seg_lo) / 2.0
        mid = (seg_hi + seg_lo) / 2.0
        r = mid[:, None] + half[:, None] * x[None, :]
        u = self.ev.values(r * self.edir[seg_ray][:, None])
        vals = np.sum((u - shift) * r * (half[:, None] * w[None, :]), axis=1)
        return float(np.sum(vals) * 2.0 * math.pi / self.rays)


def mu_of_t(rho, t: float, rays: int = 256, rmax: float = 8.0) -> float:
    """Area of the super-level set {u_rho > t}."""
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    if rays < 256:
        raise ValueError("rays >= 256 required")
    return RayLevelSolver(rho, rays=rays, rmax=rmax).mu(t)


@dataclass(frozen=True)
class LevelProfile:
    """Sampled distribution function with reference, H, and crossing point.

    `levels` merges a log-spaced core (uniform in ln t, indexed by
    `core_idx`) with a square-root-clustered refinement of the region just
    below T, which keeps the trapezoid mass estimate accurate where mu
    degenerates like sqrt(T - t).
    """

    levels: np.ndarray
    mu: np.ndarray
    mu0: np.ndarray
    T: float
    tstar: float | None
    H_at: np.ndarray
    core_idx: np.ndarray
    zstar: PhasePoint = field(default=PhasePoint(0.0, 0.0))

    @property
    def core_size(self) -> int:
        return self.core_idx.size

    @property
    def no_crossing(self) -> bool:
        return self.tstar is None

    def mu_interp(self, t):
        return np.interp(t, self.levels, self.mu, left=np.nan, right=0.0)

    def H(self, t: float) -> float:
        """Accumulated difference of mu and mu0 up to t, for t in [0, 1]."""
        t = float(t)
        t_last = self.levels[-1]
        if t <= self.levels[0]:
            return float((self.mu[0] - self.mu0[0]) * t)
        if t <= t_last:
            return float(np.interp(t, self.levels, self.H_at))
        hk = float(self.H_at[-1])
        tt = min(t, self.T)
        if tt > t_last and self.T > t_last:
            # mu modeled linear down to 0 at T on the last sliver
            width = self.T - t_last
            mu_part = self.mu[-1] * (width ** 2 - (self.T - tt) ** 2) / (2.0 * width)
            mu0_part = (tt - tt * math.log(tt)) - (t_last - t_last * math.log(t_last))
            hk += mu_part - mu0_part
        if t > self.T:
            hk -= (t - t * math.log(t)) - (self.T - self.T * math.log(self.T))
        return float(hk)

    def H_total(self) -> float:
        """Trapezoid estimate of the full integral of mu - mu0 (ideally 0)."""
        return self.H(1.0)


def build_profile(rho, K: int = 400, rays: int = 256, rmax: float = 8.0,
                  eps_t: float = EPS_T, tail_points: int = 64,
                  solver: RayLevelSolver | None = None) -> LevelProfile:
    """Sample mu on a log-spaced grid in (eps_t, T) and assemble the profile.

    T comes from the Husimi maximizer; t* is located by bisection on the
    sign change of mu - mu0.  States with T within 1e-10 of 1 are flagged
    as crossing-free (tstar = None).
    """
    if K < 100:
        raise ValueError("K >= 100 required")
    if solver is None:
        solver = RayLevelSolver(rho, rays=rays, rmax=rmax)
    report = husimi_max(solver.ev)
    T = min(report.T, 1.0)
    if T <= 10.0 * eps_t:
        raise ValueError(f"maximum T={T:.2e} too close to the grid floor")
    core = np.geomspace(eps_t, T, num=K, endpoint=False)
    # sqrt-clustered refinement of [0.85 T, T): mu can degenerate like
    # sqrt(T - t) there, which a log grid underresolves
    knee = 0.85 * T
    frac = (np.arange(tail_points, 0, -1) / (tail_points + 1.0)) ** 2
    refine = T - (T - knee) * frac
    levels = np.unique(np.concatenate([core, refine]))
    core_idx = np.searchsorted(levels, core)
    mu = solver.mu_many(levels)
    mu0 = -np.log(levels)
    diff = mu - mu0
    # head: mu - mu0 is asymptotically constant below the grid
    head = diff[0] * levels[0]
    H_at = head + np.concatenate(
        [[0.0], np.cumsum(0.5 * (diff[1:] + diff[:-1]) * np.diff(levels))]
    )

    tstar = None
    if T < 1.0 - COHERENT_T_TOL:
        sgn = np.sign(diff)
        flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
        if flips.size == 0:
            raise NoCrossing("no sign change of mu - mu0 found on the grid")
        i = flips[0]
        lo, hi = levels[i], levels[i + 1]
        flo = diff[i]
        while hi - lo > 1e-8:
            mid = 0.5 * (lo + hi)
            fm = solver.mu(mid) - (-math.log(mid))
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        tstar = 0.5 * (lo + hi)
    return LevelProfile(levels=levels, mu=mu, mu0=mu0, T=T, tstar=tstar,
                        H_at=H_at, core_idx=core_idx, zstar=report.zstar)


@dataclass(frozen=True)
class MuDifferentialReport:
    """Worst excess of mu'(t) + 1/t over the checked window."""

    max_violation: float
    argmax_t: float
    passed: bool


def check_mu_differential(profile: LevelProfile, tol: float = 5e-3,
                          t_lo: float | None = None,
                          t_hi: float | None = None) -> MuDifferentialReport:
    """Check mu'(t) <= -1/t by central differences.

    Derivatives are taken in ln t on the uniform log-spaced core, which is
    exact for the coherent profile mu = -ln t; the refinement tail (where
    mu' only gets steeper) is excluded.
    """
    if profile.core_size < 200:
        raise ValueError("profile with K >= 200 required")
    t = profile.levels[profile.core_idx]
    m = profile.mu[profile.core_idx]
    v = np.log(t)
    dmu = (m[2:] - m[:-2]) / (v[2:] - v[:-2])
    deriv = dmu / t[1:-1]
    tc = t[1:-1]
    sel = np.ones(tc.size, dtype=bool)
    if t_lo is not None:
        sel &= tc >= t_lo
    if t_hi is not None:
        sel &= tc <= t_hi
    if not sel.any():
        raise ValueError("empty check window")
    excess = deriv[sel] + 1.0 / tc[sel]
    i = int(np.argmax(excess))
    return MuDifferentialReport(max_violation=float(excess[i]),
                                argmax_t=float(tc[sel][i]),
                                passed=bool(excess[i] <= tol))


@dataclass(frozen=True)
class ImprovedMuReport:
    """Empirical constant for mu(t) <= (1 + C0(1-T)) log(T/t) on [t0, T)."""

    C0_min: float
    max_excess: float
    passed: bool | None


def check_improved_mu_bound(profile: LevelProfile, t0: float,
                            C0: float | None = None) -> ImprovedMuReport:
    """Minimal C0 making the comparison bound hold on the sampled grid."""
    if not 0.0 < t0 < 1.0:
        raise ValueError("t0 must lie in (0, 1)")
    T = profile.T
    if T < t0:
        raise ValueError("T < t0: empty comparison window")
    sel = (profile.levels >= t0) & (profile.levels < T * (1.0 - 1e-12))
    if not sel.any():
        raise ValueError("no grid points in [t0, T)")
    t = profile.levels[sel]
    m = profile.mu[sel]
    logref = np.log(T / t)
    excess = m - logref
    max_excess = float(excess.max())
    if T >= 1.0 - COHERENT_T_TOL:
        c0_min = 0.0
    else:
        c0_min = max(0.0, float(np.max(excess / (logref * (1.0 - T)))))
    passed = None
    if C0 is not None:
        passed = bool(np.all(m <= (1.0 + C0 * (1.0 - T)) * logref + 1e-12))
    return ImprovedMuReport(C0_min=c0_min, max_excess=max_excess, passed=passed)


def check_HT_bound(profile: LevelProfile) -> float:
    """Ratio (1 - T) / H(t*): its maximum over families brackets the constant."""
    if profile.no_crossing:
        raise NoCrossing("coherent input: t* undefined")
    h = profile.H(profile.tstar)
    if h <= 0.0:
        return math.inf
    return (1.0 - profile.T) / h
