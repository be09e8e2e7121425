"""Verification sweeps, empirical constant estimation, and state families.

The quantitative constants of the inequalities checked here depend on an
unknown stability constant, so the sweeps assert only the non-quantitative
inequalities (at a configurable tolerance) and report empirical constants:
minimal deficit/distance^2 ratios bracket the entropy constants from below,
and the level-profile ratios bracket the comparison constants from above.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .deficit import DeficitReport, build_deficit_report, deficit_D, deficit_Df
from .entropy import (ConvexSymbol, coherent_reference, hinge_functional,
                      phi_entropy, phi_name, wehrl_symbol)
from .errors import (AssertionFailure, ConfigurationError, EmptyLevelSet,
                     ValueTooSmall)
from .fock_core import (DensityMatrix, FockVector, PhasePoint,
                        coherent_fock_vector, random_density_matrix,
                        random_fock_vector)
from .husimi import HusimiEvaluator, husimi_max, log_laplacian_check
from .levelsets import RayLevelSolver, build_profile, check_HT_bound, \
    check_improved_mu_bound

DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class StateRecord:
    """One test state: density matrix plus the pure vector when available."""

    label: str
    rho: DensityMatrix
    fvec: FockVector | None = None
    seed: int | None = None

    @property
    def pure(self) -> bool:
        return self.fvec is not None


@dataclass(frozen=True)
class RunSpec:
    """Family specification for a verification run."""

    family: str = "ginibre"
    dim: int = 12
    rank: int = 2
    count: int = 5
    seed: int = 0
    tol: float = DEFAULT_TOL


DEFAULT_COHERENT_POINTS = (
    (0.0, 0.0), (0.7, -0.3), (1.2, 0.5), (-1.0, 1.0), (0.3, 0.8),
)
DEFAULT_EPS_VALUES = (0.3, 0.1, 0.03, 0.01)


def coherent_family(dim: int = 64, points=DEFAULT_COHERENT_POINTS):
    out = []
    for x, w in points:
        f = coherent_fock_vector(PhasePoint(x, w), dim)
        out.append(StateRecord(label=f"coherent({x},{w})", rho=f.projector(),
                               fvec=f))
    return out


def fock_family(dim: int = 16, n_max: int = 4):
    out = []
    for n in range(n_max + 1):
        c = np.zeros(dim)
        c[n] = 1.0
        f = FockVector(c)
        out.append(StateRecord(label=f"fock_e{n}", rho=f.projector(), fvec=f))
    return out


def perturbation_direction(dim: int, seed: int | None) -> np.ndarray:
    """Unit direction orthogonal to the first two basis elements.

    Components along e_0 and e_1 are tangent to the coherent family at the
    vacuum, which would push the perturbation into the degenerate quartic
    regime; projecting them out keeps the quadratic scaling clean.
    """
    if seed is None:
        d = np.zeros(dim, dtype=complex)
        d[2] = 1.0
        return d
    rng = np.random.default_rng(seed)
    d = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    d[0] = d[1] = 0.0
    return d / np.linalg.norm(d)


def perturbed_coherent_family(dim: int = 32, eps_values=DEFAULT_EPS_VALUES,
                              seeds=(None,)):
    out = []
    base = np.zeros(dim, dtype=complex)
    base[0] = 1.0
    for seed in seeds:
        direction = perturbation_direction(dim, seed)
        for eps in eps_values:
            f = FockVector(base + eps * direction)
            tag = "e2" if seed is None else f"s{seed}"
            out.append(StateRecord(label=f"perturbed({eps},{tag})",
                                   rho=f.projector(), fvec=f, seed=seed))
    return out


def ginibre_family(dim: int = 12, ranks=(1, 2, 4), seeds=range(10)):
    out = []
    for rank in ranks:
        for seed in seeds:
            rho = random_density_matrix(dim, rank, seed)
            out.append(StateRecord(label=f"ginibre(r{rank},s{seed})", rho=rho,
                                   seed=seed))
    return out


def random_pure_family(dim: int = 12, seeds=range(8)):
    out = []
    for seed in seeds:
        f = random_fock_vector(dim, seed)
        out.append(StateRecord(label=f"random_pure(s{seed})",
                               rho=f.projector(), fvec=f, seed=seed))
    return out


def make_family(spec: RunSpec):
    """Instantiate the family a RunSpec names."""
    if spec.family == "coherent":
        return coherent_family(dim=spec.dim)[: spec.count or None]
    if spec.family == "fock":
        return fock_family(dim=spec.dim, n_max=max(0, spec.count - 1))
    if spec.family == "perturbed":
        return perturbed_coherent_family(dim=spec.dim)
    if spec.family == "ginibre":
        return ginibre_family(dim=spec.dim, ranks=(spec.rank,),
                              seeds=range(spec.seed, spec.seed + spec.count))
    if spec.family == "random_pure":
        return random_pure_family(dim=spec.dim,
                                  seeds=range(spec.seed, spec.seed + spec.count))
    raise ConfigurationError(f"unknown family {spec.family!r}")


def default_families(ginibre_dim: int = 12, ginibre_seeds=range(10)) -> dict:
    """The standard desk-scale test set (~60 states)."""
    return {
        "coherent": coherent_family(),
        "fock": fock_family(),
        "perturbed": perturbed_coherent_family(seeds=(None, 1, 2)),
        "ginibre": ginibre_family(dim=ginibre_dim, seeds=ginibre_seeds),
        "random_pure": random_pure_family(),
    }


# --- verification runs --------------------------------------------------------


@dataclass
class VerificationRun:
    """Per-state reports plus a deterministic summary for one theorem check."""

    spec: RunSpec
    theorem: str
    reports: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "family": self.spec.family,
            "dim": self.spec.dim,
            "rank": self.spec.rank,
            "count": self.spec.count,
            "seed": self.spec.seed,
            "tol": self.spec.tol,
            "theorem": self.theorem,
            "failures": self.failures,
            "summary": self.summary,
            "reports": [
                {"label": lab, **(r.to_dict() if hasattr(r, "to_dict") else r)}
                for lab, r in zip(self.labels, self.reports)
            ],
        }


def _summarize(run: VerificationRun, ratios, violations) -> None:
    run.summary = {
        "n_states": len(run.reports),
        "min_ratio": min(ratios) if ratios else None,
        "max_violation": max(violations) if violations else None,
        "n_failures": len(run.failures),
    }


def verify_wehrl(spec: RunSpec, states=None, strict: bool = True) -> VerificationRun:
    """Entropy >= 1 on every state; min deficit/D^2 ratio reported."""
    run = VerificationRun(spec=spec, theorem="wehrl")
    states = states if states is not None else make_family(spec)
    ratios, violations = [], []
    for rec in states:
        rep = build_deficit_report(rec.rho, f=rec.fvec)
        run.reports.append(rep)
        run.labels.append(rec.label)
        wehrl = -rep.entropy_value
        violations.append(1.0 - wehrl)
        if wehrl < 1.0 - spec.tol:
            run.failures.append(
                f"{rec.label}: entropy {wehrl:.8f} < 1 - tol (seed={rec.seed})"
            )
        if rep.ratio is not None:
            ratios.append(rep.ratio)
    _summarize(run, ratios, violations)
    if strict and run.failures:
        raise AssertionFailure("; ".join(run.failures), run=run)
    return run


def verify_generalized(spec: RunSpec, phi: ConvexSymbol, states=None,
                       strict: bool = True) -> VerificationRun:
    """Functional of phi(u) stays below the coherent reference."""
    if phi.is_linear():
        raise ConfigurationError(
            "linear symbols carry no information here: the functional is "
            "constant on unit-trace states"
        )
    run = VerificationRun(spec=spec, theorem=f"generalized[{phi_name(phi)}]")
    states = states if states is not None else make_family(spec)
    reference = coherent_reference(phi)
    ratios, violations = [], []
    for rec in states:
        value = phi_entropy(rec.rho, phi)
        dmin = deficit_D(rec.rho)
        deficit = reference - value
        ratio = deficit / dmin.value ** 2 if dmin.value > 1e-4 else None
        rep = {"value": value, "reference": reference, "deficit": deficit,
               "D_rho": dmin.value, "ratio": ratio}
        run.reports.append(rep)
        run.labels.append(rec.label)
        violations.append(value - reference)
        if value > reference + spec.tol:
            run.failures.append(
                f"{rec.label}: value {value:.8f} exceeds reference "
                f"{reference:.8f} (seed={rec.seed})"
            )
        if ratio is not None:
            ratios.append(ratio)
    _summarize(run, ratios, violations)
    if strict and run.failures:
        raise AssertionFailure("; ".join(run.failures), run=run)
    return run


@dataclass(frozen=True)
class StabTauReport:
    """Hinge-functional stability at a fixed threshold tau."""

    tau: float
    lhs: float
    reference: float
    D_f: float
    rhs_factor: float | None
    empirical_c: float
    passed: bool | None

    def to_dict(self) -> dict:
        return {
            "tau": self.tau, "lhs": self.lhs, "reference": self.reference,
            "D_f": self.D_f, "rhs_factor": self.rhs_factor,
            "empirical_c": self.empirical_c, "passed": self.passed,
        }


def verify_stabtau(f: FockVector, tau: float, c_candidate: float | None = None,
                   solver: RayLevelSolver | None = None) -> StabTauReport:
    """Largest c with hinge(f, tau) <= (1 - c tau D[f]^2) * reference."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    lhs = hinge_functional(f.projector(), tau, solver=solver)
    reference = 1.0 - tau + tau * math.log(tau)
    d_f = deficit_Df(f)
    denom = tau * d_f ** 2
    if denom < 1e-12 or reference < 1e-14:
        empirical_c = math.inf
    else:
        empirical_c = (1.0 - lhs / reference) / denom
    rhs_factor = None
    passed = None
    if c_candidate is not None:
        rhs_factor = 1.0 - c_candidate * denom
        passed = bool(lhs <= rhs_factor * reference + 1e-8)
    return StabTauReport(tau=tau, lhs=lhs, reference=reference, D_f=d_f,
                         rhs_factor=rhs_factor, empirical_c=empirical_c,
                         passed=passed)


@dataclass(frozen=True)
class FaberKrahnReport:
    """Super-level mass of a state against the centered disk of equal area."""

    tau: float
    area: float
    lhs: float
    rhs_reference: float
    D_f: float
    empirical_c0: float
    passed: bool | None

    def to_dict(self) -> dict:
        return {
            "tau": self.tau, "area": self.area, "lhs": self.lhs,
            "rhs_reference": self.rhs_reference, "D_f": self.D_f,
            "empirical_c0": self.empirical_c0, "passed": self.passed,
        }


def verify_faber_krahn(f: FockVector, tau: float,
                       c0_candidate: float | None = None,
                       solver: RayLevelSolver | None = None) -> FaberKrahnReport:
    """Mass of u over its own super-level set vs the equal-area disk."""
    rep = husimi_max(f.projector())
    if not 0.0 < tau < rep.T:
        raise EmptyLevelSet(f"tau={tau} not below T={rep.T:.6f}")
    if solver is None:
        solver = RayLevelSolver(f.projector())
    area = solver.mu(tau)
    lhs = solver.superlevel_integral(tau, shift=0.0)
    rhs_reference = 1.0 - math.exp(-area)
    d_f = deficit_Df(f, max_report=rep)
    denom = math.exp(-area) * d_f ** 2
    if denom < 1e-12:
        empirical_c0 = math.inf
    else:
        empirical_c0 = (1.0 - lhs / rhs_reference) / denom
    passed = None
    if c0_candidate is not None:
        passed = bool(lhs <= (1.0 - c0_candidate * denom) * rhs_reference + 1e-8)
    return FaberKrahnReport(tau=tau, area=area, lhs=lhs,
                            rhs_reference=rhs_reference, D_f=d_f,
                            empirical_c0=empirical_c0, passed=passed)


@dataclass(frozen=True)
class LaplacianSweepReport:
    """Worst finite-difference log-Laplacian over sampled probe points."""

    min_value: float
    n_checked: int
    n_skipped: int
    passed: bool


def laplacian_sweep(rho: DensityMatrix, n_points: int = 100, seed: int = 0,
                    radius: float = 2.5, u_floor: float = 1e-6,
                    tol: float = 1e-2) -> LaplacianSweepReport:
    """Check the log-Laplacian lower bound at sampled points with u > u_floor.

    Points where the two Richardson grids disagree by more than 1e-3 sit
    near zeros of u, where the stencil truncation error dwarfs the bound;
    they are skipped and replacements drawn (the bound is slack there).
    """
    ev = HusimiEvaluator(rho)
    rng = np.random.default_rng(seed)
    checked, skipped = 0, 0
    worst = math.inf
    budget = 60 * n_points
    while checked < n_points and budget > 0:
        budget -= 1
        r = radius * math.sqrt(rng.uniform())
        th = rng.uniform(0.0, 2.0 * math.pi)
        p = PhasePoint(r * math.cos(th), r * math.sin(th))
        if ev.value(p) <= u_floor:
            continue
        try:
            val, err = log_laplacian_check(ev, p, with_error=True)
        except ValueTooSmall:
            continue
        if err > 1e-3:
            skipped += 1
            continue
        worst = min(worst, val)
        checked += 1
    passed = bool(checked > 0 and worst >= -4.0 * math.pi - tol)
    return LaplacianSweepReport(min_value=worst, n_checked=checked,
                                n_skipped=skipped, passed=passed)


# --- constant sweeps -----------------------------------------------------------


def parse_family(doc: dict) -> RunSpec:
    return RunSpec(
        family=doc["name"],
        dim=int(doc.get("dim", 12)),
        rank=int(doc.get("rank", 2)),
        count=int(doc.get("count", 5)),
        seed=int(doc.get("seed", 0)),
        tol=float(doc.get("tol", DEFAULT_TOL)),
    )


def sweep_constants(config: dict) -> list:
    """Empirical-constant table: one row per (family, phi).

    Row columns: minimal deficit/D^2 ratios for the Wehrl and phi
    functionals, the worst level-profile ratios, and the minimal stability
    constants over the configured taus (pure states only).
    """
    from .entropy import parse_phi

    specs = [parse_family(d) for d in config.get("families", [])]
    phis = [parse_phi(p) for p in config.get("phis", ["wehrl"])]
    taus = [float(t) for t in config.get("taus", [0.2, 0.5])]
    rows = []
    for spec in specs:
        states = make_family(spec)
        wehrl_ratios, ht_ratios, c0_bounds = [], [], []
        stab_cs, fk_c0s = [], []
        per_phi = {phi_name(p): [] for p in phis}
        for rec in states:
            rep = build_deficit_report(rec.rho, f=rec.fvec)
            if rep.ratio is not None:
                wehrl_ratios.append(rep.ratio)
            if rep.T < 1.0 - 1e-10:
                profile = build_profile(rec.rho, K=200)
                ht_ratios.append(check_HT_bound(profile))
                c0_bounds.append(check_improved_mu_bound(profile, 0.05).C0_min)
            for phi in phis:
                if phi.kind == "wehrl":
                    ratio = rep.ratio
                else:
                    value = phi_entropy(rec.rho, phi)
                    deficit = coherent_reference(phi) - value
                    ratio = (deficit / rep.D_rho ** 2
                             if rep.D_rho > 1e-4 else None)
                if ratio is not None:
                    per_phi[phi_name(phi)].append(ratio)
            if rec.pure:
                solver = RayLevelSolver(rec.rho)
                for tau in taus:
                    st = verify_stabtau(rec.fvec, tau, solver=solver)
                    if math.isfinite(st.empirical_c):
                        stab_cs.append(st.empirical_c)
                    if tau < rep.T:
                        fk = verify_faber_krahn(rec.fvec, tau, solver=solver)
                        if math.isfinite(fk.empirical_c0):
                            fk_c0s.append(fk.empirical_c0)
        for phi in phis:
            name = phi_name(phi)
            rows.append({
                "family": spec.family,
                "phi": name,
                "n_states": len(states),
                "min_phi_ratio": min(per_phi[name]) if per_phi[name] else None,
                "min_wehrl_ratio": min(wehrl_ratios) if wehrl_ratios else None,
                "max_HT_ratio": max(ht_ratios) if ht_ratios else None,
                "max_C0": max(c0_bounds) if c0_bounds else None,
                "min_stab_c": min(stab_cs) if stab_cs else None,
                "min_fk_c0": min(fk_c0s) if fk_c0s else None,
            })
    return rows


def full_inequality_suite(families: dict | None = None,
                          tol: float = DEFAULT_TOL,
                          taus=(0.1, 0.3, 0.5, 0.7, 0.9)) -> dict:
    """Run every inequality over the default families; returns a summary.

    Checks per state: entropy bound, generalized bounds (square and hinge
    symbols), hinge stability and the super-level comparison for pure
    states, and the nonnegative log-Sobolev deficit.
    """
    from .entropy import hinge_symbol, power_symbol
    from .logsob import logsob_deficit, FockFunction

    if families is None:
        families = default_families()
    phis = [power_symbol(2), hinge_symbol(0.3)]
    refs = {phi_name(p): coherent_reference(p) for p in phis}
    failures = []
    n_states = n_checks = 0
    t0 = time.time()
    for fam, states in families.items():
        for rec in states:
            n_states += 1
            wehrl = -phi_entropy(rec.rho, wehrl_symbol())
            n_checks += 1
            if wehrl < 1.0 - tol:
                failures.append(f"{fam}/{rec.label}: wehrl {wehrl:.8f} < 1")
            for phi in phis:
                value = phi_entropy(rec.rho, phi)
                n_checks += 1
                if value > refs[phi_name(phi)] + tol:
                    failures.append(
                        f"{fam}/{rec.label}: {phi_name(phi)} above reference")
            if rec.pure:
                rep = husimi_max(rec.rho)
                solver = RayLevelSolver(rec.rho)
                for tau in taus:
                    st = verify_stabtau(rec.fvec, tau, solver=solver)
                    n_checks += 1
                    if st.lhs > st.reference + 1e-8:
                        failures.append(
                            f"{fam}/{rec.label}: hinge({tau}) above reference")
                    if tau < rep.T:
                        fk = verify_faber_krahn(rec.fvec, tau, solver=solver)
                        n_checks += 1
                        if fk.lhs > fk.rhs_reference + tol:
                            failures.append(
                                f"{fam}/{rec.label}: super-level mass at "
                                f"tau={tau} above the disk value")
                dd = logsob_deficit(FockFunction(rec.fvec.coeffs)).deficit
                n_checks += 1
                if dd < -tol:
                    failures.append(
                        f"{fam}/{rec.label}: negative log-Sobolev deficit")
    return {
        "n_states": n_states,
        "n_checks": n_checks,
        "failures": failures,
        "elapsed_s": time.time() - t0,
    }
