"""Command-line entry points.

Subcommands: entropy, husimi-grid, mu-profile, deficit, logsob,
verify {wehrl|generalized|stabtau|faber-krahn}, sweep.  Results are
written as JSON (single objects) or CSV (tables) to stdout or --out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .deficit import build_deficit_report
from .entropy import coherent_reference, parse_phi, phi_entropy
from .errors import AssertionFailure, ToolkitError
from .fock_core import FockVector, load_state
from .harness import (RunSpec, parse_family, sweep_constants,
                      verify_faber_krahn, verify_generalized, verify_stabtau,
                      verify_wehrl)
from .husimi import HusimiEvaluator
from .levelsets import build_profile
from .logsob import FockFunction, logsob_deficit


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc, out: str | None) -> None:
    _write(json.dumps(doc, indent=2) + "\n", out)


def _emit_csv(rows, fieldnames, out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    _write(buf.getvalue(), out)


def _load_pure(path: str) -> FockVector:
    state = load_state(path)
    if not isinstance(state, FockVector):
        raise ToolkitError(f"{path} does not hold a pure state")
    return state


def cmd_entropy(args) -> int:
    rho = load_state(args.state)
    if isinstance(rho, FockVector):
        rho = rho.projector()
    phi = parse_phi(args.phi)
    value = phi_entropy(rho, phi)
    reference = coherent_reference(phi)
    _emit_json({"value": value, "reference": reference,
                "deficit": reference - value}, args.out)
    return 0


def cmd_husimi_grid(args) -> int:
    rho = load_state(args.state)
    if isinstance(rho, FockVector):
        rho = rho.projector()
    ev = HusimiEvaluator(rho)
    xs = np.arange(-args.radius, args.radius + args.step / 2.0, args.step)
    rows = []
    for x in xs:
        u = ev.values(x - 1j * xs)
        rows.extend({"x": float(x), "omega": float(w), "u": float(v)}
                    for w, v in zip(xs, u))
    _emit_csv(rows, ["x", "omega", "u"], args.out)
    return 0


def cmd_mu_profile(args) -> int:
    rho = load_state(args.state)
    if isinstance(rho, FockVector):
        rho = rho.projector()
    profile = build_profile(rho, K=args.levels, rays=args.rays)
    rows = [{"t": float(t), "mu": float(m), "mu0": float(m0), "H": float(h)}
            for t, m, m0, h in zip(profile.levels, profile.mu, profile.mu0,
                                   profile.H_at)]
    _emit_csv(rows, ["t", "mu", "mu0", "H"], args.out)
    return 0


def cmd_deficit(args) -> int:
    state = load_state(args.state)
    f = state if isinstance(state, FockVector) else None
    rho = state.projector() if f is not None else state
    rep = build_deficit_report(rho, f=f)
    _emit_json(rep.to_dict(), args.out)
    return 0


def cmd_logsob(args) -> int:
    f = _load_pure(args.coeffs)
    rep = logsob_deficit(FockFunction(f.coeffs, h=args.h))
    _emit_json(rep.to_dict(), args.out)
    return 0


def cmd_verify(args) -> int:
    spec = RunSpec(family=args.family, dim=args.dim, rank=args.rank,
                   count=args.count, seed=args.seed, tol=args.tol)
    code = 0
    if args.theorem == "wehrl":
        try:
            run = verify_wehrl(spec)
        except AssertionFailure as exc:
            run, code = exc.run, 1
        doc = run.to_dict()
    elif args.theorem == "generalized":
        phi = parse_phi(args.phi)
        try:
            run = verify_generalized(spec, phi)
        except AssertionFailure as exc:
            run, code = exc.run, 1
        doc = run.to_dict()
    elif args.theorem == "stabtau":
        f = _load_pure(args.state)
        rep = verify_stabtau(f, args.tau, c_candidate=args.c)
        doc = rep.to_dict()
        code = 0 if rep.lhs <= rep.reference + 1e-8 else 1
    elif args.theorem == "faber-krahn":
        f = _load_pure(args.state)
        rep = verify_faber_krahn(f, args.tau, c0_candidate=args.c0)
        doc = rep.to_dict()
        code = 0 if rep.lhs <= rep.rhs_reference + args.tol else 1
    else:  # pragma: no cover - argparse restricts choices
        raise ToolkitError(f"unknown theorem {args.theorem!r}")
    _emit_json(doc, args.out)
    return code


def cmd_sweep(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    rows = sweep_constants(config)
    if args.format == "json":
        _emit_json(rows, args.out)
    else:
        fields = list(rows[0].keys()) if rows else ["family", "phi"]
        _emit_csv(rows, fields, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wehrlkit",
        description="Phase-space entropies, level profiles, and deficits "
                    "for truncated Fock-basis states",
    )
    p.add_argument("--out", default=None, help="write output to FILE")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--dim", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("entropy", help="functional of a convex symbol")
    q.add_argument("--state", required=True)
    q.add_argument("--phi", default="wehrl",
                   help="wehrl | power:R | hinge:TAU")
    q.set_defaults(func=cmd_entropy)

    q = sub.add_parser("husimi-grid", help="CSV of u on a rectangular grid")
    q.add_argument("--state", required=True)
    q.add_argument("--radius", type=float, default=3.0)
    q.add_argument("--step", type=float, default=0.1)
    q.set_defaults(func=cmd_husimi_grid)

    q = sub.add_parser("mu-profile", help="CSV of t, mu, mu0, H")
    q.add_argument("--state", required=True)
    q.add_argument("--levels", type=int, default=400)
    q.add_argument("--rays", type=int, default=256)
    q.set_defaults(func=cmd_mu_profile)

    q = sub.add_parser("deficit", help="distance to the coherent family")
    q.add_argument("--state", required=True)
    q.set_defaults(func=cmd_deficit)

    q = sub.add_parser("logsob", help="log-Sobolev deficit of a Fock function")
    q.add_argument("--coeffs", required=True)
    q.add_argument("--h", type=float, default=1.0)
    q.set_defaults(func=cmd_logsob)

    q = sub.add_parser("verify", help="theorem verification sweeps")
    q.add_argument("theorem",
                   choices=["wehrl", "generalized", "stabtau", "faber-krahn"])
    q.add_argument("--family", default="ginibre")
    q.add_argument("--rank", type=int, default=2)
    q.add_argument("--count", type=int, default=5)
    q.add_argument("--phi", default="power:2")
    q.add_argument("--state", help="pure-state file for stabtau/faber-krahn")
    q.add_argument("--tau", type=float, default=0.3)
    q.add_argument("--c", type=float, default=None)
    q.add_argument("--c0", type=float, default=None)
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("sweep", help="empirical-constant table from a config")
    q.add_argument("--config", required=True,
                   help="JSON with families[], phis[], taus[], seeds[]")
    q.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
