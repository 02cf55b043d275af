"""Command-line front end: analyze polytopes, run solves, reproduce the
bundled experiments, and run the invariant self-test.

Exit codes: 0 success, 1 self-test/assertion failure, 2 parse error,
3 instance too large, 4 trivial polytope, 5 dimension mismatch,
6 invalid curvature configuration (mu > L).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .atoms import (AtomMatrix, DegeneratePolytopeError, InstanceTooLargeError, PolytopeError,
                    SimplexPoint, diameter)
from .estimators import FrankWolfeAway  # noqa: F401  (re-exported convenience)
from .experiments import ExperimentError, ExperimentSpec, run_experiment
from .fileio import (ParseError, fmt_float, read_atoms, read_objective, write_csv, write_json,
                     write_trace_csv)
from .measures import bar_phi_bounds, facial_distance, local_phi_lower_bound
from .objectives import ObjectiveError
from .selftest import SUITES, run_selftest
from .solver import (SolverConfig, TIE_BREAK_POLICY, certified_f_star, drop_step_audit,
                     rate_bound_composite, rate_bound_generic, rate_bound_quadratic, run,
                     verify_linear_rate)
from .svgplot import line_plot

EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_TOO_LARGE = 3
EXIT_TRIVIAL = 4
EXIT_DIM_MISMATCH = 5
EXIT_BAD_CURVATURE = 6


def cmd_analyze(args) -> int:
    try:
        atoms = read_atoms(args.atoms)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = facial_distance(atoms)
    except InstanceTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except DegeneratePolytopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRIVIAL

    diam = diameter(atoms)
    print(f"atoms: n={atoms.n} in dimension m={atoms.m}")
    print(f"facial distance: {fmt_float(report.value)}")
    print(f"diameter:        {fmt_float(diam)}")
    print(f"minimizing face: atoms {list(report.minimizing_face.atom_indices)}")
    print(f"witness u: {[fmt_float(t) for t in report.witness.u]}")
    print(f"witness v: {[fmt_float(t) for t in report.witness.v]}")
    print("per-face distances:")
    for face, dist in report.face_distances:
        print(f"  atoms {list(face.atom_indices)}: {fmt_float(dist)}")

    payload = report.to_json_dict("facial-distance")
    payload["diameter"] = diam
    payload["n_atoms"] = atoms.n
    payload["ambient_dim"] = atoms.m
    payload["per_face"] = [{"face_atoms": list(f.atom_indices), "distance": d}
                           for f, d in report.face_distances]
    if args.zface:
        try:
            idx = [int(tok) for tok in args.zface.split(",")]
            anchors = [SimplexPoint.vertex(atoms.n, i) for i in idx]
        except (ValueError, IndexError) as exc:
            print(f"error: bad --zface: {exc}", file=sys.stderr)
            return EXIT_PARSE
        bound = local_phi_lower_bound(atoms, anchors)
        print(f"anchored lower bound (atoms {idx}): {fmt_float(bound)}")
        payload["local_phi_lower_bound"] = bound
        payload["zface"] = idx
    if args.json:
        write_json(args.json, payload)
        print(f"wrote {args.json}")
    return 0


def _rate_report(args, atoms, objective, trace) -> dict:
    """Presolve for the anchor data, then assemble the requested rate bound."""
    presolve = run(atoms, objective, SimplexPoint.vertex(atoms.n, args.x0),
                   SolverConfig(max_iter=50_000, gap_tol=1e-14))
    f_star = certified_f_star(presolve)
    z_star = presolve.final.x
    diam = diameter(atoms)
    if args.rate == "thm4":
        mu = objective.strong_convexity if objective.kind == "quadratic" else objective.mu
        lip = objective.lipschitz
        if not mu or mu <= 0:
            raise ObjectiveError("this rate needs a strongly convex objective")
        c = local_phi_lower_bound(atoms, [z_star]) / 2.0
        bound = rate_bound_generic(mu, lip, c, diam)
    elif args.rate == "thm5":
        if objective.kind != "quadratic":
            raise ObjectiveError("this rate applies to quadratic objectives")
        root = objective.sqrt_q()
        abar = AtomMatrix(np.vstack([root @ atoms.columns, objective.b @ atoms.columns]))
        g = root @ (atoms.columns @ z_star.weights)
        lower, _ = bar_phi_bounds(abar, g, samples=32)
        bound = rate_bound_quadratic(lower, diameter(AtomMatrix(root @ atoms.columns)))
    else:
        if objective.kind != "composite":
            raise ObjectiveError("this rate applies to composite objectives")
        ea = objective.e @ atoms.columns
        abar = AtomMatrix(np.vstack([ea, (objective.b @ atoms.columns) / objective.mu]))
        image = ea @ z_star.weights
        g = np.asarray(objective.h_gradient(image), dtype=float) / objective.mu
        lower, _ = bar_phi_bounds(abar, g, samples=32)
        bound = rate_bound_composite(objective.mu, objective.lipschitz, lower,
                                     diameter(AtomMatrix(ea)))
    report = verify_linear_rate(trace, bound.r, f_star)
    audit = drop_step_audit(trace)
    return {
        "theorem": bound.theorem,
        "r": bound.r,
        "raw": bound.raw,
        "ingredients": bound.ingredients,
        "f_star_bound": f_star,
        "rate_holds": report.passed,
        "first_violation": report.first_violation,
        "max_excess": report.max_excess,
        "drop_steps": audit.n_drop,
        "steps": audit.n_steps,
        "drop_audit_passed": audit.passed,
    }


def cmd_solve(args) -> int:
    try:
        atoms = read_atoms(args.atoms)
        objective = read_objective(args.objective)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ObjectiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CURVATURE
    dim = objective.dim if hasattr(objective, "dim") else atoms.m
    if dim != atoms.m:
        print(f"error: objective dimension {dim} does not match atoms in R^{atoms.m}",
              file=sys.stderr)
        return EXIT_DIM_MISMATCH
    if not 0 <= args.x0 < atoms.n:
        print(f"error: --x0 {args.x0} out of range", file=sys.stderr)
        return EXIT_PARSE

    config = SolverConfig(gap_tol=args.gap_tol, max_iter=args.max_iter)
    try:
        trace = run(atoms, objective, SimplexPoint.vertex(atoms.n, args.x0), config)
    except (PolytopeError, ObjectiveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIM_MISMATCH

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trace_csv(out / "trace.csv", trace)
    manifest = {
        "atoms_file": str(args.atoms),
        "objective_file": str(args.objective),
        "objective_kind": objective.kind,
        "x0_index": args.x0,
        "config": {"gap_tol": config.gap_tol, "max_iter": config.max_iter,
                   "step_rule": config.step_rule},
        "tie_break_policy": TIE_BREAK_POLICY,
        "seeds": {},
        "converged": trace.converged,
        "iterations": len(trace.steps()),
        "final_f": trace.final.f_value,
        "final_fw_gap": trace.final.fw_gap,
    }
    final = trace.final
    print(f"{len(trace.steps())} steps, final f={fmt_float(final.f_value)}, "
          f"fw gap={fmt_float(final.fw_gap)}, converged={trace.converged}")
    if args.rate:
        try:
            rate = _rate_report(args, atoms, objective, trace)
        except ObjectiveError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_CURVATURE
        manifest["rate"] = rate
        write_json(out / "rate_report.json", rate)
        print(f"rate check ({rate['theorem']}): r={fmt_float(rate['r'])} "
              f"holds={rate['rate_holds']} drop_audit={rate['drop_audit_passed']}")
    write_json(out / "manifest.json", manifest)
    print(f"wrote {out / 'trace.csv'} and {out / 'manifest.json'}")
    return 0


def cmd_reproduce(args) -> int:
    params = {}
    for tok in args.param or []:
        if "=" not in tok:
            print(f"error: --param expects key=value, got {tok!r}", file=sys.stderr)
            return EXIT_PARSE
        key, val = tok.split("=", 1)
        try:
            params[key] = float(val)
        except ValueError:
            print(f"error: parameter {key} needs a numeric value", file=sys.stderr)
            return EXIT_PARSE
    try:
        spec = ExperimentSpec(args.experiment, params, args.out, not args.no_plot)
        result = run_experiment(spec)
    except ExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.experiment
    write_csv(out / f"{stem}.csv", result.header, result.rows)
    wrote = [str(out / f"{stem}.csv")]
    if spec.plot and result.series:
        svg = line_plot(result.series, title=stem,
                        xlabel=result.header[0], ylabel=result.header[1])
        (out / f"{stem}.svg").parent.mkdir(parents=True, exist_ok=True)
        from .fileio import atomic_write_text
        atomic_write_text(out / f"{stem}.svg", svg)
        wrote.append(str(out / f"{stem}.svg"))
    for line in result.lines:
        print(line)
    print("wrote " + ", ".join(wrote))
    return 0 if result.passed else EXIT_FAIL


def cmd_selftest(args) -> int:
    try:
        results = run_selftest(args.suite, args.corrupt_lp_pivot_tol)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name:<10s} ({res.seconds:7.2f} s)  {res.detail}")
        failed += 0 if res.passed else 1
    print(f"{len(results) - failed}/{len(results)} suites passed")
    return 0 if failed == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fwas",
                                     description="Polytope conditioning and away-step solves")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="facial distance and per-face report")
    p.add_argument("atoms", help="atom file (CSV rows or JSON)")
    p.add_argument("--zface", help="comma-separated atom indices anchoring a localized bound")
    p.add_argument("--json", help="write the report as JSON to this path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("solve", help="run the away-step method")
    p.add_argument("atoms")
    p.add_argument("objective", help="objective file (JSON)")
    p.add_argument("--x0", type=int, default=0, help="starting vertex index")
    p.add_argument("--gap-tol", type=float, default=1e-12, dest="gap_tol")
    p.add_argument("--max-iter", type=int, default=1000, dest="max_iter")
    p.add_argument("--rate", choices=("thm4", "thm5", "thm6"),
                   help="verify the matching decay bound on the trace")
    p.add_argument("--out", default="fwas-out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reproduce", help="rerun a bundled experiment")
    p.add_argument("experiment")
    p.add_argument("--param", action="append", metavar="k=v")
    p.add_argument("--out", default="fwas-out")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("selftest", help="run the invariant suites")
    p.add_argument("--suite", choices=sorted(SUITES))
    p.add_argument("--corrupt-lp-pivot-tol", type=float, default=None,
                   help="debug: break the LP kernel to exercise failure paths")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
