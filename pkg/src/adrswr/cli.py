"""Command-line front end.

    adrswr roots     --case 1
    adrswr surface   --case 2 --kind robin2
    adrswr optimize  --case 1
    adrswr solve     --case 1 --kind opt-dirichlet
    adrswr compare   --case 1

Every run writes ``manifest.json`` plus its data files into ``--out``.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import SWRError
from .io import (
    ROOTS_HEADER,
    SNAPSHOT_HEADER,
    SURFACE_HEADER,
    TRACE_HEADER,
    snapshot_rows,
    trace_rows,
    write_csv,
    write_json,
)
from .optimizer import interface_coefficients, optimize_problem
from .stencil import case, loads_problem, problem_to_dict
from .symbol import TransmissionKind, TransmissionSpec, characteristic_roots, default_surface_ranges, sample_surface
from .solver import SolverConfig, converged_reference, swr_solve

SNAPSHOT_ITERATIONS = (1, 2, 3, 5, 10)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--case", type=int, help="registered case id (1..7)")
    src.add_argument("--config", type=Path, help="problem definition in the JSON registry schema")
    common.add_argument("--kind", default="dirichlet", choices=[k.value for k in TransmissionKind])
    common.add_argument("--alpha", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--T", type=float, dest="T")
    common.add_argument("--dt", type=float)
    common.add_argument("--dx", type=float)
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--max-iterations", type=int, default=200)
    common.add_argument("--out", type=Path, default=Path("out"))

    parser = argparse.ArgumentParser(prog="adrswr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("roots", parents=[common], help="characteristic roots on s = i omega")
    surf = sub.add_parser("surface", parents=[common], help="|rho| over (omega, sigma)")
    surf.add_argument("--n-omega", type=int, default=201)
    surf.add_argument("--n-sigma", type=int, default=51)
    surf.add_argument("--omega-max", type=float, help="default pi/dt")
    surf.add_argument("--sigma-max", type=float, default=10.0)
    sub.add_parser("optimize", parents=[common], help="equioscillation search for alpha*")
    sub.add_parser("solve", parents=[common], help="waveform-relaxation solve")
    sub.add_parser("compare", parents=[common], help="Dirichlet vs optimized Dirichlet")
    return parser


def resolve_problem(args):
    problem = loads_problem(args.config.read_text()) if args.config else case(args.case)
    overrides = {k: getattr(args, k) for k in ("T", "dt", "dx") if getattr(args, k) is not None}
    return replace(problem, **overrides) if overrides else problem


def resolve_spec(args, problem, kind=None) -> tuple:
    """Transmission spec; optimized kinds without --alpha take the best optimizer root."""
    kind = TransmissionKind(kind or args.kind)
    if not kind.optimized:
        return TransmissionSpec(kind), None
    if args.alpha is not None:
        return TransmissionSpec(kind, args.alpha, args.beta), None
    result = optimize_problem(problem)
    best = int(np.argmin(result.surface_max))
    return TransmissionSpec(kind, result.roots[best]), result


def _config(args) -> SolverConfig:
    return SolverConfig(max_iterations=args.max_iterations, tolerance=args.tol)


def _manifest(args, problem, spec=None, **extra) -> dict:
    doc = {
        "command": args.command,
        "version": __version__,
        "problem": problem_to_dict(problem),
        "tolerance": args.tol,
        "max_iterations": args.max_iterations,
    }
    if spec is not None:
        doc["transmission"] = {"kind": spec.kind.value, "alpha": spec.alpha, "beta": spec.beta}
    doc.update(extra)
    return doc


def cmd_roots(args, out):
    problem = resolve_problem(args)
    left, right = interface_coefficients(problem)
    omega = np.linspace(-math.pi / problem.dt, math.pi / problem.dt, 201)
    rows = []
    for side, coeffs in (("left", left), ("right", right)):
        rm, rp = characteristic_roots(coeffs, 1j * omega)
        rows += [(w, side, m.real, m.imag, p.real, p.imag, abs(m), abs(p)) for w, m, p in zip(omega, rm, rp)]
    write_csv(out / "roots.csv", ROOTS_HEADER, rows)
    write_json(out / "manifest.json", _manifest(args, problem))
    return f"wrote {len(rows)} root rows"


def cmd_surface(args, out):
    problem = resolve_problem(args)
    spec, _ = resolve_spec(args, problem)
    left, right = interface_coefficients(problem)
    omega_range, _ = default_surface_ranges(problem.dt)
    if args.omega_max is not None:
        omega_range = (-args.omega_max, args.omega_max)
    surface = sample_surface(left, right, spec, omega_range, (0.0, args.sigma_max), args.n_omega, args.n_sigma)
    write_csv(out / "surface.csv", SURFACE_HEADER, surface.rows())
    w, s = surface.argmax()
    write_json(out / "manifest.json", _manifest(args, problem, spec, argmax={"omega": w, "sigma": s}))
    return f"max |rho| = {surface.abs_rho.max():.6g} at omega={w:.6g}, sigma={s:.6g}"


def cmd_optimize(args, out):
    problem = resolve_problem(args)
    result = optimize_problem(problem)
    doc = {
        "case": problem.case_id,
        "omega_min": result.omega_min,
        "omega_max": result.omega_max,
        "roots": [
            {"alpha": a, "h_residual": h, "band_max_abs_rho": m}
            for a, h, m in zip(result.roots, result.h_residual, result.surface_max)
        ],
    }
    write_json(out / "optimize.json", doc)
    write_json(out / "manifest.json", _manifest(args, problem))
    return "alpha* = " + ", ".join(f"{a:.5f}" for a in result.roots)


def _solve_one(args, problem, spec, out, suffix=""):
    problem = problem.with_overlap(spec.overlap_nodes)
    config = _config(args)
    reference = converged_reference(problem, spec, config)
    left, right, trace = swr_solve(problem, spec, config, reference=reference,
                                   snapshot_iterations=SNAPSHOT_ITERATIONS)
    write_csv(out / f"trace{suffix}.csv", TRACE_HEADER, trace_rows(trace))
    snaps = {str(k): v for k, v in sorted(trace.snapshots.items())}
    snaps["final"] = (left, right)
    snaps["converged"] = reference
    write_csv(out / f"snapshots{suffix}.csv", SNAPSHOT_HEADER, snapshot_rows(snaps, problem.times))
    return problem, trace


def cmd_solve(args, out):
    problem = resolve_problem(args)
    spec, _ = resolve_spec(args, problem)
    problem, trace = _solve_one(args, problem, spec, out)
    write_json(out / "manifest.json", _manifest(
        args, problem, spec, iterations=trace.iterations, iterations_to_tolerance=trace.iterations_to_tolerance))
    if trace.converged:
        return f"{spec.kind.value}: converged in {trace.iterations_to_tolerance} iterations"
    return f"{spec.kind.value}: not converged after {trace.iterations} iterations"


def cmd_compare(args, out):
    problem = resolve_problem(args)
    plain = TransmissionSpec(TransmissionKind.DIRICHLET)
    optimized, _ = resolve_spec(args, problem, TransmissionKind.OPT_DIRICHLET)
    _, t_plain = _solve_one(args, problem, plain, out, "_dirichlet")
    _, t_opt = _solve_one(args, problem, optimized, out, "_opt-dirichlet")
    n = max(t_plain.iterations, t_opt.iterations)
    pad = lambda r: list(r) + [None] * (n - len(r))  # noqa: E731
    rows = zip(range(1, n + 1), pad(t_plain.residuals), pad(t_opt.residuals))
    write_csv(out / "compare.csv", ("iteration", "residual_dirichlet", "residual_opt_dirichlet"), rows)
    counts = {"dirichlet": t_plain.iterations_to_tolerance, "opt-dirichlet": t_opt.iterations_to_tolerance}
    write_json(out / "manifest.json", _manifest(args, problem, optimized, iterations_to_tolerance=counts))
    return f"iterations to {args.tol:g}: dirichlet {counts['dirichlet']}, opt-dirichlet {counts['opt-dirichlet']}"


COMMANDS = {
    "roots": cmd_roots,
    "surface": cmd_surface,
    "optimize": cmd_optimize,
    "solve": cmd_solve,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        message = COMMANDS[args.command](args, args.out)
    except (SWRError, ValueError, OSError) as exc:
        print(f"adrswr {args.command}: error: {exc}", file=sys.stderr)
        return 1
    print(message)
    return 0


if __name__ == "__main__":
    sys.exit(main())
