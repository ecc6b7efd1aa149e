"""
Command-line front end.

Exit codes: 0 success, 1 validation or configuration failure, 2 runtime
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .config import load_document
from .exceptions import ConfigError, GFNashError
from .game import monotonicity_constant, solve_quadratic_ne
from .graph import is_strongly_connected, spectral_certificate, validate_deltas, validate_doubly_stochastic
from .harness import compare, run_experiment, sweep

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


def validation_report(doc) -> list[tuple[str, bool, str]]:
    """``(check, passed, detail)`` for every structural precondition of a run."""
    spec = doc.spec
    n = spec.game.n
    out = []
    g = spec.graph.graph(n)
    connected = is_strongly_connected(g)
    out.append(("strong connectivity", connected, "" if connected else "graph is not strongly connected"))

    w = None
    try:
        _, w = spec.graph.build(n)
    except GFNashError as exc:
        out.append(("doubly stochastic", False, str(exc)))
    if w is not None:
        bad = validate_doubly_stochastic(w, 1e-10, graph=g)
        out.append(("doubly stochastic", bad is None, "" if bad is None else bad.message))

    deltas = spec.run.delta_vector(n)
    if w is not None:
        bad = validate_deltas(w, deltas)
        out.append(("delta condition", bad is None, "" if bad is None else bad.message))
    try:
        chi = monotonicity_constant(spec.game.build())
        out.append(("strong monotonicity", True, f"chi = {chi:.6g}"))
    except GFNashError as exc:
        out.append(("strong monotonicity", False, str(exc)))

    if w is not None and connected and validate_deltas(w, deltas) is None:
        for i in range(n):
            try:
                cert = spectral_certificate(w, i, deltas)
                out.append((f"spectral certificate player {i + 1}", cert.valid,
                            f"rho = {cert.rho:.10f}, gamma = {cert.gamma:.10f}"))
            except GFNashError as exc:
                out.append((f"spectral certificate player {i + 1}", False, str(exc)))
    else:
        out.append(("spectral certificates", False, "skipped: preconditions failed"))
    return out


def _print_report(report, stream):
    for name, ok, detail in report:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        print(line, file=stream)


def _load(args):
    return load_document(args.config, overrides=args.set or ())


def cmd_validate(args) -> int:
    doc = _load(args)
    report = validation_report(doc)
    _print_report(report, sys.stdout)
    return EXIT_OK if all(ok for _, ok, _ in report) else EXIT_INVALID


def cmd_solve_ne(args) -> int:
    doc = _load(args)
    x = solve_quadratic_ne(doc.spec.game.build(), doc.spec.game.sets())
    row = ",".join(f"{v:.17g}" for v in x)
    print(row)
    print(f"# sum = {x.sum():.17g}")
    out = Path(args.out) if args.out else doc.output
    out.mkdir(parents=True, exist_ok=True)
    (out / "ne.csv").write_text(row + "\n")
    return EXIT_OK


def _precheck(doc) -> bool:
    report = validation_report(doc)
    failed = [r for r in report if not r[1]]
    if failed:
        _print_report(failed, sys.stderr)
    return not failed


def cmd_run(args) -> int:
    doc = _load(args)
    if not _precheck(doc):
        return EXIT_INVALID
    out = Path(args.out) if args.out else doc.output
    res = run_experiment(doc.spec, out_dir=out, jobs=args.jobs)
    print(f"final mean rel_err = {res.rel_err_mean[-1]:.6e} (k = {res.k[-1]}, {len(res.records)} seeds)")
    print(f"artifacts written to {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    doc = _load(args)
    if not _precheck(doc):
        return EXIT_INVALID
    values = [yaml.safe_load(v) for v in args.values.split(",") if v.strip()]
    out = Path(args.out) if args.out else doc.output
    results = sweep(doc.spec, args.axis, values, out_dir=out, jobs=args.jobs)
    for v, res in results:
        print(f"{args.axis}={v}: final mean rel_err = {res.rel_err_mean[-1]:.6e}, "
              f"final mean consensus_err = {res.consensus_mean[-1]:.6e}")
    print(f"table written to {out / f'sweep_{args.axis}.csv'}")
    return EXIT_OK


def cmd_compare(args) -> int:
    doc = _load(args)
    if not _precheck(doc):
        return EXIT_INVALID
    out = Path(args.out) if args.out else doc.output
    report = compare(doc.spec, out_dir=out, jobs=args.jobs, threshold=args.threshold)
    for line in report.lines():
        print(line)
    print(f"paired trajectories written to {out / 'sweep_mode.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gfnash", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, runs=True):
        p.add_argument("--config", required=True, help="run document (YAML)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a document field, e.g. algo.iters=500 (repeatable)")
        p.add_argument("--out", help="output directory (default: experiment.output)")
        if runs:
            p.add_argument("--jobs", type=int, default=1, help="parallel seed workers")

    p = sub.add_parser("validate", help="check graph, weights, deltas and monotonicity")
    common(p, runs=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve-ne", help="closed-form equilibrium of the quadratic game")
    common(p, runs=False)
    p.set_defaults(func=cmd_solve_ne)

    p = sub.add_parser("run", help="multi-seed run with CSV trajectories")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="one experiment per parameter value")
    common(p)
    p.add_argument("--axis", required=True, choices=["alpha0", "N", "topology", "mode", "delta", "mu0"])
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="gradient-free vs gradient-based with shared seeds")
    common(p)
    p.add_argument("--threshold", type=float, default=0.1)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (GFNashError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
