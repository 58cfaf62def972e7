"""Command-line entry point: ``mixbly <subcommand> ...``.

Exit codes: 0 when every verdict passes or is unverdicted, 1 when a verdict
fails, 2 on an input or numerical error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from . import bounds as bd
from .bathtub import BathtubProblem, bathtub_bounds
from .bounds import DomainMeta, OperatorSpec
from .discretize import CONVENTIONS, Grid1D
from .embedding import discrete_embedding_constant
from .errors import MixBLYError
from .harness import RunConfig, emit_plot_data, run_verification, solve_operator, sweep, write_sweep_csv
from .specfun import normalization_constant

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _domain(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x_lo,x_hi, got {text!r}")
    return lo, hi


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_cns(args) -> int:
    kc = normalization_constant(args.n, args.s)
    _emit({"n": kc.n, "s": kc.s, "c": kc.value, "err": kc.quadrature_error_estimate})
    return EXIT_OK


def cmd_bathtub(args) -> int:
    p = BathtubProblem(args.n, args.s, args.alpha, args.beta, args.m1, args.m2)
    _emit(bathtub_bounds(p).as_dict())
    return EXIT_OK


def cmd_bounds(args) -> int:
    d = DomainMeta(args.n, args.volume)
    op = OperatorSpec(args.n, args.a, args.b, args.s)
    k = args.k
    record = {
        "n": args.n, "s": args.s, "a": args.a, "b": args.b, "volume": args.volume, "k": k,
        "regime": op.regime(args.c_e),
        "weyl_asymptotic": bd.weyl_asymptotic(k, d),
        "polya_bound": bd.polya_bound(k, d),
        "liyau_classical": bd.liyau_classical(k, d),
        "liyau_fractional": bd.liyau_fractional(k, args.s, d),
        "legendre_liyau_from_berezin": bd.legendre_liyau_from_berezin(k, d),
        "mixed_bly_lower": bd.mixed_bly_lower(k, op, d, args.c_e),
        "per_eigenvalue_lower": bd.per_eigenvalue_lower(k, op, d, args.c_e),
    }
    if args.n == 2:
        record["remark_a"] = bd.remark_a_special(args.volume, args.s)._asdict()
    _emit(record)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    g = Grid1D(args.domain[0], args.domain[1], args.grid)
    sp = solve_operator(g, OperatorSpec(1, args.a, args.b, args.s), args.k)
    values = [float(v) for v in sp.eigenvalues]
    _emit(values)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "eigenvalue", "local_part", "nonlocal_part", "residual"])
            for i, v in enumerate(values):
                writer.writerow([i + 1, f"{v:.12g}", f"{sp.local_part[i]:.12g}",
                                 f"{sp.nonlocal_part[i]:.12g}", f"{sp.residual_norms[i]:.3g}"])
    return EXIT_OK


def cmd_embed(args) -> int:
    g = Grid1D(args.domain[0], args.domain[1], args.grid)
    est = discrete_embedding_constant(g, args.s, args.convention)
    _emit(est.as_dict(full=args.full))
    return EXIT_OK


def cmd_verify(args) -> int:
    overrides = {
        "a": args.a, "b": args.b, "s": args.s, "k_max": args.k_max,
        "grid_sizes": args.grid, "output": args.output, "format": args.format,
    }
    cfg = RunConfig.from_file(args.config, **overrides)
    report = run_verification(cfg)
    if cfg.output is None:
        _emit(report.to_dict())
    elif cfg.format == "csv":
        if report.rows:
            emit_plot_data(report, cfg.output)
    else:
        with open(cfg.output, "w") as fh:
            fh.write(report.to_json(indent=2))
    if report.error:
        print(report.error, file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_sweep(args) -> int:
    with open(args.config) as fh:
        spec = json.load(fh)
    rows = sweep(spec, jobs=args.jobs)
    write_sweep_csv(rows, args.output or sys.stdout)
    if any(r["verdict"] == "error" for r in rows):
        return EXIT_ERROR
    return EXIT_FAIL if any(r["verdict"] == "fail" for r in rows) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixbly", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cns", help="kernel normalisation constant c_{n,s}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.set_defaults(func=cmd_cns)

    p = sub.add_parser("bathtub", help="bathtub maximiser for a two-moment constraint")
    for name in ("n",):
        p.add_argument(f"--{name}", type=int, required=True)
    for name in ("s", "alpha", "beta", "m1", "m2"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.set_defaults(func=cmd_bathtub)

    p = sub.add_parser("bounds", help="closed-form eigenvalue bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--volume", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c-e", dest="c_e", type=float, default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("spectrum", help="lowest eigenvalues of the discrete operator")
    p.add_argument("--domain", type=_domain, default=(0.0, 1.0), help="x_lo,x_hi (use --domain=-1,1 for negatives)")
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("embed", help="discrete embedding constant")
    p.add_argument("--domain", type=_domain, default=(0.0, 1.0))
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--convention", choices=CONVENTIONS, default=CONVENTIONS[0])
    p.add_argument("--full", action="store_true", help="include the extremiser")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("verify", help="run a verification from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--k-max", dest="k_max", type=int, default=None)
    p.add_argument("--grid", type=int, action="append", default=None, help="repeat for several grids")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="parameter sweep to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (MixBLYError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
