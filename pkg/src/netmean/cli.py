"""Command-line interface.

Subcommands map one-to-one onto the library operations:

  dist             Procrustean distance between two graph files
  mean             Frechet mean of a sample file (cone / iterative / exact)
  domain           Dirichlet fundamental domain (optionally reduced)
  rays             extreme rays of the reduced fundamental domain
  test             k-sample mean-equality test
  simulate         seeded sampling and the SLLN / CLT experiments
  example-cone     the planar radial-Gaussian law and its minimizing circle
  example-annulus  the uniform quarter-annulus mean report
  compare          Euclidean vs Procrustean distance comparator

Every primary output is canonical JSON (sorted keys, no timestamps) stamped
with the sha256 digest of the parsed inputs and the seed, so identical
invocations produce byte-identical files.  Exit codes: 0 success,
2 validation error, 3 complexity/guard error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import graphspace as gs
from . import io, metric, polyhedra, stats
from . import frechet as fr
from .errors import ComplexityError, NetmeanError, SamplingError, ValidationError
from .sampling import DistributionSpec, sample


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError as exc:
        raise ValidationError(f"expected comma-separated floats, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError as exc:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from exc


def _emit(command: str, payload: dict, inputs, seed=None, out=None) -> None:
    envelope = {
        "command": command,
        "seed": seed,
        "input_digest": io.digest(inputs),
        "result": payload,
    }
    text = io.canonical_json(envelope)
    sys.stdout.write(text)
    if out:
        with open(out, "w") as fh:
            fh.write(text)


def _cmd_dist(args) -> int:
    da, wa = io.load_graph(args.a)
    db, wb = io.load_graph(args.b)
    if da != db:
        raise ValidationError(f"node counts differ: {da} vs {db}")
    res = metric.procrustean_distance(wa, wb, method=args.method)
    _emit(
        "dist",
        res.to_json(),
        {"a": wa.tolist(), "b": wb.tolist(), "method": args.method},
        out=args.out,
    )
    return 0


def _cmd_mean(args) -> int:
    s = io.load_samples(args.samples, d=args.d)
    axis = np.asarray(_floats(args.axis)) if args.axis else None
    if args.method == "cone":
        result = fr.mean_cone(s, axis if axis is not None else fr.medoid(s))
    elif args.method == "iterative":
        result = fr.mean_iterative(s, init=axis, max_iter=args.max_iter, tol=args.tol)
    elif args.method == "exact":
        result = fr.mean_exact_small(s)
    else:
        try:
            result = fr.mean_cone(s, axis if axis is not None else fr.medoid(s))
        except NetmeanError:
            result = fr.mean_iterative(s, max_iter=args.max_iter, tol=args.tol)
    payload = result.to_json()
    if args.descent_csv and result.history:
        io.write_csv_rows(
            args.descent_csv,
            [{"iteration": i, "frechet_value": v} for i, v in enumerate(result.history)],
        )
    _emit(
        "mean",
        payload,
        {"samples": s.samples.tolist(), "d": s.d, "method": args.method},
        seed=s.seed,
        out=args.out,
    )
    return 0


def _domain_from_args(args) -> polyhedra.Polyhedron:
    w = np.asarray(_floats(args.w))
    gs.as_weight_vector(w, args.d)
    return polyhedra.build_fundamental_domain(w, args.d)


def _cmd_domain(args) -> int:
    p = _domain_from_args(args)
    raw_count = len(p.halfspaces)
    if args.reduce:
        p = polyhedra.reduce(p)
    payload = p.to_json()
    payload["raw_halfspace_count"] = raw_count
    payload["halfspace_count"] = len(p.halfspaces)
    _emit("domain", payload, {"w": _floats(args.w), "reduce": bool(args.reduce)}, out=args.out)
    return 0


def _cmd_rays(args) -> int:
    p = polyhedra.reduce(_domain_from_args(args))
    p.rays = polyhedra.rays(p)
    payload = p.to_json()
    payload["halfspace_count"] = len(p.halfspaces)
    payload["ray_count"] = len(p.rays)
    _emit("rays", payload, {"w": _floats(args.w)}, out=args.out)
    return 0


def _cmd_test(args) -> int:
    groups = [io.load_samples(path, d=args.d) for path in args.groups]
    axis = np.asarray(_floats(args.axis)) if args.axis else None
    report = stats.k_sample_test(groups, axis=axis)
    _emit(
        "test",
        report.to_json(),
        {"groups": [g.samples.tolist() for g in groups]},
        out=args.out,
    )
    return 0


def _cmd_simulate(args) -> int:
    spec = DistributionSpec.from_json(open(args.spec).read())
    if args.seed is not None:
        spec.seed = args.seed
    inputs = {"spec": spec.to_json(), "experiment": args.experiment}
    if args.experiment == "draw":
        s = sample(spec, args.n)
        if args.out_csv:
            io.write_samples_csv(s, args.out_csv, provenance=spec.to_json())
        payload = {
            "n": s.n,
            "d": s.d,
            "mean": s.samples.mean(axis=0).tolist(),
            "csv": args.out_csv,
        }
    elif args.experiment == "slln":
        grid = _ints(args.n_grid) if args.n_grid else [100, 1000, 10000]
        payload = {
            "table": stats.slln_experiment(spec, grid, args.reps, csv_path=args.out_csv)
        }
    elif args.experiment == "clt":
        payload = stats.clt_experiment(spec, args.n, args.reps, csv_path=args.out_csv)
    else:
        raise ValidationError(f"unknown experiment {args.experiment!r}")
    _emit("simulate", payload, inputs, seed=spec.seed, out=args.out)
    return 0


def _cmd_example_cone(args) -> int:
    spec, report = fr.cone_example(args.alpha)
    payload = {"spec": spec.to_json(), **report}
    print(f"r0 = {report['r0_closed_form']:.6g} (alpha = {args.alpha:g})", file=sys.stderr)
    _emit("example-cone", payload, {"alpha": args.alpha}, out=args.out)
    return 0


def _cmd_example_annulus(args) -> int:
    report = fr.quarter_annulus_mean()
    if args.curve_csv:
        io.write_csv_rows(
            args.curve_csv,
            [{"r": r, "frechet_value": v} for r, v in report["frechet_curve"]],
        )
    _emit("example-annulus", report, {}, out=args.out)
    return 0


def _cmd_compare(args) -> int:
    if args.a and args.b:
        _, wa = io.load_graph(args.a)
        _, wb = io.load_graph(args.b)
        payload = stats.compare_dP_dE(wa, wb)
        inputs = {"a": wa.tolist(), "b": wb.tolist()}
    else:
        payload = stats.boundary_pair_report()
        inputs = {"pair": [list(p) for p in stats.BOUNDARY_PAIR]}
    _emit("compare", payload, inputs, out=args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netmean",
        description="Frechet means and quotient geometry of unlabeled weighted networks",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("dist", help="Procrustean distance between two graph files")
    p.add_argument("--a", required=True, help="first graph (JSON or CSV adjacency)")
    p.add_argument("--b", required=True, help="second graph")
    p.add_argument("--method", default="exact", choices=["exact", "branch_and_bound"])
    p.add_argument("--out")
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("mean", help="Frechet mean of a sample file")
    p.add_argument("--samples", required=True, help="CSV rows or JSON sample set")
    p.add_argument("--d", type=int)
    p.add_argument("--method", default="auto", choices=["auto", "cone", "iterative", "exact"])
    p.add_argument("--axis", help="comma floats; cone axis / iterative init")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--descent-csv", help="write per-iteration Frechet values")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_mean)

    p = sub.add_parser("domain", help="Dirichlet fundamental domain of an axis vector")
    p.add_argument("--w", required=True, help="comma floats")
    p.add_argument("--d", type=int)
    p.add_argument("--reduce", action="store_true", help="prune to the irredundant form")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_domain)

    p = sub.add_parser("rays", help="extreme rays of the reduced fundamental domain")
    p.add_argument("--w", required=True, help="comma floats")
    p.add_argument("--d", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_rays)

    p = sub.add_parser("test", help="k-sample mean equality test")
    p.add_argument("--groups", nargs="+", required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--axis", help="comma floats; common certification axis")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("simulate", help="seeded sampling and asymptotic experiments")
    p.add_argument("--spec", required=True, help="DistributionSpec JSON file")
    p.add_argument("--experiment", default="draw", choices=["draw", "slln", "clt"])
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--n-grid", help="comma ints for the SLLN grid")
    p.add_argument("--seed", type=int, help="override the spec seed")
    p.add_argument("--out-csv", help="CSV artifact (samples or experiment table)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("example-cone", help="radial-Gaussian law on the planar cone")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_example_cone)

    p = sub.add_parser("example-annulus", help="uniform quarter-annulus mean report")
    p.add_argument("--curve-csv", help="write the Frechet value curve")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_example_annulus)

    p = sub.add_parser("compare", help="Euclidean vs Procrustean distance report")
    p.add_argument("--a", help="first graph file (default: built-in boundary pair)")
    p.add_argument("--b", help="second graph file")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ComplexityError, SamplingError) as exc:
        print(f"netmean: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, NetmeanError) as exc:
        print(f"netmean: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"netmean: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
