"""Command line entry point: ``afronet plan|cluster|route|configs``.

Exit codes: 0 success, 1 invalid input, 2 routing failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .clustering import elbow_calinski, elbow_distortion, geo_features, multi_features
from .errors import PlanIOError, RoutingError, ValidationError
from .pipeline import (
    RunConfig,
    assignments_csv_text,
    bundled_config,
    bundled_config_names,
    cluster_dataset,
    elbow_csv_text,
    format_costs,
    load_inputs,
    report_costs,
    routes_csv_text,
    run_plan,
    write_outputs,
)

EXIT_OK, EXIT_VALIDATION, EXIT_ROUTING, EXIT_IO = 0, 1, 2, 3


def _load_config(ref: str | None) -> RunConfig:
    if ref is None:
        return RunConfig()
    p = Path(ref)
    if p.exists():
        return RunConfig.load(p)
    if ref in bundled_config_names():
        return bundled_config(ref)
    raise PlanIOError(f"{ref}: no such config file or bundled config")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    kw = {}
    for attr, key in (
        ("seed", "seed"), ("norm_scope", "norm_scope"), ("adjacency", "adjacency"),
        ("dc_sign", "dc_sign"), ("out", "output_dir"), ("ants", "ants"), ("iterations", "iterations"),
        ("deposit", "deposit"),
    ):
        v = getattr(args, attr, None)
        if v is not None:
            kw[key] = str(v) if key == "output_dir" else v
    return cfg.replace(**kw) if kw else cfg


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="config file, or the name of a bundled config")
    p.add_argument("--seed", type=int)
    p.add_argument("--norm-scope", dest="norm_scope", choices=["cluster", "global"])
    p.add_argument("--adjacency", choices=["borders", "complete"])
    p.add_argument("--dc-sign", dest="dc_sign", type=int, choices=[1, -1])
    p.add_argument("--ants", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--deposit", choices=["online", "batch"])
    p.add_argument("--out", help="output directory for exports and the manifest")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="afronet", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="run the full cluster-and-route pipeline")
    _common(p)

    p = sub.add_parser("cluster", help="cluster the countries and print cluster sizes")
    _common(p)
    p.add_argument("--method", choices=["au", "kmeans", "kmedoids", "hac", "optics"])
    p.add_argument("--k", type=int)
    p.add_argument("--features", choices=["geo", "multi"])
    p.add_argument("--metric", choices=["euclidean", "haversine", "weighted"])
    p.add_argument("--cut", type=float, help="HAC cut distance")
    p.add_argument("--min-pts", dest="min_pts", type=int)
    p.add_argument("--xi", type=float)
    p.add_argument("--elbow", metavar="KMIN:KMAX", help="also scan k with both elbow criteria, e.g. 2:10")

    p = sub.add_parser("route", help="run one routing stage and print the route CSV")
    _common(p)
    p.add_argument("--mode", required=True, choices=["intra", "inter", "unclustered"])
    p.add_argument("--source", action="append", help="limit intra output to these source countries")

    sub.add_parser("configs", help="list bundled configs")
    return ap


def _cmd_plan(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    plan = run_plan(cfg)
    print(format_costs(report_costs(plan)))
    if cfg.output_dir:
        print(f"wrote {cfg.output_dir}")
    return EXIT_OK


def _cmd_cluster(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    kw = {}
    for attr, key in (("method", "method"), ("k", "k"), ("features", "features"), ("metric", "metric"),
                      ("cut", "cut_distance"), ("min_pts", "min_pts"), ("xi", "xi")):
        v = getattr(args, attr)
        if v is not None:
            kw[key] = v
    cfg = cfg.replace(**kw)
    ds, _, _ = load_inputs(cfg)
    a = cluster_dataset(cfg, ds)
    for lab in a.cluster_labels:
        print(f"{a.name(lab)}\t{len(a.members(lab))}\t{', '.join(a.members(lab))}")
    if a.noise:
        print(f"noise\t{len(a.noise)}\t{', '.join(a.noise)}")
    if args.elbow:
        try:
            lo, hi = (int(x) for x in args.elbow.split(":"))
        except ValueError:
            raise ValidationError("--elbow expects KMIN:KMAX") from None
        feats = multi_features(ds) if cfg.features == "multi" else geo_features(ds)
        reports = [elbow_distortion(feats, range(lo, hi + 1), cfg.seed), elbow_calinski(feats, range(lo, hi + 1), cfg.seed)]
        for r in reports:
            print(f"elbow {r.criterion}: k = {r.chosen_k}")
    if cfg.output_dir:
        out = Path(cfg.output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "assignments.csv").write_text(assignments_csv_text(a), encoding="utf-8")
            if args.elbow:
                for r in reports:
                    (out / f"elbow_{r.criterion}.csv").write_text(elbow_csv_text(r), encoding="utf-8")
        except OSError as exc:
            raise PlanIOError(f"{out}: {exc.strerror or exc}") from exc
    return EXIT_OK


def _cmd_route(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    if args.mode == "unclustered":
        cfg = cfg.replace(mode="unclustered")
    elif args.mode == "intra":
        cfg = cfg.replace(mode="clustered", routes=True, traversals=True, inter=False, unclustered=False)
    else:
        cfg = cfg.replace(mode="clustered", routes=False, traversals=False, inter=True, unclustered=False)
    if args.source and args.mode == "intra":
        ds, _, _ = load_inputs(cfg)
        unknown = set(args.source) - set(ds.ids)
        if unknown:
            raise ValidationError(f"unknown source countries {sorted(unknown)}")
    plan = run_plan(cfg, write=False)
    if args.source and args.mode == "intra":
        plan.routes = {s: plan.routes[s] for s in args.source}
        plan.traversals = {}
    sys.stdout.write(routes_csv_text(plan))
    if cfg.output_dir:
        write_outputs(plan, cfg.output_dir)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; 2 is reserved for routing failures here
        return EXIT_VALIDATION if exc.code == 2 else exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "configs":
            print("\n".join(bundled_config_names()))
            return EXIT_OK
        return {"plan": _cmd_plan, "cluster": _cmd_cluster, "route": _cmd_route}[args.command](args)
    except PlanIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RoutingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ROUTING


if __name__ == "__main__":
    sys.exit(main())
