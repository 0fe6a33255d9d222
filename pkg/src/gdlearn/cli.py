"""Command-line interface: ``gdlearn {sample,run,oracle,eval,retrieval-bench}``."""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (load_labels, load_points, load_scalar_field, sample_plane_grid,
                      sample_sphere, sample_swiss_roll_clusters, sample_torus,
                      save_distance_matrix, save_frames, save_labels, save_points,
                      save_scalar_field, save_vector_stage)
from .errors import GdlError, StructuralError
from .fields import DistanceField
from .gdl import GdlParams, GeodesicDistanceLearner
from .graph import assign_weights, build_knn_graph
from .metrics import (mean_abs_error, mean_average_precision, precision_at, precision_curve,
                      rank_relevance, recall_at)
from .oracle import shortest_path_distances

SCOPES = (10, 20, 50)


def _sibling(path, suffix):
    path = Path(path)
    return path.with_name(f"{path.stem}.{suffix}")


def _write_manifest(args, outputs):
    config = {k: (str(v) if isinstance(v, Path) else v)
              for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {"version": __version__, "command": args.command, "config": config,
                "argv": sys.argv[1:] if args.argv is None else args.argv,
                "outputs": [str(p) for p in outputs]}
    path = _sibling(outputs[0], "manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _params(args):
    return GdlParams(k=args.k, d=args.dim, t=args.t, weights=args.weights, sigma=args.sigma,
                     tol=args.tol, max_iter=args.max_iter)


def _pick_queries(n, count, seed):
    if not 1 <= count <= n:
        raise StructuralError(f"cannot pick {count} queries from {n} points")
    return sorted(np.random.default_rng(seed).choice(n, size=count, replace=False).tolist())


def cmd_sample(args):
    outputs = [args.out]
    if args.kind == "torus":
        save_points(sample_torus(args.n, args.R, args.r, args.seed), args.out)
    elif args.kind == "sphere":
        save_points(sample_sphere(args.n, args.radius, args.seed), args.out)
    elif args.kind == "plane":
        save_points(sample_plane_grid(args.side, args.seed), args.out)
    else:
        labeled = sample_swiss_roll_clusters(args.n, args.clusters, args.seed)
        save_points(labeled.cloud, args.out)
        labels_path = _sibling(args.out, "labels.csv")
        save_labels(labeled.labels, labels_path)
        outputs.append(labels_path)
    _write_manifest(args, outputs)
    print(f"wrote {', '.join(map(str, outputs))}")


def cmd_run(args):
    cloud = load_points(args.inp)
    learner = GeodesicDistanceLearner(cloud, _params(args))
    outputs = [args.out]
    if args.queries is not None:
        queries = _pick_queries(cloud.n, args.queries, args.seed)
        save_distance_matrix(learner.distances(queries), queries, args.out)
    elif args.dump_stages:
        stages = learner.stages(args.query)
        save_scalar_field(stages.distance, args.out)
        for name, field in (("v0", stages.initial), ("v", stages.diffused),
                            ("vhat", stages.normalized)):
            path = _sibling(args.out, f"{name}.csv")
            save_vector_stage(field, learner.frames, path)
            outputs.append(path)
        path = _sibling(args.out, "frames.csv")
        save_frames(learner.frames, path)
        outputs.append(path)
    else:
        save_scalar_field(learner.distance(args.query), args.out)
    _write_manifest(args, outputs)
    print(f"wrote {', '.join(map(str, outputs))}")


def cmd_oracle(args):
    cloud = load_points(args.inp)
    graph = assign_weights(build_knn_graph(cloud, args.k))
    field = shortest_path_distances(graph, args.query)
    save_scalar_field(DistanceField(field.values, field.query), args.out)
    _write_manifest(args, [args.out])
    print(f"wrote {args.out}")


def cmd_eval(args, parser):
    f = load_scalar_field(args.learned)
    d = load_scalar_field(args.truth)
    if f.n != d.n:
        parser.error(f"fields differ in length: {f.n} vs {d.n}")
    print(f"mean_abs_error {mean_abs_error(f, d).mean_abs_error:.6f}")


def cmd_retrieval_bench(args):
    cloud = load_points(args.inp)
    labels = load_labels(args.labels or _sibling(args.inp, "labels.csv"))
    if labels.size != cloud.n:
        raise StructuralError(f"{labels.size} labels for {cloud.n} points")
    rng = np.random.default_rng(args.seed)
    queries = []
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        take = min(args.queries_per_class, members.size)
        queries.extend(rng.choice(members, size=take, replace=False).tolist())
    learned = GeodesicDistanceLearner(cloud, _params(args)).distances(queries)
    X = cloud.points
    ambient = np.linalg.norm(X[:, None, :] - X[queries][None, :, :], axis=2)

    rows = {}
    for name, D in (("gdl", learned), ("euclidean", ambient)):
        rels = [rank_relevance(D[:, c], labels, q) for c, q in enumerate(queries)]
        scopes = [s for s in SCOPES if s <= rels[0].relevance.size]
        rows[name] = {
            **{f"P@{s}": float(np.mean([precision_at(r, s) for r in rels])) for s in scopes},
            **{f"R@{s}": float(np.mean([recall_at(r, s) for r in rels])) for s in scopes},
            "MAP": mean_average_precision(rels),
            "curve": np.mean([precision_curve(r) for r in rels], axis=0),
        }
    keys = [k for k in rows["gdl"] if k != "curve"]
    print("method     " + " ".join(f"{k:>7}" for k in keys))
    for name, row in rows.items():
        print(f"{name:<10} " + " ".join(f"{row[k]:7.4f}" for k in keys))
    if args.out:
        scope = np.arange(1, rows["gdl"]["curve"].size + 1)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("scope,gdl,euclidean\n")
            for s, a, b in zip(scope, rows["gdl"]["curve"], rows["euclidean"]["curve"]):
                fh.write(f"{s},{a:.17g},{b:.17g}\n")
        _write_manifest(args, [args.out])


def _add_gdl_flags(p):
    p.add_argument("--k", type=int, default=16, help="neighbors per point (default 16)")
    p.add_argument("--t", type=float, default=1.0, help="diffusion time (default 1.0)")
    p.add_argument("--dim", type=int, default=2, help="intrinsic dimension (default 2)")
    p.add_argument("--weights", choices=("binary", "heat"), default="binary")
    p.add_argument("--sigma", type=float, default=None, help="heat-kernel bandwidth")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="gdlearn", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="write a synthetic point cloud")
    p.add_argument("kind", choices=("torus", "sphere", "plane", "swissroll-clusters"))
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--R", type=float, default=2.0, help="torus major radius")
    p.add_argument("--r", type=float, default=0.8, help="torus minor radius")
    p.add_argument("--radius", type=float, default=1.0, help="sphere radius")
    p.add_argument("--side", type=int, default=40, help="plane grid side length")
    p.add_argument("--clusters", type=int, default=3)
    p.add_argument("-o", "--out", type=Path, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("run", help="learn distances from one or more base points")
    p.add_argument("--in", dest="inp", type=Path, required=True)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--query", type=int)
    which.add_argument("--queries", type=int, help="number of random base points")
    p.add_argument("--seed", type=int, default=0, help="seed for --queries")
    p.add_argument("--dump-stages", action="store_true",
                   help="also write V0, V, Vhat and the tangent frames")
    _add_gdl_flags(p)
    p.add_argument("-o", "--out", type=Path, required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("oracle", help="graph shortest-path distances")
    p.add_argument("--in", dest="inp", type=Path, required=True)
    p.add_argument("--query", type=int, required=True)
    p.add_argument("--k", type=int, default=16)
    p.add_argument("-o", "--out", type=Path, required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("eval", help="rescaled mean absolute error between two fields")
    p.add_argument("learned", type=Path)
    p.add_argument("truth", type=Path)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("retrieval-bench", help="precision/recall/MAP, GDL vs Euclidean")
    p.add_argument("--in", dest="inp", type=Path, required=True)
    p.add_argument("--labels", type=Path, default=None,
                   help="labels CSV (default: <in>.labels.csv)")
    p.add_argument("--queries-per-class", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    _add_gdl_flags(p)
    p.add_argument("-o", "--out", type=Path, default=None, help="precision-scope curve CSV")
    p.set_defaults(func=cmd_retrieval_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = None if argv is None else list(argv)
    try:
        if args.func is cmd_eval:
            cmd_eval(args, parser)
        else:
            args.func(args)
    except (GdlError, OSError) as exc:
        print(f"gdlearn {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
