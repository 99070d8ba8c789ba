"""Command-line entry point.

Subcommands: ``generate`` (tree stats / debug dump), ``percolate`` (one
replication on a split tree), ``regular`` (one replication on a complete
d-ary tree), ``experiment`` (replicated harness run from a config file),
``oracle`` (exact enumeration on a tiny fixture), ``mu`` (closed-form
constants for a split-vector law).

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 acceptance-gate
failure in ``experiment --gate`` mode.  Usage errors are reported before
any output file is opened.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .gates import default_gates
from .oracle import (FIXTURE_NAMES, dump_mask_table, exact_ranked_law,
                     exact_regular_law, exact_root_cluster_law, fixture_tree)
from .percolation import PercolationParams, clusters, percolate
from .regular_tree import RegularParams, percolate_regular
from .rng import make_generator
from .split_tree import SplitTreeParams, generate
from .split_vector import SplitVectorSpec, entropy_mu, lattice_span
from .limit_laws import exponential_rate

DEFAULT_SEED = 42


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        raise UsageError(message)


def _vector_spec(args) -> SplitVectorSpec:
    kind = args.kind.replace("-", "_")
    multiset = None
    if args.multiset:
        multiset = tuple(float(tok) for tok in args.multiset.replace(",", " ").split())
    b = args.b
    if b is None:
        b = len(multiset) if multiset else 2
    return SplitVectorSpec(kind=kind, b=b, multiset=multiset)


def _tree_params(args, n: int) -> SplitTreeParams:
    spec = _vector_spec(args)
    return SplitTreeParams(spec.b, args.s, args.s0, args.s1, spec, n)


def _add_vector_flags(p):
    p.add_argument("--kind", required=True,
                   help="split-vector law: uniform-binary, deterministic-uniform, fixed-multiset")
    p.add_argument("--b", type=int, default=None, help="branch factor")
    p.add_argument("--multiset", default=None,
                   help="space-separated probabilities for fixed-multiset")


def _add_bucket_flags(p):
    p.add_argument("--s", type=int, default=1, help="vertex capacity")
    p.add_argument("--s0", type=int, default=1, help="balls kept on split")
    p.add_argument("--s1", type=int, default=0, help="balls forced to each child on split")


def build_parser() -> _Parser:
    parser = _Parser(prog="perctree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_mu = sub.add_parser("mu", help="closed-form mu, lattice span, spacing rate")
    _add_vector_flags(p_mu)
    p_mu.add_argument("--c", type=float, default=None, help="supercritical constant")

    p_gen = sub.add_parser("generate", help="generate one split tree")
    _add_vector_flags(p_gen)
    _add_bucket_flags(p_gen)
    p_gen.add_argument("--n", type=int, required=True, help="number of balls")
    p_gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_gen.add_argument("--out", default=None, help="write a per-vertex dump here")

    p_perc = sub.add_parser("percolate", help="one percolation replication on a split tree")
    _add_vector_flags(p_perc)
    _add_bucket_flags(p_perc)
    p_perc.add_argument("--n", type=int, required=True)
    p_perc.add_argument("--c", type=float, default=None,
                        help="keep probability 1 - c/ln n")
    p_perc.add_argument("--p", type=float, default=None, help="explicit keep probability")
    p_perc.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_perc.add_argument("--top-k", type=int, default=10)
    p_perc.add_argument("--out", default=None, help="write the JSON record here")

    p_reg = sub.add_parser("regular", help="one replication on a complete d-ary tree")
    p_reg.add_argument("--d", type=int, required=True)
    p_reg.add_argument("--h", type=int, required=True)
    p_reg.add_argument("--c", type=float, required=True, help="keep probability 1 - c/h")
    p_reg.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_reg.add_argument("--top-k", type=int, default=10)
    p_reg.add_argument("--out", default=None)

    p_exp = sub.add_parser("experiment", help="run a replicated experiment from a config file")
    p_exp.add_argument("--config", required=True)
    p_exp.add_argument("--seed", type=int, default=None, help="override master seed")
    p_exp.add_argument("--c", type=float, default=None)
    p_exp.add_argument("--reps", type=int, default=None)
    p_exp.add_argument("--n-grid", default=None, help="space-separated ball counts")
    p_exp.add_argument("--h-grid", default=None, help="space-separated heights")
    p_exp.add_argument("--t-grid", default=None, help="space-separated thresholds")
    p_exp.add_argument("--top-k", type=int, default=None)
    p_exp.add_argument("--out", default=None, help="output directory")
    p_exp.add_argument("--gate", action="store_true",
                       help="apply the acceptance gates; exit 3 on failure")

    p_oracle = sub.add_parser("oracle", help="exact enumeration on a tiny fixture")
    p_oracle.add_argument("--fixture", choices=FIXTURE_NAMES, default=None)
    p_oracle.add_argument("--p", type=float, default=0.5, help="keep probability")
    p_oracle.add_argument("--by", choices=("balls", "vertices"), default="balls")
    p_oracle.add_argument("--ranked", action="store_true",
                          help="ranked-tuple law instead of the root-cluster law")
    p_oracle.add_argument("--d", type=int, default=None, help="regular-tree exact law")
    p_oracle.add_argument("--h", type=int, default=None)
    p_oracle.add_argument("--out", default=None, help="write the per-mask table here")
    return parser


def _cmd_mu(args) -> int:
    spec = _vector_spec(args)
    mu = entropy_mu(spec)
    span = lattice_span(spec)
    print(f"mu={mu!r}")
    print(f"span={'none' if span is None else repr(span)}")
    if args.c is not None:
        lam = exponential_rate(args.c, mu, 1.0)
        print(f"lambda={lam!r}")
    return 0


def _cmd_generate(args) -> int:
    params = _tree_params(args, args.n)
    tree = generate(params, make_generator(args.seed))
    print(f"seed={args.seed}")
    print(f"n_balls={args.n}")
    print(f"n_vertices={tree.n_vertices}")
    print(f"max_depth={int(tree.depth.max())}")
    print(f"leaves={int((tree.child_lo == tree.child_hi).sum())}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(f"# seed={args.seed}\n")
            tree.dump(fh)
    return 0


def _cmd_percolate(args) -> int:
    if (args.c is None) == (args.p is None):
        raise UsageError("pass exactly one of --c or --p")
    params = _tree_params(args, args.n)
    if args.p is not None:
        perc = PercolationParams.explicit(args.p)
    else:
        perc = PercolationParams.split_regime(args.c, args.n)
    rng = make_generator(args.seed)
    tree = generate(params, rng)
    report = clusters(tree, percolate(tree, perc, rng))
    record = report.to_record(args.seed, args.c, args.top_k)
    payload = json.dumps(record, sort_keys=True)
    print(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    return 0


def _cmd_regular(args) -> int:
    params = RegularParams(args.d, args.h, args.c)
    report = percolate_regular(params, make_generator(args.seed))
    record = report.to_record(args.seed, params, args.top_k)
    payload = json.dumps(record, sort_keys=True)
    print(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    return 0


def _cmd_experiment(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.c is not None:
        overrides["c"] = args.c
    if args.reps is not None:
        overrides["replications"] = args.reps
    if args.n_grid is not None:
        overrides["n_grid"] = tuple(int(x) for x in args.n_grid.split())
    if args.h_grid is not None:
        overrides["h_grid"] = tuple(int(x) for x in args.h_grid.split())
    if args.t_grid is not None:
        overrides["t_grid"] = tuple(float(x) for x in args.t_grid.split())
    if args.top_k is not None:
        overrides["top_k"] = args.top_k
    if args.out is not None:
        overrides["out"] = args.out
    try:
        config = harness.ExperimentConfig.from_file(args.config, **overrides)
    except harness.ConfigError as exc:
        raise UsageError(str(exc)) from exc
    report = harness.run_experiment(config)
    print(f"experiment={report.experiment} master_seed={report.master_seed}")
    for key in sorted(report.constants):
        print(f"{key}={report.constants[key]!r}")
    for entry in report.grid:
        point = entry.get("n", entry.get("h"))
        bits = " ".join(f"{k}={entry[k]!r}" for k in sorted(entry) if k not in ("n", "h"))
        print(f"grid {point}: {bits}")
    if config.out:
        print(f"wrote {config.out}/report.json, report.csv, records.jsonl")
    if args.gate:
        results = default_gates(report)
        for res in results:
            print(res.line())
        if not all(res.passed for res in results):
            return 3
    return 0


def _cmd_oracle(args) -> int:
    if (args.d is None) != (args.h is None):
        raise UsageError("pass both --d and --h for the regular exact law")
    if args.d is not None:
        law = exact_regular_law(args.d, args.h, args.p)
        print("# joint law of (G0, G1)")
        for key in law.joint.support():
            print(f"{key}\t{law.joint.prob(key)!r}")
        print("# tau1 law (0 = no removed edge)")
        for key in law.tau1.support():
            print(f"{key}\t{law.tau1.prob(key)!r}")
        return 0
    if args.fixture is None:
        raise UsageError("pass --fixture or --d/--h")
    tree = fixture_tree(args.fixture)
    if args.ranked:
        dist = exact_ranked_law(tree, args.p, by=args.by)
    else:
        dist = exact_root_cluster_law(tree, args.p, by=args.by)
    for key in dist.support():
        print(f"{key}\t{dist.prob(key)!r}")
    if args.out:
        with open(args.out, "w") as fh:
            dump_mask_table(tree, args.p, fh, by=args.by)
    return 0


_COMMANDS = {
    "mu": _cmd_mu,
    "generate": _cmd_generate,
    "percolate": _cmd_percolate,
    "regular": _cmd_regular,
    "experiment": _cmd_experiment,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # parameter validation failures are usage errors
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
