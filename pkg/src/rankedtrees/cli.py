"""Command line interface: ``rankedtrees <subcommand> ...``.

Exit codes
----------
0 success; 2 usage error or malformed input; 3 rank out of range;
4 input outside the domain of a bijection; 5 invalid tree (validate);
6 exhaustive enumeration above the oracle bound.

Payload goes to stdout (or ``--output``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Iterable

from . import bijections, exact, formats, oracle, samplers, stats
from .rng import RngHandle
from .tree import LabeledTree, ModelKind, validate

EXIT_USAGE = 2
EXIT_RANGE = 3
EXIT_CLASS = 4
EXIT_INVALID = 5
EXIT_BOUND = 6


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a decimal integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _rank(text: str) -> int:
    text = text.strip()
    if not text.lstrip("-").isdigit():
        raise argparse.ArgumentTypeError(f"rank must be a decimal integer, got {text!r}")
    return int(text)


# tree io -----------------------------------------------------------------------

def _render(tree: LabeledTree, fmt: str) -> str:
    return formats.to_json(tree) if fmt == "json" else formats.to_newick(tree)


def _emit_trees(trees: Iterable[LabeledTree], fmt: str, out) -> None:
    if fmt == "json":
        out.write("[" + ",".join(formats.to_json(t) for t in trees) + "]\n")
    else:
        for t in trees:
            out.write(formats.to_newick(t) + "\n")


def _read_text(args) -> str:
    if getattr(args, "tree", None) is not None:
        return args.tree
    path = getattr(args, "input", None)
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_USAGE) from None


def _parse_trees(text: str) -> list[LabeledTree]:
    body = text.strip()
    if not body:
        raise CliError("no tree given on input", EXIT_USAGE)
    try:
        if body[0] in "{[":
            doc = formats.load_json(body)
            docs = doc if isinstance(doc, list) else [doc]
            return [formats.tree_from_obj(d) for d in docs]
        return [formats.parse_newick(line) for line in body.splitlines() if line.strip()]
    except (formats.NewickError, formats.SchemaError, ValueError) as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def _single_tree(args) -> LabeledTree:
    trees = _parse_trees(_read_text(args))
    if len(trees) != 1:
        raise CliError(f"expected exactly one tree, got {len(trees)}", EXIT_USAGE)
    return trees[0]


# subcommands -------------------------------------------------------------------

def cmd_count(args, out) -> int:
    model = ModelKind.parse(args.model)
    if args.param is None:
        total = exact.strong_count(args.n) if model is ModelKind.STRONG else exact.weak_count(args.n)
        out.write(f"{total}\n")
        return 0
    try:
        row = exact.dist_row(model.value, args.param, args.n)
    except KeyError as exc:
        raise CliError(exc.args[0], EXIT_USAGE) from None
    out.write(row.to_json() + "\n" if args.format == "json" else row.to_csv())
    return 0


def cmd_sample(args, out) -> int:
    rng = RngHandle(args.seed)
    trees = (samplers.sample(args.model, args.n, rng) for _ in range(args.count))
    _emit_trees(trees, args.format, out)
    if args.verbose:
        print(f"random bits used: {rng.bits}", file=sys.stderr)
    return 0


def cmd_unrank(args, out) -> int:
    try:
        tree = samplers.unrank_weak(args.n, args.rank)
    except samplers.RankError as exc:
        raise CliError(str(exc), EXIT_RANGE) from None
    out.write(_render(tree, args.format) + "\n")
    return 0


def cmd_rank(args, out) -> int:
    for tree in _parse_trees(_read_text(args)):
        report = validate(tree, ModelKind.WEAK)
        if not report.valid:
            _print_report(report)
            raise CliError("input is not a valid weak tree", EXIT_INVALID)
        out.write(f"{samplers.rank_weak(tree)}\n")
    return 0


def cmd_bij(args, out) -> int:
    try:
        if args.direction == "perm-to-tree":
            sigma = bijections.parse_permutation(args.perm)
            out.write(_render(bijections.perm_to_tree(sigma), args.format) + "\n")
        elif args.direction == "partition-to-tree":
            p = bijections.parse_partition(args.partition)
            out.write(_render(bijections.partition_to_tree(p), args.format) + "\n")
        else:
            tree = _single_tree(args)
            model = ModelKind.STRONG if args.direction == "tree-to-perm" else ModelKind.WEAK
            report = validate(tree, model)
            if not report.valid:
                _print_report(report)
                raise CliError(f"input is not a valid {model.value} tree", EXIT_CLASS)
            if model is ModelKind.STRONG:
                out.write(bijections.format_permutation(bijections.tree_to_perm(tree)) + "\n")
            else:
                out.write(bijections.format_partition(bijections.tree_to_partition(tree)) + "\n")
    except bijections.ClassMembershipError as exc:
        raise CliError(str(exc), EXIT_CLASS) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    return 0


def cmd_enumerate(args, out) -> int:
    try:
        trees = list(oracle.exhaustive(args.model, args.n))
    except oracle.OracleBoundError as exc:
        raise CliError(str(exc), EXIT_BOUND) from None
    _emit_trees(trees, args.format, out)
    return 0


def _print_report(report) -> None:
    for v in report.violations:
        where = "tree" if v.node < 0 else f"node {v.node}"
        print(f"{where}: [{v.rule}] {v.message}", file=sys.stderr)


def cmd_validate(args, out) -> int:
    bad = 0
    for i, tree in enumerate(_parse_trees(_read_text(args))):
        report = validate(tree, args.model)
        if report.valid:
            out.write("valid\n")
        else:
            bad += 1
            k = len(report.violations)
            out.write(f"invalid ({k} violation{'' if k == 1 else 's'})\n")
            print(f"tree {i}:", file=sys.stderr)
            _print_report(report)
    return EXIT_INVALID if bad else 0


def cmd_stats(args, out) -> int:
    try:
        report = stats.run_cohort(args.model, args.n, args.param, args.samples, args.seed,
                                  workers=args.workers)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    if args.format == "csv":
        out.write(report.histogram_csv())
        return 0
    doc = report.to_dict()
    if args.normality:
        try:
            g = stats.normality_check(report)
            doc["normality"] = {"test": g.test, "statistic": g.statistic, "n": g.dof,
                                "threshold": g.threshold, "pass": g.passed}
        except ValueError as exc:
            print(f"normality check skipped: {exc}", file=sys.stderr)
    out.write(json.dumps(doc, indent=2) + "\n")
    return 0


# parser ------------------------------------------------------------------------

def _add_tree_input(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--tree", help="inline tree (Newick or JSON)")
    src.add_argument("--input", help="file with trees, one Newick per line or JSON ('-' = stdin)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rankedtrees",
                                     description="Strongly and weakly increasing Schröder trees.")
    parser.add_argument("--output", "-o", help="write payload to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)
    models = ("strong", "weak")

    p = sub.add_parser("count", help="total count or exact distribution row")
    p.add_argument("--model", choices=models, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--param", help="internal-nodes, root-arity, root-leaves, binary-nodes, steps, "
                                   "weak-internal-nodes")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sample", help="uniform random trees")
    p.add_argument("--model", choices=models, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--seed", type=_natural, default=0)
    p.add_argument("--format", choices=("newick", "json"), default="newick")
    p.add_argument("--verbose", action="store_true", help="report random bits on stderr")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("unrank", help="weak tree of a given rank")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--rank", type=_rank, required=True)
    p.add_argument("--format", choices=("newick", "json"), default="newick")
    p.set_defaults(func=cmd_unrank)

    p = sub.add_parser("rank", help="rank of weak trees")
    _add_tree_input(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("bij", help="bijections with permutations and ordered partitions")
    p.add_argument("direction", choices=("perm-to-tree", "tree-to-perm",
                                         "partition-to-tree", "tree-to-partition"))
    p.add_argument("--perm", help="permutation, e.g. 4,1,2,5,3")
    p.add_argument("--partition", help="ordered partition, e.g. 3,4|1,5,7|2,6")
    p.add_argument("--format", choices=("newick", "json"), default="newick")
    _add_tree_input(p)
    p.set_defaults(func=cmd_bij)

    p = sub.add_parser("enumerate", help="every tree of size n (small n only)")
    p.add_argument("--model", choices=models, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--format", choices=("newick", "json"), default="newick")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("validate", help="check trees against a model")
    p.add_argument("--model", choices=models, required=True)
    _add_tree_input(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="sample a cohort and compare with theory")
    p.add_argument("--model", choices=models, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--samples", type=_positive, default=10_000)
    p.add_argument("--seed", type=_natural, default=0)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--normality", action="store_true", help="add a KS normality check")
    p.set_defaults(func=cmd_stats)
    return parser


def _check_combination(parser, args) -> None:
    if args.command == "bij":
        need = {"perm-to-tree": "perm", "partition-to-tree": "partition"}.get(args.direction)
        if need and getattr(args, need) is None:
            parser.error(f"bij {args.direction} requires --{need}")
    if args.command == "count" and args.param is not None:
        known = {p.value for p in stats.ParamKind}
        if args.param not in known:
            parser.error(f"unknown --param {args.param!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_combination(parser, args)
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
