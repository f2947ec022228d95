"""Command-line entry point.

Usage examples::

    pinet cluster -c config.toml --k 4 --alpha 0.5
    pinet sweep -c config.toml --k 2..10 --alpha 0,0.5,1
    pinet coverage -c enron.toml --hosts beck-s,kitchen-l --universe-size 161

Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import pipeline
from .config import load_config, make_config, parse_floats, parse_k_range
from .errors import InvariantViolation, PinetError

COMMANDS = (
    "ingest", "build", "annotate", "distances", "cluster",
    "evaluate", "coverage", "compare", "export", "sweep",
)


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", help="TOML config file")
    p.add_argument("-i", "--input", dest="inputs", action="append", help="metadata CSV (repeatable)")
    p.add_argument("-o", "--output-dir", help="directory for artifacts")
    p.add_argument("--hosts", type=_csv_list, help="comma-separated host addresses or alias labels")
    p.add_argument("--aliases", help="alias file: label = addr1;addr2")
    p.add_argument("--designations", help="CSV address,designation")
    p.add_argument("--fuse-aliases", action="store_true", default=None,
                   help="collapse alias groups into single vertices")
    p.add_argument("--allow-domain", dest="allow_domains", action="append",
                   help="keep only non-host participants in this domain (repeatable)")
    p.add_argument("--exclude-bcc", dest="include_bcc", action="store_false", default=None)
    p.add_argument("--edge-policy", choices=["sender-to-each-recipient", "outgoing-only"])
    p.add_argument("--strict-edges", action="store_true", default=None,
                   help="only create edges that touch a host")
    p.add_argument("--bins", type=int)
    p.add_argument("--timezone")
    p.add_argument("--alpha", help="alpha, or a comma list for sweep")
    p.add_argument("--attribute-weights", type=parse_floats)
    p.add_argument("--k", help="cluster count, or a range like 2..10 for sweep")
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--format", dest="formats", type=_csv_list, help="dot,graphml,csv")
    p.add_argument("--eq8-literal", action="store_true", default=None)
    p.add_argument("--direct-branch", action="store_true", default=None)
    p.add_argument("--path-cost", choices=["neg-log", "reciprocal-sum"])
    p.add_argument("--cpi-outgoing-only", action="store_true", default=None)
    p.add_argument("--trace-quality", action="store_true", default=None)
    p.add_argument("--universe-size", type=int)
    p.add_argument("--top-members", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pinet", description="Multi-user personalized email communities")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
        if name == "evaluate":
            p.add_argument("--clustering", help="existing clustering CSV to score")
        if name == "compare":
            p.add_argument("--old-hosts", type=_csv_list)
            p.add_argument("--new-hosts", type=_csv_list)
    return parser


def config_from_args(args: argparse.Namespace):
    file_values = load_config(args.config) if args.config else {}
    overrides = {
        key: getattr(args, key)
        for key in (
            "inputs", "output_dir", "hosts", "aliases", "designations", "fuse_aliases",
            "allow_domains", "include_bcc", "edge_policy", "strict_edges", "bins",
            "timezone", "attribute_weights", "max_iterations", "formats", "eq8_literal",
            "direct_branch", "path_cost", "cpi_outgoing_only", "trace_quality",
            "universe_size", "top_members", "threads",
        )
    }
    if args.alpha is not None:
        alphas = parse_floats(args.alpha)
        overrides["alpha"] = alphas[0] if alphas else None
        overrides["alphas"] = alphas if len(alphas) > 1 else None
    if args.k is not None:
        ks = parse_k_range(args.k)
        overrides["k"] = ks[0] if ks else None
        overrides["k_range"] = ks if len(ks) > 1 else None
    return make_config(file_values, **overrides)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = config_from_args(args)
        cmd = args.command
        if cmd == "evaluate":
            result = pipeline.cmd_evaluate(cfg, args.clustering)
        elif cmd == "compare":
            result = pipeline.cmd_compare(cfg, args.old_hosts, args.new_hosts)
        else:
            result = getattr(pipeline, f"cmd_{cmd}")(cfg)
    except InvariantViolation as exc:
        print(f"pinet: internal invariant violated: {exc}", file=sys.stderr)
        return 2
    except PinetError as exc:
        print(f"pinet: error: {exc}", file=sys.stderr)
        return 1

    if isinstance(result, str):
        sys.stdout.write(result)
    elif cmd == "sweep":
        print(f"{len(result)} quality rows written to {cfg.output_dir}/sweep.csv")
    else:
        print(json.dumps(result, sort_keys=True))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
