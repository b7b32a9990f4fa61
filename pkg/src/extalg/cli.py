"""Command line: ``extalg verify``, ``extalg analyze`` and ``extalg poset``."""
from __future__ import annotations

import argparse
import sys

from .errors import ExtAlgError, ParseError
from .formats import dump, load_file
from .harness import SuiteConfig, analyze, analyze_doc, run_suite


def _report_text(report) -> str:
    lines = [report.summary()]
    for entry in report.entries:
        bad = [r for r in entry["laws"] if r["failures"]]
        status = "FAIL" if bad else "ok"
        lines.append(f"{entry['id']:<28} {status:<4} {entry['description']}")
        for r in bad:
            for f in r["failures"]:
                lines.append(f"    {r['law']}: {f['witness']}")
    return "\n".join(lines) + "\n"


def _write(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    config = SuiteConfig(corpus=args.corpus, profile=args.profile, laws=args.laws, seed=args.seed,
                         max_ring_size=args.max_ring_size, oracle_cap=args.oracle_cap)
    report = run_suite(config=config)
    text = dump(report.to_json()) if args.format == "json" else _report_text(report)
    _write(text, args.out)
    if args.out:
        sys.stdout.write(report.summary())
    return report.exit_code


def _verdict_lines(result) -> str:
    lines = []
    for v in result["verdicts"]:
        flag = "true" if v["holds"] else "false"
        extra = f"  witness={v['witness']}" if v.get("witness") is not None else ""
        lines.append(f"{v['name']}: {flag}{extra}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    result = analyze(args.file, args.props)
    _write(dump(result) if args.format == "json" else _verdict_lines(result), None)
    return 0


def cmd_poset(args) -> int:
    doc = load_file(args.file)
    if not isinstance(doc, dict):
        raise ParseError(f"{args.file}: top level: expected an object")
    doc = {**doc, "kind": "poset"}
    result = analyze_doc(doc, ["maximal_elements", "hypotheses", "equivalence"], args.file)
    _write(dump(result) if args.format == "json" else _verdict_lines(result), None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="extalg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the law suite over a corpus")
    v.add_argument("--corpus", default="builtin", help="'builtin' or a corpus JSON file")
    v.add_argument("--laws", default="all", help="'all' or a comma-separated list of law ids")
    v.add_argument("--max-ring-size", type=int, default=64, dest="max_ring_size")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--oracle-cap", type=int, default=36, dest="oracle_cap")
    v.add_argument("--format", choices=("json", "text"), default="text")
    v.add_argument("--out", default=None)
    v.add_argument("--profile", default="small", help="builtin corpus size: tiny, small or medium")
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("analyze", help="evaluate properties on one extension, ideal or poset file")
    a.add_argument("--file", required=True)
    a.add_argument("--props", required=True, help="comma-separated property names")
    a.add_argument("--format", choices=("json", "text"), default="text")
    a.set_defaults(func=cmd_analyze)

    p = sub.add_parser("poset", help="check the order hypotheses and the finiteness equivalence")
    p.add_argument("--file", required=True)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_poset)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args)
    except ExtAlgError as e:
        sys.stderr.write(f"extalg: {type(e).__name__}: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
