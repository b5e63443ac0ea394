"""Command-line front end.

Exit codes: 0 ok, 1 analysis error, 2 usage error, 3 input schema error.
Errors go to stderr as one JSON object per failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import reports
from .analysis import (COVERAGE_VIEW_ID, AnalysisOptions, analyze_corpus,
                       lint_corpus)
from .certmodel import MalformedInput
from .corpus import ScenarioSpec, UnknownScenario, generate
from .pathengine import DEFAULT_MAX_DEPTH, select_stores
from .revocation import RevocationView
from .truststore import UnknownStore
from .workspace import SchemaError, Workspace
from .xsdetect import DEFAULT_OVERLAP_MIN_DAYS
from .xsext import DEFAULT_MAX_VALIDITY_DAYS

EXIT_OK = 0
EXIT_ANALYSIS = 1
EXIT_USAGE = 2
EXIT_SCHEMA = 3

REPORT_FILES = ("groups.jsonl", "reissuance.jsonl", "assessments.jsonl",
                "findings.jsonl")


def _err(payload: dict):
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _parse_views(spec: str, source_names: set[str]) -> list[RevocationView]:
    views = []
    for entry in spec.split(","):
        entry = entry.strip()
        if not entry:
            continue
        if "=" in entry:
            name, _, srcs = entry.partition("=")
            accepted = frozenset(s for s in srcs.split("+") if s)
        elif entry == "all":
            name, accepted = "all", frozenset(source_names)
        elif entry == "none":
            name, accepted = "none", frozenset()
        else:
            name, accepted = entry, frozenset([entry])
        views.append(RevocationView(name, accepted))
    return views


def _analysis_options(args) -> AnalysisOptions:
    return AnalysisOptions(
        max_depth=args.max_depth,
        overlap_min=args.overlap_min,
        mode=args.mode,
    )


def _options_dict(args, views) -> dict:
    return {
        "max_depth": args.max_depth,
        "overlap_min": args.overlap_min,
        "mode": args.mode,
        "stores": args.stores,
        "views": sorted((v.consumer_id, sorted(v.accepted_sources))
                        for v in views),
    }


def _resolve_views(args, ws: Workspace) -> list[RevocationView]:
    revocations = ws.load_revocations()
    source_names = {r.source.name for r in revocations}
    if getattr(args, "views", None):
        return _parse_views(args.views, source_names)
    configured = ws.load_views()
    if configured:
        return configured
    return [RevocationView("all", frozenset(source_names))]


def _run_analysis(args, ws: Workspace):
    views = _resolve_views(args, ws)
    options = _options_dict(args, views)
    store_ids = args.stores.split(",") if args.stores else None
    stores = select_stores(ws.load_stores(), store_ids)
    if ws.reports_current(options, REPORT_FILES):
        return options, None
    records = ws.load_records()
    result = analyze_corpus(
        records,
        stores=stores,
        revocations=ws.load_revocations(),
        views=views,
        operator_map=ws.load_operator_map(),
        options=_analysis_options(args),
    )
    ws.write_report("groups.jsonl", reports.groups_jsonl(result.xs_groups))
    ws.write_report("reissuance.jsonl",
                    reports.groups_jsonl(result.reissuance_groups))
    visible = [a for a in result.assessments.all()
               if a.view_id != COVERAGE_VIEW_ID]
    ws.write_report("assessments.jsonl", reports.assessments_jsonl(visible))
    ws.write_report("findings.jsonl", reports.findings_jsonl(result.findings))
    ws.write_stamp(options)
    return options, result


def cmd_scenario(args) -> int:
    params = {}
    for item in args.param or ():
        key, _, value = item.partition("=")
        params[key] = int(value) if value.isdigit() else value
    try:
        bundle = generate(ScenarioSpec(args.scenario_id, seed=args.seed,
                                       mode=args.mode, params=params))
    except UnknownScenario as exc:
        _err({"error": "unknown_scenario", "detail": str(exc)})
        return EXIT_ANALYSIS
    bundle.write(Path(args.out))
    print(json.dumps({"scenario": args.scenario_id, "seed": args.seed,
                      "mode": args.mode, "certs": len(bundle.records),
                      "out": str(args.out)}, sort_keys=True))
    return EXIT_OK


def cmd_ingest(args) -> int:
    ws = Workspace(Path(args.workspace))
    try:
        summary = ws.ingest_paths([Path(p) for p in args.paths], args.format)
    except SchemaError as exc:
        _err(exc.to_json())
        return EXIT_SCHEMA
    except MalformedInput as exc:
        _err({"error": "malformed", "detail": str(exc)})
        return EXIT_SCHEMA
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_analyze(args) -> int:
    ws = Workspace(Path(args.workspace))
    try:
        options, result = _run_analysis(args, ws)
    except (SchemaError,) as exc:
        _err(exc.to_json())
        return EXIT_SCHEMA
    except (UnknownStore, MalformedInput, ValueError) as exc:
        _err({"error": "analysis", "detail": str(exc)})
        return EXIT_ANALYSIS
    cached = result is None
    summary = {
        "workspace": str(ws.root),
        "cached": cached,
        "reports": sorted(REPORT_FILES),
    }
    if not cached:
        summary["findings"] = len(result.findings)
        summary["xs_groups"] = len(result.xs_groups)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_lint(args) -> int:
    ws = Workspace(Path(args.workspace))
    try:
        views = _resolve_views(args, ws)
        records = ws.load_records()
        result = analyze_corpus(
            records, stores=ws.load_stores(),
            revocations=ws.load_revocations(), views=views,
            operator_map=ws.load_operator_map(),
            options=_analysis_options(args))
        verdicts = lint_corpus(
            result, ws.load_stores(), ws.load_extensions(),
            ws.load_revocations(), max_validity_days=args.max_validity,
            explanations=ws.load_explanations(),
            operator_map=ws.load_operator_map())
    except SchemaError as exc:
        _err(exc.to_json())
        return EXIT_SCHEMA
    except (UnknownStore, MalformedInput, ValueError) as exc:
        _err({"error": "analysis", "detail": str(exc)})
        return EXIT_ANALYSIS
    lines = reports.lint_jsonl(verdicts)
    ws.write_report("lint.jsonl", lines)
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_report(args) -> int:
    ws = Workspace(Path(args.workspace))
    try:
        _run_analysis(args, ws)
    except SchemaError as exc:
        _err(exc.to_json())
        return EXIT_SCHEMA
    except (UnknownStore, MalformedInput, ValueError) as exc:
        _err({"error": "analysis", "detail": str(exc)})
        return EXIT_ANALYSIS
    name = {"findings": "findings.jsonl", "groups": "groups.jsonl",
            "assessments": "assessments.jsonl", "lint": "lint.jsonl"}[args.kind]
    text = ws.read_report(name)
    if text is None:
        _err({"error": "analysis",
              "detail": f"report {name} not materialized; run lint first"
              if args.kind == "lint" else f"report {name} missing"})
        return EXIT_ANALYSIS
    objs = [json.loads(line) for line in text.splitlines() if line.strip()]
    if args.format == "json":
        out = "\n".join(json.dumps(o, sort_keys=True) for o in objs)
        out = out + "\n" if out else ""
    elif args.format == "md":
        if args.kind != "findings":
            _err({"error": "usage",
                  "detail": "markdown rendering exists for findings only"})
            return EXIT_USAGE
        from .findings import Finding
        findings = [Finding(o["category"], o["severity"], o["subject"],
                            o["spki"], tuple(o["members"]), o["evidence"])
                    for o in objs]
        out = reports.findings_markdown(findings)
    else:  # csv
        if args.kind == "findings":
            from .findings import Finding
            out = reports.findings_csv([
                Finding(o["category"], o["severity"], o["subject"], o["spki"],
                        tuple(o["members"]), o["evidence"]) for o in objs])
        elif args.kind == "assessments":
            buf = []
            buf.append("fingerprint,view,store,from,to,paths")
            for o in objs:
                for store_id, items in o["stores"].items():
                    for item in items:
                        paths = ";".join(",".join(p) for p in item["paths"])
                        buf.append(f"{o['fingerprint']},{o['view']},{store_id},"
                                   f"{item['from']},{item['to']},{paths}")
            out = "\n".join(buf) + "\n"
        else:
            _err({"error": "usage",
                  "detail": f"csv rendering not available for {args.kind}"})
            return EXIT_USAGE
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return EXIT_OK


def _add_analysis_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH,
                        help="maximum path length in certificates")
    parser.add_argument("--overlap-min", type=int,
                        default=DEFAULT_OVERLAP_MIN_DAYS,
                        help="minimum overlap in days for a cross-sign group")
    parser.add_argument("--mode", default="structural",
                        choices=["structural", "cryptographic", "strict"])
    parser.add_argument("--views", default=None,
                        help="comma list: name=src1+src2, bare source name, "
                             "'all' or 'none'")
    parser.add_argument("--stores", default=None,
                        help="comma list of store ids to assess "
                             "(default: all configured)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xsign",
        description="Cross-sign analysis over certificate corpora")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", help="generate a synthetic corpus bundle")
    p.add_argument("scenario_id")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--mode", default="structural",
                   choices=["structural", "cryptographic"])
    p.add_argument("--out", required=True)
    p.add_argument("--param", action="append",
                   help="scenario parameter, e.g. n=200")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("ingest", help="ingest certificates and configs")
    p.add_argument("--ws", dest="workspace", required=True)
    p.add_argument("--format", default="jsonl", choices=["pem", "der", "jsonl"])
    p.add_argument("paths", nargs="*")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze", help="run grouping, assessment and findings")
    p.add_argument("--ws", dest="workspace", required=True)
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("lint", help="lint cross-sign groups against the "
                                    "operational rules")
    p.add_argument("--ws", dest="workspace", required=True)
    p.add_argument("--max-validity", type=int,
                   default=DEFAULT_MAX_VALIDITY_DAYS)
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("report", help="render a materialized report")
    p.add_argument("--ws", dest="workspace", required=True)
    p.add_argument("--kind", default="findings",
                   choices=["findings", "groups", "assessments", "lint"])
    p.add_argument("--format", default="json", choices=["json", "csv", "md"])
    p.add_argument("--out", default=None)
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
