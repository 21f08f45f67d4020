"""Command-line entry point.

Exit status: 0 success or compliant, 1 violations found, 2 usage error,
3 data or schema error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from licenserec import __version__
from licenserec.catalog import Catalog, check_coherence, default_catalog, load_catalog, load_whitelist
from licenserec.errors import DataError
from licenserec.lineage import Stage, close_dataset_to_repo, ingest_files, load_graph, save_graph
from licenserec.matrix import (
    BUNDLED_MATRICES,
    CompatibilityMatrix,
    EdgeContext,
    VerdictKind,
    check_invariants,
    load_matrix,
    resolve_matrix,
)
from licenserec.spdx_expr import ExpressionSyntaxError, licenses_in, parse_expression

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3
DATA_DIR_ENV = "LICENSEREC_DATA_DIR"

logger = logging.getLogger("licenserec")


class UsageError(Exception):
    pass


@dataclass
class DataFiles:
    """Where catalog, matrices, whitelist and signatures come from."""

    data_dir: Path | None

    def _find(self, *names: str) -> Path | None:
        if self.data_dir is None:
            return None
        for name in names:
            p = self.data_dir / name
            if p.is_file():
                return p
        return None

    def catalog(self, explicit: str | None = None) -> Catalog:
        path = Path(explicit) if explicit else self._find("catalog.json")
        return load_catalog(path) if path else default_catalog()

    def matrix(self, name: str | None, catalog: Catalog) -> CompatibilityMatrix:
        name = name or "licenserec-default"
        found = self._find(f"matrices/{name}.json", f"{name}.json")
        if found:
            return load_matrix(found, catalog)
        if name in BUNDLED_MATRICES:
            return resolve_matrix(name, None if catalog is default_catalog() else catalog)
        if not Path(name).is_file():
            raise UsageError(f"no matrix named {name!r} (bundled: {', '.join(BUNDLED_MATRICES)})")
        return load_matrix(name, catalog)

    def whitelist(self, explicit: str | None, catalog: Catalog) -> frozenset[str] | None:
        path = Path(explicit) if explicit else self._find("whitelist.txt", "whitelist.json")
        return load_whitelist(path, catalog) if path else None

    def signatures(self, explicit: str | None):
        from licenserec.usage_scan import default_signatures, load_signatures

        path = Path(explicit) if explicit else self._find("signatures.json")
        return load_signatures(path) if path else default_signatures()


def _emit(args: argparse.Namespace, payload: dict, text_lines: Sequence[str]) -> None:
    """Write JSON to --out and/or stdout (--json); otherwise print the summary."""
    blob = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    out = getattr(args, "out", None)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(blob, encoding="utf-8")
    if getattr(args, "json", False):
        sys.stdout.write(blob)
    else:
        for line in text_lines:
            print(line)


def _parse_expr(text: str):
    try:
        return parse_expression(text)
    except ExpressionSyntaxError as exc:
        raise UsageError(f"bad license expression {text!r}: {exc}") from None


def _stage(text: str) -> Stage:
    try:
        return Stage.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown stage {text!r} (choose from {', '.join(s.value for s in Stage)})"
        ) from None


def cmd_check(args, files: DataFiles) -> int:
    catalog = files.catalog(args.catalog)
    matrix = files.matrix(args.matrix, catalog)
    up, down = _parse_expr(args.upstream), _parse_expr(args.downstream)
    verdict = matrix.expression_verdict(up, down, EdgeContext(args.terms_preserved))
    payload = {
        "upstream": args.upstream,
        "downstream": args.downstream,
        "terms_preserved": args.terms_preserved,
        "matrix": matrix.name,
        "verdict": verdict.to_json(),
    }
    _emit(args, payload, [f"{verdict.kind.value} ({verdict.reason}; {verdict.source.value})"])
    return EXIT_VIOLATIONS if verdict.kind is VerdictKind.INCOMPATIBLE else EXIT_OK


def cmd_recommend(args, files: DataFiles) -> int:
    from licenserec.engine import recommend

    catalog = files.catalog(args.catalog)
    matrix = files.matrix(args.matrix, catalog)
    upstream: list[str] = []
    for part in args.upstream.split(","):
        if part.strip():
            upstream.extend(sorted(licenses_in(_parse_expr(part))))
    rec = recommend(
        upstream, matrix,
        whitelist=files.whitelist(args.whitelist, catalog),
        ctx=EdgeContext(args.terms_preserved),
        catalog=catalog,
    )
    payload = rec.to_json()
    payload["upstream"] = upstream
    lines = []
    if not rec.resolvable:
        lines.append("unresolvable: no license is compatible with every upstream license")
    for cat, ids in rec.categories.items():
        lines.append(f"{cat.code:15} {', '.join(ids)}")
    if rec.ignored_upstream:
        lines.append(f"ignored unknown upstream: {', '.join(rec.ignored_upstream)}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_ingest(args, files: DataFiles) -> int:
    catalog = files.catalog(args.catalog)
    result = ingest_files(
        args.datasets, args.models, args.repos,
        aliases=args.aliases, catalog=catalog, min_likes=args.min_likes,
    )
    graph = result.graph if args.no_closure else close_dataset_to_repo(result.graph)
    save_graph(graph, args.out_dir)
    out = Path(args.out_dir)
    with open(out / "quarantine.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for row in result.quarantine:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    stats = dict(result.stats)
    stats["edges"] = {s.value: len(graph.stage_edges(s)) for s in Stage}
    (out / "ingest-stats.json").write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    lines = [f"nodes: {stats['nodes']}", f"edges: {stats['edges']}", f"quarantined: {stats['quarantined']}"]
    _emit(args, stats, lines)
    return EXIT_OK


def cmd_audit(args, files: DataFiles) -> int:
    from licenserec.engine import detect_conflicts, fixability

    catalog = files.catalog(args.catalog)
    matrix = files.matrix(args.matrix, catalog)
    graph = load_graph(args.graph_dir)
    if args.stage is Stage.DATASET_TO_REPOSITORY and not graph.stage_edges(args.stage):
        graph = close_dataset_to_repo(graph)
    report = detect_conflicts(graph, args.stage, matrix)
    payload = report.to_json()
    rate = "n/a" if report.violation_pct is None else f"{report.violation_pct:.1f}%"
    lines = [
        f"stage {report.stage.value} ({matrix.name}): {report.violations} violations "
        f"in {report.evaluated} evaluated links ({rate}); {report.unknowns} unknown",
    ]
    if args.fixability:
        fx = fixability(report, graph, matrix, whitelist=files.whitelist(args.whitelist, catalog),
                        catalog=catalog)
        payload["fixability"] = fx.to_json()
        pct = "n/a" if fx.fixability_pct is None else f"{fx.fixability_pct:.1f}%"
        lines.append(f"fixable: {fx.fixable}/{fx.total_violations} ({pct}); unresolvable: {fx.unresolvable}")
    _emit(args, payload, lines)
    return EXIT_VIOLATIONS if report.violations else EXIT_OK


def _read_model_ids(path: str) -> set[str]:
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.strip()
    if stripped.startswith("["):
        data = json.loads(stripped)
        if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
            raise DataError(f"{path}: model list must be a JSON array of strings")
        return set(data)
    ids = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("{"):
            obj = json.loads(line)
            if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
                raise DataError(f"{path}: model records need a string id")
            ids.add(obj["id"])
        else:
            ids.add(line)
    return ids


def cmd_scan(args, files: DataFiles) -> int:
    from licenserec.usage_scan import scan_tree

    if not Path(args.root).is_dir():
        raise UsageError(f"{args.root} is not a directory")
    sigs = files.signatures(args.signatures)
    report = scan_tree(args.root, sigs, _read_model_ids(args.models), extensions=args.ext or (".py",))
    lines = [f"{m.file}:{m.line}: {m.model_id} via {m.signature}" for m in report.matches]
    lines += [f"parse failure: {f['error']}" for f in report.failures]
    lines.append(f"{len(report.matches)} matches, {len(report.failures)} failures")
    _emit(args, report.to_json(), lines)
    return EXIT_OK


def cmd_report(args, files: DataFiles) -> int:
    from licenserec import analytics
    from licenserec.engine import detect_conflicts

    catalog = files.catalog(args.catalog)
    matrix = files.matrix(args.matrix, catalog)
    graph = load_graph(args.graph_dir)
    if not graph.stage_edges(Stage.DATASET_TO_REPOSITORY):
        graph = close_dataset_to_repo(graph)
    stages = [args.stage] if args.stage else list(Stage)
    payload: dict = {"matrix": matrix.name}
    lines = []
    if args.sankey:
        sankey_stage = args.stage or Stage.MODEL_TO_REPOSITORY
        tm = analytics.transition_matrix(graph, sankey_stage, matrix)
        analytics.export_sankey(tm, args.sankey)
        payload["sankey"] = {"stage": sankey_stage.value, "path": str(args.sankey), "flows": len(tm.flows())}
        lines.append(f"sankey ({sankey_stage.value}): {len(tm.flows())} flows -> {args.sankey}")
    patterns = {}
    for stage in stages:
        table = analytics.violation_patterns(detect_conflicts(graph, stage, matrix), catalog)
        patterns[stage.value] = table.to_json()
        lines.append(f"{stage.value}: {table.violations}/{table.evaluated} violations ({table.rate}%)")
        for row in table.top(10):
            lines.append(f"  {row.label:16} {row.count:8} {row.pct}%")
    payload["patterns"] = patterns
    if args.patterns:
        doc = {"matrix": matrix.name, "stages": patterns}
        Path(args.patterns).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if args.compare:
        names = [n.strip() for n in args.compare.split(",") if n.strip()]
        mats = [files.matrix(n, catalog) for n in names]
        cmp = analytics.compare_matrices(graph, mats, stages)
        payload["compare"] = cmp
        for name, row in cmp["matrices"].items():
            cells = ", ".join(f"{s}={'n/a' if v is None else v}" for s, v in row.items())
            lines.append(f"{name}: {cells}")
    if args.distribution:
        payload["distribution"] = analytics.category_distribution(graph, catalog)
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_validate(args, files: DataFiles) -> int:
    results: list[tuple[str, bool, str]] = []

    def record(name: str, problems: Sequence[str]) -> None:
        detail = "; ".join(problems[:3]) + (f" (+{len(problems) - 3} more)" if len(problems) > 3 else "")
        results.append((name, not problems, detail))

    catalog = None
    try:
        catalog = files.catalog(args.catalog)
        record("catalog.load", [])
        record("catalog.coherence", check_coherence(catalog))
    except DataError as exc:
        record("catalog.load", [f"{type(exc).__name__}: {exc}"])
    if catalog is not None:
        for name in args.matrix or ["licenserec-default"]:
            try:
                matrix = files.matrix(name, catalog)
            except DataError as exc:
                record(f"matrix[{name}].load", [f"{type(exc).__name__}: {exc}"])
                continue
            record(f"matrix[{name}].load", [])
            for check, problems in check_invariants(matrix).items():
                record(f"matrix[{name}].{check}", problems)
        try:
            files.whitelist(args.whitelist, catalog)
            record("whitelist.load", [])
        except DataError as exc:
            record("whitelist.load", [f"{type(exc).__name__}: {exc}"])
    try:
        sigs = files.signatures(args.signatures)
        record("signatures.load", [] if len(sigs) or args.signatures else ["empty signature set"])
    except DataError as exc:
        record("signatures.load", [f"{type(exc).__name__}: {exc}"])
    ok = all(passed for _, passed, _ in results)
    payload = {
        "ok": ok,
        "checks": [{"name": n, "passed": p, "detail": d} for n, p, d in results],
    }
    lines = [f"{'PASS' if p else 'FAIL'}  {n}" + (f"  {d}" if d else "") for n, p, d in results]
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_DATA


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="licenserec",
        description="License compliance checks for dataset -> model -> application supply chains.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--data-dir", help=f"directory overriding bundled data files (env: {DATA_DIR_ENV})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, matrix=True, out=True):
        p.add_argument("--catalog", help="catalog JSON file")
        if matrix:
            p.add_argument("--matrix", help="bundled matrix name or matrix JSON file")
        p.add_argument("--json", action="store_true", help="print machine-readable JSON")
        if out:
            p.add_argument("--out", help="also write the JSON result to this file")

    p = sub.add_parser("check", help="verdict for one upstream/downstream pair")
    p.add_argument("--upstream", required=True, help="upstream SPDX expression")
    p.add_argument("--downstream", required=True, help="downstream SPDX expression")
    p.add_argument("--terms-preserved", action="store_true", help="downstream carries ML license terms along")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("recommend", help="compliant licenses for a set of upstream licenses")
    p.add_argument("--upstream", required=True, help="comma-separated SPDX expressions")
    p.add_argument("--whitelist", help="allowed downstream licenses (JSON array or one per line)")
    p.add_argument("--terms-preserved", action="store_true")
    common(p)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("ingest", help="build a lineage graph from metadata dumps")
    p.add_argument("--datasets", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--repos", required=True)
    p.add_argument("--aliases", help="JSONL of {name, qualified} dataset aliases")
    p.add_argument("--min-likes", type=int, help="keep only models with more likes than this")
    p.add_argument("--no-closure", action="store_true", help="skip dataset -> repository closure edges")
    p.add_argument("--out", dest="out_dir", required=True, help="graph directory to write")
    common(p, matrix=False, out=False)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("audit", help="detect violations on one stage of a graph")
    p.add_argument("graph_dir")
    p.add_argument("--stage", type=_stage, required=True)
    p.add_argument("--fixability", action="store_true", help="also compute fixability")
    p.add_argument("--whitelist")
    common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("scan", help="find model invocations in a source tree")
    p.add_argument("root")
    p.add_argument("--signatures", help="signature JSON file (default: bundled set)")
    p.add_argument("--models", required=True, help="model ids: one per line, JSON array, or model dump")
    p.add_argument("--ext", action="append", help="file extension to scan (repeatable; default .py)")
    common(p, matrix=False)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("report", help="pattern tables, Sankey flows and matrix comparison")
    p.add_argument("graph_dir")
    p.add_argument("--stage", type=_stage, help="restrict to one stage (Sankey default: model-repo)")
    p.add_argument("--sankey", help="write transition flows as CSV")
    p.add_argument("--patterns", help="write violation pattern tables as JSON")
    p.add_argument("--compare", help="comma-separated matrices to compare")
    p.add_argument("--distribution", action="store_true", help="include category distribution")
    common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate", help="load data files and check their invariants")
    p.add_argument("--catalog")
    p.add_argument("--matrix", action="append", help="matrix to check (repeatable)")
    p.add_argument("--whitelist")
    p.add_argument("--signatures")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    data_dir = args.data_dir or os.environ.get(DATA_DIR_ENV)
    if data_dir and not Path(data_dir).is_dir():
        print(f"licenserec: data directory {data_dir} does not exist", file=sys.stderr)
        return EXIT_USAGE
    files = DataFiles(Path(data_dir) if data_dir else None)
    try:
        return args.func(args, files)
    except UsageError as exc:
        print(f"licenserec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, json.JSONDecodeError) as exc:
        print(f"licenserec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"licenserec: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
