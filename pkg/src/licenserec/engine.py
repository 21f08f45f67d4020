"""Violation detection, license recommendation and fixability."""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum

from licenserec._percent import percent_float
from licenserec.catalog import Catalog, Category, is_unknown
from licenserec.lineage import LineageEdge, LineageGraph, Stage
from licenserec.matrix import DEFAULT_CONTEXT, CompatibilityMatrix, EdgeContext, Verdict, VerdictKind

__all__ = [
    "EdgeAssessment",
    "FixabilityReport",
    "Outcome",
    "RecommendationList",
    "ViolationReport",
    "aggregate",
    "cc_family_key",
    "check_edge",
    "check_licenses",
    "detect_conflicts",
    "fixability",
    "recommend",
]

MAX_PER_CATEGORY = 5


class Outcome(str, Enum):
    COMPLIANT = "Compliant"
    VIOLATION = "Violation"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class EdgeAssessment:
    edge: LineageEdge | None
    pairs: tuple[tuple[str, str, Verdict], ...]
    overall: Outcome
    # (upstream, downstream) license pair that stands for the edge in
    # category statistics; None when the edge is Unknown.
    representative: tuple[str, str] | None = None

    def to_json(self) -> dict:
        out: dict = {
            "overall": self.overall.value,
            "pairs": [
                {"upstream": u, "downstream": d, "verdict": v.to_json()} for u, d, v in self.pairs
            ],
            "representative": list(self.representative) if self.representative else None,
        }
        if self.edge is not None:
            out["from"] = self.edge.source
            out["to"] = self.edge.target
            out["terms_preserved"] = self.edge.terms_preserved
        return out


def aggregate(
    upstream: tuple[str, ...],
    downstream: tuple[str, ...],
    verdicts: dict[tuple[str, str], Verdict],
) -> tuple[Outcome, tuple[str, str] | None]:
    """Combine per-pair verdicts over known licenses into one outcome.

    Compliant when some downstream license is Compatible with every
    upstream license; otherwise a Violation as soon as one pair is
    Incompatible. The representative pair picks the best downstream
    license (fewest conflicts, then id) and its first conflicting upstream.
    """
    if not upstream or not downstream:
        return Outcome.UNKNOWN, None
    best: tuple[int, str] | None = None
    any_incompatible = False
    for d in downstream:
        bad = [u for u in upstream if verdicts[(u, d)].kind is not VerdictKind.COMPATIBLE]
        if not bad:
            return Outcome.COMPLIANT, (upstream[0], d)
        n_incompatible = sum(verdicts[(u, d)].kind is VerdictKind.INCOMPATIBLE for u in bad)
        any_incompatible |= n_incompatible > 0
        if best is None or len(bad) < best[0]:
            best = (len(bad), d)
    if not any_incompatible:
        return Outcome.UNKNOWN, None
    assert best is not None
    d = best[1]
    u = next(u for u in upstream if verdicts[(u, d)].kind is VerdictKind.INCOMPATIBLE)
    return Outcome.VIOLATION, (u, d)


def check_licenses(
    upstream: Iterable[str],
    downstream: Iterable[str],
    matrix: CompatibilityMatrix,
    ctx: EdgeContext = DEFAULT_CONTEXT,
    edge: LineageEdge | None = None,
) -> EdgeAssessment:
    """Assess one upstream license set against one downstream license set.

    Every pair is reported, UNKNOWN tokens included; only pairs of
    catalog licenses take part in aggregation.
    """
    ups = tuple(sorted(set(upstream)))
    downs = tuple(sorted(set(downstream)))
    pairs = tuple((u, d, matrix.verdict(u, d, ctx)) for u in ups for d in downs)
    verdicts = {(u, d): v for u, d, v in pairs}
    known_u = tuple(u for u in ups if not is_unknown(u) and u in matrix.catalog)
    known_d = tuple(d for d in downs if not is_unknown(d) and d in matrix.catalog)
    overall, rep = aggregate(known_u, known_d, verdicts)
    return EdgeAssessment(edge, pairs, overall, rep)


def check_edge(edge: LineageEdge, graph: LineageGraph, matrix: CompatibilityMatrix) -> EdgeAssessment:
    src, dst = graph.endpoints(edge)
    ctx = EdgeContext(terms_preserved=edge.terms_preserved)
    return check_licenses(src.license_ids, dst.license_ids, matrix, ctx, edge)


@dataclass(frozen=True)
class ViolationReport:
    stage: Stage
    matrix: str
    evaluated: int
    violations: int
    unknowns: int
    assessments: tuple[EdgeAssessment, ...]

    @property
    def violation_rate(self) -> float | None:
        """Violations over evaluated links, as a fraction; None if nothing was evaluated."""
        if self.evaluated == 0:
            return None
        return self.violations / self.evaluated

    @property
    def violation_pct(self) -> float | None:
        return percent_float(self.violations, self.evaluated)

    def violating(self) -> tuple[EdgeAssessment, ...]:
        return tuple(a for a in self.assessments if a.overall is Outcome.VIOLATION)

    def to_json(self, include_assessments: bool = True) -> dict:
        out: dict = {
            "stage": self.stage.value,
            "matrix": self.matrix,
            "evaluated": self.evaluated,
            "violations": self.violations,
            "unknowns": self.unknowns,
            "violation_rate": None if self.violation_rate is None else round(self.violation_rate, 6),
            "violation_pct": self.violation_pct,
        }
        if include_assessments:
            out["assessments"] = [a.to_json() for a in self.assessments]
        return out


def detect_conflicts(graph: LineageGraph, stage: Stage, matrix: CompatibilityMatrix) -> ViolationReport:
    assessments = tuple(check_edge(e, graph, matrix) for e in graph.stage_edges(stage))
    violations = sum(a.overall is Outcome.VIOLATION for a in assessments)
    unknowns = sum(a.overall is Outcome.UNKNOWN for a in assessments)
    return ViolationReport(
        stage, matrix.name, len(assessments) - unknowns, violations, unknowns, assessments
    )


_CC_VERSION = re.compile(r"^(CC-BY(?:-[A-Z]+)*)-(\d+\.\d+)$")


def cc_family_key(license_id: str) -> tuple[str, str] | None:
    """``("CC-BY-SA", "3.0")`` for ``CC-BY-SA-3.0``; None outside versioned CC."""
    m = _CC_VERSION.match(license_id)
    return (m.group(1), m.group(2)) if m else None


@dataclass(frozen=True)
class RecommendationList:
    resolvable: bool
    categories: dict[Category, tuple[str, ...]]
    excluded: tuple[tuple[str, str], ...] = ()
    ignored_upstream: tuple[str, ...] = ()

    @property
    def licenses(self) -> tuple[str, ...]:
        return tuple(i for c in Category if c in self.categories for i in self.categories[c])

    def __bool__(self) -> bool:
        return self.resolvable and bool(self.licenses)

    def to_json(self) -> dict:
        return {
            "resolvable": self.resolvable,
            "categories": {c.code: list(ids) for c, ids in self.categories.items()},
            "excluded": [{"id": i, "reason": r} for i, r in self.excluded],
            "ignored_upstream": list(self.ignored_upstream),
        }


def recommend(
    upstream: Iterable[str],
    matrix: CompatibilityMatrix,
    *,
    whitelist: Iterable[str] | None = None,
    ctx: EdgeContext = DEFAULT_CONTEXT,
    catalog: Catalog | None = None,
) -> RecommendationList:
    """Rank downstream licenses that are Compatible with every upstream license.

    Unknown upstream licenses cannot be reasoned about; they are skipped
    and listed in ``ignored_upstream``. With no usable upstream the
    candidate set is the whole catalog, then filtered by the whitelist
    (default: the catalog whitelist). Older Creative Commons versions are
    dropped when the 4.0 version of the same family survives.
    """
    catalog = catalog or matrix.catalog
    ups: list[str] = []
    ignored: list[str] = []
    for raw in upstream:
        tag = catalog.normalize_license_tag(raw)
        (ignored if is_unknown(tag) else ups).append(tag)
    candidates = set(catalog.ids)
    for u in sorted(set(ups)):
        candidates &= matrix.compatible_set(u, ctx)
        if not candidates:
            break
    ignored_t = tuple(sorted(set(ignored)))
    if not candidates:
        return RecommendationList(False, {}, (), ignored_t)

    allowed = catalog.whitelist() if whitelist is None else {catalog.normalize_license_tag(w) for w in whitelist}
    excluded: list[tuple[str, str]] = []
    kept = set()
    for lid in candidates:
        if lid in allowed:
            kept.add(lid)
        else:
            excluded.append((lid, "not_whitelisted"))

    families = {cc_family_key(i) for i in kept}
    for lid in sorted(kept):
        key = cc_family_key(lid)
        if key and key[1] != "4.0" and (key[0], "4.0") in families:
            kept.discard(lid)
            excluded.append((lid, "superseded_cc_version"))

    by_cat: dict[Category, list[str]] = {}
    for lid in kept:
        by_cat.setdefault(catalog.categorize(lid), []).append(lid)
    categories: dict[Category, tuple[str, ...]] = {}
    for cat in Category:
        ids = by_cat.get(cat)
        if not ids:
            continue
        ids.sort(key=lambda i: (-catalog.get(i).frequency_weight, i))
        categories[cat] = tuple(ids[:MAX_PER_CATEGORY])
        excluded.extend((i, "rank_cutoff") for i in ids[MAX_PER_CATEGORY:])
    excluded.sort()
    return RecommendationList(True, categories, tuple(excluded), ignored_t)


@dataclass(frozen=True)
class FixabilityReport:
    stage: Stage
    total_violations: int
    fixable: int
    unresolvable: int
    edges: tuple[dict, ...] = ()

    @property
    def fixability_pct(self) -> float | None:
        return percent_float(self.fixable, self.total_violations)

    def to_json(self) -> dict:
        return {
            "stage": self.stage.value,
            "total_violations": self.total_violations,
            "fixable": self.fixable,
            "unresolvable": self.unresolvable,
            "fixability_pct": self.fixability_pct,
            "edges": list(self.edges),
        }


def downstream_upstream_set(graph: LineageGraph, stage: Stage, target: str) -> tuple[tuple[str, ...], bool]:
    """All known upstream licenses of *target* within *stage*, and the joint terms flag."""
    edges = graph.upstream_edges(stage, target)
    src_kind = stage.endpoints[0]
    licenses = {
        lid
        for e in edges
        for lid in graph.nodes[src_kind][e.source].license_ids
        if not is_unknown(lid)
    }
    return tuple(sorted(licenses)), bool(edges) and all(e.terms_preserved for e in edges)


def fixability(
    report: ViolationReport,
    graph: LineageGraph,
    matrix: CompatibilityMatrix,
    *,
    whitelist: Iterable[str] | None = None,
    catalog: Catalog | None = None,
) -> FixabilityReport:
    """Share of violating edges whose downstream artifact could be relicensed.

    The downstream artifact is checked against its full upstream license
    set within the stage, not only the violating edge. A violation is
    fixable when that set admits at least one recommendation.
    """
    wl = None if whitelist is None else frozenset(whitelist)
    memo: dict[tuple[tuple[str, ...], bool], RecommendationList] = {}
    rows = []
    fixable_n = 0
    for a in report.violating():
        assert a.edge is not None
        ups, tp = downstream_upstream_set(graph, report.stage, a.edge.target)
        key = (ups, tp)
        if key not in memo:
            memo[key] = recommend(ups, matrix, whitelist=wl, ctx=EdgeContext(tp), catalog=catalog)
        rec = memo[key]
        ok = bool(rec)
        fixable_n += ok
        rows.append({
            "from": a.edge.source,
            "to": a.edge.target,
            "upstream": list(ups),
            "fixable": ok,
            "recommended": list(rec.licenses),
        })
    total = len(rows)
    return FixabilityReport(report.stage, total, fixable_n, total - fixable_n, tuple(rows))
