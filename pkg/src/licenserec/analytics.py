"""Aggregate statistics over lineage graphs and violation reports."""

from __future__ import annotations

import csv
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

from licenserec._percent import percent, percent_float
from licenserec.catalog import Catalog, Category, default_catalog, is_unknown
from licenserec.engine import Outcome, ViolationReport, check_edge, detect_conflicts
from licenserec.lineage import LineageGraph, NodeKind, Stage
from licenserec.matrix import CompatibilityMatrix

__all__ = [
    "PatternRow",
    "TransitionMatrix",
    "ViolationPatternTable",
    "category_distribution",
    "compare_matrices",
    "export_sankey",
    "transition_matrix",
    "violation_patterns",
]


def _category(catalog: Catalog, license_id: str) -> Category:
    return Category.UNKNOWN if is_unknown(license_id) else catalog.categorize(license_id)


@dataclass(frozen=True)
class TransitionMatrix:
    stage: Stage
    counts: dict[Category, dict[Category, int]]
    per_pair: bool = False

    def total(self) -> int:
        return sum(sum(row.values()) for row in self.counts.values())

    def cell(self, upstream: Category, downstream: Category) -> int:
        return self.counts.get(upstream, {}).get(downstream, 0)

    @property
    def retention(self) -> dict[Category, Decimal]:
        """Share of each upstream category's links that keep the category, in percent."""
        out = {}
        for cat, row in self.counts.items():
            value = percent(row.get(cat, 0), sum(row.values()))
            if value is not None:
                out[cat] = value
        return out

    def flows(self) -> list[tuple[Category, Category, int]]:
        """Non-zero cells in canonical category order."""
        order = list(Category)
        return [
            (u, d, self.counts[u][d])
            for u in order if u in self.counts
            for d in order if self.counts[u].get(d, 0) > 0
        ]

    def to_json(self) -> dict:
        return {
            "stage": self.stage.value,
            "per_pair": self.per_pair,
            "counts": {u.code: {d.code: n for d, n in row.items()} for u, row in self.counts.items()},
            "retention": {c.code: float(v) for c, v in self.retention.items()},
        }


def transition_matrix(
    graph: LineageGraph,
    stage: Stage,
    matrix: CompatibilityMatrix,
    *,
    per_pair: bool = False,
) -> TransitionMatrix:
    """Count evaluated links by (upstream category, downstream category).

    By default each evaluated link contributes once, at its representative
    license pair, so the cells sum to the number of evaluated links. With
    ``per_pair`` every known license pair of every link is counted instead.
    """
    catalog = matrix.catalog
    counts: dict[Category, Counter] = {}
    for edge in graph.stage_edges(stage):
        a = check_edge(edge, graph, matrix)
        if a.overall is Outcome.UNKNOWN:
            continue
        if per_pair:
            cells = [(u, d) for u, d, _ in a.pairs if not is_unknown(u) and not is_unknown(d)]
        else:
            assert a.representative is not None
            cells = [a.representative]
        for u, d in cells:
            counts.setdefault(_category(catalog, u), Counter())[_category(catalog, d)] += 1
    ordered = {
        u: {d: counts[u][d] for d in Category if counts[u][d]}
        for u in Category if u in counts
    }
    return TransitionMatrix(stage, ordered, per_pair)


@dataclass(frozen=True)
class PatternRow:
    upstream: Category
    downstream: Category
    count: int
    pct: Decimal

    @property
    def label(self) -> str:
        return f"{self.upstream.short} → {self.downstream.short}"

    def to_json(self) -> dict:
        return {
            "upstream": self.upstream.code,
            "downstream": self.downstream.code,
            "pattern": f"{self.upstream.short}->{self.downstream.short}",
            "count": self.count,
            "pct": float(self.pct),
        }


@dataclass(frozen=True)
class ViolationPatternTable:
    stage: Stage
    rows: tuple[PatternRow, ...]
    violations: int
    evaluated: int

    @property
    def rate(self) -> Decimal:
        return percent(self.violations, self.evaluated) or Decimal("0.0")

    def top(self, n: int = 10) -> tuple[PatternRow, ...]:
        return self.rows[:n]

    def to_json(self) -> dict:
        return {
            "stage": self.stage.value,
            "violations": self.violations,
            "evaluated": self.evaluated,
            "rate": float(self.rate),
            "rows": [r.to_json() for r in self.rows],
        }


def violation_patterns(report: ViolationReport, catalog: Catalog | None = None) -> ViolationPatternTable:
    """Group a report's violations by category pair, most frequent first."""
    catalog = catalog or default_catalog()
    counter: Counter = Counter()
    for a in report.violating():
        assert a.representative is not None
        u, d = a.representative
        counter[(_category(catalog, u), _category(catalog, d))] += 1
    order = {c: i for i, c in enumerate(Category)}
    ranked = sorted(counter.items(), key=lambda kv: (-kv[1], order[kv[0][0]], order[kv[0][1]]))
    rows = tuple(
        PatternRow(u, d, n, percent(n, report.violations)) for (u, d), n in ranked
    )
    return ViolationPatternTable(report.stage, rows, report.violations, report.evaluated)


def category_distribution(graph: LineageGraph, catalog: Catalog | None = None) -> dict:
    """Per node kind, category counts and shares over license occurrences.

    A node holding two distinct licenses contributes two occurrences.
    """
    catalog = catalog or default_catalog()
    out = {}
    for kind in NodeKind:
        counter: Counter = Counter()
        for node in graph.nodes[kind].values():
            for lid in node.license_ids:
                counter[_category(catalog, lid)] += 1
        total = sum(counter.values())
        out[kind.value] = {
            "total": total,
            "categories": {
                c.code: {"count": counter[c], "pct": percent_float(counter[c], total)}
                for c in Category if counter[c]
            },
        }
    return out


def compare_matrices(
    graph: LineageGraph,
    matrices: Sequence[CompatibilityMatrix],
    stages: Iterable[Stage] = tuple(Stage),
) -> dict:
    """Violation rate, in percent, per stage for each matrix.

    Columns are keyed by matrix name; a name listed twice gets a ``#2``
    suffix so both columns survive.
    """
    stages = tuple(stages)
    table: dict[str, dict[str, float | None]] = {}
    for m in matrices:
        name = m.name
        n = 2
        while name in table:
            name = f"{m.name}#{n}"
            n += 1
        table[name] = {s.value: detect_conflicts(graph, s, m).violation_pct for s in stages}
    return {"stages": [s.value for s in stages], "matrices": table}


SANKEY_HEADER = ("source_category", "target_category", "count")


def export_sankey(tm: TransitionMatrix, path: str | Path) -> None:
    """Write one CSV row per non-zero flow, in canonical category order."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SANKEY_HEADER)
        for u, d, n in tm.flows():
            writer.writerow((u.code, d.code, n))
