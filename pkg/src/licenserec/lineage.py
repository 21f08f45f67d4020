"""Dataset -> model -> repository lineage graph built from metadata dumps.

Dump formats (JSON Lines, one object per line)::

    datasets:  {"id", "license_tags": [...], "likes"?}
    models:    {"id", "license_tags": [...], "dataset_tags": [...], "likes"?}
    repos:     {"id", "detected_licenses": [{"spdx", "source_file"}],
                "model_matches": [{"model_id", "file", "signature_id"}],
                "terms_preserved"?}
    aliases:   {"name", "qualified"}

A graph is stored as ``nodes-dataset.jsonl``, ``nodes-model.jsonl``,
``nodes-repository.jsonl`` and ``edges.jsonl``; rows are sorted and keys
are sorted so identical graphs produce identical bytes.
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType

from licenserec.catalog import Catalog, default_catalog, is_unknown, unknown_token
from licenserec.errors import SchemaError
from licenserec.spdx_expr import ExpressionSyntaxError, licenses_in, parse_expression

logger = logging.getLogger(__name__)

__all__ = [
    "ArtifactNode",
    "IngestResult",
    "LicenseEvidence",
    "LineageEdge",
    "LineageGraph",
    "NodeKind",
    "Stage",
    "Unresolved",
    "close_dataset_to_repo",
    "ingest_files",
    "ingest_records",
    "load_alias_table",
    "load_graph",
    "read_jsonl",
    "resolve_dataset_id",
    "save_graph",
]


class NodeKind(str, Enum):
    DATASET = "dataset"
    MODEL = "model"
    REPOSITORY = "repository"


class Stage(str, Enum):
    DATASET_TO_MODEL = "dataset-model"
    MODEL_TO_REPOSITORY = "model-repo"
    DATASET_TO_REPOSITORY = "dataset-repo"

    @property
    def endpoints(self) -> tuple[NodeKind, NodeKind]:
        return _ENDPOINTS[self]

    @classmethod
    def parse(cls, text: str) -> Stage:
        key = text.strip().lower().replace("_", "-")
        if key in _STAGE_ALIASES:
            return _STAGE_ALIASES[key]
        return cls(key)


_ENDPOINTS = {
    Stage.DATASET_TO_MODEL: (NodeKind.DATASET, NodeKind.MODEL),
    Stage.MODEL_TO_REPOSITORY: (NodeKind.MODEL, NodeKind.REPOSITORY),
    Stage.DATASET_TO_REPOSITORY: (NodeKind.DATASET, NodeKind.REPOSITORY),
}
_STAGE_ALIASES = {
    "dm": Stage.DATASET_TO_MODEL, "d-m": Stage.DATASET_TO_MODEL,
    "datasettomodel": Stage.DATASET_TO_MODEL,
    "mr": Stage.MODEL_TO_REPOSITORY, "m-r": Stage.MODEL_TO_REPOSITORY,
    "model-repository": Stage.MODEL_TO_REPOSITORY, "modeltorepository": Stage.MODEL_TO_REPOSITORY,
    "dr": Stage.DATASET_TO_REPOSITORY, "d-r": Stage.DATASET_TO_REPOSITORY,
    "dataset-repository": Stage.DATASET_TO_REPOSITORY,
    "datasettorepository": Stage.DATASET_TO_REPOSITORY,
}
_STAGE_ORDER = {s: i for i, s in enumerate(Stage)}


@dataclass(frozen=True, order=True)
class LicenseEvidence:
    license: str
    source: str


@dataclass(frozen=True)
class ArtifactNode:
    id: str
    kind: NodeKind
    licenses: tuple[LicenseEvidence, ...]
    popularity: int | None = None

    @property
    def license_ids(self) -> tuple[str, ...]:
        """Distinct license ids in sorted order."""
        return tuple(sorted({e.license for e in self.licenses}))

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "kind": self.kind.value,
            "licenses": [{"license": e.license, "source": e.source} for e in self.licenses],
        }
        if self.popularity is not None:
            out["popularity"] = self.popularity
        return out

    @classmethod
    def from_json(cls, obj: dict) -> ArtifactNode:
        return cls(
            id=obj["id"],
            kind=NodeKind(obj["kind"]),
            licenses=tuple(LicenseEvidence(e["license"], e["source"]) for e in obj["licenses"]),
            popularity=obj.get("popularity"),
        )


@dataclass(frozen=True)
class LineageEdge:
    source: str
    target: str
    stage: Stage
    terms_preserved: bool = False
    evidence: tuple[str, ...] = ()

    @property
    def key(self) -> tuple[int, str, str]:
        return (_STAGE_ORDER[self.stage], self.source, self.target)

    def to_json(self) -> dict:
        return {
            "from": self.source,
            "to": self.target,
            "stage": self.stage.value,
            "terms_preserved": self.terms_preserved,
            "evidence": list(self.evidence),
        }

    @classmethod
    def from_json(cls, obj: dict) -> LineageEdge:
        return cls(
            source=obj["from"],
            target=obj["to"],
            stage=Stage(obj["stage"]),
            terms_preserved=bool(obj.get("terms_preserved", False)),
            evidence=tuple(obj.get("evidence", ())),
        )


@dataclass(frozen=True)
class LineageGraph:
    nodes: Mapping[NodeKind, Mapping[str, ArtifactNode]]
    edges: Mapping[Stage, tuple[LineageEdge, ...]]
    alias_table: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def build(
        cls,
        nodes: Iterable[ArtifactNode],
        edges: Iterable[LineageEdge],
        alias_table: Mapping[str, Iterable[str]] | None = None,
    ) -> LineageGraph:
        """Assemble a graph in canonical order, merging duplicate edges.

        Raises:
            SchemaError: an edge endpoint is missing or of the wrong kind.
        """
        by_kind: dict[NodeKind, dict[str, ArtifactNode]] = {k: {} for k in NodeKind}
        for node in sorted(nodes, key=lambda n: (n.kind.value, n.id)):
            by_kind[node.kind][node.id] = node
        merged: dict[tuple[Stage, str, str], LineageEdge] = {}
        for edge in edges:
            src_kind, dst_kind = edge.stage.endpoints
            if edge.source not in by_kind[src_kind] or edge.target not in by_kind[dst_kind]:
                raise SchemaError(f"dangling edge {edge.source} -> {edge.target}", edge.stage.value)
            k = (edge.stage, edge.source, edge.target)
            if k in merged:
                old = merged[k]
                edge = LineageEdge(
                    edge.source, edge.target, edge.stage,
                    old.terms_preserved or edge.terms_preserved,
                    tuple(sorted(set(old.evidence) | set(edge.evidence))),
                )
            else:
                edge = LineageEdge(edge.source, edge.target, edge.stage, edge.terms_preserved,
                                   tuple(sorted(set(edge.evidence))))
            merged[k] = edge
        by_stage: dict[Stage, list[LineageEdge]] = {s: [] for s in Stage}
        for edge in merged.values():
            by_stage[edge.stage].append(edge)
        aliases = {k: tuple(sorted(set(v))) for k, v in sorted((alias_table or {}).items())}
        return cls(
            MappingProxyType({k: MappingProxyType(v) for k, v in by_kind.items()}),
            MappingProxyType({s: tuple(sorted(v, key=lambda e: e.key)) for s, v in by_stage.items()}),
            MappingProxyType(aliases),
        )

    def node(self, kind: NodeKind, node_id: str) -> ArtifactNode:
        return self.nodes[kind][node_id]

    def stage_edges(self, stage: Stage) -> tuple[LineageEdge, ...]:
        return self.edges.get(stage, ())

    def endpoints(self, edge: LineageEdge) -> tuple[ArtifactNode, ArtifactNode]:
        src_kind, dst_kind = edge.stage.endpoints
        return self.nodes[src_kind][edge.source], self.nodes[dst_kind][edge.target]

    def upstream_edges(self, stage: Stage, target: str) -> tuple[LineageEdge, ...]:
        """All edges of *stage* that point at *target*."""
        key = ("up", stage)
        index = self._index.get(key)
        if index is None:
            index = defaultdict(list)
            for edge in self.stage_edges(stage):
                index[edge.target].append(edge)
            self._index[key] = index
        return tuple(index.get(target, ()))

    def all_nodes(self) -> Iterator[ArtifactNode]:
        for kind in NodeKind:
            yield from self.nodes[kind].values()


@dataclass(frozen=True)
class Unresolved:
    reason: str
    candidates: tuple[str, ...] = ()


def resolve_dataset_id(
    partial: str,
    alias_table: Mapping[str, Iterable[str]],
    known_ids: Iterable[str] = (),
) -> str | Unresolved:
    """Map a possibly incomplete dataset reference to a qualified id.

    Qualified ``org/name`` ids and ids already present in *known_ids* pass
    through; bare names are looked up in *alias_table*.
    """
    ref = partial.strip()
    if ref.startswith("dataset:"):
        ref = ref[len("dataset:"):]
    if not ref:
        return Unresolved("empty")
    if "/" in ref or ref in set(known_ids):
        return ref
    candidates = tuple(sorted(set(alias_table.get(ref, ()))))
    if len(candidates) == 1:
        return candidates[0]
    if not candidates:
        return Unresolved("not_found")
    return Unresolved("ambiguous", candidates)


@dataclass(frozen=True)
class IngestResult:
    graph: LineageGraph
    stats: dict
    quarantine: tuple[dict, ...]


def read_jsonl(path: str | Path, label: str | None = None) -> Iterator[dict]:
    """Yield objects from a JSON Lines file; blank lines are skipped.

    Raises:
        SchemaError: with the 1-based record number of a malformed line.
    """
    label = label or Path(path).name
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", f"{label} record {lineno}") from None
            if not isinstance(obj, dict):
                raise SchemaError("record must be an object", f"{label} record {lineno}")
            yield obj


def load_alias_table(path: str | Path) -> dict[str, tuple[str, ...]]:
    table: dict[str, set[str]] = defaultdict(set)
    for n, row in enumerate(read_jsonl(path, "aliases"), start=1):
        name, qualified = row.get("name"), row.get("qualified")
        if not isinstance(name, str) or not isinstance(qualified, str):
            raise SchemaError("alias rows need string name and qualified", f"aliases record {n}")
        table[name].add(qualified)
    return {k: tuple(sorted(v)) for k, v in table.items()}


def _str_list(rec: dict, key: str, where: str) -> list[str]:
    value = rec.get(key, [])
    if value is None:
        return []
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SchemaError(f"{key} must be a list of strings", where)
    return value


def _record_id(rec: dict, where: str) -> str:
    rid = rec.get("id")
    if not isinstance(rid, str) or not rid.strip():
        raise SchemaError("record needs a non-empty string id", where)
    return rid.strip()


def _likes(rec: dict, where: str) -> int | None:
    likes = rec.get("likes")
    if likes is None:
        return None
    if not isinstance(likes, int) or isinstance(likes, bool) or likes < 0:
        raise SchemaError("likes must be a non-negative integer", where)
    return likes


def _tag_evidence(tags: list[str], catalog: Catalog, source: str) -> set[LicenseEvidence]:
    return {LicenseEvidence(catalog.normalize_license_tag(t), source) for t in tags if t.strip()}


def _spdx_evidence(spdx: str, catalog: Catalog, source: str) -> set[LicenseEvidence]:
    # Each operand of a detected expression is recorded as its own detection.
    try:
        tokens = licenses_in(parse_expression(spdx))
    except ExpressionSyntaxError:
        tokens = {spdx}
    return {LicenseEvidence(catalog.normalize_license_tag(t), source) for t in tokens}


class _NodeAccumulator:
    def __init__(self, kind: NodeKind) -> None:
        self.kind = kind
        self.licenses: dict[str, set[LicenseEvidence]] = defaultdict(set)
        self.likes: dict[str, int | None] = {}

    def add(self, node_id: str, evidence: set[LicenseEvidence], likes: int | None) -> None:
        self.licenses[node_id] |= evidence
        prev = self.likes.get(node_id)
        self.likes[node_id] = likes if prev is None else max(prev, likes or 0)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.licenses

    def nodes(self) -> list[ArtifactNode]:
        out = []
        for node_id, evidence in self.licenses.items():
            if not evidence:
                evidence = {LicenseEvidence(unknown_token(""), "missing")}
            out.append(ArtifactNode(node_id, self.kind, tuple(sorted(evidence)), self.likes[node_id]))
        return out


def ingest_records(
    dataset_dump: Iterable[dict],
    model_dump: Iterable[dict],
    repo_dump: Iterable[dict],
    *,
    catalog: Catalog | None = None,
    alias_table: Mapping[str, Iterable[str]] | None = None,
    min_likes: int | None = None,
) -> IngestResult:
    """Build a lineage graph from dump records.

    License tags are normalized through *catalog*. Dataset references on
    models are resolved against *alias_table* augmented with the bare names
    of ingested datasets. References that cannot be resolved land in the
    quarantine list instead of failing the run. With *min_likes*, only
    models with more likes than the threshold are kept.

    Raises:
        SchemaError: a record violates the dump schema.
    """
    catalog = catalog or default_catalog()
    datasets = _NodeAccumulator(NodeKind.DATASET)
    models = _NodeAccumulator(NodeKind.MODEL)
    repos = _NodeAccumulator(NodeKind.REPOSITORY)
    quarantine: list[dict] = []

    for n, rec in enumerate(dataset_dump, start=1):
        where = f"dataset record {n}"
        if not isinstance(rec, dict):
            raise SchemaError("record must be an object", where)
        rid = _record_id(rec, where)
        datasets.add(rid, _tag_evidence(_str_list(rec, "license_tags", where), catalog, "tag"),
                     _likes(rec, where))

    aliases: dict[str, set[str]] = defaultdict(set)
    for name, targets in (alias_table or {}).items():
        aliases[name].update(targets)
    for did in datasets.licenses:
        if "/" in did:
            aliases[did.rsplit("/", 1)[1]].add(did)

    pending_dm: list[tuple[str, str]] = []
    filtered_models: set[str] = set()
    for n, rec in enumerate(model_dump, start=1):
        where = f"model record {n}"
        if not isinstance(rec, dict):
            raise SchemaError("record must be an object", where)
        rid = _record_id(rec, where)
        likes = _likes(rec, where)
        tags = _str_list(rec, "license_tags", where)
        dataset_tags = _str_list(rec, "dataset_tags", where)
        if min_likes is not None and (likes or 0) <= min_likes:
            filtered_models.add(rid)
            continue
        models.add(rid, _tag_evidence(tags, catalog, "tag"), likes)
        pending_dm.extend((tag, rid) for tag in dataset_tags)

    edges: list[LineageEdge] = []
    for tag, model_id in pending_dm:
        resolved = resolve_dataset_id(tag, aliases, datasets.licenses.keys())
        if isinstance(resolved, Unresolved):
            quarantine.append({"stage": Stage.DATASET_TO_MODEL.value, "from": tag, "to": model_id,
                               "reason": resolved.reason, "candidates": list(resolved.candidates)})
        elif resolved not in datasets:
            quarantine.append({"stage": Stage.DATASET_TO_MODEL.value, "from": resolved,
                               "to": model_id, "reason": "missing_dataset", "candidates": []})
        else:
            edges.append(LineageEdge(resolved, model_id, Stage.DATASET_TO_MODEL, False, (f"tag:{tag}",)))

    for n, rec in enumerate(repo_dump, start=1):
        where = f"repo record {n}"
        if not isinstance(rec, dict):
            raise SchemaError("record must be an object", where)
        rid = _record_id(rec, where)
        detected = rec.get("detected_licenses", [])
        matches = rec.get("model_matches", [])
        if not isinstance(detected, list) or not isinstance(matches, list):
            raise SchemaError("detected_licenses and model_matches must be lists", where)
        evidence: set[LicenseEvidence] = set()
        for det in detected:
            if not isinstance(det, dict) or not isinstance(det.get("spdx"), str):
                raise SchemaError("detected license needs an spdx string", where)
            evidence |= _spdx_evidence(det["spdx"], catalog, str(det.get("source_file") or "scan"))
        terms_preserved = bool(rec.get("terms_preserved", False))
        repos.add(rid, evidence, None)
        for match in matches:
            if not isinstance(match, dict) or not isinstance(match.get("model_id"), str):
                raise SchemaError("model match needs a model_id string", where)
            model_id = match["model_id"]
            if model_id not in models:
                reason = "filtered_model" if model_id in filtered_models else "missing_model"
                quarantine.append({"stage": Stage.MODEL_TO_REPOSITORY.value, "from": model_id,
                                   "to": rid, "reason": reason, "candidates": []})
                continue
            note = f"code:{match.get('file', '')}#{match.get('signature_id', '')}"
            edges.append(LineageEdge(model_id, rid, Stage.MODEL_TO_REPOSITORY, terms_preserved, (note,)))

    nodes = datasets.nodes() + models.nodes() + repos.nodes()
    graph = LineageGraph.build(nodes, edges, aliases)
    quarantine.sort(key=lambda q: (q["stage"], q["from"], q["to"], q["reason"]))
    unique_q: list[dict] = []
    for q in quarantine:
        if not unique_q or unique_q[-1] != q:
            unique_q.append(q)
    stats = graph_stats(graph)
    stats["quarantined"] = len(unique_q)
    stats["filtered_models"] = len(filtered_models)
    logger.info("ingested %s", stats)
    return IngestResult(graph, stats, tuple(unique_q))


def graph_stats(graph: LineageGraph) -> dict:
    return {
        "nodes": {k.value: len(graph.nodes[k]) for k in NodeKind},
        "edges": {s.value: len(graph.stage_edges(s)) for s in Stage},
        "unknown_license_nodes": {
            k.value: sum(1 for n in graph.nodes[k].values() if all(is_unknown(i) for i in n.license_ids))
            for k in NodeKind
        },
    }


def ingest_files(
    datasets: str | Path,
    models: str | Path,
    repos: str | Path,
    *,
    aliases: str | Path | None = None,
    catalog: Catalog | None = None,
    min_likes: int | None = None,
) -> IngestResult:
    alias_table = load_alias_table(aliases) if aliases else None
    return ingest_records(
        read_jsonl(datasets, "datasets"),
        read_jsonl(models, "models"),
        read_jsonl(repos, "repos"),
        catalog=catalog,
        alias_table=alias_table,
        min_likes=min_likes,
    )


def close_dataset_to_repo(graph: LineageGraph) -> LineageGraph:
    """Add one dataset -> repository edge per pair linked through a model.

    The closure edge lists the connecting model ids as evidence and counts
    as terms-preserving only if every model -> repository hop was.
    """
    via: dict[tuple[str, str], list[LineageEdge]] = defaultdict(list)
    models_of: dict[tuple[str, str], set[str]] = defaultdict(set)
    downstream = defaultdict(list)
    for edge in graph.stage_edges(Stage.MODEL_TO_REPOSITORY):
        downstream[edge.source].append(edge)
    for dm in graph.stage_edges(Stage.DATASET_TO_MODEL):
        for mr in downstream.get(dm.target, ()):
            via[(dm.source, mr.target)].append(mr)
            models_of[(dm.source, mr.target)].add(dm.target)
    closure = [
        LineageEdge(
            d, r, Stage.DATASET_TO_REPOSITORY,
            all(e.terms_preserved for e in hops),
            tuple(sorted(models_of[(d, r)])),
        )
        for (d, r), hops in via.items()
    ]
    existing = [e for s in Stage for e in graph.stage_edges(s)]
    return LineageGraph.build(graph.all_nodes(), existing + closure, graph.alias_table)


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n"


def save_graph(graph: LineageGraph, directory: str | Path) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for kind in NodeKind:
        with open(out / f"nodes-{kind.value}.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            for node_id in sorted(graph.nodes[kind]):
                fh.write(_dump_line(graph.nodes[kind][node_id].to_json()))
    with open(out / "edges.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for stage in Stage:
            for edge in graph.stage_edges(stage):
                fh.write(_dump_line(edge.to_json()))


def load_graph(directory: str | Path) -> LineageGraph:
    """Read a graph written by :func:`save_graph`.

    Raises:
        SchemaError: missing files, malformed rows or dangling edges.
    """
    root = Path(directory)
    if not (root / "edges.jsonl").is_file():
        raise SchemaError("not a graph directory (edges.jsonl missing)", str(root))
    nodes = []
    for kind in NodeKind:
        path = root / f"nodes-{kind.value}.jsonl"
        if not path.is_file():
            continue
        for n, obj in enumerate(read_jsonl(path), start=1):
            try:
                node = ArtifactNode.from_json(obj)
            except (KeyError, ValueError, TypeError):
                raise SchemaError("malformed node row", f"{path.name} record {n}") from None
            if node.kind is not kind:
                raise SchemaError(f"node of kind {node.kind.value} in {path.name}", f"record {n}")
            nodes.append(node)
    edges = []
    for n, obj in enumerate(read_jsonl(root / "edges.jsonl"), start=1):
        try:
            edges.append(LineageEdge.from_json(obj))
        except (KeyError, ValueError, TypeError):
            raise SchemaError("malformed edge row", f"edges.jsonl record {n}") from None
    return LineageGraph.build(nodes, edges)
