import json

import pytest

from licenserec.catalog import is_unknown
from licenserec.errors import SchemaError
from licenserec.fixtures import Dumps, minimal_dumps, stage_pattern_dumps
from licenserec.lineage import (
    LineageEdge,
    LineageGraph,
    NodeKind,
    Stage,
    Unresolved,
    close_dataset_to_repo,
    ingest_files,
    ingest_records,
    load_alias_table,
    load_graph,
    read_jsonl,
    resolve_dataset_id,
    save_graph,
)


def _ingest(d: Dumps, **kw):
    return ingest_records(d.datasets, d.models, d.repos, **kw)


def _repo(rid, spdx, models):
    return {"id": rid, "detected_licenses": [{"spdx": s, "source_file": "LICENSE"} for s in spdx],
            "model_matches": [{"model_id": m, "file": "a.py", "signature_id": "s"} for m in models]}


def test_minimal_chain():
    result = _ingest(minimal_dumps())
    g = result.graph
    assert sum(len(g.nodes[k]) for k in NodeKind) == 3
    assert len(g.stage_edges(Stage.DATASET_TO_MODEL)) == 1
    assert len(g.stage_edges(Stage.MODEL_TO_REPOSITORY)) == 1
    assert g.stage_edges(Stage.DATASET_TO_REPOSITORY) == ()
    assert result.quarantine == ()
    assert result.stats["nodes"] == {"dataset": 1, "model": 1, "repository": 1}
    node = g.node(NodeKind.DATASET, "demo-org/tiny-corpus")
    assert node.license_ids == ("CC-BY-SA-4.0",)
    assert node.popularity == 3


def test_nonexistent_dataset_quarantined():
    d = Dumps(models=[{"id": "o/m", "license_tags": ["mit"], "dataset_tags": ["ghost/data"]}])
    result = _ingest(d)
    assert "o/m" in result.graph.nodes[NodeKind.MODEL]
    assert result.graph.stage_edges(Stage.DATASET_TO_MODEL) == ()
    assert result.quarantine == ({"stage": "dataset-model", "from": "ghost/data", "to": "o/m",
                                  "reason": "missing_dataset", "candidates": []},)
    assert result.stats["quarantined"] == 1


def test_missing_model_match_quarantined():
    d = Dumps(repos=[_repo("gh/r", ["MIT"], ["nobody/model"])])
    result = _ingest(d)
    assert result.quarantine[0]["reason"] == "missing_model"
    assert "gh/r" in result.graph.nodes[NodeKind.REPOSITORY]


def test_resolve_dataset_id():
    table = {"squad": ["rajpurkar/squad"], "common": ["a/common", "b/common"]}
    assert resolve_dataset_id("squad", table) == "rajpurkar/squad"
    assert resolve_dataset_id("org/data", table) == "org/data"
    amb = resolve_dataset_id("common", table)
    assert isinstance(amb, Unresolved) and amb.reason == "ambiguous" and len(amb.candidates) == 2
    assert resolve_dataset_id("nothing", table) == Unresolved("not_found")
    assert resolve_dataset_id("dataset:squad", table) == "rajpurkar/squad"


def test_bare_dataset_tags_resolve_via_alias_table():
    d = Dumps(
        datasets=[{"id": "rajpurkar/squad", "license_tags": ["cc-by-sa-4.0"]},
                  {"id": "a/common", "license_tags": ["mit"]}, {"id": "b/common", "license_tags": ["mit"]}],
        models=[{"id": "o/m", "license_tags": ["mit"], "dataset_tags": ["squad", "common"]}],
    )
    result = _ingest(d)
    edges = result.graph.stage_edges(Stage.DATASET_TO_MODEL)
    assert [(e.source, e.target) for e in edges] == [("rajpurkar/squad", "o/m")]
    assert result.quarantine[0]["reason"] == "ambiguous"
    assert result.quarantine[0]["candidates"] == ["a/common", "b/common"]


def test_explicit_alias_file(tmp_path):
    p = tmp_path / "aliases.jsonl"
    p.write_text('{"name": "sq", "qualified": "rajpurkar/squad"}\n')
    table = load_alias_table(p)
    d = Dumps(datasets=[{"id": "rajpurkar/squad", "license_tags": []}],
              models=[{"id": "o/m", "license_tags": [], "dataset_tags": ["sq"]}])
    assert len(_ingest(d, alias_table=table).graph.stage_edges(Stage.DATASET_TO_MODEL)) == 1


def test_licenses_normalized_or_unknown():
    d = Dumps(
        datasets=[{"id": "o/d", "license_tags": ["license:apache-2.0", "other"]}],
        models=[{"id": "o/m", "license_tags": [], "dataset_tags": []}],
        repos=[_repo("gh/r", ["MIT OR GPL-2.0+", "Apache-2.0 WITH LLVM-exception"], [])],
    )
    g = _ingest(d).graph
    assert g.node(NodeKind.DATASET, "o/d").license_ids == ("Apache-2.0", "UNKNOWN:other")
    model = g.node(NodeKind.MODEL, "o/m")
    assert len(model.license_ids) == 1 and is_unknown(model.license_ids[0])
    assert g.node(NodeKind.REPOSITORY, "gh/r").license_ids == ("Apache-2.0", "GPL-2.0-or-later", "MIT")
    for node in g.all_nodes():
        for lid in node.license_ids:
            assert is_unknown(lid) or lid in ("Apache-2.0", "GPL-2.0-or-later", "MIT")


def test_unparseable_spdx_kept_as_unknown():
    g = _ingest(Dumps(repos=[_repo("gh/r", ["MIT AND ("], [])])).graph
    assert g.node(NodeKind.REPOSITORY, "gh/r").license_ids == ("UNKNOWN:MIT AND (",)


def test_terms_preserved_flag_from_repo_record():
    rec = _repo("gh/r", ["MIT"], ["o/m"])
    rec["terms_preserved"] = True
    d = Dumps(models=[{"id": "o/m", "license_tags": ["openrail-m"], "dataset_tags": []}], repos=[rec])
    (edge,) = _ingest(d).graph.stage_edges(Stage.MODEL_TO_REPOSITORY)
    assert edge.terms_preserved


def test_duplicate_edges_dedup():
    d = Dumps(datasets=[{"id": "o/d", "license_tags": ["mit"]}],
              models=[{"id": "o/m", "license_tags": ["mit"], "dataset_tags": ["o/d", "o/d", "d"]}])
    edges = _ingest(d).graph.stage_edges(Stage.DATASET_TO_MODEL)
    assert len(edges) == 1
    assert edges[0].evidence == ("tag:d", "tag:o/d")


def test_min_likes_filter():
    d = Dumps(datasets=[{"id": "o/d", "license_tags": ["mit"]}],
              models=[{"id": "o/popular", "license_tags": ["mit"], "dataset_tags": ["o/d"], "likes": 21},
                      {"id": "o/niche", "license_tags": ["mit"], "dataset_tags": ["o/d"], "likes": 20}],
              repos=[_repo("gh/r", ["MIT"], ["o/popular", "o/niche"])])
    off = _ingest(d)
    assert len(off.graph.nodes[NodeKind.MODEL]) == 2
    on = _ingest(d, min_likes=20)
    assert list(on.graph.nodes[NodeKind.MODEL]) == ["o/popular"]
    assert [q["reason"] for q in on.quarantine] == ["filtered_model"]
    assert on.stats["filtered_models"] == 1


@pytest.mark.parametrize(
    "dumps, where",
    [
        (Dumps(datasets=[{"license_tags": []}]), "dataset record 1"),
        (Dumps(models=[{"id": "a/b"}, {"id": "c/d", "license_tags": "mit"}]), "model record 2"),
        (Dumps(repos=[{"id": "r", "detected_licenses": [{"source_file": "x"}]}]), "repo record 1"),
        (Dumps(models=[{"id": "a/b", "likes": -1}]), "model record 1"),
        (Dumps(datasets=["not an object"]), "dataset record 1"),
    ],
)
def test_schema_errors_carry_record_number(dumps, where):
    with pytest.raises(SchemaError) as err:
        _ingest(dumps)
    assert err.value.location == where


def test_read_jsonl_reports_line(tmp_path):
    p = tmp_path / "m.jsonl"
    p.write_text('{"id": "a/b"}\n\n{broken\n')
    with pytest.raises(SchemaError) as err:
        list(read_jsonl(p, "models"))
    assert err.value.location == "models record 3"


def test_closure_adds_dataset_repo_edges():
    g = close_dataset_to_repo(_ingest(minimal_dumps()).graph)
    (edge,) = g.stage_edges(Stage.DATASET_TO_REPOSITORY)
    assert (edge.source, edge.target) == ("demo-org/tiny-corpus", "github.com/demo-org/tiny-app")
    assert edge.evidence == ("demo-org/tiny-model",)


def test_closure_dedups_over_models():
    d = Dumps(datasets=[{"id": "o/d", "license_tags": ["mit"]}],
              models=[{"id": "o/m1", "license_tags": ["mit"], "dataset_tags": ["o/d"]},
                      {"id": "o/m2", "license_tags": ["mit"], "dataset_tags": ["o/d"]}],
              repos=[_repo("gh/r", ["MIT"], ["o/m1", "o/m2"])])
    (edge,) = close_dataset_to_repo(_ingest(d).graph).stage_edges(Stage.DATASET_TO_REPOSITORY)
    assert set(edge.evidence) == {"o/m1", "o/m2"}


def test_closure_without_repos_adds_nothing():
    d = Dumps(datasets=[{"id": "o/d", "license_tags": ["mit"]}],
              models=[{"id": "o/m", "license_tags": ["mit"], "dataset_tags": ["o/d"]}])
    assert close_dataset_to_repo(_ingest(d).graph).stage_edges(Stage.DATASET_TO_REPOSITORY) == ()


def test_closure_terms_preserved_is_conjunction():
    keep = _repo("gh/r", ["MIT"], ["o/m1"])
    keep["terms_preserved"] = True
    other = _repo("gh/r", ["MIT"], ["o/m2"])
    d = Dumps(datasets=[{"id": "o/d", "license_tags": ["openrail-m"]}],
              models=[{"id": "o/m1", "license_tags": ["openrail-m"], "dataset_tags": ["o/d"]},
                      {"id": "o/m2", "license_tags": ["openrail-m"], "dataset_tags": ["o/d"]}],
              repos=[keep, other])
    (edge,) = close_dataset_to_repo(_ingest(d).graph).stage_edges(Stage.DATASET_TO_REPOSITORY)
    assert edge.terms_preserved is False


def test_closure_bound_and_evidence():
    g = close_dataset_to_repo(_ingest(stage_pattern_dumps("dataset-repo")).graph)
    closure = g.stage_edges(Stage.DATASET_TO_REPOSITORY)
    assert len(closure) <= len(g.nodes[NodeKind.DATASET]) * len(g.nodes[NodeKind.REPOSITORY])
    assert all(e.evidence for e in closure)


def test_graph_rejects_dangling_edges():
    with pytest.raises(SchemaError):
        LineageGraph.build([], [LineageEdge("a", "b", Stage.DATASET_TO_MODEL)])


def test_ingestion_order_independent():
    base = stage_pattern_dumps("dataset-model")
    a = _ingest(base).graph
    b = _ingest(base.shuffled(7)).graph
    assert a == b


def test_save_load_round_trip(tmp_path):
    g = close_dataset_to_repo(_ingest(minimal_dumps()).graph)
    save_graph(g, tmp_path / "g")
    again = load_graph(tmp_path / "g")
    assert again.nodes == g.nodes and again.edges == g.edges
    for line in (tmp_path / "g" / "edges.jsonl").read_text().splitlines():
        obj = json.loads(line)
        assert list(obj) == sorted(obj)


def test_save_is_byte_stable_under_shuffle(tmp_path):
    base = stage_pattern_dumps("model-repo")
    save_graph(_ingest(base).graph, tmp_path / "a")
    save_graph(_ingest(base.shuffled(3)).graph, tmp_path / "b")
    for name in ("nodes-dataset.jsonl", "nodes-model.jsonl", "nodes-repository.jsonl", "edges.jsonl"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_load_graph_errors(tmp_path):
    with pytest.raises(SchemaError):
        load_graph(tmp_path)
    (tmp_path / "edges.jsonl").write_text('{"from": "x", "to": "y", "stage": "dataset-model"}\n')
    with pytest.raises(SchemaError):
        load_graph(tmp_path)


def test_ingest_files(tmp_path):
    minimal_dumps().write(tmp_path)
    result = ingest_files(tmp_path / "datasets.jsonl", tmp_path / "models.jsonl", tmp_path / "repos.jsonl")
    assert result.stats["edges"]["dataset-model"] == 1


def test_stage_parse():
    assert Stage.parse("model-repo") is Stage.MODEL_TO_REPOSITORY
    assert Stage.parse("D-R") is Stage.DATASET_TO_REPOSITORY
    assert Stage.parse("dataset_model") is Stage.DATASET_TO_MODEL
    with pytest.raises(ValueError):
        Stage.parse("model-dataset")
