import csv
import json
from importlib import resources

import jsonschema
import pytest
from conftest import DATA, FIXTURES

from licenserec.cli import main
from licenserec.fixtures import minimal_dumps


def _schema(name):
    ref = resources.files("licenserec") / "data" / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text(encoding="utf-8"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, schema, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    doc = json.loads(out)
    jsonschema.validate(doc, _schema(schema))
    return code, doc


@pytest.fixture()
def minimal_graph(tmp_path, capsys):
    minimal_dumps().write(tmp_path / "dumps")
    d = tmp_path / "dumps"
    code, _ = run_json(capsys, "ingest", "ingest", "--datasets", str(d / "datasets.jsonl"),
                       "--models", str(d / "models.jsonl"), "--repos", str(d / "repos.jsonl"),
                       "--out", str(tmp_path / "graph"))
    assert code == 0
    return tmp_path / "graph"


def test_check_incompatible_exits_1(capsys):
    code, out, _ = run(capsys, "check", "--upstream", "CC-BY-NC-4.0", "--downstream", "MIT")
    assert code == 1 and out.startswith("Incompatible")


def test_check_compatible_exits_0(capsys):
    code, doc = run_json(capsys, "check", "check", "--upstream", "MIT", "--downstream", "MIT")
    assert code == 0 and doc["verdict"]["kind"] == "Compatible"


def test_check_terms_preserved(capsys):
    assert run(capsys, "check", "--upstream", "OpenRAIL-M", "--downstream", "MIT")[0] == 1
    assert run(capsys, "check", "--upstream", "OpenRAIL-M", "--downstream", "MIT", "--terms-preserved")[0] == 0


def test_check_unknown_is_not_a_violation(capsys):
    code, doc = run_json(capsys, "check", "check", "--upstream", "LicenseRef-mine", "--downstream", "MIT")
    assert code == 0 and doc["verdict"]["kind"] == "Unknown"


def test_bad_expression_is_usage_error(capsys):
    code, _, err = run(capsys, "check", "--upstream", "MIT AND (", "--downstream", "MIT")
    assert code == 2 and "bad license expression" in err


def test_unknown_flag_is_usage_error(capsys):
    code, _, err = run(capsys, "check", "--upstream", "MIT", "--downstream", "MIT", "--bogus")
    assert code == 2 and "usage" in err
    assert run(capsys)[0] == 2
    assert run(capsys, "audit", "x", "--stage", "sideways")[0] == 2


def test_recommend(capsys):
    code, doc = run_json(capsys, "recommend", "recommend", "--upstream", "CC-BY-NC-4.0,MIT")
    assert code == 0 and doc["resolvable"]
    assert set(doc["categories"]) <= {"NC", "NC_SA", "NC_ND"}
    code, doc = run_json(capsys, "recommend", "recommend", "--upstream", "CC-BY-NC-4.0,GPL-3.0-only")
    assert code == 0 and doc["resolvable"] is False and doc["categories"] == {}


def test_recommend_expression_leaves_and_whitelist(capsys, tmp_path):
    wl = tmp_path / "wl.txt"
    wl.write_text("GPL-3.0-only\nAGPL-3.0-only\nMIT\n")
    code, doc = run_json(capsys, "recommend", "recommend", "--upstream", "MIT AND GPL-2.0-or-later",
                         "--whitelist", str(wl))
    assert doc["upstream"] == ["GPL-2.0-or-later", "MIT"]
    assert set(doc["categories"]) == {"COPYLEFT"}


def test_ingest_outputs(minimal_graph):
    names = sorted(p.name for p in minimal_graph.iterdir())
    assert names == ["edges.jsonl", "ingest-stats.json", "nodes-dataset.jsonl", "nodes-model.jsonl",
                     "nodes-repository.jsonl", "quarantine.jsonl"]
    stats = json.loads((minimal_graph / "ingest-stats.json").read_text())
    assert stats["edges"] == {"dataset-model": 1, "model-repo": 1, "dataset-repo": 1}


def test_ingest_missing_file_is_data_error(capsys, tmp_path):
    code, _, err = run(capsys, "ingest", "--datasets", str(tmp_path / "nope.jsonl"), "--models", "x",
                       "--repos", "y", "--out", str(tmp_path / "g"))
    assert code == 3


def test_ingest_schema_error(capsys, tmp_path):
    for name in ("datasets", "models", "repos"):
        (tmp_path / f"{name}.jsonl").write_text("")
    (tmp_path / "models.jsonl").write_text('{"license_tags": []}\n')
    code, _, err = run(capsys, "ingest", "--datasets", str(tmp_path / "datasets.jsonl"),
                       "--models", str(tmp_path / "models.jsonl"), "--repos", str(tmp_path / "repos.jsonl"),
                       "--out", str(tmp_path / "g"))
    assert code == 3 and "model record 1" in err


def test_audit_minimal(capsys, minimal_graph, tmp_path):
    out = tmp_path / "audit.json"
    code, doc = run_json(capsys, "audit", "audit", str(minimal_graph), "--stage", "dataset-model",
                         "--fixability", "--out", str(out))
    assert code == 1
    assert doc == json.loads(out.read_text())
    assert doc["violations"] == 1 and doc["fixability"]["fixable"] == 1


def test_audit_compliant_exits_0(capsys, minimal_graph):
    code, doc = run_json(capsys, "audit", "audit", str(minimal_graph), "--stage", "model-repo")
    assert code == 0 and doc["violations"] == 0


def test_audit_model_repo_fixture(capsys):
    code, doc = run_json(capsys, "audit", "audit", str(FIXTURES / "table3_mr"), "--stage", "model-repo")
    assert code == 1 and doc["violation_rate"] == 0.355


def test_audit_other_matrix(capsys):
    code, doc = run_json(capsys, "audit", "audit", str(FIXTURES / "table3_mr"), "--stage", "mr",
                         "--matrix", "eu-jla-style")
    assert doc["matrix"] == "eu-jla-style" and doc["violations"] < 4189


def test_audit_missing_graph(capsys, tmp_path):
    assert run(capsys, "audit", str(tmp_path), "--stage", "model-repo")[0] == 3


def test_unknown_matrix_is_usage_error(capsys, minimal_graph):
    assert run(capsys, "audit", str(minimal_graph), "--stage", "dm", "--matrix", "nope")[0] == 2


def test_scan(capsys):
    corpus = DATA / "usage_corpus"
    code, doc = run_json(capsys, "scan", "scan", str(corpus), "--models", str(corpus / "models.txt"))
    assert code == 0 and len(doc["matches"]) == 18


def test_scan_model_list_formats(capsys, tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    (src / "a.py").write_text('from transformers import AutoModel\nAutoModel.from_pretrained("org/model")\n')
    arr = tmp_path / "m.json"
    arr.write_text('["org/model"]')
    recs = tmp_path / "m.jsonl"
    recs.write_text('{"id": "org/model", "license_tags": []}\n')
    for models in (arr, recs):
        assert len(run_json(capsys, "scan", "scan", str(src), "--models", str(models))[1]["matches"]) == 1


def test_scan_not_a_directory(capsys, tmp_path):
    (tmp_path / "m.txt").write_text("org/model\n")
    assert run(capsys, "scan", str(tmp_path / "missing"), "--models", str(tmp_path / "m.txt"))[0] == 2


def test_report(capsys, minimal_graph, tmp_path):
    sankey, patterns = tmp_path / "s.csv", tmp_path / "p.json"
    code, doc = run_json(capsys, "report", "report", str(minimal_graph), "--sankey", str(sankey),
                         "--patterns", str(patterns), "--compare", "licenserec-default,eu-jla-style",
                         "--distribution")
    assert code == 0
    jsonschema.validate(json.loads(patterns.read_text()), _schema("patterns"))
    with open(sankey, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows == [["source_category", "target_category", "count"], ["PERMISSIVE", "PERMISSIVE", "1"]]
    assert doc["compare"]["matrices"]["licenserec-default"]["dataset-model"] == 100.0
    assert doc["distribution"]["repository"]["total"] == 1


def test_report_text(capsys):
    code, out, _ = run(capsys, "report", str(FIXTURES / "table3_dm"), "--stage", "dataset-model")
    assert code == 0 and "SA → P" in out and "37.4%" in out


def test_validate_default(capsys):
    code, doc = run_json(capsys, "validate", "validate")
    assert code == 0 and doc["ok"]
    code, out, _ = run(capsys, "validate")
    assert all(line.startswith("PASS") for line in out.splitlines())


def test_validate_all_bundled_matrices_reports_failures(capsys):
    code, doc = run_json(capsys, "validate", "validate", "--matrix", "licenserec-default",
                         "--matrix", "eu-jla-style")
    failed = [c["name"] for c in doc["checks"] if not c["passed"]]
    assert code == 3 and failed == ["matrix[eu-jla-style].ml_row"]


def test_validate_missing_category_pair(capsys, tmp_path):
    src = resources.files("licenserec") / "data" / "matrices" / "licenserec-default.json"
    data = json.loads(src.read_text())
    del data["category_defaults"]["ML_LICENSE"]["PERMISSIVE"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(capsys, "validate", "--matrix", str(bad))
    assert code == 3
    assert "FAIL" in out and "MissingCategoryPair" in out


def test_validate_catalog_coherence(capsys, tmp_path):
    src = resources.files("licenserec") / "data" / "catalog.json"
    data = json.loads(src.read_text())
    for e in data:
        if e["id"] == "CC-BY-NC-4.0":
            e["profile"]["commercial_use"] = "Permission"
    bad = tmp_path / "catalog.json"
    bad.write_text(json.dumps(data))
    code, doc = run_json(capsys, "validate", "validate", "--catalog", str(bad))
    assert code == 3
    (check,) = [c for c in doc["checks"] if c["name"] == "catalog.coherence"]
    assert not check["passed"] and "CC-BY-NC-4.0" in check["detail"]


def test_data_dir_env_override(capsys, tmp_path, monkeypatch):
    src = resources.files("licenserec") / "data" / "matrices" / "licenserec-default.json"
    data = json.loads(src.read_text())
    data["category_defaults"]["NC"]["PERMISSIVE"] = "Compatible"
    data["explicit"] = []
    (tmp_path / "matrices").mkdir()
    (tmp_path / "matrices" / "licenserec-default.json").write_text(json.dumps(data))
    monkeypatch.setenv("LICENSEREC_DATA_DIR", str(tmp_path))
    assert run(capsys, "check", "--upstream", "CC-BY-NC-4.0", "--downstream", "MIT")[0] == 0
    monkeypatch.delenv("LICENSEREC_DATA_DIR")
    assert run(capsys, "--data-dir", str(tmp_path), "check", "--upstream", "CC-BY-NC-4.0",
               "--downstream", "MIT")[0] == 0
    assert run(capsys, "check", "--upstream", "CC-BY-NC-4.0", "--downstream", "MIT")[0] == 1


def test_missing_data_dir(capsys, tmp_path):
    assert run(capsys, "--data-dir", str(tmp_path / "none"), "validate")[0] == 2


def test_version(capsys):
    assert run(capsys, "--version")[0] == 0
