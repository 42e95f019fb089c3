import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from methlib import store
from methlib.cli import main
from methlib.service import create_app


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def lib_file(seed_lib, tmp_path):
    path = tmp_path / "lib.json"
    store.save(seed_lib, path)
    return str(path)


@pytest.fixture()
def batch_file(seed_batch, tmp_path):
    path = tmp_path / "batch.json"
    path.write_text(json.dumps(seed_batch))
    return str(path)


class TestValidate:
    def test_clean_file(self, runner, lib_file):
        result = runner.invoke(main, ["validate", lib_file])
        assert result.exit_code == 0
        assert result.output.splitlines()[0] == "0 violations"

    def test_violations_exit_two(self, runner, seed_lib, lib_file, tmp_path):
        doc = json.loads(store.dumps(seed_lib))
        rid = next(iter(doc["relations"]))
        doc["relations"][rid]["to"] = "ghost"
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        result = runner.invoke(main, ["validate", str(bad)])
        assert result.exit_code == 2
        assert "1 violations" in result.output

    def test_malformed_json_exit_two(self, runner, tmp_path):
        bad = tmp_path / "garbage.json"
        bad.write_text("{ nope")
        result = runner.invoke(main, ["validate", str(bad)])
        assert result.exit_code == 2
        assert "error [malformed_file]" in result.output


class TestQuery:
    def test_text_output(self, runner, lib_file):
        result = runner.invoke(main, ["query", lib_file, "kind = Principle"])
        assert result.exit_code == 0
        names = [line.split("\t")[0] for line in result.output.splitlines()]
        assert names == ["functional decomposition", "infrastructural approach"]

    def test_structured_matches_api(self, runner, lib_file, seed_lib):
        result = runner.invoke(
            main, ["query", lib_file, "kind = Principle", "--format", "structured"]
        )
        api = TestClient(create_app(lib=seed_lib)).get(
            "/components", params={"query": "kind = Principle"}
        )
        assert json.loads(result.output) == api.json()

    def test_syntax_error_exit_one(self, runner, lib_file):
        result = runner.invoke(main, ["query", lib_file, "kind ="])
        assert result.exit_code == 1
        assert "error [syntax_error]" in result.output


class TestRecommend:
    def test_structured_matches_api(self, runner, lib_file, seed_lib):
        result = runner.invoke(
            main,
            [
                "recommend",
                lib_file,
                "--factor",
                "data_complexity=high",
                "--format",
                "structured",
            ],
        )
        assert result.exit_code == 0
        api = TestClient(create_app(lib=seed_lib)).post(
            "/recommend", json={"situation": {"data_complexity": "high"}}
        )
        assert json.loads(result.output) == api.json()

    def test_selected_flag(self, runner, lib_file, seed_lib):
        participatory = next(
            c for c in seed_lib.components.values() if c.name == "participatory approach"
        )
        result = runner.invoke(
            main,
            ["recommend", lib_file, "--selected", participatory.id, "--format", "structured"],
        )
        rows = json.loads(result.output)
        assert any("h2" in r["firing"] for r in rows)

    def test_bad_factor_flag(self, runner, lib_file):
        result = runner.invoke(main, ["recommend", lib_file, "--factor", "nonsense"])
        assert result.exit_code == 1

    def test_unknown_factor(self, runner, lib_file):
        result = runner.invoke(main, ["recommend", lib_file, "--factor", "ghost=x"])
        assert result.exit_code == 1
        assert "error [unknown_factor]" in result.output


class TestImportAndScreen:
    def test_import_into_empty_library(self, runner, batch_file, tmp_path, seed_manifest):
        from methlib.model import Library

        target = tmp_path / "fresh.json"
        store.save(Library(), target)
        result = runner.invoke(main, ["import", str(target), batch_file])
        assert result.exit_code == 0
        assert "created 22 record(s)" in result.output
        lib, violations = store.load(target)
        assert violations == []
        assert len(lib.components) == seed_manifest["components"]

    def test_reimport_warns(self, runner, lib_file, batch_file):
        result = runner.invoke(main, ["import", lib_file, batch_file])
        assert result.exit_code == 0
        assert "warning: draft" in result.output

    def test_screen_records_verdict(self, runner, lib_file):
        lib, _ = store.load(lib_file)
        from methlib.ingest import add_document

        did = add_document(lib, "field notes", "other", "team 2026")
        store.save(lib, lib_file)
        result = runner.invoke(
            main,
            ["screen", lib_file, did, "--structured", "--novel", "--in-domain", "--reusable"],
        )
        assert result.exit_code == 0
        assert result.output.strip() == f"{did}: accept"
        lib, _ = store.load(lib_file)
        assert lib.documents[did].screening.decision == "accept"

    def test_screen_unknown_doc(self, runner, lib_file):
        result = runner.invoke(main, ["screen", lib_file, "ghost", "--structured"])
        assert result.exit_code == 1


class TestStatsAndDot:
    def test_stats(self, runner, lib_file, seed_manifest):
        result = runner.invoke(main, ["stats", lib_file, "--format", "structured"])
        counts = json.loads(result.output)
        assert counts["components"] == seed_manifest["components"]
        assert counts["relations"] == seed_manifest["relations"]

    def test_export_dot(self, runner, lib_file, seed_manifest):
        result = runner.invoke(main, ["export-dot", lib_file])
        assert result.exit_code == 0
        assert result.output.startswith("digraph")
        assert result.output.count("->") == seed_manifest["dot_edges"]

    def test_export_dot_unknown_session(self, runner, lib_file):
        result = runner.invoke(main, ["export-dot", lib_file, "--session", "ghost"])
        assert result.exit_code == 1
