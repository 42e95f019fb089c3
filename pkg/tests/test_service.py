import json

import pytest
from fastapi.testclient import TestClient

from methlib import heuristics, store
from methlib.model import Situation
from methlib.navigate import mark, report, start_session
from methlib.service import create_app

from conftest import by_name


@pytest.fixture()
def client(seed_lib):
    return TestClient(create_app(lib=seed_lib))


@pytest.fixture()
def disk_client(seed_lib, tmp_path):
    path = tmp_path / "lib.json"
    store.save(seed_lib, path)
    return TestClient(create_app(lib_path=path)), path


class TestComponents:
    def test_list_with_query(self, client, seed_lib):
        res = client.get("/components", params={"query": "kind = Principle"})
        assert res.status_code == 200
        assert [c["name"] for c in res.json()] == [
            "functional decomposition",
            "infrastructural approach",
        ]

    def test_default_query_is_all(self, client, seed_lib):
        assert len(client.get("/components").json()) == len(seed_lib.components)

    def test_bad_query_is_400(self, client):
        res = client.get("/components", params={"query": "kind ="})
        assert res.status_code == 400
        assert res.json()["code"] == "syntax_error"

    def test_get_unknown_component_404(self, client):
        res = client.get("/components/ghost")
        assert res.status_code == 404
        assert res.json()["code"] == "unknown_id"

    def test_create_component(self, client, seed_lib):
        res = client.post(
            "/components",
            json={"kind": "Tool", "name": "state machine editor"},
        )
        assert res.status_code == 201
        cid = res.json()["id"]
        assert seed_lib.components[cid].name == "state machine editor"

    def test_create_relation_conflicts(self, client, seed_lib):
        fbm = by_name(seed_lib, "foundation business model")
        job = by_name(seed_lib, "job model")
        payload = {"from": fbm.id, "to": job.id, "label": "contains"}
        assert client.post("/relations", json=payload).status_code == 409
        assert (
            client.post(
                "/relations", json={"from": fbm.id, "to": fbm.id, "label": "uses"}
            ).status_code
            == 400
        )

    def test_neighbors(self, client, seed_lib):
        fbm = by_name(seed_lib, "foundation business model")
        rows = client.get(f"/network/{fbm.id}/neighbors", params={"direction": "out"}).json()
        assert [r["component"]["name"] for r in rows] == [
            "interaction model",
            "job model",
            "object model",
        ]
        assert all(r["direction"] == "out" for r in rows)


class TestRecommend:
    def test_matches_engine(self, client, seed_lib):
        res = client.post(
            "/recommend", json={"situation": {"data_complexity": "high"}}
        )
        assert res.status_code == 200
        fd = seed_lib.resolve_factor("data_complexity")
        ctx = heuristics.TruthContext(
            situation=Situation({fd.id: "high"}), selection=set()
        )
        expected = [
            {
                "component_id": r.component_id,
                "component_name": r.component_name,
                "firing": list(r.firing),
                "recommends": r.recommends,
                "discourages": r.discourages,
                "discouraged_only": r.discouraged_only,
            }
            for r in heuristics.recommend(seed_lib, ctx)
        ]
        assert res.json() == expected

    def test_unknown_factor_400(self, client):
        res = client.post("/recommend", json={"situation": {"ghost": "x"}})
        assert res.status_code == 400


class TestSessions:
    def test_session_lifecycle_matches_engine(self, client, seed_lib):
        sid = client.post("/sessions", json={}).json()["id"]
        participatory = by_name(seed_lib, "participatory approach")
        skillful = by_name(seed_lib, "socially skillful team")

        res = client.post(f"/sessions/{sid}/mark", json={"component": participatory.id})
        assert res.json() == {"changed": True, "marked": [participatory.id]}
        res = client.post(f"/sessions/{sid}/mark", json={"component": participatory.id})
        assert res.json()["changed"] is False

        rep = client.get(f"/sessions/{sid}/report").json()
        fired = {f["heuristic_id"]: f["component_id"] for f in rep["firing_heuristics"]}
        assert fired.get("h2") == skillful.id

        # the same sequence against the engine directly gives the same report
        twin = start_session(seed_lib)
        mark(seed_lib, twin, participatory.id)
        engine_rep = report(seed_lib, twin)
        assert [r.id for r in engine_rep.induced_relations] == [
            r["id"] for r in rep["induced_relations"]
        ]
        assert [(f.heuristic_id, f.component_id) for f in engine_rep.firing_heuristics] == [
            (f["heuristic_id"], f["component_id"]) for f in rep["firing_heuristics"]
        ]

    def test_unmark_noop_warns(self, client, seed_lib):
        sid = client.post("/sessions", json={}).json()["id"]
        cid = next(iter(seed_lib.components))
        res = client.post(f"/sessions/{sid}/unmark", json={"component": cid})
        assert res.json()["changed"] is False and res.json()["warning"]

    def test_patch_situation(self, client):
        sid = client.post("/sessions", json={}).json()["id"]
        res = client.patch(
            f"/sessions/{sid}/situation",
            json={"assignments": {"data_complexity": "high"}},
        )
        assert res.json()["situation"] == {"data_complexity": "high"}
        res = client.patch(
            f"/sessions/{sid}/situation",
            json={"assignments": {"data_complexity": None}},
        )
        assert res.json()["situation"] == {}

    def test_out_of_domain_value_400(self, client):
        sid = client.post("/sessions", json={}).json()["id"]
        res = client.patch(
            f"/sessions/{sid}/situation",
            json={"assignments": {"data_complexity": "purple"}},
        )
        assert res.status_code == 400

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/ghost").status_code == 404


class TestWalk:
    def test_tree_walk(self, client, seed_lib):
        sid = client.post("/sessions", json={}).json()["id"]
        tid = client.get("/trees").json()[0]["id"]
        state = client.get(f"/sessions/{sid}/walk/{tid}").json()
        assert state["done"] is False
        assert state["question"]["factor"] == "data_complexity"

        state = client.post(
            f"/sessions/{sid}/walk/{tid}/answer", json={"value": "high"}
        ).json()
        tool = by_name(seed_lib, "natural language modeling technique")
        assert state["done"] is True and state["premarked"] == [tool.id]

        session = client.get(f"/sessions/{sid}").json()
        assert session["situation"] == {"data_complexity": "high"}
        assert session["premarked"] == [tool.id]

    def test_bad_answer_400(self, client):
        sid = client.post("/sessions", json={}).json()["id"]
        tid = client.get("/trees").json()[0]["id"]
        # "low" takes the default branch; stepping again past the leaf fails
        client.post(f"/sessions/{sid}/walk/{tid}/answer", json={"value": "low"})
        res = client.post(f"/sessions/{sid}/walk/{tid}/answer", json={"value": "low"})
        assert res.status_code == 400


class TestIngestAndFeedback:
    def test_screening_endpoint(self, client, seed_lib):
        res = client.post(
            "/ingest/screenings",
            json={
                "document": {"title": "workshop notes", "kind": "other", "citation": "ours"},
                "answers": {
                    "structured": True,
                    "novel": True,
                    "in_domain": True,
                    "reusable": False,
                },
            },
        )
        assert res.status_code == 201
        assert res.json()["decision"] == "reject"
        assert res.json()["document_id"] in seed_lib.documents

    def test_batch_endpoint_duplicate_warnings(self, client, seed_batch):
        res = client.post("/ingest/batches", json=seed_batch)
        assert res.status_code == 201
        body = res.json()
        batch_names = {c["name"] for c in seed_batch["components"]}
        assert {w["draft"] for w in body["duplicate_warnings"]} >= batch_names

    def test_feedback_roundtrip(self, client, seed_lib):
        cid = by_name(seed_lib, "job model").id
        assert (
            client.post(
                "/feedback", json={"component": cid, "verdict": "useful", "note": "ok"}
            ).status_code
            == 201
        )
        summary = client.get(f"/feedback/{cid}/summary").json()
        assert summary["counts"]["useful"] == 1


class TestSchemaAndExport:
    def test_factors_and_properties(self, client, seed_manifest):
        factors = client.get("/factors").json()
        props = client.get("/properties").json()
        assert len(factors) == seed_manifest["situational_factors"]
        assert len(props) == seed_manifest["property_definitions"]
        assert {"id", "slug", "name", "values", "description"} <= set(factors[0])

    def test_dot_export(self, client, seed_manifest):
        res = client.get("/export/dot")
        assert res.status_code == 200
        assert res.text.startswith("digraph")
        assert res.text.count("->") == seed_manifest["dot_edges"]


class TestWriteThrough:
    def test_reload_reflects_mutations(self, disk_client):
        client, path = disk_client
        before = path.read_bytes()
        cid = client.post(
            "/components", json={"kind": "Tool", "name": "fresh tool"}
        ).json()["id"]
        after = path.read_bytes()
        assert after != before
        lib, violations = store.load(path)
        assert violations == []
        assert lib.components[cid].name == "fresh tool"
        # the on-disk file stays canonical
        assert store.dumps(lib) == after

    def test_sessions_persisted(self, disk_client):
        client, path = disk_client
        sid = client.post("/sessions", json={}).json()["id"]
        doc = json.loads(path.read_bytes())
        assert sid in doc["sessions"]
