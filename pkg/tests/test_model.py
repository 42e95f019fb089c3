import random

import pytest

from methlib import errors
from methlib.model import (
    ComponentKind,
    Library,
    Situation,
    add_component,
    add_factor_definition,
    add_property_definition,
    add_relation,
    build_network,
    check_situation,
    delete_component,
    validate,
)

from conftest import by_name
from generators import random_library


class TestAddComponent:
    def test_seed_principle_retrievable_by_name(self, seed_lib):
        comp = by_name(seed_lib, "infrastructural approach")
        assert comp.kind is ComponentKind.PRINCIPLE
        assert comp.description.startswith("Shared infrastructure rules")

    def test_empty_name_rejected(self):
        lib = Library()
        with pytest.raises(errors.EmptyNameError):
            add_component(lib, ComponentKind.PRODUCT, "")
        with pytest.raises(errors.EmptyNameError):
            add_component(lib, ComponentKind.PRODUCT, "   ")

    def test_hundred_drafts_match_reference_store(self):
        lib = Library()
        reference = []  # brute-force list-append store
        for i in range(100):
            name = f"draft {i}"
            cid = add_component(lib, ComponentKind.TOOL, name)
            reference.append((cid, name))
        ids = [cid for cid, _ in reference]
        assert len(set(ids)) == 100
        assert len(lib.components) == 100
        for cid, name in reference:
            assert lib.components[cid].name == name

    def test_unknown_property_rejected(self):
        lib = Library()
        with pytest.raises(errors.UnknownPropertyError):
            add_component(lib, ComponentKind.TOOL, "x", properties={"nope": ["a"]})

    def test_value_outside_domain_rejected(self):
        lib = Library()
        pid = add_property_definition(lib, "aspect", ["what", "how"])
        with pytest.raises(errors.OutOfDomainError):
            add_component(lib, ComponentKind.TOOL, "x", properties={pid: ["when"]})

    def test_multi_valued_assignment_allowed(self):
        lib = Library()
        pid = add_property_definition(lib, "aspect", ["what", "how"])
        cid = add_component(
            lib, ComponentKind.TOOL, "x", properties={pid: ["what", "how"]}
        )
        assert lib.components[cid].properties[pid] == ["what", "how"]


class TestAddRelation:
    def test_contains_relation(self, seed_lib):
        fbm = by_name(seed_lib, "foundation business model")
        job = by_name(seed_lib, "job model")
        rels = [
            r
            for r in seed_lib.relations.values()
            if (r.from_id, r.to_id, r.label) == (fbm.id, job.id, "contains")
        ]
        assert len(rels) == 1

    def test_self_loop_rejected(self, seed_lib):
        cid = next(iter(seed_lib.components))
        with pytest.raises(errors.SelfLoopError):
            add_relation(seed_lib, cid, cid, "uses")

    def test_duplicate_triple_rejected(self, seed_lib):
        rel = next(iter(seed_lib.relations.values()))
        with pytest.raises(errors.DuplicateRelationError):
            add_relation(seed_lib, rel.from_id, rel.to_id, rel.label)
        # a different label on the same endpoints is fine
        add_relation(seed_lib, rel.from_id, rel.to_id, rel.label + "-again")

    def test_dangling_endpoint_rejected(self, seed_lib):
        cid = next(iter(seed_lib.components))
        with pytest.raises(errors.UnknownIdError):
            add_relation(seed_lib, cid, "ghost", "uses")


class TestValidate:
    def test_seed_fixture_consistent(self, seed_lib):
        assert validate(seed_lib) == []

    def test_empty_library_consistent(self):
        assert validate(Library()) == []

    def test_dangling_endpoint_detected(self, seed_lib):
        # bypass the API, then check against an exhaustive reference scan
        victim = by_name(seed_lib, "object model")
        del seed_lib.components[victim.id]
        violations = validate(seed_lib)
        expected = sum(
            1
            for r in seed_lib.relations.values()
            for end in (r.from_id, r.to_id)
            if end not in seed_lib.components
        )
        dangling = [v for v in violations if v.code == "dangling_endpoint"]
        assert expected == 1
        assert len(dangling) == 1

    def test_integrity_preserved_under_random_mutations(self):
        rng = random.Random(7)
        lib = Library()
        add_factor_definition(lib, "f", ["a", "b"])
        for step in range(200):
            op = rng.random()
            try:
                if op < 0.5 or len(lib.components) < 2:
                    add_component(lib, rng.choice(list(ComponentKind)), f"c{step}")
                elif op < 0.8:
                    a, b = rng.sample(list(lib.components), 2)
                    add_relation(lib, a, b, rng.choice(["x", "y"]))
                else:
                    delete_component(lib, rng.choice(list(lib.components)), force=True)
            except errors.MethLibError:
                pass
        assert validate(lib) == []


class TestDelete:
    def test_delete_blocked_without_force(self, seed_lib):
        fbm = by_name(seed_lib, "foundation business model")
        with pytest.raises(errors.DeleteBlockedError):
            delete_component(seed_lib, fbm.id)

    def test_force_cascades(self, seed_lib):
        fbm = by_name(seed_lib, "foundation business model")
        delete_component(seed_lib, fbm.id, force=True)
        assert validate(seed_lib) == []
        assert all(
            fbm.id not in (r.from_id, r.to_id) for r in seed_lib.relations.values()
        )


class TestNetwork:
    def test_seed_network_shape(self, seed_lib, seed_manifest):
        net = build_network(seed_lib)
        assert len(net.nodes) == seed_manifest["components"]
        total_out = sum(len(v) for v in net.out_edges.values())
        assert total_out == seed_manifest["relations"]
        fbm = by_name(seed_lib, "foundation business model")
        out_names = {
            seed_lib.components[seed_lib.relations[rid].to_id].name
            for rid in net.out_edges[fbm.id]
            if seed_lib.relations[rid].label == "contains"
        }
        assert out_names == {"job model", "interaction model", "object model"}

    def test_no_relations_means_isolated_nodes(self):
        lib = Library()
        for i in range(5):
            add_component(lib, ComponentKind.TOOL, f"t{i}")
        net = build_network(lib)
        assert all(not net.out_edges[c] and not net.in_edges[c] for c in net.nodes)

    def test_adjacency_matches_bruteforce_scan(self):
        rng = random.Random(11)
        lib = random_library(rng, n_components=50, n_relations=120)
        net = build_network(lib)
        for cid in lib.components:
            out = {rid for rid in lib.relations if lib.relations[rid].from_id == cid}
            inn = {rid for rid in lib.relations if lib.relations[rid].to_id == cid}
            assert set(net.out_edges[cid]) == out
            assert set(net.in_edges[cid]) == inn

    def test_every_relation_appears_exactly_once_per_side(self):
        rng = random.Random(13)
        lib = random_library(rng, n_components=20, n_relations=40)
        net = build_network(lib)
        out_all = [rid for edges in net.out_edges.values() for rid in edges]
        in_all = [rid for edges in net.in_edges.values() for rid in edges]
        assert sorted(out_all) == sorted(lib.relations)
        assert sorted(in_all) == sorted(lib.relations)

    def test_determinism_on_equal_libraries(self, seed_batch):
        from methlib import ingest

        lib1, lib2 = Library(), Library()
        ingest.import_batch(lib1, seed_batch)
        ingest.import_batch(lib2, seed_batch)
        assert build_network(lib1) == build_network(lib2)

    def test_invalid_library_rejected(self, seed_lib):
        victim = next(iter(seed_lib.relations.values()))
        victim.to_id = "ghost"
        with pytest.raises(errors.InvalidLibraryError):
            build_network(seed_lib)


class TestSituation:
    def test_check_situation(self, seed_lib):
        fd = seed_lib.resolve_factor("data_complexity")
        check_situation(seed_lib, Situation({fd.id: "high"}))
        with pytest.raises(errors.OutOfDomainError):
            check_situation(seed_lib, Situation({fd.id: "purple"}))
        with pytest.raises(errors.UnknownIdError):
            check_situation(seed_lib, Situation({"ghost": "high"}))
