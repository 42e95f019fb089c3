import json
import random

import pytest

from methlib import errors, store
from methlib.heuristics import print_condition
from methlib.model import Library, validate
from methlib.navigate import mark, start_session

from generators import random_library


class TestSave:
    def test_empty_library_minimal_file(self):
        doc = json.loads(store.dumps(Library()))
        assert doc == {"format": "methlib/1"}

    def test_canonical_bytes_stable(self, seed_lib):
        assert store.dumps(seed_lib) == store.dumps(seed_lib)

    def test_save_requires_valid_library(self, seed_lib):
        seed_lib.relations["r99"] = next(iter(seed_lib.relations.values())).__class__(
            id="r99", from_id="ghost", to_id="ghost2", label="uses"
        )
        with pytest.raises(errors.InvalidLibraryError):
            store.save(seed_lib)

    def test_include_sessions_flag(self, seed_lib):
        s = start_session(seed_lib)
        mark(seed_lib, s, next(iter(seed_lib.components)))
        with_sessions = json.loads(store.dumps(seed_lib))
        without = json.loads(store.dumps(seed_lib, include_sessions=False))
        assert s.id in with_sessions["sessions"]
        assert "sessions" not in without


class TestLoad:
    def test_seed_roundtrip_byte_identical(self, seed_lib, tmp_path):
        path = tmp_path / "lib.json"
        first = store.save(seed_lib, path)
        reloaded, violations = store.load(path)
        assert violations == []
        assert store.dumps(reloaded) == first

    def test_conditions_reparse_to_equal_asts(self, seed_lib):
        reloaded, _ = store.load(store.dumps(seed_lib))
        for hid, h in seed_lib.heuristics.items():
            assert print_condition(reloaded.heuristics[hid].condition) == print_condition(
                h.condition
            )
            assert reloaded.heuristics[hid].condition == h.condition

    def test_truncated_file_names_position(self, seed_lib, tmp_path):
        path = tmp_path / "broken.json"
        path.write_bytes(store.dumps(seed_lib)[:100])
        with pytest.raises(errors.StoreFormatError) as err:
            store.load(path)
        assert "line" in err.value.message and err.value.position is not None

    def test_missing_file(self, tmp_path):
        with pytest.raises(errors.StoreFormatError):
            store.load(tmp_path / "absent.json")

    def test_non_object_payload(self):
        with pytest.raises(errors.StoreFormatError):
            store.load(b"[1, 2, 3]\n")

    def test_missing_format_tag(self):
        with pytest.raises(errors.StoreFormatError):
            store.load(b"{}\n")

    def test_newer_version_refused(self):
        with pytest.raises(errors.UnsupportedVersionError):
            store.load(b'{"format": "methlib/2"}\n')

    def test_unknown_fields_survive_roundtrip(self, seed_lib):
        doc = json.loads(store.dumps(seed_lib))
        doc["x_annotations"] = {"reviewed": True}
        cid = next(iter(doc["components"]))
        doc["components"][cid]["x_color"] = "teal"
        raw = (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode()
        lib, violations = store.load(raw)
        assert violations == []
        assert store.dumps(lib) == raw

    def test_counters_restored_after_load(self, seed_lib):
        reloaded, _ = store.load(store.dumps(seed_lib))
        fresh = reloaded.new_id("c")
        assert fresh not in seed_lib.components

    def test_dangling_reference_reported_not_fatal(self, seed_lib):
        doc = json.loads(store.dumps(seed_lib))
        rid = next(iter(doc["relations"]))
        doc["relations"][rid]["to"] = "ghost"
        lib, violations = store.load(json.dumps(doc).encode())
        assert violations != []
        assert rid in lib.relations


class TestRandomRoundtrip:
    def test_random_libraries_roundtrip(self):
        rng = random.Random(101)
        for _ in range(100):
            lib = random_library(
                rng,
                n_components=rng.randint(0, 20),
                n_relations=rng.randint(0, 15),
                n_factors=rng.randint(1, 4),
                n_properties=rng.randint(0, 3),
                n_heuristics=rng.randint(0, 5),
            )
            assert validate(lib) == []
            data = store.dumps(lib)
            reloaded, violations = store.load(data)
            assert violations == []
            assert store.dumps(reloaded) == data
