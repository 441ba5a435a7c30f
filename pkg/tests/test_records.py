import pickle

import pytest
from hypothesis import given
from hypothesis import strategies as st

from guicorpus.exceptions import (
    ActionSyntaxError, ConfigError, DataError, ExplorationBudgetError, SnapshotSchemaError, UnmappedActionError,
)
from guicorpus.records import RecordWriter, file_digest, read_records, text_digest, write_records
from guicorpus.rng import SeededRandom, derive_seed


class TestDeriveSeed:
    def test_stable(self):
        assert derive_seed(42, "filter", "page-1") == derive_seed(42, "filter", "page-1")

    def test_labels_matter(self):
        seeds = {derive_seed(42, "filter"), derive_seed(42, "walk"), derive_seed(43, "filter"), derive_seed(42)}
        assert len(seeds) == 4

    def test_fits_64_bits(self):
        assert 0 <= derive_seed(-1, "x") < 2 ** 64


class TestSeededRandom:
    def test_same_seed_same_stream(self):
        first, second = SeededRandom(7), SeededRandom(7)
        assert [first.next_u64() for _ in range(5)] == [second.next_u64() for _ in range(5)]

    @given(st.integers(0, 2 ** 64 - 1), st.integers(1, 10 ** 12))
    def test_randbelow_range(self, seed, n):
        assert 0 <= SeededRandom(seed).randbelow(n) < n

    def test_randbelow_one(self):
        assert SeededRandom(3).randbelow(1) == 0

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            SeededRandom(3).randbelow(0)
        with pytest.raises(ValueError):
            SeededRandom(3).choice([])
        with pytest.raises(ValueError):
            SeededRandom(3).sample_indices(2, 3)

    @given(st.integers(0, 2 ** 32), st.integers(0, 200), st.data())
    def test_sample_indices(self, seed, population, data):
        k = data.draw(st.integers(0, population))
        drawn = SeededRandom(seed).sample_indices(population, k)
        assert len(drawn) == k == len(set(drawn))
        assert all(0 <= index < population for index in drawn)

    def test_roughly_uniform(self):
        rng = SeededRandom(11)
        counts = [0] * 4
        for _ in range(4000):
            counts[rng.randbelow(4)] += 1
        assert all(850 < count < 1150 for count in counts)


class TestRecordFiles:
    def test_header_and_order(self, tmp_path):
        path = str(tmp_path / "out" / "records.jsonl")
        assert write_records(path, "example", [{"b": 1, "a": 2}, {"c": None}]) == 2
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        assert lines == ['{"schema":"example","version":1}', '{"b":1,"a":2}', '{"c":null}']
        assert list(read_records(path, "example")) == [{"b": 1, "a": 2}, {"c": None}]

    def test_writer_accepts_objects(self, tmp_path):
        class Thing:
            def to_dict(self):
                return {"x": 1}

        path = str(tmp_path / "things.jsonl")
        with RecordWriter(path, "thing") as writer:
            writer.write(Thing())
            writer.write({"x": 2})
        assert writer.count == 2
        assert [record["x"] for record in read_records(path)] == [1, 2]

    def test_schema_mismatch(self, tmp_path):
        path = str(tmp_path / "records.jsonl")
        write_records(path, "agent_step", [])
        with pytest.raises(DataError):
            list(read_records(path, "grounding"))

    def test_missing_header(self, tmp_path):
        path = tmp_path / "records.jsonl"
        path.write_text('{"x":1}\n', encoding="utf-8")
        with pytest.raises(DataError):
            list(read_records(str(path)))

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "records.jsonl"
        path.write_text('{"schema":"x","version":2}\n', encoding="utf-8")
        with pytest.raises(DataError):
            list(read_records(str(path)))

    def test_empty_and_missing(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("", encoding="utf-8")
        with pytest.raises(DataError):
            list(read_records(str(empty)))
        with pytest.raises(DataError):
            list(read_records(str(tmp_path / "nothing.jsonl")))

    def test_digests(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("guicorpus", encoding="utf-8")
        assert file_digest(str(path)) == text_digest("guicorpus")
        assert text_digest("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


class TestExceptions:
    def test_exit_codes(self):
        assert ConfigError("x").exit_code == 2
        assert DataError("x").exit_code == 3
        assert UnmappedActionError("tap").exit_code == 3

    @pytest.mark.parametrize("error", [
        ActionSyntaxError("unexpected token", "CLICK <", 6),
        UnmappedActionError("tap", "amex"),
        SnapshotSchemaError("bad role", (0, 2)),
        ExplorationBudgetError(3),
    ])
    def test_pickle(self, error):
        restored = pickle.loads(pickle.dumps(error))
        assert type(restored) is type(error)
        assert str(restored) == str(error)
