"""Tests for experiment record files."""

import json

import pyarrow.parquet as pq
import pytest

from affperm.errors import MalformedInput
from affperm.records import ExperimentRecord, read_records, records_table, write_records


@pytest.fixture
def records():
    return [
        ExperimentRecord(
            "converge",
            {"k": 2, "N": n, "samples": 40, "segments": 10 * n},
            {"wass2_estimate": 1 / n},
            seed=7,
            elapsed_seconds=0.5,
        )
        for n in (4, 8, 16)
    ]


class TestLayout:
    def test_columns(self, records):
        table = records_table(records)
        assert table.column_names == ["k", "N", "samples", "segments", "seed", "wass2_estimate", "elapsed_seconds"]
        assert table.schema.metadata[b"command"] == b"converge"

    def test_row(self, records):
        assert list(records[0].row()) == ["k", "N", "samples", "segments", "seed", "wass2_estimate", "elapsed_seconds"]

    def test_empty(self):
        with pytest.raises(MalformedInput):
            records_table([])

    def test_reserved(self):
        with pytest.raises(MalformedInput):
            records_table([ExperimentRecord("x", {"seed": 1}, {"y": 2})])

    def test_overlap(self):
        with pytest.raises(MalformedInput):
            records_table([ExperimentRecord("x", {"a": 1}, {"a": 2})])

    def test_mixed(self, records):
        other = ExperimentRecord("converge", {"k": 2}, {"wass2_estimate": 0.1})
        with pytest.raises(MalformedInput):
            records_table([*records, other])


class TestFiles:
    def test_json(self, records, tmp_path):
        path = write_records(tmp_path / "out.json", records)
        data = json.loads(path.read_text())
        assert data[1]["parameters"]["N"] == 8
        assert data[1]["command"] == "converge"
        assert read_records(path) == records

    def test_csv(self, records, tmp_path):
        path = write_records(tmp_path / "out.csv", records)
        lines = path.read_text().splitlines()
        assert lines[0] == "k,N,samples,segments,seed,wass2_estimate,elapsed_seconds"
        assert lines[1].startswith("2,4,")
        assert len(lines) == 4
        assert read_records(path, command="converge") == records

    def test_parquet(self, records, tmp_path):
        path = write_records(tmp_path / "out.parquet", records)
        assert pq.read_table(str(path)).num_rows == 3
        assert read_records(path) == records

    def test_order_kept(self, records, tmp_path):
        path = write_records(tmp_path / "out.parquet", records[::-1])
        assert [r.parameters["N"] for r in read_records(path)] == [16, 8, 4]

    def test_bad_suffix(self, records, tmp_path):
        with pytest.raises(MalformedInput):
            write_records(tmp_path / "out.txt", records)
        with pytest.raises(MalformedInput):
            read_records(tmp_path / "out.txt")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('[{"command": "x", "extra": 1}]')
        with pytest.raises(MalformedInput):
            read_records(path)
        path.write_text('{"command": "x"}')
        with pytest.raises(MalformedInput):
            read_records(path)
