"""Experiment records and their CSV, JSON and Parquet files.

A flat row is the parameters in order, then seed, then the outputs, then
elapsed_seconds. CSV keeps only that row layout, so reading one back needs
the command name from the caller. Parquet also stores the command and the
parameter and output keys in its schema metadata.
"""

import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import pyarrow as pa
import pyarrow.csv as pacsv
import pyarrow.parquet as pq

from .errors import MalformedInput

RESERVED = ("seed", "elapsed_seconds")


@dataclass
class ExperimentRecord:
    command: str
    parameters: dict[str, object] = field(default_factory=dict)
    outputs: dict[str, object] = field(default_factory=dict)
    seed: int = 0
    elapsed_seconds: float = 0.0

    def row(self) -> dict[str, object]:
        return {**self.parameters, "seed": self.seed, **self.outputs, "elapsed_seconds": self.elapsed_seconds}

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "outputs": self.outputs,
            "seed": self.seed,
            "elapsed_seconds": self.elapsed_seconds,
        }


def _layout(records: Sequence[ExperimentRecord]) -> tuple[str, list[str], list[str]]:
    if not records:
        raise MalformedInput("no records to write")
    first = records[0]
    params, outputs = list(first.parameters), list(first.outputs)
    for key in params + outputs:
        if key in RESERVED:
            raise MalformedInput(f"{key!r} is a reserved column name")
    if set(params) & set(outputs):
        raise MalformedInput("parameter and output keys overlap")
    for r in records:
        if r.command != first.command or list(r.parameters) != params or list(r.outputs) != outputs:
            raise MalformedInput("records must share a command and key layout")
    return first.command, params, outputs


def records_table(records: Sequence[ExperimentRecord]) -> pa.Table:
    command, params, outputs = _layout(records)
    columns = params + ["seed"] + outputs + ["elapsed_seconds"]
    rows = [r.row() for r in records]
    table = pa.table({c: [row[c] for row in rows] for c in columns})
    return table.replace_schema_metadata({
        "command": command,
        "parameters": json.dumps(params),
        "outputs": json.dumps(outputs),
    })


def write_records(path: Path, records: Sequence[ExperimentRecord]) -> Path:
    """Write by suffix: .csv, .json or .parquet. Rows keep their given order."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".json":
        _layout(records)
        text = json.dumps([r.to_json() for r in records], indent=2) + "\n"
        path.write_text(text, encoding="utf-8", newline="\n")
    elif suffix == ".csv":
        table = records_table(records)
        # pyarrow quotes header names whatever the quoting style
        with pa.OSFile(str(path), "wb") as sink:
            sink.write((",".join(table.column_names) + "\n").encode())
            pacsv.write_csv(table, sink, pacsv.WriteOptions(include_header=False, quoting_style="none"))
    elif suffix == ".parquet":
        pq.write_table(records_table(records), str(path), compression="zstd")
    else:
        raise MalformedInput(f"unsupported record format {suffix!r}; use .csv, .json or .parquet")
    return path


def _from_row(command: str, row: dict, params: list[str], outputs: list[str]) -> ExperimentRecord:
    return ExperimentRecord(
        command=command,
        parameters={k: row[k] for k in params},
        outputs={k: row[k] for k in outputs},
        seed=int(row["seed"]),
        elapsed_seconds=float(row["elapsed_seconds"]),
    )


def _split_columns(names: list[str]) -> tuple[list[str], list[str]]:
    if "seed" not in names or names[-1] != "elapsed_seconds":
        raise MalformedInput("expected a seed column and a final elapsed_seconds column")
    at = names.index("seed")
    return names[:at], names[at + 1:-1]


def read_records(path: Path, command: str | None = None) -> list[ExperimentRecord]:
    """Inverse of write_records. For CSV, command names the records."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".json":
        data = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(data, list):
            raise MalformedInput("expected a JSON array of records")
        try:
            return [ExperimentRecord(**item) for item in data]
        except TypeError as e:
            raise MalformedInput(f"bad record in {path}: {e}") from None
    if suffix == ".csv":
        table = pacsv.read_csv(str(path))
        params, outputs = _split_columns(table.column_names)
        return [_from_row(command or "", row, params, outputs) for row in table.to_pylist()]
    if suffix == ".parquet":
        table = pq.read_table(str(path))
        meta = table.schema.metadata or {}
        if b"command" not in meta:
            raise MalformedInput(f"{path} carries no record metadata")
        params = json.loads(meta[b"parameters"])
        outputs = json.loads(meta[b"outputs"])
        name = meta[b"command"].decode()
        return [_from_row(name, row, params, outputs) for row in table.to_pylist()]
    raise MalformedInput(f"unsupported record format {suffix!r}; use .csv, .json or .parquet")
