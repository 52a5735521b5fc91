# Standard Library
import csv
import json
import os
import shutil
import sys
from collections import OrderedDict
from typing import Iterator, Optional, Sequence

# Third Party
import numpy as np

# First Party
from mdfocus.core.config_constants import CSV_DELIMITER, STDIN_PATH
from mdfocus.core.logger import get_logger
from mdfocus.core.utils import ensure_dir
from mdfocus.exceptions import ConfigError, InvariantViolation, MalformedRow

TEMP_PATH_SUFFIX = ".tmp"
TRACE_JSONL = "jsonl"
TRACE_CSV = "csv"
ALLOWED_TRACE_FORMATS = [TRACE_JSONL, TRACE_CSV]


def get_temp_path(file_path):
    return file_path + TEMP_PATH_SUFFIX


class AtomicFile:
    """Text file written under a temporary name and moved into place on close."""

    def __init__(self, path):
        self.path = path
        self.logger = get_logger()
        ensure_dir(path)
        self.temp_path = get_temp_path(path)
        self._accessor = open(self.temp_path, "w", newline="")

    def write(self, _str):
        self._accessor.write(_str)

    def flush(self):
        self._accessor.flush()

    def close(self):
        """Close the file and move it from its temporary name to its final path."""
        self._accessor.close()
        shutil.move(self.temp_path, self.path)
        self.logger.debug(f"Wrote {os.path.getsize(self.path)} bytes to file {self.path}")

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()


def write_csv(path, header: Sequence[str], rows) -> int:
    """Writes a table atomically ("-" writes to stdout); returns the number of rows."""
    count = 0
    if path == STDIN_PATH:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
            count += 1
        return count
    with AtomicFile(path) as f:
        writer = csv.writer(f._accessor)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
            count += 1
    return count


def flatten_record(record, prefix="") -> "OrderedDict[str, object]":
    """Nested dicts become dotted column names, e.g. stats.dense.value."""
    flat = OrderedDict()
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten_record(value, name + "."))
        else:
            flat[name] = "" if value is None else value
    return flat


class TraceWriter:
    """Line-buffered record sink ("-" is stdout), JSONL or CSV.

    In CSV mode the header is taken from the first record; later records must have the same
    flattened keys.
    """

    def __init__(self, path=STDIN_PATH, fmt=TRACE_JSONL):
        if fmt not in ALLOWED_TRACE_FORMATS:
            raise ConfigError(f"format={fmt} must be one of " + ",".join(ALLOWED_TRACE_FORMATS))
        self.path = path
        self.fmt = fmt
        self._csv = None
        self._header = None
        if path == STDIN_PATH:
            self._accessor = sys.stdout
            self._owned = False
        else:
            ensure_dir(path)
            self._accessor = open(path, "w", buffering=1, newline="")
            self._owned = True

    def write(self, record) -> None:
        if self.fmt == TRACE_CSV:
            self._write_row(flatten_record(record))
        else:
            self._accessor.write(json.dumps(record) + "\n")
        if not self._owned:
            self._accessor.flush()

    def _write_row(self, flat):
        if self._csv is None:
            self._csv = csv.writer(self._accessor)
            self._header = list(flat)
            self._csv.writerow(self._header)
        elif list(flat) != self._header:
            raise InvariantViolation(f"trace columns {list(flat)} differ from {self._header}")
        self._csv.writerow(list(flat.values()))

    def close(self):
        if self._owned:
            self._accessor.close()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()


def _is_number(field):
    try:
        float(field)
    except ValueError:
        return False
    return True


def read_rows(source=STDIN_PATH, width: Optional[int] = None) -> Iterator[np.ndarray]:
    """Yields one float vector per CSV row.

    Blank lines are skipped and a first row with any non-numeric field is taken as a header.
    Rows with the wrong number of fields or non-numeric values raise MalformedRow.
    """
    stream = sys.stdin if source == STDIN_PATH else open(source, newline="")
    try:
        first = True
        for line_number, fields in enumerate(csv.reader(stream, delimiter=CSV_DELIMITER), 1):
            fields = [f.strip() for f in fields]
            if not fields or fields == [""]:
                continue
            if first:
                first = False
                if not all(_is_number(f) for f in fields):
                    get_logger().debug(f"{source}: header {fields} skipped")
                    if width is not None and len(fields) != width:
                        raise MalformedRow(
                            line_number, f"header has {len(fields)} columns, expected {width}"
                        )
                    continue
            if width is not None and len(fields) != width:
                raise MalformedRow(line_number, f"{len(fields)} columns, expected {width}")
            try:
                row = np.array([float(f) for f in fields])
            except ValueError:
                raise MalformedRow(line_number, f"non-numeric field in {fields}")
            if not np.all(np.isfinite(row)):
                raise MalformedRow(line_number, f"non-finite value in {fields}")
            yield row
    finally:
        if stream is not sys.stdin:
            stream.close()
