"""
Records Module

This module reads and writes the line-delimited record files every guicorpus
stage produces. A record file starts with a header line naming its schema and
version, followed by one JSON object per line with fields in a fixed order,
so identical inputs always give byte-identical files.

Classes:
- RecordWriter: Context manager writing one schema-versioned record file.

Functions:
- write_records: Writes an iterable of records to a file.
- read_records: Streams the records of a file after checking its header.
- file_digest: SHA-256 digest of a file's content.
- text_digest: SHA-256 digest of a string.

Dependencies:
- jsonlines: Line-delimited JSON reading and writing.
"""
import hashlib
import logging
import os
from typing import Any, Dict, Iterable, Iterator, Optional

import jsonlines

from guicorpus.exceptions import DataError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
BLOCK_SIZE = 1024 * 64


def file_digest(path: str) -> str:
    """
    Computes the SHA-256 digest of a file.

    :param path: Path of the file.
    :return: Hex digest.
    """
    digest = hashlib.sha256()
    with open(path, "rb") as data_file:
        for block in iter(lambda: data_file.read(BLOCK_SIZE), b""):
            digest.update(block)
    return digest.hexdigest()


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _as_dict(record: Any) -> Dict[str, Any]:
    if isinstance(record, dict):
        return record
    return record.to_dict()


class RecordWriter:
    """
    Writes one schema-versioned, line-delimited record file.

    Attributes:
    - path (str): Destination file.
    - schema (str): Schema name written into the header line.
    - count (int): Records written so far, header excluded.
    """

    def __init__(self, path: str, schema: str):
        self.path = path
        self.schema = schema
        self.count = 0
        self._file = None
        self._writer: Optional[jsonlines.Writer] = None

    def __enter__(self) -> "RecordWriter":
        directory = os.path.dirname(self.path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self._file = open(self.path, "w", encoding="utf-8", newline="\n")
        self._writer = jsonlines.Writer(self._file, compact=True)
        self._writer.write({"schema": self.schema, "version": SCHEMA_VERSION})
        return self

    def write(self, record: Any) -> None:
        self._writer.write(_as_dict(record))
        self.count += 1

    def __exit__(self, exc_type, exc, tb) -> None:
        self._writer.close()
        self._file.close()


def write_records(path: str, schema: str, records: Iterable[Any]) -> int:
    """
    Writes records to a new record file.

    :param path: Destination file.
    :param schema: Schema name for the header line.
    :param records: Records (dicts or objects with to_dict).
    :return: Number of records written.
    """
    with RecordWriter(path, schema) as writer:
        for record in records:
            writer.write(record)
    logger.debug("Wrote %d %s records to %s", writer.count, schema, path)
    return writer.count


def read_records(path: str, schema: Optional[str] = None) -> Iterator[Dict[str, Any]]:
    """
    Streams the records of a record file.

    :param path: Source file.
    :param schema: Expected schema name; None accepts any schema.
    :return: Iterator over record dictionaries, header excluded.
    :raises DataError: If the header is missing or names another schema or version.
    """
    if not os.path.exists(path):
        raise DataError(f"Record file not found: {path}")
    with jsonlines.open(path, mode="r") as reader:
        header = None
        for line_number, item in enumerate(reader):
            if line_number == 0:
                header = item
                if not isinstance(header, dict) or "schema" not in header:
                    raise DataError(f"{path}: missing schema header line")
                if schema is not None and header["schema"] != schema:
                    raise DataError(f"{path}: expected schema {schema!r}, found {header['schema']!r}")
                if header.get("version") != SCHEMA_VERSION:
                    raise DataError(f"{path}: unsupported schema version {header.get('version')!r}")
                continue
            yield item
        if header is None:
            raise DataError(f"{path}: empty record file")
