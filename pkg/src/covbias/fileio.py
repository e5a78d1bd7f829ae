"""Small file and report helpers: atomic writes, TSV, section config files."""

from __future__ import annotations

import os
import tempfile
from collections.abc import Iterable, Iterator, Sequence
from contextlib import contextmanager
from typing import IO

from .errors import DataError


def fmt_float(x: float) -> str:
    """Render a float with 17 significant digits (round-trips float64)."""
    return format(x, ".17g")


@contextmanager
def atomic_write(path: str) -> Iterator[IO[str]]:
    """Write a text file via a temp file in the same directory + os.replace.

    The final path either keeps its previous content or receives the complete
    new content; an interrupted run never leaves a partial file there.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            yield handle
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


@contextmanager
def atomic_write_bytes(path: str) -> Iterator[IO[bytes]]:
    """Binary twin of atomic_write."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as handle:
            yield handle
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_tsv(handle: IO[str], header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    handle.write("\t".join(header) + "\n")
    for row in rows:
        handle.write("\t".join(row) + "\n")


def read_tsv(path: str, required: Sequence[str]) -> list[dict[str, str]]:
    """Read a headered TSV, returning one dict per row.

    Extra columns are kept; missing required columns raise DataError with the
    file named. Rows with the wrong field count raise DataError with the
    1-based line number.
    """
    with open(path, "r", encoding="utf-8") as handle:
        header_line = handle.readline()
        if not header_line:
            raise DataError(f"{path}: empty TSV, expected a header row")
        header = header_line.rstrip("\n").split("\t")
        missing = [col for col in required if col not in header]
        if missing:
            raise DataError(f"{path}: missing required column(s) {', '.join(missing)}")
        rows = []
        for line_no, line in enumerate(handle, 2):
            fields = line.rstrip("\n").split("\t")
            if len(fields) != len(header):
                raise DataError(
                    f"{path}: line {line_no} has {len(fields)} fields, header has {len(header)}"
                )
            rows.append(dict(zip(header, fields)))
    return rows


def read_section_file(path: str) -> dict[str, list[str]]:
    """Parse a section config file: [name] headers, one token per line.

    Blank lines and lines starting with # are ignored. Tokens may not contain
    whitespace, duplicate section names are rejected, and tokens before any
    section header are an error.
    """
    sections: dict[str, list[str]] = {}
    current: str | None = None
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                name = line[1:-1].strip()
                if not name:
                    raise DataError(f"{path}: line {line_no}: empty section name")
                if name in sections:
                    raise DataError(f"{path}: line {line_no}: duplicate section [{name}]")
                sections[name] = []
                current = name
                continue
            if current is None:
                raise DataError(f"{path}: line {line_no}: token before any [section] header")
            if len(line.split()) != 1:
                raise DataError(f"{path}: line {line_no}: expected one token per line")
            sections[current].append(line)
    return sections
