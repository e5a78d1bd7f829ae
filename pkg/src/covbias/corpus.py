"""Reading, validating, and writing whitespace-tokenized corpora.

Corpus files are UTF-8 text, one sentence per line, tokens separated by
whitespace. POS annotation files have the same shape with one tag per token.
Line numbers are 1-based everywhere. Readers are generators, so memory use is
bounded by the longest line, not the file size.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum

from .errors import DataError, EmptyLine, LineCountMismatch, PosAlignmentError
from .fileio import atomic_write

Sentence = tuple[str, ...]
PosAnnotation = tuple[str, ...]


class OriginLabel(Enum):
    """Which side of a parallel pair was written first."""

    SOURCE_ORIGINAL = "S"
    TARGET_ORIGINAL = "T"

    @property
    def code(self) -> str:
        return self.value

    @classmethod
    def from_code(cls, code: str) -> "OriginLabel":
        try:
            return cls(code)
        except ValueError:
            raise DataError(f"unknown origin label {code!r}, expected S or T") from None


@dataclass(frozen=True, slots=True)
class ParallelExample:
    """One aligned sentence pair, with optional annotations."""

    source: Sentence
    target: Sentence
    source_pos: PosAnnotation | None = None
    target_pos: PosAnnotation | None = None
    score: float | None = None
    origin: OriginLabel | None = None

    def __post_init__(self) -> None:
        if self.source_pos is not None and len(self.source_pos) != len(self.source):
            raise PosAlignmentError(
                f"source has {len(self.source)} tokens but {len(self.source_pos)} tags"
            )
        if self.target_pos is not None and len(self.target_pos) != len(self.target):
            raise PosAlignmentError(
                f"target has {len(self.target)} tokens but {len(self.target_pos)} tags"
            )


def _parse_line(raw: str, path: str, line_no: int) -> Sentence:
    tokens = raw.split()
    if not tokens:
        raise EmptyLine(path, line_no)
    return tuple(tokens)


def read_mono(path: str) -> Iterator[Sentence]:
    """Stream one Sentence per line. Blank lines are data errors, not skips."""
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, 1):
            yield _parse_line(raw, path, line_no)


_END = object()


def read_parallel(
    source_path: str,
    target_path: str,
    source_pos_path: str | None = None,
    target_pos_path: str | None = None,
) -> Iterator[ParallelExample]:
    """Stream aligned ParallelExamples from two (or four) files.

    All provided files must have the same line count; the first file to run
    out is named in the LineCountMismatch. POS lines must carry exactly one
    tag per token of the corresponding side.
    """
    paths = [source_path, target_path]
    if source_pos_path is not None:
        paths.append(source_pos_path)
    if target_pos_path is not None:
        paths.append(target_pos_path)

    handles = []
    try:
        for p in paths:
            handles.append(open(p, "r", encoding="utf-8"))
        line_no = 0
        while True:
            line_no += 1
            raws = [next(h, _END) for h in handles]
            if all(r is _END for r in raws):
                return
            for p, r in zip(paths, raws):
                if r is _END:
                    raise LineCountMismatch(
                        f"{p} ended at line {line_no} but other input(s) continue",
                        line_no=line_no,
                    )
            source = _parse_line(raws[0], paths[0], line_no)
            target = _parse_line(raws[1], paths[1], line_no)
            source_pos = target_pos = None
            idx = 2
            if source_pos_path is not None:
                tags = _parse_line(raws[idx], paths[idx], line_no)
                if len(tags) != len(source):
                    raise PosAlignmentError(
                        f"{paths[idx]}: line {line_no} has {len(tags)} tags "
                        f"for {len(source)} source tokens",
                        line_no=line_no,
                    )
                source_pos = tags
                idx += 1
            if target_pos_path is not None:
                tags = _parse_line(raws[idx], paths[idx], line_no)
                if len(tags) != len(target):
                    raise PosAlignmentError(
                        f"{paths[idx]}: line {line_no} has {len(tags)} tags "
                        f"for {len(target)} target tokens",
                        line_no=line_no,
                    )
                target_pos = tags
            yield ParallelExample(source, target, source_pos, target_pos)
    finally:
        for h in handles:
            h.close()


def _check_writable(sentence: Sentence, line_no: int) -> Sentence:
    if not sentence:
        raise DataError(f"line {line_no}: refusing to write an empty sentence")
    for token in sentence:
        if not token or any(ch.isspace() for ch in token):
            raise DataError(
                f"line {line_no}: token {token!r} is empty or contains whitespace"
            )
    return sentence


def write_mono(sentences: Iterable[Sentence], path: str) -> int:
    """Write one space-joined line per sentence (atomically); returns line count."""
    count = 0
    with atomic_write(path) as handle:
        for line_no, sentence in enumerate(sentences, 1):
            handle.write(" ".join(_check_writable(sentence, line_no)) + "\n")
            count += 1
    return count


def write_parallel(
    examples: Iterable[ParallelExample], source_path: str, target_path: str
) -> int:
    """Write both sides of a parallel corpus atomically; returns line count.

    Reading the written files back reproduces each example's token content
    exactly (the round-trip law), which is why tokens with whitespace are
    rejected rather than silently corrupted.
    """
    count = 0
    with atomic_write(source_path) as src, atomic_write(target_path) as tgt:
        for line_no, ex in enumerate(examples, 1):
            src.write(" ".join(_check_writable(ex.source, line_no)) + "\n")
            tgt.write(" ".join(_check_writable(ex.target, line_no)) + "\n")
            count += 1
    return count
