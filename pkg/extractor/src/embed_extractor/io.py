"""Sequence table parsing and embeddings TSV output.

Input: TSV with header ``id<TAB>sequence<TAB>fitness``. Output follows the
downstream embeddings format: ``id [sequence] fitness e0 .. e{d-1}``, one
record per line, UTF-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

VALID_RESIDUES = frozenset("ACDEFGHIKLMNPQRSTVWYX")


class SequenceTableError(ValueError):
    pass


@dataclass(frozen=True)
class SequenceRecord:
    id: str
    sequence: str
    fitness: float
    fitness_text: str  # original token, echoed verbatim into the output


def read_sequence_table(path) -> list[SequenceRecord]:
    """Parse the input table; malformed structure or non-finite fitness is fatal.

    Per-record residue/length problems are not checked here; extraction
    skips those records with a warning.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    lines = [ln for ln in lines if ln != ""]
    if not lines:
        raise SequenceTableError(f"{path}: empty file")
    header = lines[0].split("\t")
    if header[:3] != ["id", "sequence", "fitness"]:
        raise SequenceTableError(
            f"{path}: expected header 'id<TAB>sequence<TAB>fitness', got {header[:3]}"
        )
    records = []
    for row_no, line in enumerate(lines[1:], start=1):
        fields = line.split("\t")
        if len(fields) != 3:
            raise SequenceTableError(f"{path}: row {row_no} has {len(fields)} columns, expected 3")
        rid, seq, fit_text = fields
        try:
            fitness = float(fit_text)
        except ValueError:
            raise SequenceTableError(
                f"{path}: row {row_no}: cannot parse fitness {fit_text!r}"
            ) from None
        if not math.isfinite(fitness):
            raise SequenceTableError(f"{path}: row {row_no}: non-finite fitness {fit_text!r}")
        records.append(SequenceRecord(id=rid, sequence=seq.upper(), fitness=fitness, fitness_text=fit_text))
    if not records:
        raise SequenceTableError(f"{path}: no data rows")
    return records


def invalid_residues(sequence: str) -> set[str]:
    return set(sequence) - VALID_RESIDUES


class EmbeddingsWriter:
    """Streaming writer for the embeddings TSV."""

    def __init__(self, path, dim: int, include_sequence: bool):
        self._fh = open(path, "w", encoding="utf-8")
        self._include_sequence = include_sequence
        cols = ["id"] + (["sequence"] if include_sequence else []) + ["fitness"]
        cols += [f"e{j}" for j in range(dim)]
        self._fh.write("\t".join(cols) + "\n")

    def write(self, record: SequenceRecord, embedding) -> None:
        row = [record.id]
        if self._include_sequence:
            row.append(record.sequence)
        row.append(record.fitness_text)
        row.extend(f"{v:.8e}" for v in embedding)
        self._fh.write("\t".join(row) + "\n")

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
