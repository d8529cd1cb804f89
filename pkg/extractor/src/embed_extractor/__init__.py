"""Protein sequence embeddings for the fitness-landscape toolkit.

Reads an ``id / sequence / fitness`` TSV, embeds each sequence with a
pretrained protein language model (mean pooling over residue positions,
special tokens excluded), and writes the embeddings TSV consumed by the
qubofit pipeline.
"""

from .extract import DEFAULT_MODEL, ExtractionSummary, embed_batch, extract_embeddings, load_model
from .io import SequenceRecord, SequenceTableError, invalid_residues, read_sequence_table

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODEL",
    "ExtractionSummary",
    "SequenceRecord",
    "SequenceTableError",
    "embed_batch",
    "extract_embeddings",
    "invalid_residues",
    "load_model",
    "read_sequence_table",
]
