"""Fixed-length sequence embeddings via residue mean pooling.

A pretrained protein language model produces contextual vectors per
residue; the record embedding is their mean over residue positions only
(special and padding tokens are excluded from the average). The embedding
dimension is the loaded model's hidden size.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import torch

from .io import EmbeddingsWriter, SequenceRecord, invalid_residues

logger = logging.getLogger("embed_extractor")

DEFAULT_MODEL = "facebook/esm2_t6_8M_UR50D"


class ModelLoadError(RuntimeError):
    pass


@dataclass
class LoadedModel:
    tokenizer: object
    model: object
    hidden_size: int
    max_residues: int | None  # None when the model has no fixed context


@dataclass
class ExtractionSummary:
    written: int = 0
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (id, reason)


def load_model(model_id: str) -> LoadedModel:
    """Load tokenizer and encoder from a hub id or local path, eval mode, CPU."""
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModel.from_pretrained(model_id)
    except Exception as exc:
        raise ModelLoadError(f"cannot load model {model_id!r}: {exc}") from exc
    model.eval()
    config = model.config
    max_residues = None
    if getattr(config, "position_embedding_type", None) == "absolute":
        # leave headroom for special tokens and the position-id offset
        max_residues = int(config.max_position_embeddings) - 4
    return LoadedModel(
        tokenizer=tokenizer,
        model=model,
        hidden_size=int(config.hidden_size),
        max_residues=max_residues,
    )


def embed_batch(loaded: LoadedModel, sequences: list[str]) -> np.ndarray:
    """Mean-pooled embeddings for one batch, shape (len(sequences), d)."""
    enc = loaded.tokenizer(
        sequences,
        padding=True,
        return_special_tokens_mask=True,
        return_tensors="pt",
    )
    special = enc.pop("special_tokens_mask")
    with torch.no_grad():
        hidden = loaded.model(
            input_ids=enc["input_ids"], attention_mask=enc["attention_mask"]
        ).last_hidden_state
    residue_mask = ((special == 0) & (enc["attention_mask"] == 1)).to(hidden.dtype)
    pooled = (hidden * residue_mask.unsqueeze(-1)).sum(dim=1) / residue_mask.sum(dim=1, keepdim=True)
    return pooled.cpu().numpy().astype(np.float64)


def checked(records: list[SequenceRecord], loaded: LoadedModel, summary: ExtractionSummary):
    """Yield records that pass per-record validation; log and count the rest."""
    for rec in records:
        if not rec.sequence:
            reason = "empty sequence"
        elif bad := invalid_residues(rec.sequence):
            reason = f"invalid residue characters {sorted(bad)}"
        elif loaded.max_residues is not None and len(rec.sequence) > loaded.max_residues:
            reason = f"sequence length {len(rec.sequence)} exceeds model context {loaded.max_residues}"
        else:
            yield rec
            continue
        logger.warning("skipping %s: %s", rec.id, reason)
        summary.skipped.append((rec.id, reason))


def extract_embeddings(
    records: list[SequenceRecord],
    model_id: str,
    batch_size: int,
    out_path,
    include_sequence: bool = True,
) -> ExtractionSummary:
    """Embed every valid record and write the embeddings TSV.

    Invalid records (bad residues, empty, over the model context) are
    skipped with a logged warning and reported in the summary; callers
    should treat a nonempty skip list as a failed run.
    """
    if batch_size < 1:
        raise ValueError(f"batch size must be >= 1, got {batch_size}")
    loaded = load_model(model_id)
    summary = ExtractionSummary()
    batch: list[SequenceRecord] = []
    with EmbeddingsWriter(out_path, loaded.hidden_size, include_sequence) as writer:
        def flush():
            if not batch:
                return
            pooled = embed_batch(loaded, [r.sequence for r in batch])
            for rec, vec in zip(batch, pooled):
                writer.write(rec, vec)
                summary.written += 1
            batch.clear()

        for rec in checked(records, loaded, summary):
            batch.append(rec)
            if len(batch) >= batch_size:
                flush()
        flush()
    return summary
