"""extract: sequence+fitness TSV in, embeddings TSV out."""

from __future__ import annotations

import argparse
import logging
import sys

from .extract import DEFAULT_MODEL, extract_embeddings
from .io import read_sequence_table


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extract",
        description="Embed protein sequences with a pretrained language model "
        "(residue mean pooling) and write the embeddings TSV.",
    )
    parser.add_argument("--in", dest="input", required=True, help="TSV: id, sequence, fitness")
    parser.add_argument("--out", required=True, help="embeddings TSV to write")
    parser.add_argument("--model", default=DEFAULT_MODEL, help="model hub id or local path")
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument(
        "--no-sequence", action="store_true", help="omit the sequence column from the output"
    )
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        records = read_sequence_table(args.input)
        summary = extract_embeddings(
            records,
            model_id=args.model,
            batch_size=args.batch_size,
            out_path=args.out,
            include_sequence=not args.no_sequence,
        )
    except Exception as exc:
        print(f"extract: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {summary.written} embeddings -> {args.out}")
    if summary.skipped:
        print(f"extract: {len(summary.skipped)} records skipped (see warnings)", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
