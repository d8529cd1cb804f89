#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture at tests/data/synthetic_small.tsv."""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from synth import planted_dataset  # noqa: E402

from qubofit.dataset import save_dataset  # noqa: E402


def main() -> None:
    ds, _truth = planted_dataset(n=300, d=16, m=8, seed=20250810)
    out = ROOT / "tests" / "data" / "synthetic_small.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(ds, out)
    print(f"wrote {out} ({ds.n_records} records, d={ds.dim})")


if __name__ == "__main__":
    main()
