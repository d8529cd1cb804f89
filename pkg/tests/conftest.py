from pathlib import Path

import numpy as np
import pytest

from qubofit.dataset import load_dataset

DATA_DIR = Path(__file__).parent / "data"


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if "test_acceptance" not in report.nodeid or report.when != "call":
        return
    name = report.nodeid.split("::")[-1]
    verdict = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {verdict}: {name}")


@pytest.fixture(scope="session")
def small_dataset():
    return load_dataset(DATA_DIR / "synthetic_small.tsv")


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def write_tsv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(str(v) for v in row) + "\n")
    return path
