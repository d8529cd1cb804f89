import numpy as np
import pytest

from qubofit.dataset import DatasetError, load_dataset, save_dataset, split, subsample

from conftest import write_tsv


HEADER = ["id", "fitness", "e0", "e1", "e2", "e3"]


def make_file(tmp_path, rows, header=None):
    return write_tsv(tmp_path / "data.tsv", header or HEADER, rows)


def test_load_well_formed(tmp_path):
    path = make_file(
        tmp_path,
        [
            ["a", 1.5, 0.1, 0.2, 0.3, 0.4],
            ["b", -2.0, 1.0, 1.1, 1.2, 1.3],
            ["c", "3e-1", 2.0, 2.1, 2.2, 2.3],
        ],
    )
    ds = load_dataset(path)
    assert ds.n_records == 3
    assert ds.dim == 4
    assert ds.sequences is None
    assert ds.ids == ("a", "b", "c")
    assert ds.fitness[2] == pytest.approx(0.3)
    assert ds.embeddings[1, 0] == 1.0


def test_load_with_sequence_column(tmp_path):
    path = make_file(
        tmp_path,
        [["a", "MKV", 1.0, 0.1, 0.2], ["b", "MKA", 2.0, 0.3, 0.4]],
        header=["id", "sequence", "fitness", "e0", "e1"],
    )
    ds = load_dataset(path)
    assert ds.sequences == ("MKV", "MKA")
    assert ds.dim == 2


def test_load_accepts_crlf(tmp_path):
    path = tmp_path / "crlf.tsv"
    path.write_bytes(b"id\tfitness\te0\r\na\t1.0\t0.5\r\n")
    ds = load_dataset(path)
    assert ds.n_records == 1 and ds.embeddings[0, 0] == 0.5


def test_ragged_row_names_row_2(tmp_path):
    path = make_file(
        tmp_path,
        [
            ["a", 1.0, 0.1, 0.2, 0.3, 0.4],
            ["b", 2.0, 0.1, 0.2, 0.3],  # 3 embedding values, header declares 4
            ["c", 3.0, 0.1, 0.2, 0.3, 0.4],
        ],
    )
    with pytest.raises(DatasetError, match=r"row 2.*3 embedding values.*declares 4"):
        load_dataset(path)


def test_nan_fitness_names_cell(tmp_path):
    path = make_file(
        tmp_path,
        [["a", 1.0, 0.1, 0.2, 0.3, 0.4], ["b", "nan", 0.1, 0.2, 0.3, 0.4]],
    )
    with pytest.raises(DatasetError, match=r"row 2.*fitness"):
        load_dataset(path)


def test_inf_embedding_names_cell(tmp_path):
    path = make_file(tmp_path, [["a", 1.0, 0.1, "inf", 0.3, 0.4]])
    with pytest.raises(DatasetError, match=r"row 1.*e1"):
        load_dataset(path)


def test_unparseable_embedding_names_cell(tmp_path):
    path = make_file(tmp_path, [["a", 1.0, 0.1, "oops", 0.3, 0.4]])
    with pytest.raises(DatasetError, match=r"row 1.*e1"):
        load_dataset(path)


def test_missing_fitness_column(tmp_path):
    path = write_tsv(tmp_path / "bad.tsv", ["id", "e0", "e1"], [["a", 0.1, 0.2]])
    with pytest.raises(DatasetError, match="fitness"):
        load_dataset(path)


def test_empty_file(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("")
    with pytest.raises(DatasetError, match="empty"):
        load_dataset(path)


def test_unknown_format_tag_rejected(tmp_path):
    path = make_file(tmp_path, [["a", 1.0, 0.1, 0.2, 0.3, 0.4]])
    with pytest.raises(DatasetError, match="unknown dataset format"):
        load_dataset(path, fmt="parquet")


def test_save_load_round_trip(tmp_path, small_dataset):
    out = tmp_path / "echo.tsv"
    save_dataset(small_dataset, out)
    again = load_dataset(out)
    assert again.ids == small_dataset.ids
    np.testing.assert_allclose(again.embeddings, small_dataset.embeddings, rtol=1e-11)
    np.testing.assert_allclose(again.fitness, small_dataset.fitness, rtol=1e-11)


# --- subsample -------------------------------------------------------------


def test_subsample_all_is_identity_set(small_dataset):
    out = subsample(small_dataset, small_dataset.n_records, seed=3)
    assert sorted(out.ids) == sorted(small_dataset.ids)


def test_subsample_deterministic(small_dataset):
    a = subsample(small_dataset, 2, seed=7)
    b = subsample(small_dataset, 2, seed=7)
    assert a.ids == b.ids
    np.testing.assert_array_equal(a.embeddings, b.embeddings)


def test_subsample_rejects_oversize(small_dataset):
    with pytest.raises(DatasetError):
        subsample(small_dataset, small_dataset.n_records + 1, seed=0)


def test_subsample_uniformity():
    # Monte Carlo check: drawing 1 of 4 records 1000 times hits each ~0.25
    ds = subsample_fixture(4)
    counts = {i: 0 for i in ds.ids}
    for trial in range(1000):
        counts[subsample(ds, 1, seed=trial).ids[0]] += 1
    for c in counts.values():
        assert abs(c / 1000 - 0.25) <= 0.05


def test_subsample_preserves_pairing(small_dataset):
    out = subsample(small_dataset, 50, seed=11)
    lookup = {rid: i for i, rid in enumerate(small_dataset.ids)}
    for j, rid in enumerate(out.ids):
        i = lookup[rid]
        assert out.fitness[j] == small_dataset.fitness[i]
        np.testing.assert_array_equal(out.embeddings[j], small_dataset.embeddings[i])


def subsample_fixture(n):
    from qubofit.dataset import FitnessDataset

    return FitnessDataset(
        ids=tuple(f"r{i}" for i in range(n)),
        embeddings=np.arange(2 * n, dtype=float).reshape(n, 2),
        fitness=np.arange(n, dtype=float),
    )


# --- split -----------------------------------------------------------------


def test_split_80_20_sizes():
    ds = subsample_fixture(10)
    train, test = split(ds, 0.8, seed=0)
    assert (train.n_records, test.n_records) == (8, 2)


def test_split_round_half_up():
    ds = subsample_fixture(5)
    train, test = split(ds, 0.8, seed=0)
    assert (train.n_records, test.n_records) == (4, 1)


def test_split_deterministic_and_seed_sensitive(small_dataset):
    t1, _ = split(small_dataset, 0.8, seed=5)
    t2, _ = split(small_dataset, 0.8, seed=5)
    t3, _ = split(small_dataset, 0.8, seed=6)
    assert t1.ids == t2.ids
    assert set(t1.ids) != set(t3.ids)


def test_split_disjoint_cover(small_dataset):
    train, test = split(small_dataset, 0.8, seed=5)
    assert set(train.ids).isdisjoint(test.ids)
    assert set(train.ids) | set(test.ids) == set(small_dataset.ids)


def test_split_preserves_pairing(small_dataset):
    train, test = split(small_dataset, 0.8, seed=2)
    lookup = {rid: i for i, rid in enumerate(small_dataset.ids)}
    for part in (train, test):
        for j, rid in enumerate(part.ids):
            i = lookup[rid]
            assert part.fitness[j] == small_dataset.fitness[i]
            np.testing.assert_array_equal(part.embeddings[j], small_dataset.embeddings[i])


def test_split_rejects_empty_part():
    ds = subsample_fixture(3)
    with pytest.raises(DatasetError):
        split(ds, 0.01, seed=0)
    with pytest.raises(DatasetError):
        split(ds, 0.99, seed=0)
