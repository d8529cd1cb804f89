import numpy as np
import pytest

from qubofit.surrogate import (
    QuboSurrogate,
    SurrogateError,
    build_features,
    build_feature_matrix,
    export_qubo,
    feature_count,
    fit_qubo,
    flip_deltas,
    import_qubo,
    predict,
    predict_batch,
)

from synth import all_codes, random_surrogate


def ridge_oracle(codes, y, lam):
    """Independent ridge solve: loop-built features, augmented lstsq (QR),
    centered features and targets with an unpenalized intercept."""
    codes = np.asarray(codes, dtype=float)
    n, m = codes.shape
    rows = []
    for row in codes:
        feats = list(row)
        for k in range(m):
            for l in range(k + 1, m):
                feats.append(row[k] * row[l])
        rows.append(feats)
    phi = np.array(rows)
    phi_mean = phi.mean(axis=0)
    ybar = y.mean()
    aug = np.vstack([phi - phi_mean, np.sqrt(lam) * np.eye(phi.shape[1])])
    target = np.concatenate([y - ybar, np.zeros(phi.shape[1])])
    w, *_ = np.linalg.lstsq(aug, target, rcond=None)
    return w, float(ybar - phi_mean @ w)


def two_bit_example():
    coupling = np.array([[0.0, 2.0], [2.0, 0.0]])
    return QuboSurrogate(linear=np.array([1.0, -1.0]), coupling=coupling, intercept=0.0)


# --- features ----------------------------------------------------------------


def test_build_features_m3():
    # pairs enumerate as (0,1), (0,2), (1,2)
    np.testing.assert_array_equal(build_features([1, 0, 1]), [1, 0, 1, 0, 1, 0])


@pytest.mark.parametrize("m,expected", [(8, 36), (16, 136), (32, 528), (64, 2080)])
def test_feature_count(m, expected):
    assert feature_count(m) == expected
    assert build_features(np.zeros(m, dtype=np.uint8)).shape[0] == expected


def test_features_all_zeros():
    assert not build_features(np.zeros(5)).any()


# --- fitting -----------------------------------------------------------------


def test_recovery_from_full_hypercube():
    truth = random_surrogate(8, seed=42)
    codes = all_codes(8)
    y = predict_batch(truth, codes)
    fit = fit_qubo(codes, y, 1e-8)
    np.testing.assert_allclose(fit.linear, truth.linear, atol=1e-6)
    np.testing.assert_allclose(fit.coupling, truth.coupling, atol=1e-6)


def test_interpolates_any_degree2_function():
    truth = random_surrogate(6, seed=5, intercept=3.7)
    codes = all_codes(6)
    y = predict_batch(truth, codes)
    fit = fit_qubo(codes, y, 1e-8)
    np.testing.assert_allclose(predict_batch(fit, codes), y, atol=1e-6)


def test_infinite_shrinkage_limit(rng):
    codes = rng.integers(0, 2, size=(40, 5), dtype=np.uint8)
    y = rng.normal(size=40)
    fit = fit_qubo(codes, y, 1e12)
    assert np.abs(fit.linear).max() < 1e-6
    assert np.abs(fit.coupling).max() < 1e-6
    np.testing.assert_allclose(predict_batch(fit, codes), y.mean(), atol=1e-6)


def test_duplicated_data_with_doubled_lambda(rng):
    codes = rng.integers(0, 2, size=(30, 4), dtype=np.uint8)
    y = rng.normal(size=30)
    once = fit_qubo(codes, y, 0.7)
    twice = fit_qubo(np.vstack([codes, codes]), np.concatenate([y, y]), 1.4)
    np.testing.assert_allclose(twice.linear, once.linear, atol=1e-10)
    np.testing.assert_allclose(twice.coupling, once.coupling, atol=1e-10)
    assert twice.intercept == pytest.approx(once.intercept, abs=1e-10)


def test_matches_independent_ridge_oracle(rng):
    codes = rng.integers(0, 2, size=(25, 5), dtype=np.uint8)
    y = rng.normal(size=25)
    dup_codes = np.vstack([codes, codes])
    dup_y = np.concatenate([y, y])
    for lam in (0.3, 1.0, 10.0):
        fit = fit_qubo(dup_codes, dup_y, lam)
        w, c = ridge_oracle(dup_codes, dup_y, lam)
        np.testing.assert_allclose(fit.weight_vector(), w, atol=1e-9)
        assert fit.intercept == pytest.approx(c, abs=1e-9)


def test_residual_path_monotone_in_lambda():
    rng = np.random.default_rng(77)
    codes = rng.integers(0, 2, size=(60, 6), dtype=np.uint8)
    y = rng.normal(size=60)
    residuals = []
    for lam in (1e4, 1e2, 1.0, 1e-2, 1e-4):
        fit = fit_qubo(codes, y, lam)
        residuals.append(np.linalg.norm(predict_batch(fit, codes) - y))
    assert all(r2 <= r1 + 1e-9 for r1, r2 in zip(residuals, residuals[1:]))


def test_fit_rejects_bad_lambda_and_shapes(rng):
    codes = rng.integers(0, 2, size=(4, 3), dtype=np.uint8)
    with pytest.raises(SurrogateError):
        fit_qubo(codes, np.zeros(4), 0.0)
    with pytest.raises(SurrogateError):
        fit_qubo(codes, np.zeros(5), 1.0)


# --- prediction --------------------------------------------------------------


def test_predict_all_zeros_gives_intercept():
    q = random_surrogate(6, seed=1, intercept=-2.5)
    assert predict(q, np.zeros(6, dtype=np.uint8)) == pytest.approx(-2.5)


def test_predict_two_bit_example():
    assert predict(two_bit_example(), np.array([1, 1])) == pytest.approx(2.0)


def test_predict_all_ones():
    q = random_surrogate(7, seed=3, intercept=0.25)
    iu, ju = np.triu_indices(7, k=1)
    expected = 0.25 + q.linear.sum() + q.coupling[iu, ju].sum()
    assert predict(q, np.ones(7, dtype=np.uint8)) == pytest.approx(expected, abs=1e-12)


def test_predict_dimension_mismatch():
    with pytest.raises(Exception):
        predict(two_bit_example(), np.array([1, 1, 0]))


def test_two_evaluation_paths_agree(rng):
    for m in (8, 16, 32):
        q = random_surrogate(m, seed=m, intercept=0.5)
        codes = rng.integers(0, 2, size=(200, m), dtype=np.uint8)
        via_matrix = predict_batch(q, codes)
        via_features = build_feature_matrix(codes) @ q.weight_vector() + q.intercept
        np.testing.assert_allclose(via_matrix, via_features, atol=1e-10)


def test_marginal_effect_identity(rng):
    q = random_surrogate(10, seed=8, intercept=1.0)
    for _ in range(25):
        x = rng.integers(0, 2, size=10, dtype=np.uint8)
        deltas = flip_deltas(q, x)
        for k in range(10):
            flipped = x.copy()
            flipped[k] ^= 1
            direct = predict(q, flipped) - predict(q, x)
            expected = q.linear[k] + q.coupling[k] @ x
            if x[k] == 1:
                expected = -expected
            assert direct == pytest.approx(expected, abs=1e-10)
            assert deltas[k] == pytest.approx(direct, abs=1e-10)


# --- parameter validation ------------------------------------------------------


def test_surrogate_rejects_nonzero_diagonal():
    bad = np.array([[0.5, 1.0], [1.0, 0.0]])
    with pytest.raises(SurrogateError, match="diagonal"):
        QuboSurrogate(linear=np.zeros(2), coupling=bad)


def test_surrogate_rejects_asymmetry():
    bad = np.array([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(SurrogateError, match="symmetric"):
        QuboSurrogate(linear=np.zeros(2), coupling=bad)


# --- QUBO file format ----------------------------------------------------------


def test_export_import_identical_values(tmp_path):
    q = two_bit_example()
    path = tmp_path / "model.qubo"
    export_qubo(q, path)
    again = import_qubo(path)
    np.testing.assert_array_equal(again.linear, q.linear)
    np.testing.assert_array_equal(again.coupling, q.coupling)
    assert again.intercept == q.intercept
    assert again.ridge_lambda == q.ridge_lambda


def test_round_trip_predictions_bit_close(tmp_path, rng):
    q = random_surrogate(16, seed=12, intercept=0.125)
    path = tmp_path / "m16.qubo"
    export_qubo(q, path)
    again = import_qubo(path)
    codes = rng.integers(0, 2, size=(500, 16), dtype=np.uint8)
    np.testing.assert_allclose(predict_batch(again, codes), predict_batch(q, codes), atol=1e-12)


def test_import_rejects_diagonal_coupling(tmp_path):
    path = tmp_path / "bad.qubo"
    path.write_text("m 2\nq 1 1 0.5\n")
    with pytest.raises(SurrogateError, match="diagonal"):
        import_qubo(path)


def test_import_rejects_reversed_pair(tmp_path):
    path = tmp_path / "bad.qubo"
    path.write_text("m 3\nq 2 1 0.5\n")
    with pytest.raises(SurrogateError, match="k < l"):
        import_qubo(path)


def test_import_rejects_out_of_range_index(tmp_path):
    path = tmp_path / "bad.qubo"
    path.write_text("m 2\nb 5 1.0\n")
    with pytest.raises(SurrogateError, match="out of range"):
        import_qubo(path)


def test_import_rejects_duplicate_entries(tmp_path):
    path = tmp_path / "dup.qubo"
    path.write_text("m 3\nb 0 1.0\nb 0 2.0\n")
    with pytest.raises(SurrogateError, match="duplicate bias"):
        import_qubo(path)
    path.write_text("m 3\nq 0 1 1.0\nq 0 1 2.0\n")
    with pytest.raises(SurrogateError, match="duplicate coupling"):
        import_qubo(path)


def test_import_requires_dimension_header(tmp_path):
    path = tmp_path / "bad.qubo"
    path.write_text("c 1.0\n")
    with pytest.raises(SurrogateError, match="'m'"):
        import_qubo(path)


def test_import_hand_written_file(tmp_path):
    path = tmp_path / "hand.qubo"
    path.write_text("# comment line\nm 2\nc 0\nb 0 1\nb 1 -1\nq 0 1 2\n")
    q = import_qubo(path)
    assert predict(q, np.array([1, 1])) == pytest.approx(2.0)
