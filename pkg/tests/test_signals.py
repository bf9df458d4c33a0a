"""Signal synthesis, noise, mask, and embedding-certificate tests."""

import numpy as np
import pytest

from strumer import ops
from strumer.signals import (
    FrequencyAmplitudeModel,
    MaskSpec,
    NoiseModel,
    Objective,
    complete_mask,
    exact_embedding,
    make_mask,
    observe,
    sample_noise,
    snr_to_sigma,
    steering_vector,
    synthesize,
    vandermonde,
)


def test_steering_vector_values():
    assert np.allclose(steering_vector(0.0, 3), [1, 1, 1])
    assert np.allclose(steering_vector(-0.5, 3), [1, -1, 1])
    assert np.allclose(steering_vector(0.25, 4), [1, 1j, -1, -1j], atol=1e-15)
    assert np.allclose(np.abs(steering_vector(0.123, 64)), 1.0)


def test_synthesize_constant_and_empty():
    model = FrequencyAmplitudeModel([0.0], np.ones((1, 2)))
    assert np.allclose(synthesize(model, 5), np.ones((5, 2)))
    empty = FrequencyAmplitudeModel(np.zeros(0), np.zeros((0, 3)))
    assert np.array_equal(synthesize(empty, 4), np.zeros((4, 3)))


def test_synthesize_matches_entrywise_model():
    rng = np.random.default_rng(0)
    f = np.array([-0.31, 0.02, 0.4])
    S = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    model = FrequencyAmplitudeModel(f, S)
    X = synthesize(model, 9)
    for j in range(9):
        for l in range(2):
            direct = sum(np.exp(2j * np.pi * f[k] * j) * S[k, l] for k in range(3))
            assert X[j, l] == pytest.approx(direct, abs=1e-12)


def test_synthesized_hankel_rank_bounded():
    rng = np.random.default_rng(1)
    model = FrequencyAmplitudeModel(
        [-0.2, 0.05, 0.3], rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    )
    X = synthesize(model, 11)
    for l in range(4):
        sv = np.linalg.svd(ops.hankel_lift(X[:, l]), compute_uv=False)
        assert (sv[3:] <= 1e-10 * sv[0]).all()


def test_model_validation():
    with pytest.raises(ValueError, match="distinct"):
        FrequencyAmplitudeModel([0.1, 0.1], np.ones((2, 1)))
    with pytest.raises(ValueError):
        FrequencyAmplitudeModel([0.6], np.ones((1, 1)))
    with pytest.raises(ValueError):
        FrequencyAmplitudeModel([0.1, 0.2], np.ones((1, 1)))


def test_snr_to_sigma():
    assert snr_to_sigma(0.0) == 1.0
    assert snr_to_sigma(10.0) == pytest.approx(0.1)
    assert snr_to_sigma(20.0) == pytest.approx(0.01)


def test_zero_variance_noise_is_zero():
    rng = np.random.default_rng(2)
    E = sample_noise(NoiseModel("gaussian", 0.0), 6, 3, rng)
    assert np.array_equal(E, np.zeros((6, 3)))


def test_gmm_with_no_outliers_matches_nominal_variance():
    rng = np.random.default_rng(3)
    E = sample_noise(NoiseModel("gmm", 2.0, c2=0.0, sigma2_outlier=200.0), 400, 50, rng)
    assert np.mean(np.abs(E) ** 2) == pytest.approx(2.0, rel=0.05)


def test_gmm_moment_matches_mixture_variance():
    rng = np.random.default_rng(4)
    noise = NoiseModel("gmm", 1.0, c2=0.1, sigma2_outlier=100.0)
    E = sample_noise(noise, 1000, 100, rng)
    expected = 0.9 * 1.0 + 0.1 * 100.0
    assert np.mean(np.abs(E) ** 2) == pytest.approx(expected, rel=0.05)


def test_row_gmm_draws_component_per_row():
    # with a zero nominal variance, outlier rows are entirely nonzero and
    # nominal rows entirely zero
    rng = np.random.default_rng(5)
    noise = NoiseModel("row_gmm", 0.0, c2=0.5, sigma2_outlier=1.0)
    E = sample_noise(noise, 60, 8, rng)
    row_nonzero = np.abs(E) > 0
    assert ((row_nonzero.sum(axis=1) == 0) | (row_nonzero.sum(axis=1) == 8)).all()
    assert 0 < row_nonzero[:, 0].sum() < 60


def test_gmm_element_pattern_is_not_row_aligned():
    rng = np.random.default_rng(6)
    noise = NoiseModel("gmm", 0.0, c2=0.5, sigma2_outlier=1.0)
    E = sample_noise(noise, 60, 8, rng)
    counts = (np.abs(E) > 0).sum(axis=1)
    assert ((counts > 0) & (counts < 8)).any()


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel("cauchy", 1.0)
    with pytest.raises(ValueError):
        NoiseModel("gmm", 1.0, c2=1.5, sigma2_outlier=1.0)
    with pytest.raises(ValueError):
        NoiseModel("gaussian", -1.0)


def test_complete_and_row_masks():
    rng = np.random.default_rng(7)
    assert make_mask(MaskSpec("complete"), 5, 2).omega.all()
    full = make_mask(MaskSpec("row", rows_kept=5), 5, 2, rng)
    assert full.omega.all()
    partial = make_mask(MaskSpec("row", rows_kept=3), 7, 4, rng)
    assert partial.count == 12
    assert partial.row_pattern
    assert (partial.omega == partial.omega[:, :1]).all()


def test_element_mask_exact_count():
    rng = np.random.default_rng(8)
    mask = make_mask(MaskSpec("element", fraction=0.8), 45, 3, rng)
    assert mask.count == 108  # 0.8 * 135
    assert not mask.row_pattern or mask.complete


def test_mask_validation():
    rng = np.random.default_rng(9)
    with pytest.raises(ValueError):
        MaskSpec("element", fraction=0.0)
    with pytest.raises(ValueError):
        MaskSpec("row")
    with pytest.raises(ValueError):
        make_mask(MaskSpec("row", rows_kept=9), 5, 2, rng)
    with pytest.raises(ValueError):
        make_mask(MaskSpec("element", fraction=0.5), 10, 2)  # rng required


def test_observe_masks_and_tags():
    rng = np.random.default_rng(10)
    model = FrequencyAmplitudeModel([0.2], np.ones((1, 2)))
    X = synthesize(model, 7)
    mask = make_mask(MaskSpec("element", fraction=0.5), 7, 2, rng)
    obs = observe(X, np.zeros_like(X), mask, Objective("masked_fro2"))
    assert np.array_equal(obs.y[~mask.omega], np.zeros(mask.omega.size - mask.count))
    assert np.array_equal(obs.y[mask.omega], X[mask.omega])
    E = rng.standard_normal((7, 2))
    obs2 = observe(np.zeros((7, 2)), E, complete_mask(7, 2))
    assert np.array_equal(obs2.y, E)


def test_objective_validation():
    assert Objective("fro2", p=1.3).p == 2.0  # Frobenius tags pin p = 2
    assert Objective("l2p", p=1.0).rowwise
    assert Objective("masked_lp", p=1.5).masked
    with pytest.raises(ValueError):
        Objective("l1")
    with pytest.raises(ValueError):
        Objective("lp", p=2.5)


def test_exact_embedding_single_component():
    model = FrequencyAmplitudeModel([0.15], [[1.0]])
    tl, t = exact_embedding(model, 4)
    assert np.allclose(tl[0], t, atol=1e-14)
    assert t[0] == pytest.approx(1.0)  # unit power


def test_exact_embedding_two_channels_unit_powers():
    # |s| = 1 in both channels: shared power 1, per-channel powers 1
    model = FrequencyAmplitudeModel([0.15], np.array([[1.0, 1.0j]]))
    tl, t = exact_embedding(model, 5)
    assert np.allclose(tl[0], t, atol=1e-14)
    assert np.allclose(tl[1], t, atol=1e-14)
    assert t[0] == pytest.approx(1.0)


def test_exact_embedding_sum_constraint():
    rng = np.random.default_rng(11)
    for _ in range(20):
        K, L, n = int(rng.integers(1, 4)), int(rng.integers(1, 5)), 12
        f = np.sort(rng.uniform(-0.5, 0.49, K))
        while np.unique(f).size < K:
            f = np.sort(rng.uniform(-0.5, 0.49, K))
        S = rng.standard_normal((K, L)) + 1j * rng.standard_normal((K, L))
        tl, t = exact_embedding(FrequencyAmplitudeModel(f, S), n)
        assert np.abs(tl.sum(axis=0) - L * t).max() <= 1e-10
        T = ops.toeplitz_lift(t)
        expected = vandermonde(f, n) @ np.diag(np.linalg.norm(S, axis=1) / np.sqrt(L)) @ np.conj(
            vandermonde(f, n).T
        )
        assert np.allclose(T, expected, atol=1e-10)


def test_exact_embedding_rejects_zero_power_and_large_order():
    with pytest.raises(ValueError):
        exact_embedding(FrequencyAmplitudeModel([0.1], [[0.0]]), 4)
    with pytest.raises(ValueError):
        exact_embedding(FrequencyAmplitudeModel([0.1, 0.2], np.ones((2, 1))), 2)
