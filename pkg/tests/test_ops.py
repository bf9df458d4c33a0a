"""Structured operator tests: lifts, adjoints, weights, PSD projection, blocks."""

import numpy as np
import pytest

from strumer import ops
from strumer.signals import (
    FrequencyAmplitudeModel,
    exact_embedding,
    steering_vector,
    synthesize,
)


def _random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _random_proper(rng, n):
    t = _random_complex(rng, n)
    t[0] = t[0].real
    return t


# ------------------------------------------------------------------ hankel


def test_hankel_lift_definition():
    out = ops.hankel_lift(np.array([1.0, 2.0j, 3.0]))
    assert np.array_equal(out, np.array([[1.0, 2.0j], [2.0j, 3.0]]))


def test_hankel_lift_single_sample():
    c = 2.5 - 1.0j
    assert np.array_equal(ops.hankel_lift(np.array([c])), np.array([[c]]))


def test_hankel_lift_rejects_even_length():
    with pytest.raises(ValueError, match="missing"):
        ops.hankel_lift(np.zeros(4))


def test_hankel_lift_steering_is_rank_one():
    # lift of a pure sinusoid equals the (non-conjugate) outer product of the
    # half-length steering vector
    a5 = steering_vector(0.25, 5)
    a3 = steering_vector(0.25, 3)
    expected = np.outer(a3, a3)
    assert np.allclose(ops.hankel_lift(a5), expected, atol=1e-14)


def test_hankel_adjoint_antidiagonal_sums():
    out = ops.hankel_adjoint(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert np.array_equal(out, np.array([1.0, 5.0, 4.0]))
    assert np.array_equal(ops.hankel_adjoint(np.eye(2)), np.array([1.0, 0.0, 1.0]))


def test_hankel_adjoint_identity_random():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(1, 33))
        x = _random_complex(rng, 2 * n - 1)
        M = _random_complex(rng, n, n)
        lhs = ops.real_inner(ops.hankel_lift(x), M)
        rhs = ops.real_inner(x, ops.hankel_adjoint(M))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_hankel_weights():
    assert np.array_equal(ops.hankel_weights(3), [1, 2, 3, 2, 1])
    assert np.array_equal(ops.hankel_weights(1), [1])
    for n in (1, 2, 7, 16):
        w = ops.hankel_weights(n)
        assert w.sum() == n * n
        assert np.array_equal(w, ops.hankel_adjoint(np.ones((n, n))))


def test_hankel_weights_scale_lifted_composition():
    # adjoint of the lift multiplies each sample by its multiplicity
    rng = np.random.default_rng(2)
    x = _random_complex(rng, 9)
    comp = ops.hankel_adjoint(ops.hankel_lift(x))
    assert np.allclose(comp, ops.hankel_weights(5) * x, atol=1e-13)


# ------------------------------------------------------------------ toeplitz


def test_toeplitz_lift_definition():
    out = ops.toeplitz_lift(np.array([2.0, 1.0 + 1.0j]))
    assert np.array_equal(out, np.array([[2.0, 1.0 - 1.0j], [1.0 + 1.0j, 2.0]]))


def test_toeplitz_lift_first_basis_vector_gives_identity():
    e1 = np.zeros(4, dtype=complex)
    e1[0] = 1.0
    assert np.array_equal(ops.toeplitz_lift(e1), np.eye(4))


def test_toeplitz_lift_exactly_hermitian():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(1, 17))
        T = ops.toeplitz_lift(_random_proper(rng, n))
        assert np.array_equal(T, np.conj(T.T))


def test_toeplitz_lift_rejects_improper():
    with pytest.raises(ValueError, match="proper"):
        ops.toeplitz_lift(np.array([1.0 + 1e-6j, 0.0]))


def test_toeplitz_lift_single_component_vandermonde():
    # coefficients of a one-component decomposition lift to the scaled
    # conjugate outer product of the steering vector
    model = FrequencyAmplitudeModel([0.1], [[1.0]])
    _, t = exact_embedding(model, 6)
    a = steering_vector(0.1, 6)
    assert np.allclose(ops.toeplitz_lift(t), np.outer(a, np.conj(a)), atol=1e-12)


def test_toeplitz_adjoint_identity_matrix():
    # oracle: adjoint identity against random proper coefficients
    rng = np.random.default_rng(4)
    M = np.eye(2, dtype=complex)
    u = ops.toeplitz_adjoint(M)
    assert np.allclose(u, [2.0, 0.0])
    for _ in range(10):
        t = _random_proper(rng, 2)
        assert abs(ops.real_inner(ops.toeplitz_lift(t), M) - ops.coeff_inner(t, u)) < 1e-12


def test_toeplitz_adjoint_of_lift_scales_by_multiplicity():
    t = np.array([1.0, 1.0j])
    u = ops.toeplitz_adjoint(ops.toeplitz_lift(t))
    assert np.allclose(u, [2.0, 2.0j], atol=1e-14)


def test_toeplitz_adjoint_identity_random():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(1, 33))
        t = _random_proper(rng, n)
        M = _random_complex(rng, n, n)
        lhs = ops.real_inner(ops.toeplitz_lift(t), M)
        rhs = ops.coeff_inner(t, ops.toeplitz_adjoint(M))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_toeplitz_adjoint_of_hermitian_is_proper():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = int(rng.integers(1, 17))
        M = _random_complex(rng, n, n)
        M = 0.5 * (M + np.conj(M.T))
        u = ops.toeplitz_adjoint(M)
        assert u[0].imag == 0.0


def test_gram_weights_match_basis_composition():
    # oracle: apply adjoint(lift(.)) to coefficient basis vectors
    for n in (1, 2, 5, 9):
        expected = ops.toeplitz_gram_weights(n)
        for k in range(n):
            e = np.zeros(n, dtype=complex)
            e[k] = 1.0 if k == 0 else 1.0 + 0.5j
            comp = ops.toeplitz_adjoint(ops.toeplitz_lift(e))
            assert np.allclose(comp, expected[k] * e, atol=1e-13)


def test_toeplitz_normal_solve():
    assert np.allclose(ops.toeplitz_normal_solve(np.array([4.0, 2.0])), [2.0, 1.0])
    assert np.array_equal(ops.toeplitz_normal_solve(np.zeros(5)), np.zeros(5))
    rng = np.random.default_rng(7)
    for _ in range(10):
        n = int(rng.integers(1, 17))
        u = _random_proper(rng, n)
        back = ops.toeplitz_adjoint(ops.toeplitz_lift(ops.toeplitz_normal_solve(u)))
        assert np.allclose(back, u, atol=1e-12)


# ------------------------------------------------------------------ psd projection


def test_psd_rank_projection_diagonal():
    out = ops.psd_rank_projection(np.diag([3.0, 2.0, -1.0]), 2)
    assert np.allclose(out, np.diag([3.0, 2.0, 0.0]), atol=1e-12)


def test_psd_rank_projection_fixed_point():
    rng = np.random.default_rng(8)
    for K in (1, 2, 3):
        V = np.linalg.qr(_random_complex(rng, 6, K))[0]
        M = V @ np.diag(rng.uniform(0.5, 2.0, K)) @ np.conj(V.T)
        assert np.allclose(ops.psd_rank_projection(M, K), M, atol=1e-10)


def test_psd_rank_projection_indefinite_rank_one():
    # brute-force two-eigenvalue construction: keep vv^H, drop -0.5 ww^H
    rng = np.random.default_rng(9)
    v = _random_complex(rng, 5)
    v /= np.linalg.norm(v)
    w = _random_complex(rng, 5)
    w -= (np.conj(v) @ w) * v
    w /= np.linalg.norm(w)
    M = np.outer(v, np.conj(v)) - 0.5 * np.outer(w, np.conj(w))
    assert np.allclose(ops.psd_rank_projection(M, 1), np.outer(v, np.conj(v)), atol=1e-12)


def test_psd_rank_projection_idempotent_and_rank_bounded():
    rng = np.random.default_rng(10)
    for _ in range(25):
        m = int(rng.integers(2, 12))
        K = int(rng.integers(1, m + 2))
        M = _random_complex(rng, m, m)
        P = ops.psd_rank_projection(M, K)
        assert np.allclose(ops.psd_rank_projection(P, K), P, atol=1e-10)
        w = np.linalg.eigvalsh(P)
        top = max(w[-1], 1e-30)
        assert (w >= -1e-10 * top).all()
        assert np.sum(w > 1e-10 * top) <= K


def test_psd_rank_projection_large_rank_is_psd_part():
    M = np.diag([2.0, 1.0, -3.0])
    out = ops.psd_rank_projection(M, 10)
    assert np.allclose(out, np.diag([2.0, 1.0, 0.0]), atol=1e-12)


def test_psd_rank_projection_rejects_bad_rank():
    with pytest.raises(ValueError):
        ops.psd_rank_projection(np.eye(3), 0)


# ------------------------------------------------------------------ blocks


def test_assemble_block_zero():
    out = ops.assemble_block(np.zeros(3), np.zeros(3), np.zeros(5))
    assert np.array_equal(out, np.zeros((6, 6)))


def test_assemble_disassemble_round_trip():
    rng = np.random.default_rng(11)
    n = 4
    tl = _random_proper(rng, n)
    t = _random_proper(rng, n)
    x = _random_complex(rng, 2 * n - 1)
    B = ops.assemble_block(tl, t, x)
    W1, W2, W3 = ops.disassemble_block(B)
    assert np.array_equal(W1, ops.toeplitz_lift(np.conj(tl)))
    assert np.array_equal(W2, ops.hankel_lift(x))
    assert np.array_equal(W3, ops.toeplitz_lift(t))
    herm_err = np.linalg.norm(B - np.conj(B.T)) / max(np.linalg.norm(B), 1e-30)
    assert herm_err <= 1e-12


def test_assemble_block_dimension_mismatch():
    with pytest.raises(ValueError):
        ops.assemble_block(np.zeros(3), np.zeros(3), np.zeros(7))


def test_disassemble_rejects_odd_size():
    with pytest.raises(ValueError):
        ops.disassemble_block(np.zeros((5, 5)))


def test_certificate_blocks_psd_low_rank():
    # embedding construction: blocks are PSD with numerical rank at most K
    rng = np.random.default_rng(12)
    for _ in range(20):
        n = int(rng.integers(3, 16))
        K = int(rng.integers(1, min(4, n - 1) + 1))
        L = int(rng.integers(1, 5))
        while True:
            f = np.sort(rng.uniform(-0.5, 0.5, K))
            gaps = np.diff(np.concatenate([f, [f[0] + 1.0]]))
            if K == 1 or gaps.min() >= 1.0 / n:
                break
        S = _random_complex(rng, K, L) / np.sqrt(2)
        model = FrequencyAmplitudeModel(f, S)
        tl, t = exact_embedding(model, n)
        Xs = synthesize(model, 2 * n - 1)
        B = ops.assemble_block(tl, np.broadcast_to(t, tl.shape), Xs.T)
        w = np.linalg.eigvalsh(B)
        top = w[:, -1].max()
        assert (w >= -1e-10 * top).all()
        assert (np.sort(w, axis=1)[:, -(K + 1)] <= 1e-8 * top).all()
        assert np.abs(tl.sum(axis=0) - L * t).max() <= 1e-10
