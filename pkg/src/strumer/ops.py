"""Hankel / Hermitian-Toeplitz lift operators, their adjoints, and the
rank-constrained PSD projection.

Conventions
-----------
A complex vector ``x`` of odd length ``N = 2n - 1`` lifts to the n x n Hankel
matrix with entry ``(i, j) = x[i + j]`` (0-based), constant on anti-diagonals
and exactly symmetric (non-conjugate).

A "proper" coefficient vector ``t`` in C^n (real first entry) lifts to the
n x n Hermitian Toeplitz matrix with ``t[k]`` on the k-th subdiagonal and
``conj(t[k])`` on the k-th superdiagonal.

All functions are pure and accept stacked inputs: any number of leading batch
dimensions before the vector/matrix axes. Real inner products are
``<A, B> = Re tr(A^H B)``; the coefficient-side counterpart treats the real
first entry and the real/imaginary parts of the remaining entries as
coordinates.
"""

from functools import lru_cache

import numpy as np

__all__ = [
    "hankel_lift",
    "hankel_adjoint",
    "hankel_weights",
    "toeplitz_lift",
    "toeplitz_adjoint",
    "toeplitz_gram_weights",
    "toeplitz_normal_solve",
    "psd_rank_projection",
    "assemble_block",
    "disassemble_block",
    "real_inner",
    "coeff_inner",
]

PROPER_IMAG_TOL = 1e-12
EIG_POSITIVE_RTOL = 1e-12


@lru_cache(maxsize=None)
def _hankel_index(n):
    idx = np.arange(n)[:, None] + np.arange(n)[None, :]
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=None)
def _toeplitz_index(n):
    # index into the length 2n-1 "two-sided" coefficient vector, offset n-1
    idx = np.arange(n)[:, None] - np.arange(n)[None, :] + n - 1
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=None)
def _antidiag_scatter(n, dtype=np.float64):
    """0/1 matrix (n^2, 2n-1) summing flattened matrix cells per anti-diagonal.

    Cached per dtype: matching the operand dtype keeps the matmul from
    re-upcasting the scatter matrix on every call.
    """
    flat = _hankel_index(n).ravel()
    scatter = np.zeros((n * n, 2 * n - 1), dtype=dtype)
    scatter[np.arange(n * n), flat] = 1.0
    scatter.setflags(write=False)
    return scatter


@lru_cache(maxsize=None)
def _diag_scatter(n, dtype=np.float64):
    """0/1 matrix (n^2, 2n-1) summing flattened matrix cells per diagonal i-j."""
    flat = _toeplitz_index(n).ravel()
    scatter = np.zeros((n * n, 2 * n - 1), dtype=dtype)
    scatter[np.arange(n * n), flat] = 1.0
    scatter.setflags(write=False)
    return scatter


def _scatter_dtype(M):
    return np.complex128 if np.iscomplexobj(M) else np.float64


def hankel_lift(x):
    """Lift a length-N vector (N = 2n - 1 odd) to the n x n Hankel matrix.

    Parameters
    ----------
    x : array_like, shape (..., N)
        Sample vector(s); N must be odd.

    Returns
    -------
    np.ndarray, shape (..., n, n)
        Matrix with entry (i, j) equal to ``x[..., i + j]``; exactly
        symmetric (non-conjugate).
    """
    x = np.asarray(x)
    N = x.shape[-1]
    if N < 1 or N % 2 == 0:
        raise ValueError(
            f"Hankel lift needs an odd sample length, got N={N}; for even N "
            "treat the (N+1)-st sample as missing and use a masked objective."
        )
    n = (N + 1) // 2
    return x[..., _hankel_index(n)]


def hankel_adjoint(M):
    """Adjoint of :func:`hankel_lift`: anti-diagonal sums of a square matrix.

    Satisfies ``<hankel_lift(x), M> = <x, hankel_adjoint(M)>`` under the real
    inner product for every x.
    """
    M = np.asarray(M)
    n = M.shape[-1]
    if M.shape[-2] != n:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M.reshape(M.shape[:-2] + (n * n,)) @ _antidiag_scatter(n, _scatter_dtype(M))


def hankel_weights(n):
    """Multiplicity of each sample across the Hankel matrix: [1,...,n,...,1]."""
    if n < 1:
        raise ValueError("n must be positive")
    up = np.arange(1, n + 1, dtype=float)
    return np.concatenate([up, up[-2::-1]])


def _check_proper(t):
    t = np.asarray(t, dtype=complex)
    if t.shape[-1] < 1:
        raise ValueError("coefficient vector must be non-empty")
    bad = np.abs(t[..., 0].imag) > PROPER_IMAG_TOL
    if np.any(bad):
        raise ValueError(
            "Toeplitz coefficients must be proper: first entry real "
            f"(|imag| <= {PROPER_IMAG_TOL:g})"
        )
    return t


def toeplitz_lift(t):
    """Lift proper coefficients t in C^n to the Hermitian Toeplitz matrix.

    Entry ``(i, j)`` with ``i >= j`` is ``t[i - j]``; the upper triangle is
    filled by conjugate symmetry, so the output is exactly Hermitian.
    """
    t = _check_proper(t)
    n = t.shape[-1]
    two_sided = np.concatenate([np.conj(t[..., :0:-1]), t], axis=-1)
    return two_sided[..., _toeplitz_index(n)]


def toeplitz_adjoint(M):
    """Adjoint of :func:`toeplitz_lift` under the real inner product.

    The first output entry is the real part of the main-diagonal sum; entry
    k >= 1 is the k-th subdiagonal sum plus the conjugate of the k-th
    superdiagonal sum. For Hermitian M the result is proper.
    """
    M = np.asarray(M)
    n = M.shape[-1]
    if M.shape[-2] != n:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    sums = M.reshape(M.shape[:-2] + (n * n,)) @ _diag_scatter(n, _scatter_dtype(M))
    # sums[..., n-1+k] is the k-th subdiagonal; n-1-k the k-th superdiagonal
    out = np.empty(M.shape[:-2] + (n,), dtype=complex)
    out[..., 0] = sums[..., n - 1].real
    if n > 1:
        out[..., 1:] = sums[..., n:] + np.conj(sums[..., n - 2 :: -1])
    return out


def toeplitz_gram_weights(n):
    """Diagonal of the coefficient-space Gram map of the Toeplitz lift.

    Composing the lift with its adjoint scales the first coefficient by n and
    coefficient k >= 1 by 2(n - k).
    """
    if n < 1:
        raise ValueError("n must be positive")
    w = 2.0 * np.arange(n, 0, -1, dtype=float)
    w[0] = float(n)
    return w


def toeplitz_normal_solve(u):
    """Invert the Gram map of the Toeplitz lift on coefficients (a diagonal solve)."""
    u = np.asarray(u, dtype=complex)
    return u / toeplitz_gram_weights(u.shape[-1])


def psd_rank_projection(M, K):
    """Project onto Hermitian PSD matrices of rank at most K.

    The input is Hermitian-symmetrized, eigendecomposed, and rebuilt from the
    largest K eigenvalues that exceed a small positive threshold
    (``1e-12 * max(lambda_max, 1)``); everything else is set to zero.

    Parameters
    ----------
    M : array_like, shape (..., m, m)
    K : int
        Rank bound, at least 1.

    Returns
    -------
    np.ndarray, shape (..., m, m)
        The projected matrix, in the PSD rank-<=K set.
    """
    if K < 1:
        raise ValueError("rank bound K must be at least 1")
    M = np.asarray(M, dtype=complex)
    m = M.shape[-1]
    if M.shape[-2] != m:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    sym = 0.5 * (M + np.conj(np.swapaxes(M, -1, -2)))
    try:
        w, V = np.linalg.eigh(sym)  # ascending eigenvalues
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise np.linalg.LinAlgError(f"eigendecomposition failed: {exc}") from exc
    k = min(K, m)
    wk = w[..., m - k :]
    thresh = EIG_POSITIVE_RTOL * np.maximum(w[..., -1:], 1.0)
    wk = np.where(wk > thresh, wk, 0.0)
    Vk = V[..., m - k :]
    return (Vk * wk[..., None, :]) @ np.conj(np.swapaxes(Vk, -1, -2))


def assemble_block(tl, t, x):
    """Assemble the 2n x 2n Hankel-Toeplitz block for one (or a stack of) channel(s).

    Layout: ``[[T(conj(tl)), (H x)^H], [H x, T(t)]]`` where T and H are the
    Toeplitz and Hankel lifts. With proper ``tl`` and ``t`` the result is
    exactly Hermitian.

    Parameters
    ----------
    tl : array_like, shape (..., n)
        Per-channel Toeplitz coefficients.
    t : array_like, shape (..., n)
        Shared Toeplitz coefficients (broadcast against ``tl``).
    x : array_like, shape (..., N)
        Per-channel samples, N = 2n - 1.
    """
    tl = np.asarray(tl, dtype=complex)
    t = np.asarray(t, dtype=complex)
    x = np.asarray(x, dtype=complex)
    n = tl.shape[-1]
    if t.shape[-1] != n or x.shape[-1] != 2 * n - 1:
        raise ValueError(
            f"inconsistent dimensions: tl has n={n}, t has n={t.shape[-1]}, "
            f"x has N={x.shape[-1]} (expected {2 * n - 1})"
        )
    H = hankel_lift(x)
    top_left = toeplitz_lift(np.conj(tl))
    bottom_right = toeplitz_lift(t)
    batch = np.broadcast_shapes(H.shape[:-2], top_left.shape[:-2], bottom_right.shape[:-2])
    out = np.empty(batch + (2 * n, 2 * n), dtype=complex)
    out[..., :n, :n] = top_left
    out[..., :n, n:] = np.conj(H)  # (H x)^H, using Hankel symmetry
    out[..., n:, :n] = H
    out[..., n:, n:] = bottom_right
    return out


def disassemble_block(B):
    """Split a 2n x 2n block into its (upper-left, lower-left, lower-right) quadrants.

    No structure is imposed; quadrants are returned by position.
    """
    B = np.asarray(B)
    m = B.shape[-1]
    if B.shape[-2] != m or m % 2 != 0:
        raise ValueError(f"expected an even-sized square block, got shape {B.shape}")
    n = m // 2
    return B[..., :n, :n], B[..., n:, :n], B[..., n:, n:]


def real_inner(A, B):
    """Real inner product Re tr(A^H B) of equal-shape arrays."""
    A = np.asarray(A)
    B = np.asarray(B)
    return float(np.sum(np.conj(A) * B).real)


def coeff_inner(t, u):
    """Coefficient-space real inner product matching :func:`toeplitz_adjoint`."""
    return real_inner(np.asarray(t, dtype=complex), np.asarray(u, dtype=complex))
