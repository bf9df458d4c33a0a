"""Frequency extraction from recovered Toeplitz coefficients and scoring.

Frequencies are read off the rank-deficient PSD Toeplitz matrix through its
Vandermonde decomposition, computed with Root-MUSIC: root the polynomial built
from the noise subspace and keep the K roots nearest the unit circle.
"""

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import ops
from .errors import ExtractionError
from .signals import vandermonde

__all__ = [
    "EstimationResult",
    "root_music",
    "vandermonde_powers",
    "amplitude_ls",
    "wrap_frequency",
    "frequency_rmse",
    "matched_rmse",
]

_UNIT_CIRCLE_TOL = 1e-6
_RECIPROCAL_PAIR_TOL = 1e-4
_POLISH_ITERS = 30


@dataclass
class EstimationResult:
    """Estimated frequencies (sorted ascending), amplitudes, and powers."""

    f: np.ndarray
    S: np.ndarray
    powers: np.ndarray
    t: np.ndarray | None = None
    diagnostics: object = None
    method: str = "strumer"
    extras: dict = field(default_factory=dict)


def wrap_frequency(x):
    """Signed distance on the unit-circumference circle, in [-1/2, 1/2)."""
    return (np.asarray(x, dtype=float) + 0.5) % 1.0 - 0.5


def _polish_frequency(upper, f0, max_move):
    """Newton refinement of one frequency on the null spectrum.

    ``upper[d]`` holds the d-th superdiagonal sum of the noise-subspace outer
    product, so the spectrum is ``q(f) = upper[0] + 2 Re sum_d upper[d]
    e^{i 2 pi f d}``. Polynomial roots of exact rank-deficient inputs are
    double roots on the unit circle (square-root conditioned); minimizing q
    directly restores full precision.
    """
    d = np.arange(1, upper.size)
    f = f0
    for _ in range(_POLISH_ITERS):
        phased = upper[1:] * np.exp(2j * np.pi * f * d)
        grad = -4.0 * np.pi * float(np.sum(d * phased.imag))
        curv = -8.0 * np.pi**2 * float(np.sum(d * d * phased.real))
        if curv <= 0:
            break
        step = grad / curv
        if abs(f - step - f0) > max_move:
            break
        f -= step
        if abs(step) < 1e-15:
            break
    return f


def root_music(t, K):
    """Recover K frequencies from Toeplitz coefficients via Root-MUSIC.

    Eigendecomposes the Hermitian Toeplitz lift of ``t`` (small negative
    eigenvalues are floored at zero), forms the degree-2(n-1) polynomial from
    the noise subspace, and takes the K roots inside (or on) the unit circle
    whose modulus is closest to 1, skipping conjugate-reciprocal partners of
    roots already taken. Each kept root's angle is then polished by a few
    Newton steps on the null spectrum.

    Returns frequencies in [-1/2, 1/2), sorted ascending.
    """
    t = np.asarray(t, dtype=complex)
    n = t.size
    if K < 1 or K >= n:
        raise ValueError(f"need 1 <= K < n, got K={K}, n={n}")
    if not np.any(np.abs(t) > 0):
        raise ValueError("cannot extract frequencies from all-zero coefficients")
    R = ops.toeplitz_lift(t)
    w, U = np.linalg.eigh(R)
    floor = -1e-8 * max(float(w[-1]), 0.0)
    w = np.where(w < floor, 0.0, w)  # recovered matrices are only near-PSD
    noise = U[:, : n - K]
    C = noise @ np.conj(noise.T)
    # coefficient of z^d is the d-th superdiagonal sum; Hermitian symmetry is
    # enforced exactly so roots pair as (z, 1/conj(z))
    upper = np.array([np.trace(C, offset=d) for d in range(n)])
    upper[0] = upper[0].real
    coeffs = np.concatenate([upper[:0:-1], np.conj(upper)])  # degree high -> low
    roots = np.roots(coeffs)
    if roots.size < K:
        raise ExtractionError("noise-subspace polynomial has too few roots")

    order = np.argsort(np.abs(np.abs(roots) - 1.0))
    inside = [r for r in roots[order] if abs(r) <= 1.0 + _UNIT_CIRCLE_TOL]
    picked = []
    for pool in (inside, list(roots[order])):
        for r in pool:
            if len(picked) == K:
                break
            if any(abs(r * np.conj(q) - 1.0) < _RECIPROCAL_PAIR_TOL for q in picked):
                continue
            if any(r == q for q in picked):
                continue
            picked.append(r)
        if len(picked) == K:
            break
    if len(picked) < K:
        raise ExtractionError(f"could only isolate {len(picked)} of {K} roots")
    f = np.angle(np.asarray(picked)) / (2.0 * np.pi)
    max_move = 1.0 / (8.0 * n)
    f = np.array([_polish_frequency(upper, fk, max_move) for fk in f])
    return np.sort(wrap_frequency(f))


def vandermonde_powers(t, f):
    """Nonnegative powers fitting the Toeplitz lift of t by A diag(p) A^H.

    Least-squares over real p (stacking real and imaginary parts), clipped at
    zero; exact on coefficients that admit the decomposition.
    """
    t = np.asarray(t, dtype=complex)
    f = np.atleast_1d(np.asarray(f, dtype=float))
    n, K = t.size, f.size
    A = vandermonde(f, n)
    basis = np.einsum("ik,jk->kij", A, np.conj(A)).reshape(K, n * n).T  # columns a_k a_k^H
    target = ops.toeplitz_lift(t).reshape(n * n)
    G = np.concatenate([basis.real, basis.imag])
    y = np.concatenate([target.real, target.imag])
    p, *_ = np.linalg.lstsq(G, y, rcond=None)
    return np.maximum(p, 0.0)


def amplitude_ls(f, Y, mask=None):
    """Per-channel least-squares amplitudes of the sinusoid model on observed rows.

    Channels whose restricted steering matrix is column-rank deficient are
    reported through a warning; their least-norm solution is still returned.
    """
    f = np.atleast_1d(np.asarray(f, dtype=float))
    Y = np.asarray(Y, dtype=complex)
    N, L = Y.shape
    K = f.size
    if K == 0:
        return np.zeros((0, L), dtype=complex)
    omega = np.ones((N, L), dtype=bool) if mask is None else np.asarray(
        getattr(mask, "omega", mask), dtype=bool
    )
    A = vandermonde(f, N)
    S = np.zeros((K, L), dtype=complex)
    deficient = []
    for l in range(L):
        rows = omega[:, l]
        sol, _, rank, _ = np.linalg.lstsq(A[rows], Y[rows, l], rcond=None)
        if rank < K:
            deficient.append(l)
        S[:, l] = sol
    if deficient:
        warnings.warn(
            f"rank-deficient amplitude fit in channel(s) {deficient}", RuntimeWarning
        )
    return S


def matched_rmse(est, true, wrap=True, matching="optimal"):
    """RMSE between two equal-length parameter sets under the best pairing.

    ``matching='optimal'`` minimizes over permutations (brute force up to
    K = 6, greedy nearest-match beyond); ``'sorted'`` pairs by sort order.
    Differences are wrapped onto the unit circle when ``wrap`` is true.
    """
    est = np.atleast_1d(np.asarray(est, dtype=float))
    true = np.atleast_1d(np.asarray(true, dtype=float))
    if est.size != true.size:
        raise ValueError("estimate and truth must have equal length")
    K = true.size
    if K == 0:
        return 0.0

    def dist(a, b):
        d = a - b
        return wrap_frequency(d) if wrap else d

    if matching == "sorted":
        d = dist(np.sort(est), np.sort(true))
        return float(np.sqrt(np.mean(d**2)))
    if matching != "optimal":
        raise ValueError(f"unknown matching mode {matching!r}")
    if K <= 6:
        best = np.inf
        for perm in itertools.permutations(range(K)):
            d = dist(est[list(perm)], true)
            best = min(best, float(np.sum(d**2)))
        return float(np.sqrt(best / K))
    # greedy nearest-match for larger K
    remaining = list(range(K))
    total = 0.0
    for k in range(K):
        dists = [abs(dist(est[j], true[k])) for j in remaining]
        j = remaining.pop(int(np.argmin(dists)))
        total += float(dist(est[j], true[k]) ** 2)
    return float(np.sqrt(total / K))


def frequency_rmse(f_est, f_true, matching="optimal"):
    """Frequency RMSE sqrt(mean squared wrapped error) under optimal pairing."""
    return matched_rmse(f_est, f_true, wrap=True, matching=matching)
