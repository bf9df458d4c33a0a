"""Dimensionality reduction for many-channel Gaussian problems.

When L >> N under a squared-Frobenius objective, the data can be replaced by
an N x N square root of Y Y^H without changing the frequency solution, cutting
the per-iteration eigendecomposition count from L to N. The masked variant
applies when whole rows are missing across all channels: the observed rows are
reduced and re-embedded at their original positions.
"""

import numpy as np

from .postprocess import EstimationResult, amplitude_ls, root_music, vandermonde_powers
from .solver import solve

__all__ = ["reduce_data", "should_reduce", "solve_reduced"]


def reduce_data(Y):
    """Hermitian PSD square root of Y Y^H (N x N), via eigendecomposition.

    The eigen-route handles the rank deficiency of Y Y^H cleanly; negative
    rounding eigenvalues are clipped to zero. Satisfies
    ``Y_R @ Y_R^H == Y @ Y^H`` to rounding.
    """
    Y = np.asarray(Y, dtype=complex)
    G = Y @ np.conj(Y.T)
    G = 0.5 * (G + np.conj(G.T))
    w, V = np.linalg.eigh(G)
    w = np.maximum(w, 0.0)
    return (V * np.sqrt(w)) @ np.conj(V.T)


def should_reduce(N, L, mode="auto"):
    """Resolve the --reduce {off,auto,on} policy; auto triggers when L > 2N."""
    if mode == "off":
        return False
    if mode == "on":
        return True
    if mode == "auto":
        return L > 2 * N
    raise ValueError(f"unknown reduce mode {mode!r}")


def solve_reduced(Y, mask, config, trace_sink=None):
    """Solve on reduced data and extract frequencies; amplitudes refit on the
    original data.

    Only squared-Frobenius objectives are valid (the reduction argument relies
    on unitary invariance); the masked variant additionally requires a
    row-wise mask. When L is no larger than the effective sample count the
    unreduced solver is used directly.
    """
    Y = np.asarray(Y, dtype=complex)
    N, L = Y.shape
    if config.g not in ("fro2", "masked_fro2"):
        raise ValueError(
            "dimensionality reduction applies to squared-Frobenius objectives only"
        )
    omega = np.asarray(getattr(mask, "omega", mask), dtype=bool) if mask is not None else None
    if omega is None:
        omega = np.ones((N, L), dtype=bool)

    if config.g == "fro2" or omega.all():
        rows = np.ones(N, dtype=bool)
    else:
        if not (omega == omega[:, :1]).all():
            raise ValueError("masked reduction requires a row-wise observation pattern")
        rows = omega[:, 0]
    M = int(rows.sum())

    if L <= min(N, M):
        result = solve(Y, omega, config, trace_sink=trace_sink)
        reduced = False
    else:
        Yr = reduce_data(Y[rows])  # (M, M)
        y_embed = np.zeros((N, M), dtype=complex)
        y_embed[rows] = Yr
        omega_r = np.repeat(rows[:, None], M, axis=1)
        result = solve(y_embed, omega_r, config, trace_sink=trace_sink)
        reduced = True

    f = root_music(result.t, config.K)
    powers = vandermonde_powers(result.t, f)
    S = amplitude_ls(f, Y, omega)
    return EstimationResult(
        f=f,
        S=S,
        powers=powers,
        t=result.t,
        diagnostics=result.diagnostics,
        method="strumer-dr" if reduced else "strumer",
        extras={"reduced": reduced},
    )
