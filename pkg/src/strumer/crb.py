"""Deterministic Cramer-Rao bound for frequency estimation under Gaussian
noise with arbitrary observation masks.

The Fisher information sums, over channels, the projected derivative energy
``(2/sigma^2) Re{ B_l^H D^H [P_l - P_l A (A^H P_l A)^{-1} A^H P_l] D B_l }``
with ``B_l = diag(S[:, l])``, ``D`` the columnwise frequency derivative of the
steering matrix, and ``P_l`` the diagonal observation indicator of channel l.
Complete data is the all-ones-mask special case.
"""

import warnings

import numpy as np

from .signals import vandermonde

__all__ = ["steering_derivative", "crb_frequencies", "root_mean_crb"]

_COND_WARN = 1e10


def steering_derivative(f, m):
    """Columnwise derivative of the steering matrix with respect to each frequency."""
    f = np.atleast_1d(np.asarray(f, dtype=float))
    j = np.arange(m)
    return (2j * np.pi * j)[:, None] * np.exp(2j * np.pi * np.outer(j, f))


def crb_frequencies(f, S, sigma2, mask):
    """CRB matrix (K x K, real PSD) for the frequencies, in squared RMSE units.

    Parameters
    ----------
    f : array_like, shape (K,)
        True frequencies in cycles/sample.
    S : array_like, shape (K, L)
        True amplitudes.
    sigma2 : float
        Per-entry noise variance (the nominal component's variance for
        mixture noise, giving the Gaussian-component bound).
    mask : bool array (N, L) or ObservationMask
        Observed-entry indicator; N is taken from it.

    Raises
    ------
    ValueError if the Fisher information is singular (frequencies are not
    identifiable under this mask).
    """
    f = np.atleast_1d(np.asarray(f, dtype=float))
    S = np.asarray(S, dtype=complex)
    if S.ndim == 1:
        S = S[:, None]
    omega = np.asarray(getattr(mask, "omega", mask), dtype=bool)
    N, L = omega.shape
    K = f.size
    if S.shape != (K, L):
        raise ValueError(f"amplitudes must be (K, L) = ({K}, {L}), got {S.shape}")
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    A = vandermonde(f, N)
    D = steering_derivative(f, N)
    fisher = np.zeros((K, K), dtype=float)
    for l in range(L):
        w = omega[:, l].astype(float)
        Aw = A * w[:, None]
        Dw = D * w[:, None]
        M = np.conj(A.T) @ Aw  # A^H P A
        AhD = np.conj(A.T) @ Dw
        if np.linalg.cond(M) > _COND_WARN:
            warnings.warn(
                f"ill-conditioned steering Gram matrix in channel {l} "
                f"(cond > {_COND_WARN:g})",
                RuntimeWarning,
            )
        try:
            core = np.conj(D.T) @ Dw - np.conj(AhD.T) @ np.linalg.solve(M, AhD)
        except np.linalg.LinAlgError as exc:
            raise ValueError(
                f"singular steering Gram matrix in channel {l}: frequencies are "
                "not identifiable under this mask"
            ) from exc
        s = S[:, l]
        fisher += (np.conj(s)[:, None] * core * s[None, :]).real
    fisher *= 2.0 / sigma2
    cond = np.linalg.cond(fisher)
    if not np.isfinite(cond):
        raise ValueError("singular Fisher information: frequencies unidentifiable")
    if cond > _COND_WARN:
        warnings.warn(f"ill-conditioned Fisher information (cond={cond:.2e})", RuntimeWarning)
    crb = np.linalg.inv(fisher)
    return 0.5 * (crb + crb.T)


def root_mean_crb(crb):
    """sqrt of the mean diagonal CRB: the bound matching the RMSE definition."""
    crb = np.asarray(crb, dtype=float)
    return float(np.sqrt(np.trace(crb) / crb.shape[0]))
