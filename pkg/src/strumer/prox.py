"""Proximity operators for |.|^p on complex scalars and for row l2-norms.

``prox(a)`` minimizes ``|u|^p + beta * |u - a|^2`` over complex u for
exponents p in [1, 2]. The minimizer is ``sign(a) * z`` where z in [0, |a|]
solves ``2 beta z + p z^(p-1) - 2 beta |a| = 0``; p = 1 degenerates to soft
thresholding and p = 2 is linear. Everything is vectorized over numpy arrays
with broadcasting between ``beta`` and the arguments.
"""

import numpy as np

__all__ = ["solve_z", "prox_abs_p", "prox_row_l2p"]

_Z_ATOL = 1e-13
_MAX_NEWTON_ITERS = 200


def _validate(beta, p):
    if not 1.0 <= p <= 2.0:
        raise ValueError(f"exponent p must lie in [1, 2], got {p}")
    if np.any(np.asarray(beta) <= 0):
        raise ValueError("beta must be positive")


def _solve_z_newton(beta, p, a):
    """Safeguarded Newton solve of 2*beta*z + p*z^(p-1) = 2*beta*a on [0, a].

    The residual is increasing and concave in z for p in (1, 2), so any
    Newton iterate leaving the current sign bracket is replaced by its
    midpoint. Termination is residual-based; when the iterate sits below the
    absolute tolerance with a positive residual the root is provably below
    tolerance and is snapped to zero (for p near 1 the root scales like
    (2 beta a / p)^(1/(p-1)) and can underflow any fixed tolerance).
    """
    a = np.asarray(a, dtype=float)
    beta = np.broadcast_to(np.asarray(beta, dtype=float), a.shape)
    lo = np.zeros_like(a)
    hi = a.copy()
    z = a.copy()
    active = a > 0
    z_tol = _Z_ATOL * np.maximum(1.0, a)
    h_tol = 1e-12 * np.maximum(1.0, 2.0 * beta * a)
    for _ in range(_MAX_NEWTON_ITERS):
        if not np.any(active):
            break
        zs = np.where(active, z, 1.0)  # keep powers finite on settled entries
        h = 2.0 * beta * zs + p * zs ** (p - 1.0) - 2.0 * beta * a
        lo = np.where(active & (h < 0), zs, lo)
        hi = np.where(active & (h > 0), zs, hi)
        snap = active & (h > 0) & (zs <= z_tol)
        z = np.where(snap, 0.0, z)
        done = snap | (active & (np.abs(h) <= h_tol))
        active = active & ~done
        hp = 2.0 * beta + p * (p - 1.0) * zs ** (p - 2.0)
        zn = zs - h / hp
        fallback = ~np.isfinite(zn) | (zn <= lo) | (zn >= hi)
        zn = np.where(fallback, 0.5 * (lo + hi), zn)
        z = np.where(active, zn, z)
    return z


def solve_z(beta, p, a_abs):
    """Magnitude of the |.|^p prox: the root of its scalar optimality equation.

    Parameters
    ----------
    beta : float or array
        Positive quadratic weight(s).
    p : float
        Exponent in [1, 2].
    a_abs : float or array
        Nonnegative magnitude(s) of the prox argument.

    Returns
    -------
    z with the shape of ``broadcast(beta, a_abs)``; for p > 1 the unique root
    of ``2 beta z + p z^(p-1) - 2 beta a_abs = 0`` in [0, a_abs], and for
    p = 1 the soft threshold ``max(a_abs - 1/(2 beta), 0)``.
    """
    _validate(beta, p)
    a = np.asarray(a_abs, dtype=float)
    if np.any(a < 0):
        raise ValueError("a_abs must be nonnegative")
    beta_arr = np.asarray(beta, dtype=float)
    scalar = a.ndim == 0 and beta_arr.ndim == 0
    a, beta_arr = np.broadcast_arrays(a, beta_arr)
    if p == 1.0:
        z = np.maximum(a - 0.5 / beta_arr, 0.0)
    elif p == 2.0:
        z = beta_arr * a / (beta_arr + 1.0)
    elif p == 1.5:
        # quadratic in sqrt(z): 2 b w^2 + 1.5 w - 2 b a = 0
        w = (-1.5 + np.sqrt(2.25 + 16.0 * beta_arr**2 * a)) / (4.0 * beta_arr)
        z = w * w
    else:
        z = _solve_z_newton(beta_arr, p, a)
    z = np.minimum(z, a)
    return float(z) if scalar else z


def prox_abs_p(a, beta, p):
    """Prox of |.|^p with quadratic weight beta: ``sign(a) * solve_z(beta, p, |a|)``.

    ``sign(a)`` is ``a / |a|`` for nonzero a and 0 at a = 0, so the origin is
    a fixed point for every p.
    """
    a = np.asarray(a)
    a_abs = np.abs(a)
    z = solve_z(beta, p, a_abs)
    scale = np.divide(z, a_abs, out=np.zeros_like(np.asarray(z, dtype=float)), where=a_abs > 0)
    out = a * scale
    return complex(out) if np.ndim(out) == 0 and np.iscomplexobj(a) else out


def prox_row_l2p(row, beta, p):
    """Prox of the l2-norm composed with |.|^p on a complex row vector.

    Shrinks the norm by the scalar prox and keeps the direction:
    ``prox(||row||) * row / ||row||``; the zero row maps to zero.
    """
    row = np.asarray(row, dtype=complex)
    norm = float(np.linalg.norm(row))
    if norm == 0.0:
        _validate(beta, p)
        return np.zeros_like(row)
    z = solve_z(beta, p, norm)
    return (z / norm) * row
