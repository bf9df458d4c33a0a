"""AIC/BIC model-order selection wrapping repeated solves.

For each candidate order, the solver and frequency extraction run from
scratch, the concentrated Gaussian likelihood is evaluated at the per-entry
ML residual variance over the observed entries, and the penalized score is
minimized (ties break toward the smaller order). Valid for squared-Frobenius
objectives, where the fit is a Gaussian likelihood.
"""

import dataclasses
import warnings
from dataclasses import dataclass

import numpy as np

from .postprocess import EstimationResult, amplitude_ls, root_music, vandermonde_powers
from .signals import vandermonde
from .solver import SolverConfig, solve

__all__ = ["OrderScore", "OrderSelection", "select_order"]


@dataclass
class OrderScore:
    k: int
    score: float
    neg2_loglik: float
    penalty: float
    sigma2_hat: float
    failed: bool = False


@dataclass
class OrderSelection:
    k_star: int
    scores: list
    results: dict  # candidate order -> EstimationResult


def _criterion_terms(criterion, k, N, L, n_obs):
    if criterion == "aic":
        return 2.0, (2 * L + 1) * k + 1
    if criterion == "bic":
        # the complete-data penalty uses ln(2 N L); with missing entries the
        # observed count replaces N L
        eta = np.log(2.0 * n_obs) if n_obs < N * L else np.log(2.0 * N * L)
        return eta, (2 * L + 3) * k + 1
    raise ValueError(f"unknown criterion {criterion!r}; expected 'aic' or 'bic'")


def select_order(Y, mask, k_max, criterion="bic", base_config=None):
    """Pick the model order minimizing the information criterion over 1..k_max.

    Returns an :class:`OrderSelection` with the winning order, the per-order
    score table, and the per-order estimation results. Orders whose solve or
    extraction fails are excluded with a warning; if all fail, raises.
    """
    Y = np.asarray(Y, dtype=complex)
    N, L = Y.shape
    omega = np.asarray(getattr(mask, "omega", mask), dtype=bool) if mask is not None else np.ones(
        (N, L), dtype=bool
    )
    base_config = base_config or SolverConfig()
    if base_config.g not in ("fro2", "masked_fro2"):
        raise ValueError("order selection uses the Gaussian likelihood; g must be Frobenius")
    n = (N + 1) // 2
    if not 1 <= k_max < n:
        raise ValueError(f"need 1 <= k_max < n = {n}, got {k_max}")
    n_obs = int(omega.sum())

    scores, results = [], {}
    for k in range(1, k_max + 1):
        seed_k = int(np.random.SeedSequence([base_config.seed, k]).generate_state(1)[0])
        config = dataclasses.replace(base_config, K=k, seed=seed_k)
        try:
            sol = solve(Y, omega, config)
            f = root_music(sol.t, k)
            S = amplitude_ls(f, Y, omega)
        except Exception as exc:  # per-order failure excludes the candidate
            warnings.warn(f"order {k} failed and is excluded: {exc}", RuntimeWarning)
            scores.append(OrderScore(k, np.inf, np.inf, np.inf, np.nan, failed=True))
            continue
        residual = np.where(omega, vandermonde(f, N) @ S - Y, 0.0)
        sigma2_hat = float(np.sum(np.abs(residual) ** 2)) / n_obs
        neg2 = 2.0 * n_obs * (np.log(np.pi * sigma2_hat) + 1.0)
        eta, n_params = _criterion_terms(criterion, k, N, L, n_obs)
        penalty = eta * n_params
        scores.append(OrderScore(k, neg2 + penalty, neg2, penalty, sigma2_hat))
        results[k] = EstimationResult(
            f=f,
            S=S,
            powers=vandermonde_powers(sol.t, f),
            t=sol.t,
            diagnostics=sol.diagnostics,
        )
    valid = [s for s in scores if not s.failed]
    if not valid:
        raise RuntimeError("every candidate order failed")
    k_star = min(valid, key=lambda s: (s.score, s.k)).k
    return OrderSelection(k_star=k_star, scores=scores, results=results)
