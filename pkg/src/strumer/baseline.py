"""ADMM baseline on the plain Toeplitz model.

This recovers the signal through a single (N+L) x (N+L) PSD rank-K block
``[[Z, X^H], [X, T(t')]]`` without the Hankel-Toeplitz embedding. Its
optimal set is nonunique (a free positive scaling between Z and T(t')), so
the iteration typically fails to settle; it is kept to reproduce that
contrast against the embedded solver. Only entrywise objectives apply.
"""

import time

import numpy as np

from . import ops
from .errors import NumericalDivergenceError
from .prox import prox_abs_p
from .signals import Objective
from .solver import SolveDiagnostics, SolveResult, _as_omega, _hermitian_gaussian

__all__ = ["ToeplitzBaselineSolver", "solve_toeplitz"]


class ToeplitzBaselineSolver:
    """Single-solve ADMM on the un-embedded Toeplitz model."""

    def __init__(self, Y, mask, config):
        Y = np.asarray(Y, dtype=complex)
        if Y.ndim != 2 or not np.all(np.isfinite(Y)):
            raise ValueError("Y must be a finite N x L matrix")
        N, L = Y.shape
        self.objective = Objective(config.g, config.p)
        if self.objective.rowwise:
            raise ValueError("the Toeplitz baseline supports entrywise objectives only")
        if config.K >= N:
            raise ValueError(f"model order K={config.K} must satisfy K < N={N}")
        self.omega = _as_omega(mask, Y.shape)
        if not self.objective.masked and not self.omega.all():
            raise ValueError("incomplete data requires a masked objective")
        self.Y = Y
        self.N, self.L = N, L
        self.config = config
        self.gram_weights = ops.toeplitz_gram_weights(N)

        m = N + L
        self.X = Y.copy()
        self.Z = np.zeros((L, L), dtype=complex)
        self.tp = np.zeros(N, dtype=complex)  # length-N Toeplitz coefficients
        self.Q = np.zeros((m, m), dtype=complex)
        rng = np.random.default_rng(config.seed)
        var = config.lambda_init_scale * float(np.sum(np.abs(Y) ** 2)) / (N * L)
        self.Lam = np.zeros((m, m), dtype=complex)
        self.Lam[:L, :L] = _hermitian_gaussian(rng, 1, L, var)[0]
        self.Lam[L:, L:] = _hermitian_gaussian(rng, 1, N, var)[0]
        self.mu = config.mu0 if config.mu0 is not None else 1.0 / np.sqrt(N * L)
        self.iteration = 0
        self.block = self._assemble()
        self._adapt_frozen = not config.adapt
        self._history = {"primal": [], "dual": [], "combined": [], "mu": []}

    def _assemble(self):
        L = self.L
        out = np.empty((self.N + L, self.N + L), dtype=complex)
        out[:L, :L] = self.Z
        out[:L, L:] = np.conj(self.X.T)
        out[L:, :L] = self.X
        out[L:, L:] = ops.toeplitz_lift(self.tp)
        return out

    def step(self):
        self.iteration += 1
        X_prev, Z_prev, tp_prev, Lam_prev = self.X.copy(), self.Z, self.tp, self.Lam
        block_prev = self.block
        L = self.L

        try:
            self.Q = ops.psd_rank_projection(self.block - self.Lam / self.mu, self.config.K)
        except np.linalg.LinAlgError as exc:
            raise NumericalDivergenceError(
                f"block projection failed at iteration {self.iteration}: {exc}",
                diagnostics=self._diagnostics(False, 0.0),
            ) from exc
        W = self.Q + self.Lam / self.mu
        W2 = W[L:, :L]
        fitted = self.Y + prox_abs_p(W2 - self.Y, self.mu, self.objective.p)
        self.X = np.where(self.omega, fitted, W2) if self.objective.masked else fitted
        self.Z = W[:L, :L]
        self.tp = ops.toeplitz_adjoint(W[L:, L:]) / self.gram_weights
        new_block = self._assemble()
        self.Lam = self.Lam + self.mu * (self.Q - new_block)
        for arr, name in ((self.X, "signal"), (self.tp, "Toeplitz coefficient"),
                          (self.Lam, "multiplier")):
            if not np.all(np.isfinite(arr)):
                raise NumericalDivergenceError(
                    f"non-finite values after the {name} update at iteration "
                    f"{self.iteration}",
                    diagnostics=self._diagnostics(False, 0.0),
                )

        r_norm = float(np.linalg.norm(self.Q - new_block))
        s_norm = self.mu * float(np.linalg.norm(new_block - block_prev))
        combined = float(
            np.sum(np.abs(self.X - X_prev) ** 2)
            + np.sum(np.abs(self.Z - Z_prev) ** 2)
            + np.sum(np.abs(self.tp - tp_prev) ** 2)
            + np.sum(np.abs(self.Lam - Lam_prev) ** 2)
        )
        self.block = new_block
        return r_norm, s_norm, combined

    def _thresholds(self, block_norm):
        dim = 2 * (self.N + self.L) ** 2
        cfg = self.config
        base = np.sqrt(dim) * cfg.eps_abs
        eps_pri = base + cfg.eps_rel * max(float(np.linalg.norm(self.Q)), block_norm)
        eps_dual = base + cfg.eps_rel * float(np.linalg.norm(self.Lam))
        return eps_pri, eps_dual

    def _diagnostics(self, converged, wall_time):
        h = self._history
        return SolveDiagnostics(
            iterations=self.iteration,
            converged=converged,
            wall_time_s=wall_time,
            primal=np.asarray(h["primal"]),
            dual=np.asarray(h["dual"]),
            combined=np.asarray(h["combined"]),
            mu=np.asarray(h["mu"]),
        )

    def run(self, trace_sink=None):
        cfg = self.config
        start = time.perf_counter()
        converged = False
        combined_initial = None
        try:
            for _ in range(cfg.max_iters):
                mu_at_step = self.mu
                r_norm, s_norm, combined = self.step()
                self._history["primal"].append(r_norm)
                self._history["dual"].append(s_norm)
                self._history["combined"].append(combined)
                self._history["mu"].append(mu_at_step)
                if trace_sink is not None:
                    trace_sink(
                        f"{self.iteration},{mu_at_step:.9e},{r_norm:.9e},"
                        f"{s_norm:.9e},{combined:.9e}"
                    )
                if combined_initial is None:
                    combined_initial = max(combined, np.finfo(float).tiny)
                elif combined > 1e6 * combined_initial:
                    raise NumericalDivergenceError(
                        f"combined residual exceeded 1e6x its initial value at "
                        f"iteration {self.iteration}",
                        diagnostics=self._diagnostics(False, time.perf_counter() - start),
                    )
                eps_pri, eps_dual = self._thresholds(float(np.linalg.norm(self.block)))
                if r_norm <= eps_pri and s_norm <= eps_dual:
                    converged = True
                    break
                if combined < 10.0 * cfg.eps_abs:
                    self._adapt_frozen = True
                if not self._adapt_frozen and cfg.adapt_tau > 1.0 and (
                    self.iteration <= 100 or self.iteration % 10 == 0
                ):
                    if r_norm > cfg.adapt_rho * s_norm:
                        self.mu *= cfg.adapt_tau
                        self.Lam *= cfg.adapt_tau
                    elif s_norm > cfg.adapt_rho * r_norm:
                        self.mu /= cfg.adapt_tau
                        self.Lam /= cfg.adapt_tau
        except NumericalDivergenceError as exc:
            if exc.diagnostics is not None:
                exc.diagnostics.wall_time_s = time.perf_counter() - start
            raise
        wall = time.perf_counter() - start
        return SolveResult(
            X=self.X.copy(),
            t=self.tp.copy(),
            tl=self.tp[None, :].copy(),
            diagnostics=self._diagnostics(converged, wall),
        )


def solve_toeplitz(Y, mask, config, trace_sink=None):
    """Run the Toeplitz-model baseline; output mirrors :func:`strumer.solver.solve`."""
    return ToeplitzBaselineSolver(Y, mask, config).run(trace_sink=trace_sink)
