"""ADMM solver for rank-constrained Hankel-Toeplitz block matrix recovery.

The noiseless multichannel signal is represented through L block matrices
``[[T(conj(t_l)), (H x_l)^H], [H x_l, T(t)]]`` constrained to be PSD of rank
at most K, with the channel Toeplitz coefficients summing to L times the
shared ones. Each sweep alternates

1. a truncated-eigendecomposition projection of every block (the auxiliary
   variables Q_l),
2. a closed-form signal update through entrywise or row-wise proximity
   operators, depending on the data-fit objective,
3. a coupled closed-form update of the Toeplitz coefficients via Lagrange
   multipliers, and
4. a dual ascent on the multipliers.

Stopping follows the usual scaled-ADMM bookkeeping: the primal residual is
the stacked block-constraint violation, the dual residual is the penalty
times the change of the assembled blocks between sweeps, and both are
compared against ``sqrt(dim) * eps_abs + eps_rel * scale`` thresholds.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import ops
from .errors import NumericalDivergenceError
from .prox import prox_abs_p, solve_z
from .signals import Objective, ObservationMask

__all__ = ["SolverConfig", "SolveDiagnostics", "SolveResult", "StrumerSolver", "solve"]


@dataclass
class SolverConfig:
    """Solver settings.

    ``K`` is the model order (rank bound), ``g``/``p`` select the data-fit
    objective, and ``mu0`` defaults to ``1/sqrt(N L)`` at init. The penalty is
    adapted by factor ``adapt_tau`` whenever one residual exceeds
    ``adapt_rho`` times the other. Multiplier diagonal blocks are initialized
    with Hermitian complex Gaussian draws whose per-entry variance is
    ``lambda_init_scale`` times the mean observed power.
    """

    K: int = 1
    p: float = 2.0
    g: str = "fro2"
    mu0: float | None = None
    adapt: bool = True
    adapt_tau: float = 2.0
    adapt_rho: float = 10.0
    eps_abs: float = 1e-4
    eps_rel: float = 1e-5
    max_iters: int = 3000
    lambda_init_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("model order K must be at least 1")
        if self.mu0 is not None and self.mu0 <= 0:
            raise ValueError("mu0 must be positive")
        if self.eps_abs <= 0 or self.eps_rel <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.adapt_tau < 1.0 or self.adapt_rho <= 0:
            raise ValueError("penalty adaptation needs tau >= 1 and rho > 0")
        if self.lambda_init_scale < 0:
            raise ValueError("lambda_init_scale must be nonnegative")


@dataclass
class SolveDiagnostics:
    iterations: int = 0
    converged: bool = False
    wall_time_s: float = 0.0
    primal: np.ndarray = field(default_factory=lambda: np.empty(0))
    dual: np.ndarray = field(default_factory=lambda: np.empty(0))
    combined: np.ndarray = field(default_factory=lambda: np.empty(0))
    mu: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def terminal_primal(self):
        return float(self.primal[-1]) if self.iterations else np.inf

    @property
    def terminal_dual(self):
        return float(self.dual[-1]) if self.iterations else np.inf

    @property
    def terminal_combined(self):
        return float(self.combined[-1]) if self.iterations else np.inf


@dataclass
class SolveResult:
    X: np.ndarray
    t: np.ndarray
    tl: np.ndarray
    diagnostics: SolveDiagnostics


def _as_omega(mask, shape):
    if mask is None:
        return np.ones(shape, dtype=bool)
    if isinstance(mask, ObservationMask):
        return mask.omega
    return np.asarray(mask, dtype=bool)


def _hermitian_gaussian(rng, L, n, var):
    if var == 0.0:
        return np.zeros((L, n, n), dtype=complex)
    G = np.sqrt(var / 2.0) * (
        rng.standard_normal((L, n, n)) + 1j * rng.standard_normal((L, n, n))
    )
    return 0.5 * (G + np.conj(np.swapaxes(G, -1, -2)))


class StrumerSolver:
    """Single-solve ADMM state machine; one instance owns one problem.

    Iterates live as attributes (``X``, ``tl``, ``t``, ``Q``, ``Lam``,
    ``mu``) so the individual updates can be driven and inspected directly;
    :meth:`run` executes the full loop.
    """

    def __init__(self, Y, mask, config):
        Y = np.asarray(Y, dtype=complex)
        if Y.ndim != 2:
            raise ValueError("Y must be an N x L matrix")
        if not np.all(np.isfinite(Y)):
            raise ValueError("Y must be finite")
        N, L = Y.shape
        if N % 2 == 0:
            raise ValueError(
                "sample length must be odd; mark the extra sample missing and "
                "use a masked objective for even lengths"
            )
        self.n = (N + 1) // 2
        if config.K >= self.n:
            raise ValueError(f"model order K={config.K} must satisfy K < n={self.n}")
        self.N, self.L = N, L
        self.config = config
        self.objective = Objective(config.g, config.p)
        self.omega = _as_omega(mask, Y.shape)
        if self.omega.shape != Y.shape:
            raise ValueError("mask and data dimensions differ")
        if not self.objective.masked and not self.omega.all():
            raise ValueError("incomplete data requires a masked objective")
        self.Y = Y

        n = self.n
        self.d_weights = ops.hankel_weights(n)
        self.gram_weights = ops.toeplitz_gram_weights(n)
        self.X = Y.copy()
        self.tl = np.zeros((L, n), dtype=complex)
        self.t = np.zeros(n, dtype=complex)
        self.Q = np.zeros((L, 2 * n, 2 * n), dtype=complex)
        rng = np.random.default_rng(config.seed)
        var = config.lambda_init_scale * float(np.sum(np.abs(Y) ** 2)) / (N * L)
        self.Lam = np.zeros((L, 2 * n, 2 * n), dtype=complex)
        self.Lam[:, :n, :n] = _hermitian_gaussian(rng, L, n, var)
        self.Lam[:, n:, n:] = _hermitian_gaussian(rng, L, n, var)
        self.mu = config.mu0 if config.mu0 is not None else 1.0 / np.sqrt(N * L)
        self.iteration = 0
        self.blocks = self._assemble()  # blocks of the current iterate
        self._W = None
        self._adapt_frozen = not config.adapt
        self._history = {"primal": [], "dual": [], "combined": [], "mu": []}

    # ------------------------------------------------------------------ updates

    def _assemble(self):
        return ops.assemble_block(self.tl, np.broadcast_to(self.t, self.tl.shape), self.X.T)

    def _check_finite(self, arrays, name):
        for a in arrays:
            if not np.all(np.isfinite(a)):
                raise NumericalDivergenceError(
                    f"non-finite values after the {name} update at iteration "
                    f"{self.iteration}",
                    diagnostics=self._diagnostics(converged=False, wall_time=0.0),
                )

    def update_q(self):
        """Project blocks of the current iterate, shifted by the scaled duals."""
        arg = self.blocks - self.Lam / self.mu
        try:
            self.Q = ops.psd_rank_projection(arg, self.config.K)
        except np.linalg.LinAlgError as exc:
            raise NumericalDivergenceError(
                f"block projection failed at iteration {self.iteration}: {exc}",
                diagnostics=self._diagnostics(converged=False, wall_time=0.0),
            ) from exc
        self._W = self.Q + self.Lam / self.mu
        self._check_finite([self.Q], "block projection")

    def update_x(self):
        """Exact solve of the signal subproblem for the configured objective."""
        n = self.n
        W2 = self._W[:, n:, :n]
        v = (ops.hankel_adjoint(W2) / self.d_weights).T  # (N, L) Hankel-averaged target
        beta = (self.mu * self.d_weights)[:, None]
        obj, Y, omega = self.objective, self.Y, self.omega
        R = v - Y
        if not obj.rowwise:
            fitted = Y + prox_abs_p(R, beta, obj.p)
            self.X = np.where(omega, fitted, v) if obj.masked else fitted
        else:
            Rm = np.where(omega, R, 0.0) if obj.masked else R
            norms = np.linalg.norm(Rm, axis=1)
            z = solve_z(beta[:, 0], obj.p, norms)
            factor = np.divide(z, norms, out=np.zeros_like(z), where=norms > 0)
            fitted = Y + factor[:, None] * R
            self.X = np.where(omega, fitted, v) if obj.masked else fitted
        self._check_finite([self.X], "signal")

    def update_t(self):
        """Coupled Toeplitz-coefficient update; the sum constraint holds by averaging."""
        n = self.n
        a = ops.toeplitz_adjoint(np.conj(self._W[:, :n, :n]))
        b = ops.toeplitz_adjoint(self._W[:, n:, n:])
        correction = (a - b).sum(axis=0) / (2.0 * self.L)
        self.tl = (a - correction[None, :]) / self.gram_weights
        self.t = self.tl.mean(axis=0)
        self._check_finite([self.tl, self.t], "Toeplitz coefficient")

    def update_lambda(self):
        """Dual ascent on the block constraints; refreshes the cached blocks."""
        new_blocks = self._assemble()
        self.Lam = self.Lam + self.mu * (self.Q - new_blocks)
        self._check_finite([self.Lam], "multiplier")
        return new_blocks

    def adapt_penalty(self, r_norm, s_norm):
        """Boyd-style adaptation; multipliers rescale so the scaled dual is continuous."""
        cfg = self.config
        if self._adapt_frozen or cfg.adapt_tau == 1.0:
            return
        if not (self.iteration <= 100 or self.iteration % 10 == 0):
            return
        if r_norm > cfg.adapt_rho * s_norm:
            self.mu *= cfg.adapt_tau
            self.Lam *= cfg.adapt_tau
        elif s_norm > cfg.adapt_rho * r_norm:
            self.mu /= cfg.adapt_tau
            self.Lam /= cfg.adapt_tau

    # ------------------------------------------------------------------ main loop

    def step(self):
        """One full sweep; returns (primal, dual, combined) residual norms."""
        self.iteration += 1
        X_prev, tl_prev, Lam_prev = self.X.copy(), self.tl.copy(), self.Lam.copy()
        blocks_prev = self.blocks

        self.update_q()
        self.update_x()
        self.update_t()
        new_blocks = self.update_lambda()

        r_norm = float(np.linalg.norm(self.Q - new_blocks))
        s_norm = self.mu * float(np.linalg.norm(new_blocks - blocks_prev))
        combined = float(
            np.sum(np.abs(self.X - X_prev) ** 2)
            + np.sum(np.abs(self.tl - tl_prev) ** 2)
            + np.sum(np.abs(self.Lam - Lam_prev) ** 2)
        )
        self.blocks = new_blocks
        return r_norm, s_norm, combined

    def _thresholds(self, block_norm):
        dim = 2 * self.L * (2 * self.n) ** 2  # real scalar count of the constraints
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
        """Iterate to convergence or ``max_iters``; returns a :class:`SolveResult`.

        ``trace_sink``, when given, receives one CSV line
        ``iteration,mu,primal,dual,combined`` per sweep.
        """
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
                eps_pri, eps_dual = self._thresholds(float(np.linalg.norm(self.blocks)))
                if r_norm <= eps_pri and s_norm <= eps_dual:
                    converged = True
                    break
                if combined < 10.0 * cfg.eps_abs:
                    self._adapt_frozen = True
                self.adapt_penalty(r_norm, s_norm)
        except NumericalDivergenceError as exc:
            if exc.diagnostics is not None:
                exc.diagnostics.wall_time_s = time.perf_counter() - start
            raise
        wall = time.perf_counter() - start
        return SolveResult(
            X=self.X.copy(),
            t=self.t.copy(),
            tl=self.tl.copy(),
            diagnostics=self._diagnostics(converged, wall),
        )


def solve(Y, mask, config, trace_sink=None):
    """Recover (X, t, {t_l}) from observed data; see :class:`StrumerSolver`."""
    return StrumerSolver(Y, mask, config).run(trace_sink=trace_sink)
