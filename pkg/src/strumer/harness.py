"""Monte Carlo experiment engine: scenario pipeline, trial orchestration,
aggregation, and the built-in experiment presets.

A run sweeps one axis (channel count, frequency separation, SNR, or mask
pattern), draws ``trials`` independent scenarios per sweep point with
counter-derived seeds, solves each with every configured method on the same
data, and aggregates into a fixed-schema table with a root-CRB reference
column. Results are deterministic given the base seed, independent of the
worker-pool size.
"""

import concurrent.futures
import csv
import io
import json
import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .baseline import solve_toeplitz
from .crb import crb_frequencies
from .model_order import select_order
from .postprocess import (
    EstimationResult,
    amplitude_ls,
    frequency_rmse,
    matched_rmse,
    root_music,
    vandermonde_powers,
)
from .reduction import should_reduce, solve_reduced
from .scenario import generate_scenario
from .signals import MaskSpec
from .solver import SolverConfig, solve

__all__ = [
    "SolveOptions",
    "MethodSpec",
    "ExperimentSpec",
    "ResultTable",
    "run_single",
    "trace_solve",
    "run_experiment",
    "emit",
    "presets",
]

logger = logging.getLogger(__name__)

TABLE_COLUMNS = (
    "sweep",
    "method",
    "mean_rmse",
    "median_rmse",
    "success_rate",
    "mean_iterations",
    "mean_time_s",
    "root_crb",
)

TRACE_COLUMNS = ("iteration", "mu", "primal", "dual", "combined")


def _masked_variant(g):
    return g if g.startswith("masked") else "masked_" + g


def _derived_seed(*parts):
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])


def doa_to_freq(theta_deg):
    """Half-wavelength ULA mapping: f = sin(theta)/2, theta in degrees."""
    return np.sin(np.deg2rad(np.asarray(theta_deg, dtype=float))) / 2.0


def freq_to_doa(f):
    """Inverse of :func:`doa_to_freq`, in degrees; clips to the visible region."""
    return np.rad2deg(np.arcsin(np.clip(2.0 * np.asarray(f, dtype=float), -1.0, 1.0)))


@dataclass
class SolveOptions:
    """Per-solve settings layered over a scenario's own objective."""

    method: str = "strumer"  # strumer | strumer-dr | toeplitz-baseline
    K: int | None = None  # model order; defaults to the scenario truth
    g: str | None = None
    p: float | None = None
    reduce: str = "off"  # off | auto | on
    mu0: float | None = None
    eps_abs: float = 1e-4
    eps_rel: float = 1e-5
    max_iters: int = 3000
    adapt: bool = True
    lambda_init_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("strumer", "strumer-dr", "toeplitz-baseline"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.reduce not in ("off", "auto", "on"):
            raise ValueError(f"unknown reduce mode {self.reduce!r}")


def _resolve_config(scenario, options):
    obj = scenario.observation.objective
    g = options.g or obj.g
    p = options.p if options.p is not None else obj.p
    K = options.K
    if K is None:
        if scenario.truth is None:
            raise ValueError("model order K is required when the scenario has no truth")
        K = scenario.truth.K
    if not scenario.observation.mask.complete:
        g = _masked_variant(g)
    return SolverConfig(
        K=K,
        p=p,
        g=g,
        mu0=options.mu0,
        adapt=options.adapt,
        eps_abs=options.eps_abs,
        eps_rel=options.eps_rel,
        max_iters=options.max_iters,
        lambda_init_scale=options.lambda_init_scale,
        seed=options.seed,
    )


def _pad_to_odd(y, omega, g):
    """Append one unobserved sample row so the Hankel structure applies."""
    N, L = y.shape
    if N % 2 == 1:
        return y, omega, g
    y_pad = np.vstack([y, np.zeros((1, L), dtype=complex)])
    omega_pad = np.vstack([omega, np.zeros((1, L), dtype=bool)])
    return y_pad, omega_pad, _masked_variant(g)


def run_single(scenario, options=None, trace_sink=None):
    """Solve one scenario end to end and return the estimate.

    Dispatches between the embedded solver, its dimensionality-reduced
    variant, and the Toeplitz-model baseline; extracts frequencies with
    Root-MUSIC and refits amplitudes on the original observed data. Even
    sample counts are padded with one missing sample before solving.
    """
    options = options or SolveOptions()
    config = _resolve_config(scenario, options)
    y = scenario.observation.y
    omega = scenario.observation.mask.omega
    y_s, omega_s, g_s = _pad_to_odd(y, omega, config.g)
    config = replace(config, g=g_s)

    if options.method == "toeplitz-baseline":
        sol = solve_toeplitz(y_s, omega_s, config, trace_sink=trace_sink)
        f = root_music(sol.t, config.K)
        return EstimationResult(
            f=f,
            S=amplitude_ls(f, y, omega),
            powers=vandermonde_powers(sol.t, f),
            t=sol.t,
            diagnostics=sol.diagnostics,
            method="toeplitz-baseline",
        )

    reduce_mode = "on" if options.method == "strumer-dr" else options.reduce
    if config.g in ("fro2", "masked_fro2") and should_reduce(
        y_s.shape[0], y_s.shape[1], reduce_mode
    ):
        result = solve_reduced(y_s, omega_s, config, trace_sink=trace_sink)
        result.S = amplitude_ls(result.f, y, omega)
        result.method = options.method
        return result

    sol = solve(y_s, omega_s, config, trace_sink=trace_sink)
    f = root_music(sol.t, config.K)
    return EstimationResult(
        f=f,
        S=amplitude_ls(f, y, omega),
        powers=vandermonde_powers(sol.t, f),
        t=sol.t,
        diagnostics=sol.diagnostics,
        method=options.method,
    )


def trace_solve(scenario, options=None):
    """Solve while recording the per-iteration residual trace.

    Returns (columns, rows, result) where rows are
    ``[iteration, mu, primal, dual, combined]``.
    """
    result = run_single(scenario, options)
    d = result.diagnostics
    rows = [
        [i + 1, float(d.mu[i]), float(d.primal[i]), float(d.dual[i]), float(d.combined[i])]
        for i in range(d.iterations)
    ]
    return list(TRACE_COLUMNS), rows, result


# --------------------------------------------------------------------------- experiments


@dataclass
class MethodSpec:
    """One solver column of an experiment: method plus objective settings."""

    method: str = "strumer"
    g: str = "fro2"
    p: float = 2.0
    label: str | None = None

    def __post_init__(self):
        if self.label is None:
            suffix = "" if self.g.endswith("fro2") else f"(p={self.p:g})"
            self.label = self.method + suffix


@dataclass
class ExperimentSpec:
    """Declarative description of one sweep experiment.

    Exactly one of ``n_channels``, ``delta_f_over_n``, ``snr_db``, ``mask``
    may be a list; it becomes the sweep axis (a fixed-point run is a
    single-point sweep). Separation sweeps place the frequencies at
    ``[-0.2, 0.1, 0.1 + delta/N]`` with delta in units of 1/N.
    ``doa_degrees`` switches generation and scoring to the half-wavelength
    DOA domain (RMSE and CRB in degrees). ``mos`` (dict with ``criterion``
    and ``k_max``) turns trials into model-order-selection runs whose success
    is recovering the true order.
    """

    name: str
    n_samples: int
    n_channels: object = 3
    freqs: tuple | None = None
    doa_degrees: tuple | None = None
    delta_f_over_n: object = None
    snr_db: object = 10.0
    noise_kind: str = "gaussian"
    c2: float = 0.1
    outlier_ratio: float = 100.0
    mask: object = field(default_factory=MaskSpec)
    methods: tuple = field(default_factory=lambda: (MethodSpec(),))
    trials: int = 50
    seed: int = 0
    mos: dict | None = None
    description: str = ""

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        swept = [name for name, value in self._axes() if isinstance(value, (list, tuple))]
        if len(swept) > 1:
            raise ValueError(f"at most one sweep axis is allowed, got {swept}")
        self._sweep_name = swept[0] if swept else None
        if self.freqs is None and self.delta_f_over_n is None and self.doa_degrees is None:
            raise ValueError("an experiment needs freqs, doa_degrees, or a separation sweep")

    def _axes(self):
        return (
            ("n_channels", self.n_channels),
            ("delta_f_over_n", self.delta_f_over_n),
            ("snr_db", self.snr_db),
            ("mask", self.mask),
        )

    @property
    def sweep_axis(self):
        return self._sweep_name

    def sweep_values(self):
        if self._sweep_name is None:
            return [None]
        return list(dict(self._axes())[self._sweep_name])

    def sweep_labels(self):
        if self._sweep_name is None:
            return ["-"]
        values = self.sweep_values()
        if self._sweep_name == "mask":
            return [m.label() for m in values]
        if self._sweep_name == "delta_f_over_n":
            return [f"{v:g}/N" for v in values]
        if self._sweep_name == "n_channels":
            return [f"L={v}" for v in values]
        return [f"{v:g}dB" for v in values]

    def point_params(self, value):
        """Resolve the scenario parameters at one sweep value."""
        L = value if self._sweep_name == "n_channels" else self.n_channels
        snr = value if self._sweep_name == "snr_db" else self.snr_db
        mask = value if self._sweep_name == "mask" else self.mask
        if self.doa_degrees is not None:
            freqs = doa_to_freq(self.doa_degrees)
        elif self._sweep_name == "delta_f_over_n" or self.delta_f_over_n is not None:
            delta = value if self._sweep_name == "delta_f_over_n" else self.delta_f_over_n
            freqs = np.array([-0.2, 0.1, 0.1 + delta / self.n_samples])
        else:
            freqs = np.asarray(self.freqs, dtype=float)
        return {
            "freqs": freqs,
            "n_samples": self.n_samples,
            "n_channels": int(L),
            "snr_db": float(snr),
            "mask_spec": mask,
        }

    def to_dict(self):
        def mask_dict(m):
            return {"kind": m.kind, "fraction": m.fraction, "rows_kept": m.rows_kept}

        return {
            "name": self.name,
            "description": self.description,
            "n_samples": self.n_samples,
            "n_channels": list(self.n_channels)
            if isinstance(self.n_channels, (list, tuple))
            else self.n_channels,
            "freqs": list(self.freqs) if self.freqs is not None else None,
            "doa_degrees": list(self.doa_degrees) if self.doa_degrees is not None else None,
            "delta_f_over_n": list(self.delta_f_over_n)
            if isinstance(self.delta_f_over_n, (list, tuple))
            else self.delta_f_over_n,
            "snr_db": list(self.snr_db) if isinstance(self.snr_db, (list, tuple)) else self.snr_db,
            "noise_kind": self.noise_kind,
            "c2": self.c2,
            "outlier_ratio": self.outlier_ratio,
            "mask": [mask_dict(m) for m in self.mask]
            if isinstance(self.mask, (list, tuple))
            else mask_dict(self.mask),
            "methods": [
                {"method": m.method, "g": m.g, "p": m.p, "label": m.label} for m in self.methods
            ],
            "trials": self.trials,
            "seed": self.seed,
            "mos": self.mos,
        }


@dataclass
class ResultTable:
    """Aggregated results: one row per (sweep point, method), fixed columns."""

    rows: list
    spec: dict | None = None
    columns: tuple = TABLE_COLUMNS

    def to_csv(self, fh=None):
        own = fh is None
        buf = fh or io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow(row)
        if own:
            return buf.getvalue()

    def to_json_dict(self):
        return {"columns": list(self.columns), "rows": self.rows, "spec": self.spec}

    @classmethod
    def from_json_dict(cls, doc):
        return cls(rows=doc["rows"], spec=doc.get("spec"), columns=tuple(doc["columns"]))


@dataclass
class _TrialOutcome:
    rmse: float = np.nan
    iterations: float = np.nan
    time_s: float = np.nan
    crb_mean_diag: float = np.nan
    success: bool = False
    failed: bool = False
    error: str = ""


def _scenario_for_trial(spec, params, first_method, point_index, trial_index):
    return generate_scenario(
        params["freqs"],
        params["n_samples"],
        params["n_channels"],
        params["snr_db"],
        noise_kind=spec.noise_kind,
        c2=spec.c2,
        outlier_ratio=spec.outlier_ratio,
        mask_spec=params["mask_spec"],
        g=first_method.g,
        p=first_method.p,
        seed=_derived_seed(spec.seed, point_index, trial_index),
    )


def _trial_crb_mean_diag(scenario, spec):
    sigma2 = scenario.noise.sigma2  # nominal component for mixtures
    C = crb_frequencies(scenario.truth.f, scenario.truth.S, sigma2, scenario.observation.mask)
    if spec.doa_degrees is not None:
        jac = np.rad2deg(2.0 / np.sqrt(1.0 - (2.0 * scenario.truth.f) ** 2))
        C = jac[:, None] * C * jac[None, :]
    return float(np.trace(C) / C.shape[0])


def _score_estimate(f_est, scenario, spec):
    if spec.doa_degrees is not None:
        return matched_rmse(freq_to_doa(f_est), freq_to_doa(scenario.truth.f), wrap=False)
    return frequency_rmse(f_est, scenario.truth.f)


def _run_point_trial(spec, params, point_index, trial_index):
    """One trial: shared scenario, every method solved on it, in order."""
    scenario = _scenario_for_trial(spec, params, spec.methods[0], point_index, trial_index)
    try:
        crb_md = _trial_crb_mean_diag(scenario, spec)
    except Exception as exc:  # unidentifiable corner, keep the trial alive
        warnings.warn(f"CRB evaluation failed: {exc}", RuntimeWarning)
        crb_md = np.nan
    outcomes = []
    for mi, method in enumerate(spec.methods):
        solver_seed = _derived_seed(spec.seed, point_index, trial_index, mi, 1)
        out = _TrialOutcome(crb_mean_diag=crb_md)
        try:
            if spec.mos is not None:
                out = _run_mos_trial(spec, scenario, method, solver_seed, out)
            else:
                options = SolveOptions(
                    method=method.method, g=method.g, p=method.p, seed=solver_seed
                )
                est = run_single(scenario, options)
                out.rmse = _score_estimate(est.f, scenario, spec)
                out.iterations = float(est.diagnostics.iterations)
                out.time_s = float(est.diagnostics.wall_time_s)
                out.success = True
        except Exception as exc:
            out.failed = True
            out.error = f"{type(exc).__name__}: {exc}"
        outcomes.append(out)
    return outcomes


def _run_mos_trial(spec, scenario, method, solver_seed, out):
    base = SolverConfig(
        K=1, g=method.g, p=method.p, seed=solver_seed
    )
    if not scenario.observation.mask.complete:
        base = replace(base, g=_masked_variant(base.g))
    selection = select_order(
        scenario.observation.y,
        scenario.observation.mask,
        spec.mos["k_max"],
        criterion=spec.mos.get("criterion", "bic"),
        base_config=base,
    )
    k_true = scenario.truth.K
    out.success = selection.k_star == k_true
    true_result = selection.results.get(k_true)
    if true_result is not None:
        out.rmse = _score_estimate(true_result.f, scenario, spec)
        out.iterations = float(
            np.mean([r.diagnostics.iterations for r in selection.results.values()])
        )
        out.time_s = float(
            np.sum([r.diagnostics.wall_time_s for r in selection.results.values()])
        )
    return out


def run_experiment(spec, trials=None, threads=1):
    """Execute an experiment spec; returns the aggregated :class:`ResultTable`.

    ``trials`` overrides the spec's trial count; ``threads`` sizes the worker
    pool (trials are independent; aggregation order is fixed by trial index,
    so the result does not depend on the pool size).
    """
    n_trials = trials if trials is not None else spec.trials
    labels = spec.sweep_labels()
    values = spec.sweep_values()
    logger.info("running %s: %d point(s) x %d trial(s)", spec.name, len(values), n_trials)
    logger.info("resolved spec: %s", json.dumps(spec.to_dict()))

    per_point = []
    for pi, value in enumerate(values):
        params = spec.point_params(value)
        if threads > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
                trial_outcomes = list(
                    pool.map(lambda ti: _run_point_trial(spec, params, pi, ti), range(n_trials))
                )
        else:
            trial_outcomes = [_run_point_trial(spec, params, pi, ti) for ti in range(n_trials)]
        per_point.append(trial_outcomes)

    rows = []
    for pi, label in enumerate(labels):
        for mi, method in enumerate(spec.methods):
            outs = [per_point[pi][ti][mi] for ti in range(n_trials)]
            valid = [o for o in outs if not o.failed and np.isfinite(o.rmse)]
            failures = sum(o.failed for o in outs)
            if failures > n_trials / 2:
                warnings.warn(
                    f"{spec.name} point {label!r} method {method.label!r}: "
                    f"{failures}/{n_trials} trials failed",
                    RuntimeWarning,
                )
            rmses = [o.rmse for o in valid]
            crbs = [o.crb_mean_diag for o in outs if np.isfinite(o.crb_mean_diag)]
            rows.append(
                [
                    label,
                    method.label,
                    float(np.mean(rmses)) if rmses else np.nan,
                    float(np.median(rmses)) if rmses else np.nan,
                    float(np.mean([o.success for o in outs])),
                    float(np.mean([o.iterations for o in valid])) if valid else np.nan,
                    float(np.mean([o.time_s for o in valid])) if valid else np.nan,
                    float(np.sqrt(np.mean(crbs))) if crbs else np.nan,
                ]
            )
    return ResultTable(rows=rows, spec=spec.to_dict())


def emit(table, fmt="csv", path=None):
    """Serialize a table to CSV or JSON; writes to ``path`` or returns text."""
    if fmt == "csv":
        text = table.to_csv()
    elif fmt == "json":
        text = json.dumps(table.to_json_dict(), indent=2)
    else:
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
        return path
    return text


def presets():
    """Built-in experiment definitions exp1..exp9 at desk-scale trial counts."""
    base_f = (-0.2, 0.1, 0.11)
    strumer = MethodSpec("strumer")
    toeplitz = MethodSpec("toeplitz-baseline")
    specs = [
        ExperimentSpec(
            name="exp1",
            description="convergence behavior of both solvers at the base setting "
            "(use the trace endpoint/subcommand for per-iteration residual curves)",
            n_samples=45,
            n_channels=3,
            freqs=base_f,
            snr_db=10.0,
            methods=(strumer, toeplitz),
            trials=10,
        ),
        ExperimentSpec(
            name="exp2",
            description="RMSE versus channel count, complete Gaussian data",
            n_samples=45,
            n_channels=[1, 2, 3, 4, 6, 8, 10],
            freqs=base_f,
            snr_db=10.0,
            methods=(strumer, toeplitz),
        ),
        ExperimentSpec(
            name="exp3",
            description="RMSE and timing versus frequency separation",
            n_samples=45,
            n_channels=3,
            delta_f_over_n=[round(0.05 * k, 2) for k in range(1, 29)],
            snr_db=10.0,
            methods=(strumer, toeplitz),
        ),
        ExperimentSpec(
            name="exp4",
            description="RMSE versus SNR, complete Gaussian data",
            n_samples=45,
            n_channels=3,
            freqs=base_f,
            snr_db=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0],
            methods=(strumer, toeplitz),
        ),
        ExperimentSpec(
            name="exp5",
            description="incomplete Gaussian data: row-wise and element-wise masks",
            n_samples=45,
            n_channels=3,
            freqs=base_f,
            snr_db=10.0,
            mask=[
                MaskSpec("row", rows_kept=25),
                MaskSpec("row", rows_kept=35),
                MaskSpec("row", rows_kept=40),
                MaskSpec("element", fraction=0.6),
                MaskSpec("element", fraction=0.8),
                MaskSpec("element", fraction=0.9),
            ],
            methods=(
                MethodSpec("strumer", g="masked_fro2"),
                MethodSpec("toeplitz-baseline", g="masked_fro2"),
            ),
        ),
        ExperimentSpec(
            name="exp6",
            description="impulsive two-component mixture noise, entrywise objectives",
            n_samples=45,
            n_channels=3,
            freqs=base_f,
            snr_db=[0.0, 5.0, 10.0, 15.0, 20.0],
            noise_kind="gmm",
            c2=0.1,
            outlier_ratio=100.0,
            methods=(
                MethodSpec("strumer", g="lp", p=1.1),
                MethodSpec("strumer", g="lp", p=1.5),
                MethodSpec("strumer", g="lp", p=2.0),
            ),
        ),
        ExperimentSpec(
            name="exp7",
            description="DOA estimation, impulsive noise, incomplete data "
            "(element loss and sparse-array row loss)",
            n_samples=15,
            n_channels=10,
            doa_degrees=(-1.0, 5.0, 40.0),
            snr_db=10.0,
            noise_kind="gmm",
            c2=0.1,
            outlier_ratio=100.0,
            mask=[
                MaskSpec("element", fraction=0.8),
                MaskSpec("row", rows_kept=13),
            ],
            methods=(MethodSpec("strumer", g="masked_lp", p=1.0, label="strumer(p=1)"),),
        ),
        ExperimentSpec(
            name="exp8",
            description="dimensionality reduction at many channels",
            n_samples=15,
            n_channels=[50, 150, 300],
            freqs=(-0.2, 0.1, 0.3),
            snr_db=10.0,
            methods=(strumer, MethodSpec("strumer-dr")),
            trials=20,
        ),
        ExperimentSpec(
            name="exp9",
            description="model-order selection success rate versus SNR (BIC)",
            n_samples=45,
            n_channels=3,
            freqs=base_f,
            snr_db=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
            methods=(strumer,),
            mos={"criterion": "bic", "k_max": 5},
        ),
    ]
    return {s.name: s for s in specs}
