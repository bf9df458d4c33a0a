"""FastAPI service wrapping the estimation package.

Endpoints mirror the CLI verbs: scenario generation, solving, CRB evaluation,
model-order selection, experiments, and residual traces. Validation problems
map to 400/422 responses tagged ``kind="validation"``; numerical failures of
the solvers map to 500 with ``kind="numerical"``.
"""

import dataclasses

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import harness
from ..crb import crb_frequencies, root_mean_crb
from ..errors import ExtractionError, NumericalDivergenceError
from ..harness import ExperimentSpec, MethodSpec, SolveOptions, doa_to_freq, freq_to_doa
from ..model_order import select_order
from ..scenario import generate_scenario, scenario_from_dict, scenario_to_dict
from ..signals import MaskSpec
from ..solver import SolverConfig
from . import schemas

__all__ = ["create_app", "app"]


def _mask_spec(m):
    return MaskSpec(m.kind, fraction=m.fraction, rows_kept=m.rows_kept)


def _solve_options(m):
    return SolveOptions(
        method=m.method,
        K=m.order,
        g=m.g,
        p=m.p,
        reduce=m.reduce,
        mu0=m.mu0,
        eps_abs=m.eps_abs,
        eps_rel=m.eps_rel,
        max_iters=m.max_iters,
        adapt=m.adapt,
        lambda_init_scale=m.lambda_init_scale,
        seed=m.seed,
    )


def _pairs(a):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _diagnostics_model(d):
    return schemas.DiagnosticsModel(
        iterations=d.iterations,
        converged=d.converged,
        wall_time_s=d.wall_time_s,
        primal_residual=d.terminal_primal,
        dual_residual=d.terminal_dual,
        combined_residual=d.terminal_combined,
    )


def _experiment_spec(m):
    mask = (
        [_mask_spec(x) for x in m.mask] if isinstance(m.mask, list) else _mask_spec(m.mask)
    )
    methods = tuple(
        MethodSpec(method=x.method, g=x.g, p=x.p, label=x.label) for x in m.methods
    )
    return ExperimentSpec(
        name=m.name,
        description=m.description,
        n_samples=m.n_samples,
        n_channels=m.n_channels,
        freqs=tuple(m.freqs) if m.freqs is not None else None,
        doa_degrees=tuple(m.doa_degrees) if m.doa_degrees is not None else None,
        delta_f_over_n=m.delta_f_over_n,
        snr_db=m.snr_db,
        noise_kind=m.noise_kind,
        c2=m.c2,
        outlier_ratio=m.outlier_ratio,
        mask=mask,
        methods=methods,
        trials=m.trials,
        seed=m.seed,
        mos=m.mos,
    )


def create_app():
    app = FastAPI(title="strumer", version="0.1.0")

    @app.exception_handler(ValueError)
    async def _validation_handler(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "validation"})

    @app.exception_handler(NumericalDivergenceError)
    async def _numerical_handler(request: Request, exc: NumericalDivergenceError):
        return JSONResponse(status_code=500, content={"detail": str(exc), "kind": "numerical"})

    @app.exception_handler(ExtractionError)
    async def _extraction_handler(request: Request, exc: ExtractionError):
        return JSONResponse(status_code=500, content={"detail": str(exc), "kind": "numerical"})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/presets", response_model=schemas.PresetsResponse)
    def list_presets():
        infos = [
            schemas.PresetInfo(
                name=s.name,
                description=s.description,
                sweep_axis=s.sweep_axis,
                trials=s.trials,
            )
            for s in harness.presets().values()
        ]
        return schemas.PresetsResponse(presets=infos)

    @app.post("/scenario/generate", response_model=schemas.ScenarioDoc)
    def generate(req: schemas.GenerateRequest):
        if (req.frequencies is None) == (req.doa_degrees is None):
            raise ValueError("give exactly one of frequencies or doa_degrees")
        freqs = (
            np.asarray(req.frequencies, dtype=float)
            if req.frequencies is not None
            else doa_to_freq(req.doa_degrees)
        )
        sc = generate_scenario(
            freqs,
            req.n_samples,
            req.n_channels,
            req.snr_db,
            noise_kind=req.noise_kind,
            c2=req.c2,
            outlier_ratio=req.outlier_ratio,
            mask_spec=_mask_spec(req.mask),
            g=req.g,
            p=req.p,
            seed=req.seed,
        )
        return schemas.ScenarioDoc.model_validate(scenario_to_dict(sc))

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve_scenario(req: schemas.SolveRequest):
        sc = scenario_from_dict(req.scenario.model_dump())
        est = harness.run_single(sc, _solve_options(req.options))
        return schemas.SolveResponse(
            frequencies=est.f.tolist(),
            amplitudes=_pairs(est.S),
            powers=np.asarray(est.powers, dtype=float).tolist(),
            toeplitz=_pairs(est.t),
            method=est.method,
            diagnostics=_diagnostics_model(est.diagnostics),
        )

    @app.post("/crb", response_model=schemas.CrbResponse)
    def crb(req: schemas.CrbRequest):
        sc = scenario_from_dict(req.scenario.model_dump())
        if sc.truth is None:
            raise ValueError("the scenario carries no ground truth for the CRB")
        sigma2 = req.sigma2
        if sigma2 is None:
            if sc.noise is None:
                raise ValueError("give sigma2 or a scenario with a noise model")
            sigma2 = sc.noise.sigma2
        C = crb_frequencies(sc.truth.f, sc.truth.S, sigma2, sc.observation.mask)
        units = "cycles/sample"
        if req.in_degrees:
            jac = np.rad2deg(2.0 / np.sqrt(1.0 - (2.0 * sc.truth.f) ** 2))
            C = jac[:, None] * C * jac[None, :]
            units = "degrees"
        return schemas.CrbResponse(
            crb=C.tolist(),
            root_crb=np.sqrt(np.diag(C)).tolist(),
            root_mean_crb=root_mean_crb(C),
            units=units,
        )

    @app.post("/model-order", response_model=schemas.ModelOrderResponse)
    def model_order(req: schemas.ModelOrderRequest):
        sc = scenario_from_dict(req.scenario.model_dump())
        opts = req.options
        base = SolverConfig(
            K=1,
            g=opts.g or sc.observation.objective.g,
            p=opts.p if opts.p is not None else sc.observation.objective.p,
            mu0=opts.mu0,
            adapt=opts.adapt,
            eps_abs=opts.eps_abs,
            eps_rel=opts.eps_rel,
            max_iters=opts.max_iters,
            lambda_init_scale=opts.lambda_init_scale,
            seed=opts.seed,
        )
        selection = select_order(
            sc.observation.y,
            sc.observation.mask,
            req.k_max,
            criterion=req.criterion,
            base_config=base,
        )
        chosen = selection.results[selection.k_star]
        return schemas.ModelOrderResponse(
            k_star=selection.k_star,
            frequencies=chosen.f.tolist(),
            scores=[
                schemas.OrderScoreModel(**dataclasses.asdict(s)) for s in selection.scores
            ],
        )

    @app.post("/experiment", response_model=schemas.TableResponse)
    def experiment(req: schemas.ExperimentRequest):
        if (req.preset is None) == (req.spec is None):
            raise ValueError("give exactly one of preset or spec")
        if req.preset is not None:
            all_presets = harness.presets()
            if req.preset not in all_presets:
                raise ValueError(
                    f"unknown preset {req.preset!r}; available: {sorted(all_presets)}"
                )
            spec = all_presets[req.preset]
        else:
            spec = _experiment_spec(req.spec)
        if req.seed is not None:
            spec = dataclasses.replace(spec, seed=req.seed)
        table = harness.run_experiment(spec, trials=req.trials, threads=req.threads)
        return schemas.TableResponse(
            columns=list(table.columns), rows=table.rows, spec=table.spec
        )

    @app.post("/trace", response_model=schemas.TraceResponse)
    def trace(req: schemas.TraceRequest):
        sc = scenario_from_dict(req.scenario.model_dump())
        columns, rows, _ = harness.trace_solve(sc, _solve_options(req.options))
        return schemas.TraceResponse(columns=columns, rows=rows)

    return app


app = create_app()
