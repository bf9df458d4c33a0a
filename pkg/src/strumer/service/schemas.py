"""Pydantic request/response models for the HTTP service.

The scenario document model mirrors the JSON format produced by
:mod:`strumer.scenario` (complex numbers as [re, im] pairs, masks as row-major
bit arrays); validation happens here and conversion happens in the core.
"""

from typing import Annotated

from pydantic import BaseModel, Field

ComplexPair = Annotated[list[float], Field(min_length=2, max_length=2)]


class TruthDoc(BaseModel):
    frequencies: list[float]
    amplitudes: list[list[ComplexPair]]


class NoiseDoc(BaseModel):
    kind: str = "gaussian"
    sigma2: float
    c2: float = 0.0
    sigma2_outlier: float = 0.0


class MaskDoc(BaseModel):
    kind: str = "complete"
    fraction: float | None = None
    rows_kept: int | None = None
    bits: list[int]


class ObjectiveDoc(BaseModel):
    g: str = "fro2"
    p: float = 2.0


class ScenarioDoc(BaseModel):
    format: str = "strumer-scenario/1"
    n_samples: int
    n_channels: int
    observations: list[list[ComplexPair]]
    mask: MaskDoc
    objective: ObjectiveDoc
    truth: TruthDoc | None = None
    noise: NoiseDoc | None = None
    snr_db: float | None = None
    seed: int | None = None


class MaskRequest(BaseModel):
    kind: str = "complete"
    fraction: float | None = None
    rows_kept: int | None = None


class GenerateRequest(BaseModel):
    frequencies: list[float] | None = None
    doa_degrees: list[float] | None = None
    n_samples: int = 45
    n_channels: int = 3
    snr_db: float = 10.0
    noise_kind: str = "gaussian"
    c2: float = 0.1
    outlier_ratio: float = 100.0
    mask: MaskRequest = MaskRequest()
    g: str = "fro2"
    p: float = 2.0
    seed: int = 0


class SolveOptionsModel(BaseModel):
    method: str = "strumer"
    order: int | None = None  # model order K; defaults to the scenario truth
    g: str | None = None
    p: float | None = None
    reduce: str = "off"
    mu0: float | None = None
    eps_abs: float = 1e-4
    eps_rel: float = 1e-5
    max_iters: int = 3000
    adapt: bool = True
    lambda_init_scale: float = 1.0
    seed: int = 0


class SolveRequest(BaseModel):
    scenario: ScenarioDoc
    options: SolveOptionsModel = SolveOptionsModel()


class DiagnosticsModel(BaseModel):
    iterations: int
    converged: bool
    wall_time_s: float
    primal_residual: float
    dual_residual: float
    combined_residual: float


class SolveResponse(BaseModel):
    frequencies: list[float]
    amplitudes: list[list[ComplexPair]]
    powers: list[float]
    toeplitz: list[ComplexPair]
    method: str
    diagnostics: DiagnosticsModel


class CrbRequest(BaseModel):
    scenario: ScenarioDoc
    sigma2: float | None = None  # overrides the scenario noise variance
    in_degrees: bool = False


class CrbResponse(BaseModel):
    crb: list[list[float]]
    root_crb: list[float]
    root_mean_crb: float
    units: str


class ModelOrderRequest(BaseModel):
    scenario: ScenarioDoc
    k_max: int = 5
    criterion: str = "bic"
    options: SolveOptionsModel = SolveOptionsModel()


class OrderScoreModel(BaseModel):
    k: int
    score: float
    neg2_loglik: float
    penalty: float
    sigma2_hat: float
    failed: bool


class ModelOrderResponse(BaseModel):
    k_star: int
    frequencies: list[float]
    scores: list[OrderScoreModel]


class MethodModel(BaseModel):
    method: str = "strumer"
    g: str = "fro2"
    p: float = 2.0
    label: str | None = None


class ExperimentSpecModel(BaseModel):
    name: str = "custom"
    description: str = ""
    n_samples: int
    n_channels: int | list[int] = 3
    freqs: list[float] | None = None
    doa_degrees: list[float] | None = None
    delta_f_over_n: float | list[float] | None = None
    snr_db: float | list[float] = 10.0
    noise_kind: str = "gaussian"
    c2: float = 0.1
    outlier_ratio: float = 100.0
    mask: MaskRequest | list[MaskRequest] = MaskRequest()
    methods: list[MethodModel] = [MethodModel()]
    trials: int = 50
    seed: int = 0
    mos: dict | None = None


class ExperimentRequest(BaseModel):
    preset: str | None = None
    spec: ExperimentSpecModel | None = None
    trials: int | None = None
    seed: int | None = None
    threads: int = 1


class TableResponse(BaseModel):
    columns: list[str]
    rows: list[list[object]]
    spec: dict | None = None


class TraceRequest(BaseModel):
    scenario: ScenarioDoc
    options: SolveOptionsModel = SolveOptionsModel()


class TraceResponse(BaseModel):
    columns: list[str]
    rows: list[list[float]]


class PresetInfo(BaseModel):
    name: str
    description: str
    sweep_axis: str | None
    trials: int


class PresetsResponse(BaseModel):
    presets: list[PresetInfo]
