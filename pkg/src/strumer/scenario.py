"""Scenario bundling and JSON persistence.

A scenario is one observation (data, mask, objective) together with the
ground truth and noise descriptor that produced it, when known. Scenarios
round-trip through JSON bit-exactly: complex numbers are stored as
``[re, im]`` pairs and masks as row-major 0/1 arrays.
"""

import json
from dataclasses import dataclass

import numpy as np

from .signals import (
    FrequencyAmplitudeModel,
    MaskSpec,
    NoiseModel,
    Objective,
    Observation,
    ObservationMask,
    make_mask,
    observe,
    sample_noise,
    snr_to_sigma,
    synthesize,
)

__all__ = [
    "Scenario",
    "generate_scenario",
    "scenario_to_dict",
    "scenario_from_dict",
    "save_scenario",
    "load_scenario",
]

FORMAT_TAG = "strumer-scenario/1"


@dataclass
class Scenario:
    observation: Observation
    truth: FrequencyAmplitudeModel | None = None
    noise: NoiseModel | None = None
    snr_db: float | None = None
    seed: int | None = None

    @property
    def N(self):
        return self.observation.N

    @property
    def L(self):
        return self.observation.L


def generate_scenario(
    freqs,
    n_samples,
    n_channels,
    snr_db,
    noise_kind="gaussian",
    c2=0.1,
    outlier_ratio=100.0,
    mask_spec=None,
    g="fro2",
    p=2.0,
    seed=0,
    amplitudes=None,
):
    """Draw a full scenario: random amplitudes, noise, mask, observation.

    Amplitudes are iid standard complex Gaussian unless given explicitly, so
    the per-entry signal power is 1 in expectation and ``snr_db`` fixes the
    nominal noise variance through :func:`snr_to_sigma`. All randomness
    derives from ``seed`` through independent child streams (amplitudes,
    noise, mask), so scenarios are reproducible.
    """
    mask_spec = mask_spec or MaskSpec()
    sigma2 = snr_to_sigma(snr_db)
    if noise_kind == "gaussian":
        noise = NoiseModel("gaussian", sigma2)
    else:
        noise = NoiseModel(noise_kind, sigma2, c2=c2, sigma2_outlier=outlier_ratio * sigma2)

    seq = np.random.SeedSequence(seed)
    rng_amp, rng_noise, rng_mask = (np.random.default_rng(s) for s in seq.spawn(3))
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    K = freqs.size
    if amplitudes is None:
        amplitudes = (
            rng_amp.standard_normal((K, n_channels)) + 1j * rng_amp.standard_normal((K, n_channels))
        ) / np.sqrt(2.0)
    model = FrequencyAmplitudeModel(freqs, amplitudes)
    X = synthesize(model, n_samples)
    E = sample_noise(noise, n_samples, n_channels, rng_noise)
    mask = make_mask(mask_spec, n_samples, n_channels, rng_mask)
    obs = observe(X, E, mask, Objective(g, p))
    return Scenario(obs, truth=model, noise=noise, snr_db=float(snr_db), seed=seed)


def _complex_to_pairs(a):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _pairs_to_complex(pairs):
    arr = np.asarray(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def scenario_to_dict(sc):
    """Plain-JSON representation of a scenario (the wire/file format)."""
    mask = sc.observation.mask
    doc = {
        "format": FORMAT_TAG,
        "n_samples": sc.N,
        "n_channels": sc.L,
        "observations": _complex_to_pairs(sc.observation.y),
        "mask": {
            "kind": mask.spec.kind,
            "fraction": mask.spec.fraction,
            "rows_kept": mask.spec.rows_kept,
            "bits": np.asarray(mask.omega, dtype=int).ravel().tolist(),
        },
        "objective": {"g": sc.observation.objective.g, "p": sc.observation.objective.p},
        "truth": None,
        "noise": None,
        "snr_db": sc.snr_db,
        "seed": sc.seed,
    }
    if sc.truth is not None:
        doc["truth"] = {
            "frequencies": sc.truth.f.tolist(),
            "amplitudes": _complex_to_pairs(sc.truth.S),
        }
    if sc.noise is not None:
        doc["noise"] = {
            "kind": sc.noise.kind,
            "sigma2": sc.noise.sigma2,
            "c2": sc.noise.c2,
            "sigma2_outlier": sc.noise.sigma2_outlier,
        }
    return doc


def scenario_from_dict(doc):
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"unrecognized scenario format {doc.get('format')!r}")
    N, L = int(doc["n_samples"]), int(doc["n_channels"])
    y = _pairs_to_complex(doc["observations"])
    if y.shape != (N, L):
        raise ValueError(f"observation shape {y.shape} does not match header ({N}, {L})")
    m = doc["mask"]
    bits = np.asarray(m["bits"], dtype=int)
    if bits.size != N * L:
        raise ValueError("mask bit count does not match dimensions")
    spec = MaskSpec(m["kind"], fraction=m.get("fraction"), rows_kept=m.get("rows_kept"))
    mask = ObservationMask(bits.reshape(N, L).astype(bool), spec)
    if np.any(np.abs(y[~mask.omega]) != 0):
        raise ValueError("entries outside the mask must be exactly zero")
    obj = Objective(doc["objective"]["g"], float(doc["objective"]["p"]))
    truth = None
    if doc.get("truth") is not None:
        truth = FrequencyAmplitudeModel(
            np.asarray(doc["truth"]["frequencies"], dtype=float),
            _pairs_to_complex(doc["truth"]["amplitudes"]),
        )
    noise = None
    if doc.get("noise") is not None:
        nd = doc["noise"]
        noise = NoiseModel(
            nd["kind"],
            float(nd["sigma2"]),
            c2=float(nd.get("c2") or 0.0),
            sigma2_outlier=float(nd.get("sigma2_outlier") or 0.0),
        )
    return Scenario(
        Observation(y, mask, obj),
        truth=truth,
        noise=noise,
        snr_db=doc.get("snr_db"),
        seed=doc.get("seed"),
    )


def save_scenario(path, sc):
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(sc), fh)


def load_scenario(path):
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))
