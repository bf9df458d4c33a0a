"""Ground-truth signal synthesis, noise models, observation masks, and the
exact Toeplitz coefficients of the PSD block embedding.

The signal model: an N x L matrix whose columns superpose K complex sinusoids
with shared frequencies ``f_k`` in [-1/2, 1/2) (cycles/sample) and
channel-specific amplitudes ``s_kl``.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FrequencyAmplitudeModel",
    "NoiseModel",
    "MaskSpec",
    "ObservationMask",
    "Objective",
    "Observation",
    "steering_vector",
    "vandermonde",
    "synthesize",
    "snr_to_sigma",
    "sample_noise",
    "complete_mask",
    "make_mask",
    "observe",
    "exact_embedding",
]

OBJECTIVE_TAGS = ("fro2", "masked_fro2", "lp", "masked_lp", "l2p", "masked_l2p")
NOISE_KINDS = ("gaussian", "gmm", "row_gmm")
MASK_KINDS = ("complete", "element", "row")


def steering_vector(f, m):
    """Unit-modulus complex sinusoid [1, e^{i2pi f}, ..., e^{i2pi f(m-1)}]."""
    if m < 1:
        raise ValueError("length m must be positive")
    return np.exp(2j * np.pi * f * np.arange(m))


def vandermonde(f, m):
    """m x K matrix whose columns are steering vectors of the given frequencies."""
    f = np.atleast_1d(np.asarray(f, dtype=float))
    return np.exp(2j * np.pi * np.outer(np.arange(m), f))


@dataclass
class FrequencyAmplitudeModel:
    """Ground-truth parameters: frequencies f (K,) and amplitudes S (K, L)."""

    f: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        self.f = np.atleast_1d(np.asarray(self.f, dtype=float))
        self.S = np.asarray(self.S, dtype=complex)
        if self.S.ndim == 1:
            self.S = self.S[:, None]
        if self.S.shape[0] != self.f.size:
            raise ValueError(
                f"amplitude rows ({self.S.shape[0]}) must match frequency count ({self.f.size})"
            )
        if np.any(self.f < -0.5) or np.any(self.f >= 0.5):
            raise ValueError("frequencies must lie in [-1/2, 1/2)")
        if np.unique(self.f).size != self.f.size:
            raise ValueError("frequencies must be distinct")
        if not (np.all(np.isfinite(self.f)) and np.all(np.isfinite(self.S))):
            raise ValueError("model parameters must be finite")

    @property
    def K(self):
        return self.f.size

    @property
    def L(self):
        return self.S.shape[1]


def synthesize(model, N):
    """Noiseless N x L signal A(f) S of the model; rank at most K."""
    return vandermonde(model.f, N) @ model.S


def snr_to_sigma(snr_db):
    """Noise variance for unit-power amplitudes: 10^(-SNR/10).

    For Gaussian noise this is the per-entry variance; for the two-component
    mixture models it is the variance of the nominal (non-outlier) component.
    """
    return float(10.0 ** (-snr_db / 10.0))


@dataclass
class NoiseModel:
    """Noise descriptor.

    kind='gaussian': iid circular complex Gaussian with variance ``sigma2``.
    kind='gmm': per entry, an outlier component of variance ``sigma2_outlier``
    is drawn with probability ``c2``, else the nominal component ``sigma2``.
    kind='row_gmm': the mixture component is drawn once per row and shared by
    the whole row.
    """

    kind: str
    sigma2: float
    c2: float = 0.0
    sigma2_outlier: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")
        if not 0.0 <= self.c2 <= 1.0:
            raise ValueError("mixture probability c2 must lie in [0, 1]")
        if self.kind != "gaussian" and self.sigma2_outlier < 0:
            raise ValueError("sigma2_outlier must be nonnegative")


def _complex_gaussian(rng, shape, sigma2):
    scale = np.sqrt(np.asarray(sigma2, dtype=float) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_noise(noise, N, L, rng):
    """Draw an N x L noise matrix from the given model using ``rng``."""
    if noise.kind == "gaussian":
        return _complex_gaussian(rng, (N, L), noise.sigma2)
    if noise.kind == "gmm":
        outlier = rng.random((N, L)) < noise.c2
    else:  # row_gmm: one mixture draw per row
        outlier = np.repeat(rng.random((N, 1)) < noise.c2, L, axis=1)
    var = np.where(outlier, noise.sigma2_outlier, noise.sigma2)
    return _complex_gaussian(rng, (N, L), var)


@dataclass
class MaskSpec:
    """Observation pattern: 'complete', 'element' (keep a fraction of entries
    uniformly), or 'row' (keep ``rows_kept`` rows shared across channels)."""

    kind: str = "complete"
    fraction: float | None = None
    rows_kept: int | None = None

    def __post_init__(self):
        if self.kind not in MASK_KINDS:
            raise ValueError(f"unknown mask kind {self.kind!r}; expected one of {MASK_KINDS}")
        if self.kind == "element":
            if self.fraction is None or not 0.0 < self.fraction <= 1.0:
                raise ValueError("element masks need a fraction in (0, 1]")
        if self.kind == "row":
            if self.rows_kept is None or self.rows_kept < 1:
                raise ValueError("row masks need rows_kept >= 1")

    def label(self):
        if self.kind == "complete":
            return "complete"
        if self.kind == "element":
            return f"element({self.fraction:g})"
        return f"row(M={self.rows_kept})"


@dataclass
class ObservationMask:
    """Boolean N x L indicator of observed entries plus its pattern tag."""

    omega: np.ndarray
    spec: MaskSpec = field(default_factory=MaskSpec)

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=bool)
        if self.omega.ndim != 2:
            raise ValueError("mask must be an N x L boolean matrix")
        if not self.omega.any(axis=0).all():
            raise ValueError("every channel needs at least one observed entry")

    @property
    def count(self):
        return int(self.omega.sum())

    @property
    def complete(self):
        return bool(self.omega.all())

    @property
    def row_pattern(self):
        """True when all channels share the same observed-row support."""
        return bool((self.omega == self.omega[:, :1]).all())


def complete_mask(N, L):
    return ObservationMask(np.ones((N, L), dtype=bool), MaskSpec("complete"))


def make_mask(spec, N, L, rng=None):
    """Realize a mask from its spec.

    Row masks keep the same uniformly drawn rows across all channels. Element
    masks observe exactly ``round(fraction * N * L)`` entries, drawn uniformly
    among all subsets of that size (the law of an iid Bernoulli pattern
    conditioned on its count).
    """
    if spec.kind == "complete":
        return complete_mask(N, L)
    if rng is None:
        raise ValueError("random masks need an rng")
    omega = np.zeros((N, L), dtype=bool)
    if spec.kind == "row":
        if spec.rows_kept > N:
            raise ValueError(f"rows_kept={spec.rows_kept} exceeds N={N}")
        rows = rng.choice(N, size=spec.rows_kept, replace=False)
        omega[rows, :] = True
    else:
        m = int(round(spec.fraction * N * L))
        if m < 1:
            raise ValueError("element mask keeps no entries")
        flat = rng.choice(N * L, size=m, replace=False)
        omega.flat[flat] = True
    return ObservationMask(omega, spec)


@dataclass
class Objective:
    """Data-fit descriptor: tag g plus exponent p.

    Entrywise tags 'fro2'/'lp' and their masked variants penalize
    |x - y|^p per entry (p fixed at 2 for the Frobenius tags); row tags
    'l2p'/'masked_l2p' penalize the p-th power of each row's l2 norm.
    """

    g: str = "fro2"
    p: float = 2.0

    def __post_init__(self):
        if self.g not in OBJECTIVE_TAGS:
            raise ValueError(f"unknown objective {self.g!r}; expected one of {OBJECTIVE_TAGS}")
        if self.g.endswith("fro2"):
            self.p = 2.0
        if not 1.0 <= self.p <= 2.0:
            raise ValueError(f"exponent p must lie in [1, 2], got {self.p}")

    @property
    def masked(self):
        return self.g.startswith("masked")

    @property
    def rowwise(self):
        return self.g.endswith("l2p")


@dataclass
class Observation:
    """Observed data: Y with entries outside the mask exactly zero."""

    y: np.ndarray
    mask: ObservationMask
    objective: Objective = field(default_factory=Objective)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=complex)
        if self.y.shape != self.mask.omega.shape:
            raise ValueError("data and mask dimensions differ")
        if not np.all(np.isfinite(self.y)):
            raise ValueError("observations must be finite")

    @property
    def N(self):
        return self.y.shape[0]

    @property
    def L(self):
        return self.y.shape[1]


def observe(X, E, mask, objective=None):
    """Form the observation: mask applied to signal plus noise."""
    y = np.where(mask.omega, np.asarray(X) + np.asarray(E), 0.0)
    return Observation(y, mask, objective or Objective())


def exact_embedding(model, n):
    """Toeplitz coefficients ({t_l}, t) of the exact PSD block embedding.

    For a model with distinct frequencies and no zero-power component, the
    shared coefficients satisfy ``T(t) = A_n diag(p) A_n^H`` with
    ``p_k = ||S_{k,:}|| / sqrt(L)``, and the per-channel ones use
    ``p^l_k = |s_kl|^2 / p_k``. The channel coefficients sum to L times the
    shared ones, and each assembled block is PSD with rank at most K.

    Returns
    -------
    (tl, t) : arrays of shape (L, n) and (n,).
    """
    if model.K >= n:
        raise ValueError(f"need K < n, got K={model.K}, n={n}")
    L = model.L
    p = np.linalg.norm(model.S, axis=1) / np.sqrt(L)
    if np.any(p <= 0):
        raise ValueError("every component needs nonzero power across channels")
    An = vandermonde(model.f, n)
    pl = (np.abs(model.S) ** 2 / p[:, None]).T  # (L, K)
    t = An @ p.astype(complex)
    tl = pl.astype(complex) @ An.T
    return tl, t
