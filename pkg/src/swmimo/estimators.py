"""Channel estimators over pilot-correlated observations Y = H + noise.

Five estimators are provided: least squares, dense LMMSE with a known
covariance, its FFT-based spectral equivalent, and the two unknown-
covariance counterparts built from the sample covariance of an observation
batch.  The spectral variants never form, factorize, or multiply a dense
N x N operator; their agreement with the dense paths is the core accuracy
property of the package.

All estimators act row-wise: the prior covariance is the covariance of a
single channel row, and estimates are formed by right-multiplying the
observation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .circulant import (
    HermitianCirculant,
    SpectralFilter,
    apply_spectral_filter,
    circulant_project,
    eigenvalues_via_dft,
    is_power_of_two,
)

#: Identifiers accepted by the simulation harness and the CLI.
ESTIMATOR_METHODS = (
    "ls",
    "lmmse-direct-known",
    "lmmse-swp-known",
    "lmmse-swp-unknown",
    "lmmse-direct-unknown",
)

#: Sample covariances with condition numbers beyond this are treated as
#: numerically singular.
MAX_SAMPLE_COV_CONDITION = 1e12


class InvalidCovarianceError(ValueError):
    """A covariance matrix that should be positive definite is not."""


class InsufficientObservationsError(ValueError):
    """The sample covariance is singular or too ill-conditioned to invert."""


@dataclass(frozen=True)
class NoiseModel:
    """Additive noise with per-entry complex variance ``sigma2``."""

    sigma2: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0.0):
            raise ValueError(f"sigma2 must be positive and finite, got {self.sigma2}")


@dataclass
class ObservationBatch:
    """T pilot-correlated N x N observations sharing one noise model."""

    observations: np.ndarray
    noise: NoiseModel

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=np.complex128)
        if obs.ndim == 2:
            obs = obs[None, :, :]
        if obs.ndim != 3 or obs.shape[0] < 1 or obs.shape[1] != obs.shape[2]:
            raise ValueError(
                f"observations must stack T square matrices, got shape {obs.shape}"
            )
        if not np.all(np.isfinite(obs.view(np.float64))):
            raise ValueError("observations contain non-finite entries")
        self.observations = obs

    @property
    def n_slots(self) -> int:
        return self.observations.shape[0]

    @property
    def n(self) -> int:
        return self.observations.shape[1]


@dataclass
class EstimateResult:
    """Channel estimate plus the spectral filter used, when one exists."""

    estimate: np.ndarray
    method: str
    filter_spectrum: SpectralFilter | None = None


def ls_estimate(y: np.ndarray) -> EstimateResult:
    """Least squares: with unitary pilots the observation is the estimate."""
    return EstimateResult(np.array(y, dtype=np.complex128, copy=True), "ls")


def known_ccm_gain(ccm: np.ndarray, noise: NoiseModel) -> np.ndarray:
    """Dense LMMSE gain (R + sigma2 I)^{-1} R via a Cholesky solve.

    Never forms an explicit inverse.  Raises
    :class:`InvalidCovarianceError` when R + sigma2 I fails to factorize,
    i.e. the supplied covariance is not positive semidefinite.
    """
    ccm = np.asarray(ccm, dtype=np.complex128)
    if ccm.ndim != 2 or ccm.shape[0] != ccm.shape[1]:
        raise ValueError(f"covariance must be square, got shape {ccm.shape}")
    regularized = ccm + noise.sigma2 * np.eye(ccm.shape[0])
    try:
        factor = cho_factor(regularized, lower=True)
    except LinAlgError as err:
        raise InvalidCovarianceError(
            f"covariance plus noise is not positive definite: {err}"
        ) from err
    return cho_solve(factor, ccm)


def lmmse_direct_known(y: np.ndarray, ccm: np.ndarray, noise: NoiseModel) -> EstimateResult:
    """LMMSE with a known dense covariance: y (R + sigma2 I)^{-1} R."""
    gain = known_ccm_gain(ccm, noise)
    return EstimateResult(np.asarray(y, dtype=np.complex128) @ gain, "lmmse-direct-known")


def known_spectral_gains(eigenvalues: np.ndarray, sigma2: float) -> np.ndarray:
    """Per-bin Wiener gains r / (r + sigma2), clamped into [0, 1].

    Covariance spectra are nonnegative in exact arithmetic; clamping
    removes the floating-point negatives so every returned gain is a
    contraction.
    """
    r = np.maximum(np.asarray(eigenvalues, dtype=np.float64), 0.0)
    return r / (r + sigma2)


def lmmse_swp_known(y: np.ndarray, ccm: HermitianCirculant, noise: NoiseModel) -> EstimateResult:
    """Spectral LMMSE with a known circulant covariance.

    Eigenvalues come from one length-N FFT of the covariance first row,
    the per-bin gains are r_k / (r_k + sigma2), and the filter is applied
    with row-wise FFTs; no N x N inversion or dense product anywhere.
    """
    r = eigenvalues_via_dft(ccm).eigenvalues
    gains = SpectralFilter(known_spectral_gains(r, noise.sigma2))
    return EstimateResult(apply_spectral_filter(y, gains), "lmmse-swp-known", gains)


def sample_covariance(batch: ObservationBatch) -> np.ndarray:
    """Row-sample covariance of the batch: (1/(T N)) sum_t Y_t^H Y_t.

    The T N observation rows are the i.i.d. samples here, so this is the
    maximum-likelihood estimate of the per-row observation covariance
    R + sigma2 I.  Hermitian positive semidefinite by construction.
    """
    obs = batch.observations
    acc = np.zeros((batch.n, batch.n), dtype=np.complex128)
    for slot in obs:
        acc += slot.conj().T @ slot
    acc /= batch.n_slots * batch.n
    return acc


def ml_spectral_eigs(batch: ObservationBatch) -> SpectralFilter:
    """ML estimate of the observation-covariance spectrum under the circulant constraint.

    The constrained ML solution is the circulant projection of the sample
    covariance; finite-sample noise can push individual bins slightly
    negative after projection, so the spectrum is clamped at zero.
    """
    if not is_power_of_two(batch.n):
        raise ValueError(f"spectral path requires a power-of-two size, got {batch.n}")
    projected = circulant_project(sample_covariance(batch))
    return SpectralFilter(np.maximum(projected.eigenvalues, 0.0))


def unknown_spectral_gains(lam: np.ndarray, sigma2: float) -> np.ndarray:
    """Per-bin gains (lam - sigma2) / lam, clamped into [0, 1].

    Bins where the estimated observation power drops below the noise floor
    (or to zero) carry no usable signal and are zeroed; the clamp is the
    spectral form of projecting the covariance estimate onto the PSD cone.
    """
    lam = np.asarray(lam, dtype=np.float64)
    gains = np.zeros_like(lam)
    positive = lam > 0.0
    gains[positive] = (lam[positive] - sigma2) / lam[positive]
    return np.clip(gains, 0.0, 1.0)


def lmmse_swp_unknown(y: np.ndarray, batch: ObservationBatch) -> EstimateResult:
    """Spectral LMMSE with the covariance spectrum estimated from the batch."""
    lam = ml_spectral_eigs(batch).eigenvalues
    gains = SpectralFilter(unknown_spectral_gains(lam, batch.noise.sigma2))
    return EstimateResult(apply_spectral_filter(y, gains), "lmmse-swp-unknown", gains)


def unknown_ccm_gain(batch: ObservationBatch) -> np.ndarray:
    """Dense unknown-covariance LMMSE gain R_hat^{-1} (R_hat - sigma2 I).

    R_hat is the sample covariance; the noise-floor subtraction happens
    after the solve, so only the positive-definite R_hat is factorized.
    """
    cov = sample_covariance(batch)
    eigs = np.linalg.eigvalsh(cov)
    if eigs[0] <= 0.0 or eigs[-1] > MAX_SAMPLE_COV_CONDITION * eigs[0]:
        raise InsufficientObservationsError(
            f"sample covariance is numerically singular (eig range "
            f"[{eigs[0]:.3e}, {eigs[-1]:.3e}]); gather more observations"
        )
    try:
        factor = cho_factor(cov, lower=True)
    except LinAlgError as err:
        raise InsufficientObservationsError(
            f"sample covariance failed to factorize: {err}"
        ) from err
    return cho_solve(factor, cov - batch.noise.sigma2 * np.eye(batch.n))


def lmmse_direct_unknown(y: np.ndarray, batch: ObservationBatch) -> EstimateResult:
    """Dense LMMSE with the covariance estimated from the batch."""
    gain = unknown_ccm_gain(batch)
    return EstimateResult(np.asarray(y, dtype=np.complex128) @ gain, "lmmse-direct-unknown")
