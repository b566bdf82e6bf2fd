"""Monte-Carlo link simulation: pilots, channel draws, NMSE sweeps.

The harness reproduces the pilot-based estimation pipeline end to end and
measures normalized mean squared error per estimator per SNR point.  Two
channel models are supported:

* ``gaussian-prior`` (default): channel rows are i.i.d. circularly
  symmetric complex Gaussian vectors with the circulant scene covariance.
  Under this model the known-covariance LMMSE filter is exactly the
  per-row MMSE filter, so :func:`analytic_mmse` is an exact oracle for its
  error.
* ``deterministic-los``: every slot is the fixed line-of-sight channel
  matrix of the scene.

SNR is defined as mean per-entry channel power over per-entry noise power,
which makes the expected LS error exactly 10^(-SNR/10) in both modes.

Reproducibility: every random draw comes from a counter-based (Philox)
stream keyed by (seed, trial, slot, role), so results are bitwise
independent of execution order and worker count; trial results are
reduced with a fixed pairwise summation.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from threadpoolctl import threadpool_limits

from .circulant import (
    HermitianCirculant,
    SpectralFilter,
    apply_spectral_filter,
    eigenvalues_via_dft,
    is_power_of_two,
)
from .estimators import (
    ESTIMATOR_METHODS,
    NoiseModel,
    ObservationBatch,
    known_ccm_gain,
    known_spectral_gains,
    ml_spectral_eigs,
    sample_covariance,
    unknown_ccm_gain,
    unknown_spectral_gains,
)
from .geometry import ChannelMatrix, UcaConfig, build_ccm, build_channel

GAUSSIAN_PRIOR = "gaussian-prior"
DETERMINISTIC_LOS = "deterministic-los"
CHANNEL_MODES = (GAUSSIAN_PRIOR, DETERMINISTIC_LOS)

# Stream roles; part of the RNG keying, never reused across purposes.
_ROLE_CHANNEL = 1
_ROLE_NOISE = 2

#: Spectra this far below zero (relative to the largest eigenvalue) are
#: floating-point noise and are clamped; anything worse is rejected.
NEGATIVE_EIG_RTOL = 1e-12


def rng_stream(seed: int, trial: int, slot: int, role: int) -> np.random.Generator:
    """Independent counter-based generator for one (trial, slot, role) cell."""
    sequence = np.random.SeedSequence(entropy=(int(seed), int(trial), int(slot), int(role)))
    return np.random.Generator(np.random.Philox(sequence))


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """I.i.d. circularly symmetric complex Gaussians, ``variance`` per entry."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass
class PilotMatrix:
    """L x N pilot block with orthonormal columns (Gamma^H Gamma = I)."""

    entries: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.entries, dtype=np.complex128)
        if g.ndim != 2 or g.shape[0] < g.shape[1]:
            raise ValueError(f"pilot matrix must be tall (L >= N), got shape {g.shape}")
        self.entries = g

    @property
    def pilot_length(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


def make_pilots(n: int, length: int) -> PilotMatrix:
    """First ``n`` columns of the length-L unitary DFT matrix.

    Columns are exactly orthonormal up to rounding; ``length`` below ``n``
    is rejected because orthogonality is then impossible.
    """
    if length < n:
        raise ValueError(f"pilot length {length} is shorter than antenna count {n}")
    return PilotMatrix(scipy.linalg.dft(length, scale="sqrtn")[:, :n])


def transmit_receive(
    h: ChannelMatrix | np.ndarray,
    pilots: PilotMatrix,
    noise: NoiseModel | None,
    rng: np.random.Generator,
) -> np.ndarray:
    """One pilot slot over the air: Y = H Gamma^H + AWGN (N x L).

    ``noise=None`` transmits noiselessly.  Deterministic for a fixed rng
    state.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.shape[0] != pilots.n:
        raise ValueError(f"channel size {h.shape} does not match pilots for N={pilots.n}")
    received = h @ pilots.entries.conj().T
    if noise is not None:
        received = received + complex_normal(rng, received.shape, noise.sigma2)
    return received


def correlate(y: np.ndarray, pilots: PilotMatrix) -> np.ndarray:
    """Pilot correlation Y Gamma, collapsing the slot to an N x N observation.

    With orthonormal pilots this equals H plus noise whose entries are
    i.i.d. with the same per-entry variance as over the air.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.shape[1] != pilots.pilot_length:
        raise ValueError(f"received shape {y.shape} does not match pilot length {pilots.pilot_length}")
    return y @ pilots.entries


def _clamped_spectrum(ccm: HermitianCirculant) -> np.ndarray:
    r = eigenvalues_via_dft(ccm).eigenvalues
    top = float(np.max(r)) if r.size else 0.0
    if top > 0.0 and float(np.min(r)) < -NEGATIVE_EIG_RTOL * top:
        raise ValueError(
            f"covariance spectrum has a negative eigenvalue {float(np.min(r)):.3e}; "
            "input is not positive semidefinite"
        )
    return np.maximum(r, 0.0)


def sample_channel(
    ccm: HermitianCirculant,
    rng: np.random.Generator,
    mode: str = GAUSSIAN_PRIOR,
    los_channel: ChannelMatrix | None = None,
) -> ChannelMatrix:
    """Draw one channel realization.

    In ``gaussian-prior`` mode rows are i.i.d. complex Gaussian with the
    dense expansion of ``ccm`` as covariance, synthesized in the spectral
    domain as (white row) diag(sqrt(r)) F^H.  In ``deterministic-los`` mode
    the fixed ``los_channel`` is returned regardless of the rng.
    """
    if mode == DETERMINISTIC_LOS:
        if los_channel is None:
            raise ValueError("deterministic-los mode needs the line-of-sight channel")
        return ChannelMatrix(np.array(np.asarray(los_channel), copy=True))
    if mode != GAUSSIAN_PRIOR:
        raise ValueError(f"unknown channel mode {mode!r}; expected one of {CHANNEL_MODES}")
    amplitude = np.sqrt(_clamped_spectrum(ccm))
    white = complex_normal(rng, (ccm.size, ccm.size))
    return ChannelMatrix(np.fft.ifft(white * amplitude, axis=1, norm="ortho"))


def nmse(estimates, truths) -> float:
    """Sum_t ||Hhat_t - H_t||_F^2 / Sum_t ||H_t||_F^2."""
    estimates = [np.asarray(e) for e in estimates]
    truths = [np.asarray(t) for t in truths]
    if len(estimates) != len(truths):
        raise ValueError(f"{len(estimates)} estimates vs {len(truths)} truths")
    num = sum(float(np.sum(np.abs(e - t) ** 2)) for e, t in zip(estimates, truths))
    den = sum(float(np.sum(np.abs(t) ** 2)) for t in truths)
    if den == 0.0:
        raise ValueError("all-zero truth; NMSE undefined")
    return num / den


def analytic_mmse(ccm: HermitianCirculant, noise: NoiseModel) -> float:
    """Exact expected NMSE of the known-covariance LMMSE under the Gaussian prior.

    Sum_k r_k sigma2 / (r_k + sigma2) divided by Sum_k r_k.
    """
    r = _clamped_spectrum(ccm)
    total = float(np.sum(r))
    if total == 0.0:
        raise ValueError("all-zero covariance spectrum; NMSE undefined")
    return float(np.sum(r * noise.sigma2 / (r + noise.sigma2))) / total


@dataclass(frozen=True)
class ExperimentConfig:
    """One NMSE-versus-SNR experiment."""

    scene: UcaConfig
    t_slots: int = 10
    snr_points_db: tuple[float, ...] = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    trials: int = 2000
    seed: int = 0
    channel_mode: str = GAUSSIAN_PRIOR
    methods: tuple[str, ...] = ESTIMATOR_METHODS
    pilot_length: int | None = None
    use_pilot_path: bool = False

    def __post_init__(self):
        if self.t_slots < 1:
            raise ValueError(f"need at least one slot, got {self.t_slots}")
        if self.trials < 1:
            raise ValueError(f"need at least one trial, got {self.trials}")
        if len(self.snr_points_db) == 0:
            raise ValueError("need at least one SNR point")
        if self.channel_mode not in CHANNEL_MODES:
            raise ValueError(f"unknown channel mode {self.channel_mode!r}")
        if len(self.methods) == 0:
            raise ValueError("need at least one estimator method")
        for method in self.methods:
            if method not in ESTIMATOR_METHODS:
                raise ValueError(f"unknown method {method!r}; expected one of {ESTIMATOR_METHODS}")
        spectral = any(m in ("lmmse-swp-known", "lmmse-swp-unknown") for m in self.methods)
        if spectral and not is_power_of_two(self.scene.n_antennas):
            raise ValueError(
                f"spectral methods require a power-of-two antenna count, got {self.scene.n_antennas}"
            )
        if self.pilot_length is not None and self.pilot_length < self.scene.n_antennas:
            raise ValueError(
                f"pilot length {self.pilot_length} is shorter than N={self.scene.n_antennas}"
            )


@dataclass(frozen=True)
class NmsePoint:
    method: str
    snr_db: float
    nmse_mean: float
    nmse_stderr: float
    trials: int


@dataclass
class NmseCurve:
    """Monte-Carlo NMSE results per (method, SNR point)."""

    points: list[NmsePoint] = field(default_factory=list)

    def for_method(self, method: str) -> list[NmsePoint]:
        return [p for p in self.points if p.method == method]

    def lookup(self, method: str, snr_db: float) -> NmsePoint:
        for p in self.points:
            if p.method == method and p.snr_db == snr_db:
                return p
        raise KeyError(f"no point for ({method}, {snr_db})")


def mean_entry_power(ccm: HermitianCirculant, channel_mode: str) -> float:
    """Average per-entry channel power E|H_nm|^2 under the given model.

    Under the Gaussian row prior every entry has the (constant) diagonal
    covariance value; the deterministic line-of-sight channel concentrates
    the same diagonal over N entries per row, hence the 1/N.
    """
    diag = float(ccm.first_row[0].real)
    if channel_mode == DETERMINISTIC_LOS:
        return diag / ccm.size
    return diag


def noise_variance_for_snr(ccm: HermitianCirculant, channel_mode: str, snr_db: float) -> float:
    """Per-entry noise variance realizing the requested SNR."""
    return mean_entry_power(ccm, channel_mode) * 10.0 ** (-snr_db / 10.0)


def _estimate_stack(method, stacked, batch, known_gain, known_filter):
    """Apply one estimator to the (T*N, N) row stack of a slot batch."""
    if method == "ls":
        return stacked
    if method == "lmmse-direct-known":
        return stacked @ known_gain
    if method == "lmmse-swp-known":
        return apply_spectral_filter(stacked, known_filter)
    if method == "lmmse-swp-unknown":
        lam = ml_spectral_eigs(batch).eigenvalues
        gains = SpectralFilter(unknown_spectral_gains(lam, batch.noise.sigma2))
        return apply_spectral_filter(stacked, gains)
    if method == "lmmse-direct-unknown":
        return stacked @ unknown_ccm_gain(batch)
    raise ValueError(f"unknown method {method!r}")


def run_sweep(cfg: ExperimentConfig, workers: int = 1) -> NmseCurve:
    """Monte-Carlo NMSE sweep over the configured SNR grid.

    Per trial, T channel slots and unit-variance noise draws are generated
    once and rescaled per SNR point (common random numbers), every selected
    estimator runs on the same realizations, and per-trial NMSE values are
    aggregated into means and standard errors.  A failure in any estimator
    aborts the sweep with the offending trial in the message.
    """
    if workers < 1:
        raise ValueError(f"need at least one worker, got {workers}")
    scene = cfg.scene
    n = scene.n_antennas
    t_slots = cfg.t_slots
    ccm = build_ccm(scene)
    los = build_channel(scene) if cfg.channel_mode == DETERMINISTIC_LOS else None
    pilots = make_pilots(n, cfg.pilot_length or n) if cfg.use_pilot_path else None

    snr_db = [float(s) for s in cfg.snr_points_db]
    sigma2 = [noise_variance_for_snr(ccm, cfg.channel_mode, s) for s in snr_db]
    needs_dense = "lmmse-direct-known" in cfg.methods
    needs_batch = any(m in ("lmmse-swp-unknown", "lmmse-direct-unknown") for m in cfg.methods)
    dense_ccm = ccm.to_dense() if needs_dense else None
    known_gains = [known_ccm_gain(dense_ccm, NoiseModel(s)) if needs_dense else None
                   for s in sigma2]
    spectrum = _clamped_spectrum(ccm)
    known_filters = [SpectralFilter(known_spectral_gains(spectrum, s)) for s in sigma2]

    results = np.empty((cfg.trials, len(snr_db), len(cfg.methods)), dtype=np.float64)

    def run_trial(trial: int) -> None:
        channels = np.empty((t_slots, n, n), dtype=np.complex128)
        received = np.empty((t_slots, n, n), dtype=np.complex128)
        unit_noise = np.empty((t_slots, n, n), dtype=np.complex128)
        for slot in range(t_slots):
            ch_rng = rng_stream(cfg.seed, trial, slot, _ROLE_CHANNEL)
            channels[slot] = sample_channel(ccm, ch_rng, cfg.channel_mode, los).entries
            noise_rng = rng_stream(cfg.seed, trial, slot, _ROLE_NOISE)
            if pilots is not None:
                # Over-the-air path: unit noise lands on the N x L slot and
                # is correlated down to N x N alongside the channel.
                raw = complex_normal(noise_rng, (n, pilots.pilot_length))
                unit_noise[slot] = correlate(raw, pilots)
                received[slot] = correlate(channels[slot] @ pilots.entries.conj().T, pilots)
            else:
                unit_noise[slot] = complex_normal(noise_rng, (n, n))
                received[slot] = channels[slot]
        truth_power = float(np.sum(np.abs(channels) ** 2))
        for snr_index, s2 in enumerate(sigma2):
            observed = received + np.sqrt(s2) * unit_noise
            batch = ObservationBatch(observed, NoiseModel(s2)) if needs_batch else None
            stacked = observed.reshape(t_slots * n, n)
            flat_truth = channels.reshape(t_slots * n, n)
            for method_index, method in enumerate(cfg.methods):
                try:
                    estimate = _estimate_stack(
                        method, stacked, batch,
                        known_gains[snr_index], known_filters[snr_index],
                    )
                except Exception as err:
                    raise RuntimeError(
                        f"estimator {method!r} failed at trial {trial}, "
                        f"SNR {snr_db[snr_index]} dB: {err}"
                    ) from err
                error_power = float(np.sum(np.abs(estimate - flat_truth) ** 2))
                results[trial, snr_index, method_index] = error_power / truth_power

    with threadpool_limits(limits=1):
        if workers == 1:
            for trial in range(cfg.trials):
                run_trial(trial)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for _ in pool.map(run_trial, range(cfg.trials)):
                    pass

    means = results.mean(axis=0)
    if cfg.trials > 1:
        stderr = results.std(axis=0, ddof=1) / np.sqrt(cfg.trials)
    else:
        stderr = np.zeros_like(means)

    points = [
        NmsePoint(method, snr_db[snr_index],
                  float(means[snr_index, method_index]),
                  float(stderr[snr_index, method_index]),
                  cfg.trials)
        for method_index, method in enumerate(cfg.methods)
        for snr_index in range(len(snr_db))
    ]
    return NmseCurve(points)
