"""Scene geometry and spherical-wave channel construction for parallel UCA links.

Two N-element uniform circular arrays face each other on a common axis,
element k of each array at azimuth 2*pi*k/N (no relative rotation between
the arrays).  Because every pairwise distance depends only on the index
difference (n - m) mod N, both the line-of-sight channel matrix and its
covariance are circulant, which is what the spectral estimators exploit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circulant import CirculantStructureError, HermitianCirculant

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact

# Tolerance for the structural self-checks in build_ccm; violations signal
# an indexing bug, not physics.
CCM_STRUCTURE_RTOL = 1e-10


@dataclass(frozen=True)
class UcaConfig:
    """Physical scene: antenna count, array radii, link distance, carrier.

    ``link_distance`` is the axial separation of the two array planes in
    meters.  The quadratic distance approximation used throughout assumes
    ``link_distance`` well beyond the array radii; its worst-case error is
    reported by :func:`approximation_error` rather than enforced here.
    """

    n_antennas: int
    radius_tx: float
    radius_rx: float
    link_distance: float
    carrier_freq: float

    def __post_init__(self):
        if self.n_antennas < 2:
            raise ValueError(f"need at least 2 antennas, got {self.n_antennas}")
        for name in ("radius_tx", "radius_rx", "link_distance", "carrier_freq"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq


@dataclass
class ChannelMatrix:
    """One N x N complex channel realization (rows: receive, cols: transmit)."""

    entries: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=np.complex128)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"channel matrix must be square, got shape {h.shape}")
        if not np.all(np.isfinite(h.view(np.float64))):
            raise ValueError("channel matrix contains non-finite entries")
        self.entries = h

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if copy:
            return np.array(self.entries, dtype=dtype, copy=True)
        return np.asarray(self.entries, dtype=dtype)


def _squared_chord(cfg: UcaConfig, lag) -> np.ndarray:
    """R_t^2 + R_r^2 - 2 R_t R_r cos(2 pi lag / N), the transverse offset term.

    The lag is folded to min(k, N - k) so that +-k produce bit-identical
    cosines and pairwise quantities are exactly symmetric.
    """
    n = cfg.n_antennas
    reduced = np.asarray(lag) % n
    folded = np.minimum(reduced, n - reduced)
    angle = 2.0 * np.pi * folded / n
    return (cfg.radius_tx**2 + cfg.radius_rx**2
            - 2.0 * cfg.radius_tx * cfg.radius_rx * np.cos(angle))


def approx_distance(cfg: UcaConfig, n, m):
    """Quadratic (Fresnel) approximation of the element-pair distance.

    d + (R_t^2 + R_r^2 - 2 R_t R_r cos(2 pi (n - m)/N)) / (2 d).  Symmetric
    in (n, m); only (n - m) mod N matters, so any index convention works.
    """
    d = cfg.link_distance
    return d + _squared_chord(cfg, np.asarray(n) - np.asarray(m)) / (2.0 * d)


def exact_distance(cfg: UcaConfig, n, m):
    """Exact Euclidean distance between transmit element m and receive element n."""
    d = cfg.link_distance
    return np.sqrt(d * d + _squared_chord(cfg, np.asarray(n) - np.asarray(m)))


def approximation_error(cfg: UcaConfig) -> float:
    """Worst-case |approx_distance - exact_distance| over all index lags.

    Bounded by (R_t + R_r)^4 / (8 d^3), the second-order Taylor remainder;
    use this to judge whether the quadratic model is trustworthy for a
    given scene.
    """
    lags = np.arange(cfg.n_antennas)
    return float(np.max(np.abs(approx_distance(cfg, lags, 0) - exact_distance(cfg, lags, 0))))


def path_gain(cfg: UcaConfig, n, m):
    """Free-space amplitude gain between elements n and m (dimensionless).

    lambda * d / (4 pi d^2 + 2 pi (R_t^2 + R_r^2 - 2 R_t R_r cos(2 pi (n-m)/N))),
    i.e. lambda / (4 pi * approx_distance).  Strictly positive, symmetric,
    a function of (n - m) mod N only.
    """
    d = cfg.link_distance
    return (cfg.wavelength * d
            / (4.0 * np.pi * d * d + 2.0 * np.pi * _squared_chord(cfg, np.asarray(n) - np.asarray(m))))


def _lag_profiles(cfg: UcaConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-lag amplitude alpha(k) and phase phi(k) of the LoS channel.

    phi(k) is the part of the propagation phase that varies with the lag:
    2 pi R_t R_r cos(2 pi k / N) / (lambda d).  The constant offset
    pi (2 d^2 + R_t^2 + R_r^2) / (lambda d) is handled by the caller.
    """
    n = cfg.n_antennas
    lags = np.arange(n)
    folded = np.minimum(lags, n - lags) % n
    alpha = path_gain(cfg, lags, 0)
    phi = (2.0 * np.pi * cfg.radius_tx * cfg.radius_rx
           * np.cos(2.0 * np.pi * folded / n)
           / (cfg.wavelength * cfg.link_distance))
    return alpha, phi


def build_channel(cfg: UcaConfig) -> ChannelMatrix:
    """Deterministic line-of-sight channel matrix under the quadratic model.

    Entry (n, m) is path_gain(n, m) times a unit-modulus phasor whose phase
    is (2 pi / lambda) * approx_distance(n, m); the result is circulant.
    """
    n = cfg.n_antennas
    alpha, phi = _lag_profiles(cfg)
    constant = (np.pi * (2.0 * cfg.link_distance**2 + cfg.radius_tx**2 + cfg.radius_rx**2)
                / (cfg.wavelength * cfg.link_distance))
    # Reduce the (huge) constant phase before exp; keeps per-entry phase
    # error at the ulp level instead of eps * constant.
    per_lag = alpha * np.exp(1j * (np.mod(constant, 2.0 * np.pi) - phi))
    lags = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return ChannelMatrix(per_lag[lags])


def build_ccm(cfg: UcaConfig) -> HermitianCirculant:
    """Circulant channel covariance matrix of the spherical-wave UCA link.

    Entry (m, n) sums alpha(i-m) alpha(i-n) exp(j (phi(i-m) - phi(i-n)))
    over the N receive elements i, with the phase difference evaluated in
    its analytically cancelled form (product of radii times a cosine
    difference over lambda d) to avoid loss of precision.  Only the first
    row is stored; each lag is an O(N) sum, O(N^2) total.

    Raises :class:`CirculantStructureError` if the row computed for the
    second matrix row is not the cyclic shift of the first, or if the first
    row is not Hermitian-symmetric; either failure means an indexing bug.
    """
    n = cfg.n_antennas
    alpha, phi = _lag_profiles(cfg)
    u = alpha * np.exp(1j * phi)
    first_row = np.empty(n, dtype=np.complex128)
    second_row = np.empty(n, dtype=np.complex128)
    u_shift1 = np.roll(u, 1)
    for lag in range(n):
        shifted = np.conj(np.roll(u, lag))
        first_row[lag] = np.sum(u * shifted)
        second_row[lag] = np.sum(u_shift1 * shifted)
    scale = float(np.max(np.abs(first_row)))
    drift = float(np.max(np.abs(second_row - np.roll(first_row, 1))))
    if drift > CCM_STRUCTURE_RTOL * scale:
        raise CirculantStructureError(
            f"covariance rows are not cyclic shifts: deviation {drift:.3e} "
            f"exceeds {CCM_STRUCTURE_RTOL:g} * {scale:.3e}"
        )
    return HermitianCirculant(first_row)
