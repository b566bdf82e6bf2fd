"""Spectral algebra for Hermitian circulant matrices.

A circulant matrix is fully described by its first row and is diagonalized
by the unitary DFT matrix F (forward kernel exp(-2j*pi*n*k/N), scaled by
1/sqrt(N)).  That turns inversion and filtering into per-bin scalar work:
an N x N filter application costs O(N^2 log N) instead of the O(N^3) of a
dense product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

# Residual tolerances for floating-point noise on structurally exact
# quantities (Hermitian symmetry, real spectra).
HERMITIAN_RTOL = 1e-10
PROJECTION_RTOL = 1e-8

# Row blocks for the chunked filter application, sized to stay cache
# resident (~2 MiB of complex128 input per block).
_BLOCK_BYTES = 1 << 21


class CirculantStructureError(ValueError):
    """A matrix that should be (Hermitian) circulant is not, beyond tolerance."""


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass
class HermitianCirculant:
    """Hermitian circulant matrix stored as its first row.

    The dense matrix it stands for is ``M[a, b] = first_row[(b - a) % N]``.
    Hermitian symmetry requires ``first_row[k] == conj(first_row[N - k])``
    and a real leading entry; construction rejects rows that violate this
    beyond floating-point noise.
    """

    first_row: np.ndarray

    def __post_init__(self):
        row = np.asarray(self.first_row, dtype=np.complex128)
        if row.ndim != 1 or row.size < 1:
            raise ValueError("first_row must be a non-empty 1-D vector")
        if not np.all(np.isfinite(row.view(np.float64))):
            raise ValueError("first_row contains non-finite entries")
        scale = float(np.max(np.abs(row)))
        mismatch = np.abs(row - np.conj(np.roll(row[::-1], 1)))
        if scale > 0.0 and float(np.max(mismatch)) > HERMITIAN_RTOL * scale:
            raise CirculantStructureError(
                "first row is not Hermitian-symmetric: max deviation "
                f"{float(np.max(mismatch)):.3e} exceeds {HERMITIAN_RTOL:g} * {scale:.3e}"
            )
        self.first_row = row

    @property
    def size(self) -> int:
        return self.first_row.size

    def to_dense(self) -> np.ndarray:
        """Expand to the dense N x N matrix (for oracles and small problems)."""
        n = self.size
        lags = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
        return self.first_row[lags]


@dataclass
class SpectralFilter:
    """Eigenvalue vector of an operator F diag(.) F^H.

    Real for covariance spectra; complex entries are permitted for general
    filters.
    """

    eigenvalues: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("eigenvalues must be a non-empty 1-D vector")
        if not np.all(np.isfinite(vals)):
            raise ValueError("eigenvalues contain non-finite entries")
        self.eigenvalues = vals

    @property
    def size(self) -> int:
        return self.eigenvalues.size


def eigenvalues_via_dft(c: HermitianCirculant) -> SpectralFilter:
    """Eigenvalues of a Hermitian circulant matrix via the DFT of its first row.

    The companion eigenvector matrix is the unitary DFT matrix; ordering is
    the 0-based DFT bin order.  Spectra of Hermitian circulants are real, so
    residual imaginary parts up to ``HERMITIAN_RTOL`` (relative to the
    largest eigenvalue) are truncated; anything larger signals a
    non-Hermitian input and raises.
    """
    spectrum = np.fft.fft(c.first_row)
    scale = float(np.max(np.abs(spectrum)))
    residual = float(np.max(np.abs(spectrum.imag)))
    if scale > 0.0 and residual > HERMITIAN_RTOL * scale:
        raise CirculantStructureError(
            f"spectrum has imaginary residue {residual:.3e} beyond "
            f"{HERMITIAN_RTOL:g} * {scale:.3e}; input is not Hermitian circulant"
        )
    return SpectralFilter(spectrum.real.copy())


def reconstruct_dense(s: SpectralFilter) -> np.ndarray:
    """Dense matrix F diag(s) F^H for a spectral filter.

    Computed through the exact circulant embedding: the first row is the
    inverse DFT of the spectrum and the matrix is its cyclic expansion,
    which equals the unitary congruence F diag(s) F^H.
    """
    spectrum = np.asarray(s.eigenvalues, dtype=np.complex128)
    row = np.fft.ifft(spectrum)
    n = row.size
    lags = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return row[lags]


def circulant_project(m: np.ndarray) -> SpectralFilter:
    """Spectrum of the closest circulant matrix (Frobenius norm) to ``m``.

    Averages ``m`` along its cyclic diagonals and DFTs the averaged first
    row, an O(N^2) computation.  The result equals the diagonal of
    F^H m F, and coincides with :func:`eigenvalues_via_dft` whenever ``m``
    is exactly circulant.  ``m`` must be Hermitian (sample covariances
    qualify); the projected spectrum is then real up to rounding.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = float(np.max(np.abs(m)))
    asym = float(np.max(np.abs(m - m.conj().T)))
    if scale > 0.0 and asym > PROJECTION_RTOL * scale:
        raise ValueError(
            f"input is not Hermitian: max |m - m^H| = {asym:.3e} exceeds "
            f"{PROJECTION_RTOL:g} * {scale:.3e}"
        )
    n = m.shape[0]
    rows = np.arange(n)[:, None]
    averaged = m[rows, (rows + np.arange(n)[None, :]) % n].mean(axis=0)
    spectrum = np.fft.fft(averaged)
    spec_scale = float(np.max(np.abs(spectrum)))
    residual = float(np.max(np.abs(spectrum.imag)))
    if spec_scale > 0.0 and residual > PROJECTION_RTOL * spec_scale:
        raise ValueError(
            f"projected spectrum has imaginary residue {residual:.3e}; "
            "input is too far from Hermitian"
        )
    return SpectralFilter(spectrum.real.copy())


def apply_spectral_filter(y: np.ndarray, s: SpectralFilter) -> np.ndarray:
    """Right-multiply ``y`` by F diag(s) F^H without forming any dense matrix.

    Each row is transformed by an FFT, scaled per bin, and transformed
    back; the unnormalized forward/backward FFT pair equals the unitary
    F / F^H sandwich exactly.  Rows are processed in cache-sized blocks.
    Cost is O(rows * N log N); output is bit-for-bit deterministic for a
    fixed input.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {y.shape}")
    n = s.size
    if y.shape[1] != n:
        raise ValueError(f"filter size {n} does not match column count {y.shape[1]}")
    if not is_power_of_two(n):
        raise ValueError(f"filter length must be a power of two, got {n}")
    gains = s.eigenvalues
    out = np.empty(y.shape, dtype=np.complex128)
    block = max(1, _BLOCK_BYTES // (16 * n))
    for start in range(0, y.shape[0], block):
        stop = min(start + block, y.shape[0])
        spectrum = _fft.fft(y[start:stop], axis=1)
        spectrum *= gains
        out[start:stop] = _fft.ifft(spectrum, axis=1, overwrite_x=True)
    return out
