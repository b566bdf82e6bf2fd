"""Spectral-algebra tests.

Oracles: dense unitary-DFT congruences built from an explicit DFT matrix,
dense Hermitian eigensolvers, and dense matrix products.
"""

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from swmimo import (
    CirculantStructureError,
    HermitianCirculant,
    SpectralFilter,
    apply_spectral_filter,
    build_ccm,
    circulant_project,
    eigenvalues_via_dft,
    is_power_of_two,
    reconstruct_dense,
)


def unitary_dft(n: int) -> np.ndarray:
    return scipy.linalg.dft(n, scale="sqrtn")


def dense_congruence(spectrum: np.ndarray) -> np.ndarray:
    """Oracle for reconstruct_dense: literal F diag(s) F^H product."""
    f = unitary_dft(len(spectrum))
    return f @ np.diag(spectrum) @ f.conj().T


# Hermitian circulant first rows generated through real spectra, which are
# exactly Hermitian-symmetric by construction.
real_spectra = st.integers(min_value=0, max_value=5).flatmap(
    lambda k: st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
        min_size=2**k, max_size=2**k,
    )
)


def circulant_from_spectrum(spectrum) -> HermitianCirculant:
    return HermitianCirculant(np.fft.ifft(np.asarray(spectrum, dtype=complex)))


def random_hermitian(rng, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + a.conj().T


class TestHermitianCirculant:
    def test_rejects_non_hermitian_row(self):
        with pytest.raises(CirculantStructureError):
            HermitianCirculant(np.array([1.0, 2.0 + 1j, 3.0, 4.0 - 2j]))

    def test_rejects_complex_leading_entry(self):
        with pytest.raises(CirculantStructureError):
            HermitianCirculant(np.array([1.0 + 1j, 0.0, 0.0, 0.0]))

    def test_to_dense_layout(self):
        c = HermitianCirculant(np.array([5.0, 1.0 + 1j, 1.0 - 1j]))
        dense = c.to_dense()
        assert dense[0, 1] == 1.0 + 1j          # first row is the stored row
        assert dense[1, 2] == dense[0, 1]       # constant along cyclic diagonals
        assert dense[1, 0] == np.conj(dense[0, 1])

    def test_zero_row_is_valid(self):
        assert HermitianCirculant(np.zeros(4, dtype=complex)).size == 4


class TestEigenvaluesViaDft:
    def test_two_by_two(self):
        c = HermitianCirculant(np.array([3.0, -1.0], dtype=complex))
        r = eigenvalues_via_dft(c).eigenvalues
        np.testing.assert_allclose(np.sort(r), [2.0, 4.0])  # {a+b, a-b}

    def test_identity(self):
        c = HermitianCirculant(np.array([1.0, 0.0, 0.0, 0.0], dtype=complex))
        np.testing.assert_allclose(eigenvalues_via_dft(c).eigenvalues, np.ones(4))

    def test_matches_dense_eigensolver_on_scene_covariance(self, scene_factory):
        ccm = build_ccm(scene_factory(n=16))
        spectrum = np.sort(eigenvalues_via_dft(ccm).eigenvalues)
        dense_eigs = np.linalg.eigvalsh(ccm.to_dense())
        scale = np.max(np.abs(dense_eigs))
        assert np.max(np.abs(spectrum - dense_eigs)) <= 1e-9 * scale

    @given(real_spectra)
    def test_round_trips_real_spectra(self, spectrum):
        c = circulant_from_spectrum(spectrum)
        recovered = eigenvalues_via_dft(c).eigenvalues
        scale = max(1.0, float(np.max(np.abs(spectrum))))
        assert np.max(np.abs(recovered - spectrum)) <= 1e-9 * scale

    def test_output_is_real(self, scene_factory):
        r = eigenvalues_via_dft(build_ccm(scene_factory(n=32))).eigenvalues
        assert r.dtype == np.float64


class TestReconstructDense:
    def test_all_ones_is_identity(self):
        rec = reconstruct_dense(SpectralFilter(np.ones(8)))
        np.testing.assert_allclose(rec, np.eye(8), atol=1e-15)

    def test_two_by_two_inverse_case(self):
        a, b = 3.0, -1.0
        rec = reconstruct_dense(SpectralFilter(np.array([a + b, a - b])))
        np.testing.assert_allclose(rec, [[a, b], [b, a]], atol=1e-15)

    def test_matches_dense_congruence_oracle(self, rng):
        spectrum = rng.random(16) * 5.0
        rec = reconstruct_dense(SpectralFilter(spectrum))
        oracle = dense_congruence(spectrum)
        assert np.max(np.abs(rec - oracle)) <= 1e-12 * np.max(np.abs(oracle))

    def test_round_trip_on_scene_covariance(self, scene_factory):
        ccm = build_ccm(scene_factory(n=64))
        dense = ccm.to_dense()
        rec = reconstruct_dense(eigenvalues_via_dft(ccm))
        rel = np.max(np.abs(rec - dense)) / np.max(np.abs(dense))
        assert rel <= 1e-10


class TestCirculantProject:
    def test_consistent_with_dft_on_circulant_input(self, scene_factory):
        ccm = build_ccm(scene_factory(n=16))
        projected = circulant_project(ccm.to_dense()).eigenvalues
        direct = eigenvalues_via_dft(ccm).eigenvalues
        assert np.max(np.abs(projected - direct)) <= 1e-10 * np.max(np.abs(direct))

    def test_scaled_identity(self):
        np.testing.assert_allclose(
            circulant_project(2.5 * np.eye(8)).eigenvalues, np.full(8, 2.5), rtol=1e-14)

    def test_matches_dense_congruence_diagonal(self, rng):
        m = random_hermitian(rng, 8)
        f = unitary_dft(8)
        oracle = np.diag(f.conj().T @ m @ f).real
        projected = circulant_project(m).eigenvalues
        assert np.max(np.abs(projected - oracle)) <= 1e-10 * np.max(np.abs(oracle))

    def test_idempotent(self, rng):
        m = random_hermitian(rng, 8)
        once = circulant_project(m).eigenvalues
        twice = circulant_project(reconstruct_dense(SpectralFilter(once))).eigenvalues
        assert np.max(np.abs(once - twice)) <= 1e-10 * np.max(np.abs(once))

    def test_linear(self, rng):
        a, b = random_hermitian(rng, 8), random_hermitian(rng, 8)
        combined = circulant_project(2.0 * a + b).eigenvalues
        separate = 2.0 * circulant_project(a).eigenvalues + circulant_project(b).eigenvalues
        assert np.max(np.abs(combined - separate)) <= 1e-10 * np.max(np.abs(separate))

    def test_rejects_non_hermitian(self, rng):
        m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        with pytest.raises(ValueError):
            circulant_project(m)


class TestApplySpectralFilter:
    def test_identity_filter(self, rng):
        y = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        out = apply_spectral_filter(y, SpectralFilter(np.ones(16)))
        assert np.max(np.abs(out - y)) <= 1e-13 * np.max(np.abs(y))

    def test_zero_filter(self, rng):
        y = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        out = apply_spectral_filter(y, SpectralFilter(np.zeros(8)))
        assert np.all(out == 0.0)

    def test_matches_dense_product_oracle(self, rng):
        y = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        s = rng.random(16)
        f = unitary_dft(16)
        oracle = y @ f @ np.diag(s) @ f.conj().T
        out = apply_spectral_filter(y, SpectralFilter(s))
        rel = np.linalg.norm(out - oracle) / np.linalg.norm(oracle)
        assert rel <= 1e-10

    def test_complex_filter_allowed(self, rng):
        y = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        s = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        f = unitary_dft(8)
        oracle = y @ f @ np.diag(s) @ f.conj().T
        out = apply_spectral_filter(y, SpectralFilter(s))
        assert np.linalg.norm(out - oracle) / np.linalg.norm(oracle) <= 1e-10

    def test_linear_in_input_and_filter(self, rng):
        y1 = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        y2 = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        s1, s2 = rng.random(8), rng.random(8)
        lhs = apply_spectral_filter(y1 + y2, SpectralFilter(s1))
        rhs = apply_spectral_filter(y1, SpectralFilter(s1)) + apply_spectral_filter(y2, SpectralFilter(s1))
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(rhs))
        lhs = apply_spectral_filter(y1, SpectralFilter(s1 + s2))
        rhs = apply_spectral_filter(y1, SpectralFilter(s1)) + apply_spectral_filter(y1, SpectralFilter(s2))
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(rhs))

    def test_deterministic(self, rng):
        y = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
        s = SpectralFilter(rng.random(32))
        first = apply_spectral_filter(y, s)
        second = apply_spectral_filter(y, s)
        assert np.array_equal(first, second)

    def test_tall_input_allowed(self, rng):
        # Row stacks (T*N, N) are the harness's hot path.
        y = rng.standard_normal((24, 8)) + 1j * rng.standard_normal((24, 8))
        s = rng.random(8)
        f = unitary_dft(8)
        oracle = y @ f @ np.diag(s) @ f.conj().T
        out = apply_spectral_filter(y, SpectralFilter(s))
        assert np.linalg.norm(out - oracle) / np.linalg.norm(oracle) <= 1e-10

    def test_rejects_non_power_of_two(self, rng):
        y = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        with pytest.raises(ValueError):
            apply_spectral_filter(y, SpectralFilter(np.ones(6)))

    def test_rejects_size_mismatch(self, rng):
        y = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        with pytest.raises(ValueError):
            apply_spectral_filter(y, SpectralFilter(np.ones(16)))


def test_is_power_of_two():
    assert [n for n in range(1, 20) if is_power_of_two(n)] == [1, 2, 4, 8, 16]
    assert not is_power_of_two(0)
