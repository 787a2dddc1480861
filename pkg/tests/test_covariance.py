import numpy as np
import pytest

import seldkit as sk
from seldkit.covariance import coherence_field

from conftest import steering_field


def random_psd(rng, m=4):
    b = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return b @ b.conj().T


def naive_scm(X, tr, fr):
    """Brute-force neighborhood averaging, nested loops."""
    M, T, F = X.shape
    out = np.zeros((T, F, M, M), dtype=complex)
    for t in range(T):
        for f in range(F):
            acc = np.zeros((M, M), dtype=complex)
            count = 0
            for tt in range(max(0, t - tr), min(T, t + tr + 1)):
                for ff in range(max(0, f - fr), min(F, f + fr + 1)):
                    x = X[:, tt, ff]
                    acc += np.outer(x, np.conj(x))
                    count += 1
            out[t, f] = acc / count
    return out


def power_method(R, iters=2000):
    """Independent dominant-eigenpair oracle."""
    rng = np.random.default_rng(99)
    v = rng.standard_normal(R.shape[0]) + 1j * rng.standard_normal(R.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        v = R @ v
        v /= np.linalg.norm(v)
    lam = float(np.real(np.conj(v) @ R @ v))
    return lam, v


def charpoly_max_eig(R):
    """Largest eigenvalue via Faddeev-LeVerrier coefficients + np.roots."""
    m = R.shape[0]
    coeffs = [1.0 + 0j]
    Mk = np.zeros_like(R)
    for k in range(1, m + 1):
        Mk = R @ Mk + coeffs[-1] * np.eye(m)
        coeffs.append(-np.trace(R @ Mk) / k)
    roots = np.roots(np.array(coeffs))
    return float(np.max(roots.real))


class TestEstimateScm:
    def test_constant_vector_is_rank_one(self, stft_cfg, rng):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        X = np.broadcast_to(v[:, None, None], (4, 5, 257)).copy()
        spec = sk.ComplexSpectrogram(X, stft_cfg)
        field = sk.estimate_scm(spec, 1, 1)
        expected = np.outer(v, np.conj(v))
        np.testing.assert_allclose(field.scms[2, 100], expected, atol=1e-12)

    def test_zero_radius_is_outer_product(self, stft_cfg, rng):
        X = rng.standard_normal((4, 3, 257)) + 1j * rng.standard_normal((4, 3, 257))
        spec = sk.ComplexSpectrogram(X, stft_cfg)
        field = sk.estimate_scm(spec, 0, 0)
        t, f = 1, 33
        np.testing.assert_allclose(
            field.scms[t, f], np.outer(X[:, t, f], np.conj(X[:, t, f])), atol=1e-14
        )
        np.testing.assert_allclose(
            np.trace(field.scms[t, f]).real, np.sum(np.abs(X[:, t, f]) ** 2)
        )

    def test_matches_nested_loop_oracle(self, rng):
        cfg = sk.StftConfig(n_fft=16, win_length=16, hop_length=8)
        X = rng.standard_normal((4, 6, 9)) + 1j * rng.standard_normal((4, 6, 9))
        spec = sk.ComplexSpectrogram(X, cfg)
        field = sk.estimate_scm(spec, 1, 1)
        np.testing.assert_allclose(field.scms, naive_scm(X, 1, 1), atol=1e-7)

    def test_freq_range_matches_full_field(self, rng):
        cfg = sk.StftConfig(n_fft=16, win_length=16, hop_length=8)
        X = rng.standard_normal((4, 6, 9)) + 1j * rng.standard_normal((4, 6, 9))
        spec = sk.ComplexSpectrogram(X, cfg)
        full = sk.estimate_scm(spec, 1, 1)
        part = sk.estimate_scm(spec, 1, 1, freq_range=(2, 6))
        assert part.bin_offset == 2 and part.n_bins == 5
        np.testing.assert_allclose(part.scms, full.scms[:, 2:7], atol=1e-12)

    def test_hermitian_and_psd(self, stft_cfg, rng):
        X = rng.standard_normal((4, 8, 257)) + 1j * rng.standard_normal((4, 8, 257))
        field = sk.estimate_scm(sk.ComplexSpectrogram(X, stft_cfg), 1, 1)
        scms = field.scms
        herm_dev = np.abs(scms - np.conj(np.swapaxes(scms, -1, -2))).max()
        assert herm_dev < 1e-6
        eigvals = np.linalg.eigvalsh(scms)
        traces = np.trace(scms, axis1=-2, axis2=-1).real
        assert np.all(eigvals[..., 0] >= -1e-6 * traces)

    def test_permutation_equivariance(self, stft_cfg, rng):
        X = rng.standard_normal((4, 5, 257)) + 1j * rng.standard_normal((4, 5, 257))
        perm = [2, 0, 3, 1]
        a = sk.estimate_scm(sk.ComplexSpectrogram(X, stft_cfg), 1, 1).scms
        b = sk.estimate_scm(sk.ComplexSpectrogram(X[perm], stft_cfg), 1, 1).scms
        np.testing.assert_allclose(b, a[:, :, perm][:, :, :, perm], atol=1e-12)

    def test_single_channel_rejected(self, stft_cfg):
        spec = sk.ComplexSpectrogram(np.zeros((1, 3, 257), dtype=complex), stft_cfg)
        with pytest.raises(ValueError, match="2 channels"):
            sk.estimate_scm(spec)


class TestPrincipalEigenvector:
    def test_identity_matrix(self):
        pair = sk.principal_eigenvector(np.eye(4, dtype=complex))
        assert pair.value == pytest.approx(1.0)
        residual = np.linalg.norm(np.eye(4) @ pair.vector - pair.value * pair.vector)
        assert residual <= 1e-6 * 4

    def test_rank_one(self, rng):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        v /= np.linalg.norm(v)
        pair = sk.principal_eigenvector(np.outer(v, np.conj(v)))
        assert pair.value == pytest.approx(1.0, abs=1e-12)
        assert abs(np.vdot(pair.vector, v)) == pytest.approx(1.0, abs=1e-9)

    def test_unit_norm_and_residual_bulk(self, rng):
        for _ in range(200):
            R = random_psd(rng)
            pair = sk.principal_eigenvector(R)
            assert np.linalg.norm(pair.vector) == pytest.approx(1.0, abs=1e-9)
            residual = np.linalg.norm(R @ pair.vector - pair.value * pair.vector)
            assert residual <= 1e-6 * np.trace(R).real

    def test_against_power_method_oracle(self, rng):
        checked = 0
        while checked < 25:
            R = random_psd(rng)
            w = np.linalg.eigvalsh(R)
            if w[-2] / w[-1] > 0.98:  # oracle converges too slowly near degeneracy
                continue
            lam, v = power_method(R)
            pair = sk.principal_eigenvector(R)
            assert pair.value == pytest.approx(lam, rel=1e-8)
            assert abs(np.vdot(pair.vector, v)) == pytest.approx(1.0, abs=1e-8)
            checked += 1

    def test_non_hermitian_rejected(self, rng):
        R = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        with pytest.raises(ValueError, match="Hermitian"):
            sk.principal_eigenvector(R)


class TestCoherence:
    def test_rank_one_is_unity(self, rng):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert sk.coherence(np.outer(v, np.conj(v))) == pytest.approx(1.0)

    def test_diffuse_identity(self):
        assert sk.coherence(np.eye(4, dtype=complex)) == pytest.approx(0.25)

    def test_diagonal_case(self):
        assert sk.coherence(np.diag([3.0, 1.0, 1.0, 1.0]).astype(complex)) == pytest.approx(0.5)

    def test_zero_trace_rejected(self):
        with pytest.raises(ValueError, match="trace"):
            sk.coherence(np.zeros((4, 4), dtype=complex))

    def test_simulated_single_source_coherent(self, tetra, stft_cfg):
        # noiseless rank-1 source model: X(t, f) = H(f) S(t, f); the 3x3
        # neighborhood mixes three adjacent-bin steering vectors, so
        # coherence dips slightly below 1 but stays above 0.999 in-band
        cfg = sk.FeatureConfig(kind=sk.FeatureKind.SALSA)
        spec = steering_field(tetra, 30.0, 10.0, stft_cfg, n_frames=40, seed=3)
        band = np.flatnonzero(cfg.spatial_band_mask(spec.frequencies))
        field = sk.estimate_scm(spec, 1, 1, freq_range=(int(band[0]), int(band[-1])))
        coh = coherence_field(field.scms)
        assert np.nanmin(coh) >= 0.999
