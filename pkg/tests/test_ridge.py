import numpy as np
import pytest

from asso.errors import EmptyRidgeError, InvalidParameterError, NoPeakError
from asso.ridge import ChirpRateTrack, Ridge, detect_ridge, estimate_chirp_rate, global_peak
from asso.stft import FrequencyGrid, SigmaTrack, TFRepresentation


def make_tf(values, bins, fs, offset=0):
    values = np.asarray(values, dtype=complex)
    return TFRepresentation(
        values, FrequencyGrid(bins), SigmaTrack.constant(0.05, values.shape[0]), fs, 0.0, offset
    )


def bump_matrix(bins, freq_per_frame, width=3.0, amp_per_frame=1.0):
    f = np.atleast_1d(np.asarray(freq_per_frame, dtype=float))
    a = np.broadcast_to(np.asarray(amp_per_frame, dtype=float), f.shape)
    return a[:, None] * np.exp(-0.5 * ((bins[None, :] - f[:, None]) / width) ** 2)


class TestGlobalPeak:
    def test_peak_location(self):
        bins = np.arange(128) * 1.0
        env = np.exp(-0.5 * ((np.arange(100) - 37) / 10.0) ** 2)
        tf = make_tf(bump_matrix(bins, np.full(100, 50.0), amp_per_frame=env), bins, 100.0)
        row, col = global_peak(tf)
        assert row == 37
        assert bins[col] == 50.0

    def test_zero_frequency_bin_ignored(self):
        bins = np.arange(64) * 1.0
        values = np.zeros((10, 64))
        values[:, 0] = 100.0  # eta = 0; must never seed a ridge
        values[4, 20] = 1.0
        assert global_peak(make_tf(values, bins, 64.0)) == (4, 20)

    def test_all_zero_raises(self):
        bins = np.arange(16) * 1.0
        with pytest.raises(NoPeakError):
            global_peak(make_tf(np.zeros((5, 16)), bins, 16.0))


class TestDetectRidge:
    def test_tracks_linear_frequency(self):
        fs, n = 128.0, 128
        bins = np.arange(256) * 0.5
        f = 30.0 + 40.0 * np.arange(n) / fs
        tf = make_tf(bump_matrix(bins, f, width=2.0), bins, fs)
        ridge = detect_ridge(tf, global_peak(tf), lambda0=5.0, gamma2_abs=0.1)
        assert len(ridge) == n  # magnitude never drops, support is the whole record
        assert np.abs(ridge.eta_hz - f).max() <= 0.5 * 0.5 + 1e-12  # within half a bin

    def test_band_keeps_ridge_off_stronger_neighbor(self):
        fs, n = 64.0, 80
        bins = np.arange(200) * 0.5
        weak = bump_matrix(bins, np.full(n, 50.0), width=1.5)
        strong = 2.0 * bump_matrix(bins, np.full(n, 70.0), width=1.5)
        tf = make_tf(weak + strong, bins, fs)
        seed_bin = int(np.argmin(np.abs(bins - 50.0)))
        ridge = detect_ridge(tf, (40, seed_bin), lambda0=8.0, gamma2_abs=0.05)
        assert np.abs(ridge.eta_hz - 50.0).max() <= 1.0

    def test_stop_threshold_bounds_support(self):
        fs, n = 64.0, 120
        bins = np.arange(128) * 1.0
        env = np.exp(-0.5 * ((np.arange(n) - 60) / 12.0) ** 2)
        tf = make_tf(bump_matrix(bins, np.full(n, 40.0), amp_per_frame=env), bins, fs)
        gamma2 = 0.25
        ridge = detect_ridge(tf, global_peak(tf), lambda0=5.0, gamma2_abs=gamma2)
        inside = np.flatnonzero(env > gamma2)
        assert ridge.start_frame == inside[0]
        assert ridge.stop_frame == inside[-1] + 1
        assert (ridge.magnitude > gamma2).all()

    def test_contiguity_and_band_invariants(self):
        rng = np.random.default_rng(17)
        fs, n = 64.0, 90
        bins = np.arange(150) * 0.5
        f = 25.0 + np.cumsum(rng.uniform(-0.2, 0.2, n))
        tf = make_tf(bump_matrix(bins, f, width=2.0), bins, fs)
        lam = 4.0
        ridge = detect_ridge(tf, global_peak(tf), lambda0=lam, gamma2_abs=0.1)
        steps = np.abs(np.diff(ridge.eta_hz))
        assert steps.max() <= lam + 1e-12
        assert ridge.start_frame <= ridge.seed_frame < ridge.stop_frame

    def test_seed_below_threshold_raises(self):
        bins = np.arange(64) * 1.0
        tf = make_tf(0.01 * bump_matrix(bins, np.full(20, 30.0)), bins, 64.0)
        with pytest.raises(EmptyRidgeError):
            detect_ridge(tf, (10, 30), lambda0=5.0, gamma2_abs=0.5)

    def test_seed_validation(self):
        bins = np.arange(64) * 1.0
        tf = make_tf(bump_matrix(bins, np.full(20, 30.0)), bins, 64.0)
        with pytest.raises(InvalidParameterError):
            detect_ridge(tf, (25, 30), lambda0=5.0, gamma2_abs=0.1)
        with pytest.raises(InvalidParameterError):
            detect_ridge(tf, (10, 0), lambda0=5.0, gamma2_abs=0.1)  # eta = 0 bin
        with pytest.raises(InvalidParameterError):
            detect_ridge(tf, (10, 30), lambda0=-1.0, gamma2_abs=0.1)

    def test_per_frame_lambda0(self):
        fs, n = 64.0, 60
        bins = np.arange(128) * 0.5
        f = 20.0 + 15.0 * np.arange(n) / fs
        tf = make_tf(bump_matrix(bins, f, width=1.5), bins, fs)
        lam = np.full(n, 4.0)
        ridge = detect_ridge(tf, global_peak(tf), lambda0=lam, gamma2_abs=0.1)
        assert np.abs(ridge.eta_hz - f).max() <= 0.26


class TestEstimateChirpRate:
    @staticmethod
    def affine_ridge(fs, n, c=20.0, r=37.0):
        t = np.arange(n) / fs
        eta = c + r * t
        return Ridge(0, np.zeros(n, dtype=int), eta, np.ones(n), 0)

    def test_exact_on_affine(self):
        fs = 512.0
        ridge = self.affine_ridge(fs, 200)
        track = estimate_chirp_rate(ridge, fs, 30)
        np.testing.assert_allclose(track.values, 37.0, atol=1e-9)

    def test_zero_on_constant(self):
        fs = 128.0
        ridge = self.affine_ridge(fs, 100, c=50.0, r=0.0)
        track = estimate_chirp_rate(ridge, fs, 20)
        np.testing.assert_allclose(track.values, 0.0, atol=1e-12)

    def test_short_ridge_falls_back_to_zero(self):
        ridge = Ridge(5, np.array([3, 3]), np.array([10.0, 10.5]), np.ones(2), 5)
        track = estimate_chirp_rate(ridge, 64.0, 10)
        assert (track.values == 0.0).all()

    def test_jitter_tolerance(self):
        # half-bin quantization jitter; LS slope noise scales as bin/(dt sqrt(L^3/12))
        rng = np.random.default_rng(23)
        fs, n, w, bin_hz = 512.0, 400, 30, 1.0
        t = np.arange(n) / fs
        eta = 20.0 + 37.0 * t + rng.uniform(-bin_hz / 2, bin_hz / 2, n)
        ridge = Ridge(0, np.zeros(n, dtype=int), eta, np.ones(n), 0)
        track = estimate_chirp_rate(ridge, fs, w)
        L = 2 * w + 1
        bound = 3.0 * bin_hz / ((1.0 / fs) * np.sqrt(L**3 / 12.0))
        interior = track.values[w : n - w]
        assert np.abs(interior - 37.0).max() <= bound

    def test_per_frame_halfwidth(self):
        fs = 256.0
        ridge = self.affine_ridge(fs, 64, c=10.0, r=5.0)
        track = estimate_chirp_rate(ridge, fs, np.full(64, 8))
        np.testing.assert_allclose(track.values, 5.0, atol=1e-9)

    def test_halfwidth_validation(self):
        ridge = self.affine_ridge(64.0, 16)
        with pytest.raises(InvalidParameterError):
            estimate_chirp_rate(ridge, 64.0, 0)


class TestTrackTypes:
    def test_ridge_validation(self):
        with pytest.raises(InvalidParameterError):
            Ridge(0, np.array([1, 2]), np.array([1.0]), np.array([1.0, 2.0]), 0)
        with pytest.raises(InvalidParameterError):
            Ridge(0, np.array([1, 2]), np.array([1.0, 2.0]), np.array([1.0, 2.0]), 5)

    def test_chirp_track_validation(self):
        with pytest.raises(InvalidParameterError):
            ChirpRateTrack(0, np.array([np.nan]))
