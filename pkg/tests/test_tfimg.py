"""Synchrosqueezed-transform and image-pipeline unit tests."""

import numpy as np
import pytest

from sehs.errors import DomainError
from sehs.tfimg import (
    TfImage,
    WsstConfig,
    cwt,
    load_tf_image,
    save_tf_image,
    to_image,
    wsst,
)
from sehs.tfimg.transform import bin_frequencies, scale_frequencies

DT = 1.0 / 256.0
T = DT * np.arange(2048)


class TestCwt:
    def test_tone_ridge_at_scale_frequency(self):
        cfg = WsstConfig()
        w, scales = cwt(np.sin(2.0 * np.pi * 8.0 * T), DT, cfg)
        f = scale_frequencies(scales, cfg)
        mid = np.abs(w[:, 512:1536]).mean(axis=1)
        assert f[np.argmax(mid)] == pytest.approx(8.0, rel=0.05)

    def test_low_tone_amplified_by_l2_normalization(self):
        """Equal-amplitude tones: the 4x lower tone shows sqrt(4)=2x the
        coefficient magnitude under the 1/sqrt(a) convention."""
        cfg = WsstConfig()
        sig = np.sin(2.0 * np.pi * 4.0 * T) + np.sin(2.0 * np.pi * 16.0 * T)
        w, scales = cwt(sig, DT, cfg)
        f = scale_frequencies(scales, cfg)
        mid = slice(512, 1536)
        a4 = np.abs(w[np.argmin(np.abs(f - 4.0)), mid]).mean()
        a16 = np.abs(w[np.argmin(np.abs(f - 16.0)), mid]).mean()
        assert a4 / a16 == pytest.approx(2.0, rel=0.10)

    def test_linearity(self):
        cfg = WsstConfig()
        sig = np.sin(2.0 * np.pi * 6.0 * T)
        w1, _ = cwt(sig, DT, cfg)
        w3, _ = cwt(3.0 * sig, DT, cfg)
        assert np.allclose(w3, 3.0 * w1, atol=1e-12)

    def test_input_validation(self):
        with pytest.raises(DomainError):
            cwt(np.zeros(32), DT)
        with pytest.raises(DomainError):
            cwt(np.zeros(128), -1.0)
        with pytest.raises(DomainError):
            cwt(np.zeros((2, 128)), DT)

    def test_band_must_be_resolvable(self):
        cfg = WsstConfig(freq_band=(0.0, 1e-4))
        with pytest.raises(DomainError):
            cwt(np.zeros(128), 1.0, cfg)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            WsstConfig(n_scales=8)
        with pytest.raises(DomainError):
            WsstConfig(gamma_threshold=2.0)


class TestWsst:
    def test_tone_concentration(self):
        cfg = WsstConfig()
        s = wsst(np.sin(2.0 * np.pi * 5.0 * T), DT, cfg)
        freqs = bin_frequencies(cfg)
        energy = s**2
        k = int(np.argmin(np.abs(freqs - 5.0)))
        frac = energy[k - 1:k + 2].sum() / energy.sum()
        assert frac > 0.99

    def test_chirp_ridge_tracks_instantaneous_frequency(self):
        cfg = WsstConfig()
        f0, f1 = 3.0, 18.0
        total = T[-1] + DT
        phase = 2.0 * np.pi * (f0 * T + (f1 - f0) * T**2 / (2.0 * total))
        s = wsst(np.sin(phase), DT, cfg)
        freqs = bin_frequencies(cfg)
        df = freqs[1] - freqs[0]
        inst = f0 + (f1 - f0) * T / total
        lo, hi = int(0.1 * T.size), int(0.9 * T.size)
        ridge = freqs[np.argmax(s[:, lo:hi], axis=0)]
        assert np.max(np.abs(ridge - inst[lo:hi])) <= df

    def test_time_shift_covariance(self):
        cfg = WsstConfig()
        sig = np.sin(2.0 * np.pi * 5.0 * T) * np.exp(-((T - 4.0)**2))
        s1 = wsst(sig, DT, cfg)
        s2 = wsst(np.roll(sig, 100), DT, cfg)
        assert np.allclose(np.roll(s1, 100, axis=1)[:, 200:-200],
                           s2[:, 200:-200], atol=1e-12)

    def test_zero_signal_gives_zero_matrix(self):
        s = wsst(np.zeros(256), DT, WsstConfig())
        assert np.all(s == 0.0)

    def test_output_shape(self):
        cfg = WsstConfig(freq_bins=64)
        s = wsst(np.sin(2.0 * np.pi * 5.0 * T), DT, cfg)
        assert s.shape == (64, T.size)


class TestImage:
    def test_amplitude_invariance(self):
        m = np.random.default_rng(0).random((128, 90))
        a = to_image(m)
        b = to_image(7.3 * m)
        assert np.max(np.abs(a.pixels - b.pixels)) < 1e-6

    def test_range_and_size(self):
        m = np.random.default_rng(1).random((128, 333))
        img = to_image(m, size=(64, 64))
        assert img.pixels.shape == (64, 64)
        assert img.pixels.min() >= 0.0 and img.pixels.max() <= 1.0
        # bilinear resampling smooths the peak but should stay near 1
        assert img.pixels.max() > 0.5

    def test_band_crop(self):
        """Content above the requested band must not leak into the image."""
        m = np.zeros((128, 128))
        m[96:, :] = 1.0   # energy only in the 15-20 Hz rows
        img = to_image(m, matrix_band=(0.0, 20.0), freq_band=(0.0, 10.0))
        assert img.degenerate
        assert np.all(img.pixels == 0.0)

    def test_degenerate_flag(self):
        img = to_image(np.zeros((128, 100)))
        assert img.degenerate
        ok = to_image(np.random.default_rng(2).random((128, 100)))
        assert not ok.degenerate

    def test_roundtrip(self, tmp_path):
        m = np.random.default_rng(3).random((128, 111))
        img = to_image(m, duration=1.5, source_id="x/y:z")
        path = tmp_path / "img.f32"
        save_tf_image(path, img)
        back = load_tf_image(path)
        assert np.array_equal(back.pixels.astype("<f4"),
                              img.pixels.astype("<f4"))
        assert back.freq_band == img.freq_band
        assert back.source_id == img.source_id
        assert back.degenerate == img.degenerate

    def test_png_export(self, tmp_path):
        img = to_image(np.random.default_rng(4).random((128, 80)))
        path = tmp_path / "img.f32"
        save_tf_image(path, img, png=True)
        from PIL import Image

        with Image.open(path.with_suffix(".png")) as png:
            assert png.size == (128, 128)
