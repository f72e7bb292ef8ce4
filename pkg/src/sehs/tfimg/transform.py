"""Continuous wavelet transform and wavelet synchrosqueezing.

The CWT uses an analytic Morlet wavelet evaluated in the frequency domain on
log-spaced scales. Synchrosqueezing reassigns each coefficient to its
instantaneous frequency, concentrating smeared scale ridges into sharp
frequency lines — the representation rasterized for the detector.
"""

from dataclasses import dataclass

import numpy as np

from sehs.errors import DomainError
from sehs.kernels import wsst_reassign


@dataclass(frozen=True)
class WsstConfig:
    """Wavelet and reassignment settings."""

    wavelet_center: float = 6.0     # dimensionless Morlet center frequency
    n_scales: int = 128
    gamma_threshold: float = 1e-4   # relative magnitude cutoff
    freq_bins: int = 128
    freq_band: tuple = (0.0, 20.0)  # [Hz]

    def __post_init__(self):
        if self.n_scales < 16:
            raise DomainError("n_scales must be >= 16")
        if not (0.0 < self.gamma_threshold < 1.0):
            raise DomainError("gamma_threshold must lie in (0, 1)")
        if self.freq_bins < 32:
            raise DomainError("freq_bins must be >= 32")
        if self.freq_band[1] <= self.freq_band[0] or self.freq_band[0] < 0:
            raise DomainError("freq_band must satisfy 0 <= f_lo < f_hi")


def _morlet_hat(xi: np.ndarray, mu: float) -> np.ndarray:
    """Analytic Morlet in the frequency domain (zero on xi <= 0)."""
    out = np.zeros_like(xi)
    pos = xi > 0.0
    out[pos] = np.pi**-0.25 * np.exp(-0.5 * (xi[pos] - mu)**2) * np.sqrt(2.0)
    return out


def _scales(signal_len: int, dt: float, config: WsstConfig) -> np.ndarray:
    """Log-spaced scales covering the analysis band.

    The lowest resolvable frequency needs a couple of wavelet cycles inside
    the record; the highest is capped below Nyquist.
    """
    mu = config.wavelet_center
    f_lo, f_hi = config.freq_band
    f_min = max(f_lo, 2.0 / (signal_len * dt))
    f_max = min(1.25 * f_hi, 0.45 / dt)
    if f_max <= f_min:
        raise DomainError(
            "frequency band not resolvable: record too short or band above "
            "Nyquist")
    # scale a maps to frequency mu / (2*pi*a)
    a_min = mu / (2.0 * np.pi * f_max)
    a_max = mu / (2.0 * np.pi * f_min)
    return np.geomspace(a_min, a_max, config.n_scales)


def cwt(signal: np.ndarray, dt: float, config: WsstConfig | None = None,
        return_derivative: bool = False):
    """CWT on log-spaced scales, L2-normalized (1/sqrt(a) convention).

    Returns (coefficients, scales); with ``return_derivative`` also the
    time-derivative of the coefficients needed for reassignment.
    """
    config = config or WsstConfig()
    signal = np.asarray(signal, dtype=float)
    if signal.ndim != 1 or signal.size < 64:
        raise DomainError("signal must be 1-D with at least 64 samples")
    if dt <= 0.0:
        raise DomainError("dt must be positive")

    scales = _scales(signal.size, dt, config)
    n = signal.size
    xhat = np.fft.fft(signal)
    omega = 2.0 * np.pi * np.fft.fftfreq(n, d=dt)
    wx = np.empty((scales.size, n), dtype=complex)
    dwx = np.empty_like(wx) if return_derivative else None
    for i, a in enumerate(scales):
        psi = np.sqrt(a) * np.conj(_morlet_hat(a * omega, config.wavelet_center))
        wx[i] = np.fft.ifft(xhat * psi)
        if return_derivative:
            dwx[i] = np.fft.ifft(xhat * psi * 1j * omega)
    if return_derivative:
        return wx, scales, dwx
    return wx, scales


def scale_frequencies(scales: np.ndarray, config: WsstConfig) -> np.ndarray:
    """Center frequency [Hz] each scale responds to."""
    return config.wavelet_center / (2.0 * np.pi * scales)


def wsst(signal: np.ndarray, dt: float,
         config: WsstConfig | None = None) -> np.ndarray:
    """Synchrosqueezed magnitude matrix on linear frequency bins.

    Instantaneous frequency is the phase rate Im[dW/db / W] / (2*pi); each
    above-threshold coefficient is squeezed into the nearest bin of the
    configured band, accumulated with the log-scale measure da/a.
    Rows are frequency bins (low to high), columns time samples.
    """
    config = config or WsstConfig()
    wx, scales, dwx = cwt(signal, dt, config, return_derivative=True)
    mag = np.abs(wx)
    peak = mag.max()
    n_bins = config.freq_bins
    f_lo, f_hi = config.freq_band
    df = (f_hi - f_lo) / n_bins
    if peak == 0.0:
        return np.zeros((n_bins, wx.shape[1]))
    with np.errstate(divide="ignore", invalid="ignore"):
        inst_freq = np.where(mag > 0.0,
                             (dwx / wx).imag / (2.0 * np.pi), np.nan)
    dlog_a = np.log(scales[1] / scales[0])
    weights = np.full(scales.size, dlog_a)  # da/a per log-spaced scale
    thr = config.gamma_threshold * peak
    s_re, s_im = wsst_reassign(np.ascontiguousarray(wx.real),
                               np.ascontiguousarray(wx.imag),
                               inst_freq, weights, thr,
                               f_lo + 0.5 * df, df, n_bins)
    return np.abs(s_re + 1j * s_im)


def bin_frequencies(config: WsstConfig) -> np.ndarray:
    """Center frequency [Hz] of each synchrosqueezed output bin."""
    f_lo, f_hi = config.freq_band
    df = (f_hi - f_lo) / config.freq_bins
    return f_lo + df * (0.5 + np.arange(config.freq_bins))
