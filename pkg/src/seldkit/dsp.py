"""Windowed STFT, log-power spectrograms and mel filterbanks.

Everything downstream (spatial features, GCC-PHAT, covariance analysis)
derives from the complex spectrogram produced here, so the conventions are
pinned once: periodic Hann window, centered frames with reflect padding,
one-sided FFT, frame count T = N // hop + 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "StftConfig",
    "MultichannelAudio",
    "ComplexSpectrogram",
    "MelFilterbank",
    "stft",
    "log_power",
    "make_mel_filterbank",
    "apply_mel",
    "hz_to_mel",
    "mel_to_hz",
]

LOG_EPS = 1e-10


@dataclass(frozen=True)
class StftConfig:
    """Analysis parameters shared by every feature pipeline."""

    sample_rate: int = 24000
    win_length: int = 512
    hop_length: int = 300
    n_fft: int = 512
    window: str = "hann"
    center_pad: bool = True

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.hop_length < 1:
            raise ValueError("hop_length must be >= 1")
        if self.win_length > self.n_fft:
            raise ValueError("win_length must not exceed n_fft")
        if self.window != "hann":
            raise ValueError(f"unsupported window {self.window!r}")

    @property
    def n_bins(self) -> int:
        return self.n_fft // 2 + 1

    @property
    def freq_resolution(self) -> float:
        """Hz covered by one FFT bin."""
        return self.sample_rate / self.n_fft


@dataclass
class MultichannelAudio:
    """M-channel PCM signal, channel-major, amplitudes nominally in [-1, 1]."""

    samples: np.ndarray  # (M, N)
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 2:
            raise ValueError("samples must be a 2-D (channels, samples) array")
        if self.samples.shape[0] < 1:
            raise ValueError("need at least one channel")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def n_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate


@dataclass
class ComplexSpectrogram:
    """Per-channel STFT tensor, shape (M, T, F) with F = n_fft // 2 + 1."""

    data: np.ndarray
    config: StftConfig

    def __post_init__(self):
        self.data = np.asarray(self.data)
        if self.data.ndim != 3:
            raise ValueError("spectrogram data must be (channels, frames, bins)")
        if self.data.shape[2] != self.config.n_bins:
            raise ValueError(
                f"bin axis {self.data.shape[2]} does not match n_fft "
                f"{self.config.n_fft}"
            )

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]

    @property
    def n_bins(self) -> int:
        return self.data.shape[2]

    @property
    def freq_resolution(self) -> float:
        return self.config.freq_resolution

    @property
    def frequencies(self) -> np.ndarray:
        """Center frequency of each bin in Hz."""
        return np.arange(self.n_bins) * self.freq_resolution


def periodic_hann(length: int) -> np.ndarray:
    """Periodic (DFT-even) Hann window."""
    n = np.arange(length)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * n / length))


def stft(audio: MultichannelAudio, cfg: StftConfig) -> ComplexSpectrogram:
    """Short-time Fourier transform of every channel.

    With ``center_pad`` the signal is reflect-padded by n_fft // 2 on both
    sides so frame t is centered on sample t * hop_length and
    T = N // hop_length + 1.
    """
    if audio.sample_rate != cfg.sample_rate:
        raise ValueError(
            f"audio sample rate {audio.sample_rate} does not match config "
            f"{cfg.sample_rate}"
        )
    if audio.n_samples == 0:
        raise ValueError("cannot transform an empty signal")

    x = audio.samples
    if cfg.center_pad:
        pad = cfg.n_fft // 2
        mode = "reflect" if audio.n_samples > 1 else "edge"
        x = np.pad(x, ((0, 0), (pad, pad)), mode=mode)
        n_frames = audio.n_samples // cfg.hop_length + 1
    else:
        if audio.n_samples < cfg.n_fft:
            raise ValueError("signal shorter than one frame (center_pad off)")
        n_frames = 1 + (audio.n_samples - cfg.n_fft) // cfg.hop_length

    window = periodic_hann(cfg.win_length)
    if cfg.win_length < cfg.n_fft:
        # center the window inside the FFT buffer
        padded = np.zeros(cfg.n_fft)
        off = (cfg.n_fft - cfg.win_length) // 2
        padded[off : off + cfg.win_length] = window
        window = padded

    frames = np.lib.stride_tricks.sliding_window_view(x, cfg.n_fft, axis=1)
    frames = frames[:, :: cfg.hop_length, :][:, :n_frames, :]
    data = np.fft.rfft(frames * window, n=cfg.n_fft, axis=-1)
    return ComplexSpectrogram(data=data, config=cfg)


def power_to_db(power: np.ndarray, eps: float = LOG_EPS) -> np.ndarray:
    """10*log10(power + eps); eps floors silence at -100 dB by default."""
    return 10.0 * np.log10(power + eps)


def log_power(spec: ComplexSpectrogram, eps: float = LOG_EPS) -> np.ndarray:
    """Log-power spectrogram 10*log10(|X|^2 + eps), shape (M, T, F)."""
    return power_to_db(np.abs(spec.data) ** 2, eps)


def hz_to_mel(f_hz):
    return 2595.0 * np.log10(1.0 + np.asarray(f_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


@dataclass
class MelFilterbank:
    """Triangular mel filterbank on linear FFT bins; rows sum to one."""

    weights: np.ndarray  # (K, F)
    k_bands: int = 128
    f_min: float = 50.0
    f_max: float = 9000.0
    band_centers_hz: np.ndarray = field(default=None, repr=False)

    @property
    def n_bins(self) -> int:
        return self.weights.shape[1]


def make_mel_filterbank(
    k_bands: int = 128,
    n_fft: int = 512,
    sample_rate: int = 24000,
    f_min: float = 50.0,
    f_max: float = 9000.0,
) -> MelFilterbank:
    """Build k_bands triangular filters with edges uniform on the mel scale.

    Bands too narrow to catch any FFT bin center fall back to the single
    nearest bin, so every row stays nonzero up to k_bands equal to the
    number of bins strictly inside (f_min, f_max).
    """
    nyquist = sample_rate / 2.0
    if not (0.0 <= f_min < f_max <= nyquist):
        raise ValueError(
            f"need 0 <= f_min < f_max <= Nyquist, got [{f_min}, {f_max}] "
            f"at sample rate {sample_rate}"
        )
    n_bins = n_fft // 2 + 1
    fft_freqs = np.arange(n_bins) * (sample_rate / n_fft)
    usable = int(np.count_nonzero((fft_freqs > f_min) & (fft_freqs < f_max)))
    if k_bands < 1 or k_bands > usable:
        raise ValueError(
            f"k_bands={k_bands} exceeds the {usable} FFT bins inside "
            f"({f_min}, {f_max}) Hz; some band would have empty support"
        )

    edges_hz = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), k_bands + 2))
    weights = np.zeros((k_bands, n_bins))
    for k in range(k_bands):
        left, center, right = edges_hz[k], edges_hz[k + 1], edges_hz[k + 2]
        lower = (fft_freqs - left) / (center - left)
        upper = (right - fft_freqs) / (right - center)
        w = np.maximum(0.0, np.minimum(lower, upper))
        if not w.any():
            w[np.argmin(np.abs(fft_freqs - center))] = 1.0
        weights[k] = w / w.sum()

    return MelFilterbank(
        weights=weights,
        k_bands=k_bands,
        f_min=f_min,
        f_max=f_max,
        band_centers_hz=edges_hz[1:-1].copy(),
    )


def apply_mel(
    power_spec: np.ndarray, fb: MelFilterbank, eps: float = LOG_EPS
) -> np.ndarray:
    """Pool a linear power spectrogram into log-mel bands.

    power_spec is (M, T, F) linear power; output is (M, T, K) in dB,
    10*log10 taken after the mel pooling.
    """
    power_spec = np.asarray(power_spec)
    if power_spec.ndim != 3 or power_spec.shape[2] != fb.n_bins:
        raise ValueError(
            f"power spectrogram bins {power_spec.shape} do not match "
            f"filterbank width {fb.n_bins}"
        )
    pooled = power_spec @ fb.weights.T
    return power_to_db(pooled, eps)
