"""The four competing feature tensors for array-based SELD.

All four stack per-channel spectrograms with spatial channels:

* ``melspecgcc`` -- log-mel spectrograms + pairwise GCC-PHAT lag spectra
  ((M^2+M)/2 channels, mel/lag axis).
* ``salsa`` -- linear-frequency log-power spectrograms + the
  eigenvector-based phase vector (EPV) from the spatial covariance field
  (2M-1 channels).
* ``salsa-ipd`` -- same layout with plain inter-channel phase differences
  (cycles).
* ``salsa-lite`` -- same layout with frequency-normalized phase differences
  (NIPD, metres): for a single-source bin the NIPD approximates the
  relative distances of arrival regardless of frequency.

Spatial channels are zeroed outside [spatial_low_hz, spatial_high_hz]; the
upper cutoff guards against spatial aliasing, where inter-channel phase
wraps past +-pi and the distance estimate becomes ambiguous.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .covariance import ScmField, estimate_scm, principal_eigenvectors
from .dsp import (
    ComplexSpectrogram,
    MultichannelAudio,
    StftConfig,
    apply_mel,
    make_mel_filterbank,
    power_to_db,
    stft,
)
from .geometry import SPEED_OF_SOUND, ArrayGeometry

__all__ = [
    "FeatureKind",
    "FeatureConfig",
    "ChannelRole",
    "AxisMeta",
    "FeatureTensor",
    "compute_gcc_phat",
    "compute_ipd",
    "compute_nipd",
    "compute_epv",
    "build_feature",
    "FeatureScaler",
    "fit_scaler",
]

GCC_EPS = 1e-10


class FeatureKind(str, Enum):
    MELSPECGCC = "melspecgcc"
    SALSA = "salsa"
    SALSA_IPD = "salsa-ipd"
    SALSA_LITE = "salsa-lite"

    @property
    def is_salsa_family(self) -> bool:
        return self is not FeatureKind.MELSPECGCC


@dataclass(frozen=True)
class FeatureConfig:
    """Everything build_feature needs besides the audio and the geometry.

    spatial_high_hz defaults per kind when left None: 2 kHz for
    salsa-lite/salsa-ipd (phase-based channels stop at the aliasing
    frequency of the reference array) and 4 kHz for salsa (the
    eigenvector feature tolerates a higher cutoff).
    """

    kind: FeatureKind = FeatureKind.SALSA_LITE
    stft: StftConfig = field(default_factory=StftConfig)
    spec_cutoff_hz: float = 9000.0
    spatial_low_hz: float = 50.0
    spatial_high_hz: Optional[float] = None
    mel_bands: int = 128
    use_magnitude_test: bool = True
    use_coherence_test: bool = True
    coherence_threshold: float = 0.5
    magnitude_margin_db: float = 5.0
    speed_of_sound: float = SPEED_OF_SOUND
    scm_time_radius: int = 1
    scm_freq_radius: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", FeatureKind(self.kind))
        nyquist = self.stft.sample_rate / 2.0
        if self.spec_cutoff_hz > nyquist:
            raise ValueError(
                f"spec_cutoff_hz {self.spec_cutoff_hz} exceeds Nyquist {nyquist}"
            )
        high = self.effective_spatial_high_hz
        if self.kind.is_salsa_family:
            if not (self.spatial_low_hz < high <= self.spec_cutoff_hz):
                raise ValueError(
                    "need spatial_low_hz < spatial_high_hz <= spec_cutoff_hz, got "
                    f"{self.spatial_low_hz}, {high}, {self.spec_cutoff_hz}"
                )
        if self.mel_bands < 1:
            raise ValueError("mel_bands must be positive")

    @property
    def effective_spatial_high_hz(self) -> float:
        if self.spatial_high_hz is not None:
            return self.spatial_high_hz
        return 4000.0 if self.kind is FeatureKind.SALSA else 2000.0

    def spatial_band_mask(self, frequencies: np.ndarray) -> np.ndarray:
        """Boolean mask of bins carrying spatial information."""
        return (
            (frequencies >= self.spatial_low_hz)
            & (frequencies <= self.effective_spatial_high_hz)
            & (frequencies > 0)
        )


@dataclass(frozen=True)
class ChannelRole:
    """What one feature channel holds: a spectrogram, a GCC pair, or a
    spatial component referenced to microphone 0."""

    kind: str  # spec | gcc | epv | ipd | nipd
    mics: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("spec", "gcc", "epv", "ipd", "nipd"):
            raise ValueError(f"unknown channel role {self.kind!r}")
        object.__setattr__(self, "mics", tuple(int(m) for m in self.mics))

    @property
    def is_spectrogram(self) -> bool:
        return self.kind == "spec"

    @property
    def is_gcc(self) -> bool:
        return self.kind == "gcc"

    def to_json(self) -> dict:
        return {"kind": self.kind, "mics": list(self.mics)}

    @classmethod
    def from_json(cls, doc: dict) -> "ChannelRole":
        return cls(kind=doc["kind"], mics=tuple(doc["mics"]))


@dataclass(frozen=True)
class AxisMeta:
    """Descriptor of the last tensor axis for a group of channels."""

    kind: str  # frequency | mel | lag
    values: tuple[float, ...]
    unit: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "values": list(self.values), "unit": self.unit}

    @classmethod
    def from_json(cls, doc: dict) -> "AxisMeta":
        return cls(kind=doc["kind"], values=tuple(doc["values"]), unit=doc["unit"])


@dataclass
class FeatureTensor:
    """Stacked real-valued feature channels, shape (C, T, B), float32."""

    data: np.ndarray
    kind: FeatureKind
    channel_roles: list[ChannelRole]
    axis_meta: dict[str, AxisMeta]
    config: Optional[FeatureConfig] = None

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float32)
        if self.data.ndim != 3:
            raise ValueError("feature data must be (channels, frames, bins)")
        if len(self.channel_roles) != self.data.shape[0]:
            raise ValueError("one role per channel required")
        if not np.isfinite(self.data).all():
            raise ValueError("feature tensor contains non-finite values")

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]

    @property
    def n_bins(self) -> int:
        return self.data.shape[2]


def _mic_pairs(n_mics: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n_mics) for j in range(i + 1, n_mics)]


def compute_gcc_phat(spec: ComplexSpectrogram, k_lags: int) -> np.ndarray:
    """Per-frame GCC-PHAT lag spectra for every microphone pair.

    Output is (P, T, K) with P = M(M-1)/2 pairs ordered (0,1), (0,2), ...
    and K integer lags in (-K/2, K/2], increasing.  For pair (i, j) the
    peak sits at the lag by which channel i is delayed relative to
    channel j.  Bins where the cross-spectrum magnitude vanishes
    contribute zero instead of 0/0.
    """
    X = spec.data
    n_mics = X.shape[0]
    if n_mics < 2:
        raise ValueError("GCC-PHAT needs at least 2 channels")
    if k_lags % 2 != 0 or k_lags < 2 or k_lags > spec.config.n_fft:
        raise ValueError(f"k_lags must be even and within n_fft, got {k_lags}")

    pairs = _mic_pairs(n_mics)
    n_fft = spec.config.n_fft
    lags = np.arange(-(k_lags // 2) + 1, k_lags // 2 + 1)
    idx = lags % n_fft
    out = np.empty((len(pairs), spec.n_frames, k_lags))
    for p, (i, j) in enumerate(pairs):
        cross = X[i] * np.conj(X[j])
        cross = cross / np.maximum(np.abs(cross), GCC_EPS)
        cc = np.fft.irfft(cross, n=n_fft, axis=-1)
        out[p] = cc[:, idx]
    return out


def _cross_phase(ref: np.ndarray, others: np.ndarray) -> np.ndarray:
    """Principal-value phase of conj(ref) * others.

    Spelled out in real arithmetic so identical channels give an exactly
    zero imaginary part (complex multiplication may leave FMA residue).
    """
    re = ref.real * others.real + ref.imag * others.imag
    im = ref.real * others.imag - ref.imag * others.real
    return np.arctan2(im, re)


def _phase_to_spatial(
    spec: ComplexSpectrogram, cfg: FeatureConfig, normalize_by_freq: bool
) -> np.ndarray:
    X = spec.data
    if X.shape[0] < 2:
        raise ValueError("spatial features need at least 2 channels")
    freqs = spec.frequencies
    band = cfg.spatial_band_mask(freqs)
    out = np.zeros((X.shape[0] - 1, X.shape[1], X.shape[2]))
    if not band.any():
        return out
    Xb = X[:, :, band]  # phase is only needed in-band
    phase = _cross_phase(Xb[0][None, :, :], Xb[1:])
    if normalize_by_freq:
        scale = -cfg.speed_of_sound / (2.0 * np.pi * freqs[band])
    else:
        scale = np.full(int(band.sum()), -1.0 / (2.0 * np.pi))
    out[:, :, band] = phase * scale
    return out


def compute_nipd(spec: ComplexSpectrogram, cfg: FeatureConfig) -> np.ndarray:
    """Frequency-normalized inter-channel phase differences, in metres.

    Component m is -c/(2 pi f) * arg[X_0^* X_m]; on a bin dominated by one
    farfield source this estimates the RDOA d_1m independent of f.  Bins
    outside the spatial band are zero.  Shape (M-1, T, F).
    """
    return _phase_to_spatial(spec, cfg, normalize_by_freq=True)


def compute_ipd(spec: ComplexSpectrogram, cfg: FeatureConfig) -> np.ndarray:
    """Inter-channel phase differences normalized by -2 pi only (cycles)."""
    return _phase_to_spatial(spec, cfg, normalize_by_freq=False)


def compute_epv(scms: ScmField, cfg: FeatureConfig, threads: int = 1) -> np.ndarray:
    """Eigenvector-based phase vector from a covariance field, in metres.

    Like the NIPD but computed from the principal eigenvector of each
    R(t, f), which suppresses uncorrelated noise.  Bins failing the
    single-source selection tests are zeroed when enabled:

    * magnitude test: bin power (trace of R) must exceed a per-frequency
      noise floor, taken as the 5th percentile over the clip, by
      magnitude_margin_db;
    * coherence test: the dominant-eigenvalue share of the trace must
      reach coherence_threshold.

    Shape (M-1, T, F) over the full bin axis recorded in the field.
    """
    n_total = scms.n_bins_total if scms.n_bins_total is not None else scms.n_bins
    n_mics = scms.n_channels
    freqs_local = scms.frequencies
    band_local = cfg.spatial_band_mask(freqs_local)
    out = np.zeros((n_mics - 1, scms.n_frames, n_total))
    if not band_local.any():
        return out

    sub = scms.scms[:, band_local]  # (T, nb, M, M)
    values, vectors = principal_eigenvectors(sub, threads=threads)
    phase = _cross_phase(vectors[..., :1], vectors[..., 1:])  # (T, nb, M-1)
    scale = -cfg.speed_of_sound / (2.0 * np.pi * freqs_local[band_local])
    spatial = phase * scale[None, :, None]

    keep = np.ones(values.shape, dtype=bool)
    traces = np.trace(sub, axis1=-2, axis2=-1).real
    if cfg.use_magnitude_test:
        floor = np.percentile(traces, 5.0, axis=0)
        keep &= traces >= floor[None, :] * 10.0 ** (cfg.magnitude_margin_db / 10.0)
    if cfg.use_coherence_test:
        coh = np.divide(values, traces, out=np.zeros_like(values), where=traces > 0)
        keep &= coh >= cfg.coherence_threshold
    spatial = np.where(keep[..., None], spatial, 0.0)

    cols = scms.bin_offset + np.flatnonzero(band_local)
    out[:, :, cols] = np.transpose(spatial, (2, 0, 1))
    return out


def _spec_crop_bins(cfg: FeatureConfig) -> tuple[int, int]:
    """Inclusive FFT-bin range kept for the SALSA-family frequency axis.

    DC is dropped; the top bin is the last one at or below spec_cutoff_hz
    (192 bins for the 24 kHz / 512-point defaults with a 9 kHz cutoff).
    """
    hi = int(np.floor(cfg.spec_cutoff_hz / cfg.stft.freq_resolution))
    hi = min(hi, cfg.stft.n_bins - 1)
    return 1, hi


def build_feature(
    audio: MultichannelAudio,
    cfg: FeatureConfig,
    geom: ArrayGeometry,
    threads: int = 1,
) -> FeatureTensor:
    """Extract the configured feature tensor from a multichannel clip.

    SALSA-family output is (2M-1, T, B): M log-power spectrogram channels
    stacked with M-1 spatial channels on the same cropped linear-frequency
    axis, so bin b means the same physical frequency in every channel.
    melspecgcc output is (M + M(M-1)/2, T, K): log-mel spectrograms plus
    GCC-PHAT lag spectra with K = mel_bands lags.
    """
    if audio.n_channels != geom.n_mics:
        raise ValueError(
            f"audio has {audio.n_channels} channels but geometry has "
            f"{geom.n_mics} microphones"
        )
    if audio.n_channels < 2:
        raise ValueError("feature extraction needs at least 2 channels")

    spec = stft(audio, cfg.stft)
    n_mics = audio.n_channels
    spec_roles = [ChannelRole("spec", (m,)) for m in range(n_mics)]

    if cfg.kind is FeatureKind.MELSPECGCC:
        fb = make_mel_filterbank(
            k_bands=cfg.mel_bands,
            n_fft=cfg.stft.n_fft,
            sample_rate=cfg.stft.sample_rate,
            f_min=cfg.spatial_low_hz,
            f_max=cfg.spec_cutoff_hz,
        )
        melspec = apply_mel(np.abs(spec.data) ** 2, fb)
        gcc = compute_gcc_phat(spec, cfg.mel_bands)
        data = np.concatenate([melspec, gcc], axis=0)
        roles = spec_roles + [ChannelRole("gcc", pair) for pair in _mic_pairs(n_mics)]
        lags = np.arange(-(cfg.mel_bands // 2) + 1, cfg.mel_bands // 2 + 1)
        axis_meta = {
            "spectrogram": AxisMeta(
                "mel", tuple(float(f) for f in fb.band_centers_hz), "Hz"
            ),
            "spatial": AxisMeta("lag", tuple(float(l) for l in lags), "samples"),
        }
        return FeatureTensor(
            data=data, kind=cfg.kind, channel_roles=roles, axis_meta=axis_meta,
            config=cfg,
        )

    if cfg.kind is FeatureKind.SALSA_LITE:
        spatial = compute_nipd(spec, cfg)
        spatial_kind = "nipd"
    elif cfg.kind is FeatureKind.SALSA_IPD:
        spatial = compute_ipd(spec, cfg)
        spatial_kind = "ipd"
    else:
        band = np.flatnonzero(cfg.spatial_band_mask(spec.frequencies))
        scm_field = estimate_scm(
            spec,
            time_radius=cfg.scm_time_radius,
            freq_radius=cfg.scm_freq_radius,
            freq_range=(int(band[0]), int(band[-1])) if band.size else None,
        )
        spatial = compute_epv(scm_field, cfg, threads=threads)
        spatial_kind = "epv"

    lo, hi = _spec_crop_bins(cfg)
    logspec = power_to_db(np.abs(spec.data[:, :, lo : hi + 1]) ** 2)
    data = np.concatenate([logspec, spatial[:, :, lo : hi + 1]], axis=0)
    roles = spec_roles + [
        ChannelRole(spatial_kind, (m,)) for m in range(1, n_mics)
    ]
    freqs = tuple(float(f) for f in spec.frequencies[lo : hi + 1])
    axis_meta = {
        "spectrogram": AxisMeta("frequency", freqs, "Hz"),
        "spatial": AxisMeta("frequency", freqs, "Hz"),
    }
    return FeatureTensor(
        data=data, kind=cfg.kind, channel_roles=roles, axis_meta=axis_meta, config=cfg
    )


@dataclass
class FeatureScaler:
    """Per-channel standardization statistics.

    Spectrogram channels carry pooled clip statistics; spatial channels are
    intentionally left untouched (mean 0, std 1) since their physical units
    already put them on a bounded scale.
    """

    mean: np.ndarray
    std: np.ndarray
    clamped: np.ndarray
    channel_roles: list[ChannelRole]

    def transform(self, feat: FeatureTensor) -> FeatureTensor:
        if len(feat.channel_roles) != len(self.channel_roles):
            raise ValueError("scaler fitted on a different channel layout")
        data = (feat.data - self.mean[:, None, None]) / self.std[:, None, None]
        return replace(feat, data=data.astype(np.float32))


def fit_scaler(features: Iterable[FeatureTensor]) -> FeatureScaler:
    """Pooled per-channel mean/std over a stream of feature tensors.

    Constant-valued spectrogram channels get std clamped to 1 and are
    flagged (plus a warning) rather than producing a divide-by-zero.
    """
    count = 0
    total = None
    total_sq = None
    roles = None
    for feat in features:
        x = feat.data.astype(np.float64)
        if roles is None:
            roles = list(feat.channel_roles)
            total = np.zeros(x.shape[0])
            total_sq = np.zeros(x.shape[0])
        elif list(feat.channel_roles) != roles:
            raise ValueError("inconsistent channel layouts in scaler stream")
        count += x.shape[1] * x.shape[2]
        total += x.sum(axis=(1, 2))
        total_sq += (x**2).sum(axis=(1, 2))
    if roles is None or count == 0:
        raise ValueError("cannot fit a scaler on an empty stream")

    mean = total / count
    var = np.maximum(total_sq / count - mean**2, 0.0)
    std = np.sqrt(var)

    spec_mask = np.array([r.is_spectrogram for r in roles])
    mean[~spec_mask] = 0.0
    std[~spec_mask] = 1.0
    clamped = spec_mask & (std < 1e-12)
    if clamped.any():
        warnings.warn(
            f"{int(clamped.sum())} constant spectrogram channel(s); std clamped to 1",
            stacklevel=2,
        )
        std[clamped] = 1.0
    return FeatureScaler(mean=mean, std=std, clamped=clamped, channel_roles=roles)
