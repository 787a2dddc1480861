"""Augmentation transforms: channel swapping, TF masking, frequency shift.

Channel swapping exploits array symmetry: an azimuth rotation/reflection
plus optional elevation flip that maps the microphone positions onto
themselves corresponds exactly to a channel permutation, so swapping
channels and remapping the labels yields another physically valid scene.
The table of valid swaps is derived from the geometry rather than
hard-coded.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dsp import MultichannelAudio
from .features import FeatureTensor
from .geometry import ArrayGeometry
from .metrics import SeldEventGrid

__all__ = [
    "SwapTransform",
    "MaskSpec",
    "derive_swap_table",
    "apply_swap_audio",
    "apply_swap_labels",
    "apply_mask",
    "freq_shift",
    "wrap_azimuth",
]


def wrap_azimuth(az_deg: float) -> float:
    """Wrap to [-180, 180)."""
    return float((az_deg + 180.0) % 360.0 - 180.0)


@dataclass(frozen=True)
class SwapTransform:
    """One channel swap: a permutation plus the DOA map it implements.

    channel_perm[m] is the source channel copied into output channel m.
    The DOA map is azimuth -> azimuth_sign * azimuth + azimuth_offset_deg
    (wrapped), elevation -> elevation_sign * elevation.
    """

    channel_perm: tuple[int, ...]
    azimuth_sign: int = 1
    azimuth_offset_deg: int = 0
    elevation_sign: int = 1

    def __post_init__(self):
        if sorted(self.channel_perm) != list(range(len(self.channel_perm))):
            raise ValueError("channel_perm must be a permutation")
        if self.azimuth_sign not in (1, -1) or self.elevation_sign not in (1, -1):
            raise ValueError("signs must be +-1")
        if self.azimuth_offset_deg % 90 != 0:
            raise ValueError("azimuth offset must be a multiple of 90 degrees")
        object.__setattr__(self, "azimuth_offset_deg", self.azimuth_offset_deg % 360)

    @property
    def is_identity(self) -> bool:
        return (
            self.channel_perm == tuple(range(len(self.channel_perm)))
            and self.azimuth_sign == 1
            and self.azimuth_offset_deg == 0
            and self.elevation_sign == 1
        )

    def map_doa(self, azimuth_deg: float, elevation_deg: float) -> tuple[float, float]:
        az = wrap_azimuth(self.azimuth_sign * azimuth_deg + self.azimuth_offset_deg)
        return az, self.elevation_sign * elevation_deg

    def compose(self, other: "SwapTransform") -> "SwapTransform":
        """Transform equivalent to applying self first, then other."""
        if len(other.channel_perm) != len(self.channel_perm):
            raise ValueError("cannot compose transforms of different arity")
        perm = tuple(self.channel_perm[other.channel_perm[m]]
                     for m in range(len(self.channel_perm)))
        return SwapTransform(
            channel_perm=perm,
            azimuth_sign=self.azimuth_sign * other.azimuth_sign,
            azimuth_offset_deg=(
                other.azimuth_sign * self.azimuth_offset_deg
                + other.azimuth_offset_deg
            ),
            elevation_sign=self.elevation_sign * other.elevation_sign,
        )

    def inverse(self) -> "SwapTransform":
        perm = tuple(int(i) for i in np.argsort(self.channel_perm))
        return SwapTransform(
            channel_perm=perm,
            azimuth_sign=self.azimuth_sign,
            azimuth_offset_deg=-self.azimuth_sign * self.azimuth_offset_deg,
            elevation_sign=self.elevation_sign,
        )


_ROT90 = {
    0: np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=np.float64),
    1: np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1]], dtype=np.float64),
    2: np.array([[-1, 0, 0], [0, -1, 0], [0, 0, 1]], dtype=np.float64),
    3: np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 1]], dtype=np.float64),
}


def _candidate_rotation(az_sign: int, quarter_turns: int, el_sign: int) -> np.ndarray:
    reflect = np.diag([1.0, float(az_sign), float(el_sign)])
    return _ROT90[quarter_turns] @ reflect


def derive_swap_table(geom: ArrayGeometry, tol: float = 1e-9) -> list[SwapTransform]:
    """Enumerate the channel swaps valid for this geometry.

    Tries all 16 candidate DOA maps (azimuth sign, quarter turn, elevation
    sign) and keeps those whose rotation/reflection maps the microphone
    position set onto itself within tol; identity always comes first.  The
    tetrahedral four-capsule array admits exactly 8.
    """
    pos = geom.positions
    n = geom.n_mics
    table: list[SwapTransform] = []
    candidates = [(1, 0, 1)] + [
        (s_az, k, s_el)
        for s_az in (1, -1)
        for k in range(4)
        for s_el in (1, -1)
        if (s_az, k, s_el) != (1, 0, 1)
    ]
    for s_az, k, s_el in candidates:
        rot = _candidate_rotation(s_az, k, s_el)
        moved = pos @ rot.T
        sigma = np.full(n, -1)
        used = np.zeros(n, dtype=bool)
        for m in range(n):
            dists = np.linalg.norm(pos - moved[m], axis=1)
            cand = int(np.argmin(np.where(used, np.inf, dists)))
            if used[cand] or dists[cand] > tol:
                sigma = None
                break
            sigma[m] = cand
            used[cand] = True
        if sigma is None:
            continue
        # rot sends mic m to the slot of mic sigma[m]; audio channel i of the
        # rotated scene therefore equals original channel sigma^-1(i)
        perm = tuple(int(i) for i in np.argsort(sigma))
        table.append(
            SwapTransform(
                channel_perm=perm,
                azimuth_sign=s_az,
                azimuth_offset_deg=90 * k,
                elevation_sign=s_el,
            )
        )
    return table


def apply_swap_audio(audio: MultichannelAudio, t: SwapTransform) -> MultichannelAudio:
    """Permute audio channels; sample values are untouched."""
    if len(t.channel_perm) != audio.n_channels:
        raise ValueError(
            f"transform arity {len(t.channel_perm)} does not match "
            f"{audio.n_channels} channels"
        )
    return MultichannelAudio(
        samples=audio.samples[list(t.channel_perm)].copy(),
        sample_rate=audio.sample_rate,
    )


def apply_swap_labels(grid: SeldEventGrid, t: SwapTransform) -> SeldEventGrid:
    """Remap every event's DOA through the transform; classes and timing stay."""
    frames = []
    for events in grid.frames:
        mapped = []
        for ev in events:
            az, el = t.map_doa(ev.azimuth, ev.elevation)
            mapped.append(replace(ev, azimuth=az, elevation=el))
        frames.append(mapped)
    return SeldEventGrid(frames=frames, n_classes=grid.n_classes)


@dataclass(frozen=True)
class MaskSpec:
    """A random TF mask: a rectangle, or a cross of full stripes.

    Spans left as None are drawn uniformly up to 10% of the respective
    axis; placement always comes from the seeded generator, so a given
    seed yields the same mask.
    """

    mode: str = "rect"  # rect | cross
    time_span: int | None = None
    freq_span: int | None = None
    fill_value: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("rect", "cross"):
            raise ValueError(f"unknown mask mode {self.mode!r}")


def apply_mask(feat: FeatureTensor, mask: MaskSpec) -> FeatureTensor:
    """Zero (fill) a masked region on every channel; deterministic per seed."""
    rng = np.random.default_rng(mask.seed)
    n_frames, n_bins = feat.n_frames, feat.n_bins

    def pick_span(requested, size):
        if requested is None:
            return int(rng.integers(1, max(2, int(0.1 * size) + 1)))
        return int(min(max(requested, 0), size))

    t_span = pick_span(mask.time_span, n_frames)
    f_span = pick_span(mask.freq_span, n_bins)
    t0 = int(rng.integers(0, n_frames - t_span + 1)) if t_span < n_frames else 0
    f0 = int(rng.integers(0, n_bins - f_span + 1)) if f_span < n_bins else 0

    data = feat.data.copy()
    if mask.mode == "rect":
        data[:, t0 : t0 + t_span, f0 : f0 + f_span] = mask.fill_value
    else:
        data[:, t0 : t0 + t_span, :] = mask.fill_value
        data[:, :, f0 : f0 + f_span] = mask.fill_value
    return replace(feat, data=data)


def freq_shift(feat: FeatureTensor, shift: int, max_shift: int = 10) -> FeatureTensor:
    """Shift spectral channels along the frequency axis by `shift` bands.

    Vacated bands replicate the edge value rather than injecting zeros
    into log-power channels.  GCC channels live on a lag axis and are
    left untouched; labels are unaffected by construction.
    """
    if abs(shift) > max_shift:
        raise ValueError(f"shift {shift} exceeds the +-{max_shift} band limit")
    data = feat.data.copy()
    if shift != 0:
        idx = np.clip(np.arange(feat.n_bins) - shift, 0, feat.n_bins - 1)
        movable = [c for c, role in enumerate(feat.channel_roles) if not role.is_gcc]
        data[movable] = data[movable][:, :, idx]
    return replace(feat, data=data)
