"""Bit-exact file interfaces: WAV audio, feature tensors, annotation CSVs.

The feature container is deliberately tiny and fully specified so any
consumer can implement it from this docstring:

    bytes 0-7   magic "SELDFT01"
    byte  8     dtype code (0 = 32-bit float, little-endian)
    byte  9     ndim
    next  8*ndim  dims as little-endian u64
    rest        row-major payload, product(dims) * 4 bytes

A JSON sidecar at <path>.json carries the feature kind, a config hash,
channel roles and axis metadata.  All readers reject malformed input with
a structured error instead of returning partial data.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import struct
import tempfile
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import numpy as np

from .dsp import MultichannelAudio, StftConfig
from .features import AxisMeta, ChannelRole, FeatureConfig, FeatureKind, FeatureTensor
from .metrics import SeldEvent, SeldEventGrid

__all__ = [
    "WavFormatError",
    "FeatureFileError",
    "AnnotationFormatError",
    "read_wav",
    "write_wav",
    "read_feature",
    "write_feature",
    "read_annotations",
    "write_annotations",
    "config_hash",
]

FEATURE_MAGIC = b"SELDFT01"
DTYPE_FLOAT32 = 0

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE


class WavFormatError(ValueError):
    pass


class FeatureFileError(ValueError):
    pass


class AnnotationFormatError(ValueError):
    pass


def _atomic_write(path, payload: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# WAV


def _parse_chunks(data: bytes, path) -> dict[bytes, bytes]:
    chunks = {}
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise WavFormatError(f"{path}: truncated {cid!r} chunk")
        if cid not in chunks:
            chunks[cid] = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    return chunks


def read_wav(path) -> MultichannelAudio:
    """Read a PCM 16/24/32-bit or 32-bit float WAV as channel-major floats.

    Integer PCM is scaled by the type's full-scale negative magnitude, so
    values land in [-1, 1); channels keep their file order.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")
    chunks = _parse_chunks(data, path)
    if b"fmt " not in chunks or b"data" not in chunks:
        raise WavFormatError(f"{path}: missing fmt or data chunk")

    fmt = chunks[b"fmt "]
    if len(fmt) < 16:
        raise WavFormatError(f"{path}: fmt chunk too short")
    audio_format, n_channels, sample_rate, _, block_align, bits = struct.unpack_from(
        "<HHIIHH", fmt, 0
    )
    if audio_format == WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 40:
            raise WavFormatError(f"{path}: extensible fmt chunk too short")
        (audio_format,) = struct.unpack_from("<H", fmt, 24)  # GUID prefix
    if n_channels < 1:
        raise WavFormatError(f"{path}: channel count {n_channels} < 1")

    body = chunks[b"data"]
    if block_align:
        body = body[: len(body) - len(body) % block_align]

    if audio_format == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        samples = np.frombuffer(body, dtype="<f4").astype(np.float64)
    elif audio_format == WAVE_FORMAT_PCM and bits == 16:
        samples = np.frombuffer(body, dtype="<i2").astype(np.float64) / 2**15
    elif audio_format == WAVE_FORMAT_PCM and bits == 32:
        samples = np.frombuffer(body, dtype="<i4").astype(np.float64) / 2**31
    elif audio_format == WAVE_FORMAT_PCM and bits == 24:
        raw = np.frombuffer(body, dtype=np.uint8).reshape(-1, 3).astype(np.int64)
        vals = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        vals = (vals ^ 0x800000) - 0x800000
        samples = vals.astype(np.float64) / 2**23
    else:
        raise WavFormatError(
            f"{path}: unsupported codec (format {audio_format}, {bits}-bit)"
        )

    n_frames = samples.shape[0] // n_channels
    samples = samples[: n_frames * n_channels].reshape(n_frames, n_channels).T
    return MultichannelAudio(samples=samples.copy(), sample_rate=sample_rate)


def write_wav(path, audio: MultichannelAudio) -> None:
    """Write a 32-bit float WAV; read_wav round-trips it bit-exactly."""
    frames = np.ascontiguousarray(audio.samples.T, dtype="<f4")
    n_channels = audio.n_channels
    byte_rate = audio.sample_rate * n_channels * 4
    block_align = n_channels * 4
    body = frames.tobytes()
    fmt = struct.pack(
        "<HHIIHH",
        WAVE_FORMAT_IEEE_FLOAT,
        n_channels,
        audio.sample_rate,
        byte_rate,
        block_align,
        32,
    )
    payload = b"WAVE"
    payload += b"fmt " + struct.pack("<I", len(fmt)) + fmt
    payload += b"fact" + struct.pack("<II", 4, frames.shape[0])
    payload += b"data" + struct.pack("<I", len(body)) + body
    _atomic_write(path, b"RIFF" + struct.pack("<I", len(payload)) + payload)


# ---------------------------------------------------------------------------
# feature tensors


def config_hash(cfg: FeatureConfig) -> str:
    doc = asdict(cfg)
    doc["kind"] = cfg.kind.value
    blob = json.dumps(doc, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def write_feature(path, feat: FeatureTensor) -> None:
    """Write the binary container plus the JSON sidecar, atomically."""
    data = np.ascontiguousarray(feat.data, dtype="<f4")
    header = FEATURE_MAGIC + struct.pack("<BB", DTYPE_FLOAT32, data.ndim)
    header += struct.pack(f"<{data.ndim}Q", *data.shape)
    _atomic_write(path, header + data.tobytes())

    sidecar = {
        "kind": feat.kind.value,
        "dims": list(data.shape),
        "channel_roles": [r.to_json() for r in feat.channel_roles],
        "axis_meta": {k: v.to_json() for k, v in feat.axis_meta.items()},
    }
    if feat.config is not None:
        doc = asdict(feat.config)
        doc["kind"] = feat.config.kind.value
        sidecar["config"] = doc
        sidecar["config_hash"] = config_hash(feat.config)
    _atomic_write(
        _sidecar_path(path), json.dumps(sidecar, indent=2).encode() + b"\n"
    )


def _config_from_json(doc: dict) -> FeatureConfig:
    stft_doc = doc.pop("stft")
    return FeatureConfig(stft=StftConfig(**stft_doc), **doc)


def read_feature(path) -> FeatureTensor:
    """Read a feature container and its sidecar back into a FeatureTensor."""
    data = Path(path).read_bytes()
    if len(data) < 10 or data[:8] != FEATURE_MAGIC:
        raise FeatureFileError(f"{path}: bad magic, not a feature file")
    dtype_code, ndim = struct.unpack_from("<BB", data, 8)
    if dtype_code != DTYPE_FLOAT32:
        raise FeatureFileError(f"{path}: unknown dtype code {dtype_code}")
    header_end = 10 + 8 * ndim
    if ndim < 1 or ndim > 8 or len(data) < header_end:
        raise FeatureFileError(f"{path}: implausible ndim {ndim}")
    dims = struct.unpack_from(f"<{ndim}Q", data, 10)
    n_values = math.prod(dims)
    if n_values > 2**40 or any(d > 2**32 for d in dims):
        raise FeatureFileError(f"{path}: dims {dims} overflow sanity bounds")
    if len(data) - header_end != n_values * 4:
        raise FeatureFileError(
            f"{path}: payload holds {len(data) - header_end} bytes, "
            f"dims {dims} need {n_values * 4}"
        )
    payload = np.frombuffer(data, dtype="<f4", offset=header_end).reshape(dims)

    sidecar_file = _sidecar_path(path)
    if not sidecar_file.exists():
        raise FeatureFileError(f"{path}: missing sidecar {sidecar_file}")
    try:
        sidecar = json.loads(sidecar_file.read_text(encoding="utf-8"))
        kind = FeatureKind(sidecar["kind"])
        roles = [ChannelRole.from_json(r) for r in sidecar["channel_roles"]]
        axis_meta = {
            k: AxisMeta.from_json(v) for k, v in sidecar["axis_meta"].items()
        }
        cfg = _config_from_json(sidecar["config"]) if "config" in sidecar else None
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise FeatureFileError(f"{sidecar_file}: invalid sidecar: {exc}") from exc
    return FeatureTensor(
        data=payload.copy(), kind=kind, channel_roles=roles, axis_meta=axis_meta,
        config=cfg,
    )


# ---------------------------------------------------------------------------
# annotation CSVs


def _format_angle(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def write_annotations(path, grid: SeldEventGrid) -> None:
    """One CSV row per active event-frame: frame,class,track,azimuth,elevation."""
    lines = []
    for frame_index, events in enumerate(grid.frames):
        for ev in events:
            lines.append(
                f"{frame_index},{ev.class_id},{ev.track_id},"
                f"{_format_angle(ev.azimuth)},{_format_angle(ev.elevation)}"
            )
    _atomic_write(path, ("\n".join(lines) + ("\n" if lines else "")).encode())


def read_annotations(
    path, n_frames: Optional[int] = None, n_classes: int = 12
) -> SeldEventGrid:
    """Parse an annotation CSV into an event grid.

    The grid length defaults to the last frame index + 1; pass n_frames to
    pad (or validate) against a known clip length.
    """
    frames: list[list[SeldEvent]] = []
    last_index = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise AnnotationFormatError(
                    f"{path}:{lineno}: expected 5 fields, got {len(parts)}"
                )
            try:
                frame_index = int(parts[0])
                class_id = int(parts[1])
                track_id = int(parts[2])
                azimuth = float(parts[3])
                elevation = float(parts[4])
            except ValueError as exc:
                raise AnnotationFormatError(f"{path}:{lineno}: {exc}") from exc
            if frame_index < last_index:
                raise AnnotationFormatError(
                    f"{path}:{lineno}: frame indices must be non-decreasing"
                )
            last_index = frame_index
            while len(frames) <= frame_index:
                frames.append([])
            try:
                frames[frame_index].append(
                    SeldEvent(
                        class_id=class_id,
                        azimuth=azimuth,
                        elevation=elevation,
                        track_id=track_id,
                    )
                )
            except ValueError as exc:
                raise AnnotationFormatError(f"{path}:{lineno}: {exc}") from exc
    if n_frames is not None:
        while len(frames) < n_frames:
            frames.append([])
        if len(frames) > n_frames:
            raise AnnotationFormatError(
                f"{path}: events beyond frame {n_frames - 1}"
            )
    return SeldEventGrid(frames=frames, n_classes=n_classes)
