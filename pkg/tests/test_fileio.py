import json
import struct

import numpy as np
import pytest

import seldkit as sk
from seldkit.fileio import (
    AnnotationFormatError,
    FeatureFileError,
    WavFormatError,
    config_hash,
)

from conftest import make_noise_audio


def pcm_wav_bytes(samples_int, bits, sample_rate=24000, n_channels=1, fmt=1):
    """Assemble a PCM WAV by hand for reader tests."""
    if bits == 16:
        body = np.asarray(samples_int, dtype="<i2").tobytes()
    elif bits == 32:
        body = np.asarray(samples_int, dtype="<i4").tobytes()
    elif bits == 24:
        vals = np.asarray(samples_int, dtype=np.int64)
        raw = np.zeros((len(vals), 3), dtype=np.uint8)
        u = vals & 0xFFFFFF
        raw[:, 0] = u & 0xFF
        raw[:, 1] = (u >> 8) & 0xFF
        raw[:, 2] = (u >> 16) & 0xFF
        body = raw.tobytes()
    block_align = n_channels * bits // 8
    fmt_chunk = struct.pack("<HHIIHH", fmt, n_channels, sample_rate,
                            sample_rate * block_align, block_align, bits)
    payload = b"WAVE"
    payload += b"fmt " + struct.pack("<I", len(fmt_chunk)) + fmt_chunk
    payload += b"data" + struct.pack("<I", len(body)) + body
    return b"RIFF" + struct.pack("<I", len(payload)) + payload


class TestWav:
    def test_full_scale_16bit(self, tmp_path):
        path = tmp_path / "fs.wav"
        path.write_bytes(pcm_wav_bytes([0x7FFF, -0x8000, 0], 16))
        audio = sk.read_wav(path)
        np.testing.assert_allclose(audio.samples[0], [32767 / 32768, -1.0, 0.0])

    def test_24bit_scaling(self, tmp_path):
        path = tmp_path / "s24.wav"
        path.write_bytes(pcm_wav_bytes([0x7FFFFF, -0x800000, 4096], 24))
        audio = sk.read_wav(path)
        np.testing.assert_allclose(
            audio.samples[0], [0x7FFFFF / 0x800000, -1.0, 4096 / 0x800000]
        )

    def test_32bit_scaling(self, tmp_path):
        path = tmp_path / "s32.wav"
        path.write_bytes(pcm_wav_bytes([2**31 - 1, -(2**31), 0], 32))
        audio = sk.read_wav(path)
        np.testing.assert_allclose(audio.samples[0], [(2**31 - 1) / 2**31, -1.0, 0.0])

    def test_4ch_60s_shape(self, tmp_path):
        audio = sk.MultichannelAudio(np.zeros((4, 1_440_000), dtype=np.float32), 24000)
        path = tmp_path / "clip.wav"
        sk.write_wav(path, audio)
        back = sk.read_wav(path)
        assert back.samples.shape == (4, 1_440_000)
        assert back.sample_rate == 24000

    def test_float_roundtrip_bit_exact(self, tmp_path):
        audio = make_noise_audio(seed=1, channels=4, seconds=0.5)
        audio = sk.MultichannelAudio(
            audio.samples.astype(np.float32).astype(np.float64), 24000
        )
        path = tmp_path / "rt.wav"
        sk.write_wav(path, audio)
        back = sk.read_wav(path)
        np.testing.assert_array_equal(back.samples, audio.samples)
        assert back.samples.dtype == np.float64

    def test_channel_order_preserved(self, tmp_path):
        samples = np.stack([np.full(100, 0.25, dtype=np.float64) * m for m in range(1, 5)])
        path = tmp_path / "order.wav"
        sk.write_wav(path, sk.MultichannelAudio(samples, 24000))
        back = sk.read_wav(path)
        np.testing.assert_allclose(back.samples[:, 0], [0.25, 0.5, 0.75, 1.0])

    def test_not_riff_rejected(self, tmp_path):
        path = tmp_path / "junk.wav"
        path.write_bytes(b"OGGSjunkjunkjunk")
        with pytest.raises(WavFormatError, match="RIFF"):
            sk.read_wav(path)

    def test_missing_data_chunk_rejected(self, tmp_path):
        fmt_chunk = struct.pack("<HHIIHH", 1, 1, 24000, 48000, 2, 16)
        payload = b"WAVEfmt " + struct.pack("<I", len(fmt_chunk)) + fmt_chunk
        path = tmp_path / "nodata.wav"
        path.write_bytes(b"RIFF" + struct.pack("<I", len(payload)) + payload)
        with pytest.raises(WavFormatError, match="data"):
            sk.read_wav(path)

    def test_unsupported_codec_rejected(self, tmp_path):
        path = tmp_path / "alaw.wav"
        path.write_bytes(pcm_wav_bytes([0, 0], 16, fmt=6))
        with pytest.raises(WavFormatError, match="unsupported codec"):
            sk.read_wav(path)

    def test_truncated_chunk_rejected(self, tmp_path):
        good = pcm_wav_bytes(list(range(100)), 16)
        path = tmp_path / "trunc.wav"
        path.write_bytes(good[:-50])
        with pytest.raises(WavFormatError, match="truncated"):
            sk.read_wav(path)


class TestFeatureContainer:
    def feature(self, tetra, seconds=0.3, kind=sk.FeatureKind.SALSA_LITE):
        return sk.build_feature(make_noise_audio(seed=2, seconds=seconds),
                                sk.FeatureConfig(kind=kind), tetra)

    def test_roundtrip_bit_exact(self, tmp_path, tetra):
        feat = self.feature(tetra)
        path = tmp_path / "f.seldft"
        sk.write_feature(path, feat)
        back = sk.read_feature(path)
        np.testing.assert_array_equal(back.data, feat.data)
        assert back.kind == feat.kind
        assert back.channel_roles == feat.channel_roles
        assert back.axis_meta == feat.axis_meta
        assert back.config == feat.config

    def test_file_size_formula(self, tmp_path, tetra):
        feat = self.feature(tetra)
        path = tmp_path / "f.seldft"
        sk.write_feature(path, feat)
        c, t, b = feat.data.shape
        assert path.stat().st_size == 8 + 1 + 1 + 3 * 8 + c * t * b * 4

    def test_header_layout(self, tmp_path, tetra):
        feat = self.feature(tetra)
        path = tmp_path / "f.seldft"
        sk.write_feature(path, feat)
        raw = path.read_bytes()
        assert raw[:8] == b"SELDFT01"
        assert raw[8] == 0 and raw[9] == 3
        assert struct.unpack_from("<3Q", raw, 10) == feat.data.shape

    def test_corrupt_magic_rejected(self, tmp_path, tetra):
        feat = self.feature(tetra)
        path = tmp_path / "f.seldft"
        sk.write_feature(path, feat)
        raw = bytearray(path.read_bytes())
        raw[0] ^= 0xFF
        path.write_bytes(bytes(raw))
        with pytest.raises(FeatureFileError, match="magic"):
            sk.read_feature(path)

    def test_truncated_payload_rejected(self, tmp_path, tetra):
        feat = self.feature(tetra)
        path = tmp_path / "f.seldft"
        sk.write_feature(path, feat)
        raw = path.read_bytes()
        path.write_bytes(raw[:-17])
        with pytest.raises(FeatureFileError, match="payload"):
            sk.read_feature(path)

    def test_overflowing_dims_rejected(self, tmp_path):
        header = b"SELDFT01" + struct.pack("<BB", 0, 3)
        header += struct.pack("<3Q", 2**40, 2**40, 2**40)
        path = tmp_path / "huge.seldft"
        path.write_bytes(header)
        with pytest.raises(FeatureFileError, match="overflow|payload"):
            sk.read_feature(path)

    def test_missing_sidecar_rejected(self, tmp_path, tetra):
        feat = self.feature(tetra)
        path = tmp_path / "f.seldft"
        sk.write_feature(path, feat)
        (tmp_path / "f.seldft.json").unlink()
        with pytest.raises(FeatureFileError, match="sidecar"):
            sk.read_feature(path)

    def test_sidecar_contents(self, tmp_path, tetra):
        feat = self.feature(tetra, kind=sk.FeatureKind.MELSPECGCC)
        path = tmp_path / "f.seldft"
        sk.write_feature(path, feat)
        doc = json.loads((tmp_path / "f.seldft.json").read_text())
        assert doc["kind"] == "melspecgcc"
        assert doc["config_hash"] == config_hash(feat.config)
        assert len(doc["channel_roles"]) == 10
        assert doc["axis_meta"]["spatial"]["kind"] == "lag"


class TestAnnotations:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        grid = sk.read_annotations(path)
        assert grid.n_frames == 0 and grid.n_events == 0

    def test_single_row(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("10,3,0,45,-20\n")
        grid = sk.read_annotations(path)
        assert grid.n_frames == 11
        ev = grid.frames[10][0]
        assert (ev.class_id, ev.track_id, ev.azimuth, ev.elevation) == (3, 0, 45.0, -20.0)

    def test_roundtrip_preserves_rows(self, tmp_path, tetra):
        rng = np.random.default_rng(4)
        grid = sk.SeldEventGrid.empty(120)
        frame = 0
        for _ in range(100):
            frame = min(119, frame + int(rng.integers(0, 3)))
            grid.frames[frame].append(sk.SeldEvent(
                class_id=int(rng.integers(0, 12)),
                azimuth=float(rng.integers(-180, 180)),
                elevation=float(rng.integers(-45, 46)),
                track_id=int(rng.integers(0, 3)),
            ))
        path = tmp_path / "rt.csv"
        sk.write_annotations(path, grid)
        back = sk.read_annotations(path, n_frames=120)
        assert back.n_events == grid.n_events
        assert back.frames == grid.frames

    def test_malformed_row_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("10,3,0,45\n")
        with pytest.raises(AnnotationFormatError, match="5 fields"):
            sk.read_annotations(path)

    def test_out_of_range_angle_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1,0,200,0\n")
        with pytest.raises(AnnotationFormatError, match="azimuth"):
            sk.read_annotations(path)

    def test_decreasing_frames_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("5,1,0,0,0\n3,1,0,0,0\n")
        with pytest.raises(AnnotationFormatError, match="non-decreasing"):
            sk.read_annotations(path)
