import numpy as np
import pytest

import seldkit as sk
from seldkit.augment import wrap_azimuth

from conftest import make_noise_audio, single_source_scene


def hand_enumerated_square_table():
    """Symmetries of a square horizontal array, derived by hand.

    Mics at (+-a, +-a, 0) admit every candidate that maps the square onto
    itself; with all four mics in the z = 0 plane, both elevation signs
    work for every azimuth map, so all 16 candidates match.
    """
    return 16


@pytest.fixture(scope="module")
def table(tetra=None):
    return sk.derive_swap_table(sk.tetrahedral_array())


class TestDeriveSwapTable:
    def test_tetrahedral_has_eight(self, table):
        assert len(table) == 8
        assert table[0].is_identity

    def test_transforms_unique(self, table):
        keys = {(t.channel_perm, t.azimuth_sign, t.azimuth_offset_deg, t.elevation_sign)
                for t in table}
        assert len(keys) == 8

    def test_single_mic_identity_only(self):
        geom = sk.ArrayGeometry(positions=np.zeros((1, 3)))
        table = sk.derive_swap_table(geom)
        assert len(table) >= 1 and table[0].is_identity
        assert all(t.channel_perm == (0,) for t in table)

    def test_square_planar_array(self):
        a = 0.05
        geom = sk.ArrayGeometry(positions=np.array(
            [[a, a, 0.0], [a, -a, 0.0], [-a, -a, 0.0], [-a, a, 0.0]]
        ))
        table = sk.derive_swap_table(geom)
        assert len(table) == hand_enumerated_square_table()

    def test_group_closure_and_inverse(self, table):
        keys = {(t.channel_perm, t.azimuth_sign, t.azimuth_offset_deg, t.elevation_sign)
                for t in table}

        def key(t):
            return (t.channel_perm, t.azimuth_sign, t.azimuth_offset_deg, t.elevation_sign)

        for t1 in table:
            assert key(t1.inverse()) in keys
            identity = t1.compose(t1.inverse())
            assert identity.is_identity
            for t2 in table:
                assert key(t1.compose(t2)) in keys

    def test_composition_consistent_with_doa_maps(self, table):
        t1, t2 = table[3], table[5]
        combined = t1.compose(t2)
        for az, el in [(17.0, 9.0), (-120.0, -40.0), (179.0, 44.0)]:
            step = t2.map_doa(*t1.map_doa(az, el))
            direct = combined.map_doa(az, el)
            assert step[0] == pytest.approx(direct[0])
            assert step[1] == pytest.approx(direct[1])


class TestApplySwapAudio:
    def test_identity_unchanged(self, table):
        audio = make_noise_audio(seed=1)
        out = sk.apply_swap_audio(audio, table[0])
        np.testing.assert_array_equal(out.samples, audio.samples)

    def test_swap_then_inverse_bit_exact(self, table):
        audio = make_noise_audio(seed=2)
        t = table[4]
        roundtrip = sk.apply_swap_audio(sk.apply_swap_audio(audio, t), t.inverse())
        np.testing.assert_array_equal(roundtrip.samples, audio.samples)

    def test_arity_mismatch(self, table):
        audio = make_noise_audio(seed=3, channels=3)
        with pytest.raises(ValueError, match="arity"):
            sk.apply_swap_audio(audio, table[1])

    @pytest.mark.parametrize("index", range(8))
    def test_swap_equals_simulation_at_mapped_doa(self, table, index):
        """The module's central correctness check: swapping channels of a
        simulated scene equals simulating at the transformed DOA."""
        t = table[index]
        az, el = 37.0, 21.0
        audio, _ = sk.synthesize(single_source_scene(az, el, seconds=0.4))
        maz, mel = t.map_doa(az, el)
        mapped_audio, _ = sk.synthesize(single_source_scene(maz, mel, seconds=0.4))
        swapped = sk.apply_swap_audio(audio, t)
        assert np.abs(swapped.samples - mapped_audio.samples).max() < 1e-6

    def test_features_of_swapped_audio_match_mapped_scene(self, table):
        """Label/audio commutation at the feature level: spatial channels
        of swapped audio read out the mapped scene's RDOAs."""
        t = table[5]
        az, el = 37.0, 21.0
        scene = single_source_scene(az, el, seconds=0.6)
        audio, _ = sk.synthesize(scene)
        cfg = sk.FeatureConfig(kind=sk.FeatureKind.SALSA_LITE)
        geom = sk.tetrahedral_array()
        feat_swapped = sk.build_feature(sk.apply_swap_audio(audio, t), cfg, geom)
        maz, mel = t.map_doa(az, el)
        mapped_audio, _ = sk.synthesize(single_source_scene(maz, mel, seconds=0.6))
        feat_mapped = sk.build_feature(mapped_audio, cfg, geom)
        freqs = np.array(feat_mapped.axis_meta["spatial"].values)
        band = (freqs >= 50.0) & (freqs <= 2000.0)
        frames = slice(8, 40)
        diff = np.abs(
            feat_swapped.data[4:][:, frames, :][:, :, band].astype(np.float64)
            - feat_mapped.data[4:][:, frames, :][:, :, band].astype(np.float64)
        )
        assert np.median(diff) <= 0.002


class TestApplySwapLabels:
    def grid(self):
        frames = [[sk.SeldEvent(class_id=2, azimuth=45.0, elevation=30.0)], []]
        return sk.SeldEventGrid(frames=frames)

    def test_identity(self, table):
        out = sk.apply_swap_labels(self.grid(), table[0])
        assert out.frames[0][0] == self.grid().frames[0][0]

    def test_rotation_with_wrap(self):
        t = sk.SwapTransform(channel_perm=(0, 1, 2, 3), azimuth_sign=1,
                             azimuth_offset_deg=180, elevation_sign=1)
        out = sk.apply_swap_labels(self.grid(), t)
        assert out.frames[0][0].azimuth == pytest.approx(-135.0)

    def test_elevation_flip(self):
        t = sk.SwapTransform(channel_perm=(0, 1, 2, 3), elevation_sign=-1)
        out = sk.apply_swap_labels(self.grid(), t)
        assert out.frames[0][0].elevation == pytest.approx(-30.0)
        assert out.frames[0][0].class_id == 2

    def test_wrap_azimuth(self):
        assert wrap_azimuth(225.0) == -135.0
        assert wrap_azimuth(-180.0) == -180.0
        assert wrap_azimuth(180.0) == -180.0

    def test_labels_match_simulated_mapped_grid(self, table):
        t = table[6]
        scene = single_source_scene(37.0, 21.0, seconds=0.4, class_id=5)
        _, grid = sk.synthesize(scene)
        maz, mel = t.map_doa(37.0, 21.0)
        mapped_scene = single_source_scene(maz, mel, seconds=0.4, class_id=5)
        _, mapped_grid = sk.synthesize(mapped_scene)
        remapped = sk.apply_swap_labels(grid, t)
        assert remapped.frames == mapped_grid.frames


def small_feature(tetra, kind=sk.FeatureKind.SALSA_LITE, seed=20):
    return sk.build_feature(make_noise_audio(seed=seed, seconds=0.4),
                            sk.FeatureConfig(kind=kind), tetra)


class TestApplyMask:
    def test_zero_span_identity(self, tetra):
        feat = small_feature(tetra)
        spec = sk.MaskSpec(mode="rect", time_span=0, freq_span=0, seed=1)
        out = sk.apply_mask(feat, spec)
        np.testing.assert_array_equal(out.data, feat.data)

    def test_rect_changes_exact_count(self, tetra):
        feat = small_feature(tetra)
        spec = sk.MaskSpec(mode="rect", time_span=10, freq_span=20, fill_value=7.5, seed=3)
        out = sk.apply_mask(feat, spec)
        changed = out.data != feat.data
        assert changed.sum() == 10 * 20 * feat.n_channels
        assert np.all(out.data[changed] == 7.5)

    def test_cross_mask_shape(self, tetra):
        feat = small_feature(tetra)
        spec = sk.MaskSpec(mode="cross", time_span=4, freq_span=6, fill_value=0.0, seed=5)
        out = sk.apply_mask(feat, spec)
        zero_cols = np.flatnonzero(np.all(out.data == 0, axis=(0, 1)))
        zero_rows = np.flatnonzero(np.all(out.data == 0, axis=(0, 2)))
        assert len(zero_cols) >= 6 and len(zero_rows) >= 4

    def test_deterministic_for_seed(self, tetra):
        feat = small_feature(tetra)
        spec = sk.MaskSpec(mode="rect", seed=42)
        a = sk.apply_mask(feat, spec)
        b = sk.apply_mask(feat, spec)
        np.testing.assert_array_equal(a.data, b.data)

    def test_shape_and_roles_preserved(self, tetra):
        feat = small_feature(tetra)
        out = sk.apply_mask(feat, sk.MaskSpec(seed=9))
        assert out.data.shape == feat.data.shape
        assert out.channel_roles == feat.channel_roles

    def test_spans_clipped(self, tetra):
        feat = small_feature(tetra)
        spec = sk.MaskSpec(mode="rect", time_span=10_000, freq_span=10_000, seed=2)
        out = sk.apply_mask(feat, spec)
        assert np.all(out.data == 0.0)


class TestFreqShift:
    def test_zero_shift_identity(self, tetra):
        feat = small_feature(tetra)
        out = sk.freq_shift(feat, 0)
        np.testing.assert_array_equal(out.data, feat.data)

    def test_gcc_channels_untouched(self, tetra):
        feat = small_feature(tetra, kind=sk.FeatureKind.MELSPECGCC)
        out = sk.freq_shift(feat, 3)
        np.testing.assert_array_equal(out.data[4:], feat.data[4:])
        assert not np.array_equal(out.data[:4], feat.data[:4])

    def test_shift_up_then_down(self, tetra):
        feat = small_feature(tetra)
        out = sk.freq_shift(sk.freq_shift(feat, 2), -2)
        # index-arithmetic oracle: everything matches except the top two
        # bands, replicated while shifted up
        np.testing.assert_array_equal(out.data[:, :, :-2], feat.data[:, :, :-2])
        top = feat.data[:, :, -3]
        np.testing.assert_array_equal(out.data[:, :, -2], top)
        np.testing.assert_array_equal(out.data[:, :, -1], top)

    def test_edge_replication(self, tetra):
        feat = small_feature(tetra)
        out = sk.freq_shift(feat, 4)
        for b in range(4):
            np.testing.assert_array_equal(out.data[:, :, b], feat.data[:, :, 0])
        np.testing.assert_array_equal(out.data[:, :, 4:], feat.data[:, :, :-4])

    def test_exceeding_max_rejected(self, tetra):
        feat = small_feature(tetra)
        with pytest.raises(ValueError, match="exceeds"):
            sk.freq_shift(feat, 11)

    def test_shape_and_roles_preserved(self, tetra):
        feat = small_feature(tetra)
        out = sk.freq_shift(feat, -7)
        assert out.data.shape == feat.data.shape
        assert out.channel_roles == feat.channel_roles
        assert out.axis_meta == feat.axis_meta
