"""The three augmentations: channel swap, TF masking, frequency shift.

Channel swapping is the interesting one: the tetrahedral array maps onto
itself under 8 azimuth rotations/reflections (with tied elevation flips),
so permuting channels is physically identical to moving the source, and
the labels move with it.  The other two perturb the features only.
"""

import numpy as np

import seldkit as sk

geom = sk.tetrahedral_array()
table = sk.derive_swap_table(geom)
print(f"derived {len(table)} channel-swap transforms:")
for i, t in enumerate(table):
    print(f"  [{i}] channels {t.channel_perm}   "
          f"azimuth -> {'+' if t.azimuth_sign > 0 else '-'}az + {t.azimuth_offset_deg:3d} deg   "
          f"elevation -> {'+' if t.elevation_sign > 0 else '-'}el")

# swapping audio channels == simulating at the mapped DOA
az, el = 37.0, 21.0
scene = sk.SceneSpec(geometry=geom, duration=0.5, sources=[
    sk.SourceSpec(azimuth=az, elevation=el, onset=0.05, offset=0.45, seed=5)
])
audio, labels = sk.synthesize(scene)
t = table[3]
maz, mel = t.map_doa(az, el)
mapped_scene = sk.SceneSpec(geometry=geom, duration=0.5, sources=[
    sk.SourceSpec(azimuth=maz, elevation=mel, onset=0.05, offset=0.45, seed=5)
])
mapped_audio, _ = sk.synthesize(mapped_scene)
gap = np.abs(sk.apply_swap_audio(audio, t).samples - mapped_audio.samples).max()
print(f"\nswap [3] maps ({az}, {el}) -> ({maz:.0f}, {mel:.0f}); "
      f"max sample difference vs re-simulation: {gap:.2e}")

swapped_labels = sk.apply_swap_labels(labels, t)
ev = swapped_labels.frames[1][0]
print(f"labels remapped in step: frame 1 now ({ev.azimuth:.0f}, {ev.elevation:.0f})")

# masking and shifting act on the feature tensor
feat = sk.build_feature(audio, sk.FeatureConfig(kind=sk.FeatureKind.MELSPECGCC), geom)

masked = sk.apply_mask(feat, sk.MaskSpec(mode="rect", time_span=8, freq_span=16, seed=42))
print(f"\nrect mask: {int((masked.data != feat.data).sum())} entries zeroed "
      f"(= 8 x 16 x {feat.n_channels} channels)")

crossed = sk.apply_mask(feat, sk.MaskSpec(mode="cross", time_span=4, freq_span=6, seed=42))
print(f"cross mask: full-height time stripe + full-width frequency stripe, "
      f"{int((crossed.data != feat.data).sum())} entries")

shifted = sk.freq_shift(feat, +3)
mel_moved = not np.array_equal(shifted.data[:4], feat.data[:4])
gcc_kept = np.array_equal(shifted.data[4:], feat.data[4:])
print(f"frequency shift +3: mel channels moved = {mel_moved}, "
      f"GCC channels bit-identical = {gcc_kept} (lag axis is not a frequency axis)")
