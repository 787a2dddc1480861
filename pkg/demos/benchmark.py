"""Time the four extractors on the same clip.

The point of the phase-based features is speed: no per-bin eigenvalue
problems (salsa) and no per-pair inverse transforms (melspecgcc).  Pass a
duration in seconds as the first argument; defaults to the 60 s clip
length the extractors are normally fed.
"""

import sys
import time

import numpy as np

import seldkit as sk

seconds = float(sys.argv[1]) if len(sys.argv) > 1 else 60.0
rng = np.random.default_rng(2024)
audio = sk.MultichannelAudio(
    0.1 * rng.standard_normal((4, int(seconds * 24000))), 24000
)
geom = sk.tetrahedral_array()
print(f"clip: 4 channels x {seconds:.0f} s at 24 kHz\n")

means = {}
for kind in (sk.FeatureKind.SALSA_LITE, sk.FeatureKind.SALSA_IPD,
             sk.FeatureKind.MELSPECGCC, sk.FeatureKind.SALSA):
    cfg = sk.FeatureConfig(kind=kind)
    sk.build_feature(audio, cfg, geom)  # warm-up
    times = []
    for _ in range(3):
        t0 = time.perf_counter()
        sk.build_feature(audio, cfg, geom)
        times.append(time.perf_counter() - t0)
    means[kind] = float(np.mean(times))
    print(f"{kind.value:12s} {means[kind]:6.3f} s  "
          f"(+- {float(np.std(times)):.3f})")

base = means[sk.FeatureKind.SALSA_LITE]
print("\nrelative to salsa-lite:")
for kind, mean in means.items():
    print(f"{kind.value:12s} {mean / base:5.1f}x")
