import numpy as np
import pytest

import seldkit as sk


@pytest.fixture(scope="session")
def tetra():
    return sk.tetrahedral_array()


@pytest.fixture(scope="session")
def stft_cfg():
    return sk.StftConfig()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def make_noise_audio(seed=0, channels=4, seconds=1.0, sample_rate=24000, amp=0.1):
    rng = np.random.default_rng(seed)
    n = int(seconds * sample_rate)
    return sk.MultichannelAudio(
        samples=amp * rng.standard_normal((channels, n)), sample_rate=sample_rate
    )


def single_source_scene(az, el, *, seconds=1.2, seed=5, geom=None, snr_db=None,
                        signal="noise", class_id=0):
    geom = geom if geom is not None else sk.tetrahedral_array()
    return sk.SceneSpec(
        geometry=geom,
        duration=seconds,
        snr_db=snr_db,
        sources=[
            sk.SourceSpec(
                azimuth=az, elevation=el, onset=0.1 * seconds, offset=0.9 * seconds,
                seed=seed, signal=signal, class_id=class_id,
            )
        ],
    )


def interior_event_frames(scene, hop=300):
    """Frame range safely inside the (single) event of a scene."""
    fps = scene.sample_rate / hop
    src = scene.sources[0]
    return slice(int(src.onset * fps) + 3, int(src.offset * fps) - 3)


def steering_field(geom, az, el, cfg, n_frames=8, seed=0, unit_power=False):
    """Analytic single-source spectrogram X(m,t,f) = H_m(f) * S(t,f)."""
    freqs = np.arange(cfg.n_bins) * cfg.freq_resolution
    H = np.stack([sk.steering_vector(geom, f, az, el) for f in freqs], axis=-1)
    if unit_power:
        S = np.ones((n_frames, cfg.n_bins), dtype=complex)
    else:
        r = np.random.default_rng(seed)
        S = (r.standard_normal((n_frames, cfg.n_bins))
             + 1j * r.standard_normal((n_frames, cfg.n_bins))) / np.sqrt(2)
    return sk.ComplexSpectrogram(data=H[:, None, :] * S[None], config=cfg)
