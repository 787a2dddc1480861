"""Microphone array geometry and the farfield direction/steering model.

Conventions, used consistently by the simulator and the spatial features:
azimuth is measured from +x toward +y in [-180, 180) degrees, elevation from
the horizontal plane in [-90, 90] degrees, and the relative distance of
arrival (RDOA) of microphone m against the reference microphone is
d_1m = (r_1 - r_m) . u(az, el) in metres.  The steering phase of channel m
is exp(-j 2 pi f d_1m / c).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SPEED_OF_SOUND",
    "ArrayGeometry",
    "unit_direction",
    "rdoa",
    "steering_vector",
    "tetrahedral_array",
    "load_geometry",
    "save_geometry",
]

SPEED_OF_SOUND = 343.0  # m/s


@dataclass
class ArrayGeometry:
    """Cartesian microphone positions in metres; channel 0 is the reference."""

    positions: np.ndarray  # (M, 3)
    reference_index: int = 0
    speed_of_sound: float = SPEED_OF_SOUND
    d_max: float = field(init=False)
    aliasing_hz: float = field(init=False)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ValueError("positions must be an (M, 3) array of metres")
        if self.positions.shape[0] < 1:
            raise ValueError("need at least one microphone")
        if self.reference_index != 0:
            raise ValueError("reference microphone is fixed to channel 0")
        diffs = self.positions[:, None, :] - self.positions[None, :, :]
        self.d_max = float(np.linalg.norm(diffs, axis=-1).max())
        # degenerate (single mic / co-located) geometries get an infinite
        # aliasing frequency rather than an error so they stay usable as
        # trivial oracle cases
        self.aliasing_hz = (
            self.speed_of_sound / (2.0 * self.d_max) if self.d_max > 0 else math.inf
        )

    @property
    def n_mics(self) -> int:
        return self.positions.shape[0]


def unit_direction(azimuth_deg: float, elevation_deg: float) -> np.ndarray:
    """Unit vector pointing toward (azimuth, elevation)."""
    az = math.radians(azimuth_deg)
    el = math.radians(elevation_deg)
    return np.array(
        [math.cos(el) * math.cos(az), math.cos(el) * math.sin(az), math.sin(el)]
    )


def rdoa(geom: ArrayGeometry, azimuth_deg: float, elevation_deg: float) -> np.ndarray:
    """Relative distances of arrival d_1m for m = 2..M, in metres.

    Positive d_1m means the wavefront reaches microphone m after the
    reference microphone.
    """
    u = unit_direction(azimuth_deg, elevation_deg)
    ref = geom.positions[0]
    return (ref - geom.positions[1:]) @ u


def steering_vector(
    geom: ArrayGeometry, f_hz: float, azimuth_deg: float, elevation_deg: float
) -> np.ndarray:
    """Farfield array response at frequency f; unit modulus, H_1 = 1."""
    if f_hz < 0:
        raise ValueError("frequency must be non-negative")
    d = np.concatenate(([0.0], rdoa(geom, azimuth_deg, elevation_deg)))
    return np.exp(-2j * np.pi * f_hz * d / geom.speed_of_sound)


def tetrahedral_array(radius: float = 0.042) -> ArrayGeometry:
    """Four-capsule tetrahedral array on a rigid sphere.

    The capsules sit at (azimuth, elevation) = (45, 35), (-45, -35),
    (135, -35), (-135, 35) degrees, the arrangement used by the TAU-NIGENS
    Spatial Sound Events recordings.
    """
    angles = [(45.0, 35.0), (-45.0, -35.0), (135.0, -35.0), (-135.0, 35.0)]
    positions = np.stack([radius * unit_direction(az, el) for az, el in angles])
    return ArrayGeometry(positions=positions)


def load_geometry(path) -> ArrayGeometry:
    """Read an ArrayGeometry from a JSON file with a "positions" key."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "positions" not in doc:
        raise ValueError(f"{path}: geometry file needs a 'positions' key")
    kwargs = {}
    if "speed_of_sound" in doc:
        kwargs["speed_of_sound"] = float(doc["speed_of_sound"])
    return ArrayGeometry(positions=np.asarray(doc["positions"], dtype=np.float64), **kwargs)


def save_geometry(path, geom: ArrayGeometry) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "positions": geom.positions.tolist(),
                "speed_of_sound": geom.speed_of_sound,
            },
            fh,
            indent=2,
        )
        fh.write("\n")
