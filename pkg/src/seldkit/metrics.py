"""Segment-based SELD evaluation: joint detection/localization metrics.

Scores follow the DCASE 2021 convention: 100 ms label frames grouped into
1 s segments; within each segment and class, predicted DOAs are matched to
reference DOAs by minimal total great-circle distance (optimal
assignment).  A true positive needs a matched pair within 20 degrees.
Four numbers come out:

* er20  -- location-dependent detection error rate (S + D + I) / N;
* f20   -- location-dependent F1 (micro-averaged);
* le_cd -- class-dependent localization error, mean matched distance;
* lr_cd -- class-dependent localization recall, matched / total references;

plus their aggregate e_seld = 1/4 [ER + (1 - F) + LE/180 + (1 - LR)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "SeldEvent",
    "SeldEventGrid",
    "MetricsReport",
    "angular_distance",
    "evaluate",
    "seld_error",
    "FRAMES_PER_SECOND",
]

FRAMES_PER_SECOND = 10  # 100 ms label frames
SEGMENT_FRAMES = 10  # 1 s scoring segments
DISTANCE_THRESHOLD_DEG = 20.0
LE_SENTINEL_DEG = 180.0


@dataclass(frozen=True)
class SeldEvent:
    """One active event in one label frame."""

    class_id: int
    azimuth: float
    elevation: float
    track_id: int = 0

    def __post_init__(self):
        if not (-180.0 <= self.azimuth < 180.0):
            raise ValueError(f"azimuth {self.azimuth} outside [-180, 180)")
        if not (-90.0 <= self.elevation <= 90.0):
            raise ValueError(f"elevation {self.elevation} outside [-90, 90]")
        if self.class_id < 0:
            raise ValueError("class_id must be non-negative")


@dataclass
class SeldEventGrid:
    """Frame-resolution annotations: per 100 ms frame, the active events."""

    frames: list[list[SeldEvent]]
    n_classes: int = 12

    def __post_init__(self):
        for events in self.frames:
            for ev in events:
                if ev.class_id >= self.n_classes:
                    raise ValueError(
                        f"class_id {ev.class_id} outside vocabulary of "
                        f"{self.n_classes}"
                    )

    @classmethod
    def empty(cls, n_frames: int, n_classes: int = 12) -> "SeldEventGrid":
        return cls(frames=[[] for _ in range(n_frames)], n_classes=n_classes)

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def n_events(self) -> int:
        return sum(len(f) for f in self.frames)

    def padded(self, n_frames: int) -> "SeldEventGrid":
        if n_frames < self.n_frames:
            raise ValueError("cannot pad to fewer frames")
        frames = [list(f) for f in self.frames]
        frames += [[] for _ in range(n_frames - self.n_frames)]
        return SeldEventGrid(frames=frames, n_classes=self.n_classes)


def angular_distance(doa_a: tuple[float, float], doa_b: tuple[float, float]) -> float:
    """Great-circle angle in degrees between two (azimuth, elevation) DOAs.

    Haversine form: equivalent to arccos of the direction dot product but
    numerically exact for coincident points.
    """
    az_a, el_a = (math.radians(v) for v in doa_a)
    az_b, el_b = (math.radians(v) for v in doa_b)
    h = (
        math.sin((el_a - el_b) / 2.0) ** 2
        + math.cos(el_a) * math.cos(el_b) * math.sin((az_a - az_b) / 2.0) ** 2
    )
    return math.degrees(2.0 * math.asin(min(1.0, math.sqrt(h))))


@dataclass
class MetricsReport:
    er20: float
    f20: float
    le_cd: float
    lr_cd: float
    e_seld: float
    counts: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "er20": self.er20,
            "f20": self.f20,
            "le_cd": self.le_cd,
            "lr_cd": self.lr_cd,
            "e_seld": self.e_seld,
            "counts": dict(self.counts),
        }


def _segment_doas(grid: SeldEventGrid, start: int, stop: int) -> dict[int, list]:
    """Distinct DOAs per class across a segment's frames, insertion-ordered."""
    per_class: dict[int, dict] = {}
    for frame in grid.frames[start:stop]:
        for ev in frame:
            per_class.setdefault(ev.class_id, {})[(ev.azimuth, ev.elevation)] = None
    return {c: list(doas.keys()) for c, doas in per_class.items()}


def evaluate(
    pred: SeldEventGrid,
    ref: SeldEventGrid,
    segment_frames: int = SEGMENT_FRAMES,
    distance_threshold_deg: float = DISTANCE_THRESHOLD_DEG,
) -> MetricsReport:
    """Score a prediction grid against a reference grid.

    Both grids must cover the same frames with the same class vocabulary.
    """
    if pred.n_frames != ref.n_frames:
        raise ValueError(
            f"frame counts differ: {pred.n_frames} vs {ref.n_frames}"
        )
    if pred.n_classes != ref.n_classes:
        raise ValueError(
            f"class vocabularies differ: {pred.n_classes} vs {ref.n_classes}"
        )

    tp = fp = fn = 0
    subs = dels = ins = n_ref = 0
    le_sum = 0.0
    n_matched = 0

    for start in range(0, ref.n_frames, segment_frames):
        stop = min(start + segment_frames, ref.n_frames)
        pred_doas = _segment_doas(pred, start, stop)
        ref_doas = _segment_doas(ref, start, stop)
        fp_seg = fn_seg = 0
        for class_id in set(pred_doas) | set(ref_doas):
            p = pred_doas.get(class_id, [])
            r = ref_doas.get(class_id, [])
            tp_c = 0
            if p and r:
                cost = np.array([[angular_distance(a, b) for b in r] for a in p])
                rows, cols = linear_sum_assignment(cost)
                dists = cost[rows, cols]
                le_sum += float(dists.sum())
                n_matched += len(rows)
                tp_c = int((dists <= distance_threshold_deg).sum())
            tp += tp_c
            fp_seg += len(p) - tp_c
            fn_seg += len(r) - tp_c
            n_ref += len(r)
        fp += fp_seg
        fn += fn_seg
        subs += min(fp_seg, fn_seg)
        dels += max(0, fn_seg - fp_seg)
        ins += max(0, fp_seg - fn_seg)

    er20 = (subs + dels + ins) / n_ref if n_ref else 0.0
    f_denom = 2 * tp + fp + fn
    f20 = 2 * tp / f_denom if f_denom else 1.0
    le_cd = le_sum / n_matched if n_matched else LE_SENTINEL_DEG
    lr_cd = n_matched / n_ref if n_ref else 1.0
    return MetricsReport(
        er20=er20,
        f20=f20,
        le_cd=le_cd,
        lr_cd=lr_cd,
        e_seld=seld_error(er20, f20, le_cd, lr_cd),
        counts={
            "TP": tp, "FP": fp, "FN": fn,
            "S": subs, "D": dels, "I": ins, "N": n_ref,
        },
    )


def seld_error(er20: float, f20: float, le_cd: float, lr_cd: float) -> float:
    """Aggregate the four metrics into a single error in [0, ~1]."""
    if not (0.0 <= le_cd <= 180.0):
        raise ValueError(f"le_cd {le_cd} outside [0, 180] degrees")
    if not (0.0 <= f20 <= 1.0 and 0.0 <= lr_cd <= 1.0):
        raise ValueError("f20 and lr_cd must lie in [0, 1]")
    if er20 < 0.0:
        raise ValueError("er20 must be non-negative")
    return 0.25 * (er20 + (1.0 - f20) + le_cd / 180.0 + (1.0 - lr_cd))
