"""Command-line frontend: extract, bench, simulate, augment, evaluate.

Exit codes: 0 success, 1 runtime failure, 2 usage error.  The SELD_THREADS
environment variable overrides --threads.  bench and evaluate print
machine-parseable JSON on stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from .augment import MaskSpec, apply_mask, apply_swap_audio, apply_swap_labels, derive_swap_table, freq_shift
from .dsp import MultichannelAudio, StftConfig
from .features import FeatureConfig, FeatureKind, build_feature
from .fileio import (
    read_annotations,
    read_feature,
    read_wav,
    write_annotations,
    write_feature,
    write_wav,
)
from .geometry import load_geometry, tetrahedral_array
from .metrics import evaluate as evaluate_grids
from .simulate import load_scene, synthesize

FEATURE_CHOICES = [k.value for k in FeatureKind]


def _thread_count(args) -> int:
    env = os.environ.get("SELD_THREADS")
    if env is not None:
        return max(1, int(env))
    if getattr(args, "threads", None):
        return max(1, args.threads)
    return os.cpu_count() or 1


def _geometry(args):
    if getattr(args, "geometry", None):
        return load_geometry(args.geometry)
    return tetrahedral_array()


def _feature_config(args) -> FeatureConfig:
    """flags > config file > defaults."""
    doc = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            doc.update(json.load(fh))
    for key in ("spec_cutoff_hz", "spatial_low_hz", "spatial_high_hz", "mel_bands"):
        value = getattr(args, key, None)
        if value is not None:
            doc[key] = value
    stft_doc = doc.pop("stft", {})
    return FeatureConfig(kind=FeatureKind(args.feature), stft=StftConfig(**stft_doc), **doc)


def cmd_extract(args) -> int:
    cfg = _feature_config(args)
    geom = _geometry(args)
    threads = _thread_count(args)
    in_path = Path(args.input)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = sorted(in_path.glob("*.wav")) if in_path.is_dir() else [in_path]
    if not files:
        print(f"no .wav files under {in_path}", file=sys.stderr)
        return 1

    failures = 0
    for wav in files:
        try:
            audio = read_wav(wav)
            feat = build_feature(audio, cfg, geom, threads=threads)
            out = out_dir / (wav.stem + ".seldft")
            write_feature(out, feat)
            print(f"{wav} -> {out} {tuple(feat.data.shape)}", file=sys.stderr)
        except Exception as exc:  # keep batch going unless asked not to
            failures += 1
            print(f"error: {wav}: {exc}", file=sys.stderr)
            if args.fail_fast:
                return 1
    return 1 if failures else 0


def _bench_clip(args) -> MultichannelAudio:
    if args.input:
        return read_wav(args.input)
    rng = np.random.default_rng(2024)
    samples = 0.1 * rng.standard_normal((4, 60 * 24000))
    return MultichannelAudio(samples=samples, sample_rate=24000)


def _repeats(value: str) -> int:
    count = int(value)
    if count < 3:
        raise argparse.ArgumentTypeError("--repeats must be at least 3")
    return count


def cmd_bench(args) -> int:
    audio = _bench_clip(args)
    geom = _geometry(args)
    threads = _thread_count(args)

    results = {}
    for kind in (FeatureKind.SALSA_LITE, FeatureKind.SALSA_IPD,
                 FeatureKind.MELSPECGCC, FeatureKind.SALSA):
        cfg = FeatureConfig(kind=kind)
        build_feature(audio, cfg, geom, threads=threads)  # warm-up
        times = []
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            build_feature(audio, cfg, geom, threads=threads)
            times.append(time.perf_counter() - t0)
        results[kind.value] = {
            "times_s": times,
            "mean_s": statistics.fmean(times),
            "std_s": statistics.pstdev(times),
        }
    base = results[FeatureKind.SALSA_LITE.value]["mean_s"]
    for entry in results.values():
        entry["ratio_vs_salsa_lite"] = entry["mean_s"] / base

    report = {
        "clip": {
            "channels": audio.n_channels,
            "samples": audio.n_samples,
            "sample_rate": audio.sample_rate,
            "duration_s": audio.duration,
            "source": args.input or "synthetic",
        },
        "repeats": args.repeats,
        "threads": threads,
        "results": results,
    }
    print(json.dumps(report, indent=2))
    return 0


def cmd_simulate(args) -> int:
    scene = load_scene(args.scene)
    audio, grid = synthesize(scene)
    write_wav(args.out_wav, audio)
    write_annotations(args.out_csv, grid)
    print(f"wrote {args.out_wav} and {args.out_csv}", file=sys.stderr)
    return 0


def cmd_augment(args) -> int:
    if args.op == "swap":
        audio = read_wav(args.input)
        table = derive_swap_table(_geometry(args))
        if not 0 <= args.swap_index < len(table):
            print(
                f"error: --swap-index {args.swap_index} outside table of "
                f"{len(table)}", file=sys.stderr,
            )
            return 1
        t = table[args.swap_index]
        write_wav(args.out, apply_swap_audio(audio, t))
        if args.labels:
            grid = read_annotations(args.labels)
            write_annotations(args.labels_out or args.labels, apply_swap_labels(grid, t))
        return 0

    feat = read_feature(args.input)
    if args.op == "mask":
        spec = MaskSpec(
            mode=args.mode,
            time_span=args.time_span,
            freq_span=args.freq_span,
            seed=args.seed,
        )
        out = apply_mask(feat, spec)
    else:  # shift
        out = freq_shift(feat, args.amount)
    write_feature(args.out, out)
    return 0


def cmd_evaluate(args) -> int:
    pred = read_annotations(args.pred)
    ref = read_annotations(args.ref)
    n_frames = max(pred.n_frames, ref.n_frames)
    report = evaluate_grids(pred.padded(n_frames), ref.padded(n_frames))
    print(json.dumps(report.to_json(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seldkit",
        description="SELD feature extraction, augmentation, simulation and scoring",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract feature tensors from WAV clips")
    p.add_argument("--input", required=True, help="WAV file or directory of .wav files")
    p.add_argument("--feature", required=True, choices=FEATURE_CHOICES)
    p.add_argument("--geometry", help="geometry JSON (default: tetrahedral array)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="JSON file with FeatureConfig fields")
    p.add_argument("--spec-cutoff-hz", dest="spec_cutoff_hz", type=float)
    p.add_argument("--spatial-low-hz", dest="spatial_low_hz", type=float)
    p.add_argument("--spatial-high-hz", dest="spatial_high_hz", type=float)
    p.add_argument("--mel-bands", dest="mel_bands", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--fail-fast", action="store_true")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("bench", help="time all four feature kinds on one clip")
    p.add_argument("--input", help="4-channel WAV; synthetic 60 s clip if omitted")
    p.add_argument("--geometry")
    p.add_argument("--repeats", type=_repeats, default=3)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("simulate", help="render a scene file to WAV + labels CSV")
    p.add_argument("--scene", required=True)
    p.add_argument("--out-wav", required=True)
    p.add_argument("--out-csv", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("augment", help="apply one augmentation")
    p.add_argument("--op", required=True, choices=["swap", "mask", "shift"])
    p.add_argument("--input", required=True, help="WAV for swap, feature file otherwise")
    p.add_argument("--out", required=True)
    p.add_argument("--geometry")
    p.add_argument("--swap-index", type=int, default=0)
    p.add_argument("--labels", help="annotation CSV to remap along with a swap")
    p.add_argument("--labels-out")
    p.add_argument("--mode", choices=["rect", "cross"], default="rect")
    p.add_argument("--time-span", dest="time_span", type=int)
    p.add_argument("--freq-span", dest="freq_span", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--amount", type=int, default=0, help="bands to shift (signed)")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("evaluate", help="score prediction CSV against reference CSV")
    p.add_argument("--pred", required=True)
    p.add_argument("--ref", required=True)
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
