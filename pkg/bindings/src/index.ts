/** In-memory array bindings to the seldkit feature toolkit.
 *
 * Every function drives the installed seldkit CLI through temp files and
 * the published file formats, so results are bit-identical to direct CLI
 * runs by construction. All entry points are asynchronous: extraction runs
 * in a subprocess, so data-loader workers can overlap freely.
 */

import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { decodeAnnotations, encodeAnnotations } from "./annotations.js";
import { runCli } from "./cli.js";
import { decodeFeatureFile, encodeFeatureFile } from "./seldft.js";
import type {
  AnnotationRow,
  ExtractOptions,
  FeatureKind,
  FeatureResult,
  MaskOptions,
  MetricsReport,
} from "./types.js";
import { decodeWavFloat32, encodeWavFloat32 } from "./wav.js";

export * from "./types.js";
export { decodeFeatureFile, encodeFeatureFile } from "./seldft.js";
export { decodeWavFloat32, encodeWavFloat32 } from "./wav.js";
export { encodeAnnotations, decodeAnnotations } from "./annotations.js";

function withTempDir<T>(fn: (dir: string) => Promise<T>): Promise<T> {
  const dir = mkdtempSync(join(tmpdir(), "seldkit-"));
  return fn(dir).finally(() => rmSync(dir, { recursive: true, force: true }));
}

function geometryArgs(dir: string, geometry?: number[][]): string[] {
  if (!geometry) return [];
  const path = join(dir, "geometry.json");
  writeFileSync(path, JSON.stringify({ positions: geometry }));
  return ["--geometry", path];
}

/**
 * Extract a feature tensor from in-memory audio.
 *
 * `samples` is one Float32Array per channel (equal lengths). The result's
 * payload is exactly what the CLI writes for the same audio and config.
 */
export function extract(
  samples: Float32Array[],
  sampleRate: number,
  kind: FeatureKind,
  options: ExtractOptions = {},
): Promise<FeatureResult> {
  if (samples.length < 2) {
    throw new Error("extraction needs at least 2 channels");
  }
  return withTempDir(async (dir) => {
    const wav = join(dir, "clip.wav");
    writeFileSync(wav, encodeWavFloat32(samples, sampleRate));
    const args = [
      "extract",
      "--input", wav,
      "--feature", kind,
      "--out", join(dir, "out"),
      ...geometryArgs(dir, options.geometry),
    ];
    if (options.config) {
      const cfg = join(dir, "config.json");
      writeFileSync(cfg, JSON.stringify(options.config));
      args.push("--config", cfg);
    }
    if (options.threads) {
      args.push("--threads", String(options.threads));
    }
    await runCli(args);
    return decodeFeatureFile(join(dir, "out", "clip.seldft"));
  });
}

/** Score prediction rows against reference rows (segment-based metrics). */
export function evaluate(
  predRows: AnnotationRow[],
  refRows: AnnotationRow[],
): Promise<MetricsReport> {
  return withTempDir(async (dir) => {
    const pred = join(dir, "pred.csv");
    const ref = join(dir, "ref.csv");
    writeFileSync(pred, encodeAnnotations(predRows));
    writeFileSync(ref, encodeAnnotations(refRows));
    const out = JSON.parse(
      await runCli(["evaluate", "--pred", pred, "--ref", ref]),
    ) as {
      er20: number; f20: number; le_cd: number; lr_cd: number; e_seld: number;
      counts: Record<string, number>;
    };
    return {
      er20: out.er20,
      f20: out.f20,
      leCd: out.le_cd,
      lrCd: out.lr_cd,
      eSeld: out.e_seld,
      counts: out.counts,
    };
  });
}

/** Apply a rectangular or cross-shaped time-frequency mask. */
export function applyMask(
  feature: FeatureResult,
  options: MaskOptions = {},
): Promise<FeatureResult> {
  return withTempDir(async (dir) => {
    const src = join(dir, "in.seldft");
    const dst = join(dir, "out.seldft");
    encodeFeatureFile(src, feature);
    const args = [
      "augment", "--op", "mask", "--input", src, "--out", dst,
      "--mode", options.mode ?? "rect",
      "--seed", String(options.seed ?? 0),
    ];
    if (options.timeSpan !== undefined) args.push("--time-span", String(options.timeSpan));
    if (options.freqSpan !== undefined) args.push("--freq-span", String(options.freqSpan));
    await runCli(args);
    return decodeFeatureFile(dst);
  });
}

/** Shift spectral channels along the frequency axis; GCC channels stay put. */
export function freqShift(
  feature: FeatureResult,
  amount: number,
): Promise<FeatureResult> {
  return withTempDir(async (dir) => {
    const src = join(dir, "in.seldft");
    const dst = join(dir, "out.seldft");
    encodeFeatureFile(src, feature);
    await runCli([
      "augment", "--op", "shift", "--input", src, "--out", dst,
      "--amount", String(amount),
    ]);
    return decodeFeatureFile(dst);
  });
}

/**
 * Apply one of the geometry's channel-swap transforms to audio and,
 * optionally, the matching label rows.
 */
export function applyChannelSwap(
  samples: Float32Array[],
  sampleRate: number,
  swapIndex: number,
  options: { geometry?: number[][]; labels?: AnnotationRow[] } = {},
): Promise<{ samples: Float32Array[]; labels?: AnnotationRow[] }> {
  return withTempDir(async (dir) => {
    const wav = join(dir, "in.wav");
    const out = join(dir, "out.wav");
    writeFileSync(wav, encodeWavFloat32(samples, sampleRate));
    const args = [
      "augment", "--op", "swap", "--input", wav, "--out", out,
      "--swap-index", String(swapIndex),
      ...geometryArgs(dir, options.geometry),
    ];
    let labelsOut: string | undefined;
    if (options.labels) {
      const labels = join(dir, "labels.csv");
      labelsOut = join(dir, "labels_out.csv");
      writeFileSync(labels, encodeAnnotations(options.labels));
      args.push("--labels", labels, "--labels-out", labelsOut);
    }
    await runCli(args);
    const swapped = decodeWavFloat32(readFileSync(out));
    return {
      samples: swapped.channels,
      labels: labelsOut
        ? decodeAnnotations(readFileSync(labelsOut, "utf-8"))
        : undefined,
    };
  });
}
