/** Shared shapes for the binding surface. */

export interface ChannelRole {
  kind: "spec" | "gcc" | "epv" | "ipd" | "nipd";
  mics: number[];
}

export interface AxisMeta {
  kind: "frequency" | "mel" | "lag";
  values: number[];
  unit: string;
}

export interface FeatureResult {
  /** Row-major float32 payload, exactly the bytes the CLI writes. */
  data: Float32Array;
  /** Tensor dims, [channels, frames, bins]. */
  dims: number[];
  kind: string;
  channelRoles: ChannelRole[];
  axisMeta: Record<string, AxisMeta>;
  /** Verbatim sidecar document (includes config and config_hash). */
  sidecar: Record<string, unknown>;
}

export type FeatureKind = "salsa-lite" | "salsa" | "salsa-ipd" | "melspecgcc";

export interface ExtractOptions {
  /** Microphone positions in metres, M x 3; default: the tetrahedral array. */
  geometry?: number[][];
  /** FeatureConfig field overrides, passed through as a config file. */
  config?: Record<string, unknown>;
  threads?: number;
}

export interface AnnotationRow {
  frame: number;
  classId: number;
  trackId?: number;
  azimuth: number;
  elevation: number;
}

export interface MetricsReport {
  er20: number;
  f20: number;
  leCd: number;
  lrCd: number;
  eSeld: number;
  counts: Record<string, number>;
}

export interface MaskOptions {
  mode?: "rect" | "cross";
  timeSpan?: number;
  freqSpan?: number;
  seed?: number;
}
