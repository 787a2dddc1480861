/** The SELDFT01 feature container, byte-identical to the primary library.
 *
 * Layout: 8-byte magic "SELDFT01", dtype byte (0 = float32 LE), ndim byte,
 * ndim little-endian u64 dims, then the row-major float32 payload.  A JSON
 * sidecar sits next to the file at <path>.json.
 */

import { readFileSync, writeFileSync } from "node:fs";

import type { AxisMeta, ChannelRole, FeatureResult } from "./types.js";

const MAGIC = "SELDFT01";

export function decodeFeatureFile(path: string): FeatureResult {
  const buf = readFileSync(path);
  if (buf.length < 10 || buf.toString("ascii", 0, 8) !== MAGIC) {
    throw new Error(`${path}: bad magic, not a feature file`);
  }
  const dtype = buf.readUInt8(8);
  if (dtype !== 0) throw new Error(`${path}: unknown dtype code ${dtype}`);
  const ndim = buf.readUInt8(9);
  if (ndim < 1 || ndim > 8) throw new Error(`${path}: implausible ndim ${ndim}`);
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
  const dims: number[] = [];
  for (let i = 0; i < ndim; i++) {
    const dim = view.getBigUint64(10 + 8 * i, true);
    if (dim > BigInt(Number.MAX_SAFE_INTEGER)) {
      throw new Error(`${path}: dim ${dim} overflows`);
    }
    dims.push(Number(dim));
  }
  const headerEnd = 10 + 8 * ndim;
  const count = dims.reduce((a, b) => a * b, 1);
  if (buf.length - headerEnd !== count * 4) {
    throw new Error(
      `${path}: payload holds ${buf.length - headerEnd} bytes, dims need ${count * 4}`,
    );
  }
  // copy out of the Buffer pool so the view is tight and aligned
  const payload = Buffer.from(buf.subarray(headerEnd));
  const data = new Float32Array(payload.buffer, payload.byteOffset, count);

  const sidecar = JSON.parse(readFileSync(`${path}.json`, "utf-8")) as Record<
    string,
    unknown
  >;
  return {
    data,
    dims,
    kind: sidecar.kind as string,
    channelRoles: sidecar.channel_roles as ChannelRole[],
    axisMeta: sidecar.axis_meta as Record<string, AxisMeta>,
    sidecar,
  };
}

export function encodeFeatureFile(path: string, feature: FeatureResult): void {
  const header = Buffer.alloc(10 + 8 * feature.dims.length);
  header.write(MAGIC, 0, "ascii");
  header.writeUInt8(0, 8);
  header.writeUInt8(feature.dims.length, 9);
  feature.dims.forEach((dim, i) => {
    header.writeBigUInt64LE(BigInt(dim), 10 + 8 * i);
  });
  const payload = Buffer.from(
    feature.data.buffer,
    feature.data.byteOffset,
    feature.data.byteLength,
  );
  writeFileSync(path, Buffer.concat([header, payload]));
  writeFileSync(`${path}.json`, JSON.stringify(feature.sidecar, null, 2) + "\n");
}
