/** Minimal 32-bit float WAV codec, bit-exact with the primary library's. */

export function encodeWavFloat32(
  channels: Float32Array[],
  sampleRate: number,
): Buffer {
  if (channels.length < 1) {
    throw new Error("need at least one channel");
  }
  const n = channels[0].length;
  for (const ch of channels) {
    if (ch.length !== n) throw new Error("channels must have equal length");
  }
  const m = channels.length;
  const blockAlign = m * 4;
  const dataSize = n * blockAlign;

  const buf = Buffer.alloc(12 + 24 + 12 + 8 + dataSize);
  let pos = 0;
  buf.write("RIFF", pos); pos += 4;
  buf.writeUInt32LE(buf.length - 8, pos); pos += 4;
  buf.write("WAVE", pos); pos += 4;

  buf.write("fmt ", pos); pos += 4;
  buf.writeUInt32LE(16, pos); pos += 4;
  buf.writeUInt16LE(3, pos); pos += 2; // IEEE float
  buf.writeUInt16LE(m, pos); pos += 2;
  buf.writeUInt32LE(sampleRate, pos); pos += 4;
  buf.writeUInt32LE(sampleRate * blockAlign, pos); pos += 4;
  buf.writeUInt16LE(blockAlign, pos); pos += 2;
  buf.writeUInt16LE(32, pos); pos += 2;

  buf.write("fact", pos); pos += 4;
  buf.writeUInt32LE(4, pos); pos += 4;
  buf.writeUInt32LE(n, pos); pos += 4;

  buf.write("data", pos); pos += 4;
  buf.writeUInt32LE(dataSize, pos); pos += 4;
  for (let i = 0; i < n; i++) {
    for (let c = 0; c < m; c++) {
      buf.writeFloatLE(channels[c][i], pos);
      pos += 4;
    }
  }
  return buf;
}

export function decodeWavFloat32(buf: Buffer): {
  channels: Float32Array[];
  sampleRate: number;
} {
  if (buf.length < 12 || buf.toString("ascii", 0, 4) !== "RIFF" ||
      buf.toString("ascii", 8, 12) !== "WAVE") {
    throw new Error("not a RIFF/WAVE file");
  }
  let pos = 12;
  let fmt: { format: number; channels: number; sampleRate: number; bits: number } | null = null;
  let data: Buffer | null = null;
  while (pos + 8 <= buf.length) {
    const id = buf.toString("ascii", pos, pos + 4);
    const size = buf.readUInt32LE(pos + 4);
    const body = buf.subarray(pos + 8, pos + 8 + size);
    if (id === "fmt " && fmt === null) {
      fmt = {
        format: body.readUInt16LE(0),
        channels: body.readUInt16LE(2),
        sampleRate: body.readUInt32LE(4),
        bits: body.readUInt16LE(14),
      };
    } else if (id === "data" && data === null) {
      data = body;
    }
    pos += 8 + size + (size & 1);
  }
  if (!fmt || !data) throw new Error("missing fmt or data chunk");
  if (fmt.format !== 3 || fmt.bits !== 32) {
    throw new Error(`only 32-bit float WAV supported here (format ${fmt.format})`);
  }
  const frames = Math.floor(data.length / (fmt.channels * 4));
  const channels = Array.from(
    { length: fmt.channels },
    () => new Float32Array(frames),
  );
  for (let i = 0; i < frames; i++) {
    for (let c = 0; c < fmt.channels; c++) {
      channels[c][i] = data.readFloatLE((i * fmt.channels + c) * 4);
    }
  }
  return { channels, sampleRate: fmt.sampleRate };
}
