/** Annotation CSV rows: frame,class,track,azimuth,elevation per event. */

import type { AnnotationRow } from "./types.js";

function formatAngle(v: number): string {
  return Number.isInteger(v) ? String(v) : String(v);
}

export function encodeAnnotations(rows: AnnotationRow[]): string {
  const sorted = [...rows].sort((a, b) => a.frame - b.frame);
  const lines = sorted.map(
    (r) =>
      `${r.frame},${r.classId},${r.trackId ?? 0},` +
      `${formatAngle(r.azimuth)},${formatAngle(r.elevation)}`,
  );
  return lines.length ? lines.join("\n") + "\n" : "";
}

export function decodeAnnotations(text: string): AnnotationRow[] {
  const rows: AnnotationRow[] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line) continue;
    const parts = line.split(",");
    if (parts.length !== 5) {
      throw new Error(`expected 5 CSV fields, got ${parts.length}`);
    }
    rows.push({
      frame: Number(parts[0]),
      classId: Number(parts[1]),
      trackId: Number(parts[2]),
      azimuth: Number(parts[3]),
      elevation: Number(parts[4]),
    });
  }
  return rows;
}
